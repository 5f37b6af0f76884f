"""Principalization and resolution trees built point by point."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .algebra import (
    Ideal,
    JetBudget,
    Polynomial,
    Role,
    VariableContext,
    exact_divide_by_monomial,
    translate_to_origin,
)
from .blowup import (
    BlowupRecord,
    ChartModel,
    blowup_charts,
    controlled_transform,
    monomial_center,
    monomial_hull_blowup,
    pullback_monomial,
    strict_transform,
    weighted_blowup_charts,
)
from .centers import Invariant, QRegularCenter, center_for_mode, invariant_at_origin, _qstr
from .diffcalc import INF, log_order_at_origin, monomial_hull
from .errors import DropAssertionError, WeightresError
from .lp import rank
from .monomial import MonomialIdeal

MODES = ("weighted", "log-weighted", "log-reduction", "resolve")


@dataclass(frozen=True)
class PointFinderConfig:
    num_bound: int = 2
    den_bound: int = 2
    points: tuple[tuple, ...] = ()
    max_points: int = 8
    max_candidates: int = 50000

    def __post_init__(self):
        if self.num_bound < 0 or self.den_bound < 0 or self.max_points < 1:
            raise ValueError("bounds must be nonnegative")

    def values(self) -> list[Fraction]:
        vals = {Fraction(0)}
        for q in range(1, self.den_bound + 1):
            for p in range(-self.num_bound, self.num_bound + 1):
                vals.add(Fraction(p, q))
        return sorted(vals)


@dataclass
class NodeState:
    """Everything needed to expand a node: no ancestry."""

    ideal: Ideal
    strict: Ideal | None = None
    monomial: MonomialIdeal | None = None
    target: int | None = None


@dataclass
class ResolutionNode:
    id: int
    parent: int | None
    state: NodeState
    focus: tuple[Fraction, ...]
    invariant: Invariant
    chart: str | None = None
    stabilizer: int = 1
    depth: int = 0
    center: QRegularCenter | None = None
    phase: str | None = None
    children: list[int] = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    @property
    def ctx(self) -> VariableContext:
        return self.state.ideal.ctx

    @property
    def ideal(self) -> Ideal:
        return self.state.ideal


@dataclass
class ResolutionTree:
    mode: str
    nodes: list[ResolutionNode] = field(default_factory=list)

    @property
    def root(self) -> ResolutionNode | None:
        return self.nodes[0] if self.nodes else None

    def edges(self) -> list[tuple[ResolutionNode, ResolutionNode]]:
        return [(self.nodes[n.parent], n) for n in self.nodes if n.parent is not None]

    def leaves(self) -> list[ResolutionNode]:
        return [n for n in self.nodes if not n.children]

    @property
    def depth_exceeded(self) -> bool:
        return any(n.flags.get("unresolved") for n in self.nodes)

    def unverified_count(self) -> int:
        return sum(1 for n in self.nodes if n.flags.get("unverified_locus"))


@dataclass(frozen=True)
class TraceEntry:
    node: int
    parent: int | None
    chart: str | None
    invariant: Invariant
    center: dict | None
    stabilizer: int


def trace_of(tree: ResolutionTree) -> list[TraceEntry]:
    return [
        TraceEntry(n.id, n.parent, n.chart, n.invariant, n.center.summary() if n.center else None, n.stabilizer)
        for n in tree.nodes
    ]


def _is_log(mode: str) -> bool:
    return mode in ("log-weighted", "log-reduction")


def _fiber_restriction(I: Ideal, ch: ChartModel):
    free, fixed = ch.fiber_variables()
    return free, [g.set_zero(fixed) for g in I.gens]


def discover_points(I: Ideal, ch: ChartModel, cfg: PointFinderConfig):
    """Rational zeros of the transform over the center's origin.

    Returns (points, unverified) where points are full child coordinate
    vectors and ``unverified`` says the search cannot be complete.
    """
    free, restricted = _fiber_restriction(I, ch)
    restricted = [g for g in restricted if g]
    if not restricted:
        restricted = [Polynomial.zero(I.ctx)]
    if any(g.is_constant() and not g.is_zero() for g in restricted):
        return [], False
    arity = I.ctx.arity

    def full(vals):
        pt = [Fraction(0)] * arity
        for i, v in zip(free, vals):
            pt[i] = Fraction(v)
        return tuple(pt)

    def is_zero_at(pt):
        return all(g.evaluate(pt) == 0 for g in restricted)

    found: list[tuple[Fraction, ...]] = []
    origin = full([0] * len(free))
    if is_zero_at(origin):
        found.append(origin)
    for p in cfg.points:
        if len(p) == len(free):
            cand = full(p)
        elif len(p) == arity:
            cand = tuple(Fraction(v) for v in p)
        else:
            continue
        if is_zero_at(cand) and cand not in found:
            found.append(cand)
    vals = cfg.values()
    total = len(vals) ** len(free)
    unverified = True
    if total <= cfg.max_candidates:
        for combo in product(vals, repeat=len(free)):
            cand = full(combo)
            if cand not in found and is_zero_at(cand):
                found.append(cand)
    rest = sorted(p for p in found if p != origin)
    ordered = ([origin] if origin in found else []) + rest
    return ordered[: cfg.max_points], unverified


def _demote(ctx: VariableContext, point: Sequence[Fraction], log: bool) -> VariableContext:
    if not log:
        return ctx
    for i, v in enumerate(point):
        if v and ctx.is_monomial(i):
            ctx = ctx.with_role(i, Role.REGULAR)
    return ctx


def _recontext(I: Ideal | None, ctx: VariableContext) -> Ideal | None:
    if I is None:
        return None
    return Ideal(ctx, [Polynomial(ctx, g.terms, _trusted=True) for g in I.gens], I.truncation)


def _move_to_point(state: NodeState, point: Sequence[Fraction], log: bool) -> NodeState:
    ctx = _demote(state.ideal.ctx, point, log)
    ideal = translate_to_origin(_recontext(state.ideal, ctx), point, allow_monomial=True)
    strict = None
    if state.strict is not None:
        strict = translate_to_origin(_recontext(state.strict, ctx), point, allow_monomial=True)
    N = state.monomial
    if N is not None:
        gens = [tuple(0 if point[i] else v for i, v in enumerate(g)) for g in N.gens]
        N = MonomialIdeal(ctx, N.denominator, tuple(gens), mixed=True).normalized()
    return NodeState(ideal, strict, N, state.target)


def split_principal_hull(state: NodeState) -> NodeState:
    """Move a principal monomial hull of the clean part into the monomial factor.

    Blowing up an invertible ideal changes nothing, so no blowup is spent on it.
    """
    I = state.ideal
    hull = monomial_hull(I)
    if len(hull.gens) != 1 or hull.is_unit() or I.is_zero():
        return state
    (m,) = hull.gens
    clean = Ideal(I.ctx, [exact_divide_by_monomial(g, m) for g in I.gens], I.truncation)
    N = (state.monomial or MonomialIdeal.unit(I.ctx)) * MonomialIdeal(I.ctx, 1, (m,), mixed=True)
    return NodeState(clean, state.strict, N.normalized(), state.target)


def is_smooth_at_origin(Z: Ideal) -> bool:
    """Jacobian test: the linear parts have full rank."""
    gens = [g for g in Z.gens if g]
    if not gens:
        return False
    if any(g.constant_term() for g in gens):
        return True
    rows = [[g.linear_coefficient(i) for i in range(Z.ctx.arity)] for g in gens]
    return rank(rows) == len(gens)


class Driver:
    """Expands nodes depth-first in chart order, then point order."""

    def __init__(self, mode: str, cfg: PointFinderConfig | None = None, budget: JetBudget | None = None,
                 max_depth: int = 12, assert_drop: bool = True, selector=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.cfg = cfg or PointFinderConfig()
        self.budget = budget or JetBudget()
        self.max_depth = max_depth
        self.assert_drop = assert_drop
        self.selector = selector
        self.log = _is_log(mode)

    # invariants and ordering keys
    def node_invariant(self, state: NodeState) -> Invariant:
        if self.mode == "resolve":
            Z = state.strict
            if Z.is_unit_at_origin():
                return Invariant.unit()
            return invariant_at_origin(Z, False, self.budget)
        return invariant_at_origin(state.ideal, self.log, self.budget)

    def drop_key(self, state: NodeState, inv: Invariant):
        if self.mode != "log-reduction":
            return (inv,)
        l = log_order_at_origin(state.ideal)
        N = state.monomial
        nontrivial = N is not None and not N.is_unit()
        if l < state.target:
            return (0, Invariant.unit(), nontrivial)
        return (1, inv, nontrivial)

    def is_leaf(self, state: NodeState, inv: Invariant) -> bool:
        if self.mode == "resolve":
            Z = state.strict
            return Z.is_unit_at_origin() or is_smooth_at_origin(Z)
        if self.mode == "log-reduction":
            l = log_order_at_origin(state.ideal)
            N = state.monomial
            return l < state.target and (N is None or N.is_unit())
        return inv.is_unit()

    # one blowup
    def plan(self, state: NodeState) -> tuple[str, QRegularCenter, BlowupRecord]:
        if self.mode == "resolve":
            _, c = center_for_mode(state.strict, "weighted", self.budget, self.selector)
            return "resolve", c, weighted_blowup_charts(c)
        if self.mode == "log-reduction":
            I = state.ideal
            l = log_order_at_origin(I)
            if l == INF:
                rec = monomial_hull_blowup(I)
                return "clean-initial", rec.center, rec
            if l < state.target:
                c = monomial_center(I.ctx, state.monomial.scaled(Fraction(1, state.target)))
                return "clean-final", c, blowup_charts(c, "kummer-monomial")
            _, c = center_for_mode(I, "log-weighted", self.budget, self.selector)
            return "regular", c, weighted_blowup_charts(c)
        _, c = center_for_mode(state.ideal, self.mode, self.budget, self.selector)
        return self.mode, c, weighted_blowup_charts(c)

    def transform(self, state: NodeState, phase: str, rec: BlowupRecord, ch: ChartModel) -> NodeState:
        if self.mode == "resolve":
            return NodeState(controlled_transform(state.ideal, ch), strict_transform(state.strict, ch))
        if self.mode != "log-reduction":
            return NodeState(controlled_transform(state.ideal, ch))
        N = state.monomial or MonomialIdeal.unit(state.ideal.ctx)
        Np = pullback_monomial(N, ch)
        exc = ch.exceptional_monomial()
        if phase == "clean-initial":
            clean = controlled_transform(state.ideal, ch)
            Np = _times(Np, exc, Fraction(1))
        elif phase == "clean-final":
            clean = Ideal(ch.child, [ch.pullback(g) for g in state.ideal.gens], state.ideal.truncation)
            Np = _times(Np, exc, Fraction(-state.target))
        else:
            l = rec.center.multiplicities[0]
            clean = controlled_transform(state.ideal, ch)
            Np = _times(Np, exc, (l - state.target) / l)
        return NodeState(clean, None, Np, state.target)

    def expand(self, state: NodeState):
        """Center and children (chart, point, child state, unverified flag) of a node."""
        phase, center, rec = self.plan(state)
        out = []
        for ch in rec.charts:
            child = self.transform(state, phase, rec, ch)
            probe = child.strict if self.mode == "resolve" else child.ideal
            points, unverified = discover_points(probe, ch, self.cfg)
            origin = (Fraction(0),) * ch.child.arity
            if origin not in points:
                # the chart origin is always tracked, even where the transform is a unit
                points = [origin] + points
            for pt in points:
                moved = _move_to_point(child, pt, self.log)
                if self.mode == "log-reduction":
                    moved = split_principal_hull(moved)
                out.append((ch, pt, moved, unverified))
        return phase, center, rec, out

    def run(self, root: NodeState) -> ResolutionTree:
        tree = ResolutionTree(self.mode)
        inv = self.node_invariant(root)
        node = ResolutionNode(0, None, root, (Fraction(0),) * root.ideal.ctx.arity, inv)
        tree.nodes.append(node)
        stack = [node]
        while stack:
            node = stack.pop()
            if self.is_leaf(node.state, node.invariant):
                continue
            if node.depth >= self.max_depth:
                node.flags["unresolved"] = True
                continue
            phase, center, rec, kids = self.expand(node.state)
            node.center = center
            node.phase = phase
            if center.truncation is not None:
                node.flags["budget"] = center.truncation
            parent_key = self.drop_key(node.state, node.invariant)
            created = []
            for ch, pt, st, unverified in kids:
                inv = self.node_invariant(st)
                child = ResolutionNode(
                    len(tree.nodes), node.id, st, pt, inv, ch.label, ch.stabilizer, node.depth + 1
                )
                if unverified:
                    node.flags["unverified_locus"] = True
                if not _key_less(self.drop_key(st, inv), parent_key):
                    child.flags["drop_violation"] = True
                    if self.assert_drop:
                        raise DropAssertionError(
                            f"invariant {inv} at {_fmt_point(pt)} on chart {ch.label} does not drop below {node.invariant}",
                            reproducer={
                                "variables": list(node.ctx.names),
                                "roles": [r.value for r in node.ctx.roles],
                                "ideal": [str(g) for g in node.ideal.gens],
                                "center": center.summary(),
                                "chart": ch.label,
                                "point": [_qstr(v) for v in pt],
                                "child_ideal": [str(g) for g in st.ideal.gens],
                            },
                        )
                tree.nodes.append(child)
                node.children.append(child.id)
                created.append(child)
            stack.extend(reversed(created))
        _renumber(tree)
        return tree


def _times(N: MonomialIdeal, exc: Sequence[int], factor: Fraction) -> MonomialIdeal:
    factor = Fraction(factor)
    den = N.denominator * factor.denominator
    gens = []
    for g in N.gens:
        v = tuple(x * factor.denominator + factor.numerator * N.denominator * c for x, c in zip(g, exc))
        gens.append(tuple(max(0, x) for x in v))
    return MonomialIdeal(N.ctx, den, tuple(gens), mixed=True).normalized()


def _key_less(a, b) -> bool:
    for x, y in zip(a, b):
        if x != y:
            return x < y
    return False


def _fmt_point(pt) -> str:
    return "(" + ", ".join(_qstr(Fraction(v)) for v in pt) + ")"


def _renumber(tree: ResolutionTree) -> None:
    """Renumber nodes in depth-first preorder so ids are topological and stable."""
    order: list[ResolutionNode] = []
    stack = [tree.nodes[0]] if tree.nodes else []
    while stack:
        n = stack.pop()
        order.append(n)
        stack.extend(reversed([tree.nodes[c] for c in n.children]))
    remap = {n.id: i for i, n in enumerate(order)}
    for n in order:
        n.id = remap[n.id]
        n.parent = remap[n.parent] if n.parent is not None else None
        n.children = [remap[c] for c in n.children]
    tree.nodes = order


def _root_state(I: Ideal, mode: str, target: int | None = None) -> NodeState:
    if mode == "resolve":
        return NodeState(I, I)
    if mode == "log-reduction":
        return split_principal_hull(NodeState(I, None, MonomialIdeal.unit(I.ctx), target))
    return NodeState(I)


def _run(mode, I, cfg, budget, max_depth, assert_drop, selector=None, target=None):
    if I.is_zero():
        raise WeightresError("cannot principalize the zero ideal")
    driver = Driver(mode, cfg, budget, max_depth, assert_drop, selector)
    tree = driver.run(_root_state(I, mode, target))
    return tree, trace_of(tree)


def principalize_weighted(I: Ideal, cfg: PointFinderConfig | None = None, budget: JetBudget | None = None,
                          max_depth: int = 12, assert_drop: bool = True):
    return _run("weighted", I, cfg, budget, max_depth, assert_drop)


def principalize_log_weighted(I: Ideal, cfg: PointFinderConfig | None = None, budget: JetBudget | None = None,
                              max_depth: int = 12, assert_drop: bool = True):
    return _run("log-weighted", I, cfg, budget, max_depth, assert_drop)


def log_order_reduction(I: Ideal, d: int, cfg: PointFinderConfig | None = None, budget: JetBudget | None = None,
                        max_steps: int = 12, assert_drop: bool = True):
    if d < 1:
        raise ValueError("target order must be positive")
    return _run("log-reduction", I, cfg, budget, max_steps, assert_drop, target=d)


def resolve_nonembedded(Z: Ideal, cfg: PointFinderConfig | None = None, budget: JetBudget | None = None,
                        max_depth: int = 12, assert_drop: bool = True):
    return _run("resolve", Z, cfg, budget, max_depth, assert_drop)


def run_mode(mode: str, I: Ideal, **kw):
    if mode == "weighted":
        return principalize_weighted(I, **kw)
    if mode == "log-weighted":
        return principalize_log_weighted(I, **kw)
    if mode == "resolve":
        return resolve_nonembedded(I, **kw)
    raise ValueError(mode)


def recenter(I: Ideal, point: Sequence, log: bool) -> Ideal:
    """Move ``point`` to the origin; in log mode monomial variables nonzero there become regular."""
    return _move_to_point(NodeState(I), tuple(Fraction(v) for v in point), log).ideal
