"""Invariants, admissibility, and the iterated maximal-contact center."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .algebra import (
    CoordinateChange,
    Ideal,
    JetBudget,
    Polynomial,
    VariableContext,
    eliminate_parameter,
    linear_basis,
    local_branch,
    to_sympy,
)
from .diffcalc import (
    order_at_origin,
    INF,
    ContactSelector,
    DerivationBasis,
    derivative_ideal,
    maximal_contact,
    monomial_hull,
    order_for,
    restrict_with,
    strip_units,
    reduce_by_monomials,
)
from .errors import BudgetError, WeightresError
from .lp import newton_contains, newton_vertices
from .monomial import MonomialIdeal

TRAILING = (None, "inf", "zero")


@functools.total_ordering
@dataclass(frozen=True)
class Invariant:
    """Rational entries plus an optional trailing marker ("inf" or "zero").

    Longer sequences are smaller when one extends the other, unless the
    extension is the "inf" marker: an empty slot sits above every rational
    and below infinity, so (2, 2) < (2) < (2, inf). The zero marker is the
    minimum and () the maximum.

    >>> Invariant.of(2) > Invariant.of(2, 2)
    True
    """

    entries: tuple[Fraction, ...] = ()
    trailing: str | None = None

    def __post_init__(self):
        if self.trailing not in TRAILING:
            raise ValueError(f"bad trailing marker {self.trailing!r}")
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    @classmethod
    def of(cls, *entries, infinite: bool = False) -> "Invariant":
        return cls(tuple(entries), "inf" if infinite else None)

    @classmethod
    def unit(cls) -> "Invariant":
        return cls((), "zero")

    def is_unit(self) -> bool:
        return self.trailing == "zero"

    def _is_top(self) -> bool:
        return not self.entries and self.trailing is None

    def _tokens(self):
        return [(0, e) for e in self.entries] + ([(1, 0)] if self.trailing == "inf" else [])

    def compare(self, other: "Invariant") -> int:
        if self.is_unit() or other.is_unit():
            return (not self.is_unit()) - (not other.is_unit())
        top_a, top_b = self._is_top(), other._is_top()
        if top_a or top_b:
            return top_a - top_b
        a, b = self._tokens(), other._tokens()
        for x, y in zip(a, b):
            if x != y:
                return 1 if x > y else -1
        if len(a) == len(b):
            return 0
        # the longer one decides by its next token against an empty slot
        nxt, sign = (b[len(a)], 1) if len(a) < len(b) else (a[len(b)], -1)
        return -sign if nxt[0] == 1 else sign

    def __lt__(self, other):
        return self.compare(other) < 0

    def __eq__(self, other):
        return isinstance(other, Invariant) and self.compare(other) == 0

    def __hash__(self):
        return hash((self.entries, self.trailing))

    def __str__(self):
        if self.is_unit():
            return "(0)"
        parts = [str(e) for e in self.entries] + (["inf"] if self.trailing == "inf" else [])
        return "(" + ", ".join(parts) + ")"

    __repr__ = __str__


def invariant_compare(a: Invariant, b: Invariant) -> str:
    return {-1: "less", 0: "equal", 1: "greater"}[a.compare(b)]


_FACTORIAL_LIMIT = 2000


def integrality_check(inv: Invariant, diagnostics: list | None = None) -> bool:
    """q_1 integral and q_{i+1} * prod_{j<i} (d_j - 1)! integral along d_j = q_{j+1} * prod.

    >>> integrality_check(Invariant.of(2, 3, 3, 3)), integrality_check(Invariant.of(2, Fraction(3, 2)))
    (True, False)
    """
    diag = diagnostics if diagnostics is not None else []
    qs = inv.entries
    if not qs:
        return True
    P = 1  # product of (d_j - 1)!; None once it exceeds every denominator we can meet
    for i, q in enumerate(qs):
        if P is None:
            if q.denominator > _FACTORIAL_LIMIT - 1:
                diag.append(f"entry {i}: denominator {q.denominator} not decided")
            continue
        d = q * P
        if d.denominator != 1:
            diag.append(f"entry {i}: {q} * {P} = {d} is not an integer")
            return False
        d = int(d)
        if d >= _FACTORIAL_LIMIT:
            P = None
        else:
            P *= math.factorial(d - 1)
    return True


@dataclass(frozen=True)
class CenterParameter:
    """Adapted coordinate ``name`` equals ``expression`` (in the original coordinates)."""

    name: str
    expression: Polynomial
    q: Fraction


@dataclass(frozen=True)
class QRegularCenter:
    ctx: VariableContext
    parameters: tuple[CenterParameter, ...]
    monomial_part: MonomialIdeal | None = None
    change: CoordinateChange | None = None
    log: bool = False
    d_sequence: tuple[int | None, ...] = ()
    truncation: int | None = None

    def __post_init__(self):
        qs = [p.q for p in self.parameters]
        if any(a > b for a, b in zip(qs, qs[1:])):
            raise ValueError("multiplicities must ascend")
        if self.change is None:
            object.__setattr__(self, "change", CoordinateChange(self.ctx))

    @property
    def multiplicities(self) -> tuple[Fraction, ...]:
        return tuple(p.q for p in self.parameters)

    @property
    def a(self) -> int:
        out = 1
        for q in self.multiplicities:
            out = lcm(out, q.numerator)
        return out

    @property
    def weights(self) -> tuple[int, ...]:
        a = self.a
        out = []
        for q in self.multiplicities:
            w = a / q
            assert w.denominator == 1
            out.append(int(w))
        return tuple(out)

    @property
    def has_monomial_part(self) -> bool:
        N = self.monomial_part
        return N is not None and not N.is_zero() and not N.is_unit()

    @property
    def invariant(self) -> Invariant:
        return Invariant(self.multiplicities, "inf" if self.has_monomial_part else None)

    def parameter_indices(self) -> tuple[int, ...]:
        return tuple(self.ctx.index(p.name) for p in self.parameters)

    def newton_points(self) -> tuple[list[int], list[tuple[Fraction, ...]]]:
        """Coordinates involved and the generating points of the center's Newton region."""
        idx = list(self.parameter_indices())
        mono: list[int] = []
        if self.has_monomial_part:
            N = self.monomial_part
            mono = [i for i in range(self.ctx.arity) if any(g[i] for g in N.gens)]
        coords = idx + mono
        pts = []
        for k, p in enumerate(self.parameters):
            v = [Fraction(0)] * len(coords)
            v[k] = p.q
            pts.append(tuple(v))
        if self.has_monomial_part:
            for g in self.monomial_part.rational_gens():
                pts.append(tuple([Fraction(0)] * len(idx) + [g[i] for i in mono]))
        return coords, pts

    def describe(self) -> str:
        parts = [f"{p.name}^{p.q}" if p.q != 1 else p.name for p in self.parameters]
        if self.has_monomial_part:
            parts.append(f"N={self.monomial_part}")
        return "(" + ", ".join(parts) + ")"

    def summary(self) -> dict:
        """JSON-ready description with stable keys."""
        N = self.monomial_part if self.has_monomial_part else None
        return {
            "parameters": [str(p.expression) for p in self.parameters],
            "coordinates": [p.name for p in self.parameters],
            "multiplicities": [_qstr(q) for q in self.multiplicities],
            "monomial_part": None
            if N is None
            else {"denominator": N.denominator, "generators": [list(g) for g in N.gens], "text": str(N)},
            "weights": list(self.weights),
            "scaling": self.a,
        }


def _qstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


@dataclass(frozen=True)
class AdmissibilityReport:
    verdict: bool
    witnesses: tuple[tuple[int, Polynomial, Fraction], ...] = ()

    def __bool__(self):
        return self.verdict


def admissibility_check(I: Ideal, c: QRegularCenter) -> AdmissibilityReport:
    """Rees-style test: every term lies in the center's Newton region.

    Generators are first rewritten in the center's adapted coordinates.
    Witnesses carry (generator index, offending term, weighted degree).
    """
    if I.ctx != c.ctx:
        I = I.embed(c.ctx)
    coords, pts = c.newton_points()
    nparam = len(c.parameters)
    witnesses = []
    for gi, g in enumerate(I.gens):
        h = c.change.apply(g)
        for e, coeff in h.sorted_terms():
            m = tuple(Fraction(e[i]) for i in coords)
            wdeg = sum((m[k] / c.parameters[k].q for k in range(nparam)), Fraction(0))
            if wdeg >= 1:
                continue
            if pts and c.has_monomial_part and newton_contains(pts, m):
                continue
            witnesses.append((gi, Polynomial(c.ctx, {e: coeff}), wdeg))
    return AdmissibilityReport(not witnesses, tuple(witnesses))


class _NeedMore(Exception):
    """Jet degree too small to decide an order."""


class CenterError(WeightresError):
    pass


def _known_order(J: Ideal, log: bool):
    o = order_for(J, log)
    if J.truncation is not None and (o == INF or o > J.truncation):
        raise _NeedMore
    return o


def _divisible_by_contact(gens: Sequence[Polynomial], t: Polynomial) -> bool:
    """Does every V(g) contain the germ of V(t) at the origin?

    t is smooth there, so of h = gcd(g, t) and t/h exactly one vanishes at 0.
    """
    T = to_sympy(t)
    for g in gens:
        if g.is_zero():
            continue
        h = T.gcd(to_sympy(g))
        q, r = T.div(h)
        if not r.is_zero or q.eval({s: 0 for s in q.gens}) == 0:
            return False
    return True


def _restricted_orders(J: Ideal, D: int, basis: DerivationBasis, elim, log: bool):
    derivs = [derivative_ideal(J, basis, a) for a in range(D)]
    R = [restrict_with(Da, elim) for Da in derivs]
    orders = []
    for Da, Ra in zip(derivs, R):
        o = order_for(Ra, log)
        if Ra.truncation is not None and (o == INF or o > Ra.truncation):
            # jets too short: either truly zero on the contact or we need more terms
            if Da.truncation is None and o == INF and _divisible_by_contact(Da.gens, elim.t):
                o = INF
                Ra = Ideal(Ra.ctx, [])
            else:
                raise _NeedMore
        orders.append(o)
    return R, orders


EXACT_TERM_LIMIT = 100


def _drop_unused(I: Ideal) -> Ideal:
    """Remove variables occurring in no generator; nothing downstream can involve them."""
    J = I
    for i in reversed(range(I.ctx.arity)):
        if all(e[i] == 0 for g in J.gens for e in g.terms):
            sub = J.ctx.without(i)
            J = Ideal(sub, [g.drop_variable(i, sub) for g in J.gens], J.truncation)
    return J


def _center_iteration(I: Ideal, budget: JetBudget, log: bool, selector: ContactSelector | None):
    amb = I.ctx
    J = _drop_unused(I)
    sigma = Fraction(1)
    params: list[CenterParameter] = []
    steps = []
    N = None
    trunc = I.truncation
    while True:
        J = strip_units(J)
        if J.truncation is None and J.gens:
            J = Ideal(J.ctx, reduce_by_monomials(list(J.gens)))
        if J.ctx.arity == 1 and J.truncation is not None:
            o = order_at_origin(J)
            if o <= J.truncation:
                # one variable: a jet of order o generates exactly (x^o)
                J = Ideal(J.ctx, [Polynomial.monomial(J.ctx, (o,))])
        if J.truncation is None and sum(len(g.terms) for g in J.gens) > EXACT_TERM_LIMIT:
            # large exact data more than budget.degree above the order is only carried as a jet
            cut = order_at_origin(J) + budget.degree
            if max(g.degree() for g in J.gens) > cut:
                J = Ideal(J.ctx, [g.truncate(cut) for g in J.gens], cut)
                trunc = cut if trunc is None else min(trunc, cut)
        basis = DerivationBasis(J.ctx, log)
        D = _known_order(J, log)
        if D == INF:
            if log and not J.is_zero():
                N = _lift_monomial(monomial_hull(J).scaled(sigma), amb)
            break
        if D == 0:
            raise CenterError(f"unit ideal reached inside the center iteration: {J}")
        q = sigma * D
        t = maximal_contact(J, D, basis, selector)
        elim = eliminate_parameter(t, budget, regular=basis.regular_indices())
        if J.truncation is not None:
            # t is only known up to the degree of its derivative level
            elim = elim.capped(J.truncation - (D - 1))
        if elim.truncation is not None:
            trunc = elim.truncation if trunc is None else min(trunc, elim.truncation)
        name = J.ctx.names[elim.var]
        params.append(CenterParameter(name, t.embed(amb), q))
        steps.append(elim.embedded(amb))
        R, es = _restricted_orders(J, D, basis, elim, log)
        finite = [a for a in range(D) if es[a] != INF]
        rho = min((Fraction(es[a], D - a) for a in finite), default=None)
        sub = R[0].ctx
        if not finite:
            if log:
                # the restricted coefficient ideal is purely monomial: record its hull
                pieces = []
                for a in range(D):
                    if R[a].is_zero():
                        continue
                    pieces.append(monomial_hull(R[a]).scaled(q / (D - a)))
                N = _combine_monomial(sub, pieces)
                N = _lift_monomial(N, amb)
            break
        L = 1
        for a in finite:
            L = lcm(L, D - a)
        sigma_next = sigma * D / L
        if not log and sub.arity == 1:
            # one variable left: its order decides the last entry
            D_last = min(Fraction(L, D - a) * es[a] for a in finite)
            params.append(CenterParameter(sub.names[0], Polynomial.var(amb, sub.names[0]), sigma_next * D_last))
            break
        gens = []
        known = []
        for a in finite:
            k = L // (D - a)
            T = R[a].truncation
            for g in linear_basis(R[a].gens):
                if T is None:
                    gens.append(g ** k)
                    continue
                # (g + tail)^k - g^k starts in degree T + 1 + (k-1) ord(g)
                Tk = T + (k - 1) * g.order()
                known.append(Tk)
                p = g
                for _ in range(k - 1):
                    p = p.mul_trunc(g, Tk)
                gens.append(p)
        Tj = min(known) if known else None
        if Tj is not None:
            gens = [g.truncate(Tj) for g in gens]
        J = Ideal(sub, linear_basis(gens, DerivationBasis(sub, log).term_key()), Tj)
        sigma = sigma_next
    if N is not None and (N.is_zero() or N.is_unit()):
        N = None
    return params, N, CoordinateChange(amb, tuple(steps)), d_sequence([p.q for p in params]), trunc


def d_sequence(qs: Sequence[Fraction]) -> tuple[int | None, ...]:
    """Unnormalized orders d_i = q_{i+1} * prod_{j<i} (d_j - 1)!; None once too large to print."""
    out: list[int | None] = []
    P = 1
    for q in qs:
        if P is None:
            out.append(None)
            continue
        d = q * P
        if d.denominator != 1 or d >= 171:
            out.append(int(d) if d.denominator == 1 else None)
            P = None
            continue
        out.append(int(d))
        P *= math.factorial(int(d) - 1)
    return tuple(out)


def _combine_monomial(ctx: VariableContext, pieces: Sequence[MonomialIdeal]) -> MonomialIdeal | None:
    if not pieces:
        return None
    den = 1
    for p in pieces:
        den = lcm(den, p.denominator)
    gens = []
    for p in pieces:
        gens.extend(p.lifted(den).gens)
    M = MonomialIdeal(ctx, den, tuple(gens))
    verts = newton_vertices(M.gens)
    return MonomialIdeal(ctx, den, tuple(M.gens[i] for i in verts)).normalized()


def _lift_monomial(N: MonomialIdeal | None, ctx: VariableContext) -> MonomialIdeal | None:
    if N is None:
        return None
    gens = []
    for g in N.gens:
        v = [0] * ctx.arity
        for name, k in zip(N.ctx.names, g):
            v[ctx.index(name)] = k
        gens.append(tuple(v))
    return MonomialIdeal(ctx, N.denominator, tuple(gens))


def _compute_center(I: Ideal, budget: JetBudget | None, log: bool, selector: ContactSelector | None):
    if selector is None:
        return _cached_center(I, budget or JetBudget(), log)
    return _compute_center_uncached(I, budget, log, selector)


@functools.lru_cache(maxsize=4096)
def _cached_center(I: Ideal, budget: JetBudget, log: bool):
    return _compute_center_uncached(I, budget, log, None)


def _compute_center_uncached(I: Ideal, budget: JetBudget | None, log: bool, selector: ContactSelector | None):
    if I.is_zero():
        raise CenterError("the zero ideal has no center")
    if I.is_unit_at_origin():
        raise CenterError("the ideal is a unit at the origin")
    b = budget or JetBudget()
    while True:
        try:
            params, N, change, dseq, trunc = _center_iteration(I, b, log, selector)
            break
        except _NeedMore:
            if b.degree >= b.cap:
                raise BudgetError(f"jet degree {b.degree} cannot decide the center (cap {b.cap})") from None
            b = b.escalate()
    if N is not None:
        N = _vertex_form(N)
    center = QRegularCenter(I.ctx, tuple(params), N, change, log, dseq, trunc)
    return center.invariant, center


def _vertex_form(N: MonomialIdeal) -> MonomialIdeal:
    verts = newton_vertices(N.gens)
    return MonomialIdeal(N.ctx, N.denominator, tuple(N.gens[i] for i in verts)).normalized()


def weighted_center_at_origin(I: Ideal, budget: JetBudget | None = None, selector: ContactSelector | None = None):
    """Invariant and maximal admissible center, all variables treated as regular.

    >>> ctx = VariableContext.make("xyzt")
    >>> x, y, z, t = Polynomial.gens(ctx)
    >>> inv, c = weighted_center_at_origin(Ideal(ctx, [x**2 - y*z*t]))
    >>> inv, c.weights
    ((2, 3, 3, 3), (3, 2, 2, 2))
    """
    return _compute_center(I, budget, False, selector)


def log_weighted_center_at_origin(I: Ideal, budget: JetBudget | None = None, selector: ContactSelector | None = None):
    """Log invariant and center; the monomial type is the hull of the final restriction.

    >>> ctx = VariableContext.make("t", "u")
    >>> t, u = Polynomial.gens(ctx)
    >>> inv, c = log_weighted_center_at_origin(Ideal(ctx, [t**2 + u]))
    >>> inv, c.describe()
    ((2, inf), '(t^2, N=(u))')
    """
    return _compute_center(I, budget, True, selector)


def center_for_mode(I: Ideal, mode: str, budget: JetBudget | None = None, selector=None):
    if mode in ("weighted", "classical-order"):
        return weighted_center_at_origin(I, budget, selector)
    return log_weighted_center_at_origin(I, budget, selector)


def invariant_at_origin(I: Ideal, log: bool, budget: JetBudget | None = None) -> Invariant:
    """Invariant, with the unit ideal mapped to (0) and the zero ideal to ()."""
    if I.is_zero():
        return Invariant()
    if I.is_unit_at_origin():
        return Invariant.unit()
    return _compute_center(I, budget, log, None)[0]
