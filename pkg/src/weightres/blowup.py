"""Chart-level weighted, log-weighted and monomial (Kummer) blowups.

Every center is turned into a Newton polyhedron over the coordinates it
involves; charts are the simplicial cones of its normal fan.  A chart with
rays r_1..r_k substitutes x_l = prod_k y_k^(r_k[l]); its stabilizer order is
|det(r)|.  Coordinate rays keep the variable's name when they carry no
exceptional weight or the variable is monomial; all other rays become new
exceptional-monomial variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebra import (
    CoordinateChange,
    Ideal,
    Polynomial,
    Role,
    SubstitutionMap,
    VariableContext,
    exact_divide_by_monomial,
    format_monomial,
    substitute,
)
from .centers import QRegularCenter
from .diffcalc import monomial_hull
from .errors import AdmissibilityError, DivisibilityError, WeightresError
from .lp import cone_extreme_rays, det, newton_vertices, nullspace, rank
from .monomial import MonomialIdeal


@dataclass(frozen=True)
class ChartModel:
    """One chart of a blowup.

    ``exceptional`` pairs each child variable cutting out an exceptional
    divisor with the exponent to which the center pulls back along it.
    """

    parent: VariableContext
    child: VariableContext
    substitution: SubstitutionMap
    change: CoordinateChange
    exceptional: tuple[tuple[str, int], ...]
    stabilizer: int
    label: str
    rays: tuple[tuple[int, ...], ...] = ()
    coords: tuple[int, ...] = ()

    @property
    def a(self) -> int:
        """Exponent of the main (last created) exceptional variable."""
        return self.exceptional[-1][1] if self.exceptional else 0

    def exceptional_monomial(self) -> tuple[int, ...]:
        e = [0] * self.child.arity
        for name, c in self.exceptional:
            e[self.child.index(name)] += c
        return tuple(e)

    def pullback(self, f: Polynomial) -> Polynomial:
        if f.ctx != self.parent:
            f = f.embed(self.parent)
        return substitute(self.change.apply(f), self.substitution)

    def fiber_variables(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(free, fixed) child indices over the center's origin.

        Exceptional variables and untouched parent variables are fixed at 0;
        the remaining chart coordinates move along the exceptional divisor.
        """
        touched = {self.parent.names[i] for i in self.coords}
        exc = {n for n, _ in self.exceptional}
        free, fixed = [], []
        for i, n in enumerate(self.child.names):
            if n in exc or n not in touched and n in self.parent.names:
                fixed.append(i)
            else:
                free.append(i)
        return tuple(free), tuple(fixed)

    def describe(self) -> str:
        imgs = ", ".join(
            f"{n}={self.substitution.images[i]}"
            for i, n in enumerate(self.parent.names)
            if str(self.substitution.images[i]) != n
        )
        return f"{self.label}: {imgs or 'identity'} (stabilizer {self.stabilizer})"


@dataclass(frozen=True)
class BlowupRecord:
    center: QRegularCenter
    charts: tuple[ChartModel, ...]
    mode: str


def _pivot_columns(rows: Sequence[Sequence[int]]) -> list[int]:
    cols: list[int] = []
    dim = len(rows[0])
    for c in range(dim):
        trial = cols + [c]
        if rank([[r[k] for k in trial] for r in rows]) == len(trial):
            cols = trial
    return cols


def _facets(rays: Sequence[tuple[int, ...]]) -> list[tuple[tuple[int, ...], ...]]:
    cols = _pivot_columns(rays)
    proj = [tuple(Fraction(r[c]) for c in cols) for r in rays]
    k = len(cols)
    seen, out = set(), []
    for sub in combinations(range(len(rays)), k - 1):
        if rank([proj[i] for i in sub]) != k - 1:
            continue
        ns = nullspace([proj[i] for i in sub], k)
        if len(ns) != 1:
            continue
        n = ns[0]
        vals = [sum(a * b for a, b in zip(n, p)) for p in proj]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            facet = tuple(rays[i] for i, v in enumerate(vals) if v == 0)
            key = frozenset(facet)
            if key not in seen:
                seen.add(key)
                out.append(facet)
    return out


def triangulate_cone(rays: Sequence[tuple[int, ...]]) -> list[tuple[tuple[int, ...], ...]]:
    """Pulling triangulation of a pointed cone into simplicial cones (same rays)."""
    rays = list(rays)
    k = rank(rays)
    if len(rays) == k:
        return [tuple(rays)]
    apex = rays[0]
    out = []
    for facet in _facets(rays):
        if apex in facet:
            continue
        for simplex in triangulate_cone(facet):
            out.append((apex,) + simplex)
    return out


def _chart_from_cone(center: QRegularCenter, coords, pts, rays, label) -> ChartModel:
    parent = center.ctx
    dim = len(coords)
    scaled = []
    for r in rays:
        c = min(sum(Fraction(a) * b for a, b in zip(r, p)) for p in pts)
        m = c.denominator
        scaled.append((tuple(m * x for x in r), int(c * m), m))
    unit_rays = {}
    for k in range(dim):
        e = [0] * dim
        e[k] = 1
        unit_rays[tuple(e)] = k
    names, roles, roots = [], [], []
    ray_var: list[str | None] = [None] * len(scaled)
    coord_set = set(coords)
    for i, n in enumerate(parent.names):
        if i not in coord_set:
            names.append(n)
            roles.append(parent.roles[i])
            roots.append(parent.root_denominators[i])
            continue
        k = coords.index(i)
        for j, (r, c, m) in enumerate(scaled):
            prim = tuple(x // m for x in r)
            # a regular coordinate ray on which the center is positive becomes exceptional;
            # a monomial coordinate already cuts a boundary divisor and keeps its name
            if unit_rays.get(prim) == k and (c == 0 or parent.roles[i].is_monomial):
                ray_var[j] = n
                names.append(n)
                roles.append(parent.roles[i])
                roots.append(parent.root_denominators[i] * m)
    taken = set(names) | set(parent.names)
    for j in range(len(scaled)):
        if ray_var[j] is None:
            k = 0
            while f"e{k}" in taken:
                k += 1
            ray_var[j] = f"e{k}"
            taken.add(ray_var[j])
            names.append(ray_var[j])
            roles.append(Role.EXCEPTIONAL)
            roots.append(1)
    stab = abs(int(det([r for r, _, _ in scaled])))
    child = VariableContext(tuple(names), tuple(roles), tuple(roots), stab)
    ys = {n: Polynomial.var(child, n) for n in child.names}
    images = []
    for i, n in enumerate(parent.names):
        if i not in coord_set:
            images.append(ys[n])
            continue
        k = coords.index(i)
        e = [0] * child.arity
        for j, (r, _, _) in enumerate(scaled):
            if r[k]:
                e[child.index(ray_var[j])] += r[k]
        images.append(Polynomial.monomial(child, e))
    smap = SubstitutionMap(parent, child, tuple(images))
    exc = tuple((ray_var[j], c) for j, (_, c, _) in enumerate(scaled) if c)
    exc = tuple(sorted(exc, key=lambda nc: child.index(nc[0])))
    return ChartModel(parent, child, smap, center.change, exc, stab, label, tuple(r for r, _, _ in scaled), tuple(coords))


def blowup_charts(center: QRegularCenter, mode: str = "weighted") -> BlowupRecord:
    coords, pts = center.newton_points()
    if not coords:
        raise WeightresError("center involves no coordinates")
    dim = len(coords)
    labels = [p.name for p in center.parameters]
    if center.has_monomial_part:
        mono = coords[len(center.parameters):]
        for g in center.monomial_part.gens:
            sub = [0] * center.ctx.arity
            for i in mono:
                sub[i] = g[i]
            text = str(MonomialIdeal(center.ctx, center.monomial_part.denominator, (tuple(sub),)))
            labels.append("N" + text)
    charts = []
    for v in newton_vertices(pts):
        ineqs = [tuple(a - b for a, b in zip(p, pts[v])) for p in pts if p != pts[v]]
        for k in range(dim):
            e = [0] * dim
            e[k] = 1
            ineqs.append(tuple(e))
        rays = cone_extreme_rays(ineqs, dim)
        cones = triangulate_cone(rays)
        for ci, cone in enumerate(cones):
            label = labels[v] if len(cones) == 1 else f"{labels[v]}#{ci}"
            charts.append(_chart_from_cone(center, coords, pts, cone, label))
    return BlowupRecord(center, tuple(charts), mode)


def weighted_blowup_charts(center: QRegularCenter) -> BlowupRecord:
    """Charts of the weighted (log-weighted when a monomial part is present) blowup.

    >>> from .centers import weighted_center_at_origin
    >>> ctx = VariableContext.make("xyzt")
    >>> x, y, z, t = Polynomial.gens(ctx)
    >>> _, c = weighted_center_at_origin(Ideal(ctx, [x**2 - y*z*t]))
    >>> ch = weighted_blowup_charts(c).charts[0]
    >>> [str(g) for g in ch.substitution.images], ch.stabilizer, ch.a
    (['e0^3', 'y*e0^2', 'z*e0^2', 't*e0^2'], 3, 6)
    """
    return blowup_charts(center, "log-weighted" if center.has_monomial_part else "weighted")


def controlled_transform(I: Ideal, ch: ChartModel) -> Ideal:
    """Pull back and divide by the center's pullback (the exceptional monomial); (1) stays (1)."""
    m = ch.exceptional_monomial()
    if any(g.is_constant() and g for g in I.gens):
        return Ideal(ch.child, [Polynomial.const(ch.child, 1)])
    gens = []
    for g in I.gens:
        p = ch.pullback(g)
        try:
            gens.append(exact_divide_by_monomial(p, m))
        except DivisibilityError as err:
            raise AdmissibilityError(f"not admissible on chart {ch.label}: {err}", err.term) from None
    return Ideal(ch.child, gens, _trunc(I, ch))


def _trunc(I: Ideal, ch: ChartModel):
    t = ch.change.truncation
    if I.truncation is not None:
        t = I.truncation if t is None else min(t, I.truncation)
    return t


def strict_transform(I: Ideal, ch: ChartModel) -> Ideal:
    """Pull back and strip the largest exceptional power from each generator."""
    exc = [ch.child.index(n) for n, _ in ch.exceptional]
    gens = []
    for g in I.gens:
        p = ch.pullback(g)
        gens.append(exact_divide_by_monomial(p, p.max_monomial_divisor(exc)))
    return Ideal(ch.child, gens, _trunc(I, ch))


def pullback_monomial(N: MonomialIdeal, ch: ChartModel) -> MonomialIdeal:
    """Pull a (rational-exponent) monomial ideal back along the chart's monomial map."""
    child = ch.child
    gens = []
    for g in N.gens:
        e = [0] * child.arity
        for i, k in enumerate(g):
            if not k:
                continue
            img = ch.substitution.images[i]
            if len(img.terms) != 1:
                raise WeightresError("monomial variable maps to a non-monomial")
            (mono,) = img.terms
            for j, v in enumerate(mono):
                e[j] += k * v
        gens.append(tuple(e))
    return MonomialIdeal(child, N.denominator, tuple(gens), mixed=True).normalized()


def d_transform_with_monomial_tracking(I_clean: Ideal, N: MonomialIdeal, ch: ChartModel, l: int, d: int):
    """Clean part by the controlled transform, N' = N * E^(l-d) with E^l the center's pullback.

    The exceptional factor is read off the chart, so on a chart where the
    l-center pulls back to s^c the monomial part gains s^(c (l-d) / l).
    """
    if not (l >= d >= 1):
        raise ValueError("need l >= d >= 1")
    clean = controlled_transform(I_clean, ch)
    Np = pullback_monomial(N, ch)
    factor = Fraction(l - d, l)
    den = Np.denominator * factor.denominator
    gens = []
    exc = ch.exceptional_monomial()
    for g in Np.gens:
        gens.append(tuple(x * factor.denominator + factor.numerator * Np.denominator * c for x, c in zip(g, exc)))
    return clean, MonomialIdeal(ch.child, den, tuple(gens), mixed=True).normalized()


def monomial_center(ctx: VariableContext, N: MonomialIdeal) -> QRegularCenter:
    return QRegularCenter(ctx, (), N, None, True)


def monomial_hull_blowup(I: Ideal) -> BlowupRecord:
    """Normalized blowup of the monomial hull; transforms then have finite log order.

    >>> ctx = VariableContext.make("t", "u")
    >>> t, u = Polynomial.gens(ctx)
    >>> I = Ideal(ctx, [u * t**2 + u**2])
    >>> rec = monomial_hull_blowup(I)
    >>> str(controlled_transform(I, rec.charts[0]))
    '(t^2 + u)'
    """
    N = monomial_hull(I)
    if N.is_unit() or N.is_zero():
        raise WeightresError("monomial hull is trivial")
    return blowup_charts(monomial_center(I.ctx, N), "kummer-monomial")


def chart_label(ch: ChartModel) -> str:
    return ch.label


def describe_exceptional(ch: ChartModel) -> str:
    return format_monomial(ch.child.names, ch.exceptional_monomial())
