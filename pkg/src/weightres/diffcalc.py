"""Derivative ideals, (log) orders, monomial hulls, maximal contact, coefficient ideals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Callable, Sequence

from .algebra import (
    Ideal,
    JetBudget,
    ParameterElimination,
    Polynomial,
    VariableContext,
    eliminate_parameter,
    linear_basis,
)
from .errors import ContactError
from .monomial import MonomialIdeal

INF = math.inf


@dataclass(frozen=True)
class DerivationBasis:
    """d/dx for regular variables; u d/du for monomial ones in log mode.

    In classical mode every variable gets a plain partial derivative.
    """

    ctx: VariableContext
    log: bool = False

    @classmethod
    def classical(cls, ctx: VariableContext) -> "DerivationBasis":
        return cls(ctx, False)

    @classmethod
    def logarithmic(cls, ctx: VariableContext) -> "DerivationBasis":
        return cls(ctx, True)

    def apply_all(self, f: Polynomial) -> list[Polynomial]:
        out = []
        for i in range(self.ctx.arity):
            if self.log and self.ctx.is_monomial(i):
                out.append(f.log_derivative(i))
            else:
                out.append(f.derivative(i))
        return out

    def regular_indices(self) -> tuple[int, ...]:
        return self.ctx.regular_indices() if self.log else tuple(range(self.ctx.arity))

    def monomial_indices(self) -> tuple[int, ...]:
        return self.ctx.monomial_indices() if self.log else ()

    def term_key(self):
        mono = self.monomial_indices()

        def key(e):
            return (any(e[i] for i in mono), sum(e), tuple(-v for v in e))

        return key


def _basis_for(I: Ideal, basis: DerivationBasis | None, log: bool | None = None) -> DerivationBasis:
    if basis is not None:
        return basis
    return DerivationBasis(I.ctx, bool(log))


def derivative_ideal(I: Ideal, basis: DerivationBasis, level: int) -> Ideal:
    """D^{<=level}(I), returned as a reduced echelon basis of the Q-span.

    The span of I's generators and all iterated derivatives is an ideal
    generating set; a basis of that span generates the same ideal.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    if level == 0:
        return I
    key = ("D", basis.log, level)
    hit = I._cache.get(key)
    if hit is not None:
        return hit
    if I.gens and all(len(g.terms) == 1 for g in I.gens):
        out = _monomial_derivative_ideal(I, basis, level)
        I._cache[key] = out
        return out
    prev = derivative_ideal(I, basis, level - 1)
    polys = list(prev.gens)
    for g in prev.gens:
        polys.extend(basis.apply_all(g))
    trunc = None
    if prev.truncation is not None:
        # a derivative of an unknown tail of degree > T can reach degree T
        trunc = prev.truncation - 1
        polys = [p.truncate(trunc) for p in polys]
    else:
        polys = reduce_by_monomials([p for p in polys if p])
    gens = linear_basis(polys, basis.term_key())
    out = Ideal(I.ctx, gens, trunc)
    I._cache[key] = out
    return out


def _lowerings(e: tuple, idx: Sequence[int], a: int):
    """Exponents below e, lowered by exactly a in total along idx."""
    if not idx:
        yield e
        return
    i, rest = idx[0], idx[1:]
    room = sum(e[j] for j in rest)
    for k in range(max(0, a - room), min(a, e[i]) + 1):
        f = list(e)
        f[i] -= k
        yield from _lowerings(tuple(f), rest, a - k)


def _monomial_derivative_ideal(I: Ideal, basis: DerivationBasis, level: int) -> Ideal:
    """Derivatives of a monomial ideal: lower each generator along the differentiable variables."""
    regs = tuple(basis.regular_indices())
    exps = set()
    for g in I.gens:
        (e,) = g.terms
        a = min(level, sum(e[i] for i in regs))
        exps.update(_lowerings(e, regs, a))
    trunc = None if I.truncation is None else I.truncation - level
    minimal = [e for e in exps if not any(f != e and all(x <= y for x, y in zip(f, e)) for f in exps)]
    if trunc is not None:
        minimal = [e for e in minimal if sum(e) <= trunc]
    key = basis.term_key()
    return Ideal(I.ctx, [Polynomial.monomial(I.ctx, e) for e in sorted(minimal, key=key)], trunc)


def _divides(m: tuple, e: tuple) -> bool:
    return all(a <= b for a, b in zip(m, e))


def reduce_by_monomials(polys: list[Polynomial]) -> list[Polynomial]:
    """Drop every term divisible by a single-term element; the generated ideal is unchanged.

    Only valid for exact generators: a monomial jet would carry an unknown tail.
    """
    mons = {next(iter(p.terms)) for p in polys if len(p.terms) == 1}
    if not mons:
        return polys
    while True:
        mins = [m for m in mons if not any(n != m and _divides(n, m) for n in mons)]
        out = [Polynomial.monomial(polys[0].ctx, m) for m in sorted(mins)]
        new = set()
        rest = []
        for p in polys:
            if len(p.terms) == 1:
                continue
            terms = {e: c for e, c in p.terms.items() if not any(_divides(m, e) for m in mins)}
            if len(terms) == 1:
                new.add(next(iter(terms)))
            elif terms:
                rest.append(Polynomial(p.ctx, terms, _trusted=True))
        if not new - set(mins):
            return out + rest
        mons = set(mins) | new
        polys = out + rest


def strip_units(I: Ideal) -> Ideal:
    """Replace each generator m*u (m monomial, u(0) != 0) by m; same ideal at the origin."""
    gens = []
    changed = False
    for g in I.gens:
        m = g.max_monomial_divisor(range(I.ctx.arity))
        if len(g.terms) > 1 and g.terms.get(m):
            gens.append(Polynomial.monomial(I.ctx, m))
            changed = True
        else:
            gens.append(g)
    if not changed:
        return I
    uniq = list(dict.fromkeys(gens))
    return Ideal(I.ctx, uniq, I.truncation)


def order_at_origin(I: Ideal):
    return min((g.order() for g in I.gens), default=INF)


def log_order_at_origin(I: Ideal):
    mono = I.ctx.monomial_indices()
    return min((g.set_zero(mono).order() for g in I.gens), default=INF)


def order_for(I: Ideal, log: bool):
    return log_order_at_origin(I) if log else order_at_origin(I)


def monomial_hull(I: Ideal) -> MonomialIdeal:
    """Monomial ideal of the monomial-variable parts of all terms.

    >>> ctx = VariableContext.make("t", "u")
    >>> t, u = Polynomial.gens(ctx)
    >>> str(monomial_hull(Ideal(ctx, [u * t**2 + u**2])))
    '(u)'
    """
    ctx = I.ctx
    mono = set(ctx.monomial_indices())
    parts = set()
    for g in I.gens:
        for e in g.terms:
            parts.add(tuple(v if i in mono else 0 for i, v in enumerate(e)))
    return MonomialIdeal(ctx, 1, tuple(parts))


ContactSelector = Callable[[list[Polynomial]], Polynomial]


def contact_candidates(I: Ideal, d: int, basis: DerivationBasis) -> list[Polynomial]:
    """Order-one elements of the computed basis of D^{<=d-1}(I), normalized.

    In log mode each candidate drops its terms that involve only monomial
    variables: with p the exponents of those terms, (t, u^p) = (t + f u^p, u^p),
    so the stripped parameter cuts the same centers.
    """
    D = derivative_ideal(I, basis, d - 1)
    regs = basis.regular_indices()
    mono = set(basis.monomial_indices())
    out = []
    for g in D.gens:
        if basis.log:
            g = Polynomial(
                g.ctx,
                {e: c for e, c in g.terms.items() if not (any(e[i] for i in mono) and not any(e[i] for i in regs))},
            )
        if g.constant_term() or not any(g.linear_coefficient(i) for i in regs):
            continue
        piv = next(i for i in regs if g.linear_coefficient(i))
        out.append(g * (1 / g.linear_coefficient(piv)))
    return sorted(out, key=lambda g: _contact_key(g, regs))


def _exactly_eliminable(g: Polynomial, regs: Sequence[int]) -> bool:
    """t = a*x + b with a(0) != 0, or t = x * unit: no series needed."""
    for i in regs:
        if g.linear_coefficient(i) and g.degree_in(i) == 1:
            return True
    m = g.max_monomial_divisor(regs)
    return sum(m) == 1 and bool(g.terms.get(m))


def _contact_key(g: Polynomial, regs: Sequence[int]):
    piv = next(i for i in regs if g.linear_coefficient(i))
    linear_in_pivot = g.degree_in(piv) == 1
    return (not _exactly_eliminable(g, regs), piv, not linear_in_pivot, len(g.terms), str(g))


def maximal_contact(I: Ideal, d: int, basis: DerivationBasis, selector: ContactSelector | None = None) -> Polynomial:
    """Order-one element of D^{<=d-1}(I); exact eliminations first, then the smallest pivot.

    >>> ctx = VariableContext.make("xyz")
    >>> x, y, z = Polynomial.gens(ctx)
    >>> str(maximal_contact(Ideal(ctx, [x**2 - y**2 * z]), 2, DerivationBasis.classical(ctx)))
    'x'
    """
    if d == INF or d < 1:
        raise ContactError(f"maximal contact needs a finite positive order, got {d}")
    cands = contact_candidates(I, d, basis)
    if not cands:
        raise ContactError(f"no order-one element in D^<={d - 1} of {I}")
    return selector(cands) if selector else cands[0]


def _minimal_tuples(weights: Sequence[int]) -> list[tuple[int, ...]]:
    L = prod(weights)
    ranges = [range(0, -(-L // w) + 1) for w in weights]
    out = []
    for a in product(*ranges):
        if not any(a) or sum(x * w for x, w in zip(a, weights)) < L:
            continue
        minimal = True
        for i, x in enumerate(a):
            if x and sum(y * w for y, w in zip(a, weights)) - weights[i] >= L:
                minimal = False
                break
        if minimal:
            out.append(a)
    return out


def homogenized_sum(ideals: Sequence[tuple[Ideal, int]]) -> Ideal:
    """Ideal generated by prod I_i^{a_i} over minimal a != 0 with sum a_i l_i >= prod l_i."""
    if not ideals:
        raise ValueError("empty sum")
    ctx = ideals[0][0].ctx
    weights = [l for _, l in ideals]
    if min(weights) < 1:
        raise ValueError("weights must be positive")
    gens: list[Polynomial] = []
    power_cache: dict = {}
    for a in _minimal_tuples(weights):
        factors = []
        for (J, _), k in zip(ideals, a):
            if k:
                if (id(J), k) not in power_cache:
                    power_cache[(id(J), k)] = [g for g in J.power_generators(k) if g]
                factors.append(power_cache[(id(J), k)])
        for combo in product(*factors):
            p = Polynomial.const(ctx, 1)
            for f in combo:
                p = p * f
            if p:
                gens.append(p)
    trunc = [J.truncation for J, _ in ideals if J.truncation is not None]
    return Ideal(ctx, gens, min(trunc) if trunc else None)


def coefficient_ideal(I: Ideal, d: int, basis: DerivationBasis) -> Ideal:
    """Homogenized sum of (D^{<=a} I, d - a) for a = 0..d-1."""
    return homogenized_sum([(derivative_ideal(I, basis, a), d - a) for a in range(d)])


def restrict_with(I: Ideal, elim: ParameterElimination) -> Ideal:
    """Rewrite in coordinates where elim.var is the parameter, then set it to 0 and drop it."""
    ctx = I.ctx
    j = elim.var
    sub = ctx.without(j)
    gens = [elim.apply(g).set_zero([j]).drop_variable(j, sub) for g in I.gens]
    trunc = elim.truncation
    if I.truncation is not None:
        trunc = I.truncation if trunc is None else min(trunc, I.truncation)
    if trunc is not None:
        gens = [g.truncate(trunc) for g in gens]
    return Ideal(sub, gens, trunc)


def restrict_to_contact(I: Ideal, t: Polynomial, budget: JetBudget | None = None, log: bool = False) -> Ideal:
    """Restriction of I to V(t), in the remaining variables.

    >>> ctx = VariableContext.make("xy")
    >>> x, y = Polynomial.gens(ctx)
    >>> str(restrict_to_contact(Ideal(ctx, [x, y]), x))
    '(y)'
    """
    regs = I.ctx.regular_indices() if log else range(I.ctx.arity)
    return restrict_with(I, eliminate_parameter(t, budget, regular=regs))
