"""Monomial ideals with exponents on a common denominator."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import gcd, lcm
from typing import Iterable, Sequence

from .algebra import Ideal, Polynomial, VariableContext, format_monomial
from .errors import ParameterError
from .lp import newton_contains


def minimal_elements(vectors: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Antichain of coordinatewise-minimal vectors, sorted."""
    vs = sorted(set(tuple(v) for v in vectors), key=lambda v: (sum(v), v))
    out: list[tuple[int, ...]] = []
    for v in vs:
        if not any(all(a <= b for a, b in zip(w, v)) for w in out):
            out.append(v)
    return tuple(sorted(out, key=lambda v: tuple(-x for x in v)))


@dataclass(frozen=True)
class NewtonRegion:
    """conv(points) + nonnegative orthant."""

    points: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, points: Iterable[Sequence]) -> "NewtonRegion":
        return cls(tuple(tuple(Fraction(v) for v in p) for p in points))

    def contains(self, m: Sequence) -> bool:
        return newton_membership(m, self)


def newton_membership(m: Sequence, region: NewtonRegion) -> bool:
    """Exact test of m in conv(points) + orthant.

    >>> newton_membership((1, 1), NewtonRegion.of([(2, 0), (0, 2)]))
    True
    >>> newton_membership((0, 1), NewtonRegion.of([(2, 0), (0, 2)]))
    False
    """
    if region.points and len(m) != len(region.points[0]):
        raise ValueError("dimension mismatch")
    return newton_contains(region.points, m)


@dataclass(frozen=True)
class MonomialIdeal:
    """Ideal generated by monomials x^(e/denominator).

    An empty generator set is the zero ideal; the zero vector alone is the unit ideal.
    """

    ctx: VariableContext
    denominator: int
    gens: tuple[tuple[int, ...], ...]
    mixed: bool = False

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        for g in self.gens:
            if len(g) != self.ctx.arity or min(g, default=0) < 0:
                raise ValueError(f"bad exponent {g}")
            if not self.mixed and any(g[i] for i in self.ctx.regular_indices()):
                raise ValueError("regular-variable exponent in a pure monomial ideal")
        object.__setattr__(self, "gens", minimal_elements(self.gens))

    @classmethod
    def make(cls, ctx: VariableContext, gens: Iterable[Sequence[int]], denominator: int = 1, mixed: bool = False):
        return cls(ctx, denominator, tuple(tuple(int(v) for v in g) for g in gens), mixed)

    @classmethod
    def unit(cls, ctx: VariableContext) -> "MonomialIdeal":
        return cls(ctx, 1, ((0,) * ctx.arity,))

    def is_unit(self) -> bool:
        return any(not any(g) for g in self.gens)

    def is_zero(self) -> bool:
        return not self.gens

    def rational_gens(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(v, self.denominator) for v in g) for g in self.gens]

    def newton_region(self) -> NewtonRegion:
        return NewtonRegion(tuple(self.rational_gens()))

    def normalized(self) -> "MonomialIdeal":
        """Smallest denominator representing the same exponents."""
        g = self.denominator
        for v in self.gens:
            for x in v:
                g = gcd(g, x)
        if g <= 1:
            return self
        return MonomialIdeal(self.ctx, self.denominator // g, tuple(tuple(x // g for x in v) for v in self.gens), self.mixed)

    def lifted(self, denominator: int) -> "MonomialIdeal":
        if denominator % self.denominator:
            raise ValueError("can only lift to a multiple of the denominator")
        k = denominator // self.denominator
        return MonomialIdeal(self.ctx, denominator, tuple(tuple(x * k for x in v) for v in self.gens), self.mixed)

    def contains_monomial(self, m: Sequence) -> bool:
        """Membership of x^m (rational m) in the ideal itself (not its closure)."""
        mm = [Fraction(v) for v in m]
        return any(all(Fraction(a, self.denominator) <= b for a, b in zip(g, mm)) for g in self.gens)

    def __mul__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        den = lcm(self.denominator, other.denominator)
        a, b = self.lifted(den), other.lifted(den)
        gens = [tuple(x + y for x, y in zip(u, v)) for u in a.gens for v in b.gens]
        return MonomialIdeal(self.ctx, den, tuple(gens), self.mixed or other.mixed)

    def power(self, k: int) -> "MonomialIdeal":
        if k == 0:
            return MonomialIdeal.unit(self.ctx)
        gens = []
        for combo in combinations_with_replacement(self.gens, k):
            gens.append(tuple(map(sum, zip(*combo))))
        return MonomialIdeal(self.ctx, self.denominator, tuple(gens), self.mixed)

    def scaled(self, factor: Fraction) -> "MonomialIdeal":
        """Exponents multiplied by a positive rational (a formal power)."""
        factor = Fraction(factor)
        den = self.denominator * factor.denominator
        gens = tuple(tuple(x * factor.numerator for x in v) for v in self.gens)
        return MonomialIdeal(self.ctx, den, gens, self.mixed).normalized()

    def polynomials(self) -> list[Polynomial]:
        if self.denominator != 1:
            raise ValueError("fractional exponents have no polynomial generators")
        return [Polynomial.monomial(self.ctx, g) for g in self.gens]

    def degree(self) -> Fraction:
        """Smallest total degree of a generator."""
        return min((Fraction(sum(g), self.denominator) for g in self.gens), default=Fraction(0))

    def __str__(self):
        if not self.gens:
            return "(0)"
        parts = []
        for g in self.gens:
            if self.denominator == 1:
                parts.append(format_monomial(self.ctx.names, g) or "1")
            else:
                bits = []
                for n, k in zip(self.ctx.names, g):
                    if k:
                        f = Fraction(k, self.denominator)
                        bits.append(f"{n}^{f}" if f.denominator == 1 else f"{n}^({f})")
                parts.append("*".join(bits) or "1")
        return "(" + ", ".join(parts) + ")"


def monomial_integral_closure(M: MonomialIdeal) -> MonomialIdeal:
    """Lattice points of the Newton region, as minimal generators.

    Minimal generators lie below the coordinatewise max of the input
    generators: clipping a point of the region to that box stays inside.

    >>> ctx = VariableContext.make((), "uv")
    >>> str(monomial_integral_closure(MonomialIdeal.make(ctx, [(2, 0), (0, 2)])))
    '(u^2, u*v, v^2)'
    """
    if M.mixed:
        raise ValueError("closure is defined for pure monomial ideals")
    if M.is_zero() or M.is_unit():
        return M
    top = [max(g[i] for g in M.gens) for i in range(M.ctx.arity)]
    region = M.newton_region()
    pts = region.points
    found = []
    for cand in product(*(range(t + 1) for t in top)):
        if any(all(a <= b for a, b in zip(f, cand)) for f in found):
            continue
        m = tuple(Fraction(v, M.denominator) for v in cand)
        if newton_contains(pts, m):
            found.append(cand)
    return MonomialIdeal(M.ctx, M.denominator, tuple(found), M.mixed)


def saturated_power(params: Sequence[Polynomial], N: MonomialIdeal, d: int) -> Ideal:
    """Generators of sum_i (params)^i * closure(N^(d-i))."""
    if not params and N.is_zero():
        raise ParameterError("nothing to saturate")
    ctx = N.ctx
    for t in params:
        if t.order() != 1:
            raise ParameterError(f"{t} is not a regular parameter")
    if N.denominator != 1:
        raise ValueError("saturated powers need integral exponents")
    gens: list[Polynomial] = []
    ideal_params = Ideal(ctx, params) if params else None
    for i in range(d + 1):
        if i and ideal_params is None:
            break
        left = ideal_params.power_generators(i) if i else [Polynomial.const(ctx, 1)]
        right = monomial_integral_closure(N.power(d - i)).polynomials()
        for a in left:
            for b in right:
                gens.append(a * b)
    return Ideal(ctx, gens)


def kummer_root(M: MonomialIdeal, d: int) -> MonomialIdeal:
    """d-th root: same exponents over denominator N*d, then reduced.

    >>> ctx = VariableContext.make((), "u")
    >>> kummer_root(MonomialIdeal.make(ctx, [(2,)]), 2).gens
    ((1,),)
    """
    if d < 1:
        raise ValueError("root degree must be positive")
    return MonomialIdeal(M.ctx, M.denominator * d, M.gens, M.mixed).normalized()
