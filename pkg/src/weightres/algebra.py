"""Exact sparse polynomials over role-tagged variable contexts."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import kernels
from .errors import BudgetError, ContextError, DivisibilityError, ParameterError

Exponent = tuple[int, ...]


class Role(enum.Enum):
    REGULAR = "regular"
    MONOMIAL = "monomial"
    EXCEPTIONAL = "exceptional-monomial"

    @property
    def is_monomial(self) -> bool:
        return self is not Role.REGULAR


@dataclass(frozen=True)
class VariableContext:
    """Ordered variable names with a role per variable.

    ``stabilizer`` records the order of the cyclic group acting on the chart
    this context models (1 for ordinary affine charts).
    """

    names: tuple[str, ...]
    roles: tuple[Role, ...]
    root_denominators: tuple[int, ...] = ()
    stabilizer: int = 1

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ContextError(f"duplicate variable names in {self.names}")
        if len(self.roles) != len(self.names):
            raise ContextError("one role per variable required")
        if not self.root_denominators:
            object.__setattr__(self, "root_denominators", (1,) * len(self.names))
        if len(self.root_denominators) != len(self.names):
            raise ContextError("one root denominator per variable required")

    @classmethod
    def make(cls, regular: Iterable[str] = (), monomial: Iterable[str] = ()) -> "VariableContext":
        regular, monomial = tuple(regular), tuple(monomial)
        roles = (Role.REGULAR,) * len(regular) + (Role.MONOMIAL,) * len(monomial)
        return cls(regular + monomial, roles)

    @property
    def arity(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ContextError(f"unknown variable {name!r}") from None

    def is_monomial(self, i: int) -> bool:
        return self.roles[i].is_monomial

    def regular_indices(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if not r.is_monomial)

    def monomial_indices(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r.is_monomial)

    def without(self, i: int) -> "VariableContext":
        keep = [k for k in range(self.arity) if k != i]
        return VariableContext(
            tuple(self.names[k] for k in keep),
            tuple(self.roles[k] for k in keep),
            tuple(self.root_denominators[k] for k in keep),
            self.stabilizer,
        )

    def with_role(self, i: int, role: Role) -> "VariableContext":
        roles = list(self.roles)
        roles[i] = role
        return VariableContext(self.names, tuple(roles), self.root_denominators, self.stabilizer)

    def extended(self, name: str, role: Role = Role.REGULAR) -> "VariableContext":
        return VariableContext(
            self.names + (name,), self.roles + (role,), self.root_denominators + (1,), self.stabilizer
        )

    def fresh_name(self, base: str) -> str:
        k = 0
        while f"{base}{k}" in self.names:
            k += 1
        return f"{base}{k}"


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients.

    >>> ctx = VariableContext.make("xy")
    >>> x, y = Polynomial.gens(ctx)
    >>> str((x + 1) * (x - 1))
    'x^2 - 1'
    """

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VariableContext, terms: Mapping[Exponent, object] | None = None, *, _trusted=False):
        self.ctx = ctx
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for e, c in (terms or {}).items():
                e = tuple(int(v) for v in e)
                if len(e) != ctx.arity or min(e, default=0) < 0:
                    raise ContextError(f"bad exponent {e} for context {ctx.names}")
                c = _frac(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
            self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    # constructors
    @classmethod
    def const(cls, ctx: VariableContext, c=1) -> "Polynomial":
        return cls(ctx, {(0,) * ctx.arity: c})

    @classmethod
    def zero(cls, ctx: VariableContext) -> "Polynomial":
        return cls(ctx, {}, _trusted=True)

    @classmethod
    def var(cls, ctx: VariableContext, name_or_index) -> "Polynomial":
        i = name_or_index if isinstance(name_or_index, int) else ctx.index(name_or_index)
        e = [0] * ctx.arity
        e[i] = 1
        return cls(ctx, {tuple(e): Fraction(1)}, _trusted=True)

    @classmethod
    def monomial(cls, ctx: VariableContext, exp: Sequence[int], c=1) -> "Polynomial":
        return cls(ctx, {tuple(exp): c})

    @classmethod
    def gens(cls, ctx: VariableContext) -> tuple["Polynomial", ...]:
        return tuple(cls.var(ctx, i) for i in range(ctx.arity))

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextError("polynomials live in different contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ctx, kernels.poly_add(self.terms, other.terms, 1), _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ctx, kernels.poly_add(self.terms, other.terms, -1), _trusted=True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Polynomial(self.ctx, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial.zero(self.ctx)
            other = _frac(other)
            return Polynomial(self.ctx, {e: c * other for e, c in self.terms.items()}, _trusted=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ctx, kernels.poly_mul(self.terms, other.terms), _trusted=True)

    __rmul__ = __mul__

    def mul_trunc(self, other: "Polynomial", degree: int) -> "Polynomial":
        """Product modulo terms of total degree > ``degree``."""
        other = self._coerce(other)
        return Polynomial(self.ctx, kernels.poly_mul_trunc(self.terms, other.terms, degree), _trusted=True)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.const(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.const(self.ctx, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.names, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ctx.arity, Fraction(0))

    def order(self) -> float | int:
        """Minimal total degree of a term; infinity for zero."""
        if not self.terms:
            return float("inf")
        return kernels.min_degree(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def linear_coefficient(self, i: int) -> Fraction:
        e = [0] * self.ctx.arity
        e[i] = 1
        return self.terms.get(tuple(e), Fraction(0))

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in display order: graded, then lexicographic, descending."""
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-v for v in kv[0])))

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, v in enumerate(e) if v}

    # calculus
    def derivative(self, i: int) -> "Polynomial":
        return Polynomial(self.ctx, kernels.poly_deriv(self.terms, i), _trusted=True)

    def log_derivative(self, i: int) -> "Polynomial":
        return Polynomial(self.ctx, kernels.poly_logderiv(self.terms, i), _trusted=True)

    # restrictions and changes of context
    def set_zero(self, indices: Iterable[int]) -> "Polynomial":
        idx = tuple(indices)
        return Polynomial(self.ctx, {e: c for e, c in self.terms.items() if not any(e[i] for i in idx)}, _trusted=True)

    def drop_variable(self, i: int, ctx: VariableContext | None = None) -> "Polynomial":
        """Remove variable ``i`` (which must not occur) from the context."""
        ctx = ctx or self.ctx.without(i)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                raise ContextError(f"variable {self.ctx.names[i]} still occurs")
            out[e[:i] + e[i + 1:]] = c
        return Polynomial(ctx, out, _trusted=True)

    def embed(self, ctx: VariableContext) -> "Polynomial":
        """Move to a context containing every variable that occurs, matching by name."""
        pos = []
        for i, n in enumerate(self.ctx.names):
            pos.append(ctx.names.index(n) if n in ctx.names else None)
        out = {}
        for e, c in self.terms.items():
            f = [0] * ctx.arity
            for i, v in enumerate(e):
                if v:
                    if pos[i] is None:
                        raise ContextError(f"variable {self.ctx.names[i]} missing from target context")
                    f[pos[i]] = v
            out[tuple(f)] = c
        return Polynomial(ctx, out, _trusted=True)

    def truncate(self, degree: int) -> "Polynomial":
        return Polynomial(self.ctx, {e: c for e, c in self.terms.items() if sum(e) <= degree}, _trusted=True)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= _frac(x) ** k
            total += v
        return total

    def coefficients_in(self, i: int) -> list["Polynomial"]:
        """Split f = sum_k f_k x_i^k; returns [f_0, f_1, ...] with f_k free of x_i."""
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            f = e[:i] + (0,) + e[i + 1:]
            parts.setdefault(k, {})[f] = c
        top = max(parts, default=-1)
        return [Polynomial(self.ctx, parts.get(k, {}), _trusted=True) for k in range(top + 1)]

    def divide_by_monomial(self, m: Sequence[int], power: int = 1) -> "Polynomial":
        return exact_divide_by_monomial(self, m, power)

    def max_monomial_divisor(self, indices: Iterable[int]) -> Exponent:
        """Largest exponent (supported on ``indices``) dividing every term."""
        idx = set(indices)
        out = [0] * self.ctx.arity
        if not self.terms:
            return tuple(out)
        for i in idx:
            out[i] = min(e[i] for e in self.terms)
        return tuple(out)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(names: Sequence[str], e: Sequence[int]) -> str:
    parts = []
    for n, k in zip(names, e):
        if k == 1:
            parts.append(n)
        elif k:
            parts.append(f"{n}^{k}")
    return "*".join(parts)


def format_polynomial(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    out = []
    for e, c in f.sorted_terms():
        mono = format_monomial(f.ctx.names, e)
        mag = abs(c)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def exact_divide_by_monomial(f: Polynomial, m: Sequence[int], power: int = 1) -> Polynomial:
    """Divide every term of ``f`` by ``m**power``; raise on a non-divisible term."""
    shift = tuple(int(v) * power for v in m)
    out = kernels.shift_divide(f.terms, shift)
    if out is None:
        for e, c in f.sorted_terms():
            if any(a < b for a, b in zip(e, shift)):
                bad = Polynomial(f.ctx, {e: c})
                raise DivisibilityError(f"term {bad} not divisible by {format_monomial(f.ctx.names, shift)}", bad)
    return Polynomial(f.ctx, out, _trusted=True)


class Ideal:
    """Finite generator list in one context; the zero ideal keeps a single zero generator."""

    __slots__ = ("ctx", "gens", "_cache", "truncation")

    def __init__(self, ctx: VariableContext, gens: Iterable[Polynomial], truncation: int | None = None):
        self.ctx = ctx
        seen, out = set(), []
        for g in gens:
            if g.ctx != ctx:
                raise ContextError("generator outside the ideal's context")
            if g.is_zero() or g in seen:
                continue
            seen.add(g)
            out.append(g)
        self.gens: tuple[Polynomial, ...] = tuple(out) if out else (Polynomial.zero(ctx),)
        self._cache: dict = {}
        # degree bound when generators are only known modulo higher-order terms
        self.truncation = truncation

    def is_zero(self) -> bool:
        return self.gens[0].is_zero()

    def is_unit_at_origin(self) -> bool:
        return any(g.constant_term() for g in self.gens)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.ctx == other.ctx and self.gens == other.gens

    def __hash__(self):
        return hash((self.ctx, self.gens))

    def __iter__(self):
        return iter(self.gens)

    def __len__(self):
        return 0 if self.is_zero() else len(self.gens)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")"

    __repr__ = __str__

    def map(self, fn) -> "Ideal":
        gens = [fn(g) for g in self.gens]
        ctx = gens[0].ctx if gens else self.ctx
        return Ideal(ctx, gens, self.truncation)

    def embed(self, ctx: VariableContext) -> "Ideal":
        return Ideal(ctx, [g.embed(ctx) for g in self.gens], self.truncation)

    def power_generators(self, k: int) -> list[Polynomial]:
        """Generators of I^k as products of k generators (multisets)."""
        from itertools import combinations_with_replacement

        gens = [g for g in self.gens if g]
        out = []
        for combo in combinations_with_replacement(range(len(gens)), k):
            p = Polynomial.const(self.ctx, 1)
            for i in combo:
                p = p * gens[i]
            out.append(p)
        return out


def linear_basis(polys: Iterable[Polynomial], key=None) -> list[Polynomial]:
    """Reduced echelon basis of the Q-span of ``polys``.

    ``key`` orders monomials; the pivot of each basis element is its
    key-smallest monomial, normalized to coefficient 1.
    """
    polys = [p for p in polys if p]
    if not polys:
        return []
    if key is None:
        key = graded_key
    if len(polys) > 8:
        columns = sorted({e for p in polys for e in p.terms}, key=key)
        if len(polys) * len(columns) > 400:
            dense = kernels.rref([p.terms for p in polys], columns)
            if dense is not None:
                ctx = polys[0].ctx
                return [Polynomial(ctx, r, _trusted=True) for r in dense]
    rows: list[dict] = []
    pivots: list[Exponent] = []
    for p in polys:
        r = dict(p.terms)
        for piv, row in zip(pivots, rows):
            c = r.get(piv)
            if c:
                for e, v in row.items():
                    nv = r.get(e, 0) - c * v
                    if nv:
                        r[e] = nv
                    else:
                        r.pop(e, None)
        if not r:
            continue
        piv = min(r, key=key)
        inv = 1 / r[piv]
        r = {e: v * inv for e, v in r.items()}
        for row in rows:
            c = row.get(piv)
            if c:
                for e, v in r.items():
                    nv = row.get(e, 0) - c * v
                    if nv:
                        row[e] = nv
                    else:
                        row.pop(e, None)
        rows.append(r)
        pivots.append(piv)
    ctx = polys[0].ctx
    order = sorted(range(len(rows)), key=lambda k: key(pivots[k]))
    return [Polynomial(ctx, rows[k], _trusted=True) for k in order]


def graded_key(e: Exponent):
    """Lowest degree first; among equal degree, smaller variable index first."""
    return (sum(e), tuple(-v for v in e))


@dataclass(frozen=True)
class SubstitutionMap:
    """Ring map sending source variable i to ``images[i]`` in the target context.

    ``truncation`` is the jet degree for maps only valid modulo higher terms.
    """

    source: VariableContext
    target: VariableContext
    images: tuple[Polynomial, ...]
    truncation: int | None = None

    def __post_init__(self):
        if len(self.images) != self.source.arity:
            raise ContextError("one image per source variable required")
        for g in self.images:
            if g.ctx != self.target:
                raise ContextError("image outside target context")

    @classmethod
    def identity(cls, ctx: VariableContext) -> "SubstitutionMap":
        return cls(ctx, ctx, Polynomial.gens(ctx))

    @property
    def exact(self) -> bool:
        return self.truncation is None

    def __call__(self, f: Polynomial) -> Polynomial:
        return substitute(f, self)

    def image_of(self, name: str) -> Polynomial:
        return self.images[self.source.index(name)]


def substitute(f: Polynomial, s: SubstitutionMap) -> Polynomial:
    """Compose ``f`` with ``s``; truncates to the map's jet degree when it has one."""
    if f.ctx != s.source:
        raise ContextError("polynomial context differs from substitution source")
    trunc = s.truncation
    powers: list[dict[int, Polynomial]] = [{} for _ in range(s.source.arity)]

    def mul(a: Polynomial, b: Polynomial) -> Polynomial:
        return a.mul_trunc(b, trunc) if trunc is not None else a * b

    def power(i: int, k: int) -> Polynomial:
        cache = powers[i]
        if k not in cache:
            if k == 1:
                img = s.images[i]
                cache[k] = img.truncate(trunc) if trunc is not None else img
            else:
                half = power(i, k // 2)
                p = mul(half, half)
                cache[k] = mul(p, power(i, 1)) if k % 2 else p
        return cache[k]

    acc: dict = {}
    one = Polynomial.const(s.target, 1)
    # with images vanishing at the origin, source terms above the jet degree contribute nothing
    skip_high = trunc is not None and all(g.order() >= 1 for g in s.images)
    for e, c in f.terms.items():
        if skip_high and sum(e) > trunc:
            continue
        term = one
        for i, k in enumerate(e):
            if k:
                term = mul(term, power(i, k))
        acc = kernels.poly_add(acc, {x: v * c for x, v in term.terms.items()}, 1)
    return Polynomial(s.target, acc, _trusted=True)


@dataclass(frozen=True)
class JetBudget:
    degree: int = 16
    factor: int = 2
    cap: int = 128

    def __post_init__(self):
        if self.degree < 1 or self.factor < 2 or self.degree > self.cap:
            raise ValueError("invalid jet budget")

    def escalate(self) -> "JetBudget":
        nxt = self.degree * self.factor
        if self.degree >= self.cap:
            raise BudgetError(f"jet budget exhausted at degree {self.degree} (cap {self.cap})")
        return JetBudget(min(nxt, self.cap), self.factor, self.cap)


def translate_to_origin(I: Ideal, point: Sequence, *, allow_monomial: bool = False) -> Ideal:
    """Recenter generators so ``point`` (one coordinate per variable) becomes the origin."""
    ctx = I.ctx
    if len(point) != ctx.arity:
        raise ContextError("point must have one coordinate per variable")
    pt = [_frac(v) for v in point]
    if not any(pt):
        return I
    for i, v in enumerate(pt):
        if v and ctx.is_monomial(i) and not allow_monomial:
            raise ContextError(f"nonzero coordinate on monomial variable {ctx.names[i]}")
    xs = Polynomial.gens(ctx)
    smap = SubstitutionMap(ctx, ctx, tuple(x + v if v else x for x, v in zip(xs, pt)))
    return Ideal(ctx, [substitute(g, smap) for g in I.gens], I.truncation)


def solve_parameter_to_coordinate(t: Polynomial, budget: JetBudget | None = None, var: int | None = None) -> SubstitutionMap:
    """Formal coordinate change x_j -> phi with t(phi) = x_j modulo degree > budget.

    The returned map has ``truncation=None`` when the composition is exact.

    >>> ctx = VariableContext.make("x")
    >>> (x,) = Polynomial.gens(ctx)
    >>> str(solve_parameter_to_coordinate(x + x**2, JetBudget(4)).images[0])
    '-5*x^4 + 2*x^3 - x^2 + x'
    """
    budget = budget or JetBudget()
    ctx = t.ctx
    if t.constant_term():
        raise ParameterError(f"{t} does not vanish at the origin")
    if var is None:
        cands = [i for i in ctx.regular_indices() if t.linear_coefficient(i)]
        if not cands:
            raise ParameterError(f"{t} has no linear term on a regular variable")
        var = cands[0]
    lin = t.linear_coefficient(var)
    if not lin:
        raise ParameterError(f"{t} has no linear term in {ctx.names[var]}")
    X = Polynomial.var(ctx, var)
    N = budget.degree
    xs = list(Polynomial.gens(ctx))
    dt = t.derivative(var)
    phi = X * (1 / lin)
    prec = 1  # phi is right through this degree
    while prec < N:
        prec = min(2 * prec + 1, N)
        xs[var] = phi
        smap = SubstitutionMap(ctx, ctx, tuple(xs), truncation=prec)
        err = substitute(t, smap) - X
        if err.is_zero():
            continue
        step = err.mul_trunc(_series_inverse(substitute(dt, smap), prec), prec)
        phi = (phi - step).truncate(prec)
    xs[var] = phi
    if phi.degree() < N:
        # a polynomial solution may compose exactly; worth one untruncated check
        exact_map = SubstitutionMap(ctx, ctx, tuple(xs))
        if substitute(t, exact_map) == X:
            return exact_map
    return SubstitutionMap(ctx, ctx, tuple(xs), truncation=N)


def _series_inverse(u: Polynomial, degree: int) -> Polynomial:
    """1/u modulo degree > ``degree`` for u with nonzero constant term (Newton iteration)."""
    c = u.constant_term()
    g = Polynomial.const(u.ctx, 1 / c)
    prec = 0
    while prec < degree:
        prec = min(2 * prec + 1, degree)
        g = (g * 2 - g.mul_trunc(u.mul_trunc(g, prec), prec)).truncate(prec)
    return g


@dataclass(frozen=True)
class ParameterElimination:
    """Coordinate change in which variable ``var`` becomes the parameter ``t``.

    ``kind == "linear"``: t = a*x + b with a, b free of x and a(0) != 0; a
    polynomial is rewritten as sum f_k (X-b)^k a^(K-k), which differs from
    the true pullback by the unit a^K.  ``kind == "series"``: x -> phi from
    :func:`solve_parameter_to_coordinate`, valid modulo degree > truncation.
    """

    ctx: VariableContext
    var: int
    t: Polynomial
    kind: str
    a: Polynomial | None = None
    b: Polynomial | None = None
    series: SubstitutionMap | None = None
    known: int | None = None  # t itself is only a jet up to this degree

    @property
    def truncation(self) -> int | None:
        ts = [k for k in (self.series.truncation if self.series is not None else None, self.known) if k is not None]
        return min(ts) if ts else None

    def capped(self, degree: int) -> "ParameterElimination":
        if self.known is not None and self.known <= degree:
            return self
        return replace(self, known=degree)

    def apply(self, f: Polynomial) -> Polynomial:
        if f.ctx != self.ctx:
            f = f.embed(self.ctx)
        if self.kind == "series":
            return substitute(f, self.series)
        parts = f.coefficients_in(self.var)
        if len(parts) <= 1:
            return f
        K = len(parts) - 1
        X = Polynomial.var(self.ctx, self.var)
        shifted = X - self.b
        out = Polynomial.zero(self.ctx)
        sp = Polynomial.const(self.ctx, 1)
        apows = [Polynomial.const(self.ctx, 1)]
        for _ in range(K):
            apows.append(apows[-1] * self.a)
        for k, fk in enumerate(parts):
            if fk:
                out = out + fk * sp * apows[K - k]
            sp = sp * shifted
        return out

    def embedded(self, ctx: VariableContext) -> "ParameterElimination":
        """Same change in a larger context (variables matched by name)."""
        var = ctx.index(self.ctx.names[self.var])
        if self.kind == "series":
            imgs = list(Polynomial.gens(ctx))
            imgs[var] = self.series.images[self.var].embed(ctx)
            series = SubstitutionMap(ctx, ctx, tuple(imgs), self.series.truncation)
            return ParameterElimination(ctx, var, self.t.embed(ctx), "series", series=series, known=self.known)
        return ParameterElimination(ctx, var, self.t.embed(ctx), "linear", self.a.embed(ctx), self.b.embed(ctx), known=self.known)


def eliminate_parameter(t: Polynomial, budget: JetBudget | None = None, *, regular: Sequence[int] | None = None) -> ParameterElimination:
    """Choose a variable to trade for ``t``; exact whenever t is linear in a candidate."""
    ctx = t.ctx
    cands = list(regular) if regular is not None else list(ctx.regular_indices())
    cands = [i for i in cands if t.linear_coefficient(i)]
    if not cands or t.constant_term():
        raise ParameterError(f"{t} is not a regular parameter at the origin")
    for i in cands:
        parts = t.coefficients_in(i)
        if len(parts) == 2 and parts[1].constant_term():
            return ParameterElimination(ctx, i, t, "linear", a=parts[1], b=parts[0])
    branch = local_branch(t)
    if branch is not None and branch != t:
        for i in cands:
            parts = branch.coefficients_in(i)
            if len(parts) == 2 and parts[1].constant_term():
                return ParameterElimination(ctx, i, branch, "linear", a=parts[1], b=parts[0])
    series = solve_parameter_to_coordinate(t, budget, cands[0])
    return ParameterElimination(ctx, cands[0], t, "series", series=series)


def to_sympy(f: Polynomial):
    import sympy

    syms = sympy.symbols(list(f.ctx.names)) if f.ctx.arity else []
    data = {e: sympy.Rational(c.numerator, c.denominator) for e, c in f.terms.items()}
    return sympy.Poly.from_dict(data or {(0,) * f.ctx.arity: 0}, *syms, domain="QQ")


def from_sympy(p, ctx: VariableContext) -> Polynomial:
    return Polynomial(ctx, {tuple(e): Fraction(int(c.p), int(c.q)) for e, c in p.terms()})


# multivariate factorization can stall on dense input; beyond these, callers use series
BRANCH_MAX_TERMS = 8
BRANCH_MAX_DEGREE = 8


def local_branch(t: Polynomial) -> Polynomial | None:
    """Irreducible factor of t through the origin when the rest is a unit there.

    V(t) and V(branch) agree near the origin, so either serves as the parameter.
    """
    if t.ctx.arity == 0:
        return None
    m = t.max_monomial_divisor(range(t.ctx.arity))
    if sum(m) == 1 and exact_divide_by_monomial(t, m).constant_term():
        # t = x_i * unit
        return Polynomial.var(t.ctx, m.index(1))
    if len(t.terms) > BRANCH_MAX_TERMS or t.degree() > BRANCH_MAX_DEGREE:
        return None
    _, factors = to_sympy(t).factor_list()
    through = [(f, k) for f, k in factors if f.eval({s: 0 for s in f.gens}) == 0]
    if len(through) != 1 or through[0][1] != 1:
        return None
    b = from_sympy(through[0][0], t.ctx)
    piv = next((i for i in range(t.ctx.arity) if b.linear_coefficient(i)), None)
    if piv is None:
        return None
    return b * (1 / b.linear_coefficient(piv))


@dataclass(frozen=True)
class CoordinateChange:
    """Ordered parameter eliminations taking a context to adapted coordinates."""

    ctx: VariableContext
    steps: tuple[ParameterElimination, ...] = field(default_factory=tuple)

    def apply(self, f: Polynomial) -> Polynomial:
        for st in self.steps:
            f = st.apply(f)
        return f

    @property
    def truncation(self) -> int | None:
        ts = [s.truncation for s in self.steps if s.truncation is not None]
        return min(ts) if ts else None

    def apply_ideal(self, I: Ideal) -> Ideal:
        trunc = self.truncation
        if I.truncation is not None:
            trunc = I.truncation if trunc is None else min(trunc, I.truncation)
        return Ideal(I.ctx, [self.apply(g) for g in I.gens], trunc)

    def is_identity(self) -> bool:
        return all(s.kind == "linear" and s.t == Polynomial.var(s.ctx, s.var) for s in self.steps)
