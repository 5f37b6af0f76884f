"""Exact rational linear algebra: feasibility, Newton membership, cone rays."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Sequence

Vector = tuple[Fraction, ...]


def feasible(A: Sequence[Sequence], b: Sequence) -> bool:
    """Is there x >= 0 with A x = b?  Phase-one simplex with Bland's rule."""
    m = len(A)
    if m == 0:
        return True
    n = len(A[0])
    rows = []
    for r, rhs in zip(A, b):
        r = [Fraction(v) for v in r]
        rhs = Fraction(rhs)
        if rhs < 0:
            r, rhs = [-v for v in r], -rhs
        rows.append(r + [Fraction(int(i == len(rows))) for i in range(m)] + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m
    # reduced costs of the phase-one objective sum(artificials)
    cost = [Fraction(0)] * (width + 1)
    for r in rows:
        for j in range(n):
            cost[j] -= r[j]
        cost[width] -= r[width]
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[width] / r[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # unbounded; cannot happen for phase one
            break
        piv = rows[leave]
        inv = 1 / piv[enter]
        piv = [v * inv for v in piv]
        rows[leave] = piv
        for i, r in enumerate(rows):
            if i != leave and r[enter]:
                c = r[enter]
                rows[i] = [x - c * y for x, y in zip(r, piv)]
        c = cost[enter]
        cost = [x - c * y for x, y in zip(cost, piv)]
        basis[leave] = enter
    return cost[width] == 0


def newton_contains(points: Sequence[Sequence], m: Sequence) -> bool:
    """m in conv(points) + nonnegative orthant, decided exactly."""
    pts = [tuple(Fraction(v) for v in p) for p in points]
    mm = tuple(Fraction(v) for v in m)
    if not pts:
        return False
    if any(all(a <= b for a, b in zip(p, mm)) for p in pts):
        return True
    dim = len(mm)
    k = len(pts)
    # sum lam_i p_i + slack = m, sum lam_i = 1
    A = []
    for j in range(dim):
        A.append([p[j] for p in pts] + [Fraction(int(i == j)) for i in range(dim)])
    A.append([Fraction(1)] * k + [Fraction(0)] * dim)
    return feasible(A, list(mm) + [Fraction(1)])


def newton_vertices(points: Sequence[Sequence]) -> list[int]:
    """Indices of points that are vertices of conv(points) + orthant.

    Among duplicates only the first index is kept.
    """
    pts = [tuple(Fraction(v) for v in p) for p in points]
    out = []
    for i, p in enumerate(pts):
        if p in pts[:i]:
            continue
        others = [q for q in pts if q != p]
        if not others or not newton_contains(others, p):
            out.append(i)
    return out


def rank(rows: Sequence[Sequence]) -> int:
    return len(_echelon([list(map(Fraction, r)) for r in rows]))


def _echelon(rows):
    rows = [r[:] for r in rows if any(r)]
    out = []
    if not rows:
        return out
    ncol = len(rows[0])
    col = 0
    while rows and col < ncol:
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            col += 1
            continue
        rows.remove(piv)
        inv = 1 / piv[col]
        piv = [v * inv for v in piv]
        rows = [[a - r[col] * b for a, b in zip(r, piv)] if r[col] else r for r in rows]
        rows = [r for r in rows if any(r)]
        out.append((col, piv))
        col += 1
    return out


def nullspace(rows: Sequence[Sequence], dim: int) -> list[Vector]:
    ech = _echelon([list(map(Fraction, r)) for r in rows])
    # back-substitute to reduced form
    red = [list(r) for _, r in ech]
    pcols = [c for c, _ in ech]
    for i in range(len(red) - 1, -1, -1):
        for k in range(i):
            c = red[k][pcols[i]]
            if c:
                red[k] = [a - c * b for a, b in zip(red[k], red[i])]
    free = [c for c in range(dim) if c not in pcols]
    basis = []
    for f in free:
        v = [Fraction(0)] * dim
        v[f] = Fraction(1)
        for pc, r in zip(pcols, red):
            v[pc] = -r[f]
        basis.append(tuple(v))
    return basis


def primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest positive integer multiple of a rational vector."""
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints) if g else tuple(ints)


def cone_extreme_rays(inequalities: Sequence[Sequence], dim: int) -> list[tuple[int, ...]]:
    """Primitive extreme rays of the pointed cone {w : <h, w> >= 0 for h in inequalities}.

    Brute force over (dim-1)-subsets of tight constraints; fine for the
    handful of variables a center involves.
    """
    hs = [tuple(Fraction(v) for v in h) for h in inequalities if any(h)]
    rays: set[tuple[int, ...]] = set()
    for sub in combinations(range(len(hs)), dim - 1):
        rows = [hs[i] for i in sub]
        if rank(rows) != dim - 1:
            continue
        ns = nullspace(rows, dim)
        if len(ns) != 1:
            continue
        v = ns[0]
        for cand in (v, tuple(-x for x in v)):
            if all(sum(a * b for a, b in zip(h, cand)) >= 0 for h in hs):
                rays.add(primitive(cand))
    return sorted(rays, key=lambda r: tuple(-x for x in r))


def det(rows: Sequence[Sequence]) -> Fraction:
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        out *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return out * sign
