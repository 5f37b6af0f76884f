"""Pure-Python sparse polynomial kernels.

Polynomials are ``dict[tuple[int, ...], Fraction]`` with no zero values.
The compiled module ``_kernels`` exposes the same functions.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm


def _integral(a):
    den = 1
    for c in a.values():
        den = lcm(den, c.denominator)
    if den == 1:
        return 1, {e: c.numerator for e, c in a.items()}
    return den, {e: c.numerator * (den // c.denominator) for e, c in a.items()}


def poly_mul(a, b):
    if not a or not b:
        return {}
    da, ia = _integral(a)
    db, ib = _integral(b)
    acc = {}
    get = acc.get
    for ea, ca in ia.items():
        for eb, cb in ib.items():
            e = tuple([x + y for x, y in zip(ea, eb)])
            acc[e] = get(e, 0) + ca * cb
    den = da * db
    return {e: Fraction(c, den) for e, c in acc.items() if c}


def poly_mul_trunc(a, b, degree):
    """Product keeping only terms of total degree <= ``degree``."""
    if not a or not b:
        return {}
    da, ia = _integral(a)
    db, ib = _integral(b)
    bl = sorted((sum(e), e, c) for e, c in ib.items())
    acc = {}
    get = acc.get
    for ea, ca in ia.items():
        room = degree - sum(ea)
        for deg, eb, cb in bl:
            if deg > room:
                break
            e = tuple([x + y for x, y in zip(ea, eb)])
            acc[e] = get(e, 0) + ca * cb
    den = da * db
    return {e: Fraction(c, den) for e, c in acc.items() if c}


def poly_add(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + (c if sign > 0 else -c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def poly_deriv(a, i):
    out = {}
    for e, c in a.items():
        k = e[i]
        if k:
            f = list(e)
            f[i] = k - 1
            out[tuple(f)] = c * k
    return out


def poly_logderiv(a, i):
    return {e: c * e[i] for e, c in a.items() if e[i]}


def min_degree(a):
    if not a:
        return -1
    return min(sum(e) for e in a)


def shift_divide(a, shift):
    """Subtract ``shift`` from every exponent; None if some term is not divisible."""
    out = {}
    for e, c in a.items():
        f = tuple([x - s for x, s in zip(e, shift)])
        for x in f:
            if x < 0:
                return None
        out[f] = c
    return out
