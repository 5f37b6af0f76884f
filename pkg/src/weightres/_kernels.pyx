# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse polynomial kernels (same API as ``_kernels_py``)."""
from fractions import Fraction
from math import lcm


cdef tuple _integral(dict a):
    cdef object den = 1
    cdef object c
    for c in a.values():
        den = lcm(den, c.denominator)
    if den == 1:
        return 1, [(e, c.numerator) for e, c in a.items()]
    return den, [(e, c.numerator * (den // c.denominator)) for e, c in a.items()]


cdef inline tuple _add_exp(tuple x, tuple y, Py_ssize_t n):
    cdef list out = [0] * n
    cdef Py_ssize_t k
    for k in range(n):
        out[k] = <long>x[k] + <long>y[k]
    return tuple(out)


cdef inline long _deg(tuple e):
    cdef long s = 0
    for x in e:
        s += <long>x
    return s


def poly_mul(dict a, dict b):
    if not a or not b:
        return {}
    da, ia = _integral(a)
    db, ib = _integral(b)
    cdef dict acc = {}
    cdef tuple ea, eb, e
    cdef object ca, cb
    cdef Py_ssize_t n = len(next(iter(a)))
    for ea, ca in ia:
        for eb, cb in ib:
            e = _add_exp(ea, eb, n)
            acc[e] = acc.get(e, 0) + ca * cb
    den = da * db
    return {e: Fraction(c, den) for e, c in acc.items() if c}


def poly_mul_trunc(dict a, dict b, long degree):
    if not a or not b:
        return {}
    da, ia = _integral(a)
    db, ib = _integral(b)
    cdef list bl = sorted([(_deg(eb), eb, cb) for eb, cb in ib])
    cdef dict acc = {}
    cdef tuple ea, eb, e
    cdef object ca, cb
    cdef long room, dg
    cdef Py_ssize_t n = len(next(iter(a)))
    for ea, ca in ia:
        room = degree - _deg(ea)
        for dg, eb, cb in bl:
            if dg > room:
                break
            e = _add_exp(ea, eb, n)
            acc[e] = acc.get(e, 0) + ca * cb
    den = da * db
    return {e: Fraction(c, den) for e, c in acc.items() if c}


def poly_add(dict a, dict b, int sign=1):
    cdef dict out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + (c if sign > 0 else -c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def poly_deriv(dict a, Py_ssize_t i):
    cdef dict out = {}
    cdef list f
    cdef long k
    for e, c in a.items():
        k = e[i]
        if k:
            f = list(e)
            f[i] = k - 1
            out[tuple(f)] = c * k
    return out


def poly_logderiv(dict a, Py_ssize_t i):
    return {e: c * e[i] for e, c in a.items() if e[i]}


def min_degree(dict a):
    cdef long best = -1
    cdef long s
    cdef tuple e
    for e in a:
        s = 0
        for x in e:
            s += <long>x
        if best < 0 or s < best:
            best = s
    return best


def shift_divide(dict a, tuple shift):
    cdef dict out = {}
    cdef Py_ssize_t n = len(shift)
    cdef Py_ssize_t k
    cdef long x
    cdef list f
    for e, c in a.items():
        f = [0] * n
        for k in range(n):
            x = <long>e[k] - <long>shift[k]
            if x < 0:
                return None
            f[k] = x
        out[tuple(f)] = c
    return out
