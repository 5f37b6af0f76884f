"""Select the compiled kernels when built, else the pure-Python ones.

Set ``WEIGHTRES_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os
from fractions import Fraction

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if not os.environ.get("WEIGHTRES_PURE"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

try:
    if os.environ.get("WEIGHTRES_PURE"):
        raise ImportError
    import flint
except ImportError:
    flint = None

poly_mul = _impl.poly_mul
poly_mul_trunc = _impl.poly_mul_trunc
poly_add = _impl.poly_add
poly_deriv = _impl.poly_deriv
poly_logderiv = _impl.poly_logderiv
min_degree = _impl.min_degree
shift_divide = _impl.shift_divide



def rref(rows: list[dict], columns: list) -> list[dict] | None:
    """Nonzero rows of the reduced row echelon form over Q, or None without FLINT.

    ``rows`` are sparse dicts keyed by entries of ``columns``; column order
    decides the pivots.
    """
    if flint is None:
        return None
    col = {c: j for j, c in enumerate(columns)}
    M = flint.fmpq_mat(len(rows), len(columns))
    for i, r in enumerate(rows):
        for e, v in r.items():
            M[i, col[e]] = flint.fmpq(v.numerator, v.denominator)
    R, rank = M.rref()
    out = []
    for i in range(rank):
        row = {}
        for j, c in enumerate(columns):
            v = R[i, j]
            if v:
                row[c] = Fraction(int(v.p), int(v.q))
        out.append(row)
    return out


__all__ = [
    "BACKEND",
    "poly_mul",
    "poly_mul_trunc",
    "poly_add",
    "poly_deriv",
    "poly_logderiv",
    "min_degree",
    "shift_divide",
    "rref",
]
