"""Compiled vs pure-Python kernels, FLINT vs plain elimination, and one end-to-end run.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction
from pathlib import Path

from weightres import _kernels_py, algebra, kernels
from weightres.algebra import Polynomial, VariableContext

try:
    from weightres import _kernels
except ImportError:
    _kernels = None

ROOT = Path(__file__).resolve().parent.parent


def random_terms(rng, nvars, nterms, deg):
    out = {}
    while len(out) < nterms:
        e = tuple(rng.randint(0, deg) for _ in range(nvars))
        out[e] = Fraction(rng.randint(-9, 9) or 1, rng.choice([1, 2, 3]))
    return out


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(repeat):
    rng = random.Random(0)
    a = random_terms(rng, 4, 120, 6)
    b = random_terms(rng, 4, 120, 6)
    shift = (1, 0, 0, 0)
    divisible = {tuple(x + s for x, s in zip(e, shift)): c for e, c in a.items()}
    cases = {
        "poly_mul 120x120": lambda k: k.poly_mul(a, b),
        "poly_mul_trunc deg 8": lambda k: k.poly_mul_trunc(a, b, 8),
        "poly_add": lambda k: k.poly_add(a, b, -1),
        "poly_deriv": lambda k: k.poly_deriv(a, 1),
        "shift_divide": lambda k: k.shift_divide(divisible, shift),
    }
    rows = []
    for name, fn in cases.items():
        pure = best(lambda: fn(_kernels_py), repeat)
        comp = best(lambda: fn(_kernels), repeat) if _kernels else float("nan")
        rows.append((name, pure, comp))
    return rows


def rref_row(repeat):
    rng = random.Random(1)
    ctx = VariableContext.make("xyz")
    polys = [Polynomial(ctx, random_terms(rng, 3, 12, 5)) for _ in range(60)]
    with_flint = best(lambda: algebra.linear_basis(polys), repeat)
    saved = kernels.rref
    kernels.rref = lambda rows, columns: None
    try:
        plain = best(lambda: algebra.linear_basis(polys), repeat)
    finally:
        kernels.rref = saved
    return ("linear_basis 60 rows", plain, with_flint if kernels.flint else float("nan"))


def end_to_end(pure):
    env = dict(os.environ)
    if pure:
        env["WEIGHTRES_PURE"] = "1"
    code = (
        "import time; from weightres.io import parse_ideal_file; from weightres.driver import principalize_weighted;"
        f"f = parse_ideal_file(open({str(ROOT / 'samples' / 'a4.ideal')!r}).read());"
        "t = time.perf_counter(); principalize_weighted(f.ideal); print(time.perf_counter() - t)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}; compiled module {'present' if _kernels else 'missing'}; FLINT {'present' if kernels.flint else 'missing'}")
    print(f"{'case':<24}{'pure (ms)':>12}{'fast (ms)':>12}{'speedup':>10}")
    rows = kernel_rows(args.repeat) + [rref_row(args.repeat)]
    rows.append(("A4 principalize", end_to_end(True), end_to_end(False)))
    for name, slow, fast in rows:
        print(f"{name:<24}{slow * 1e3:>12.3f}{fast * 1e3:>12.3f}{slow / fast:>9.2f}x")


if __name__ == "__main__":
    main()
