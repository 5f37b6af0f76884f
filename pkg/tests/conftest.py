from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from weightres.algebra import Ideal, Polynomial, VariableContext

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def polys(ctx: VariableContext, max_terms=4, max_exp=3, coeff=3):
    """Random polynomials in ``ctx`` with small integer or half-integer coefficients."""
    exps = st.tuples(*[st.integers(0, max_exp)] * ctx.arity)
    coeffs = st.integers(-coeff, coeff).filter(bool).map(Fraction) | st.fractions(-2, 2, max_denominator=2).filter(bool)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: Polynomial(ctx, d))


@pytest.fixture
def xyz():
    ctx = VariableContext.make("xyz")
    return (ctx,) + Polynomial.gens(ctx)


@pytest.fixture
def xyzt():
    ctx = VariableContext.make("xyzt")
    return (ctx,) + Polynomial.gens(ctx)


@pytest.fixture
def tu():
    ctx = VariableContext.make("t", "u")
    return (ctx,) + Polynomial.gens(ctx)


def ideal(*gens):
    return Ideal(gens[0].ctx, list(gens))
