import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import polys
from oracles import hull_exponents_by_sympy, in_monomial_ideal
from weightres.algebra import Ideal, Polynomial, VariableContext, linear_basis
from weightres.diffcalc import (
    INF,
    DerivationBasis,
    coefficient_ideal,
    contact_candidates,
    derivative_ideal,
    homogenized_sum,
    log_order_at_origin,
    maximal_contact,
    monomial_hull,
    order_at_origin,
    order_for,
    restrict_to_contact,
)
from weightres.errors import ContactError

XYZ = VariableContext.make("xyz")
x, y, z = Polynomial.gens(XYZ)
TU = VariableContext.make("t", "u")
t, u = Polynomial.gens(TU)
TUV = VariableContext.make("t", "uv")


def span_contains(gens, p):
    return len(linear_basis(list(gens) + [p])) == len(linear_basis(list(gens)))


def ideal_equals_monomial(I, monos):
    """I equals the monomial ideal (monos): each monomial lies in I's Q-span and each generator's terms lie in (monos)."""
    exps = [next(iter(m.terms)) for m in monos]
    return all(span_contains(I.gens, m) for m in monos) and all(
        in_monomial_ideal(exps, e) for g in I.gens for e in g.terms
    )


def test_derivative_ideal_examples():
    I = Ideal(XYZ, [x**2 - y**2 * z])
    D1 = derivative_ideal(I, DerivationBasis.classical(XYZ), 1)
    assert ideal_equals_monomial(D1, [x, y * z, y**2])
    L = derivative_ideal(Ideal(TU, [t**2 + u]), DerivationBasis.logarithmic(TU), 1)
    assert ideal_equals_monomial(L, [t, u])
    assert derivative_ideal(I, DerivationBasis.classical(XYZ), 0) is I


def test_orders():
    assert order_at_origin(Ideal(XYZ, [x**2 - y**2 * z])) == 2
    assert order_at_origin(Ideal(XYZ, [Polynomial.const(XYZ)])) == 0
    assert order_at_origin(Ideal(XYZ, [Polynomial.zero(XYZ)])) == INF
    assert log_order_at_origin(Ideal(TU, [t + u**2])) == 1
    assert log_order_at_origin(Ideal(TU, [u])) == INF
    assert log_order_at_origin(Ideal(TU, [t**2 + u])) == 2


def test_hull_examples():
    assert str(monomial_hull(Ideal(TU, [u * t**2 + u**2]))) == "(u)"
    assert monomial_hull(Ideal(TU, [t**2 + u])).is_unit()
    assert str(monomial_hull(Ideal(TU, [u**2]))) == "(u^2)"


def test_maximal_contact_examples():
    assert maximal_contact(Ideal(TU, [t**2 + u]), 2, DerivationBasis.logarithmic(TU)) == t
    assert maximal_contact(Ideal(XYZ, [x**2 - y**2 * z]), 2, DerivationBasis.classical(XYZ)) == x
    assert maximal_contact(Ideal(XYZ, [x]), 1, DerivationBasis.classical(XYZ)) == x
    with pytest.raises(ContactError):
        maximal_contact(Ideal(XYZ, [x**2]), 1, DerivationBasis.classical(XYZ))


def test_log_contacts_never_pivot_on_monomial_variables():
    # classically u is a contact for t^2 + u; logarithmically only t is allowed
    I = Ideal(TU, [t**2 + u])
    classical = maximal_contact(I, 1, DerivationBasis.classical(TU))
    assert classical == t**2 + u and classical.linear_coefficient(1) == 1
    assert all(c.linear_coefficient(1) == 0 for c in contact_candidates(Ideal(TU, [t**2 + u**2]), 2, DerivationBasis.logarithmic(TU)))


def test_homogenized_sum_examples():
    I = Ideal(XYZ, [x])
    assert homogenized_sum([(I, 1)]).gens == I.gens
    J = Ideal(XYZ, [y])
    S = homogenized_sum([(I, 2), (J, 1)])
    assert set(S.gens) == {x, y**2}  # (1,1) gives xy, already in (x)
    assert set(homogenized_sum([(I, 1), (J, 1)]).gens) == {x, y}


def test_coefficient_ideal_examples():
    I = Ideal(XYZ, [x**2 - y**2 * z])
    C = coefficient_ideal(I, 2, DerivationBasis.classical(XYZ))
    D1 = derivative_ideal(I, DerivationBasis.classical(XYZ), 1)
    # minimal tuples for weights (2, 1) are (1, 0) and (0, 2): C = I + D1^2
    expected = {x**2 - y**2 * z} | {a * b for a in D1.gens for b in D1.gens}
    assert set(C.gens) == expected
    R = restrict_to_contact(C, x)
    assert ideal_equals_monomial(R, [Polynomial.var(R.ctx, "y") ** 2 * Polynomial.var(R.ctx, "z"),
                                     Polynomial.var(R.ctx, "y") ** 4])
    assert order_at_origin(R) == 3
    assert coefficient_ideal(Ideal(XYZ, [x]), 1, DerivationBasis.classical(XYZ)).gens == (x,)
    assert D1 is derivative_ideal(I, DerivationBasis.classical(XYZ), 1)


def test_log_coefficient_ideal_restrictions():
    log = DerivationBasis.logarithmic(TU)
    for f, d in ((t + u**2, 1), (t**2 + u**2, 2)):
        R = restrict_to_contact(coefficient_ideal(Ideal(TU, [f]), d, log), t, log=True)
        assert str(monomial_hull(R)) == "(u^2)"
        assert log_order_at_origin(R) == INF
    R = restrict_to_contact(coefficient_ideal(Ideal(TU, [t**2 + u]), 2, log), t, log=True)
    assert str(monomial_hull(R)) == "(u)"


def test_restrict_simple():
    R = restrict_to_contact(Ideal(VariableContext.make("xy"), Polynomial.gens(VariableContext.make("xy"))), Polynomial.var(VariableContext.make("xy"), "x"))
    assert str(R) == "(y)"


def test_restriction_along_curved_contact_is_exact_or_flagged():
    c = VariableContext.make("xy")
    X, Y = Polynomial.gens(c)
    R = restrict_to_contact(Ideal(c, [X - Y**2, Y**3]), X - Y**2)
    assert R.truncation is None and str(R) == "(y^3)"


# properties on random ideals

P3 = polys(XYZ, 3, 3)
PTUV = polys(TUV, 3, 3)


@given(st.lists(PTUV, min_size=1, max_size=2))
def test_log_order_infinite_iff_hull_proper(gs):
    I = Ideal(TUV, gs)
    if I.is_zero():
        return
    assert (log_order_at_origin(I) == INF) == (not monomial_hull(I).is_unit())


@given(st.lists(PTUV, min_size=1, max_size=2))
def test_hull_matches_term_collection_oracle(gs):
    I = Ideal(TUV, gs)
    H = monomial_hull(I)
    oracle = hull_exponents_by_sympy(I)
    assert all(in_monomial_ideal(oracle, g) for g in H.gens)
    assert all(in_monomial_ideal(H.gens, g) for g in oracle)


@given(P3, st.integers(1, 3))
def test_order_of_power(f, k):
    if f.is_zero():
        return
    assert order_at_origin(Ideal(XYZ, [f**k])) == k * order_at_origin(Ideal(XYZ, [f]))


@given(PTUV, st.integers(1, 3))
def test_log_order_of_power(f, k):
    if f.is_zero():
        return
    assert log_order_at_origin(Ideal(TUV, [f**k])) == k * log_order_at_origin(Ideal(TUV, [f]))


@given(st.lists(PTUV, min_size=1, max_size=2), st.integers(0, 2), st.integers(0, 2), st.booleans())
def test_derivative_levels_compose(gs, i, j, log):
    I = Ideal(TUV, gs)
    basis = DerivationBasis(TUV, log)
    A = derivative_ideal(derivative_ideal(I, basis, j), basis, i)
    B = derivative_ideal(I, basis, i + j)
    assert order_at_origin(A) == order_at_origin(B)
    assert log_order_at_origin(A) == log_order_at_origin(B)
    assert set(monomial_hull(A).gens) == set(monomial_hull(B).gens)


@given(st.lists(PTUV, min_size=1, max_size=2))
def test_unused_variable_changes_nothing(gs):
    I = Ideal(TUV, gs)
    big = VariableContext(("t", "w", "u", "v"), (TUV.roles[0], TUV.roles[0]) + TUV.roles[1:])
    J = I.embed(big)
    assert order_at_origin(I) == order_at_origin(J)
    assert log_order_at_origin(I) == log_order_at_origin(J)
    assert [tuple(g[k] for k in (0, 2, 3)) for g in monomial_hull(J).gens] == list(monomial_hull(I).gens)


def test_restriction_orders_independent_of_contact():
    rng = random.Random(7)
    basis = DerivationBasis.classical(XYZ)
    checked = 0
    for _ in range(200):
        f = x**2 + y**2 + sum(rng.choice([0, 1, -1]) * m for m in (z**3, x * z**2, y * z**2, z**4, x * y * z))
        I = Ideal(XYZ, [f])
        d = order_at_origin(I)
        cands = contact_candidates(I, d, basis)
        if len(cands) < 2:
            continue
        C = coefficient_ideal(I, d, basis)
        orders = {order_at_origin(restrict_to_contact(C, c)) for c in (cands[0], cands[-1])}
        assert len(orders) == 1
        checked += 1
    assert checked >= 10
