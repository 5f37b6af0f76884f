from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from conftest import polys
from weightres.algebra import Ideal, JetBudget, Polynomial, VariableContext, to_sympy
from weightres.blowup import (
    blowup_charts,
    controlled_transform,
    d_transform_with_monomial_tracking,
    monomial_center,
    monomial_hull_blowup,
    strict_transform,
    weighted_blowup_charts,
)
from weightres.centers import CenterParameter, QRegularCenter, log_weighted_center_at_origin, weighted_center_at_origin
from weightres.diffcalc import log_order_at_origin, monomial_hull
from weightres.errors import AdmissibilityError, BudgetError
from weightres.monomial import MonomialIdeal, monomial_integral_closure

XYZT = VariableContext.make("xyzt")
x, y, z, t = Polynomial.gens(XYZT)
XYZ = VariableContext.make("xyz")
X, Y, Z = Polynomial.gens(XYZ)
TU = VariableContext.make("t", "u")
T, U = Polynomial.gens(TU)
TUV = VariableContext.make("t", "uv")
T3, U3, V3 = Polynomial.gens(TUV)


def images(ch):
    return [str(g) for g in ch.substitution.images]


def by_label(rec):
    return {ch.label: ch for ch in rec.charts}


def plain_center(ctx, *params):
    return QRegularCenter(ctx, tuple(CenterParameter(str(p), p, Fraction(q)) for p, q in params), None)


@pytest.fixture(scope="module")
def a4():
    I = Ideal(XYZT, [x**2 - y * z * t])
    _, c = weighted_center_at_origin(I)
    return I, weighted_blowup_charts(c)


def test_a4_charts(a4):
    _, rec = a4
    charts = by_label(rec)
    assert sorted(charts) == ["t", "x", "y", "z"]
    cx = charts["x"]
    assert images(cx) == ["e0^3", "y*e0^2", "z*e0^2", "t*e0^2"]
    assert (cx.stabilizer, cx.a) == (3, 6)
    assert [(ch.stabilizer, ch.a) for ch in (charts["y"], charts["z"], charts["t"])] == [(2, 6)] * 3
    assert images(charts["y"]) == ["x*e0^3", "e0^2", "z*e0^2", "t*e0^2"]


def test_a4_controlled_transforms(a4):
    I, rec = a4
    charts = by_label(rec)
    assert controlled_transform(I, charts["x"]) == Ideal(charts["x"].child, [1 - Polynomial.var(charts["x"].child, "y") * Polynomial.var(charts["x"].child, "z") * Polynomial.var(charts["x"].child, "t")])
    cy = charts["y"].child
    assert str(controlled_transform(I, charts["y"])) == "(x^2 - z*t)"
    assert cy.names[-1] == "e0" and cy.roles[-1].is_monomial


def test_unit_ideal_stays_unit(a4):
    _, rec = a4
    for ch in rec.charts:
        assert controlled_transform(Ideal(XYZT, [Polynomial.const(XYZT, 1)]), ch).is_unit_at_origin()


def test_single_coordinate_center():
    rec = weighted_blowup_charts(plain_center(XYZ, (X, 1)))
    (ch,) = rec.charts
    assert images(ch) == ["e0", "y", "z"]
    assert (ch.stabilizer, ch.a) == (1, 1)


def test_inadmissible_transform_reports_witness(a4):
    _, rec = a4
    with pytest.raises(AdmissibilityError) as err:
        controlled_transform(Ideal(XYZT, [y]), by_label(rec)["x"])
    assert err.value.args


def test_strict_transform_examples():
    rec = by_label(weighted_blowup_charts(plain_center(XYZ, (X, 1), (Y, 1))))
    cy = rec["y"]
    e0 = Polynomial.var(cy.child, "e0")
    xp = Polynomial.var(cy.child, "x")
    # x = x e0, y = e0 turns x*y + y^3 into e0^2 (x + e0)
    assert strict_transform(Ideal(XYZ, [X * Y + Y**3]), cy).gens == (xp + e0,)
    _, cu = weighted_center_at_origin(Ideal(XYZ, [X**2 - Y**2 * Z]))
    uy = by_label(weighted_blowup_charts(cu))["y"]
    assert images(uy) == ["x*e0^3", "e0^2", "z*e0^2"]
    assert str(strict_transform(Ideal(XYZ, [X**2 - Y**2 * Z]), uy)) == "(x^2 - z)"


def test_strict_transform_strips_everything(a4):
    I, rec = a4
    cx = by_label(rec)["x"]
    assert strict_transform(I, cx) == controlled_transform(I, cx)


def cube_chart():
    (ch,) = weighted_blowup_charts(plain_center(TU, (T, 3))).charts
    assert images(ch) == ["e0", "u"] and ch.a == 3
    return ch


def test_d_transform_l_equals_d_keeps_monomial_part():
    ch = cube_chart()
    N = MonomialIdeal(TU, 1, ((0, 1),))
    _, Np = d_transform_with_monomial_tracking(Ideal(TU, [T**3]), N, ch, 3, 3)
    assert str(Np) == "(u)"


def test_d_transform_gains_exceptional_power():
    ch = cube_chart()
    unit = MonomialIdeal.unit(TU)
    clean, Np = d_transform_with_monomial_tracking(Ideal(TU, [T**3]), unit, ch, 3, 1)
    assert clean.is_unit_at_origin()
    assert str(Np) == "(e0^2)"
    clean, Np = d_transform_with_monomial_tracking(Ideal(TU, [T**3]), unit, ch, 3, 2)
    assert clean.is_unit_at_origin()
    assert str(Np) == "(e0)"


def test_d_transform_rejects_bad_levels():
    with pytest.raises(ValueError):
        d_transform_with_monomial_tracking(Ideal(TU, [T]), MonomialIdeal.unit(TU), cube_chart(), 1, 2)


def test_half_root_chart_coordinates():
    I = Ideal(TU, [T**2 + U])
    _, c = log_weighted_center_at_origin(I)
    charts = by_label(weighted_blowup_charts(c))
    ch = charts["N(u)"]
    # y = u^(1/2) is e0 and x = t / y is the child t
    assert images(ch) == ["t*e0", "e0^2"]
    assert ch.stabilizer == 2
    assert str(controlled_transform(I, ch)) == "(t^2 + 1)"


def test_hull_blowup_examples():
    I = Ideal(TU, [U * T**2 + U**2])
    (ch,) = monomial_hull_blowup(I).charts
    assert str(controlled_transform(I, ch)) == "(t^2 + u)"
    (ch,) = monomial_hull_blowup(Ideal(TU, [U**2])).charts
    assert controlled_transform(Ideal(TU, [U**2]), ch).is_unit_at_origin()
    J = Ideal(TUV, [U3 * T3 + V3 * T3])
    charts = by_label(monomial_hull_blowup(J))
    tr = controlled_transform(J, charts["N(u)"])
    assert str(tr) == "(t*v + t)"
    assert log_order_at_origin(tr) == 1


def test_chart_count_matches_parameters_and_monomial_generators():
    _, c = log_weighted_center_at_origin(Ideal(TU, [T**2 + U]))
    assert len(weighted_blowup_charts(c).charts) == len(c.parameters) + len(c.monomial_part.gens)


def test_chart_compatibility_on_overlap():
    """Classical center (x, y): the two charts agree on y' != 0 after x'' = 1/y', f = y' e."""
    rec = by_label(weighted_blowup_charts(plain_center(XYZ, (X, 1), (Y, 1))))
    cx, cy = rec["x"], rec["y"]
    I = Ideal(XYZ, [X**2 - Y**3 + X * Y * Z, X * Z + Y**2])
    yp, zp, e = sympy.symbols("y z e0")
    for g in I.gens:
        tx = to_sympy(controlled_transform(Ideal(XYZ, [g]), cx).gens[0]).as_expr()
        ty = to_sympy(controlled_transform(Ideal(XYZ, [g]), cy).gens[0]).as_expr()
        # child names: x-chart (y, z, e0), y-chart (x, z, e0)
        xs = sympy.Symbol("x")
        moved = ty.subs({xs: 1 / yp, e: yp * e}, simultaneous=True)
        assert sympy.simplify(tx - moved * yp**cx.a) == 0


CLOSURE_CASES = [
    ((2, 0), (0, 2)),
    ((3, 0), (0, 2)),
    ((4, 0, 0), (0, 3, 0), (0, 0, 2)),
    ((2, 0, 0), (1, 1, 1), (0, 0, 3), (0, 4, 0)),
]


@pytest.mark.parametrize("gens", CLOSURE_CASES)
def test_closure_gives_the_same_charts(gens):
    ctx = VariableContext.make("", "uvw"[: len(gens[0])])
    M = MonomialIdeal(ctx, 1, gens)
    C = monomial_integral_closure(M)
    a = blowup_charts(monomial_center(ctx, M), "kummer-monomial").charts
    b = blowup_charts(monomial_center(ctx, C), "kummer-monomial").charts
    assert [images(ch) for ch in a] == [images(ch) for ch in b]
    assert [ch.stabilizer for ch in a] == [ch.stabilizer for ch in b]


SMALL = JetBudget(16, 2, 32)


@given(st.lists(polys(XYZ, 3, 2), min_size=1, max_size=2))
def test_center_pulls_back_to_exceptional_power(gs):
    I = Ideal(XYZ, gs)
    assume(not I.is_zero() and not I.is_unit_at_origin())
    try:
        _, c = weighted_center_at_origin(I, SMALL)
    except BudgetError:
        assume(False)
    assume(c.change.is_identity())
    for ch in weighted_blowup_charts(c).charts:
        # every parameter t_i^(q_i) lands in (s^a); integral q_i here since weights divide a
        for p in c.parameters:
            if p.q.denominator == 1:
                img = ch.pullback(p.expression ** int(p.q))
                s = ch.child.index(ch.exceptional[-1][0])
                assert all(e[s] >= ch.a for e in img.terms)
        controlled_transform(I, ch)


MONOS = st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(any)


@given(st.lists(st.tuples(polys(TUV, 3, 2), MONOS), min_size=1, max_size=2))
def test_hull_blowup_gives_finite_log_order(pairs):
    gens = [g * Polynomial.monomial(TUV, (0,) + m) for g, m in pairs]
    I = Ideal(TUV, gens)
    assume(not I.is_zero())
    assert log_order_at_origin(I) == float("inf")
    assume(not monomial_hull(I).is_unit())
    for ch in monomial_hull_blowup(I).charts:
        assert log_order_at_origin(controlled_transform(I, ch)) < float("inf")
