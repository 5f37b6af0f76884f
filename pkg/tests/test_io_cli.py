import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import polys
from weightres.algebra import Ideal, Polynomial, VariableContext
from weightres import cli
from weightres.cli import main
from weightres.driver import ResolutionTree, principalize_log_weighted, principalize_weighted
from weightres.errors import BudgetError, DropAssertionError, ParseError
from weightres.io import emit_dot, emit_trace_json, format_ideal_file, parse_ideal_file, restore_state, snapshot_state

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def test_parse_classical_file():
    f = parse_ideal_file("vars: x y z\nideal: x^2 - y^2*z")
    assert f.ctx.names == ("x", "y", "z") and not f.ctx.monomial_indices()
    x, y, z = Polynomial.gens(f.ctx)
    assert f.ideal.gens == (x**2 - y**2 * z,)


def test_parse_mixed_file():
    f = parse_ideal_file("vars: t\nlogvars: u\nideal: t^2 + u")
    assert f.ctx.names == ("t", "u") and f.ctx.is_monomial(1) and not f.ctx.is_monomial(0)


def test_parse_options_and_coefficients():
    f = parse_ideal_file("vars: x y\nideal: 3/2 x y - 2 x^3; (x + y)^2 # comment\npoint: 1/2 -1\nmode: weighted")
    x, y = Polynomial.gens(f.ctx)
    assert f.ideal.gens == (Fraction(3, 2) * x * y - 2 * x**3, (x + y) ** 2)
    assert f.point == (Fraction(1, 2), Fraction(-1)) and f.mode == "weighted"


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("ideal: x^2", 1, 1),
        ("vars: x x\nideal: x", 1, 9),
        ("vars: x\nideal: x + y", 2, 12),
        ("vars: x\nideal: x + $", 2, 12),
        ("vars: x\nideal: x^", 2, 10),
        ("vars: x\nfoo: 1\nideal: x", 2, 1),
        ("vars: x y\nideal: x\npoint: 1", 3, 8),
    ],
)
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(ParseError) as err:
        parse_ideal_file(text)
    assert (err.value.line, err.value.column) == (line, column)


XY_U = VariableContext.make("xy", "u")


@given(st.lists(polys(XY_U, 4, 3).filter(bool), min_size=1, max_size=3))
def test_round_trip(gens):
    I = Ideal(XY_U, gens)
    back = parse_ideal_file(format_ideal_file(I))
    assert back.ctx == XY_U and back.ideal == I


def test_trace_json_examples():
    assert emit_trace_json([]) == '{"nodes":[]}'
    ctx = VariableContext.make("x")
    (x,) = Polynomial.gens(ctx)
    tree, trace = principalize_weighted(Ideal(ctx, [x]), max_depth=0)
    doc = json.loads(emit_trace_json(trace, tree))
    assert len(doc["nodes"]) == 1 and doc["nodes"][0]["invariant"] == ["1"]
    A4 = VariableContext.make("xyzt")
    x, y, z, t = Polynomial.gens(A4)
    tree, trace = principalize_weighted(Ideal(A4, [x**2 - y * z * t]))
    root = json.loads(emit_trace_json(trace, tree))["nodes"][0]
    assert root["invariant"] == ["2", "3", "3", "3"] and root["marker"] is None
    assert root["center"]["weights"] == [3, 2, 2, 2]
    assert set(root["flags"]) >= {"unverified_locus", "budget"}


def test_dot_examples():
    assert emit_dot(ResolutionTree("weighted")) == "digraph resolution {\n}\n"
    ctx = VariableContext.make("x")
    (x,) = Polynomial.gens(ctx)
    dot = emit_dot(principalize_weighted(Ideal(ctx, [x]))[0])
    assert dot.count("->") == 1 and 'label="x mu_1"' in dot
    TU = VariableContext.make("t", "u")
    t, u = Polynomial.gens(TU)
    dot = emit_dot(principalize_log_weighted(Ideal(TU, [t**2 + u]))[0])
    assert "N(u) mu_2" in dot


def test_snapshot_round_trip():
    TU = VariableContext.make("t", "u")
    t, u = Polynomial.gens(TU)
    tree, _ = principalize_log_weighted(Ideal(TU, [t**2 + u]))
    for n in tree.nodes:
        st_ = restore_state(snapshot_state(n.state))
        assert st_.ideal == n.ideal and st_.ideal.ctx == n.ctx


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_invariant(capsys):
    code, out, _ = run(capsys, "invariant", "--input", str(SAMPLES / "a4.ideal"))
    doc = json.loads(out)
    assert code == 0 and doc["invariant"] == ["2", "3", "3", "3"] and doc["weights"] == [3, 2, 2, 2]
    code, out, _ = run(capsys, "invariant", "--input", str(SAMPLES / "a4.ideal"), "--mode", "classical-order")
    assert code == 0 and json.loads(out) == {"order": "2"}


def test_cli_center_and_blowup(capsys):
    code, out, _ = run(capsys, "center", "--input", str(SAMPLES / "half_root.ideal"))
    assert code == 0 and json.loads(out)["center"]["multiplicities"] == ["2"]
    code, out, _ = run(capsys, "blowup", "--input", str(SAMPLES / "half_root.ideal"))
    charts = {c["chart"]: c for c in json.loads(out)["charts"]}
    assert charts["N(u)"]["stabilizer"] == 2 and charts["N(u)"]["transform"] == ["t^2 + 1"]


def test_cli_principalize_writes_files(capsys, tmp_path):
    out, dot = tmp_path / "t.json", tmp_path / "t.dot"
    code, _, err = run(capsys, "principalize", "--input", str(SAMPLES / "umbrella.ideal"), "--out", str(out), "--dot", str(dot))
    assert code == 0 and "nodes" in err
    assert json.loads(out.read_text())["nodes"][0]["invariant"] == ["2", "3", "3"]
    assert dot.read_text().startswith("digraph")


def test_cli_log_reduction_and_resolve(capsys):
    code, out, _ = run(capsys, "principalize", "--input", str(SAMPLES / "hull.ideal"))
    assert code == 0 and json.loads(out)["nodes"][0]["phase"] == "regular"
    code, out, _ = run(capsys, "resolve", "--input", str(SAMPLES / "umbrella.ideal"))
    assert code == 0


def test_cli_point_option(capsys):
    code, out, _ = run(capsys, "invariant", "--input", str(SAMPLES / "cusp_pair.ideal"), "--point", "0 0")
    assert code == 0 and json.loads(out)["integral"]


def test_cli_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.ideal"
    bad.write_text("ideal: x^2\n")
    assert run(capsys, "invariant", "--input", str(bad))[0] == 2
    assert run(capsys, "principalize", "--input", str(SAMPLES / "a4.ideal"), "--max-depth", "1")[0] == 5
    unit = tmp_path / "unit.ideal"
    unit.write_text("vars: x\nideal: 1 + x\n")
    assert run(capsys, "center", "--input", str(unit))[0] == 1


@pytest.mark.parametrize("exc, code", [(BudgetError("jets too short"), 3), (DropAssertionError("no drop", {"chart": "x"}), 4)])
def test_cli_maps_failures_to_exit_codes(capsys, monkeypatch, exc, code):
    def fail(*a, **k):
        raise exc

    monkeypatch.setattr(cli, "principalize_weighted", fail)
    got, _, err = run(capsys, "principalize", "--input", str(SAMPLES / "a4.ideal"))
    assert got == code
    if code == 4:
        assert '"chart":"x"' in err


def test_cli_output_is_deterministic(capsys):
    a = run(capsys, "principalize", "--input", str(SAMPLES / "a4.ideal"))[1]
    b = run(capsys, "principalize", "--input", str(SAMPLES / "a4.ideal"))[1]
    assert a == b
