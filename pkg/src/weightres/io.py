"""The ``.ideal`` text format, JSON traces, DOT trees and node snapshots."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Ideal, Polynomial, Role, VariableContext
from .centers import Invariant, _qstr
from .driver import NodeState, ResolutionTree, TraceEntry
from .errors import ParseError
from .monomial import MonomialIdeal

KEYS = ("vars", "logvars", "ideal", "point", "mode", "target")
MODES = ("weighted", "log-weighted", "log-reduction", "classical-order")

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*/^()]))")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*$")


@dataclass(frozen=True)
class IdealFile:
    ctx: VariableContext
    ideal: Ideal
    point: tuple[Fraction, ...] | None = None
    mode: str | None = None
    target: int | None = None


def _tokenize(text: str, line: int, col0: int) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad)
        kind = m.lastgroup
        out.append((kind, m.group(kind), col0 + m.start(kind)))
        pos = m.end()
    out.append(("end", "", col0 + len(text.rstrip())))
    return out


class _ExprParser:
    """expr := term (('+'|'-') term)*;  term := sign? factor (('*'|'/')? factor)*;
    factor := atom ('^' int)?;  atom := int | name | '(' expr ')'."""

    def __init__(self, tokens, ctx: VariableContext, line: int):
        self.toks, self.i, self.ctx, self.line = tokens, 0, ctx, line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] != "op":
            self.fail(f"expected {value!r}", tok)

    def parse(self) -> Polynomial:
        f = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return f

    def expr(self) -> Polynomial:
        f = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = self.take()[1]
            g = self.term()
            f = f + g if sign == "+" else f - g
        return f

    def term(self) -> Polynomial:
        neg = False
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            neg ^= self.take()[1] == "-"
        f = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = f * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                tok = self.take()
                if tok[0] != "num":
                    self.fail("only division by an integer literal is allowed", tok)
                if int(tok[1]) == 0:
                    self.fail("division by zero", tok)
                f = f * Fraction(1, int(tok[1]))
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                f = f * self.factor()
            else:
                break
        return -f if neg else f

    def factor(self) -> Polynomial:
        f = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a nonnegative integer", tok)
            f = f ** int(tok[1])
        return f

    def atom(self) -> Polynomial:
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return Polynomial.const(self.ctx, int(val))
        if kind == "name":
            if val not in self.ctx.names:
                self.fail(f"unknown identifier {val!r}", tok)
            return Polynomial.var(self.ctx, val)
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect(")")
            return f
        self.fail("expected a number, variable or '('" if kind != "end" else "unexpected end of expression", tok)


def parse_polynomial(text: str, ctx: VariableContext, line: int = 1, column: int = 1) -> Polynomial:
    """Parse one expression in ``ctx``.

    >>> ctx = VariableContext.make("xyz")
    >>> str(parse_polynomial("x^2 - y^2 z + 3/2*x", ctx))
    '-y^2*z + x^2 + 3/2*x'
    """
    return _ExprParser(_tokenize(text, line, column), ctx, line).parse()


def _parse_rational(word: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(word)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {word!r}", line, col) from None


def _words(text: str, col0: int):
    for m in re.finditer(r"\S+", text):
        yield m.group(), col0 + m.start()


def parse_ideal_file(text: str) -> IdealFile:
    """Parse the ``.ideal`` format.

    >>> f = parse_ideal_file("vars: t\\nlogvars: u\\nideal: t^2 + u")
    >>> f.ctx.names, str(f.ideal)
    (('t', 'u'), '(t^2 + u)')
    """
    seen: dict[str, tuple[int, int, str]] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            raise ParseError("expected 'key: value'", ln, len(body) - len(body.lstrip()) + 1)
        key, value = body.split(":", 1)
        kcol = len(key) - len(key.lstrip()) + 1
        key = key.strip()
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", ln, kcol)
        if key in seen:
            raise ParseError(f"repeated key {key!r}", ln, kcol)
        seen[key] = (ln, len(body.split(":", 1)[0]) + 2, value)

    names: list[str] = []
    roles: list[Role] = []
    for key, role in (("vars", Role.REGULAR), ("logvars", Role.MONOMIAL)):
        if key not in seen:
            continue
        ln, col, value = seen[key]
        for word, c in _words(value, col):
            if not _NAME.match(word):
                raise ParseError(f"bad variable name {word!r}", ln, c)
            if word in names:
                raise ParseError(f"duplicate variable {word!r}", ln, c)
            names.append(word)
            roles.append(role)
    if not names:
        raise ParseError("no variables declared (need a 'vars:' or 'logvars:' line)", 1, 1)
    ctx = VariableContext(tuple(names), tuple(roles))

    if "ideal" not in seen:
        raise ParseError("missing 'ideal:' line", 1, 1)
    ln, col, value = seen["ideal"]
    gens, offset = [], 0
    for piece in value.split(";"):
        if piece.strip():
            gens.append(parse_polynomial(piece, ctx, ln, col + offset))
        offset += len(piece) + 1
    if not gens:
        raise ParseError("empty ideal", ln, col)
    ideal = Ideal(ctx, gens)

    point = None
    if "point" in seen:
        ln, col, value = seen["point"]
        coords = [_parse_rational(w, ln, c) for w, c in _words(value, col)]
        if len(coords) != ctx.arity:
            start = col + len(value) - len(value.lstrip())
            raise ParseError(f"point needs {ctx.arity} coordinates, got {len(coords)}", ln, start)
        point = tuple(coords)

    mode = None
    if "mode" in seen:
        ln, col, value = seen["mode"]
        mode = value.strip()
        if mode not in MODES:
            raise ParseError(f"unknown mode {mode!r}", ln, col)

    target = None
    if "target" in seen:
        ln, col, value = seen["target"]
        if not value.strip().isdigit() or int(value) < 1:
            raise ParseError("target must be a positive integer", ln, col)
        target = int(value)
    return IdealFile(ctx, ideal, point, mode, target)


def format_ideal_file(ideal: Ideal, point: Sequence | None = None, mode: str | None = None) -> str:
    """Inverse of :func:`parse_ideal_file` for regular and monomial variables."""
    ctx = ideal.ctx
    regular = [n for n, r in zip(ctx.names, ctx.roles) if not r.is_monomial]
    monomial = [n for n, r in zip(ctx.names, ctx.roles) if r.is_monomial]
    if regular + monomial != list(ctx.names):
        raise ValueError("the text format lists regular variables before monomial ones")
    lines = []
    if regular:
        lines.append("vars: " + " ".join(regular))
    if monomial:
        lines.append("logvars: " + " ".join(monomial))
    lines.append("ideal: " + "; ".join(str(g) for g in ideal.gens))
    if point is not None:
        lines.append("point: " + " ".join(_qstr(Fraction(v)) for v in point))
    if mode:
        lines.append(f"mode: {mode}")
    return "\n".join(lines) + "\n"


# JSON traces

def invariant_json(inv: Invariant) -> tuple[list[str], str | None]:
    return [_qstr(e) for e in inv.entries], inv.trailing


def _node_json(node, entry: TraceEntry) -> dict:
    entries, marker = invariant_json(entry.invariant)
    return {
        "id": entry.node,
        "parent": entry.parent,
        "chart": entry.chart,
        "point": [_qstr(Fraction(v)) for v in node.focus] if node is not None else None,
        "ideal": [str(g) for g in node.ideal.gens] if node is not None else None,
        "invariant": entries,
        "marker": marker,
        "center": entry.center,
        "phase": node.phase if node is not None else None,
        "stabilizer": entry.stabilizer,
        "children": list(node.children) if node is not None else [],
        "flags": {
            "unverified_locus": bool(node is not None and node.flags.get("unverified_locus")),
            "budget": node.flags.get("budget") if node is not None else None,
            "unresolved": bool(node is not None and node.flags.get("unresolved")),
            "drop_violation": bool(node is not None and node.flags.get("drop_violation")),
        },
    }


def trace_document(trace: Sequence[TraceEntry], tree: ResolutionTree | None = None) -> dict:
    nodes = {n.id: n for n in tree.nodes} if tree is not None else {}
    return {"nodes": [_node_json(nodes.get(e.node), e) for e in trace]}


def emit_trace_json(trace: Sequence[TraceEntry], tree: ResolutionTree | None = None) -> str:
    """Compact JSON with sorted keys; byte-stable for equal inputs.

    >>> emit_trace_json([])
    '{"nodes":[]}'
    """
    return json.dumps(trace_document(trace, tree), sort_keys=True, separators=(",", ":"))


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def emit_dot(tree: ResolutionTree) -> str:
    """Graphviz digraph: nodes labelled by invariant and flags, edges by chart and stabilizer.

    >>> emit_dot(ResolutionTree("weighted"))
    'digraph resolution {\\n}\\n'
    """
    lines = ["digraph resolution {"]
    for n in tree.nodes:
        label = _dot_escape(str(n.invariant))
        marks = [k for k in ("unverified_locus", "unresolved", "drop_violation") if n.flags.get(k)]
        if "budget" in n.flags:
            marks.append(f"budget={n.flags['budget']}")
        if marks:
            label += "\\n" + _dot_escape(", ".join(marks))
        lines.append(f'  n{n.id} [label="{label}"];')
    for parent, child in tree.edges():
        label = f"{child.chart} mu_{child.stabilizer}"
        lines.append(f'  n{parent.id} -> n{child.id} [label="{_dot_escape(label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# node snapshots: everything a node's expansion depends on, nothing more

def _poly_json(f: Polynomial) -> list:
    return [[list(e), _qstr(c)] for e, c in f.sorted_terms()]


def _ideal_json(I: Ideal | None):
    if I is None:
        return None
    return {"generators": [_poly_json(g) for g in I.gens], "truncation": I.truncation}


def _ideal_from(data, ctx: VariableContext) -> Ideal | None:
    if data is None:
        return None
    gens = [Polynomial(ctx, {tuple(e): Fraction(c) for e, c in g}) for g in data["generators"]]
    return Ideal(ctx, gens, data["truncation"])


def snapshot_state(state: NodeState) -> str:
    """Serialize a node's state to JSON (context, ideal, strict ideal, monomial part, target)."""
    ctx = state.ideal.ctx
    N = state.monomial
    data = {
        "names": list(ctx.names),
        "roles": [r.value for r in ctx.roles],
        "root_denominators": list(ctx.root_denominators),
        "stabilizer": ctx.stabilizer,
        "ideal": _ideal_json(state.ideal),
        "strict": _ideal_json(state.strict),
        "monomial": None if N is None else {"denominator": N.denominator, "gens": [list(g) for g in N.gens], "mixed": N.mixed},
        "target": state.target,
    }
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def restore_state(text: str) -> NodeState:
    data = json.loads(text)
    ctx = VariableContext(
        tuple(data["names"]),
        tuple(Role(r) for r in data["roles"]),
        tuple(data["root_denominators"]),
        data["stabilizer"],
    )
    N = data["monomial"]
    mono = None if N is None else MonomialIdeal(ctx, N["denominator"], tuple(tuple(g) for g in N["gens"]), N["mixed"])
    return NodeState(_ideal_from(data["ideal"], ctx), _ideal_from(data["strict"], ctx), mono, data["target"])
