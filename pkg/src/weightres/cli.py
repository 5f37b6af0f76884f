"""Command-line front end: ``weightres {invariant,center,blowup,principalize,resolve}``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebra import JetBudget
from .blowup import controlled_transform, weighted_blowup_charts
from .centers import center_for_mode, integrality_check
from .diffcalc import order_at_origin
from .driver import (
    PointFinderConfig,
    log_order_reduction,
    principalize_log_weighted,
    principalize_weighted,
    recenter,
    resolve_nonembedded,
)
from .errors import BudgetError, DropAssertionError, ParseError, WeightresError
from .io import MODES, emit_dot, emit_trace_json, invariant_json, parse_ideal_file

EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_BUDGET, EXIT_DROP, EXIT_DEPTH = 0, 1, 2, 3, 4, 5


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, help="default: log-weighted if the input declares logvars, else weighted")
    common.add_argument("--input", required=True, metavar="FILE", help="ideal file ('-' for stdin)")
    common.add_argument("--out", metavar="FILE", help="write JSON here instead of stdout")
    common.add_argument("--dot", metavar="FILE", help="write a Graphviz tree here")
    common.add_argument("--max-depth", type=int, default=12, metavar="N")
    common.add_argument("--truncation", type=int, default=16, metavar="D", help="initial jet degree for series contacts")
    common.add_argument("--search-num", type=int, default=2, metavar="B")
    common.add_argument("--search-den", type=int, default=2, metavar="D")
    common.add_argument("--point", metavar='"a b c"', help="focus point, one rational per variable")
    common.add_argument("--assert-drop", choices=("on", "off"), default="on")
    common.add_argument("--target", type=int, metavar="D", help="log order to reduce below (log-reduction)")

    p = argparse.ArgumentParser(prog="weightres", description="Weighted and logarithmic resolution by exact computation.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (
        ("invariant", "invariant at the focus point"),
        ("center", "center at the focus point"),
        ("blowup", "charts and controlled transforms of one blowup"),
        ("principalize", "principalization tree"),
        ("resolve", "non-embedded resolution tree"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return p


def _load(args):
    text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
    source = parse_ideal_file(text)
    mode = args.mode or source.mode or ("log-weighted" if source.ctx.monomial_indices() else "weighted")
    point = source.point
    if args.point is not None:
        words = args.point.split()
        try:
            point = tuple(Fraction(w) for w in words)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad point {args.point!r}", 0, 0) from None
        if len(point) != source.ctx.arity:
            raise ParseError(f"point needs {source.ctx.arity} coordinates", 0, 0)
    ideal = source.ideal
    if point is not None:
        ideal = recenter(ideal, point, mode != "weighted" and mode != "classical-order")
    return source, mode, ideal


def _budget(args) -> JetBudget:
    return JetBudget(args.truncation, 2, max(128, args.truncation))


def _write(path, text):
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _cmd_invariant(args, mode, ideal):
    if mode == "classical-order":
        d = order_at_origin(ideal)
        return {"order": "inf" if d == float("inf") else str(d)}
    inv, c = center_for_mode(ideal, "log-weighted" if mode == "log-reduction" else mode, _budget(args))
    entries, marker = invariant_json(inv)
    return {
        "invariant": entries,
        "marker": marker,
        "text": str(inv),
        "weights": list(c.weights) if c is not None else [],
        "integral": integrality_check(inv),
    }


def _center(args, mode, ideal):
    if mode == "classical-order":
        raise WeightresError("classical-order only supports the invariant command")
    _, c = center_for_mode(ideal, "log-weighted" if mode == "log-reduction" else mode, _budget(args))
    if c is None:
        raise WeightresError(f"no center: {ideal} is the unit or zero ideal at the focus")
    return c


def _cmd_center(args, mode, ideal):
    c = _center(args, mode, ideal)
    return {"center": c.summary(), "text": c.describe(), "invariant": invariant_json(c.invariant)[0]}


def _cmd_blowup(args, mode, ideal):
    c = _center(args, mode, ideal)
    rec = weighted_blowup_charts(c)
    charts = []
    for ch in rec.charts:
        charts.append({
            "chart": ch.label,
            "variables": list(ch.child.names),
            "substitution": {n: str(g) for n, g in zip(ch.parent.names, ch.substitution.images)},
            "stabilizer": ch.stabilizer,
            "exceptional": [[n, k] for n, k in ch.exceptional],
            "transform": [str(g) for g in controlled_transform(ideal, ch).gens],
        })
    return {"center": c.summary(), "text": c.describe(), "charts": charts}


def _tree(args, mode, ideal, source):
    cfg = PointFinderConfig(args.search_num, args.search_den)
    kw = dict(cfg=cfg, budget=_budget(args), assert_drop=args.assert_drop == "on")
    if args.command == "resolve":
        if mode not in ("weighted", "classical-order"):
            raise WeightresError("resolve runs in classical mode only")
        return resolve_nonembedded(ideal, max_depth=args.max_depth, **kw)
    if mode == "weighted":
        return principalize_weighted(ideal, max_depth=args.max_depth, **kw)
    if mode == "log-weighted":
        return principalize_log_weighted(ideal, max_depth=args.max_depth, **kw)
    if mode == "log-reduction":
        target = args.target or source.target or 1
        return log_order_reduction(ideal, target, max_steps=args.max_depth, **kw)
    raise WeightresError("classical-order only supports the invariant command")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        source, mode, ideal = _load(args)
        if args.command in ("principalize", "resolve"):
            tree, trace = _tree(args, mode, ideal, source)
            _write(args.out, emit_trace_json(trace, tree))
            if args.dot:
                with open(args.dot, "w", encoding="utf-8") as fh:
                    fh.write(emit_dot(tree))
            summary = f"{len(tree.nodes)} nodes, {len(tree.leaves())} leaves, {tree.unverified_count()} with unverified locus"
            print(summary, file=sys.stderr)
            if tree.depth_exceeded:
                print(f"error: max depth {args.max_depth} reached with unresolved leaves", file=sys.stderr)
                return EXIT_DEPTH
            return EXIT_OK
        handler = {"invariant": _cmd_invariant, "center": _cmd_center, "blowup": _cmd_blowup}[args.command]
        _write(args.out, _dump(handler(args, mode, ideal)))
        return EXIT_OK
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetError as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except DropAssertionError as e:
        print(f"invariant did not drop: {e}", file=sys.stderr)
        print(_dump(e.reproducer), file=sys.stderr)
        return EXIT_DROP
    except (WeightresError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
