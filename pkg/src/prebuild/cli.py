"""Command line entry point: ``prebuild <command> [options]``.

Exit status: 0 success, 1 validation or other failure, 2 non-harmonizable
marking or fold-graph cycle, 3 step limit, 4 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from . import docio
from .docio import Document
from .errors import (
    CycleFound, NonHarmonizable, NotCollapsible, PrebuildError, StepLimit,
)
from .network import Budget, bps_scan, check_network, generate_network
from .reduction import check_region, collapsing_region, reduce_to_core, reduction_step
from .scaffolding import (
    assert_acyclic, build_fold_graph, find_collapsible_42, validate, validate_initial,
)
from .svg import render_svg
from .synth import FixtureSpec, synthesize_fixture

EXIT_OK, EXIT_FAIL, EXIT_HARMONIC, EXIT_STEPS, EXIT_USAGE = 0, 1, 2, 3, 4


class Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise Usage(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="prebuild", description="Reduce constructions with scaffoldings to their core.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help, needs_input=True):
        c = sub.add_parser(name, help=help)
        if needs_input:
            c.add_argument("--input", required=True, metavar="PATH")
        c.add_argument("--output", metavar="PATH")
        c.add_argument("--report", metavar="PATH", help="write a JSON report")
        return c

    cmd("validate", "check the complex and the scaffolding").add_argument(
        "--initial", action="store_true", help="also require initial post-caustics")
    cmd("classify", "type of every interior vertex")
    cmd("fold-graph", "fold graph and its acyclicity")
    cmd("find-42", "the 4_2 point the next step collapses")
    for name, help in (("region", "collapsing region at a 4_2 point"),
                       ("step", "one reduction step")):
        c = cmd(name, help)
        c.add_argument("--vertex", type=int, help="4_2 point (default: lowest collapsible)")
        c.add_argument("--svg", metavar="PATH")
    c = cmd("reduce", "reduce to the core")
    c.add_argument("--max-steps", type=int)
    c.add_argument("--svg", metavar="PATH")
    for name, help in (("trace", "generate the refracting spectral network"),
                       ("bps-check", "scan the network for BPS states")):
        c = cmd(name, help)
        c.add_argument("--budget-segments", type=int, default=Budget().max_segments)
        c.add_argument("--budget-length", type=Fraction, default=Budget().max_length)
        c.add_argument("--budget-generation", type=int, default=Budget().max_generation)
        c.add_argument("--svg", metavar="PATH")
        c.add_argument("--strict", action="store_true", help="an inconclusive scan fails")
    c = cmd("synth", "synthesize a fixture with one post-caustic", needs_input=False)
    c.add_argument("--pattern", required=True, help="e.g. 8_1,4_2,8_1")
    c.add_argument("--lengths", required=True, help="e.g. 1,1")
    c.add_argument("--padding", type=Fraction, default=Fraction(2))
    c.add_argument("--svg", metavar="PATH")
    c = cmd("render", "draw a document as SVG")
    c.add_argument("--svg", metavar="PATH")
    c.add_argument("--no-network", action="store_true")
    return p


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _svg(args, doc: Document):
    if getattr(args, "svg", None):
        _write(args.svg, render_svg(doc.complex, doc.scaffolding, doc.network))


def _budget(args) -> Budget:
    return Budget(args.budget_segments, args.budget_length, args.budget_generation)


def _target(args, Z, S) -> int:
    if args.vertex is not None:
        return args.vertex
    a = find_collapsible_42(Z, S)
    if a is None:
        raise NotCollapsible("the scaffolding is empty")
    return a


def run(args) -> tuple:
    """Execute one command; returns (exit status, result for the report)."""
    if args.command == "synth":
        spec = FixtureSpec([x.strip() for x in args.pattern.split(",")],
                           [Fraction(x) for x in args.lengths.split(",")], args.padding)
        fx = synthesize_fixture(spec)
        doc = Document(fx.complex, fx.scaffolding, extra={"chain": fx.chain})
        _write(args.output, docio.serialize(doc))
        _svg(args, doc)
        return EXIT_OK, {"chain": fx.chain}

    doc = docio.load(args.input)
    Z, S = doc.complex, doc.scaffolding
    out = args.output

    if args.command == "validate":
        rep = validate(Z, S)
        result = rep.as_dict()
        status = EXIT_OK if rep.ok else EXIT_FAIL
        if rep.ok and args.initial:
            chains = validate_initial(Z, S, rep)
            result["post_caustics"] = [{"vertices": list(c.vertices), "kinds": list(c.kinds),
                                        "counts": list(c.counts)} for c in chains]
        _write(out, _dump(result))
        return status, result
    if args.command == "classify":
        rep = validate(Z, S)
        result = {"types": {str(v): t.kind for v, t in sorted(rep.types.items())},
                  "errors": rep.as_dict().get("errors", [])}
        _write(out, _dump(result))
        return (EXIT_OK if rep.ok else EXIT_FAIL), result
    if args.command == "fold-graph":
        G = build_fold_graph(Z, S)
        result = {"nodes": [list(x) for x in G.nodes],
                  "arcs": [{"tail": list(a.tail), "head": list(a.head),
                            "edges": [list(e) for e in a.edges]} for a in G.arcs]}
        result["order"] = [list(x) for x in assert_acyclic(G)]
        _write(out, _dump(result))
        return EXIT_OK, result
    if args.command == "find-42":
        result = {"vertex": find_collapsible_42(Z, S)}
        _write(out, _dump(result))
        return EXIT_OK, result
    if args.command == "region":
        CR = collapsing_region(Z, S, _target(args, Z, S))
        rep = check_region(CR)
        result = {"region": CR.as_dict(), "checks": rep.as_dict()}
        _write(out, _dump(result))
        return (EXIT_OK if rep.ok else EXIT_FAIL), result
    if args.command == "step":
        a = _target(args, Z, S)
        Zn, Sn, rep = reduction_step(Z, S, a)
        steps = (doc.steps or []) + [{"index": len(doc.steps or []), "a": a, "report": rep.as_dict()}]
        new = Document(Zn, Sn, None, steps)
        _write(out, docio.serialize(new))
        _svg(args, new)
        return EXIT_OK, {"a": a, "removed": rep.removed}
    if args.command == "reduce":
        try:
            res = reduce_to_core(Z, S, max_steps=args.max_steps)
        except StepLimit as e:
            part = e.data["result"]
            new = Document(part.complex, part.scaffolding, None, [s.as_dict() for s in part.steps])
            _write(out, docio.serialize(new))
            _svg(args, new)
            raise
        new = Document(res.complex, res.scaffolding, None, [s.as_dict() for s in res.steps])
        _write(out, docio.serialize(new))
        _svg(args, new)
        return EXIT_OK, {"steps": len(res.steps), "core": res.is_core}
    if args.command in ("trace", "bps-check"):
        G = generate_network(Z, S, _budget(args))
        bad = check_network(Z, S, G)
        new = Document(Z, S, G.as_dict(), doc.steps)
        _svg(args, new)
        if args.command == "trace":
            _write(out, docio.serialize(new))
            result = {"arcs": len(G.arcs), "collisions": len(G.collisions),
                      "refractions": len(G.refractions), "exhausted": G.exhausted,
                      "violations": bad}
            status = EXIT_OK if not bad and not (args.strict and G.exhausted) else EXIT_FAIL
            return status, result
        scan = bps_scan(G)
        result = dict(scan.as_dict(), violations=bad)
        _write(out, _dump(result))
        failed = bad or scan.witness is not None or (args.strict and scan.inconclusive)
        if scan.inconclusive:
            print("warning: network budget exhausted, the scan is inconclusive", file=sys.stderr)
        return (EXIT_FAIL if failed else EXIT_OK), result
    if args.command == "render":
        net = None if args.no_network else doc.network
        _write(args.svg or out, render_svg(Z, S, net))
        return EXIT_OK, {}
    raise Usage("unknown command %s" % args.command)


def _status_for(e: Exception) -> int:
    if isinstance(e, (NonHarmonizable, CycleFound)):
        return EXIT_HARMONIC
    if isinstance(e, StepLimit):
        return EXIT_STEPS
    return EXIT_FAIL


def main(argv=None) -> int:
    report_path = None
    try:
        args = _parser().parse_args(argv)
        report_path = args.report
        status, result = run(args)
        report = {"command": args.command, "exit": status, "result": result}
    except Usage as e:
        print("usage error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except PrebuildError as e:
        status = _status_for(e)
        print("%s: %s" % (e.name, e), file=sys.stderr)
        err = {"name": e.name, "message": str(e), "cell": _plain(e.cell)}
        if isinstance(e, CycleFound):
            err["witness"] = [{"tail": list(a.tail), "head": list(a.head)} for a in e.data["witness"]]
        report = {"command": args.command, "exit": status, "error": err}
    if report_path:
        _write(report_path, _dump(report))
    return status


def _plain(x):
    if isinstance(x, tuple):
        return [_plain(y) for y in x]
    if isinstance(x, (int, str)) or x is None:
        return x
    return str(x)


if __name__ == "__main__":
    sys.exit(main())
