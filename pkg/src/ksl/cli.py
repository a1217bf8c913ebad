"""Command-line front end: ``ksl <compute|scan|graph|verify>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

from ksl.charsums import DEFAULT_TOL, bound_ledger, is_boolean, kloosterman_salem
from ksl.errors import GuardError, InvariantError, RingSpecError
from ksl.extremal import is_extremal
from ksl.ringspec import Galois, Product, Zmod, parse_ring_spec, prime_power
from ksl.rings import as_ring, size_guard, units
from ksl.sgraph import connectivity_report, format_edge_list, hyperbola_graph, spectrum
from ksl.verify import SUITES, num, run_suite

EXIT_FAIL, EXIT_PARSE, EXIT_GUARD, EXIT_INVARIANT = 1, 2, 3, 4


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _clean(obj):
    # floats -> 12 significant digits, tuples -> lists
    if isinstance(obj, float):
        return num(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def family_specs(pattern: str) -> list:
    """Expand ``fields:q<=N``, ``zmod:n<=N``, ``boolean:n<=N`` or ``list:A;B``."""
    kind, _, rest = pattern.partition(":")
    kind = kind.strip().lower()
    if kind == "list":
        return [parse_ring_spec(s) for s in rest.split(";") if s.strip()]
    m = re.fullmatch(r"\s*[a-z]\s*<=\s*(\d+)\s*", rest)
    if not m:
        raise RingSpecError(f"bad family pattern {pattern!r}", 0)
    bound = int(m.group(1))
    if kind == "fields":
        return [Galois.of_order(q) for q in range(2, bound + 1) if prime_power(q)]
    if kind == "zmod":
        return [Zmod(n) for n in range(2, bound + 1)]
    if kind == "boolean":
        return [Product((Galois(2),) * n) if n > 1 else Galois(2) for n in range(1, bound + 1)]
    raise RingSpecError(f"unknown family {kind!r}", 0)


def cmd_compute(args) -> tuple[str, int]:
    ring = as_ring(args.ring, args.guard)
    report = kloosterman_salem(ring, tolerance=args.tol, record_table=args.format == "csv",
                               jobs=args.jobs, guard=args.guard)
    if args.format == "csv":
        rows = []
        T = report.table
        for m in range(ring.size):
            for n in range(ring.size):
                z = complex(T[m, n])
                rows.append([m, n, z.real, z.imag, abs(z)])
        return dump_csv(["m", "n", "re", "im", "abs"], rows), 0
    ledger = bound_ledger(ring, report)
    out = {
        "schema": 1,
        "ring": ring.name,
        "size": ring.size,
        "units": report.unit_count,
        "C": report.C,
        "C_squared": report.C**2,
        "sqrt_units": report.sqrt_units,
        "argmax": [list(p) for p in report.argmax],
        "extremal": is_extremal(ring).extremal,
        "bounds": [
            {"name": r.name, "reference": r.reference, "inequality": r.inequality,
             "lhs": r.lhs, "rhs": r.rhs, "verdict": r.verdict}
            for r in ledger.records
        ],
    }
    return dump_json(out), 0 if ledger.passed else EXIT_INVARIANT


def cmd_scan(args) -> tuple[str, int]:
    if not args.family and not args.ring:
        raise RingSpecError("scan needs --family or --ring", 0)
    specs = family_specs(args.family) if args.family else [parse_ring_spec(args.ring)]
    rows = []
    for spec in specs:
        ring = as_ring(spec, args.guard)
        C = kloosterman_salem(ring, tolerance=args.tol, jobs=args.jobs, guard=args.guard).C
        nu = len(units(ring))
        rows.append([ring.name, ring.size, nu, C, C / math.sqrt(nu), is_extremal(ring).extremal,
                     ring.is_field, is_boolean(ring)])
    header = ["ring", "size", "units", "C", "C_over_sqrt_units", "extremal", "is_field", "is_boolean"]
    if args.format == "json":
        return dump_json({"schema": 1, "rows": [dict(zip(header, r)) for r in rows]}), 0
    rows = [[str(v).lower() if isinstance(v, bool) else v for v in r] for r in rows]
    return dump_csv(header, rows), 0


def cmd_graph(args) -> tuple[str, int]:
    ring = as_ring(args.ring, args.guard)
    g = hyperbola_graph(ring)
    if args.format == "edges":
        return format_edge_list(g), 0
    rep = spectrum(g)
    conn = connectivity_report(g, rep)
    if args.edges:
        with open(args.edges, "w") as fh:
            fh.write(format_edge_list(g))
    out = {
        "schema": 1,
        "ring": ring.name,
        "vertices": g.vertex_count,
        "degree": g.degree,
        "edges": int(len(g.edges())),
        "lambda2": rep.lambda2,
        "second_largest": rep.second_largest,
        "gap": rep.spectral_gap,
        "epsilon": rep.epsilon,
        "ramanujan": rep.ramanujan,
        "components": conn.components,
        "connected": conn.connected,
        "bipartite": conn.bipartite,
        "extremal": is_extremal(ring).extremal,
    }
    if not conn.agree:
        raise InvariantError(f"{ring.name}: spectral and traversal components disagree")
    return dump_json(out), 0


def cmd_verify(args) -> tuple[str, int]:
    if args.suite not in SUITES and args.suite != "all":
        raise KeyError(args.suite)
    results = run_suite(args.suite, seed=args.seed, jobs=args.jobs)
    ok = all(r.passed for r in results)
    for r in results:
        bad = sum(not i.verdict for i in r.instances)
        print(f"{'PASS' if r.passed else 'FAIL'} {r.suite}: {len(r.instances) - bad}/{len(r.instances)} "
              f"instances ({r.runtime:.2f}s)", file=sys.stderr)
        for i in r.instances:
            if not i.verdict:
                print(f"  FAIL {i.instance}: {i.claim}", file=sys.stderr)
    if args.format == "csv":
        rows = [[r.suite, i.instance, i.claim, i.reference, "PASS" if i.verdict else "FAIL"]
                for r in results for i in r.instances]
        text = dump_csv(["suite", "instance", "claim", "reference", "verdict"], rows)
    else:
        text = dump_json({"schema": 1, "seed": args.seed, "passed": ok,
                          "suites": [r.as_dict() for r in results]})
    return text, 0 if ok else EXIT_FAIL


COMMANDS = {"compute": cmd_compute, "scan": cmd_scan, "graph": cmd_graph, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ksl", description="Kloosterman sums and hyperbola graphs over finite rings.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("suite", nargs="?", default="all", help="verification suite (verify only)")
    p.add_argument("--ring", help='ring spec, e.g. "GF(9)", "Z/8 x GF(2)", "M2(GF(3))"')
    p.add_argument("--family", help='scan family: "fields:q<=13", "zmod:n<=32", "boolean:n<=6", "list:A;B"')
    p.add_argument("--format", choices=["json", "csv", "edges"], default=None)
    p.add_argument("--out", help="write data here instead of stdout")
    p.add_argument("--edges", help="graph: also write the edge list to this path")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--guard", type=int, default=None, help="ring size guard (default $KSL_GUARD or 4096)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "scan" else "json"
    if args.format == "edges" and args.command != "graph":
        print("ksl: --format edges only applies to graph", file=sys.stderr)
        return EXIT_PARSE
    if args.command in ("compute", "graph") and not args.ring:
        print(f"ksl: {args.command} needs --ring", file=sys.stderr)
        return EXIT_PARSE
    try:
        args.guard = size_guard(args.guard)
        text, code = COMMANDS[args.command](args)
    except RingSpecError as exc:
        print(f"ksl: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GuardError as exc:
        print(f"ksl: size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantError as exc:
        print(f"ksl: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except KeyError as exc:
        print(f"ksl: unknown suite {exc}; choose from {', '.join([*SUITES, 'all'])}", file=sys.stderr)
        return EXIT_PARSE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
