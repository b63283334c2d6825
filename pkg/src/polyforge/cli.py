"""Command-line driver: ``polyforge verify | sweep | graph | show``.

Exit codes: 0 all checks pass, 1 a verdict failed, 2 a resource cap was
hit, 3 usage error (bad arguments, unknown family, violated hypotheses).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from . import __version__
from .cpr import CPR_FAMILIES, build_cpr, certify, export_dot, to_graph
from .errors import ConstraintViolation, PolyforgeError, ResourceLimitError, UnsupportedFamilyError
from .families import G_MIN_N, FamilyId, build
from .fp import MAX_COSETS_ENV
from .verify import ENGINES, verify_family, verify_with_bracket_fallback

EXIT_OK, EXIT_VERDICT, EXIT_RESOURCE, EXIT_USAGE = 0, 1, 2, 3
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _range(text):
    """``A..B`` or a single integer."""
    lo, sep, hi = text.partition("..")
    try:
        lo = int(lo)
        hi = int(hi) if sep else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or an integer, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _families(text):
    """``G1..G8``, ``G1,G3,H`` or a single tag."""
    tags = []
    for part in text.split(","):
        part = part.strip()
        lo, sep, hi = part.partition("..")
        if sep:
            if lo[:1] != hi[:1] or not lo[1:].isdigit() or not hi[1:].isdigit():
                raise argparse.ArgumentTypeError(f"bad family range {part!r}")
            tags += [f"{lo[0]}{i}" for i in range(int(lo[1:]), int(hi[1:]) + 1)]
        else:
            tags.append(part)
    for tag in tags:
        try:
            FamilyId.parse(tag if tag in ("L1", "S8a", "S8b", "S9a", "S9b") else tag + ":")
        except UnsupportedFamilyError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        except ValueError:
            pass
    return tags


def build_parser():
    parser = _Parser(prog="polyforge", description="Verify rank-three string C-groups of 2-power order.")
    parser.add_argument("--version", action="version", version=f"polyforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--engine", choices=ENGINES, help="default: both for n <= 12, perm above")
        p.add_argument("--max-cosets", type=int, metavar="N", help=f"coset cap (env {MAX_COSETS_ENV})")
        p.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
        p.add_argument("--deterministic", action="store_true", help="omit timestamp and timings")

    v = sub.add_parser("verify", help="check one family instance")
    v.add_argument("spec", help='family id, e.g. "G1:n=10", "H:n=12,s=3,t=4", "M2:b=3", "S9b"')
    common(v)

    s = sub.add_parser("sweep", help="check every admissible instance in a parameter range")
    s.add_argument("--family", type=_families, required=True, help='e.g. "H", "G1..G8", "L2,L3"')
    s.add_argument("--n", type=_range, help="n range for H and G families, A..B")
    s.add_argument("--s", type=_range, help="s range for H (default: all admissible)")
    s.add_argument("--t", type=_range, help="t range for H, L2, L3")
    s.add_argument("--b", type=_range, help="b range for M1, M2")
    s.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    common(s)

    g = sub.add_parser("graph", help="write the permutation representation graph as DOT")
    g.add_argument("spec", help=f"one of {', '.join(CPR_FAMILIES)} with n, e.g. G1:n=7")
    g.add_argument("-o", "--output", required=True, metavar="PATH")
    g.add_argument("--json", metavar="PATH", help="write the certificate as JSON")

    p = sub.add_parser("show", help="print a family presentation in text format")
    p.add_argument("spec")
    return parser


# ---------------------------------------------------------------------------


def _run_task(args):
    spec, engine, max_cosets, timings = args
    try:
        if spec == "S9b":
            return verify_with_bracket_fallback(engine, max_cosets, timings)
        return verify_family(spec, engine, max_cosets, timings=timings)
    except ResourceLimitError as exc:
        return {"family": spec, "passed": False, "error": {"kind": "resource", "message": str(exc),
                                                          "cap": exc.cap, **exc.diagnostics}}


def _sweep_specs(args):
    specs = []
    for tag in args.family:
        if tag == "H":
            if args.n is None:
                raise UsageError("sweep over H needs --n")
            for n in args.n:
                for s in args.s or range(2, n):
                    for t in args.t or range(2, n):
                        if s >= 2 and t >= 2 and s + t <= n - 1 and n >= 10:
                            specs.append(f"H:n={n},s={s},t={t}")
        elif tag[0] == "G":
            if args.n is None:
                raise UsageError(f"sweep over {tag} needs --n")
            specs += [f"{tag}:n={n}" for n in args.n if n >= G_MIN_N[int(tag[1:])]]
        elif tag in ("L2", "L3"):
            if args.t is None:
                raise UsageError(f"sweep over {tag} needs --t")
            specs += [f"{tag}:t={t}" for t in args.t if t >= 1]
        elif tag in ("M1", "M2"):
            if args.b is None:
                raise UsageError(f"sweep over {tag} needs --b")
            specs += [f"{tag}:b={b}" for b in args.b if b >= 1]
        else:
            specs.append(tag)
    return specs


def _report(command, records, deterministic):
    report = {
        "schema": SCHEMA_VERSION,
        "tool": "polyforge",
        "version": __version__,
        "command": command,
    }
    if not deterministic:
        report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    report["records"] = records
    report["summary"] = {
        "tasks": len(records),
        "passed": sum(1 for r in records if r.get("passed")),
        "failed": sum(1 for r in records if not r.get("passed")),
        "resource_errors": sum(1 for r in records if "error" in r),
    }
    return report


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _summary_line(rec):
    if "error" in rec:
        return f"{rec['family']}: RESOURCE {rec['error']['message']}"
    parts = [rec["family"]]
    for eng in ("fp", "perm"):
        if eng in rec:
            t = rec[eng]["type"]
            parts.append(f"{eng}: order {rec[eng]['order']} type {{{t[0]},{t[1]}}}")
    parts.append(f"IP {'yes' if rec['intersection_property'] else 'no'}")
    if rec.get("degenerate"):
        parts.append("degenerate")
    failed = [k for k, v in rec["verdicts"].items() if v != "pass"]
    parts.append("PASS" if rec["passed"] else "FAIL " + ",".join(failed))
    return "  ".join(parts)


def _exit_code(records):
    if any("error" in r for r in records):
        return EXIT_RESOURCE
    if not all(r.get("passed") for r in records):
        return EXIT_VERDICT
    return EXIT_OK


def _apply_max_cosets(args):
    if getattr(args, "max_cosets", None) is not None and args.max_cosets <= 0:
        raise UsageError("--max-cosets must be positive")


def cmd_verify(args):
    _apply_max_cosets(args)
    fid = FamilyId.parse(args.spec)
    build(fid)  # surface hypothesis violations as usage errors before any work
    rec = _run_task((str(fid), args.engine, args.max_cosets, not args.deterministic))
    print(_summary_line(rec))
    if args.json:
        _write_json(args.json, _report(["verify", str(fid)], [rec], args.deterministic))
    return _exit_code([rec])


def cmd_sweep(args):
    _apply_max_cosets(args)
    specs = _sweep_specs(args)
    if not specs:
        raise UsageError("the requested ranges contain no admissible instance")
    tasks = [(spec, args.engine, args.max_cosets, not args.deterministic) for spec in specs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    for rec in records:
        print(_summary_line(rec))
    report = _report(["sweep", *sys_argv_tail(args)], records, args.deterministic)
    s = report["summary"]
    print(f"{s['passed']}/{s['tasks']} passed")
    if args.json:
        _write_json(args.json, report)
    return _exit_code(records)


def sys_argv_tail(args):
    out = ["--family", ",".join(args.family)]
    for name in ("n", "s", "t", "b"):
        r = getattr(args, name)
        if r is not None:
            out += [f"--{name}", f"{r.start}..{r.stop - 1}"]
    return out


def cmd_graph(args):
    fid = FamilyId.parse(args.spec)
    if fid.tag not in CPR_FAMILIES:
        raise UnsupportedFamilyError(f"no permutation representation graph for {fid.tag}; "
                                     f"available: {', '.join(CPR_FAMILIES)}")
    triple = build_cpr(fid.tag, fid.kwargs["n"])
    graph = to_graph(triple)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(export_dot(graph, name=f"{fid.tag}_n{fid.kwargs['n']}"))
    cert = certify(triple)
    typ = cert.schlafli_type or ["?", "?"]
    print(f"{fid}: {graph.nvertices} vertices, {len(graph.edges)} edges -> {args.output}")
    print(f"  relations {cert.relations}  transitive {cert.transitive}  stabilizer {cert.stabilizer_order}  "
          f"order {cert.order}  type {{{typ[0]},{typ[1]}}}  IP {cert.intersection_property}  "
          f"{'PASS' if cert.passed else 'FAIL'}")
    for note in cert.notes:
        print(f"  note: {note}")
    if args.json:
        _write_json(args.json, {"schema": SCHEMA_VERSION, "tool": "polyforge", "version": __version__,
                                "certificate": cert.to_json()})
    return EXIT_OK if cert.passed else EXIT_VERDICT


def cmd_show(args):
    sys.stdout.write(build(FamilyId.parse(args.spec)).to_text())
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "graph": cmd_graph, "show": cmd_show}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if os.environ.get(MAX_COSETS_ENV):
            from .fp import default_max_cosets

            default_max_cosets()  # validate early
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"polyforge: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ConstraintViolation, UnsupportedFamilyError) as exc:
        print(f"polyforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolyforgeError, ValueError) as exc:
        print(f"polyforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
