"""Verification of a single family instance, shared by the CLI and the test suites."""

from __future__ import annotations

import time

from .cpr import CPR_FAMILIES, CPR_FLOORS, build_cpr
from .families import FamilyId, build, expectation, faithful_perm_triple
from .fp import element_order, fp_group_order, parse_relator
from .sggi import (
    check_intersection_property,
    generating_rank_mod2,
    is_degenerate,
    make_sggi,
    schlafli_type,
)

ENGINES = ("fp", "perm", "both")
# above this n the regular representation makes the fp -> perm cross-check slow
BOTH_ENGINES_MAX_N = 12


def default_engine(fid: FamilyId):
    n = fid.kwargs.get("n")
    return "perm" if n is not None and n > BOTH_ENGINES_MAX_N else "both"


def perm_triple(fid: FamilyId, presentation=None, order=None, max_cosets=None):
    """Permutation triple for ``fid`` and a label saying where it came from."""
    n = fid.kwargs.get("n")
    if fid.tag in CPR_FAMILIES and n is not None and n >= CPR_FLOORS[fid.tag]:
        t = build_cpr(fid.tag, n)
        return make_sggi(t.generators), "cpr", list(t.notes)
    if presentation is None:
        presentation = build(fid)
    triple = faithful_perm_triple(presentation, order, max_cosets)
    return triple, f"cosets (degree {triple.degree})", []


def _verdict(ok):
    return "pass" if ok else "fail"


def verify_family(fid, engine=None, max_cosets=None, build_options=None, timings=True):
    """Order, type, intersection property and listed element orders of one instance.

    Returns a JSON-ready record; ``record["passed"]`` is the overall verdict.
    Resource errors propagate to the caller.
    """
    if isinstance(fid, str):
        fid = FamilyId.parse(fid)
    engine = engine or default_engine(fid)
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    build_options = dict(build_options or {})
    pres = build(fid, **build_options)
    exp = expectation(fid)
    record = {
        "family": str(fid),
        "tag": fid.tag,
        "params": fid.kwargs,
        "engine": engine,
        "expected": {
            "order": exp.order,
            "type": exp.schlafli.as_list(),
            "string_c_group": exp.string_c_group,
            "element_orders": dict(exp.element_orders),
            "source": exp.source,
        },
        "notes": [],
    }
    if build_options:
        record["build_options"] = build_options
    clock = {}
    verdicts = {}
    words = {text: parse_relator(text, 3) for text, _ in exp.element_orders}
    fp_order = None

    if engine in ("fp", "both"):
        start = time.perf_counter()
        fp_order = fp_group_order(pres, max_cosets)
        fp_type = [element_order(pres, parse_relator(w, 3), fp_order, max_cosets) for w in ("r0*r1", "r1*r2")]
        fp_elems = {text: element_order(pres, w, fp_order, max_cosets) for text, w in words.items()}
        clock["fp"] = time.perf_counter() - start
        record["fp"] = {"order": fp_order, "type": fp_type, "element_orders": fp_elems}

    start = time.perf_counter()
    triple, source, notes = perm_triple(fid, pres, fp_order, max_cosets)
    record["notes"].extend(notes)
    perm_order = triple.order()
    perm_type = schlafli_type(triple).as_list()
    perm_elems = {text: w.evaluate(triple.generators).order() for text, w in words.items()}
    clock["perm"] = time.perf_counter() - start
    if engine in ("perm", "both"):
        record["perm"] = {
            "order": perm_order,
            "type": perm_type,
            "element_orders": perm_elems,
            "degree": triple.degree,
            "representation": source,
        }

    start = time.perf_counter()
    record["intersection_property"] = check_intersection_property(triple)
    record["rank"] = generating_rank_mod2(triple.group) if perm_order & (perm_order - 1) == 0 else None
    record["degenerate"] = is_degenerate(triple)
    clock["intersection"] = time.perf_counter() - start

    for name in ("fp", "perm"):
        if name in record:
            r = record[name]
            verdicts[f"{name}_order"] = _verdict(r["order"] == exp.order)
            verdicts[f"{name}_type"] = _verdict(r["type"] == exp.schlafli.as_list())
            if words:
                verdicts[f"{name}_element_orders"] = _verdict(r["element_orders"] == dict(exp.element_orders))
    if engine == "both":
        verdicts["cross_engine"] = _verdict(
            record["fp"]["order"] == record["perm"]["order"] and record["fp"]["type"] == record["perm"]["type"]
        )
    verdicts["intersection_property"] = _verdict(record["intersection_property"] == exp.string_c_group)
    record["verdicts"] = verdicts
    record["passed"] = all(v == "pass" for v in verdicts.values())
    if timings:
        record["timings"] = {k: round(v, 4) for k, v in clock.items()}
    return record


def verify_with_bracket_fallback(engine=None, max_cosets=None, timings=True):
    """S9b with the left-normed bracket, retrying right-normed if that fails."""
    first = verify_family("S9b", engine, max_cosets, {"bracket": "left"}, timings)
    attempts = [{"bracket": "left", "passed": first["passed"]}]
    chosen = first
    if not first["passed"]:
        second = verify_family("S9b", engine, max_cosets, {"bracket": "right"}, timings)
        attempts.append({"bracket": "right", "passed": second["passed"]})
        chosen = second
    chosen["bracket_attempts"] = attempts
    chosen["notes"].append(f"bracket convention used: {attempts[-1]['bracket']}-normed")
    return chosen
