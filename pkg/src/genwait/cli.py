"""Command line interface.

Exit codes: 0 all requested checks passed, 1 a check failed, 2 input/parse
problems, 3 a resource cap refused the computation.  All reports are JSON
(schema "genwait/1") or CSV; rationals are emitted exactly as numerator and
denominator strings, never as floats.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from fractions import Fraction

from . import constructions as cx
from . import corpus as corpus_mod
from . import crowns
from .config import Caps, caps_from_env
from .errors import (CapExceeded, CheckFailed, ParseError, PrecisionExhausted,
                     ValidationError)
from .genstats import (frattini_criterion, generation_report, min_generators,
                       singleton_gap, strong_scan, theorem_bounds)
from .lattice import enumerate_subgroups
from .montecarlo import estimate_expectation
from .perms import FiniteGroup, Permutation, cycle_string, generate_group, parse_cycles

SCHEMA = "genwait/1"


def _frac(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _caps_from_args(args) -> Caps:
    caps = caps_from_env()
    overrides = {}
    for item in args.cap or []:
        name, _, raw = item.partition("=")
        if not raw:
            raise ParseError(f"--cap wants NAME=INTEGER, got {item!r}")
        if name not in {f.name for f in dataclasses.fields(Caps)}:
            raise ParseError(f"unknown cap {name!r}")
        try:
            overrides[name] = int(raw)
        except ValueError:
            raise ParseError(f"cap {name} wants an integer, got {raw!r}") from None
    return dataclasses.replace(caps, **overrides) if overrides else caps


def load_group(source: str, caps: Caps) -> FiniteGroup:
    """builtin:<builder spec> or a path to a group file written by construct."""
    if source.startswith("builtin:"):
        return cx.build(source[len("builtin:"):], caps=caps)
    try:
        with open(source) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read group file {source}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"group file {source} is not valid JSON: {exc}") from None
    if data.get("kind") != "group":
        raise ParseError(f"{source} is not a group file")
    degree = int(data["degree"])
    gens = [parse_cycles(text, degree) for text in data["generators"]]
    return generate_group(gens, name=data.get("name"), caps=caps)


def _parse_subset(text: str | None, G: FiniteGroup) -> list:
    if not text:
        return []
    return [parse_cycles(part.strip(), G.degree)
            for part in text.split(";") if part.strip()]


def _emit(payload: dict, rows: list[dict] | None, fmt: str) -> None:
    if fmt == "csv":
        if not rows:
            rows = [payload]
        writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    else:
        json.dump(payload, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")


def _group_block(G: FiniteGroup) -> dict:
    return {"name": G.name, "order": G.order, "degree": G.degree}


# -- subcommands ---------------------------------------------------------------

def cmd_info(args) -> int:
    caps = _caps_from_args(args)
    G = load_group(args.group, caps)
    d = None
    note = None
    try:
        d = min_generators(enumerate_subgroups(G, caps=caps))
    except CapExceeded:
        note = "subgroup lattice above cap; d(G) omitted"
    payload = {"schema": SCHEMA, "kind": "info", "group": _group_block(G),
               "class_count": len(G.conjugacy_classes), "d": d}
    if note:
        payload["note"] = note
    _emit(payload, None, args.format)
    return 0


def cmd_lattice(args) -> int:
    caps = _caps_from_args(args)
    G = load_group(args.group, caps)
    L = enumerate_subgroups(G, caps=caps)
    orders: dict[int, int] = {}
    for r in L.subgroups:
        orders[r.order] = orders.get(r.order, 0) + 1
    mob = L.mobius
    payload = {
        "schema": SCHEMA, "kind": "lattice", "group": _group_block(G),
        "subgroup_count": len(L.subgroups),
        "maximal_count": int(L.maximal_flags.sum()),
        "frattini_order": L.subgroups[L.frattini_index()].order,
        "mobius": {"nonzero": sum(1 for m in mob if m),
                   "min": min(mob), "max": max(mob)},
        "subgroups_by_order": {str(k): orders[k] for k in sorted(orders)},
    }
    rows = [{"order": k, "count": orders[k]} for k in sorted(orders)]
    _emit(payload, rows, args.format)
    return 0


def cmd_estats(args) -> int:
    caps = _caps_from_args(args)
    G = load_group(args.group, caps)
    L = enumerate_subgroups(G, caps=caps)
    y = _parse_subset(args.subset, G)
    rep = generation_report(L, y, depth=args.depth, caps=caps)
    payload = {
        "schema": SCHEMA, "kind": "estats", "group": _group_block(G),
        "y": [cycle_string(p) for p in y],
        "closure_order": rep.closure_order,
        "e": _frac(rep.e),
        "p_table": [{"n": n, **_frac(p)} for n, p in sorted(rep.p_table.items())],
        "m_table": {str(k): v for k, v in sorted(rep.m_table.items())},
        "M": {"ceil": rep.growth.ceil, "value": rep.growth.value_str},
        "bounds": {"lower": rep.bounds.lower, "upper": rep.bounds.upper,
                   "e": _frac(rep.bounds.e), "ok": rep.bounds.ok},
    }
    if not rep.m_table:
        payload["note"] = "Y generates G"
    rows = [{"group": G.name, "order": G.order,
             "y": ";".join(cycle_string(p) for p in y) or "()",
             "e": _frac_str(rep.e), "M_ceil": rep.growth.ceil,
             "bounds_ok": rep.bounds.ok}]
    _emit(payload, rows, args.format)
    return 0 if rep.bounds.ok else 1


def cmd_scan(args) -> int:
    caps = _caps_from_args(args)
    G = load_group(args.group, caps)
    L = enumerate_subgroups(G, caps=caps)
    rows = strong_scan(L)
    criterion = frattini_criterion(L)
    payload = {
        "schema": SCHEMA, "kind": "scan", "group": _group_block(G),
        "frattini_criterion": criterion,
        "rows": [{
            "rep": r.rep_cycles, "class_size": r.class_size,
            "element_order": r.element_order, "e_g": _frac(r.e_g),
            "gap": _frac(r.gap), "in_frattini": r.in_frattini,
            "gap_zero": r.gap_zero} for r in rows],
    }
    csv_rows = [{
        "rep": r.rep_cycles, "class_size": r.class_size,
        "element_order": r.element_order, "e_g": _frac_str(r.e_g),
        "gap": _frac_str(r.gap), "in_frattini": r.in_frattini,
        "gap_zero": r.gap_zero} for r in rows]
    _emit(payload, csv_rows, args.format)
    return 0 if criterion else 1


def cmd_mc(args) -> int:
    caps = _caps_from_args(args)
    G = load_group(args.group, caps)
    y = _parse_subset(args.subset, G)
    est = estimate_expectation(G, y, samples=args.samples, seed=args.seed,
                               workers=args.workers, caps=caps)
    payload = {"schema": SCHEMA, "kind": "mc", "group": _group_block(G),
               "y": [cycle_string(p) for p in y],
               "estimate": est.to_json()}
    status = 0
    try:
        L = enumerate_subgroups(G, caps=caps)
        from .genstats import expected_waiting
        exact = expected_waiting(L, y)
        z = abs(float(est.mean - exact)) / est.standard_error if est.standard_error else 0.0
        payload["exact"] = _frac(exact)
        payload["z"] = f"{z:.3f}"
        if z > 3.0:
            status = 1
    except CapExceeded:
        payload["exact"] = None
        payload["note"] = "lattice above cap; no exact value"
    rows = [{"group": G.name, "samples": est.sample_count,
             "mean": str(est.mean), "stderr": est.standard_error,
             "exact": payload.get("exact") and _frac_str(Fraction(
                 int(payload["exact"]["num"]), int(payload["exact"]["den"]))),
             "z": payload.get("z")}]
    _emit(payload, rows, args.format)
    return status


def cmd_crowns(args) -> int:
    caps = _caps_from_args(args)
    G = load_group(args.group, caps)
    L = enumerate_subgroups(G, caps=caps)
    decomp = crowns.chief_classify(L, caps=caps)
    classes, residue = decomp
    payload = {
        "schema": SCHEMA, "kind": "crowns", "group": _group_block(G),
        "classes": [{
            "v_order": c.v_order, "prime": c.module.prime, "dim": c.module.dim,
            "q": c.q, "r": c.r, "theta": c.theta, "delta": c.delta,
            "maximal_count": len(c.maximals),
            "centralizer_order": len(c.C), "base_order": len(c.R),
            "formula_check": c.count_ok} for c in classes],
        "residue_count": len(residue),
    }
    status = 0
    if residue:
        payload["note"] = "nonabelian-socle maximals present; transfer checks skipped"
    else:
        reps = [int(r) for r in G.class_representatives]
        if args.element:
            reps = [G.index_of(parse_cycles(args.element, G.degree))]
        checks = []
        for g in reps:
            rep = crowns.soluble_checks(L, g, decomp, caps=caps)
            checks.append({
                "g": rep.g_cycles, "gap": _frac(rep.gap),
                "dominant_transfer": rep.dominant_transfer,
                "derived_nilpotent": rep.derived_nilpotent,
                "all_ok": rep.all_ok})
            if not rep.all_ok:
                status = 1
        payload["soluble_checks"] = checks
    csv_rows = [{
        "v_order": c.v_order, "q": c.q, "r": c.r, "theta": c.theta,
        "delta": c.delta, "maximal_count": len(c.maximals),
        "formula_check": c.count_ok} for c in classes]
    _emit(payload, csv_rows or None, args.format)
    return status


def cmd_bounds(args) -> int:
    caps = _caps_from_args(args)
    G = load_group(args.group, caps)
    L = enumerate_subgroups(G, caps=caps)
    y = _parse_subset(args.subset, G)
    tb = theorem_bounds(L, y)
    if args.element:
        reps = [G.index_of(parse_cycles(args.element, G.degree))]
    else:
        reps = [int(r) for r in G.class_representatives]
    gaps = [singleton_gap(L, g, caps=caps) for g in reps]
    payload = {
        "schema": SCHEMA, "kind": "bounds", "group": _group_block(G),
        "y": [cycle_string(p) for p in y],
        "growth_bounds": {"lower": tb.lower, "upper": tb.upper,
                          "ceil_M": tb.ceil_M, "e": _frac(tb.e), "ok": tb.ok},
        "singleton_gaps": [{
            "g": cycle_string(G.element(s.g)), "gap": _frac(s.gap),
            "ok": s.ok} for s in gaps],
    }
    rows = [{"g": cycle_string(G.element(s.g)), "gap": _frac_str(s.gap),
             "ok": s.ok} for s in gaps]
    ok = tb.ok and all(s.ok for s in gaps)
    _emit(payload, rows, args.format)
    return 0 if ok else 1


def cmd_construct(args) -> int:
    caps = _caps_from_args(args)
    spec = cx.parse_builder(args.spec)
    G = cx.build(spec, caps=caps)
    data = {
        "schema": SCHEMA, "kind": "group", "name": G.name,
        "builder": str(spec), "order": G.order, "degree": G.degree,
        "generators": [cycle_string(g) for g in G.generators],
    }
    with open(args.out, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    _emit({"schema": SCHEMA, "kind": "construct", "written": args.out,
           "group": _group_block(G), "builder": str(spec)}, None, args.format)
    return 0


def cmd_corpus(args) -> int:
    caps = _caps_from_args(args)
    which = None
    if args.only:
        try:
            which = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise ParseError(f"--only wants comma-separated integers, got {args.only!r}") from None
        bad = [n for n in which if n not in corpus_mod.CRITERIA]
        if bad:
            raise ParseError(f"unknown criteria {bad}")
    results = corpus_mod.run_criteria(which, caps=caps)
    if args.format == "json":
        payload = {
            "schema": SCHEMA, "kind": "corpus",
            "results": [{
                "criterion": r.number, "label": r.label, "passed": r.passed,
                "detail": r.detail, "seconds": round(r.seconds, 2),
                "skipped": [{"group": g, "reason": why} for g, why in r.skipped],
            } for r in results],
            "all_passed": all(r.passed for r in results),
        }
        _emit(payload, None, "json")
    elif args.format == "csv":
        rows = [{"criterion": r.number, "label": r.label, "passed": r.passed,
                 "seconds": f"{r.seconds:.2f}", "detail": r.detail}
                for r in results]
        _emit({}, rows, "csv")
    else:
        for r in results:
            print(r.line())
            for g, why in r.skipped:
                print(f"         skipped {g}: {why}")
        n_pass = sum(r.passed for r in results)
        print(f"{n_pass}/{len(results)} criteria passed")
    return 0 if all(r.passed for r in results) else 1


# -- argument plumbing ----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genwait",
        description="Exact and simulated waiting-time statistics for "
                    "generating finite groups.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, group=True):
        if group:
            p.add_argument("--group", required=True,
                           help="group file path or builtin:<builder spec>")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--cap", action="append", metavar="NAME=VALUE",
                       help="override a resource cap for this run")

    p = sub.add_parser("info", help="order, degree, d(G), class count")
    common(p)
    p.set_defaults(fn=cmd_info)

    p = sub.add_parser("lattice", help="subgroup lattice summary")
    common(p)
    p.set_defaults(fn=cmd_lattice)

    p = sub.add_parser("estats", help="exact generation statistics for Y")
    common(p)
    p.add_argument("--subset", help="semicolon-separated cycle strings for Y")
    p.add_argument("--depth", type=int, default=10,
                   help="rows of the P(n) table to report")
    p.set_defaults(fn=cmd_estats)

    p = sub.add_parser("scan", help="per-class singleton statistics")
    common(p)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("mc", help="Monte Carlo estimate of the waiting time")
    common(p)
    p.add_argument("--subset", help="semicolon-separated cycle strings for Y")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True,
                   help="base seed (mandatory: no wall-clock seeding)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_mc)

    p = sub.add_parser("crowns", help="chief-factor classes and transfer checks")
    common(p)
    p.add_argument("--element", help="restrict the checks to one element")
    p.set_defaults(fn=cmd_crowns)

    p = sub.add_parser("bounds", help="growth-degree bounds and singleton gaps")
    common(p)
    p.add_argument("--subset", help="semicolon-separated cycle strings for Y")
    p.add_argument("--element", help="restrict the gap check to one element")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("construct", help="build a group and write it to a file")
    common(p, group=False)
    p.add_argument("--spec", required=True, help="builder spec, e.g. dihedral(6)")
    p.add_argument("--out", required=True, help="output file path")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("corpus", help="run the acceptance corpus")
    common(p, group=False)
    p.add_argument("--only", help="comma-separated criterion numbers")
    # pass/fail matrix by default; --format json/csv for machine output
    p.set_defaults(fn=cmd_corpus, format="text")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.fn(args)
    except (ParseError, ValidationError) as exc:
        json.dump({"schema": SCHEMA, "kind": "error", "status": 2,
                   "error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except CapExceeded as exc:
        json.dump({"schema": SCHEMA, "kind": "error", "status": 3,
                   "error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    except (CheckFailed, PrecisionExhausted) as exc:
        json.dump({"schema": SCHEMA, "kind": "error", "status": 1,
                   "error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
