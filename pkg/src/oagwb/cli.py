"""Command-line entry point.

Exit codes: 0 success or pass, 1 property violation, 2 usage or parse error,
3 inconclusive (a cap was reached where a finite answer was expected).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from .cosetlogic import load_system, saturation_membership, sweep, threshold_N, validate_system
from .errors import CapExceeded, IncompatibleFamily, OAGError
from .functions import (build_counterexample_72, confinement_check_72, conflict_73,
                        counterexample_sample, dumps_piecewise)
from .lemmas import (REGISTRY, LemmaCase, corrupted_group, default_seed, dim_profile,
                     run_lemma_suite)
from .parsing import format_element, parse_element, parse_group, parse_subgroup_expr
from .quotients import fp_dimension, index, transversal
from .subgroups import member, spine_maps

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _json(obj):
    return json.dumps(obj, sort_keys=True, indent=2)


def cmd_group(args):
    g = parse_group(args.group)
    info = {"spec": str(g.spec), "family": g.family.value, "rank": g.rank,
            "coefficients": f"Z_({g.spec.p})" if g.is_local else "Z",
            "cell_moduli": list(g.cell_moduli), "cell_labels": list(g.cell_labels)}
    if args.element:
        x = parse_element(args.element, g)
        info["element"] = format_element(x)
        info["sign"] = x.sign()
    _emit(args, _json(info))
    return EXIT_OK


def cmd_member(args):
    g = parse_group(args.group)
    S = parse_subgroup_expr(args.subgroup, g)
    x = parse_element(args.element, g)
    _emit(args, "true" if member(S, x) else "false")
    return EXIT_OK


def cmd_spine(args):
    g = parse_group(args.group)
    x = parse_element(args.element, g)
    t = spine_maps(args.n, x)
    _emit(args, _json({"element": format_element(x), "n": args.n, "s": str(t.s_point),
                       "t": str(t.t_point), "t_plus": str(t.t_plus_point)}))
    return EXIT_OK


def cmd_index(args):
    g = parse_group(args.group)
    A = parse_subgroup_expr(args.larger, g)
    B = parse_subgroup_expr(args.smaller, g)
    if args.dim is not None:
        value = fp_dimension(A, B, args.dim, g, args.cap)
        out = {"dimension": value.to_json()}
    else:
        value = index(A, B, g, args.cap)
        out = {"index": value.to_json()}
        if args.transversal:
            try:
                out["transversal"] = [format_element(x) for x in transversal(A, B, g, args.cap)]
            except CapExceeded:
                out["transversal"] = None
    _emit(args, _json(out))
    return EXIT_OK if value.is_finite or not args.expect_finite else EXIT_INCONCLUSIVE


def cmd_dim_profile(args):
    g = parse_group(args.group)
    rows = dim_profile(g, args.p, args.smax, args.cap)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "dim_tag", "dim_value"])
    for s, v in rows:
        w.writerow([s, v.tag, v.value])
    _emit(args, buf.getvalue().rstrip("\n"))
    return EXIT_OK if all(v.is_finite for _, v in rows) else EXIT_INCONCLUSIVE


def cmd_verify(args):
    seed = args.seed if args.seed is not None else default_seed()
    lemmas = sorted(REGISTRY) if args.lemma == "all" else [args.lemma]
    reports, body = [], []
    for lemma in lemmas:
        case = LemmaCase(lemma, args.group, p=args.p, rmax=args.rmax, smax=args.smax,
                         samples=args.samples, seed=seed, cap=args.cap, max_level=args.max_level)
        group = corrupted_group(parse_group(args.group)) if args.corrupt else None
        try:
            report = run_lemma_suite(case, group=group, jobs=args.jobs)
        except IncompatibleFamily as e:
            if args.lemma != "all":
                raise
            body.append({"lemma": lemma, "status": "skipped", "reason": str(e)})
            continue
        reports.append(report)
        body.append(report.to_json(timing=args.timing))
    _emit(args, _json(body[0] if len(body) == 1 else body))
    statuses = {r.status for r in reports}
    if "fail" in statuses:
        return EXIT_VIOLATION
    return EXIT_INCONCLUSIVE if "inconclusive" in statuses else EXIT_OK


def cmd_counterexample(args):
    if args.which == "72":
        g = parse_group(args.group)
        F = build_counterexample_72(g)
        out = {"function": json.loads(dumps_piecewise(F))}
        if args.at:
            x = parse_element(args.at, g)
            out["value"] = sorted(str(c) for c in F.evaluate((x,)))
        status = EXIT_OK
        if args.candidate:
            a, b, off = args.candidate.split(",", 2)
            cand = (int(a), int(b), parse_element(off, g))
            rng = random.Random(args.seed if args.seed is not None else default_seed())
            anchor = parse_element(args.at, g) if args.at else None
            sample = counterexample_sample(g, rng, args.samples, anchor)
            rep = confinement_check_72(F, cand, sample)
            out["confinement"] = rep.to_json()
            status = EXIT_OK if rep.passed else EXIT_VIOLATION
        _emit(args, _json(out))
        return status
    reports = []
    pairs = [(args.i, args.j)] if args.i and args.j else \
        [(i, j) for j in range(2, args.jmax + 1) for i in range(1, j)]
    for i, j in pairs:
        reports.append(conflict_73(i, j).to_json())
    _emit(args, _json(reports[0] if len(reports) == 1 else reports))
    ok = all(r["status"] == "Unsatisfiable" for r in reports)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_cosetlogic(args):
    if args.threshold:
        n, k = (int(v) for v in args.threshold.split(","))
        _emit(args, _json({"n": n, "k": k, "N": threshold_N(n, k)}))
        return EXIT_OK
    if not args.system:
        raise _Usage("cosetlogic needs --system FILE or --threshold n,k")
    with open(args.system, encoding="utf-8") as fh:
        sys_, amb, gprime = load_system(fh.read())
    problems = validate_system(sys_, amb)
    out = {"ambient": list(amb.moduli), "problems": problems}
    if problems:
        _emit(args, _json(out))
        return EXIT_USAGE
    if args.y:
        y = tuple(int(v) for v in args.y.split(","))
        out["member"] = saturation_membership(sys_, gprime, y, amb)
    else:
        bad = sweep(sys_, gprime, amb)
        out["points"] = amb.order
        out["disagreements"] = [list(y) for y in bad]
    _emit(args, _json(out))
    return EXIT_VIOLATION if out.get("disagreements") else EXIT_OK


class _Usage(Exception):
    pass


def build_parser():
    ap = argparse.ArgumentParser(prog="oagwb", description=__doc__.splitlines()[0])
    ap.add_argument("--out", help="write output to this path instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--out", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        return p

    p = add("group", cmd_group, "describe a group spec")
    p.add_argument("--group", required=True)
    p.add_argument("--element")

    p = add("member", cmd_member, "decide membership in a subgroup expression")
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup", required=True)
    p.add_argument("--element", required=True)

    p = add("spine", cmd_spine, "spine convex subgroups of an element")
    p.add_argument("--group", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--n", type=int, required=True)

    p = add("index", cmd_index, "index or F_p-dimension of a nested pair")
    p.add_argument("--group", required=True)
    p.add_argument("--larger", required=True)
    p.add_argument("--smaller", required=True)
    p.add_argument("--cap", type=int, default=32)
    p.add_argument("--dim", type=int, metavar="P", help="report the F_P-dimension instead")
    p.add_argument("--transversal", action="store_true")
    p.add_argument("--expect-finite", action="store_true",
                   help="exit 3 when the cap is reached")

    p = add("dim-profile", cmd_dim_profile, "CSV of F_p-dimensions over s")
    p.add_argument("--group", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--smax", type=int, default=4)
    p.add_argument("--cap", type=int, default=32)

    p = add("verify", cmd_verify, "run a lemma suite")
    p.add_argument("--lemma", required=True, choices=sorted(REGISTRY) + ["all"])
    p.add_argument("--group", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--cap", type=int, default=32)
    p.add_argument("--p", type=int)
    p.add_argument("--rmax", type=int, default=3)
    p.add_argument("--smax", type=int, default=3)
    p.add_argument("--max-level", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.add_argument("--corrupt", action="store_true",
                   help="run on a deliberately mutated copy of the group (self-test)")

    p = add("counterexample", cmd_counterexample, "the two non-linearity constructions")
    p.add_argument("which", choices=["72", "73"])
    p.add_argument("--group", default="polypart((2,2),(2,2),(2,2))")
    p.add_argument("--at", help="evaluate (72) at this element, also the sampling anchor")
    p.add_argument("--candidate", help="a,b,offset for the confinement check (72)")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--jmax", type=int, default=8)

    p = add("cosetlogic", cmd_cosetlogic, "coset saturation and the threshold table")
    p.add_argument("--system", help="JSON coset system file")
    p.add_argument("--y", help="comma-separated element to test")
    p.add_argument("--threshold", help="n,k")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if not hasattr(args, "out"):
        args.out = None
    try:
        return args.func(args)
    except (OAGError, _Usage, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
