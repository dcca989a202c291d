"""Acceptance criteria, one test each, at the stated sizes and tolerances.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``pytest_terminal_summary`` in conftest.py).
"""

import itertools
import random
import time

import pytest

from oagwb.cosetlogic import threshold_N
from oagwb.functions import (build_counterexample_72, conflict_73, counterexample_subgroups)
from oagwb.groups import GroupSpec, make_group, random_element
from oagwb.lemmas import LemmaCase, run_lemma_suite
from oagwb.oracle import member_oracle
from oagwb.quotients import index
from oagwb.subgroups import (FULL, ZERO, Join, Sharp, Shift, member, random_expression,
                             random_member, tail)

SEED = 0
SEVEN_TWO = "polypart((2,2),(2,2),(2,2))"
RESULTS = {}  # number -> [text, passed, seconds], merged over parametrized parts


class record:
    """Context manager recording the outcome of (part of) one criterion."""

    def __init__(self, number, text):
        self.number, self.text = number, text

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        took = time.perf_counter() - self.start
        entry = RESULTS.setdefault(self.number, [self.text, True, 0.0])
        entry[1] = entry[1] and exc_type is None
        entry[2] += took
        return False


def summary_lines():
    return [f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {text} ({took:.1f}s)"
            for n, (text, ok, took) in sorted(RESULTS.items())]


def _dims(spec, p, smax):
    report = run_lemma_suite(LemmaCase("dim71", spec, smax=smax))
    assert report.status == "pass"
    return [c.detail["dimension"]["value"] for c in report.cases]


def test_criterion_01_polymod_profiles():
    with record(1, "polymod dimension profiles (0,1,0,0) and (1,0,0)") as r:
        assert _dims("polymod(p=2,n=2)", 2, 4) == [0, 1, 0, 0]
        assert _dims("polymod(p=3,n=1)", 3, 3) == [1, 0, 0]
        assert time.perf_counter() - r.start < 60


def test_criterion_02_polypart_counts():
    with record(2, "polypart counts dim(2,2)=2, dim(2,1)=0, dim(3,1)=1"):
        report = run_lemma_suite(LemmaCase("dim72", "polypart((2,2),(2,2),(3,1))", smax=2))
        assert report.status == "pass"
        got = {c.key: c.detail["dimension"] for c in report.cases}
        assert got["p=2,s=2"] == {"tag": "finite", "value": 2}
        assert got["p=2,s=1"] == {"tag": "finite", "value": 0}
        assert got["p=3,s=1"] == {"tag": "finite", "value": 1}


@pytest.mark.parametrize("group", ["locallex(p=2)", "locallex(p=3)", "polymod(p=2,n=2)", SEVEN_TWO])
def test_criterion_03_keylemma(group):
    with record(3, "keylemma, 1000 samples per chain and 1<=r<=s<=3, four families"):
        report = run_lemma_suite(LemmaCase("keylemma", group, samples=1000, rmax=3, smax=3,
                                           seed=SEED))
        pairs = {tuple(c.key.split(",")[1:]) for c in report.cases}
        assert pairs == {(f"r={r}", f"s={s}") for s in (1, 2, 3) for r in range(1, s + 1)}
        assert all(c.detail["samples"] == 1000 for c in report.cases)
        assert sum(c.detail["discrepancies"] for c in report.cases) == 0


def test_criterion_04_exact_indices():
    with record(4, "exact indices on free lexicographic groups, k<=4, r<=3, p in {2,3}"):
        for k in range(1, 5):
            g = make_group(GroupSpec.free_lex(k))
            for p, r in itertools.product((2, 3), (1, 2, 3)):
                want = p ** (r * k)
                got = index(FULL, Shift(ZERO, p, r), g, cap=want)
                assert got.is_finite and got.value == want, (k, p, r, got)
                for m in range(k + 1):
                    want = p ** (r * (k - m))
                    got = index(Join(tail(m), Shift(ZERO, p, r)), Shift(ZERO, p, r), g,
                                cap=max(want, 32))
                    assert got.is_finite and got.value == want, (k, p, r, m, got)


@pytest.mark.parametrize("group", ["polymod(p=2,n=2)", "polymod(p=3,n=1)",
                                   "polypart((2,2),(3,1))", SEVEN_TWO])
def test_criterion_05_tower_and_product(group):
    with record(5, "tower law and quotient product law, s<=3, r<=s"):
        for lemma in ("tower", "aps-quot"):
            report = run_lemma_suite(LemmaCase(lemma, group, rmax=3, smax=3, cap=32))
            assert report.cases and not report.violations, report.violations[:2]


def test_criterion_06_saturation_criterion():
    with record(6, "saturation criterion equals brute force, 50 systems x 3 subgroups x 4 ambients") as r:
        report = run_lemma_suite(LemmaCase("qe32", "freelex(1)", samples=50, seed=SEED))
        assert len(report.cases) == 4
        assert report.status == "pass", [c.witness for c in report.violations]
        assert all(c.detail["systems"] == 50 and c.detail["gprimes_each"] == 3
                   for c in report.cases)
        assert time.perf_counter() - r.start < 120


def test_criterion_07_thresholds():
    with record(7, "reciprocal-sum thresholds N(2,1)=1, N(2,2)=2, grid n in {2,3}, k<=4"):
        assert threshold_N(2, 1) == 1
        assert threshold_N(2, 2) == 2
        report = run_lemma_suite(LemmaCase("qe33", "freelex(1)"))
        assert len(report.cases) == 8 and report.status == "pass"


def test_criterion_08_counterexample_72():
    g = make_group(GroupSpec.poly_part([(2, 2)] * 3))
    with record(8, "piecewise counterexample: domain identity, 200 candidates x 100 points"):
        F = build_counterexample_72(g)
        dom = counterexample_subgroups(2)[3]
        rng = random.Random(f"{SEED}:acceptance-domain")
        for i in range(1000):
            inside = random_member(dom, g, rng)
            assert F.evaluate((inside,)), inside
            x = random_element(g, 6, 5, rng)
            assert bool(F.evaluate((x,))) == member(dom, x), x
        report = run_lemma_suite(LemmaCase("cex72", SEVEN_TWO, samples=200, seed=SEED))
        confine = [c for c in report.cases if c.key.startswith("candidates")]
        assert sum(c.detail["candidates"] for c in confine) == 200
        assert all(c.detail["points_each"] == 100 for c in confine)
        assert report.status == "pass", [c.witness for c in report.violations]


def test_criterion_09_counterexample_73():
    with record(9, "non-uniform family: conflicts for i<j<=8, grid check, 200 translates"):
        for j in range(2, 9):
            for i in range(1, j):
                rep = conflict_73(i, j)
                assert rep.status == "Unsatisfiable"
                assert rep.coordinate == i - 1
                assert rep.grid_size == 2 ** j and rep.grid_common == 0
        report = run_lemma_suite(LemmaCase("cex73", "locallex(p=2)", samples=200, seed=SEED))
        assert report.status == "pass"


ORACLE_FAMILIES = {
    "freelex(3)": GroupSpec.free_lex(3), "locallex(p=2)": GroupSpec.local_lex(2),
    "locallex(p=3)": GroupSpec.local_lex(3), "polymod(p=2,n=2)": GroupSpec.poly_mod(2, 2),
    "polypart((2,2),(3,1))": GroupSpec.poly_part([(2, 2), (3, 1)]),
}


def test_criterion_10_oracle_soundness():
    with record(10, "membership equals the brute-force oracle, 1000 pairs per family"):
        for name, spec in ORACLE_FAMILIES.items():
            g = make_group(spec)
            rng = random.Random(f"{SEED}:{name}")
            for i in range(1000):
                S = random_expression(g, rng, depth=3)
                x = random_member(S, g, rng) if i % 2 else random_element(g, 6, 6, rng)
                assert member(S, x) == member_oracle(S, x, coeff_slack=200), (name, S, x)


def test_criterion_11_infinitude():
    with record(11, "infinite indices render as AtLeast(32) and AtLeast(64)"):
        ll2 = make_group(GroupSpec.local_lex(2))
        assert [str(index(FULL, Shift(ZERO, 2, 1), ll2, c)) for c in (32, 64)] == \
            ["AtLeast(32)", "AtLeast(64)"]
        g = make_group(GroupSpec.poly_part([(2, 2)] * 3))
        for s in (1, 2, 3):
            for r in range(1, s + 1):
                A = Shift(Sharp(ZERO, 2, s), 2, r - 1)
                B = Shift(Sharp(ZERO, 2, s), 2, r)
                assert [str(index(A, B, g, c)) for c in (32, 64)] == \
                    ["AtLeast(32)", "AtLeast(64)"], (s, r)
