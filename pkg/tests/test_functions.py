import json
import random

import pytest
from hypothesis import given, strategies as st

from oagwb.errors import (CapExceeded, InadmissibleTarget, MultiplicityExceeded, WrongFamily)
from oagwb.functions import (Always, And, Compare, FnLeaf, FnMinus, FnUnion, InCoset,
                             LinearFn, Not, PiecewiseFn, anchored_candidate,
                             build_counterexample_72, confinement_check_72, conflict_73,
                             counterexample_sample, counterexample_subgroups, dumps_piecewise,
                             eval_piecewise, eval_projected, f_alpha_73, f_alpha_73_predicate,
                             intersect, piecewise_from_json, project, solve_congruence,
                             translate_agrees_73, translate_check_73, unit_of_convex)
from oagwb.groups import GroupSpec, make_group, random_element
from oagwb.parsing import parse_element
from oagwb.quotients import Coset, index
from oagwb.subgroups import (ZERO, Meet, Sharp, Shift, member, random_member, tail)

Z = make_group(GroupSpec.free_lex(1))
FL2 = make_group(GroupSpec.free_lex(2))
LL2 = make_group(GroupSpec.local_lex(2))
PM22 = make_group(GroupSpec.poly_mod(2, 2))
G72 = make_group(GroupSpec.poly_part([(2, 2)] * 3))


def z(n):
    return Z.basis(0, n) if n else Z.zero()


def values(cosets):
    return sorted(c.rep[0] % 4 for c in cosets)


def test_unit_of_convex():
    assert unit_of_convex(Z, None) == z(1)
    assert unit_of_convex(LL2, None).is_zero()
    assert unit_of_convex(FL2, 1) == FL2.basis(0)
    u = unit_of_convex(PM22, 2)
    assert u[1] == 1 and sum(c for _, c in u.coords) == 0


def test_shift_binds_unit():
    f = project(LinearFn((1,), 1, None, 3), Shift(ZERO, 2, 3), Z)
    assert {c.rep[0] % 8 for c in f.evaluate((z(2),))} == {5}
    g = project(LinearFn((1,), 1, None, 3), Shift(ZERO, 2, 1), LL2)
    assert g.unit.is_zero()
    h = project(LinearFn((1,)), Shift(ZERO, 2, 1), LL2)
    assert h.unit.is_zero()


def test_inadmissible_target():
    with pytest.raises(InadmissibleTarget):
        project(LinearFn((1,)), Meet(tail(1), Shift(ZERO, 2, 1)), FL2)
    with pytest.raises(InadmissibleTarget):
        project(LinearFn((1,)), Shift(Shift(ZERO, 2, 1), 2, 1), FL2)


def test_eval_examples():
    ident = project(LinearFn((1,)), Shift(ZERO, 2, 2), Z)
    assert values(eval_projected(ident, (z(3),))) == [3]
    half = project(LinearFn((1,), 2), Shift(ZERO, 2, 2), Z)
    assert values(eval_projected(half, (z(2),))) == [1, 3]
    assert eval_projected(half, (z(1),)) == frozenset()


def test_eval_cap():
    f = project(LinearFn((1,), 8), Shift(ZERO, 2, 3), Z)
    with pytest.raises(CapExceeded):
        eval_projected(f, (z(0),), cap=4)
    assert len(eval_projected(f, (z(0),), cap=8)) == 8


def _brute_solutions(s, t, H, g, box):
    """Residue classes of y in a box with s*y - t in H, by membership alone."""
    found = []
    for v in range(-box, box + 1):
        y = g.basis(0, v) if v else g.zero()
        if member(H, s * y - t) and not any(member(H, y - w) for w in found):
            found.append(y)
    return found


@given(s=st.integers(1, 12), t=st.integers(-20, 20), k=st.integers(0, 4))
def test_solution_sets_match_enumeration(s, t, k):
    H = Shift(ZERO, 2, k)
    f = project(LinearFn((1,), s), H, Z)
    got = eval_projected(f, (z(t),), cap=64)
    want = _brute_solutions(s, z(t), H, Z, 40)
    assert len(got) == len(want)
    assert got == frozenset(Coset(H, y) for y in want)


@pytest.mark.parametrize("g", [PM22, G72, LL2], ids=["polymod", "polypart", "locallex"])
def test_solution_sets_are_full_cosets(g):
    rng = random.Random(1)
    checked = 0
    targets = [Shift(Sharp(ZERO, 2, 2), 2, 1), Shift(tail(2), 2, 2), Sharp(tail(1), 2, 2)]
    for _ in range(40):
        H = rng.choice(targets)
        s = rng.choice([1, 2, 3, 4])
        f = project(LinearFn((rng.randint(-3, 3), 1), s, random_element(g, 3, 4, rng)), H, g)
        xs = (random_element(g, 5, 5, rng), random_element(g, 5, 5, rng))
        t = f.base.coeffs[0] * xs[0] + xs[1] + f.base.offset
        try:
            vals = eval_projected(f, xs, cap=64)
        except CapExceeded:
            continue
        checked += 1
        for c in vals:
            y = c.rep + random_member(H, g, rng)
            assert Coset(H, y) == c
            assert member(H, s * y - t)
        if not vals:
            assert solve_congruence(s, t, H) is None
    assert checked >= 10


def test_intersect_examples():
    f = project(LinearFn((1,)), Shift(ZERO, 2, 2), Z)
    both = intersect(f, f)
    for n in range(-5, 6):
        assert both.evaluate((z(n),)) == frozenset(Coset(both.target, c.rep) for c in f.evaluate((z(n),)))
    even = project(LinearFn((0,)), Shift(ZERO, 2, 1), Z)
    one = project(LinearFn((0,), 1, z(1)), Shift(ZERO, 2, 2), Z)
    assert all(not intersect(even, one).evaluate((z(n),)) for n in range(-5, 6))
    h1, h2, target, _ = counterexample_subgroups(2)
    f1 = project(LinearFn((1,)), h1, G72)
    f2 = project(LinearFn((0,)), h2, G72)
    four = parse_element("4", G72)
    (val,) = intersect(f1, f2).evaluate((four,))
    assert member(target, val.rep - four)


@given(seed=st.integers(0, 10 ** 6))
def test_intersect_commutes_and_associates(seed):
    rng = random.Random(seed)
    targets = [Shift(Sharp(ZERO, 2, 2), 2, 2), Shift(Sharp(ZERO, 2, 3), 2, 1), Shift(tail(1), 2, 2)]
    fs = [project(LinearFn((rng.randint(-2, 2),), 1, random_member(Shift(ZERO, 2, 1), G72, rng)), H, G72)
          for H in targets]
    x = random_element(G72, 5, 4, rng)
    a = intersect(intersect(fs[0], fs[1]), fs[2]).evaluate((x,))
    b = intersect(fs[0], intersect(fs[1], fs[2])).evaluate((x,))
    c = intersect(fs[1], fs[0]).evaluate((x,))
    d = intersect(fs[0], fs[1]).evaluate((x,))
    key = lambda S: {cs.key for cs in S}  # noqa: E731
    assert key(a) == key(b)
    assert key(c) == key(d)


def test_piecewise_basics():
    H = Shift(ZERO, 2, 2)
    f = project(LinearFn((1,)), H, Z)
    single = PiecewiseFn(((Always(), FnLeaf(f)),), 1, H, Z)
    for n in range(-4, 5):
        assert eval_piecewise(single, (z(n),)) == eval_projected(f, (z(n),))
    neg = project(LinearFn((-1,)), H, Z)
    split = PiecewiseFn(((Compare(0, "ge", z(0)), FnLeaf(f)),
                         (Not(Compare(0, "ge", z(0))), FnLeaf(neg))), 1, H, Z)
    for n in range(-4, 5):
        (c,) = eval_piecewise(split, (z(n),))
        assert c.rep[0] % 4 == abs(n) % 4


def test_union_minus_and_multiplicity():
    H2, H4 = Shift(ZERO, 2, 1), Shift(ZERO, 2, 2)
    f = project(LinearFn((1,)), H2, Z)
    g = project(LinearFn((1,)), H4, Z)
    uni = PiecewiseFn(((Always(), FnUnion((FnLeaf(f), FnLeaf(g)))),), 2, H4, Z)
    assert values(eval_piecewise(uni, (z(1),))) == [1, 3]
    minus = PiecewiseFn(((Always(), FnMinus(FnLeaf(f), FnLeaf(g))),), 2, H4, Z)
    assert values(eval_piecewise(minus, (z(1),))) == [3]
    tight = PiecewiseFn(((Always(), FnUnion((FnLeaf(f), FnLeaf(g)))),), 1, H4, Z)
    with pytest.raises(MultiplicityExceeded):
        eval_piecewise(tight, (z(1),))


def test_json_roundtrip():
    F = build_counterexample_72(G72)
    dom = And((InCoset(0, Shift(Sharp(ZERO, 2, 2), 2, 1)), Compare(0, "ge", G72.zero())))
    G = PiecewiseFn(((dom, F.pieces[0][1]),), 1, F.target, G72)
    for fn in (F, G):
        text = dumps_piecewise(fn)
        back = piecewise_from_json(json.loads(text), G72)
        assert dumps_piecewise(back) == text
        for x in ("2", "4", "6 - 4*t", "1"):
            pt = (parse_element(x, G72),)
            assert eval_piecewise(back, pt) == eval_piecewise(fn, pt)


def test_counterexample_values():
    F = build_counterexample_72(G72)
    h1, h2, target, dom = counterexample_subgroups(2)
    (val,) = F.evaluate((parse_element("2", G72),))
    assert member(target, val.rep - parse_element("2", G72))
    outside = parse_element("1", G72)
    assert not member(dom, outside) and F.evaluate((outside,)) == frozenset()
    assert index(Meet(h1, h2), target, G72).is_finite
    with pytest.raises(WrongFamily):
        build_counterexample_72(PM22)
    with pytest.raises(WrongFamily):
        build_counterexample_72(make_group(GroupSpec.poly_part([(2, 2), (2, 1)])))


def test_domain_identity():
    F = build_counterexample_72(G72)
    dom = counterexample_subgroups(2)[3]
    rng = random.Random(3)
    for i in range(150):
        x = random_member(dom, G72, rng) if i % 2 else random_element(G72, 6, 4, rng)
        assert bool(F.evaluate((x,))) == member(dom, x)


def test_confinement_examples():
    F = build_counterexample_72(G72)
    h1, h2, _, _ = counterexample_subgroups(2)
    rng = random.Random(0)
    zero = G72.zero()
    rep = confinement_check_72(F, (1, 1, zero), counterexample_sample(G72, rng, 60, zero))
    assert rep.passed and rep.confined_to == "sharp3+p" and rep.agreement > 1
    off = parse_element("2 + 8*t", G72)
    anchor = -off
    sample = counterexample_sample(G72, rng, 60, anchor)
    rep = confinement_check_72(F, (2, 1, off), sample)
    assert rep.passed and rep.agreement > 1
    agreeing = [x for x in sample if F.evaluate((x,)) and
                confinement_check_72(F, (2, 1, off), [x]).agreement]
    assert all(member(h1, x - anchor) for x in agreeing)


def test_confinement_on_random_candidates():
    F = build_counterexample_72(G72)
    rng = random.Random(11)
    for _ in range(15):
        cand, anchor = anchored_candidate(F, rng)
        rep = confinement_check_72(F, cand, counterexample_sample(G72, rng, 40, anchor))
        assert rep.passed
        if cand[1] % 2:
            assert rep.agreement >= 1


def test_confinement_reports_violations():
    # a fake target that is not the piecewise function: agreement spreads out
    h1, h2, target, dom = counterexample_subgroups(2)
    fake = PiecewiseFn(((Always(), FnLeaf(project(LinearFn((1,)), target, G72))),), 1, target, G72)
    rng = random.Random(2)
    sample = [random_member(dom, G72, rng) for _ in range(40)]
    rep = confinement_check_72(fake, (1, 1, G72.zero()), sample)
    assert not rep.passed and len(rep.violation) == 3


@pytest.mark.parametrize("text, i, want", [
    ("1*e0", 1, True), ("1*e0", 2, False), ("1*e1", 2, True), ("1*e1", 1, False),
    ("2*e0 + 1/3*e1", 2, True), ("4*e0 + 2*e1 + 3*e2", 3, True), ("4*e0 + 1*e1 + 3*e2", 3, False),
])
def test_translate_examples(text, i, want):
    assert translate_check_73(parse_element(text, LL2), i) is want


def test_conflicts():
    assert (conflict_73(1, 2).status, conflict_73(1, 2).coordinate) == ("Unsatisfiable", 0)
    assert (conflict_73(2, 5).status, conflict_73(2, 5).coordinate) == ("Unsatisfiable", 1)
    for j in range(2, 9):
        for i in range(1, j):
            rep = conflict_73(i, j)
            assert rep.grid_common == 0 and rep.grid_size == 2 ** j
    with pytest.raises(ValueError):
        conflict_73(3, 3)


@given(seed=st.integers(0, 10 ** 6), i=st.integers(1, 6))
def test_f_alpha_well_defined(seed, i):
    rng = random.Random(seed)
    x = random_element(LL2, 8, 5, rng)
    value = f_alpha_73(x, i)
    y = x + random_element(LL2, i + 2, 3, rng)
    assert f_alpha_73_predicate(x, y, i) == (y in value)
    t = random_element(LL2, i + 1, 3, rng)
    assert translate_check_73(t, i) == translate_agrees_73(x, t, i)
