import itertools
import random

import pytest

from oagwb.errors import CapExceeded, NotElementaryAbelian, NotNested, StreamExhausted
from oagwb.groups import GroupSpec, make_group
from oagwb.oracle import member_oracle
from oagwb.quotients import (Coset, IndexValue, coset_eq, fp_dimension, index, index_agree,
                             index_product, transversal, witness_stream)
from oagwb.subgroups import FULL, ZERO, Conv, Join, Meet, Sharp, Shift, member, pool, tail

FL3 = make_group(GroupSpec.free_lex(3))
LL2 = make_group(GroupSpec.local_lex(2))
PM22 = make_group(GroupSpec.poly_mod(2, 2))
G72 = make_group(GroupSpec.poly_part([(2, 2)] * 3))


def brute_index(A, B, g, box):
    """Count B-cosets among the elements of A in [0, box)^rank, by oracle membership."""
    reps = []
    for v in itertools.product(range(box), repeat=g.rank):
        x = g.from_list(v)
        if not member_oracle(A, x):
            continue
        if not any(member_oracle(B, x - y) for y in reps):
            reps.append(x)
    return len(reps)


@pytest.mark.parametrize("A, B", [
    (Shift(tail(1), 2, 1), Shift(ZERO, 2, 1)),
    (FULL, Shift(ZERO, 2, 2)),
    (Sharp(tail(2), 2, 2), Shift(ZERO, 2, 2)),
    (Shift(tail(2), 2, 1), Shift(tail(2), 2, 3)),
    (Sharp(ZERO, 3, 1), Shift(Sharp(ZERO, 3, 2), 3, 2)),
])
def test_index_matches_brute_force(A, B):
    want = brute_index(A, B, FL3, 9)
    assert index(A, B, FL3, cap=4096) == IndexValue.finite(want)


def test_index_examples():
    assert index(Shift(tail(1), 2, 1), Shift(ZERO, 2, 1), FL3) == IndexValue.finite(4)
    assert index(FULL, Shift(ZERO, 2, 1), LL2) == IndexValue.at_least(32)
    g4 = make_group(GroupSpec.free_lex(4))
    assert index(FULL, Shift(ZERO, 2, 3), g4, cap=4096) == IndexValue.finite(4096)


def test_transversal_is_complete_and_distinct():
    A, B = Sharp(ZERO, 2, 2), Shift(ZERO, 2, 3)
    reps = transversal(A, B, FL3, cap=512)
    assert len(reps) == index(A, B, FL3, cap=512).value
    for x, y in itertools.combinations(reps, 2):
        assert not member(B, x - y)
    width = 3
    keys = {Coset(B, x) for x in reps}
    for x in reps:
        for v in pool(__import__("oagwb.subgroups").subgroups.as_nf(A, FL3), width):
            assert Coset(B, x + FL3.from_list(v)) in keys


def test_transversal_cap():
    with pytest.raises(CapExceeded):
        transversal(FULL, Shift(ZERO, 2, 1), LL2, cap=8)


def test_not_nested():
    with pytest.raises(NotNested) as err:
        index(Shift(ZERO, 2, 1), tail(1), FL3)
    assert err.value.witness is not None


def test_dimensions():
    rows = [fp_dimension(Shift(Sharp(ZERO, 2, s), 2, 1), Shift(Sharp(ZERO, 2, s + 1), 2, 1), 2, PM22)
            for s in (1, 2, 3, 4)]
    assert [r.value for r in rows] == [0, 1, 0, 0]
    g = make_group(GroupSpec.poly_part([(2, 2), (2, 2), (3, 1)]))

    def dim(p, s):
        return fp_dimension(Shift(Sharp(ZERO, p, s), p, 1), Shift(Sharp(ZERO, p, s + 1), p, 1), p, g)
    assert (dim(2, 2), dim(2, 1), dim(3, 1)) == tuple(IndexValue.finite(v) for v in (2, 0, 1))


def test_dimension_needs_exponent_p():
    with pytest.raises(NotElementaryAbelian):
        fp_dimension(FULL, Shift(ZERO, 2, 2), 2, FL3)


def test_dimension_consistent_with_index():
    for A, B in [(FULL, Shift(ZERO, 2, 1)), (Shift(tail(1), 2, 1), Shift(ZERO, 2, 1)),
                 (Shift(Sharp(ZERO, 2, 2), 2, 1), Shift(Sharp(ZERO, 2, 3), 2, 1))]:
        for g in (FL3, PM22):
            d, i = fp_dimension(A, B, 2, g), index(A, B, g)
            if d.is_finite and i.is_finite:
                assert i.value == 2 ** d.value


def test_witness_streams():
    A, B = Shift(Sharp(ZERO, 2, 3), 2, 1), Shift(Sharp(ZERO, 2, 3), 2, 2)
    ws = witness_stream(A, B, 8, G72)
    assert len(ws) == 8
    for x in ws:
        assert member(A, x)
    for x, y in itertools.combinations(ws, 2):
        assert not member(B, x - y)
    with pytest.raises(StreamExhausted):
        witness_stream(FULL, Shift(ZERO, 2, 1), 9, FL3)


def test_infinite_indices_at_two_caps():
    for cap in (32, 64):
        assert index(FULL, Shift(ZERO, 2, 1), LL2, cap) == IndexValue.at_least(cap)
        for s in (1, 2, 3):
            for r in range(1, s + 1):
                A = Shift(Sharp(ZERO, 2, s), 2, r - 1)
                B = Shift(Sharp(ZERO, 2, s), 2, r)
                assert not index(A, B, G72, cap).is_finite


def test_product_law_on_freelex():
    for k in (1, 2, 3):
        g = make_group(GroupSpec.free_lex(k))
        base = index(FULL, Shift(ZERO, 2, 1), g)
        for r in (1, 2, 3):
            got = index(FULL, Shift(ZERO, 2, r), g, cap=4096)
            assert got == index_product([base] * r, 4096)


def test_tower_law_small():
    for g in (PM22, G72):
        for s in (1, 2, 3):
            for r in range(1, s + 1):
                lhs = index(Shift(Sharp(ZERO, 2, s), 2, r), Shift(ZERO, 2, r), g)
                rhs = index_product([index(Shift(Sharp(ZERO, 2, s - i), 2, 1), Shift(ZERO, 2, 1), g)
                                     for i in range(r)], 32)
                assert index_agree(lhs, rhs, 32)


def test_descent_on_sharp():
    for s in (1, 2, 3):
        for r in range(1, s + 1):
            K = Sharp(ZERO, 2, s)
            top = index(Shift(K, 2, r), Shift(ZERO, 2, r), PM22)
            low = index(Join(Meet(K, Shift(ZERO, 2, r - 1)), Shift(ZERO, 2, r)), Shift(ZERO, 2, r), PM22)
            assert top.is_finite == low.is_finite


def test_index_values():
    assert IndexValue.finite(4).to_json() == {"tag": "finite", "value": 4}
    assert IndexValue.at_least(32).to_json() == {"tag": "at_least", "bound": 32}
    assert str(IndexValue.at_least(64)) == "AtLeast(64)"
    assert index_product([IndexValue.finite(4), IndexValue.finite(16)], 32) == IndexValue.at_least(32)
    assert index_agree(IndexValue.finite(40), IndexValue.at_least(32), 32)
    assert not index_agree(IndexValue.finite(8), IndexValue.at_least(32), 32)


def test_cosets():
    S = Shift(tail(2), 2, 2)
    x = LL2.from_list([1, 3, 7])
    assert coset_eq(S, x, x + LL2.from_list([4, 8, 5]))
    assert not coset_eq(S, x, x + LL2.basis(1))
    assert Coset(S, x) == Coset(S, x + 4 * LL2.basis(0))
    assert x + LL2.basis(5) in Coset(S, x)


def test_random_transversals_agree_with_oracle():
    rng = random.Random(7)
    for _ in range(8):
        a = rng.choice([0, 1, 2, None])
        k1 = rng.randint(1, 2)
        A, B = Shift(Conv(a), 2, k1), Shift(Conv(a), 2, k1 + 1)
        reps = transversal(A, B, FL3, 64)
        assert all(member_oracle(A, x) for x in reps)
        assert len(reps) == brute_index(A, B, FL3, 9)
