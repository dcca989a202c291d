"""Cosets, indices, F_p-dimensions and certified witness streams.

Quotients are explored through coset keys: the key of x modulo B records
x_j mod d_j on each coordinate and s_c(x) mod e_c on each constrained cell,
so it is a homomorphism whose kernel is exactly B.  Index computations run a
breadth-first closure of the key of 0 under the generator pool of A,
restricted to a window of leading coordinates wide enough that every finite
quotient is fully visible and every infinite one shows more than ``cap``
classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import (CapExceeded, GroupMismatch, NotElementaryAbelian,
                     NotNested, StreamExhausted)
from .subgroups import (add_keys, as_nf, coset_key, dense_key, pool,
                        vec_to_element, window)

DEFAULT_CAP = 32


@dataclass(frozen=True)
class IndexValue:
    """Finite(k) is an exact index; AtLeast(w) certifies more than w classes were seen."""

    tag: str
    value: int

    @classmethod
    def finite(cls, k):
        return cls("finite", k)

    @classmethod
    def at_least(cls, w):
        return cls("at_least", w)

    @property
    def is_finite(self):
        return self.tag == "finite"

    def to_json(self):
        if self.is_finite:
            return {"tag": "finite", "value": self.value}
        return {"tag": "at_least", "bound": self.value}

    def __str__(self):
        return f"Finite({self.value})" if self.is_finite else f"AtLeast({self.value})"


def index_product(values, cap):
    """Product of index values, saturating at cap."""
    total = 1
    for v in values:
        if not v.is_finite:
            return IndexValue.at_least(cap)
        total *= v.value
        if total > cap:
            return IndexValue.at_least(cap)
    return IndexValue.finite(total)


def index_agree(a, b, cap):
    """Equal as exact values, or both at least ``cap``."""
    big_a = not a.is_finite or a.value > cap
    big_b = not b.is_finite or b.value > cap
    if big_a or big_b:
        return big_a and big_b
    return a.value == b.value


@dataclass(frozen=True)
class Coset:
    """The coset rep + subgroup; equality is decided exactly."""

    subgroup: object
    rep: object

    @property
    def nf(self):
        return as_nf(self.subgroup, self.rep.group)

    @property
    def key(self):
        return self.nf, coset_key(self.nf, self.rep)

    def __eq__(self, other):
        return isinstance(other, Coset) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __contains__(self, x):
        return self.nf.contains(x - self.rep)

    def __str__(self):
        return f"{self.rep} + {self.subgroup}"


def coset_eq(S, x, y):
    if x.group != y.group:
        raise GroupMismatch(f"{x.group} vs {y.group}")
    return as_nf(S, x.group).contains(x - y)


def _check_nested(A, B, width):
    for v in pool(B, width):
        if not A.contains_vec(v):
            raise NotNested("a generator of the smaller subgroup is not in the larger",
                            vec_to_element(A.group, v))


def closure(A, B, cap, extra=None, keep_reps=False):
    """Breadth-first coset enumeration of A/B.

    Returns (IndexValue, reps) where reps maps each key found to a
    representative element (only filled when ``keep_reps``).
    """
    g = A.group
    if extra is None:
        extra = cap.bit_length() + 2
    width = window(g, [A, B], extra=extra)
    _check_nested(A, B, width)
    gens = []
    seen_gens = set()
    zero_key = dense_key(B, [0] * width)
    for v in pool(A, width):
        k = dense_key(B, v)
        if k != zero_key and k not in seen_gens:
            seen_gens.add(k)
            gens.append((k, v))
    mods = B.moduli(width)
    reps = {zero_key: [0] * width}
    frontier = [zero_key]
    while frontier:
        nxt = []
        for key in frontier:
            base = reps[key]
            for gk, gv in gens:
                nk = add_keys(g, mods, key, gk)
                if nk in reps:
                    continue
                reps[nk] = [a + b for a, b in zip(base, gv)] if keep_reps else None
                if len(reps) > cap:
                    return IndexValue.at_least(cap), reps
                nxt.append(nk)
        frontier = nxt
    return IndexValue.finite(len(reps)), reps


def index(A, B, g, cap=DEFAULT_CAP):
    """[A : B] as Finite(k) when at most cap classes exist, else AtLeast(cap)."""
    value, _ = closure(as_nf(A, g), as_nf(B, g), cap)
    return value


def transversal(A, B, g, cap=DEFAULT_CAP):
    """Representatives of all cosets of B in A; raises CapExceeded past cap."""
    reps = _transversal(as_nf(A, g), as_nf(B, g), cap)
    if reps is None:
        raise CapExceeded(f"more than {cap} cosets")
    return list(reps)


@lru_cache(maxsize=1024)
def _transversal(A, B, cap):
    value, reps = closure(A, B, cap, keep_reps=True)
    if not value.is_finite:
        return None
    return tuple(vec_to_element(A.group, v) for v in reps.values())


def _fp_rank(rows, p):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def fp_dimension(A, B, p, g, cap=DEFAULT_CAP):
    """Dimension of the elementary abelian p-group A/B over the p-element field."""
    A, B = as_nf(A, g), as_nf(B, g)
    width = window(g, [A, B], extra=cap + 2)
    _check_nested(A, B, width)
    mods = B.moduli(width)
    rows = []
    for v in pool(A, width):
        if not B.contains_vec([p * x for x in v]):
            raise NotElementaryAbelian("p times a generator is not in the smaller subgroup",
                                       vec_to_element(g, v))
        key = dense_key(B, v)
        row = []
        for r, m in zip(key, mods):
            # p*r = 0 mod m, so r is a multiple of m/p (or 0 when p does not divide m)
            row.append(r // (m // p) if m and m % p == 0 and r else 0)
        rows.append(row)
    d = _fp_rank(rows, p)
    return IndexValue.at_least(cap) if d > cap else IndexValue.finite(d)


def witness_stream(A, B, k, g):
    """k elements of A that are pairwise distinct modulo B, each checked on emission."""
    if k == 0:
        return []
    A, B = as_nf(A, g), as_nf(B, g)
    width = window(g, [A, B], extra=k + 2)
    _check_nested(A, B, width)
    gens = pool(A, width)
    out, keys = [], set()
    zero_key = dense_key(B, [0] * width)
    mods = B.moduli(width)

    def emit(vec, key):
        x = vec_to_element(g, vec)
        if not A.contains(x) or key in keys or key == zero_key:
            return False
        if any(B.contains(x - y) for y in out):
            return False
        keys.add(key)
        out.append(x)
        return True

    gen_keys = [dense_key(B, v) for v in gens]
    for v, key in zip(gens, gen_keys):
        emit(list(v), key)
        if len(out) == k:
            return out
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            key = add_keys(g, mods, gen_keys[i], gen_keys[j])
            emit([a + b for a, b in zip(gens[i], gens[j])], key)
            if len(out) == k:
                return out
    raise StreamExhausted(f"only {len(out)} certified witnesses found, {k} requested")
