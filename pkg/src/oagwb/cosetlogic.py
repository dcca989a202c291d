"""Coset saturation in finite abelian p-groups.

A coset system is a base coset a_0 + M_0 together with pairwise disjoint
excluded cosets a_i + M_i inside it, describing

    Y = (a_0 + M_0) minus the union of the a_i + M_i.

:func:`saturation_membership` decides y in Y + G' by the two-condition index
criterion; :func:`brute_membership` materialises Y and checks directly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import AmbientTooLarge
from .groups import is_prime

BRUTE_LIMIT = 10 ** 6


@dataclass(frozen=True)
class FiniteAmbient:
    """The group Z/m_1 x ... x Z/m_r with every m_j a power of one prime."""

    moduli: tuple

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(self.moduli))
        if not self.moduli:
            raise ValueError("ambient needs at least one cyclic factor")
        primes = {_prime_of(m) for m in self.moduli}
        if len(primes) != 1:
            raise ValueError(f"moduli {self.moduli} are not powers of a single prime")

    @property
    def p(self):
        return _prime_of(self.moduli[0])

    @property
    def order(self):
        out = 1
        for m in self.moduli:
            out *= m
        return out

    def reduce(self, x):
        return tuple(a % m for a, m in zip(x, self.moduli))

    def add(self, x, y):
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def sub(self, x, y):
        return tuple((a - b) % m for a, b, m in zip(x, y, self.moduli))

    def zero(self):
        return (0,) * len(self.moduli)

    def elements(self):
        if self.order > BRUTE_LIMIT:
            raise AmbientTooLarge(f"ambient of order {self.order} exceeds {BRUTE_LIMIT}")
        return itertools.product(*(range(m) for m in self.moduli))

    def span(self, gens):
        """The subgroup generated by ``gens``, as a frozenset."""
        out = {self.zero()}
        frontier = [self.zero()]
        gens = [self.reduce(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in out:
                        out.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(out)

    def full_gens(self):
        return [tuple(1 if i == j else 0 for i in range(len(self.moduli)))
                for j in range(len(self.moduli))]

    def coset(self, rep, sub):
        return frozenset(self.add(rep, h) for h in sub)

    def sum_of(self, a, b):
        return frozenset(self.add(x, y) for x in a for y in b)


def _prime_of(m):
    if m < 2:
        raise ValueError(f"modulus {m} is not a prime power")
    for p in range(2, m + 1):
        if m % p == 0:
            if not is_prime(p):
                continue
            while m % p == 0:
                m //= p
            if m != 1:
                raise ValueError("modulus is not a prime power")
            return p


@dataclass(frozen=True)
class CosetSystem:
    base_rep: tuple
    base_gens: tuple
    exclusions: tuple = field(default_factory=tuple)  # ((rep, gens), ...)

    def to_json(self, amb, gprime=None):
        data = {
            "ambient": list(amb.moduli),
            "base": {"rep": list(self.base_rep), "gens": [list(g) for g in self.base_gens]},
            "exclusions": [{"rep": list(r), "gens": [list(g) for g in gs]}
                           for r, gs in self.exclusions],
        }
        if gprime is not None:
            data["gprime"] = [list(g) for g in gprime]
        return data


EMPTY = "EmptyIntersection"


def load_system(text):
    """Parse the JSON coset-system format; returns (system, ambient, gprime)."""
    data = json.loads(text)
    amb = FiniteAmbient(tuple(data["ambient"]))
    base = data["base"]
    excl = tuple((amb.reduce(e["rep"]), tuple(amb.reduce(g) for g in e["gens"]))
                 for e in data.get("exclusions", []))
    sys_ = CosetSystem(amb.reduce(base["rep"]), tuple(amb.reduce(g) for g in base["gens"]), excl)
    gprime = [amb.reduce(g) for g in data.get("gprime", [])]
    return sys_, amb, gprime


def validate_system(sys_, amb):
    """List of violations of the containment and disjointness hypotheses."""
    problems = []
    base = amb.coset(sys_.base_rep, amb.span(sys_.base_gens))
    cosets = [amb.coset(r, amb.span(gs)) for r, gs in sys_.exclusions]
    for i, c in enumerate(cosets, 1):
        if not c <= base:
            problems.append(f"containment: exclusion {i} is not inside the base coset")
        elif c == base:
            problems.append(f"containment: exclusion {i} is the whole base coset")
    for i, j in itertools.combinations(range(len(cosets)), 2):
        common = cosets[i] & cosets[j]
        if common:
            problems.append(f"disjointness: exclusions {i + 1} and {j + 1} share "
                            f"{sorted(common)[0]}")
    return problems


def _is_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


@lru_cache(maxsize=256)
def _criterion_data(sys_, gprime, amb):
    gp = amb.span(gprime)
    m0 = amb.span(sys_.base_gens)
    m0_gp = len(m0 & gp)
    excl = []
    for rep, gens in sys_.exclusions:
        mi = amb.span(gens)
        size = len(mi & gp)
        ratio = m0_gp // size
        assert ratio * size == m0_gp and _is_power(ratio, amb.p), \
            f"index {ratio} is not a power of {amb.p}"
        excl.append((rep, amb.sum_of(mi, gp), Fraction(1, ratio)))
    return amb.sum_of(m0, gp), tuple(excl)


def saturation_membership(sys_, gprime, y, amb):
    """y in Y + G' by the index criterion, with exact rational arithmetic.

    Condition (1): y - a_0 in M_0 + G'.  Condition (2): the reciprocal
    indices [M_0 cap G' : M_i cap G'] over the exclusions with
    y - a_i in M_i + G' sum to less than 1.  Every index is checked to be a
    power of p.
    """
    base_sum, excl = _criterion_data(sys_, tuple(map(tuple, gprime)), amb)
    y = amb.reduce(y)
    if amb.sub(y, sys_.base_rep) not in base_sum:
        return False
    total = sum((w for rep, mi_gp, w in excl if amb.sub(y, rep) in mi_gp), Fraction(0))
    return total < 1


def saturated_set(sys_, gprime, amb):
    """Y + G' materialised by enumeration."""
    if amb.order > BRUTE_LIMIT:
        raise AmbientTooLarge(f"ambient of order {amb.order} exceeds {BRUTE_LIMIT}")
    base = amb.coset(sys_.base_rep, amb.span(sys_.base_gens))
    removed = set()
    for rep, gens in sys_.exclusions:
        removed |= amb.coset(rep, amb.span(gens))
    Y = base - removed
    return amb.sum_of(Y, amb.span(gprime))


def brute_membership(sys_, gprime, y, amb):
    return amb.reduce(y) in saturated_set(sys_, gprime, amb)


# -- the threshold of sums of reciprocal powers -----------------------------

def _failure(n, k, N):
    """A multiset showing that cut-off N fails, or None.

    Cut-off N fails iff some k powers of n have reciprocal sum >= 1 while the
    ones below n^N sum to less than 1.  Exponents >= N only contribute through
    the unrestricted sum, and each such term is largest at exponent exactly N,
    so it suffices to try j <= k exponents below N (restricted sum S < 1)
    padded with k - j copies of exponent N.
    """
    for j in range(k + 1):
        for exps in itertools.combinations_with_replacement(range(N), j):
            S = sum(Fraction(1, n ** e) for e in exps)
            if S < 1 and S + Fraction(k - j, n ** N) >= 1:
                return exps + (N,) * (k - j)
    return None


def threshold_N(n, k):
    """Least N such that the reciprocal-sum test may ignore powers >= n^N.

    Termination: with at most k terms, the restricted sums below 1 are bounded
    away from 1 by a gap delta(n, k) > 0 (finitely many sums have all terms
    >= n^-E once E is fixed, and smaller terms add less than k n^-E).  Once
    k * n^-N < delta no padding can close the gap, so the loop stops at the
    smallest exponent E with k * n^-E below that gap, or earlier.
    """
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    N = 0
    while _failure(n, k, N) is not None:
        N += 1
    return N


def threshold_holds_on_grid(n, k, N, max_exp):
    """Exhaustively check the cut-off N for all k-multisets of exponents <= max_exp."""
    for exps in itertools.combinations_with_replacement(range(max_exp + 1), k):
        full = sum(Fraction(1, n ** e) for e in exps) >= 1
        cut = sum(Fraction(1, n ** e) for e in exps if e < N) >= 1
        if full != cut:
            return False, exps
    return True, None


# -- boolean combinations of cosets ------------------------------------------

def normalize_combination(positive, negative, amb):
    """Turn (AND of positive cosets) minus (OR of negative cosets) into a coset system.

    Cosets are (rep, gens) pairs.  Returns EMPTY when the positives do not meet.
    """
    if positive:
        current = None
        for rep, gens in positive:
            c = amb.coset(amb.reduce(rep), amb.span(gens))
            current = c if current is None else current & c
        if not current:
            return EMPTY
        base_sub = None
        for _, gens in positive:
            s = amb.span(gens)
            base_sub = s if base_sub is None else base_sub & s
        base_rep = min(current)
    else:
        base_sub = amb.span(amb.full_gens())
        base_rep = amb.zero()
    base = amb.coset(base_rep, base_sub)
    pieces = []
    for rep, gens in negative:
        c = amb.coset(amb.reduce(rep), amb.span(gens)) & base
        if c:
            pieces.append((c, amb.span(gens) & base_sub))
    pieces.sort(key=lambda t: -len(t[0]))
    kept = []
    for c, sub in pieces:
        if any(c <= k for k, _ in kept):
            continue
        if any(c & k for k, _ in kept):
            raise ValueError("negative cosets overlap without nesting")
        kept.append((c, sub))
    excl = tuple((min(c), _gens_of(sub, amb)) for c, sub in kept)
    return CosetSystem(base_rep, _gens_of(base_sub, amb), excl)


def _gens_of(sub, amb):
    """A small generating list for a subgroup given as a set."""
    gens = []
    span = {amb.zero()}
    for x in sorted(sub):
        if x not in span:
            gens.append(x)
            span = set(amb.span(gens))
    return tuple(gens)


# -- random valid systems ----------------------------------------------------

def random_subgroup_gens(amb, rng, count=2, inside=None):
    pool_ = sorted(inside) if inside is not None else list(amb.elements())
    return tuple(rng.choice(pool_) for _ in range(rng.randint(0, count)))


def random_system(amb, rng, max_exclusions=3):
    """A random coset system satisfying containment and disjointness."""
    m0_gens = random_subgroup_gens(amb, rng, count=3)
    m0 = amb.span(m0_gens)
    a0 = amb.reduce(tuple(rng.randrange(m) for m in amb.moduli))
    base = amb.coset(a0, m0)
    excl, used = [], set()
    for _ in range(rng.randint(0, max_exclusions)):
        for _attempt in range(10):
            gens = random_subgroup_gens(amb, rng, count=2, inside=m0)
            rep = rng.choice(sorted(base))
            c = amb.coset(rep, amb.span(gens))
            if c != base and not (c & used):
                excl.append((rep, gens))
                used |= c
                break
    return CosetSystem(a0, m0_gens, tuple(excl))


def random_gprime(amb, rng):
    return list(random_subgroup_gens(amb, rng, count=2))


def sweep(sys_, gprime, amb):
    """Compare both deciders on every y; returns the list of disagreeing y."""
    brute = saturated_set(sys_, gprime, amb)
    return [y for y in amb.elements()
            if saturation_membership(sys_, gprime, y, amb) != (y in brute)]
