"""Concrete ordered abelian groups with exact element arithmetic.

Four families are supported, all living inside finitely supported sequences
indexed by the natural numbers and ordered lexicographically with index 0
most significant (so the convex subgroups are exactly the "tails"):

* ``FreeLex(k)``   -- Z^k.
* ``LocalLex(p)``  -- the direct sum of countably many copies of Z_(p).
* ``PolyMod(p, n)`` -- integer polynomials q(t) with p^n | sum of coefficients.
* ``PolyPart(...)`` -- integer polynomials with p_i^{n_i} | s_i(q) on the cells
  U_i = {m >= 1 : v_2(m) = i} of a partition of the positive integers.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import ConstraintViolation, GroupMismatch, InvalidSpec, NotDivisible


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def valuation(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def lcm(a, b):
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // math.gcd(a, b)


class Family(enum.Enum):
    FREE_LEX = "freelex"
    LOCAL_LEX = "locallex"
    POLY_MOD = "polymod"
    POLY_PART = "polypart"


@dataclass(frozen=True)
class GroupSpec:
    family: Family
    rank: int | None = None
    p: int | None = None
    n: int | None = None
    # (prime, exponent, cell index) triples, PolyPart only
    constraints: tuple[tuple[int, int, int], ...] = ()

    @classmethod
    def free_lex(cls, rank):
        return cls(Family.FREE_LEX, rank=rank)

    @classmethod
    def local_lex(cls, p):
        return cls(Family.LOCAL_LEX, p=p)

    @classmethod
    def poly_mod(cls, p, n):
        return cls(Family.POLY_MOD, p=p, n=n)

    @classmethod
    def poly_part(cls, constraints):
        """``constraints`` is a list of (p, n, cell) or (p, n) pairs; bare
        pairs are assigned to cells 0, 1, 2, ... in order."""
        triples = []
        for i, c in enumerate(constraints):
            triples.append(tuple(c) if len(c) == 3 else (c[0], c[1], i))
        return cls(Family.POLY_PART, constraints=tuple(triples))

    def validate(self):
        fam = self.family
        if fam is Family.FREE_LEX:
            if self.rank is None or self.rank < 1:
                raise InvalidSpec(f"rank must be >= 1, got {self.rank}")
        elif fam is Family.LOCAL_LEX:
            if self.p is None or not is_prime(self.p):
                raise InvalidSpec(f"{self.p} is not prime")
        elif fam is Family.POLY_MOD:
            if self.p is None or not is_prime(self.p):
                raise InvalidSpec(f"{self.p} is not prime")
            if self.n is None or self.n < 1:
                raise InvalidSpec(f"exponent must be >= 1, got {self.n}")
        elif fam is Family.POLY_PART:
            cells = [c for _, _, c in self.constraints]
            if len(set(cells)) != len(cells):
                raise InvalidSpec(f"duplicate cell index in {cells}")
            for p, n, c in self.constraints:
                if not is_prime(p):
                    raise InvalidSpec(f"{p} is not prime")
                if n < 1:
                    raise InvalidSpec(f"exponent must be >= 1, got {n}")
                if c < 0:
                    raise InvalidSpec(f"cell index must be >= 0, got {c}")

    def __str__(self):
        fam = self.family
        if fam is Family.FREE_LEX:
            return f"freelex({self.rank})"
        if fam is Family.LOCAL_LEX:
            return f"locallex(p={self.p})"
        if fam is Family.POLY_MOD:
            return f"polymod(p={self.p},n={self.n})"
        body = ",".join(f"({p},{n})" for p, n, _ in self.constraints)
        if [c for _, _, c in self.constraints] != list(range(len(self.constraints))):
            body = ",".join(f"({p},{n},{c})" for p, n, c in self.constraints)
        return f"polypart({body})"


@dataclass(frozen=True, eq=True)
class Group:
    """Immutable handle for a constructed group; build with :func:`make_group`."""

    spec: GroupSpec
    # Internal override of the cell moduli; only used to build deliberately
    # corrupted handles for harness self-tests.
    _cell_override: tuple[int, ...] | None = field(default=None, compare=True, repr=False)

    @property
    def family(self):
        return self.spec.family

    @property
    def rank(self):
        """Number of coordinates, or None for the infinite families."""
        return self.spec.rank if self.family is Family.FREE_LEX else None

    @property
    def is_local(self):
        return self.family is Family.LOCAL_LEX

    @cached_property
    def _cell_table(self):
        if self.family is Family.POLY_MOD:
            return {0: 0}, (self.spec.p ** self.spec.n,)
        if self.family is Family.POLY_PART:
            ordered = sorted(self.spec.constraints, key=lambda t: t[2])
            index = {c: i for i, (_, _, c) in enumerate(ordered)}
            return index, tuple(p ** n for p, n, _ in ordered)
        return {}, ()

    @property
    def cell_moduli(self):
        """Sum moduli p_c^{n_c}, one per constrained cell."""
        if self._cell_override is not None:
            return self._cell_override
        return self._cell_table[1]

    @property
    def cell_labels(self):
        """Partition-cell index of each constrained cell (PolyPart), in order."""
        if self.family is Family.POLY_PART:
            return tuple(sorted(c for _, _, c in self.spec.constraints))
        return (0,) if self.family is Family.POLY_MOD else ()

    def cell_of(self, j):
        """Position of coordinate ``j``'s constrained cell, or None."""
        fam = self.family
        if fam is Family.POLY_MOD:
            return 0
        if fam is Family.POLY_PART:
            if j == 0:
                return None
            return self._cell_table[0].get((j & -j).bit_length() - 1)
        return None

    def partition_cell(self, j):
        """Index i of the partition cell U_i containing j >= 1 (PolyPart)."""
        return None if j == 0 else valuation(j, 2)

    def cell_coordinates(self, c, start, count):
        """The first ``count`` coordinates >= start lying in constrained cell c."""
        out = []
        j = max(start, 0)
        if self.family is Family.POLY_MOD:
            return list(range(j, j + count))
        label = self.cell_labels[c]
        # U_i = {2^i * odd}
        step = 2 ** (label + 1)
        first = 2 ** label
        if j > first:
            first += -(-(j - first) // step) * step
        while len(out) < count:
            out.append(first)
            first += step
        return out

    def in_universe(self, j):
        return j >= 0 and (self.rank is None or j < self.rank)

    # -- coefficient-domain arithmetic ------------------------------------

    def reduce_modulus(self, m):
        """Canonical generator of the ideal mZ in the coefficient ring."""
        m = abs(m)
        if self.is_local and m:
            p = self.spec.p
            return p ** valuation(m, p)
        return m

    def divides(self, m, v):
        """Whether m divides v in the coefficient ring (0 divides only 0)."""
        if m == 0:
            return v == 0
        if self.is_local:
            if v == 0:
                return True
            p = self.spec.p
            v = Fraction(v)
            return valuation(v.numerator, p) >= valuation(m, p)
        return v % m == 0

    def residue(self, v, m):
        """Canonical representative of v modulo m (v itself when m == 0)."""
        if m == 0:
            return v
        if self.is_local:
            m = self.reduce_modulus(m)
            v = Fraction(v)
            return (v.numerator * pow(v.denominator, -1, m)) % m
        return v % m

    def coerce(self, c):
        if self.is_local:
            c = Fraction(c)
            if c.denominator % self.spec.p == 0:
                raise ConstraintViolation(
                    f"coefficient {c} has denominator divisible by {self.spec.p}")
            return c
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise ConstraintViolation(f"coefficient {c} is not an integer")
            return c.numerator
        if not isinstance(c, int):
            raise ConstraintViolation(f"coefficient {c!r} is not an integer")
        return c

    def cell_sums(self, coords):
        sums = [0] * len(self.cell_moduli)
        for j, c in coords:
            k = self.cell_of(j)
            if k is not None:
                sums[k] += c
        return sums

    def constraint_failure(self, coords):
        """Description of the first violated constraint, or None."""
        for j, c in coords:
            if not self.in_universe(j):
                return f"index {j} outside the coordinate range of {self.spec}"
        for k, (s, m) in enumerate(zip(self.cell_sums(coords), self.cell_moduli)):
            if s % m:
                if self.family is Family.POLY_MOD:
                    return f"{m} does not divide the coefficient sum {s}"
                return (f"{m} does not divide the sum {s} over cell "
                        f"U_{self.cell_labels[k]}")
        return None

    def element(self, coords):
        """Build an element from a mapping or iterable of (index, coefficient)."""
        items = coords.items() if isinstance(coords, dict) else coords
        acc = {}
        for j, c in items:
            c = self.coerce(c)
            acc[j] = acc.get(j, 0) + c
        canon = tuple(sorted((j, c) for j, c in acc.items() if c != 0))
        problem = self.constraint_failure(canon)
        if problem:
            raise ConstraintViolation(problem)
        return Element(self, canon)

    def from_list(self, values):
        return self.element(enumerate(values))

    def zero(self):
        return Element(self, ())

    def basis(self, j, coeff=1):
        return self.element({j: coeff})

    def __str__(self):
        return str(self.spec)


def make_group(spec):
    spec.validate()
    return Group(spec)


@dataclass(frozen=True)
class Element:
    group: Group
    coords: tuple  # sorted ((index, coefficient), ...) with no zero entries

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.coords))

    def __getitem__(self, j):
        return self._map.get(j, 0)

    @property
    def support(self):
        return [j for j, _ in self.coords]

    def max_support(self):
        return self.coords[-1][0] if self.coords else -1

    def is_zero(self):
        return not self.coords

    def _same(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.group != self.group:
            raise GroupMismatch(f"{self.group} vs {other.group}")
        return True

    def _combine(self, other, sign):
        acc = dict(self._map)
        for j, c in other.coords:
            acc[j] = acc.get(j, 0) + sign * c
        return Element(self.group, tuple(sorted((j, c) for j, c in acc.items() if c != 0)))

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self):
        return Element(self.group, tuple((j, -c) for j, c in self.coords))

    def __mul__(self, c):
        if not isinstance(c, int):
            return NotImplemented
        if c == 0:
            return self.group.zero()
        return Element(self.group, tuple((j, c * v) for j, v in self.coords))

    __rmul__ = __mul__

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def sign(self):
        return 0 if not self.coords else (1 if self.coords[0][1] > 0 else -1)

    def __str__(self):
        from .parsing import format_element
        return format_element(self)

    def __repr__(self):
        return f"Element({self.group.spec}, {self})"


def add(x, y):
    return x + y


def scalar_mul(c, x):
    return c * x


def compare(x, y):
    """-1, 0 or 1 according to the lexicographic order (index 0 dominant)."""
    x._same(y)
    return (x - y).sign()


def divide_exact(x, c):
    """The unique y in the group with c*y == x; raises NotDivisible."""
    if c == 0:
        raise ZeroDivisionError("division by zero")
    g = x.group
    out = []
    for j, v in x.coords:
        q = Fraction(v, c) if not g.is_local else Fraction(v) / c
        if g.is_local:
            if q.denominator % g.spec.p == 0:
                raise NotDivisible(f"{x} is not divisible by {c}")
        elif q.denominator != 1:
            raise NotDivisible(f"{x} is not divisible by {c}")
        else:
            q = q.numerator
        out.append((j, q))
    problem = g.constraint_failure(out)
    if problem:
        raise NotDivisible(f"{x}/{c} leaves the group: {problem}")
    return Element(g, tuple(out))


_ODD_DENOMS = (1, 1, 1, 3, 5, 7, 9, 11, 13, 15)


def random_element(g, support_bound, coeff_bound, seed):
    """Deterministic pseudo-random group element.

    ``seed`` is an integer or a ``random.Random`` instance (which is advanced).
    Coefficients are drawn freely on [0, support_bound) and each constrained
    cell sum is then repaired by adjusting one in-cell coefficient.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    width = support_bound if g.rank is None else min(support_bound, g.rank)
    acc = {}
    for j in range(width):
        c = rng.randint(-coeff_bound, coeff_bound)
        if g.is_local and c:
            den = rng.choice([d for d in _ODD_DENOMS if d % g.spec.p])
            c = Fraction(c, den)
        acc[j] = c
    for k, m in enumerate(g.cell_moduli):
        coords = [j for j in range(width) if g.cell_of(j) == k]
        if not coords:
            continue
        s = sum(acc[j] for j in coords)
        fix = rng.choice(coords)
        acc[fix] -= s % m
    return g.element(acc)
