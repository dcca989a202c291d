"""Symbolic subgroups and their exact membership engine.

Every expression of the grammar evaluates to a :class:`NormalForm`: a
modulus ``d_j`` per coordinate (eventually constant) plus a modulus ``e_c``
per constrained cell, denoting

    { x in G : d_j | x_j for all j,  e_c | s_c(x) for all c }

with modulus 0 meaning "equals 0".  The coordinate moduli of every reachable
normal form form a divisibility chain (``d_{j+1} | d_j``, zeros only as a
prefix), which makes the representation canonical: two expressions denote the
same subgroup iff their normal forms are equal.  Sums and intersections are
then pointwise gcd and lcm.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import GroupMismatch, UnknownConvex
from .groups import Element, lcm


# -- expressions ------------------------------------------------------------

class _Expr:
    def __str__(self):
        from .parsing import format_subgroup
        return format_subgroup(self)


@dataclass(frozen=True)
class Conv(_Expr):
    """The convex subgroup Tail(level); ``None`` is the zero subgroup."""
    level: int | None


@dataclass(frozen=True)
class Sharp(_Expr):
    base: Conv
    p: int
    s: int


@dataclass(frozen=True)
class Shift(_Expr):
    inner: object
    p: int
    k: int


@dataclass(frozen=True)
class Meet(_Expr):
    left: object
    right: object


@dataclass(frozen=True)
class Join(_Expr):
    left: object
    right: object


@dataclass(frozen=True)
class Scale(_Expr):
    p: int
    r: int
    inner: object


ZERO = Conv(None)
FULL = Conv(0)


def tail(m):
    return Conv(m)


def multiple(p, k):
    """The subgroup p^k G."""
    return Shift(ZERO, p, k)


def sharp(D, p, s):
    """The sharp subgroup: intersection of H + p^s G over convex H strictly above D."""
    return Sharp(D, p, s)


def canonical_level(g, level):
    """Clamp a tail level into the group's chain; zero is returned as None."""
    if level is None:
        return None
    if level < 0:
        raise UnknownConvex(f"negative tail level {level}")
    if g.rank is not None and level >= g.rank:
        return None
    return level


def level_index(g, level):
    """Level as an integer position on the chain (FreeLex zero is its rank)."""
    if level is None:
        return g.rank
    return level


# -- normal forms -----------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    group: object
    head: tuple
    tail: int
    cells: tuple

    def coord(self, j):
        return self.head[j] if j < len(self.head) else self.tail

    def contains(self, x):
        if x.group != self.group:
            raise GroupMismatch(f"{x.group} vs {self.group}")
        g = self.group
        for j, c in x.coords:
            if not g.divides(self.coord(j), c):
                return False
        return all(g.divides(e, s) for e, s in zip(self.cells, g.cell_sums(x.coords)))

    def contains_vec(self, vec):
        g = self.group
        for j, c in enumerate(vec):
            if c and not g.divides(self.coord(j), c):
                return False
        sums = g.cell_sums(enumerate(vec))
        return all(g.divides(e, s) for e, s in zip(self.cells, sums))

    def moduli(self, width):
        return [self.coord(j) for j in range(width)] + list(self.cells)

    def describe(self):
        head = ",".join(map(str, self.head))
        return f"d=[{head}|{self.tail}...] e={list(self.cells)}"


def _make(g, head, tail_mod, cells):
    red = g.reduce_modulus
    head = [red(d) for d in head]
    tail_mod = red(tail_mod)
    if g.rank is not None:
        k = g.rank
        head = (head + [tail_mod] * k)[:k]
        tail_mod = 0
    # every cell has infinitely many coordinates carrying the tail modulus,
    # so the cell sum is automatically a multiple of it
    cells = tuple(lcm(e, tail_mod) for e in cells)
    while head and head[-1] == tail_mod:
        head.pop()
    return NormalForm(g, tuple(head), tail_mod, cells)


def _pointwise(a, b, op):
    n = max(len(a.head), len(b.head))
    head = [op(a.coord(j), b.coord(j)) for j in range(n)]
    cells = [op(x, y) for x, y in zip(a.cells, b.cells)]
    return _make(a.group, head, op(a.tail, b.tail), cells)


def nf_join(a, b):
    return _pointwise(a, b, math.gcd)


def nf_meet(a, b):
    return _pointwise(a, b, lcm)


def nf_scale(a, c):
    return _make(a.group, [c * d for d in a.head], c * a.tail, [c * e for e in a.cells])


def _div_gcd(d, c):
    return d // math.gcd(d, c) if d else 0


def nf_preimage(a, c):
    """{y in G : c*y in a}."""
    g = a.group
    pre = _make(g, [_div_gcd(d, c) for d in a.head], _div_gcd(a.tail, c),
                [_div_gcd(e, c) for e in a.cells])
    return nf_meet(pre, nf_full(g))


@lru_cache(maxsize=None)
def nf_full(g):
    if g.rank is not None:
        return _make(g, [1] * g.rank, 0, g.cell_moduli)
    return _make(g, [], 1, g.cell_moduli)


@lru_cache(maxsize=None)
def nf_tail(g, level):
    level = canonical_level(g, level)
    if level is None:
        return _make(g, [], 0, [0] * len(g.cell_moduli))
    if g.rank is not None:
        return _make(g, [0] * level + [1] * (g.rank - level), 0, g.cell_moduli)
    return _make(g, [0] * level, 1, g.cell_moduli)


@lru_cache(maxsize=None)
def nf_multiple(g, n):
    """n G for a positive integer n."""
    return nf_scale(nf_full(g), n)


@lru_cache(maxsize=None)
def nf_tail_plus_multiple(g, level, n):
    return nf_join(nf_tail(g, level), nf_multiple(g, n))


@lru_cache(maxsize=None)
def nf_sharp(g, level, p, s):
    level = canonical_level(g, level)
    if s == 0 or level == 0:
        return nf_full(g)
    if level is None and g.rank is None:
        # The defining intersection stabilises coordinatewise: every
        # coordinate is eventually constrained by p^s.
        return _make(g, [], p ** s, g.cell_moduli)
    top = level_index(g, level)
    out = nf_full(g)
    for j in range(top):
        out = nf_meet(out, nf_tail_plus_multiple(g, j, p ** s))
    return out


@lru_cache(maxsize=4096)
def normal_form(expr, g):
    if isinstance(expr, Conv):
        return nf_tail(g, expr.level)
    if isinstance(expr, Sharp):
        return nf_sharp(g, expr.base.level, expr.p, expr.s)
    if isinstance(expr, Shift):
        return nf_join(normal_form(expr.inner, g), nf_multiple(g, expr.p ** expr.k))
    if isinstance(expr, Meet):
        return nf_meet(normal_form(expr.left, g), normal_form(expr.right, g))
    if isinstance(expr, Join):
        return nf_join(normal_form(expr.left, g), normal_form(expr.right, g))
    if isinstance(expr, Scale):
        return nf_scale(normal_form(expr.inner, g), expr.p ** expr.r)
    if isinstance(expr, NormalForm):
        return expr
    raise TypeError(f"not a subgroup expression: {expr!r}")


def as_nf(S, g):
    return S if isinstance(S, NormalForm) else normal_form(S, g)


def member(S, x):
    """Exact membership of element x in subgroup S."""
    return as_nf(S, x.group).contains(x)


def check_levels(S, g):
    """Raise UnknownConvex if S mentions a tail beyond a FreeLex rank."""
    if isinstance(S, Conv):
        if S.level is not None and g.rank is not None and S.level > g.rank:
            raise UnknownConvex(f"tail({S.level}) exceeds the rank {g.rank}")
    elif isinstance(S, Sharp):
        check_levels(S.base, g)
    elif isinstance(S, (Shift, Scale)):
        check_levels(S.inner, g)
    elif isinstance(S, (Meet, Join)):
        check_levels(S.left, g)
        check_levels(S.right, g)


# -- coset keys, windows and generator pools --------------------------------

def coset_key(nf, x):
    """Exact invariant of the coset x + S: equal keys iff equal cosets."""
    g = nf.group
    coords = []
    for j, c in x.coords:
        r = g.residue(c, nf.coord(j))
        if r:
            coords.append((j, r))
    sums = g.cell_sums(x.coords)
    return tuple(coords), tuple(g.residue(s, e) for s, e in zip(sums, nf.cells))


def window(g, nfs, extra=0, support=0):
    """Number of leading coordinates needed to see every listed subgroup.

    The window covers each head, the given support, and at least two
    coordinates of every constrained cell past those, plus ``extra``
    further coordinates.
    """
    if g.rank is not None:
        return g.rank
    base = max([len(nf.head) for nf in nfs] + [support]) + 1
    width = base
    for c in range(len(g.cell_moduli)):
        width = max(width, g.cell_coordinates(c, base, 2)[-1] + 1)
    return width + extra


def unit_vec(width, j, c):
    v = [0] * width
    v[j] = c
    return v


def pool(nf, width):
    """Generators of nf restricted to the first ``width`` coordinates.

    Free coordinate j contributes d_j e_j.  A coordinate j of constrained
    cell c contributes lcm(d_j, e_c) e_j and d_j (e_j - e_k), where k is the
    next coordinate of the same cell inside the window.
    """
    g = nf.group
    gens = []
    next_in_cell = {}
    last = {}
    for j in range(width):
        c = g.cell_of(j)
        if c is not None:
            if c in last:
                next_in_cell[last[c]] = j
            last[c] = j
    for j in range(width):
        d = nf.coord(j)
        if d == 0:
            continue
        c = g.cell_of(j)
        if c is None:
            gens.append(tuple(unit_vec(width, j, d)))
            continue
        whole = lcm(d, nf.cells[c])
        if whole:
            gens.append(tuple(unit_vec(width, j, whole)))
        k = next_in_cell.get(j)
        if k is not None:
            v = unit_vec(width, j, d)
            v[k] = -d
            gens.append(tuple(v))
    return gens


def vec_to_element(g, vec):
    return Element(g, tuple((j, c) for j, c in enumerate(vec) if c != 0))


def element_to_vec(x, width):
    v = [0] * width
    for j, c in x.coords:
        v[j] = c
    return v


def dense_key(nf, vec):
    g = nf.group
    parts = [g.residue(v, nf.coord(j)) for j, v in enumerate(vec)]
    sums = g.cell_sums(enumerate(vec))
    parts.extend(g.residue(s, e) for s, e in zip(sums, nf.cells))
    return tuple(parts)


def add_keys(g, mods, a, b):
    return tuple(g.residue(x + y, m) if m else x + y for x, y, m in zip(a, b, mods))


def random_member(S, g, rng, terms=4, coeff=3, extra=2):
    """A pseudo-random element of S built from its generator pool."""
    nf = as_nf(S, g)
    width = window(g, [nf], extra=extra)
    gens = pool(nf, width)
    acc = [0] * width
    if not gens:
        return g.zero()
    for _ in range(terms):
        c = rng.randint(-coeff, coeff)
        if g.is_local and c and rng.random() < 0.5:
            c = Fraction(c, rng.choice([u for u in (1, 3, 5, 7) if u % g.spec.p]))
        v = rng.choice(gens)
        for j, x in enumerate(v):
            if x:
                acc[j] += c * x
    return vec_to_element(g, acc)


# -- congruence helpers -----------------------------------------------------

def crt(r1, m1, r2, m2):
    """Merge x = r1 (mod m1) and x = r2 (mod m2); modulus 0 means equality."""
    if m1 == 0 and m2 == 0:
        return (r1, 0) if r1 == r2 else None
    if m1 == 0:
        return (r1, 0) if (r1 - r2) % m2 == 0 else None
    if m2 == 0:
        return (r2, 0) if (r2 - r1) % m1 == 0 else None
    d = math.gcd(m1, m2)
    if (r2 - r1) % d:
        return None
    step = m2 // d
    t = ((r2 - r1) // d * pow(m1 // d, -1, step)) % step if step > 1 else 0
    m = m1 // d * m2
    return (r1 + m1 * t) % m, m


def solve_linear(a, b, m):
    """Solutions of a*x = b (mod m) as (x0, step), step 0 meaning unique."""
    if m == 0:
        if a == 0:
            return (0, 1) if b == 0 else None
        return (b // a, 0) if b % a == 0 else None
    d = math.gcd(a, m)
    if b % d:
        return None
    step = m // d
    if step == 1:
        return 0, 1
    return (b // d) * pow(a // d, -1, step) % step, step


def fresh_cell_coordinate(g, c, beyond):
    return g.cell_coordinates(c, beyond, 1)[0]


def decompose(z, H, K):
    """Split z in H + K as (h, k) with h in H, k in K, or return None."""
    g = z.group
    H, K = as_nf(H, g), as_nf(K, g)
    h = {}
    for j, c in z.coords:
        dh, dk = H.coord(j), K.coord(j)
        if g.is_local:
            if g.divides(dh, c):
                h[j] = c
            elif g.divides(dk, c):
                h[j] = 0
            else:
                return None
            continue
        sol = crt(0, dh, c, dk)
        if sol is None:
            return None
        h[j] = sol[0]
    beyond = max([z.max_support() + 1, len(H.head), len(K.head)])
    zs = g.cell_sums(z.coords)
    hs = g.cell_sums(h.items())
    for c, (eh, ek) in enumerate(zip(H.cells, K.cells)):
        f = fresh_cell_coordinate(g, c, beyond)
        step = lcm(H.coord(f), K.coord(f))
        sol = crt(-hs[c], eh, zs[c] - hs[c], ek)
        sol = sol and crt(sol[0], sol[1], 0, step)
        if sol is None:
            return None
        h[f] = h.get(f, 0) + sol[0]
    h_el = Element(g, tuple(sorted((j, c) for j, c in h.items() if c != 0)))
    k_el = z - h_el
    if not (H.contains(h_el) and K.contains(k_el)):
        return None
    return h_el, k_el


# -- spines -----------------------------------------------------------------

@dataclass(frozen=True)
class SpineTriple:
    s_point: Conv
    t_point: Conv
    t_plus_point: Conv


def _conv(g, level):
    return Conv(canonical_level(g, level))


def in_spine(g, n, level):
    """Whether Tail(level) is a value of the n-spine map (zero always is)."""
    level = canonical_level(g, level)
    if level is None:
        return True
    if level == 0:
        return False
    return nf_tail_plus_multiple(g, level - 1, n) != nf_tail_plus_multiple(g, level, n)


def spine_scan_bound(g, n, start):
    if g.rank is not None:
        return g.rank
    return max(start, len(nf_multiple(g, n).head)) + 3


def spine_members(g, n, upto):
    """Finite spine levels <= upto, in increasing order."""
    top = upto if g.rank is None else min(upto, g.rank - 1)
    return [m for m in range(1, top + 1) if in_spine(g, n, m)]


def spine_point(n, x):
    """The largest convex H with x outside H + nG ({0} when x is in nG)."""
    g = x.group
    if nf_multiple(g, n).contains(x):
        return ZERO
    hi = x.max_support() + 1
    if g.rank is not None:
        hi = min(hi, g.rank)
    if nf_tail_plus_multiple(g, hi, n).contains(x):
        return ZERO
    lo = 1  # x is always in Tail(0) + nG = G
    while lo < hi:
        mid = (lo + hi) // 2
        if nf_tail_plus_multiple(g, mid, n).contains(x):
            lo = mid + 1
        else:
            hi = mid
    return _conv(g, lo)


def spine_maps(n, x):
    g = x.group
    s_point = spine_point(n, x)
    if x.is_zero():
        return SpineTriple(s_point, ZERO, ZERO)
    mu = x.coords[0][0]
    t_point = ZERO
    for m in range(mu + 1, spine_scan_bound(g, n, mu + 1) + 1):
        if in_spine(g, n, m):
            t_point = _conv(g, m)
            break
    t_plus = FULL
    for m in range(mu, 0, -1):
        if in_spine(g, n, m):
            t_plus = _conv(g, m)
            break
    return SpineTriple(s_point, t_point, t_plus)


# -- convexification of sharp subgroups -------------------------------------

@dataclass(frozen=True)
class ConvexifyResult:
    convex: Conv | None
    conditions: tuple  # the three nonconvexity conditions, as booleans
    counts: tuple      # distinct beta + p^s G classes found below each checked gamma
    witness: Element | None


def convexify_sharp(alpha, p, s, g, count_cap=8):
    """A convex D with D + p^s G equal to the sharp subgroup, or None.

    Alongside the answer, the three nonconvexity conditions are evaluated
    independently on the chain: (1) between any spine level above alpha and
    alpha there are infinitely many distinct classes beta + p^s G (checked up
    to ``count_cap``); (2) alpha is the intersection of the spine levels above
    it; (3) alpha is the spine value of some element.
    """
    a = canonical_level(g, alpha.level)
    target = nf_sharp(g, a, p, s)
    q = p ** s
    found = None
    if nf_tail_plus_multiple(g, None, q) == target:
        found = ZERO
    else:
        top = len(target.head) + 1 if g.rank is None else g.rank - 1
        for j in range(top, -1, -1):
            if nf_tail_plus_multiple(g, j, q) == target:
                found = _conv(g, j)
                break

    a_idx = level_index(g, a)
    infinite = a is None and g.rank is None
    bound = spine_scan_bound(g, q, 1)
    above = spine_members(g, q, bound if infinite else a_idx - 1)

    # (1)
    counts = []
    cond1 = True
    for gamma in above:
        if not infinite:
            hi = a_idx
        else:
            hi = gamma + 1 + count_cap + bound
        classes = {nf_tail_plus_multiple(g, b, q) for b in range(gamma + 1, hi)
                   if in_spine(g, q, b)}
        counts.append(min(len(classes), count_cap))
        if len(classes) < count_cap:
            cond1 = False
    # (2)
    if infinite:
        cond2 = in_spine(g, q, bound + 1)
    else:
        cond2 = a_idx == 0
    # (3)
    witness = None
    width = window(g, [target], extra=2)
    cands = pool(target, width) + pool(nf_full(g), width)
    alpha_q = nf_tail_plus_multiple(g, a, q)
    for v in cands:
        x = vec_to_element(g, v)
        if target.contains(x) and not alpha_q.contains(x) and spine_point(q, x) == Conv(a):
            witness = x
            break
    cond3 = witness is not None
    return ConvexifyResult(found, (cond1, cond2, cond3), tuple(counts), witness)


# -- equality ---------------------------------------------------------------

@dataclass(frozen=True)
class EqualByNormalForm:
    pass


@dataclass(frozen=True)
class NotEqual:
    witness: Element
    in_first: bool


@dataclass(frozen=True)
class UndecidedAfterSampling:
    samples: int


def subgroup_eq(S1, S2, g, samples=200, seed=0):
    """Three-valued equality: normal forms decide equality, witnesses refute it."""
    a, b = as_nf(S1, g), as_nf(S2, g)
    if a == b:
        return EqualByNormalForm()
    width = window(g, [a, b], extra=1)
    for first, (x_nf, y_nf) in ((True, (a, b)), (False, (b, a))):
        for v in pool(x_nf, width):
            if not y_nf.contains_vec(v):
                return NotEqual(vec_to_element(g, v), first)
    rng = random.Random(seed)
    for _ in range(samples):
        for first, (x_nf, y_nf) in ((True, (a, b)), (False, (b, a))):
            x = random_member(x_nf, g, rng)
            if not y_nf.contains(x):
                return NotEqual(x, first)
    return UndecidedAfterSampling(samples)


def random_expression(g, rng, depth=3, primes=(2, 3), max_level=4, max_exp=3):
    """A pseudo-random expression of the full grammar with nesting <= depth."""
    top = max_level if g.rank is None else g.rank

    def level():
        return None if rng.random() < 0.25 else rng.randint(0, top)

    def build(d):
        kinds = ["conv", "sharp"] if d <= 1 else ["conv", "sharp", "shift", "meet", "join", "scale"]
        kind = rng.choice(kinds)
        if kind == "conv":
            return Conv(level())
        if kind == "sharp":
            return Sharp(Conv(level()), rng.choice(primes), rng.randint(1, max_exp))
        if kind == "shift":
            return Shift(build(d - 1), rng.choice(primes), rng.randint(0, max_exp))
        if kind == "scale":
            return Scale(rng.choice(primes), rng.randint(0, 2), build(d - 1))
        pair = (build(d - 1), build(d - 1))
        return Meet(*pair) if kind == "meet" else Join(*pair)

    return build(depth)
