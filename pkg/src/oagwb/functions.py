"""Projected linear functions, their boolean combinations, and the two
counterexample constructions.

A projected linear function with coefficients r_i, divisor s, offset g,
shift k and target H sends a tuple x to the set of cosets y + H with

    s*y = r_1 x_1 + ... + r_d x_d + g + k*1_D   (mod H),

where D is the convex part of H and 1_D is the least positive element of
G/D when that quotient is discrete (0 otherwise).  Results are sets of
:class:`~oagwb.quotients.Coset`; the empty set means "undefined here".
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (CapExceeded, ConstraintViolation, InadmissibleTarget,
                     MultiplicityExceeded, WrongFamily)
from .groups import Element, Family, valuation
from .quotients import DEFAULT_CAP, Coset, transversal
from .subgroups import (ZERO, Conv, Meet, Sharp, Shift, as_nf, canonical_level,
                        crt, decompose, fresh_cell_coordinate, member, nf_meet,
                        nf_preimage, random_member, solve_linear)


@dataclass(frozen=True)
class LinearFn:
    coeffs: tuple
    divisor: int = 1
    offset: Element | None = None
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.divisor == 0:
            raise ValueError("divisor must be nonzero")

    @property
    def arity(self):
        return len(self.coeffs)


def unit_of_convex(g, level):
    """A representative of the least positive element of G/Tail(level), or 0."""
    level = canonical_level(g, level)
    if level == 0 or g.is_local:
        return g.zero()
    if level is None:
        if g.rank is None:
            return g.zero()
        level = g.rank
    j = level - 1
    c = g.cell_of(j)
    if c is None:
        return g.basis(j)
    k = fresh_cell_coordinate(g, c, level)
    return g.element({j: 1, k: -1})


def convex_part(H):
    """The convex subgroup D of an admissible target, else None."""
    if isinstance(H, Conv):
        return H
    if isinstance(H, Sharp):
        return H.base
    if isinstance(H, Shift) and isinstance(H.inner, (Conv, Sharp)):
        return convex_part(H.inner)
    return None


@dataclass(frozen=True)
class ProjectedLinearFn:
    base: LinearFn
    target: object
    group: object
    unit: Element

    def evaluate(self, xs, cap=DEFAULT_CAP):
        return eval_projected(self, xs, cap)

    def to_json(self):
        return {"op": "leaf", "coeffs": list(self.base.coeffs), "divisor": self.base.divisor,
                "offset": str(self.base.offset or self.group.zero()),
                "shift": self.base.shift, "target": str(self.target)}


def project(f, H, g):
    """Bind f to the quotient by H, fixing the shift unit 1_D."""
    D = convex_part(H)
    if D is None:
        raise InadmissibleTarget(f"{H} is not of the form D + p^r G or D^[p^s] + p^r G")
    unit = unit_of_convex(g, D.level) if f.shift else g.zero()
    return ProjectedLinearFn(f, H, g, unit)


def _solve_coordinate(g, s, t, d):
    """Some y with s*y = t modulo the coordinate modulus d, or None."""
    if g.is_local:
        if t == 0:
            return 0
        p = g.spec.p
        vt = valuation(Fraction(t).numerator, p)
        vs = valuation(s, p)
        if vt >= vs:
            return Fraction(t) / s
        if d and vt >= valuation(d, p):
            return 0
        return None
    sol = solve_linear(s, t, d)
    return None if sol is None else sol[0]


def solve_congruence(s, t, H):
    """Some y in G with s*y - t in H, or None when there is none.

    Coordinates are solved one at a time; each constrained cell's sum is then
    corrected on a fresh coordinate of that cell, in steps that keep s*y
    inside the tail modulus.
    """
    g = t.group
    H = as_nf(H, g)
    y = {}
    for j, c in t.coords:
        v = _solve_coordinate(g, s, c, H.coord(j))
        if v is None:
            return None
        if v:
            y[j] = v
    beyond = max(t.max_support() + 1, len(H.head))
    ts = g.cell_sums(t.coords)
    ys = g.cell_sums(y.items())
    for c, (e, m) in enumerate(zip(H.cells, g.cell_moduli)):
        f = fresh_cell_coordinate(g, c, beyond)
        T = H.coord(f)
        step = T // math.gcd(s, T) if T else 0
        if step == 0:
            continue
        a = solve_linear(s * step, ts[c] - s * ys[c], e)
        b = solve_linear(step, -ys[c], m)
        if a is None or b is None:
            return None
        w = crt(a[0], a[1], b[0], b[1])
        if w is None:
            return None
        y[f] = y.get(f, 0) + step * w[0]
    try:
        out = g.element(y)
    except ConstraintViolation:
        return None
    if not H.contains(s * out - t):
        return None
    return out


def linear_value(f, xs, g, unit):
    """r_1 x_1 + ... + g + k*1_D."""
    if len(xs) != f.arity:
        raise ValueError(f"expected {f.arity} arguments, got {len(xs)}")
    acc = f.offset if f.offset is not None else g.zero()
    for r, x in zip(f.coeffs, xs):
        acc = acc + r * x
    return acc + f.shift * unit


def eval_projected(pf, xs, cap=DEFAULT_CAP):
    """All cosets y + H solving the defining congruence; CapExceeded past cap."""
    g = pf.group
    f = pf.base
    t = linear_value(f, xs, g, pf.unit)
    s = f.divisor
    if s < 0:
        s, t = -s, -t
    y0 = solve_congruence(s, t, pf.target)
    if y0 is None:
        return frozenset()
    H = as_nf(pf.target, g)
    reps = transversal(nf_preimage(H, s), H, g, cap)
    return frozenset(Coset(pf.target, y0 + r) for r in reps)


def meet_cosets(a, b):
    """The coset of H cap K equal to (a + H) cap (b + K), or None when disjoint."""
    split = decompose(a.rep - b.rep, a.subgroup, b.subgroup)
    if split is None:
        return None
    h, _ = split
    return Coset(Meet(a.subgroup, b.subgroup), a.rep - h)


def intersect_values(A, B):
    out = set()
    for a in A:
        for b in B:
            c = meet_cosets(a, b)
            if c is not None:
                out.add(c)
    return frozenset(out)


@dataclass(frozen=True)
class IntersectedFn:
    """The partial function x -> f(x) cap g(x) into G/(H cap K)."""

    left: object
    right: object

    @property
    def target(self):
        return Meet(self.left.target, self.right.target)

    @property
    def group(self):
        return self.left.group

    def evaluate(self, xs, cap=DEFAULT_CAP):
        return intersect_values(self.left.evaluate(xs, cap), self.right.evaluate(xs, cap))


def intersect(f, g):
    return IntersectedFn(f, g)


def recast(cosets, target, g, cap=DEFAULT_CAP):
    """Express cosets of some subgroup as cosets of ``target``.

    Refines into finer cosets when target is smaller, merges when it is
    larger; the two subgroups must be comparable.
    """
    out = set()
    T = as_nf(target, g)
    for c in cosets:
        S = c.nf
        if S == T:
            out.add(Coset(target, c.rep))
            continue
        if nf_meet(S, T) == T:
            for r in transversal(S, T, g, cap):
                out.add(Coset(target, c.rep + r))
        elif nf_meet(S, T) == S:
            out.add(Coset(target, c.rep))
        else:
            raise ValueError(f"{c.subgroup} and {target} are not comparable")
    return frozenset(out)


# -- combination trees --------------------------------------------------------

@dataclass(frozen=True)
class FnLeaf:
    fn: object

    @property
    def target(self):
        return self.fn.target

    def evaluate(self, xs, cap):
        return self.fn.evaluate(xs, cap)

    def to_json(self):
        if isinstance(self.fn, IntersectedFn):
            return {"op": "meet", "args": [FnLeaf(self.fn.left).to_json(),
                                          FnLeaf(self.fn.right).to_json()]}
        return self.fn.to_json()


@dataclass(frozen=True)
class FnMeet:
    args: tuple

    @property
    def target(self):
        t = self.args[0].target
        for a in self.args[1:]:
            t = Meet(t, a.target)
        return t

    def evaluate(self, xs, cap):
        vals = self.args[0].evaluate(xs, cap)
        for a in self.args[1:]:
            vals = intersect_values(vals, a.evaluate(xs, cap))
        return vals

    def to_json(self):
        return {"op": "meet", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class FnUnion:
    args: tuple

    @property
    def target(self):
        return FnMeet(self.args).target

    def evaluate(self, xs, cap):
        g = _tree_group(self)
        out = set()
        for a in self.args:
            out |= recast(a.evaluate(xs, cap), self.target, g, cap)
        return frozenset(out)

    def to_json(self):
        return {"op": "union", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class FnMinus:
    left: object
    right: object

    @property
    def target(self):
        return Meet(self.left.target, self.right.target)

    def evaluate(self, xs, cap):
        g = _tree_group(self)
        keep = recast(self.left.evaluate(xs, cap), self.target, g, cap)
        drop = recast(self.right.evaluate(xs, cap), self.target, g, cap)
        return keep - drop

    def to_json(self):
        return {"op": "minus", "args": [self.left.to_json(), self.right.to_json()]}


def _tree_group(node):
    if isinstance(node, FnLeaf):
        return node.fn.group
    if isinstance(node, FnMinus):
        return _tree_group(node.left)
    return _tree_group(node.args[0])


# -- piece domains -------------------------------------------------------------

@dataclass(frozen=True)
class Always:
    def holds(self, xs):
        return True

    def to_json(self):
        return {"op": "true"}


@dataclass(frozen=True)
class InCoset:
    """x_var lies in offset + subgroup."""

    var: int
    subgroup: object
    offset: Element | None = None

    def holds(self, xs):
        x = xs[self.var]
        if self.offset is not None:
            x = x - self.offset
        return member(self.subgroup, x)

    def to_json(self):
        out = {"op": "in", "var": self.var, "subgroup": str(self.subgroup)}
        if self.offset is not None:
            out["offset"] = str(self.offset)
        return out


_ORDER_OPS = {
    "lt": lambda c: c < 0, "le": lambda c: c <= 0, "gt": lambda c: c > 0,
    "ge": lambda c: c >= 0, "eq": lambda c: c == 0,
}


@dataclass(frozen=True)
class Compare:
    """Order literal x_var OP value."""

    var: int
    op: str
    value: Element

    def holds(self, xs):
        return _ORDER_OPS[self.op]((xs[self.var] - self.value).sign())

    def to_json(self):
        return {"op": self.op, "var": self.var, "value": str(self.value)}


@dataclass(frozen=True)
class And:
    args: tuple

    def holds(self, xs):
        return all(a.holds(xs) for a in self.args)

    def to_json(self):
        return {"op": "and", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class Or:
    args: tuple

    def holds(self, xs):
        return any(a.holds(xs) for a in self.args)

    def to_json(self):
        return {"op": "or", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class Not:
    arg: object

    def holds(self, xs):
        return not self.arg.holds(xs)

    def to_json(self):
        return {"op": "not", "args": [self.arg.to_json()]}


@dataclass(frozen=True)
class PiecewiseFn:
    """Union over pieces of (domain, combination tree), with at most ``cap`` values."""

    pieces: tuple
    cap: int
    target: object
    group: object

    def evaluate(self, xs, cap=DEFAULT_CAP):
        return eval_piecewise(self, xs, cap)

    def to_json(self):
        return {"cap": self.cap, "target": str(self.target), "group": str(self.group.spec),
                "pieces": [{"domain": d.to_json(), "tree": t.to_json()} for d, t in self.pieces]}


def eval_piecewise(F, xs, cap=DEFAULT_CAP):
    out = set()
    for domain, tree in F.pieces:
        if domain.holds(xs):
            out |= recast(tree.evaluate(xs, cap), F.target, F.group, cap)
    if len(out) > F.cap:
        raise MultiplicityExceeded(f"{len(out)} values exceed the multiplicity cap {F.cap}")
    return frozenset(out)


def piecewise_from_json(data, g):
    from .parsing import parse_element, parse_subgroup_expr

    def tree(node):
        op = node["op"]
        if op == "leaf":
            f = LinearFn(tuple(node["coeffs"]), node.get("divisor", 1),
                         parse_element(node.get("offset", ""), g), node.get("shift", 0))
            return FnLeaf(project(f, parse_subgroup_expr(node["target"], g), g))
        args = [tree(a) for a in node["args"]]
        if op == "meet":
            return FnMeet(tuple(args))
        if op == "union":
            return FnUnion(tuple(args))
        if op == "minus":
            return FnMinus(args[0], args[1])
        raise ValueError(f"unknown node {op!r}")

    def domain(node):
        op = node["op"]
        if op == "true":
            return Always()
        if op == "in":
            off = node.get("offset")
            return InCoset(node["var"], parse_subgroup_expr(node["subgroup"], g),
                           parse_element(off, g) if off is not None else None)
        if op in _ORDER_OPS:
            return Compare(node["var"], op, parse_element(node["value"], g))
        args = tuple(domain(a) for a in node["args"])
        return {"and": lambda: And(args), "or": lambda: Or(args), "not": lambda: Not(args[0])}[op]()

    pieces = tuple((domain(p["domain"]), tree(p["tree"])) for p in data["pieces"])
    return PiecewiseFn(pieces, data["cap"], parse_subgroup_expr(data["target"], g), g)


def dumps_piecewise(F):
    return json.dumps(F.to_json(), sort_keys=True)


# -- the non-piecewise-linear function ---------------------------------------

def _uniform_prime(g):
    if g.family is not Family.POLY_PART:
        raise WrongFamily(f"{g} is not a partitioned polynomial group")
    primes = {(p, n) for p, n, _ in g.spec.constraints}
    if len(primes) != 1 or next(iter(primes))[1] != 2:
        raise WrongFamily(f"{g} does not constrain every cell by the same p^2")
    return next(iter(primes))[0]


def counterexample_subgroups(p):
    """(H1, H2, target, domain) for the intersected function."""
    h1 = Shift(Sharp(ZERO, p, 2), p, 2)
    h2 = Shift(Sharp(ZERO, p, 3), p, 1)
    return h1, h2, Shift(Sharp(ZERO, p, 3), p, 2), Shift(Sharp(ZERO, p, 2), p, 1)


def build_counterexample_72(g):
    """f = f1 cap f2 with f1(x) = x + H1 and f2(x) = 0 + H2."""
    p = _uniform_prime(g)
    h1, h2, target, _ = counterexample_subgroups(p)
    f1 = project(LinearFn((1,)), h1, g)
    f2 = project(LinearFn((0,)), h2, g)
    tree = FnMeet((FnLeaf(f1), FnLeaf(f2)))
    return PiecewiseFn(((Always(), tree),), 1, target, g)


@dataclass(frozen=True)
class ConfinementReport:
    passed: bool
    agreement: int
    confined_to: str | None
    violation: tuple | None

    def to_json(self):
        return {"passed": self.passed, "agreement": self.agreement,
                "confined_to": self.confined_to,
                "violation": [str(x) for x in self.violation] if self.violation else None}


def candidate_values(F, candidate, x):
    """Values of h(x) = (1/b)(a x + g) + target, or None if there are too many."""
    a, b, off = candidate
    g = F.group
    pf = project(LinearFn((a,), b, off), F.target, g)
    try:
        return eval_projected(pf, (x,), cap=1)
    except CapExceeded:
        return None


def confinement_check_72(F, candidate, sample):
    """Check that a linear candidate agrees with F only inside one small coset.

    The agreement set collects sample points where the candidate is defined
    and all its values are values of F.  It must lie in one coset of
    Sharp(0,p,3) + pG or in one coset of Sharp(0,p,2) + p^2 G.
    """
    g = F.group
    p = _uniform_prime(g)
    h1, h2, _, _ = counterexample_subgroups(p)
    agree = []
    for x in sample:
        hv = candidate_values(F, candidate, x)
        if not hv:
            continue
        fv = eval_piecewise(F, (x,))
        if hv <= fv:
            agree.append(x)
    if len(agree) <= 1:
        return ConfinementReport(True, len(agree), "trivial", None)
    first = agree[0]
    for name, S in (("sharp3+p", h2), ("sharp2+p2", h1)):
        if all(member(S, x - first) for x in agree):
            return ConfinementReport(True, len(agree), name, None)
    bad_a = next(x for x in agree if not member(h2, x - first))
    bad_b = next(x for x in agree if not member(h1, x - first))
    return ConfinementReport(False, len(agree), None, (first, bad_a, bad_b))


def counterexample_sample(g, rng, count, anchor=None):
    """Sample points: the anchor plus anchor + h for h drawn in turn from the
    subgroups that bound agreement sets, or plain domain elements without one."""
    p = _uniform_prime(g)
    h1, h2, target, dom = counterexample_subgroups(p)
    if anchor is None:
        return [random_member(dom, g, rng) for _ in range(count)]
    near = (h1, h2, target, dom, Meet(Shift(Sharp(ZERO, p, 2), p, 1), h2))
    out = [anchor]
    for i in range(count - 1):
        out.append(anchor + random_member(near[i % len(near)], g, rng))
    return out


def anchored_candidate(F, rng, a_range=6, divisors=(1, 1, 1, -1, 2, 3)):
    """A random linear candidate forced to agree with F at one domain point.

    Returns (candidate, anchor): with b the divisor and y a value of F at the
    anchor x, the offset is b*y - a*x, so h(x) = y + target when b is 1.
    """
    g = F.group
    dom = counterexample_subgroups(_uniform_prime(g))[3]
    x = random_member(dom, g, rng)
    y = next(iter(eval_piecewise(F, (x,)))).rep
    a = rng.randint(-a_range, a_range)
    b = rng.choice(divisors)
    return (a, b, b * y - a * x), x


# -- the non-uniformisable family ---------------------------------------------

def _require_local2(g):
    if g.family is not Family.LOCAL_LEX or g.spec.p != 2:
        raise WrongFamily(f"{g} is not the lexicographic sum of localisations at 2")


def f_alpha_73(x, i):
    """The unique value of f_{alpha_i} at x: the coset x + e_{i-1} + Tail(i) + 2G."""
    g = x.group
    _require_local2(g)
    return Coset(Shift(Conv(i), 2, 1), x + g.basis(i - 1))


def f_alpha_73_predicate(x, y, i):
    """y - x in Tail(i-1) + 2G and y - x not in Tail(i) + 2G."""
    d = y - x
    return member(Shift(Conv(i - 1), 2, 1), d) and not member(Shift(Conv(i), 2, 1), d)


def translate_check_73(g_el, i):
    """Whether x -> x + g_el implements f_{alpha_i}: coordinates 0..i-2 of g_el
    even and coordinate i-1 odd (as 2-adic valuations)."""
    _require_local2(g_el.group)

    def v(c):
        c = Fraction(c)
        return None if c == 0 else valuation(c.numerator, 2)

    for j in range(i - 1):
        vj = v(g_el[j])
        if vj is not None and vj < 1:
            return False
    return v(g_el[i - 1]) == 0


def translate_agrees_73(x, g_el, i):
    """Direct check against the defining formula of f_{alpha_i}."""
    return f_alpha_73_predicate(x, x + g_el, i)


@dataclass(frozen=True)
class ConflictReport:
    i: int
    j: int
    status: str
    coordinate: int
    grid_size: int
    grid_common: int

    def to_json(self):
        return {"i": self.i, "j": self.j, "status": self.status, "coordinate": self.coordinate,
                "grid_size": self.grid_size, "grid_common": self.grid_common}


def conflict_73(i, j, g=None):
    """No single translate implements both f_{alpha_i} and f_{alpha_j} (i < j).

    The translate for i needs coordinate i-1 odd; the one for j needs every
    coordinate below j-1 even, including i-1.  The argument is cross-checked
    on all g with entries in {0, 1} on coordinates below j.
    """
    if not 1 <= i < j:
        raise ValueError("need 1 <= i < j")
    if g is None:
        from .groups import GroupSpec, make_group
        g = make_group(GroupSpec.local_lex(2))
    _require_local2(g)
    common = 0
    size = 0
    for bits in itertools.product((0, 1), repeat=j):
        size += 1
        cand = g.element(enumerate(bits))
        if translate_check_73(cand, i) and translate_check_73(cand, j):
            common += 1
    status = "Unsatisfiable" if common == 0 else "Satisfiable"
    return ConflictReport(i, j, status, i - 1, size, common)


def random_local_element(g, rng, support=8, bound=4):
    from .groups import random_element
    return random_element(g, support, bound, rng)
