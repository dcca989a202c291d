"""Property suites for the formula-bearing lemmas, and dimension profiles.

Each registry entry expands a :class:`LemmaCase` into independent tasks keyed
by their parameters.  Every task draws from its own generator seeded by
(seed, key), so a report is the same whether tasks run serially or in a
process pool.  "Infinite" is rendered as AtLeast at two escalating caps.
"""

from __future__ import annotations

import functools
import itertools
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .cosetlogic import (FiniteAmbient, random_gprime, random_system, sweep,
                         threshold_holds_on_grid, threshold_N)
from .errors import IncompatibleFamily, NotDivisible, UnknownLemma, WrongFamily
from .functions import (anchored_candidate, build_counterexample_72,
                        confinement_check_72, conflict_73, counterexample_sample,
                        counterexample_subgroups, f_alpha_73, f_alpha_73_predicate,
                        translate_agrees_73, translate_check_73)
from .groups import Family, Group, divide_exact, random_element
from .parsing import parse_group
from .quotients import IndexValue, fp_dimension, index, index_agree, index_product
from .subgroups import (FULL, ZERO, Conv, Join, Meet, Scale, Sharp, Shift,
                        convexify_sharp, in_spine, member, normal_form, random_member)

DEFAULT_SEED = 0
AMBIENTS = ((4, 4), (8,), (9, 3), (8, 8))


def default_seed():
    return int(os.environ.get("OAG_SEED", DEFAULT_SEED))


@dataclass(frozen=True)
class LemmaCase:
    lemma: str
    group: str
    p: int | None = None
    rmax: int = 3
    smax: int = 3
    samples: int = 200
    seed: int = DEFAULT_SEED
    cap: int = 32
    max_level: int = 4


@dataclass(frozen=True)
class CaseResult:
    key: str
    passed: bool | None  # None: inconclusive
    detail: dict = field(default_factory=dict)
    witness: str | None = None

    def to_json(self):
        status = {True: "pass", False: "fail", None: "inconclusive"}[self.passed]
        out = {"key": self.key, "status": status, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    lemma: str
    group: str
    params: dict
    cases: list
    caps: tuple
    annotations: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def violations(self):
        return [c for c in self.cases if c.passed is False]

    @property
    def status(self):
        if self.violations:
            return "fail"
        if any(c.passed is None for c in self.cases):
            return "inconclusive"
        return "pass"

    def to_json(self, timing=False):
        out = {"lemma": self.lemma, "group": self.group, "params": self.params,
               "status": self.status, "cases_run": len(self.cases),
               "violations": len(self.violations), "caps": list(self.caps),
               "annotations": self.annotations,
               "cases": [c.to_json() for c in self.cases]}
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def dumps(self, timing=False):
        return json.dumps(self.to_json(timing), sort_keys=True, indent=2)


# -- shared helpers -----------------------------------------------------------

def _rng(seed, key):
    return random.Random(f"{seed}:{key}")


def _prime(case, g):
    if case.p is not None:
        return case.p
    if g.family in (Family.LOCAL_LEX, Family.POLY_MOD):
        return g.spec.p
    if g.family is Family.POLY_PART:
        return g.spec.constraints[0][0]
    return 2


def _levels(g, case):
    top = g.rank if g.rank is not None else case.max_level + 1
    return list(range(top)) + [None]


def _lvl(level):
    return "zero" if level is None else str(level)


def _strictly_above(a, b):
    """Tail(a) is strictly larger than Tail(b)."""
    return a is not None and (b is None or a < b)


def multiple_of(p, r):
    return Shift(ZERO, p, r)


def sharp_plus(level, p, s, r):
    return Shift(Sharp(Conv(level), p, s), p, r)


def _both_caps(A, B, g, cap):
    return index(A, B, g, cap), index(A, B, g, 2 * cap)


def _is_nonconvex(g, level, p, s):
    return convexify_sharp(Conv(level), p, s, g).convex is None


# -- sharp subgroups meet multiples ---------------------------------------

def _keylemma_task(g, level, p, r, s, samples, seed):
    key = f"D={_lvl(level)},r={r},s={s}"
    rng = _rng(seed, key)
    D = Conv(level)
    outer, inner, pr = Sharp(D, p, s), Sharp(D, p, s - r), multiple_of(p, r)
    bad, wit, positive = 0, None, 0
    for i in range(samples):
        kind = i % 3
        if kind == 0:
            x = random_element(g, 6, 6, rng)
        elif kind == 1:
            x = p ** r * random_member(inner, g, rng)
        else:
            x = random_member(outer, g, rng)
        lhs = member(outer, x) and member(pr, x)
        try:
            rhs = member(inner, divide_exact(x, p ** r))
        except NotDivisible:
            rhs = False
        positive += lhs
        if lhs != rhs:
            bad += 1
            wit = wit or str(x)
    return CaseResult(key, bad == 0, {"samples": samples, "in_left": positive,
                                      "discrepancies": bad}, wit)


def _suite_keylemma(case, g):
    p = _prime(case, g)
    for level in _levels(g, case):
        for s in range(1, case.smax + 1):
            for r in range(1, min(s, case.rmax) + 1):
                yield functools.partial(_keylemma_task, g, level, p, r, s, case.samples, case.seed)


# -- divisibility and agreement above a convex subgroup --------------------

def _equal_p_div_task(g, a, b, p, r):
    key = f"K={_lvl(a)},L={_lvl(b)},r={r}"
    e1 = normal_form(Shift(Conv(a), p, 1), g) == normal_form(Shift(Conv(b), p, 1), g)
    er = normal_form(Shift(Conv(a), p, r), g) == normal_form(Shift(Conv(b), p, r), g)
    return CaseResult(key, e1 == er, {"equal_mod_p": e1, "equal_mod_p^r": er},
                      None if e1 == er else f"tail({_lvl(a)}) vs tail({_lvl(b)})")


def _suite_equal_p_div(case, g):
    p = _prime(case, g)
    levels = _levels(g, case)
    for a, b in itertools.combinations(levels, 2):
        for r in range(1, case.rmax + 1):
            yield functools.partial(_equal_p_div_task, g, a, b, p, r)


def _same_above_task(g, d, a, p, s, bound):
    key = f"alpha={_lvl(a)},D={_lvl(d)},s={s}"
    top = bound if a is None else a
    betas = [m for m in range(d + 1, top) if in_spine(g, p, m)]
    c1 = len({normal_form(Shift(Conv(m), p, 1), g) for m in betas})
    cs = len({normal_form(Shift(Conv(m), p, s), g) for m in betas})
    return CaseResult(key, c1 == cs, {"spine_levels": betas, "classes_mod_p": c1,
                                      "classes_mod_p^s": cs},
                      None if c1 == cs else f"levels {betas}")


def _suite_same_above(case, g):
    p = _prime(case, g)
    levels = _levels(g, case)
    bound = (g.rank if g.rank is not None else case.max_level + 4)
    for d, a in itertools.combinations(levels, 2):
        for s in range(1, case.smax + 1):
            yield functools.partial(_same_above_task, g, d, a, p, s, bound)


# -- nonconvex sharp subgroups ---------------------------------------------

def _nonconvex_task(g, level, p, s, levels):
    key = f"alpha={_lvl(level)},s={s}"
    res = convexify_sharp(Conv(level), p, s, g)
    target = normal_form(Sharp(Conv(level), p, s), g)
    matches = [m for m in levels if normal_form(Shift(Conv(m), p, s), g) == target]
    ok = (res.convex is None) == all(res.conditions)
    if res.convex is not None:
        ok = ok and normal_form(Shift(res.convex, p, s), g) == target
    else:
        ok = ok and not matches
    detail = {"convex": None if res.convex is None else str(res.convex),
              "conditions": list(res.conditions), "brute_matches": [_lvl(m) for m in matches]}
    wit = None
    if not ok:
        wit = str(res.witness) if res.witness is not None else f"alpha={_lvl(level)}"
    return CaseResult(key, ok, detail, wit)


def _suite_nonconvex(case, g):
    p = _prime(case, g)
    levels = _levels(g, case)
    for level in levels:
        for s in range(1, case.smax + 1):
            yield functools.partial(_nonconvex_task, g, level, p, s, levels)


# -- Lemmas 4.8 to 4.10 -------------------------------------------------------

def _infinite_case(key, pairs, g, cap):
    detail, ok, wit = {}, True, None
    for name, (A, B) in pairs.items():
        lo, hi = _both_caps(A, B, g, cap)
        detail[name] = [str(lo), str(hi)]
        if lo.is_finite or hi.is_finite:
            ok = False
            wit = wit or f"[{A} : {B}]"
    return CaseResult(key, ok, detail, wit)


def _inf_right_task(g, level, p, s, r, cap):
    key = f"alpha={_lvl(level)},s={s},r={r}"
    pair = (sharp_plus(level, p, s, r - 1), sharp_plus(level, p, s, r))
    return _infinite_case(key, {"index": pair}, g, cap)


def _nonconvex_configs(case, g, p):
    return [(lv, s) for lv in _levels(g, case) for s in range(1, case.smax + 1)
            if _is_nonconvex(g, lv, p, s)]


def _suite_inf_right(case, g):
    p = _prime(case, g)
    for level, s in _nonconvex_configs(case, g, p):
        for r in range(1, s + 1):
            yield functools.partial(_inf_right_task, g, level, p, s, r, case.cap)


def _left_nc_task(g, level, p, s, r, K, label, cap):
    key = f"alpha={_lvl(level)},s={s},r={r},K={label}"
    H = sharp_plus(level, p, s, r)
    pairs = {
        "K+p^rG": (Shift(K, p, r), H),
        "H+(K meet p^(r-1)G)": (Join(Sharp(Conv(level), p, s),
                                     Join(Meet(K, multiple_of(p, r - 1)), multiple_of(p, r))), H),
    }
    return _infinite_case(key, pairs, g, cap)


def _suite_left_nc(case, g):
    p = _prime(case, g)
    levels = [lv for lv in _levels(g, case) if lv is not None]
    for level, s in _nonconvex_configs(case, g, p):
        above = [k for k in levels if _strictly_above(k, level)]
        for r in range(1, s + 1):
            for k in above:
                yield functools.partial(_left_nc_task, g, level, p, s, r, Conv(k), f"tail({k})", case.cap)
                for t in range(1, case.smax + 1):
                    yield functools.partial(_left_nc_task, g, level, p, s, r, Sharp(Conv(k), p, t),
                                            f"sharp({k},{t})", case.cap)


# -- quotients of shifted sharp subgroups -----------------------------------

def _aps_quot_task(g, level, p, s, r, cap):
    key = f"alpha={_lvl(level)},s={s},r={r}"
    lhs = index(sharp_plus(level, p, s - 1, r), sharp_plus(level, p, s, r), g, cap)
    factors = [index(sharp_plus(level, p, s - i, 1), sharp_plus(level, p, s - i + 1, 1), g, cap)
               for i in range(1, r + 1)]
    rhs = index_product(factors, cap)
    ok = index_agree(lhs, rhs, cap)
    return CaseResult(key, ok, {"lhs": str(lhs), "factors": [str(f) for f in factors],
                                "boundary": r == s},
                      None if ok else f"[{sharp_plus(level, p, s - 1, r)} : {sharp_plus(level, p, s, r)}]")


def _suite_aps_quot(case, g):
    p = _prime(case, g)
    for level in _levels(g, case):
        for s in range(1, case.smax + 1):
            for r in range(1, min(s, case.rmax) + 1):
                yield functools.partial(_aps_quot_task, g, level, p, s, r, case.cap)


# -- indices of multiples and tails ------------------------------------------

def _exact_cap(g, p, r, cap):
    """A cap large enough that finite-rank indices close, when that is cheap."""
    if g.rank is not None and p ** (r * g.rank) <= 5000:
        return max(cap, p ** (r * g.rank))
    return cap


def _idx_pow_task(g, p, r, cap):
    key = f"r={r}"
    big = _exact_cap(g, p, r, cap)
    lhs = index(FULL, multiple_of(p, r), g, big)
    base = index(FULL, multiple_of(p, 1), g, big)
    rhs = index_product([base] * r, big)
    ok = index_agree(lhs, rhs, big)
    return CaseResult(key, ok, {"index": lhs.to_json(), "base": base.to_json(), "cap": big},
                      None if ok else f"[G : {multiple_of(p, r)}]")


def _suite_idx_pow(case, g):
    p = _prime(case, g)
    for r in range(1, case.rmax + 1):
        yield functools.partial(_idx_pow_task, g, p, r, case.cap)


def _escalate(value, bound, A, B, g):
    """Re-run an AtLeast index with a cap the other side says suffices."""
    if value.is_finite or bound > 5000:
        return value
    return index(A, B, g, bound)


def _desc_inf_task(g, K, label, p, r, cap, convex):
    key = f"K={label},r={r}"
    pr = multiple_of(p, r)
    A, B = Shift(K, p, r), pr
    lower = Join(Meet(K, multiple_of(p, r - 1)), pr)
    a = index(A, B, g, cap)
    b = index(lower, B, g, cap)
    if b.is_finite:
        a = _escalate(a, b.value ** r, A, B, g)
    if a.is_finite:
        b = _escalate(b, a.value, lower, B, g)
    ok = a.is_finite == b.is_finite
    detail = {"index": str(a), "lower_index": str(b)}
    if convex:
        base = index(K, Scale(p, 1, K), g, cap)
        power = index_product([base] * r, max(cap, a.value if a.is_finite else cap))
        detail["K:pK"] = str(base)
        ok = ok and index_agree(a, power, max(cap, a.value if a.is_finite else cap))
    return CaseResult(key, ok, detail, None if ok else f"[{A} : {B}]")


def _suite_desc_inf(case, g):
    p = _prime(case, g)
    for level in _levels(g, case):
        for r in range(1, case.rmax + 1):
            yield functools.partial(_desc_inf_task, g, Conv(level), f"tail({_lvl(level)})",
                                    p, r, case.cap, True)
            for s in range(max(r, 1), case.smax + 1):
                yield functools.partial(_desc_inf_task, g, Sharp(Conv(level), p, s),
                                        f"sharp({_lvl(level)},{s})", p, r, case.cap, False)


# -- Corollaries 5.5 and 5.6 -------------------------------------------------

def _tower_task(g, level, p, s, r, cap):
    key = f"alpha={_lvl(level)},s={s},r={r}"
    pr = multiple_of(p, r)
    lhs = index(sharp_plus(level, p, s, r), pr, g, cap)
    factors = [index(sharp_plus(level, p, s - i, 1), multiple_of(p, 1), g, cap) for i in range(r)]
    rhs = index_product(factors, cap)
    ok = index_agree(lhs, rhs, cap)
    lower = index(Join(Meet(Sharp(Conv(level), p, s), multiple_of(p, r - 1)), pr), pr, g, cap)
    bounded = True
    if lower.is_finite and lower.value ** r <= cap:
        bounded = lhs.is_finite and lhs.value <= lower.value ** r
    return CaseResult(key, ok and bounded,
                      {"lhs": str(lhs), "factors": [str(f) for f in factors],
                       "lower": str(lower), "power_bound_holds": bounded},
                      None if ok and bounded else f"[{sharp_plus(level, p, s, r)} : {pr}]")


def _suite_tower(case, g):
    p = _prime(case, g)
    for level in _levels(g, case):
        for s in range(1, case.smax + 1):
            for r in range(1, min(s, case.rmax) + 1):
                yield functools.partial(_tower_task, g, level, p, s, r, case.cap)


# -- coset saturation and the reciprocal-sum threshold -----------------------

def _qe32_task(moduli, systems, seed):
    key = "ambient=" + "x".join(map(str, moduli))
    rng = _rng(seed, key)
    amb = FiniteAmbient(moduli)
    checked = 0
    for _ in range(systems):
        sys_ = random_system(amb, rng)
        for _ in range(3):
            gp = random_gprime(amb, rng)
            bad = sweep(sys_, gp, amb)
            checked += amb.order
            if bad:
                wit = json.dumps({"system": sys_.to_json(amb, gp), "y": list(bad[0])}, sort_keys=True)
                return CaseResult(key, False, {"points_checked": checked}, wit)
    return CaseResult(key, True, {"systems": systems, "gprimes_each": 3, "points_checked": checked})


def _suite_qe32(case, g):
    for moduli in AMBIENTS:
        yield functools.partial(_qe32_task, moduli, case.samples, case.seed)


def _qe33_task(n, k):
    key = f"n={n},k={k}"
    N = threshold_N(n, k)
    max_exp = N + 3
    holds, bad = threshold_holds_on_grid(n, k, N, max_exp)
    minimal = N == 0 or not threshold_holds_on_grid(n, k, N - 1, max_exp)[0]
    ok = holds and minimal
    return CaseResult(key, ok, {"N": N, "grid_max_exponent": max_exp, "minimal": minimal},
                      None if ok else str(bad))


def _suite_qe33(case, g):
    for n in (2, 3):
        for k in range(1, 5):
            yield functools.partial(_qe33_task, n, k)


# -- dimension counts ----------------------------------------------------------

def dim_profile(g, p, smax, cap=32):
    """Rows (s, dim of (Sharp(0,p,s)+pG)/(Sharp(0,p,s+1)+pG)) for s = 1..smax."""
    if g.family not in (Family.POLY_MOD, Family.POLY_PART):
        raise IncompatibleFamily(f"dimension profiles need a polynomial family, got {g}")
    return [(s, fp_dimension(sharp_plus(None, p, s, 1), sharp_plus(None, p, s + 1, 1), p, g, cap))
            for s in range(1, smax + 1)]


def expected_dimension(spec, p, s):
    """The count of constraints (p, s) in the declared spec."""
    if spec.family is Family.POLY_MOD:
        return int(spec.p == p and spec.n == s)
    return sum(1 for q, n, _ in spec.constraints if q == p and n == s)


def _dim_task(g, p, s, cap):
    key = f"p={p},s={s}"
    got = fp_dimension(sharp_plus(None, p, s, 1), sharp_plus(None, p, s + 1, 1), p, g, cap)
    want = IndexValue.finite(expected_dimension(g.spec, p, s))
    ok = got == want
    return CaseResult(key, ok, {"dimension": got.to_json(), "expected": want.to_json()},
                      None if ok else f"({sharp_plus(None, p, s, 1)}) / ({sharp_plus(None, p, s + 1, 1)})")


def _suite_dim71(case, g):
    if g.family is not Family.POLY_MOD:
        raise IncompatibleFamily(f"dim71 needs a polymod group, got {g}")
    for s in range(1, case.smax + 1):
        yield functools.partial(_dim_task, g, g.spec.p, s, case.cap)


def _suite_dim72(case, g):
    if g.family is not Family.POLY_PART:
        raise IncompatibleFamily(f"dim72 needs a polypart group, got {g}")
    primes = [case.p] if case.p else sorted({q for q, _, _ in g.spec.constraints})
    for p in primes:
        for s in range(1, case.smax + 1):
            yield functools.partial(_dim_task, g, p, s, case.cap)


# -- the two counterexamples -----------------------------------------------------

def _cex72_domain_task(g, samples, seed):
    key = "domain"
    rng = _rng(seed, key)
    F = build_counterexample_72(g)
    dom = counterexample_subgroups(_prime_72(g))[3]
    inside = bad = 0
    wit = None
    for i in range(samples):
        x = random_member(dom, g, rng) if i % 2 else random_element(g, 6, 4, rng)
        defined = bool(F.evaluate((x,)))
        want = member(dom, x)
        inside += want
        if defined != want:
            bad += 1
            wit = wit or str(x)
    return CaseResult(key, bad == 0, {"samples": samples, "in_domain": inside,
                                      "discrepancies": bad}, wit)


def _prime_72(g):
    return g.spec.constraints[0][0]


def _cex72_confine_task(g, batch, candidates, points, seed):
    key = f"candidates[{batch}]"
    rng = _rng(seed, key)
    F = build_counterexample_72(g)
    agree_total = 0
    for _ in range(candidates):
        cand, anchor = anchored_candidate(F, rng)
        sample = counterexample_sample(g, rng, points, anchor)
        rep = confinement_check_72(F, cand, sample)
        agree_total += rep.agreement
        if not rep.passed:
            wit = json.dumps({"candidate": [cand[0], cand[1], str(cand[2])],
                              "points": [str(x) for x in rep.violation]})
            return CaseResult(key, False, {"agreement_points": agree_total}, wit)
    return CaseResult(key, True, {"candidates": candidates, "points_each": points,
                                  "agreement_points": agree_total})


def _cex72_values_task(g, samples, seed, cap):
    key = "values"
    rng = _rng(seed, key)
    p = _prime_72(g)
    h1, h2, target, dom = counterexample_subgroups(p)
    F = build_counterexample_72(g)
    same = normal_form(Meet(h2, h1), g) == normal_form(target, g)
    side = index(Meet(h1, h2), target, g, cap)
    ok = same and side.is_finite
    wit = None
    for _ in range(samples):
        x = random_member(dom, g, rng)
        vals = F.evaluate((x,))
        if len(vals) != 1:
            ok, wit = False, str(x)
            break
        y = next(iter(vals)).rep + random_member(target, g, rng)
        if not (member(h1, y - x) and member(h2, y)):
            ok, wit = False, str(x)
            break
    return CaseResult(key, ok, {"meet_equals_target": same, "side_index": str(side)}, wit)


def _suite_cex72(case, g):
    try:
        build_counterexample_72(g)
    except WrongFamily as e:
        raise IncompatibleFamily(str(e)) from None
    yield functools.partial(_cex72_domain_task, g, case.samples, case.seed)
    yield functools.partial(_cex72_values_task, g, min(case.samples, 100), case.seed, case.cap)
    total = case.samples
    batches = 10
    for b in range(batches):
        n = total // batches + (1 if b < total % batches else 0)
        yield functools.partial(_cex72_confine_task, g, b, n, 100, case.seed)


def _cex73_conflict_task(jmax):
    key = f"conflicts<= {jmax}"
    bad = []
    for i, j in itertools.combinations(range(1, jmax + 1), 2):
        rep = conflict_73(i, j)
        if rep.status != "Unsatisfiable" or rep.coordinate != i - 1 or rep.grid_common:
            bad.append((i, j))
    return CaseResult(key, not bad, {"pairs": jmax * (jmax - 1) // 2},
                      str(bad[0]) if bad else None)


def _random_translate(g, i, rng):
    """A translate that implements f_{alpha_i} about half the time."""
    coords = {}
    for j in range(i + 2):
        c = rng.randint(-5, 5)
        if rng.random() < 0.5 and j < i - 1:
            c *= 2
        if j == i - 1 and rng.random() < 0.5:
            c = 2 * c + 1
        if c:
            coords[j] = c
    return g.element(coords)


def _cex73_translate_task(g, samples, seed):
    key = "translates"
    rng = _rng(seed, key)
    bad = hits = 0
    wit = None
    for _ in range(samples):
        i = rng.randint(1, 6)
        x = random_element(g, 8, 5, rng)
        t = _random_translate(g, i, rng)
        a, b = translate_check_73(t, i), translate_agrees_73(x, t, i)
        hits += a
        if a != b:
            bad += 1
            wit = wit or f"x={x}, g={t}, i={i}"
    return CaseResult(key, bad == 0, {"samples": samples, "implementing": hits,
                                      "discrepancies": bad}, wit)


def _cex73_welldef_task(g, samples, seed):
    key = "well-defined"
    rng = _rng(seed, key)
    bad, wit = 0, None
    for _ in range(samples):
        i = rng.randint(1, 6)
        x = random_element(g, 8, 5, rng)
        value = f_alpha_73(x, i)
        inside = value.rep + random_member(value.subgroup, g, rng)
        y = x + random_element(g, i + 2, 3, rng)
        ok = f_alpha_73_predicate(x, inside, i) and \
            f_alpha_73_predicate(x, y, i) == (y in value)
        if not ok:
            bad += 1
            wit = wit or f"x={x}, i={i}"
    return CaseResult(key, bad == 0, {"samples": samples, "discrepancies": bad}, wit)


def _suite_cex73(case, g):
    if g.family is not Family.LOCAL_LEX or g.spec.p != 2:
        raise IncompatibleFamily(f"cex73 needs locallex(p=2), got {g}")
    yield functools.partial(_cex73_conflict_task, 8)
    yield functools.partial(_cex73_translate_task, g, case.samples, case.seed)
    yield functools.partial(_cex73_welldef_task, g, case.samples, case.seed)


REGISTRY = {
    "keylemma": _suite_keylemma,
    "equal-p-div": _suite_equal_p_div,
    "same-above": _suite_same_above,
    "nonconvex-cond": _suite_nonconvex,
    "inf-right": _suite_inf_right,
    "left-nc": _suite_left_nc,
    "aps-quot": _suite_aps_quot,
    "idx-pow": _suite_idx_pow,
    "desc-inf": _suite_desc_inf,
    "tower": _suite_tower,
    "qe32": _suite_qe32,
    "qe33": _suite_qe33,
    "dim71": _suite_dim71,
    "dim72": _suite_dim72,
    "cex72": _suite_cex72,
    "cex73": _suite_cex73,
}


def _annotations(case, g):
    if case.lemma in ("inf-right", "left-nc"):
        p = _prime(case, g)
        configs = _nonconvex_configs(case, g, p)
        if not configs:
            return ["no sharp subgroup in range is non-convex; suite is vacuous"]
        return ["non-convex configurations: " +
                ", ".join(f"(alpha={_lvl(a)}, s={s})" for a, s in configs)]
    if case.lemma == "aps-quot":
        return ["cases with r = s lie outside the stated range and are checked as well"]
    if case.lemma in ("qe32", "qe33"):
        return ["runs on finite ambients; the group argument is ignored"]
    return []


def _call(task):
    return task()


def run_lemma_suite(case, group=None, jobs=1):
    """Run one registry entry; ``group`` overrides the spec string (used for
    deliberately corrupted groups)."""
    if case.lemma not in REGISTRY:
        raise UnknownLemma(f"unknown lemma id {case.lemma!r}; known: {', '.join(sorted(REGISTRY))}")
    g = group if group is not None else parse_group(case.group)
    start = time.perf_counter()
    tasks = list(REGISTRY[case.lemma](case, g))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_call, tasks))
    else:
        results = [t() for t in tasks]
    results.sort(key=lambda c: c.key)
    params = {"p": case.p, "rmax": case.rmax, "smax": case.smax, "samples": case.samples,
              "seed": case.seed, "max_level": case.max_level}
    return VerificationReport(case.lemma, str(g.spec), params, results, (case.cap, 2 * case.cap),
                              _annotations(case, g), time.perf_counter() - start)


def corrupted_group(g):
    """The same group with every constraint modulus multiplied by its prime.

    The arithmetic follows the mutated constraint while the declared spec
    (which the dimension suites read their expectations from) stays put.
    """
    if g.family not in (Family.POLY_MOD, Family.POLY_PART):
        raise IncompatibleFamily(f"nothing to corrupt in {g}")
    primes = [g.spec.p] if g.family is Family.POLY_MOD else [q for q, _, _ in g.spec.constraints]
    return Group(g.spec, _cell_override=tuple(m * q for m, q in zip(g.cell_moduli, primes)))
