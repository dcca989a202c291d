"""The two constructions where linear pieces are not enough.

Run with:  python3 demos/two_counterexamples.py
"""

import random

from oagwb.functions import (anchored_candidate, build_counterexample_72, confinement_check_72,
                             conflict_73, counterexample_sample, counterexample_subgroups,
                             translate_check_73)
from oagwb.groups import GroupSpec, make_group
from oagwb.parsing import parse_element
from oagwb.subgroups import member

g = make_group(GroupSpec.poly_part([(2, 2)] * 3))
F = build_counterexample_72(g)
h1, h2, target, dom = counterexample_subgroups(2)
print("A partial function on polynomials with every cell constrained by 4")
print(f"  values are cosets of {target}")
print(f"  its domain should be {dom}")
for text in ("2", "4", "1", "6 - 8*t"):
    x = parse_element(text, g)
    vals = sorted(str(c.rep) for c in F.evaluate((x,)))
    print(f"  f({text}) = {vals or 'undefined'}   in domain: {member(dom, x)}")

print("\nNo single linear map fits it on more than one small coset:")
rng = random.Random(7)
for _ in range(6):
    cand, anchor = anchored_candidate(F, rng)
    rep = confinement_check_72(F, cand, counterexample_sample(g, rng, 100, anchor))
    a, b, off = cand
    print(f"  h(x) = ({a} x + {off}) / {b}: agrees at {rep.agreement:>3} of 100 points, "
          f"confined to {rep.confined_to}")

print("\nA family that cannot be given by one translate uniformly:")
loc = make_group(GroupSpec.local_lex(2))
for text, i in (("1*e0", 1), ("1*e0", 2), ("1*e1", 2)):
    print(f"  translate by {text} implements the i={i} function: "
          f"{translate_check_73(parse_element(text, loc), i)}")
for i, j in ((1, 2), (2, 5), (3, 7)):
    rep = conflict_73(i, j)
    print(f"  i={i}, j={j}: {rep.status}, clash at coordinate {rep.coordinate}, "
          f"{rep.grid_common} of {rep.grid_size} grid translates work for both")
