"""Deciding membership in Y + G' without enumerating Y.

Run with:  python3 demos/coset_saturation.py
"""

import random

from oagwb.cosetlogic import (FiniteAmbient, CosetSystem, brute_membership, random_gprime,
                              random_system, saturation_membership, sweep, threshold_N)

amb = FiniteAmbient((4, 4))
# the whole group with the coset (1, 0) + <(0, 1)> cut out
system = CosetSystem((0, 0), ((1, 0), (0, 1)), (((1, 0), ((0, 1),)),))
for gprime in ([], [(2, 0)], [(1, 0)]):
    hits = [y for y in amb.elements() if saturation_membership(system, gprime, y, amb)]
    print(f"G' = <{gprime}>: {len(hits)} of {amb.order} points lie in Y + G'")
    assert all(brute_membership(system, gprime, y, amb) == (y in hits) for y in amb.elements())

rng = random.Random(3)
amb = FiniteAmbient((9, 3))
bad = 0
for _ in range(20):
    s = random_system(amb, rng)
    bad += len(sweep(s, random_gprime(amb, rng), amb))
print(f"\n20 random systems in Z/9 x Z/3: {bad} disagreements with enumeration")

print("\nHow many powers of n one must look at before sums of k reciprocals settle:")
for n in (2, 3):
    print(f"  n={n}: " + ", ".join(f"k={k} -> {threshold_N(n, k)}" for k in range(1, 5)))
