"""Walk through the quotient measurements on a few groups.

Run with:  python3 demos/indices_and_dimensions.py
"""

from oagwb.groups import GroupSpec, make_group
from oagwb.lemmas import dim_profile
from oagwb.parsing import parse_element
from oagwb.quotients import fp_dimension, index, transversal
from oagwb.subgroups import FULL, ZERO, Join, Sharp, Shift, member, tail


def show(label, value):
    print(f"  {label:<48} {value}")


free = make_group(GroupSpec.free_lex(3))
print("Free lexicographic group of rank 3")
show("[G : 2G]", index(FULL, Shift(ZERO, 2, 1), free))
show("[G : 4G] with a cap of 64", index(FULL, Shift(ZERO, 2, 2), free, cap=64))
show("[G : 4G] with the default cap", index(FULL, Shift(ZERO, 2, 2), free))
show("[Tail(1) + 2G : 2G]", index(Join(tail(1), Shift(ZERO, 2, 1)), Shift(ZERO, 2, 1), free))
reps = transversal(Join(tail(2), Shift(ZERO, 2, 1)), Shift(ZERO, 2, 1), free)
show("a transversal of (Tail(2) + 2G)/2G", [str(x) for x in reps])

local = make_group(GroupSpec.local_lex(2))
print("\nLexicographic sum of copies of Z localised at 2 (infinite rank)")
show("[G : 2G] at caps 32 and 64",
     [str(index(FULL, Shift(ZERO, 2, 1), local, c)) for c in (32, 64)])
show("1/3 e1 in Tail(1)?", member(tail(1), parse_element("1/3*e1", local)))

poly = make_group(GroupSpec.poly_mod(2, 2))
print("\nInteger polynomials whose coefficient sum is divisible by 4")
for s, v in dim_profile(poly, 2, 4):
    show(f"dimension at s={s}", v)

mixed = make_group(GroupSpec.poly_part([(2, 2), (2, 2), (3, 1)]))
print("\nPolynomials with three constrained cells, moduli 4, 4 and 3")
for p in (2, 3):
    row = [str(v) for _, v in dim_profile(mixed, p, 3)]
    show(f"dimension profile at p={p}", row)
A = Shift(Sharp(ZERO, 2, 2), 2, 1)
B = Shift(Sharp(ZERO, 2, 3), 2, 1)
show("F_2-dimension of the s=2 layer, asked directly", fp_dimension(A, B, 2, mixed))
