"""Invariants of a small genus-0 dessin given by two permutations.

Run: python3 demos/nine_edge_dessin.py
"""

from dessins.hypermap import canonical_form, from_pair, genus, passport, to_dot
from dessins.perm import compose, group_order, parse

sigma = parse("(1 7 6)(2 3)(4 8 5)(9)")
alpha = parse("(1 2)(3 4)(5 6 7)(8 9)")
h = from_pair(9, sigma, alpha)

# the face permutation is forced by sigma * alpha * phi = 1
print("phi            ", h.phi)
print("sigma alpha phi", compose(compose(h.sigma, h.alpha), h.phi))

g = genus(h)
print(f"B={g.B} W={g.W} F={g.F} n={g.n}  ->  chi={g.chi}, genus {g.genus}")
print("passport       ", passport(h).as_dict())
print("group order    ", group_order([sigma, alpha], 9, 10**6))

# relabelling gives the same canonical form
c = canonical_form(h)
print("canonical      ", c)

print()
print(to_dot(h))
