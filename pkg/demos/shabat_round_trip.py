"""Realise every plane tree with 5 edges as a Shabat polynomial, then
recover the tree from the polynomial's monodromy.

Run: python3 demos/shabat_round_trip.py
"""

import numpy as np

from dessins.hypermap import is_isomorphic, passport, plane_trees
from dessins.monodromy import monodromy_pair
from dessins.shabat import coefficient_residual, solve_tree

np.set_printoptions(precision=4, suppress=True)

for tree in plane_trees(5):
    sp = solve_tree(tree)
    r = monodromy_pair(sp.poly)
    back = is_isomorphic(tree, type(tree)(r.sigma, r.alpha))
    pp = passport(tree).as_dict()
    print(f"black {pp['black']!s:<16} white {pp['white']!s:<16}"
          f"residual {coefficient_residual(sp):.1e}  round trip {back}")
    print("   coefficients", sp.poly.as_array())
