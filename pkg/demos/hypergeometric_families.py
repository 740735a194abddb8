"""The star, 2-star and chain trees and the linear ODEs satisfied by the
inverse branches of their Belyi polynomials.

Run: python3 demos/hypergeometric_families.py
"""

from dessins.hypermap import chain, is_isomorphic, star, two_star
from dessins.monodromy import dessin_of
from dessins.rh_ode import hypergeometric_parameters, ode_for_family, verify_family
from dessins.shabat import family_polynomial

trees = {"star": star, "two_star": two_star, "chain": chain}
n = 4

for family, make in trees.items():
    sp = family_polynomial(family, n)
    ode = ode_for_family(family, n)
    print(f"{family}, n = {n}")
    print("   P(z)      ", sp.poly)
    print("   dessin ok ", is_isomorphic(dessin_of(sp.poly), make(n)))
    print("   ODE       ", ode)
    abc = hypergeometric_parameters(ode)
    if abc is not None:
        a, b, c = (round(v.real, 6) for v in abc)
        print(f"   a, b, c    {a}, {b}, {c}")
    rep = verify_family(family, n)
    print(f"   max residual over {rep.samples} points and all branches: {rep.max_residual:.1e}"
          f"  ({'pass' if rep.passed else 'FAIL'})")
    print()
