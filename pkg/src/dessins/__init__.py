"""Dessins d'enfants: permutation pairs, Shabat polynomials and monodromy."""

from .hypermap import (
    Hypermap,
    canonical_form,
    chain,
    enumerate_hypermaps,
    from_pair,
    genus,
    is_isomorphic,
    is_plane_tree,
    passport,
    plane_trees,
    star,
    two_star,
)
from .monodromy import TrackConfig, dessin_of, monodromy_pair
from .perm import Permutation, compose, from_cycles, identity, inverse, parse
from .poly import Poly, chebyshev
from .rh_ode import ode_for_family, verify_family
from .shabat import ShabatPolynomial, SolverConfig, family_polynomial, solve_tree

__version__ = "0.1.0"

__all__ = [
    "Hypermap",
    "Permutation",
    "Poly",
    "ShabatPolynomial",
    "SolverConfig",
    "TrackConfig",
    "canonical_form",
    "chain",
    "chebyshev",
    "compose",
    "dessin_of",
    "enumerate_hypermaps",
    "family_polynomial",
    "from_cycles",
    "from_pair",
    "genus",
    "identity",
    "inverse",
    "is_isomorphic",
    "is_plane_tree",
    "monodromy_pair",
    "ode_for_family",
    "parse",
    "passport",
    "plane_trees",
    "solve_tree",
    "star",
    "two_star",
    "verify_family",
]
