"""Hypermaps (dessins) encoded by a transitive pair of permutations.

A hypermap on ``n`` half-edges is a pair ``(sigma, alpha)`` acting
transitively on ``{1..n}``: the cycles of ``sigma`` list the half-edges
around black vertices counterclockwise, those of ``alpha`` around white
vertices, and the face permutation is ``phi = (sigma alpha)^-1``.
"""

from __future__ import annotations

import itertools
import json
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .perm import (
    Permutation,
    PermutationError,
    compose,
    cycle_decomposition,
    from_cycles,
    identity,
    inverse,
    is_transitive,
)

__all__ = [
    "Hypermap",
    "HypermapError",
    "DisconnectedDessinError",
    "Passport",
    "GenusReport",
    "from_pair",
    "genus",
    "passport",
    "is_plane_tree",
    "canonical_form",
    "is_isomorphic",
    "relabel",
    "enumerate_hypermaps",
    "plane_trees",
    "star",
    "two_star",
    "chain",
    "to_json",
    "from_json",
    "to_dot",
    "ENUMERATION_LIMIT",
]

logger = logging.getLogger(__name__)

#: enumeration is guaranteed fast through n = 6; n = 7 runs with a warning
ENUMERATION_LIMIT = 7
_ENUMERATION_FAST = 6


class HypermapError(ValueError):
    pass


class DisconnectedDessinError(HypermapError):
    """The permutation pair does not act transitively."""


@dataclass(frozen=True, order=True)
class Hypermap:
    sigma: Permutation
    alpha: Permutation

    @property
    def n(self) -> int:
        return self.sigma.n

    @property
    def phi(self) -> Permutation:
        return inverse(compose(self.sigma, self.alpha))

    def __str__(self) -> str:
        return f"sigma={self.sigma} alpha={self.alpha}"


@dataclass(frozen=True)
class Passport:
    """Sorted degree lists of black vertices, white vertices and faces."""

    black_degrees: tuple[int, ...]
    white_degrees: tuple[int, ...]
    face_degrees: tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "black": list(self.black_degrees),
            "white": list(self.white_degrees),
            "faces": list(self.face_degrees),
        }


@dataclass(frozen=True)
class GenusReport:
    chi: int
    genus: int
    B: int
    W: int
    F: int
    n: int


def from_pair(n: int, sigma: Permutation, alpha: Permutation) -> Hypermap:
    if sigma.n != n or alpha.n != n:
        raise PermutationError(
            f"incompatible degrees: n={n}, sigma on {sigma.n}, alpha on {alpha.n}"
        )
    if not is_transitive([sigma, alpha], n):
        raise DisconnectedDessinError(
            f"<sigma, alpha> is not transitive on 1..{n}; the dessin would be disconnected"
        )
    return Hypermap(sigma, alpha)


def genus(h: Hypermap) -> GenusReport:
    B = len(cycle_decomposition(h.sigma))
    W = len(cycle_decomposition(h.alpha))
    F = len(cycle_decomposition(h.phi))
    chi = B + W + F - h.n
    if chi % 2 or chi > 2:
        # unreachable for a transitive pair
        raise HypermapError(f"Euler characteristic {chi} is not even and <= 2")
    return GenusReport(chi=chi, genus=(2 - chi) // 2, B=B, W=W, F=F, n=h.n)


def passport(h: Hypermap) -> Passport:
    return Passport(
        tuple(h.sigma.cycle_type()),
        tuple(h.alpha.cycle_type()),
        tuple(h.phi.cycle_type()),
    )


def is_plane_tree(h: Hypermap) -> bool:
    g = genus(h)
    return g.genus == 0 and g.F == 1


def relabel(h: Hypermap, m: Permutation) -> Hypermap:
    """Rename every half-edge ``x`` to ``m(x)``; the result is isomorphic to ``h``."""
    mi = inverse(m)
    return Hypermap(compose(compose(mi, h.sigma), m), compose(compose(mi, h.alpha), m))


def _bfs_tables(s: tuple[int, ...], a: tuple[int, ...], seed: int) -> tuple:
    n = len(s)
    new = [0] * (n + 1)
    order = [seed]
    new[seed] = 1
    k = 1
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for y in (s[x - 1], a[x - 1]):
            if not new[y]:
                k += 1
                new[y] = k
                order.append(y)
    # order[j] is the old label of new label j + 1
    st = tuple(new[s[x - 1]] for x in order)
    at = tuple(new[a[x - 1]] for x in order)
    return st + at


def canonical_form(h: Hypermap) -> Hypermap:
    """Lexicographically least relabeling over breadth-first traversals.

    Each label seeds one traversal that numbers half-edges in the order
    they are reached through ``sigma`` then ``alpha``.  Conjugate pairs
    produce the same set of tables, so the minimum is a complete invariant.
    """
    s, a = h.sigma.images, h.alpha.images
    best = min(_bfs_tables(s, a, seed) for seed in range(1, h.n + 1))
    return Hypermap(Permutation(best[: h.n]), Permutation(best[h.n :]))


def is_isomorphic(h1: Hypermap, h2: Hypermap) -> bool:
    if h1.n != h2.n:
        return False
    return canonical_form(h1) == canonical_form(h2)


def _partitions(n: int, largest: int | None = None) -> Iterator[list[int]]:
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k] + rest


def _cycle_type_representative(parts: list[int]) -> Permutation:
    cycles, start = [], 1
    for k in parts:
        cycles.append(list(range(start, start + k)))
        start += k
    return from_cycles(cycles, sum(parts))


def enumerate_hypermaps(n: int) -> list[Hypermap]:
    """All hypermaps with ``n`` half-edges up to isomorphism, as sorted canonical forms.

    ``sigma`` runs over one representative per cycle type and ``alpha`` over
    the whole symmetric group.
    """
    if n < 1:
        raise HypermapError(f"invalid size {n}")
    if n > ENUMERATION_LIMIT:
        raise HypermapError(
            f"enumeration refused for n={n}: limit is n <= {ENUMERATION_LIMIT}"
        )
    if n > _ENUMERATION_FAST:
        logger.warning("enumerating hypermaps with n=%d may take a while", n)
    found: set[Hypermap] = set()
    for parts in _partitions(n):
        sigma = _cycle_type_representative(parts)
        for images in itertools.permutations(range(1, n + 1)):
            alpha = Permutation(images)
            if is_transitive([sigma, alpha], n):
                found.add(canonical_form(Hypermap(sigma, alpha)))
    return sorted(found)


def _dyck_words(n: int) -> Iterator[tuple[int, ...]]:
    def rec(prefix, opened, depth):
        if len(prefix) == 2 * n:
            yield tuple(prefix)
            return
        if opened < n:
            yield from rec(prefix + [1], opened + 1, depth + 1)
        if depth > 0:
            yield from rec(prefix + [0], opened, depth - 1)

    yield from rec([], 0, 0)


def _tree_from_dyck(word: tuple[int, ...]) -> Hypermap:
    n = len(word) // 2
    rotations: list[list[int]] = [[]]  # root vertex 0
    depth_of = [0]
    stack = [0]
    label = 0
    for step in word:
        if step:
            label += 1
            rotations[stack[-1]].append(label)
            rotations.append([label])
            depth_of.append(depth_of[stack[-1]] + 1)
            stack.append(len(rotations) - 1)
        else:
            stack.pop()
    black = [r for r, d in zip(rotations, depth_of) if d % 2 == 0]
    white = [r for r, d in zip(rotations, depth_of) if d % 2 == 1]
    return Hypermap(from_cycles(black, n), from_cycles(white, n))


def plane_trees(n: int) -> list[Hypermap]:
    """All bicoloured plane trees with ``n`` edges up to isomorphism.

    Generated from Dyck words (rooted plane trees, root coloured black),
    so there is no size limit beyond the Catalan growth.
    """
    if n < 1:
        raise HypermapError(f"invalid size {n}")
    return sorted({canonical_form(_tree_from_dyck(w)) for w in _dyck_words(n)})


def star(n: int) -> Hypermap:
    """One black vertex of degree ``n`` with ``n`` white leaves."""
    return from_pair(n, from_cycles([range(1, n + 1)], n), identity(n))


def two_star(n: int) -> Hypermap:
    """Dessin of ``(z^n - 1)^2``: a white centre of degree ``n``, each arm a path
    black(2) - white leaf, so ``2n`` half-edges in total.

    Labels ``1..n`` are the inner half-edges, ``n+1..2n`` the outer ones.
    """
    N = 2 * n
    sigma = from_cycles([(i, n + i) for i in range(1, n + 1)], N)
    alpha = from_cycles([range(1, n + 1)], N)
    return from_pair(N, sigma, alpha)


def chain(n: int) -> Hypermap:
    """Path with ``n`` edges, alternating colours, starting at a white end.

    This matches ``(1 + T_n(z)) / 2``, whose endpoint ``z = 1`` maps to 1.
    """
    sigma = from_cycles([(i, i + 1) for i in range(1, n, 2)], n)
    alpha = from_cycles([(i, i + 1) for i in range(2, n, 2)], n)
    return from_pair(n, sigma, alpha)


def to_json(h: Hypermap) -> dict:
    return {
        "n": h.n,
        "sigma": [list(c) for c in h.sigma.cycles()],
        "alpha": [list(c) for c in h.alpha.cycles()],
    }


def from_json(data: dict | str) -> Hypermap:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        n = int(data["n"])
        sigma = from_cycles(data["sigma"], n)
        alpha = from_cycles(data["alpha"], n)
    except (KeyError, TypeError) as exc:
        raise HypermapError(f"malformed dessin JSON: {exc}") from None
    return from_pair(n, sigma, alpha)


def to_dot(h: Hypermap, name: str = "dessin") -> str:
    lines = [f"graph {name} {{"]
    lines.append("  /* faces (cycles of phi):")
    for c in h.phi.cycles():
        lines.append("     (" + " ".join(map(str, c)) + ")")
    lines.append("  */")
    black = {x: i for i, c in enumerate(h.sigma.cycles(), start=1) for x in c}
    white = {x: j for j, c in enumerate(h.alpha.cycles(), start=1) for x in c}
    for i, c in enumerate(h.sigma.cycles(), start=1):
        lines.append(
            f'  b{i} [shape=circle, style=filled, fillcolor=black, label="", '
            f'tooltip="({" ".join(map(str, c))})"];'
        )
    for j, c in enumerate(h.alpha.cycles(), start=1):
        lines.append(
            f'  w{j} [shape=circle, style=solid, fillcolor=white, label="", '
            f'tooltip="({" ".join(map(str, c))})"];'
        )
    for x in range(1, h.n + 1):
        lines.append(f'  b{black[x]} -- w{white[x]} [label="{x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def degree_counts(h: Hypermap) -> Counter:
    """Multiset of (colour, degree) pairs, handy for quick comparisons."""
    c = Counter(("black", d) for d in h.sigma.cycle_type())
    c.update(("white", d) for d in h.alpha.cycle_type())
    return c
