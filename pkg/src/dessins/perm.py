"""Permutations of the labels ``1..n``.

Composition is left to right: ``compose(p, q)`` applies ``p`` first, so
``compose(p, q)(x) == q(p(x))``.  Under this convention the rotation
permutations of a hypermap satisfy ``sigma * alpha * phi == 1``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Permutation",
    "PermutationError",
    "CycleDecomposition",
    "GroupOrderOverflow",
    "identity",
    "compose",
    "inverse",
    "cycle_decomposition",
    "is_transitive",
    "group_order",
    "from_cycles",
    "parse",
]


class PermutationError(ValueError):
    """Invalid permutation data or incompatible degrees."""


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of ``{1..n}`` stored as its image table.

    ``images[i - 1]`` is the image of label ``i``.
    """

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        n = len(images)
        if n == 0:
            raise PermutationError("permutation size must be at least 1")
        if sorted(images) != list(range(1, n + 1)):
            raise PermutationError(f"not a bijection of 1..{n}: {images}")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        return cycle_decomposition(self).cycles

    def cycle_type(self) -> list[int]:
        return cycle_decomposition(self).cycle_type

    def __str__(self) -> str:
        return format_cycles(self.cycles())

    def __repr__(self) -> str:
        return f"Permutation({str(self)!r}, n={self.n})"


@dataclass(frozen=True)
class CycleDecomposition:
    """Canonical disjoint-cycle form.

    Each cycle starts at its smallest label, cycles are sorted by that
    label and fixed points appear as 1-cycles.
    """

    n: int
    cycles: list[tuple[int, ...]]

    @property
    def cycle_type(self) -> list[int]:
        """Cycle lengths, sorted ascending."""
        return sorted(len(c) for c in self.cycles)

    def __len__(self) -> int:
        return len(self.cycles)

    def to_permutation(self) -> Permutation:
        return from_cycles(self.cycles, self.n)

    def __str__(self) -> str:
        return format_cycles(self.cycles)


@dataclass(frozen=True)
class GroupOrderOverflow:
    """Returned by :func:`group_order` when the closure exceeds its cap."""

    cap: int

    def __str__(self) -> str:
        return f">{self.cap}"


def identity(n: int) -> Permutation:
    if n < 1:
        raise PermutationError(f"invalid permutation size {n}")
    return Permutation(tuple(range(1, n + 1)))


def _check_same_size(p: Permutation, q: Permutation) -> None:
    if p.n != q.n:
        raise PermutationError(f"incompatible degrees {p.n} and {q.n}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Left-to-right product: ``p`` first, then ``q``."""
    _check_same_size(p, q)
    qi = q.images
    return Permutation(tuple(qi[v - 1] for v in p.images))


def inverse(p: Permutation) -> Permutation:
    out = [0] * p.n
    for i, v in enumerate(p.images, start=1):
        out[v - 1] = i
    return Permutation(tuple(out))


def cycle_decomposition(p: Permutation) -> CycleDecomposition:
    seen = [False] * (p.n + 1)
    cycles = []
    for start in range(1, p.n + 1):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = p(x)
        cycles.append(tuple(cyc))
    return CycleDecomposition(p.n, cycles)


def from_cycles(cycles: Iterable[Sequence[int]], n: int | None = None) -> Permutation:
    """Build a permutation from disjoint cycles.

    Labels not mentioned are fixed.  If ``n`` is omitted it is the
    largest label that occurs.
    """
    cycles = [tuple(int(x) for x in c) for c in cycles]
    labels = [x for c in cycles for x in c]
    if n is None:
        n = max(labels, default=0)
    if n < 1:
        raise PermutationError(f"invalid permutation size {n}")
    if len(set(labels)) != len(labels):
        raise PermutationError(f"cycles are not disjoint: {cycles}")
    if any(x < 1 or x > n for x in labels):
        raise PermutationError(f"label out of range 1..{n} in {cycles}")
    images = list(range(1, n + 1))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            images[a - 1] = b
    return Permutation(tuple(images))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse(text: str, n: int | None = None) -> Permutation:
    """Parse disjoint-cycle notation such as ``"(1 7 6)(2 3)(4 8 5)(9)"``.

    Labels inside a cycle are separated by whitespace or commas.  If no
    cycle contains a separator, as in ``"(176)(23)"``, every digit is a
    label; this compact form is refused when ``n > 9``.  ``"()"`` and the
    empty string denote the identity (``n`` is then required).
    """
    stripped = text.strip()
    leftover = _CYCLE_RE.sub("", stripped).strip()
    if leftover:
        raise PermutationError(f"cannot parse permutation {text!r}")
    bodies = [b.strip() for b in _CYCLE_RE.findall(stripped)]
    # compact notation only if no cycle anywhere uses separators
    compact = (n is None or n <= 9) and not any(re.search(r"[\s,]", b) for b in bodies)
    cycles = []
    for body in bodies:
        if not body:
            continue
        if compact:
            if not body.isdigit():
                raise PermutationError(f"bad cycle {body!r} in {text!r}")
            tokens = list(body)
        else:
            tokens = [t for t in re.split(r"[\s,]+", body) if t]
        try:
            cycles.append([int(t) for t in tokens])
        except ValueError:
            raise PermutationError(f"bad label in {text!r}") from None
    return from_cycles(cycles, n)


def format_cycles(cycles: Iterable[Sequence[int]]) -> str:
    return "".join("(" + " ".join(str(x) for x in c) + ")" for c in cycles)


def _check_gens(gens: Sequence[Permutation], n: int) -> None:
    if n < 1:
        raise PermutationError(f"invalid permutation size {n}")
    for g in gens:
        if g.n != n:
            raise PermutationError(f"incompatible degrees {g.n} and {n}")


def orbit(gens: Sequence[Permutation], n: int, start: int = 1) -> set[int]:
    """Orbit of ``start`` under the group generated by ``gens``."""
    _check_gens(gens, n)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g(x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def is_transitive(gens: Sequence[Permutation], n: int) -> bool:
    return len(orbit(gens, n)) == n


def group_order(gens: Sequence[Permutation], n: int, cap: int) -> int | GroupOrderOverflow:
    """Order of the group generated by ``gens``, by breadth-first closure.

    Returns a :class:`GroupOrderOverflow` marker once more than ``cap``
    elements have been found.
    """
    _check_gens(gens, n)
    if cap < 1:
        raise PermutationError("cap must be positive")
    e = tuple(range(1, n + 1))
    gen_tables = [g.images for g in gens]
    seen = {e}
    queue = deque([e])
    while queue:
        h = queue.popleft()
        for g in gen_tables:
            prod = tuple(g[v - 1] for v in h)
            if prod not in seen:
                seen.add(prod)
                if len(seen) > cap:
                    return GroupOrderOverflow(cap)
                queue.append(prod)
    return len(seen)
