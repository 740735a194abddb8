"""Univariate polynomials with ascending coefficient tuples."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

__all__ = ["Poly", "evaluate", "derivative", "chebyshev", "poly_to_json", "poly_from_json"]


def _trim(coeffs: Sequence[Number]) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Poly:
    """Polynomial ``sum(coeffs[k] * z**k)``.

    Coefficients may be ints, Fractions or complex floats.  Trailing exact
    zeros are dropped, so the leading coefficient is nonzero; the zero
    polynomial has ``coeffs == ()`` and degree -1.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def from_roots(cls, roots: Iterable[tuple[complex, int]], lead: complex = 1) -> "Poly":
        """``lead * prod((z - r) ** m)`` for ``(r, m)`` in ``roots``."""
        c = np.array([lead], dtype=complex)
        for r, m in roots:
            for _ in range(m):
                c = np.convolve(c, [-r, 1.0])
        return cls(tuple(complex(x) for x in c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z):
        return evaluate(self, z)

    def as_array(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __add__(self, other: "Poly | Number") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly((other,))
        a, b = list(self.coeffs), list(other.coeffs)
        size = max(len(a), len(b))
        a += [0] * (size - len(a))
        b += [0] * (size - len(b))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly | Number") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly((other,))
        return self + (-other)

    def __mul__(self, other: "Poly | Number") -> "Poly":
        if not isinstance(other, Poly):
            return Poly(tuple(c * other for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return Poly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly((1,))
        for _ in range(k):
            out = out * self
        return out

    def compose_linear(self, a: Number, b: Number) -> "Poly":
        """``p(a z + b)`` by Horner's scheme on polynomials."""
        lin = Poly((b, a))
        out = Poly(())
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            terms.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(terms)


def evaluate(p: Poly, z):
    """Horner evaluation; works on scalars and numpy arrays."""
    acc = 0 * z
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def derivative(p: Poly) -> Poly:
    return Poly(tuple(k * c for k, c in enumerate(p.coeffs) if k > 0))


def chebyshev(n: int) -> Poly:
    """Chebyshev polynomial ``T_n`` with exact integer coefficients."""
    if n < 0:
        raise ValueError("n must be non-negative")
    prev, cur = Poly((1,)), Poly((0, 1))
    if n == 0:
        return prev
    two_z = Poly((0, 2))
    for _ in range(n - 1):
        prev, cur = cur, two_z * cur - prev
    return cur


def _encode(c) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


def poly_to_json(p: Poly) -> dict:
    out = {"coeffs": [_encode(c) for c in p.coeffs]}
    if p.coeffs and all(isinstance(c, (int, Fraction)) for c in p.coeffs):
        out["exact"] = [str(Fraction(c)) for c in p.coeffs]
    return out


def poly_from_json(data: dict | str) -> Poly:
    if isinstance(data, str):
        data = json.loads(data)
    if "exact" in data:
        return Poly(tuple(Fraction(s) for s in data["exact"]))
    coeffs = []
    for item in data["coeffs"]:
        if isinstance(item, (list, tuple)):
            re_, im = item
            coeffs.append(complex(re_, im))
        else:
            coeffs.append(complex(item))
    return Poly(tuple(coeffs))
