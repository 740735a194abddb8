"""Discrete Riemann-Hilbert data and the hypergeometric ODEs of three tree families.

For the star, 2-star and chain trees, the local inverses of the Belyi
polynomial satisfy a linear ODE of order at most two with singular points
in ``{0, 1, infinity}``:

* star, ``P = z^n``:             ``x y' - y / n = 0``
* 2-star, ``P = (z^n - 1)^2``:   ``x(1-x) y'' + ((1/n - 3/2) x + 1/2) y' + (1/(4n))(1 - 1/n) y = 0``
* chain, ``P = (1 + T_n(z))/2``: ``x(1-x) y'' + (1/2 - x) y' + y / n^2 = 0``

:func:`verify_family` checks this numerically on every inverse branch,
using closed-form derivatives of the inverse function.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hypermap import Hypermap, from_pair
from .monodromy import fiber
from .perm import Permutation
from .poly import Poly, derivative, evaluate, poly_to_json
from .shabat import FAMILIES, family_polynomial

__all__ = [
    "SINGULAR_LOCUS",
    "RHInstance",
    "ODESpec",
    "BranchSingularityError",
    "VerificationReport",
    "rh_instance",
    "ode_for_family",
    "hypergeometric_parameters",
    "branch_derivatives",
    "residual",
    "sample_points",
    "verify_family",
]

SINGULAR_LOCUS = ("0", "1", "inf")

#: residual thresholds used by :func:`verify_family`
THRESHOLD_ORDER2 = 1e-8
THRESHOLD_STAR = 1e-10
THRESHOLD_STAR_STANDARD = 1e-12


class BranchSingularityError(ValueError):
    """The inverse branch is not analytic at this point (``P'(y) = 0``)."""


@dataclass(frozen=True)
class RHInstance:
    """Transitive permutation data over the thrice-punctured sphere.

    ``sigma`` and ``alpha`` are the images of the loops around 0 and 1 in
    the permutation group of the edge set ``{1..edge_count}``.
    """

    edge_count: int
    sigma: Permutation
    alpha: Permutation
    singular_locus: tuple[str, ...] = SINGULAR_LOCUS

    def to_hypermap(self) -> Hypermap:
        return from_pair(self.edge_count, self.sigma, self.alpha)


def rh_instance(h: Hypermap) -> RHInstance:
    return RHInstance(h.n, h.sigma, h.alpha)


@dataclass(frozen=True)
class ODESpec:
    """``q2(x) y'' + q1(x) y' + q0(x) y = 0`` with exact rational coefficients."""

    order: int
    q2: Poly
    q1: Poly
    q0: Poly
    family: str
    n: int

    def coefficients(self) -> tuple[Poly, Poly, Poly]:
        return self.q2, self.q1, self.q0

    def belyi_polynomial(self) -> Poly:
        return family_polynomial(self.family, self.n).poly

    def leading(self) -> Poly:
        return self.q2 if self.order == 2 else self.q1

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "q2": poly_to_json(self.q2),
            "q1": poly_to_json(self.q1),
            "q0": poly_to_json(self.q0),
            "family": self.family,
            "n": self.n,
        }

    def __str__(self) -> str:
        parts = []
        for q, d in ((self.q2, "y''"), (self.q1, "y'"), (self.q0, "y")):
            if not q.is_zero:
                parts.append(f"[{_fmt(q)}] {d}")
        return " + ".join(parts) + " = 0"


def _fmt(q: Poly) -> str:
    terms = []
    for k, c in enumerate(q.coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        terms.append(f"{c}" + (f"*{mono}" if mono else ""))
    return " + ".join(terms) or "0"


def ode_for_family(family: str, n: int) -> ODESpec:
    if n < 1:
        raise ValueError("n must be >= 1")
    F = Fraction
    x_one_minus_x = Poly((0, 1, -1))
    if family == "star":
        return ODESpec(1, Poly(()), Poly((0, 1)), Poly((F(-1, n),)), family, n)
    if family == "two_star":
        q1 = Poly((F(1, 2), F(1, n) - F(3, 2)))
        q0 = Poly((F(1, 4 * n) * (1 - F(1, n)),))
        return ODESpec(2, x_one_minus_x, q1, q0, family, n)
    if family == "chain":
        # read in the variable of Q = (1 + T_n)/2, critical values {0, 1}
        q1 = Poly((F(1, 2), -1))
        q0 = Poly((F(1, n * n),))
        return ODESpec(2, x_one_minus_x, q1, q0, family, n)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def hypergeometric_parameters(ode: ODESpec) -> tuple[complex, complex, complex] | None:
    """``(a, b, c)`` with ``ode`` proportional to
    ``x(1-x) y'' + (c - (a+b+1) x) y' - a b y = 0``, or None if it is not of
    that shape."""
    if ode.order != 2 or ode.q2.degree != 2:
        return None
    c2 = ode.q2.coeffs
    if c2[0] != 0 or c2[1] == 0 or c2[2] != -c2[1]:
        return None
    s = c2[1]
    q1 = list(ode.q1.coeffs) + [0] * (2 - len(ode.q1.coeffs))
    q0 = list(ode.q0.coeffs) + [0] * (1 - len(ode.q0.coeffs))
    if len(q1) > 2 or len(q0) > 1:
        return None
    c = q1[0] / s
    apb = -q1[1] / s - 1
    ab = -q0[0] / s
    disc = cmath.sqrt(complex(apb) ** 2 - 4 * complex(ab))
    a = (complex(apb) + disc) / 2
    b = (complex(apb) - disc) / 2
    return a, b, complex(c)


def branch_derivatives(p: Poly, y: complex, tol: float = 1e-12) -> tuple[complex, complex]:
    """First and second derivative of the local inverse of ``p`` through ``y``.

    With ``p(y(x)) = x``: ``y' = 1/p'(y)`` and ``y'' = -p''(y) / p'(y)^3``.
    """
    d1 = complex(evaluate(derivative(p), y))
    if abs(d1) < tol:
        raise BranchSingularityError(f"p'(y) = {d1:.3e} at y = {y}: critical point")
    d2 = complex(evaluate(derivative(derivative(p)), y))
    return 1 / d1, -d2 / d1**3


def residual(ode: ODESpec, p: Poly, x: complex, y: complex, fiber_tol: float = 1e-10) -> complex:
    """``q2(x) y'' + q1(x) y' + q0(x) y`` for the inverse branch through ``y``."""
    px = complex(evaluate(p, y))
    if abs(px - x) > fiber_tol * max(1.0, abs(x)):
        raise ValueError(f"p(y) = {px} is not x = {x}")
    dy, d2y = branch_derivatives(p, y)
    x = complex(x)
    return (
        complex(evaluate(ode.q2, x)) * d2y
        + complex(evaluate(ode.q1, x)) * dy
        + complex(evaluate(ode.q0, x)) * y
    )


def sample_points(count: int, seed: int = 0, radius: float = 2.0, guard: float = 0.05) -> list[complex]:
    """Uniform points in the disc ``|x| < radius`` away from 0 and 1."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        r = radius * np.sqrt(rng.uniform())
        x = complex(r * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        if abs(x) > guard and abs(x - 1) > guard:
            out.append(x)
    return out


@dataclass
class VerificationReport:
    family: str
    n: int
    order: int
    samples: int
    max_residual: float
    threshold: float
    branch_max: list[float]
    template_ok: bool
    singular_points_ok: bool
    hypergeometric: tuple[complex, complex, complex] | None
    max_standard_residual: float | None = None
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        ok = self.template_ok and self.singular_points_ok and not self.errors
        ok = ok and self.max_residual <= self.threshold
        if self.family == "star" and self.max_standard_residual is not None:
            ok = ok and self.max_standard_residual <= THRESHOLD_STAR_STANDARD
        return ok

    def to_json(self) -> dict:
        hg = None
        if self.hypergeometric is not None:
            hg = {k: [v.real, v.imag] for k, v in zip("abc", self.hypergeometric)}
        return {
            "family": self.family,
            "n": self.n,
            "order": self.order,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "max_standard_residual": self.max_standard_residual,
            "threshold": self.threshold,
            "branch_max_residuals": self.branch_max,
            "template_ok": self.template_ok,
            "singular_points_ok": self.singular_points_ok,
            "hypergeometric": hg,
            "errors": self.errors,
            "pass": self.passed,
        }


def _singular_points_ok(ode: ODESpec) -> bool:
    lead = ode.leading()
    roots = np.roots(lead.as_array()[::-1]) if lead.degree > 0 else []
    return all(min(abs(r), abs(r - 1)) < 1e-12 for r in roots)


def verify_family(family: str, n: int, samples: int = 20, seed: int = 0) -> VerificationReport:
    """Check every inverse branch of the family's Belyi polynomial against
    its ODE at ``samples`` random regular points.  Failures are recorded in
    the report rather than raised."""
    ode = ode_for_family(family, n)
    p = ode.belyi_polynomial()
    threshold = THRESHOLD_STAR if ode.order == 1 else THRESHOLD_ORDER2
    hg = hypergeometric_parameters(ode)
    template_ok = ode.order == 1 or hg is not None
    branch_max = [0.0] * p.degree
    worst = 0.0
    worst_std = 0.0 if ode.order == 1 else None
    errors = []
    for x in sample_points(samples, seed):
        try:
            ys = fiber(p, x)
        except Exception as exc:  # recorded, not raised
            errors.append(f"fiber at {x}: {exc}")
            continue
        for k, y in enumerate(ys):
            try:
                r = abs(residual(ode, p, x, y))
            except Exception as exc:
                errors.append(f"branch {k + 1} at {x}: {exc}")
                continue
            branch_max[k] = max(branch_max[k], r)
            worst = max(worst, r)
            if worst_std is not None:
                worst_std = max(worst_std, r / abs(complex(evaluate(ode.q1, x))))
    return VerificationReport(
        family=family,
        n=n,
        order=ode.order,
        samples=samples,
        max_residual=worst,
        threshold=threshold,
        branch_max=branch_max,
        template_ok=template_ok,
        singular_points_ok=_singular_points_ok(ode),
        hypergeometric=hg,
        max_standard_residual=worst_std,
        errors=errors,
    )
