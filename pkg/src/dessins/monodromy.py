"""Permutation monodromy of polynomial Belyi maps by path tracking.

The fiber of ``P`` over a basepoint is continued along loops around 0, 1
and infinity.  Loops around 0 and 1 are counterclockwise "lollipops"
(segment, circle, same segment back); the loop around infinity is a
large clockwise circle reached from above the real axis, so that with
left-to-right composition ``sigma * alpha * phi`` is the identity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .hypermap import Hypermap, from_pair
from .perm import Permutation, compose, identity, inverse, is_transitive
from .poly import Poly, derivative
from .shabat import ShabatPolynomial, critical_values_approx

__all__ = [
    "TrackConfig",
    "LoopPath",
    "MonodromyResult",
    "MonodromyError",
    "BasepointTooCloseError",
    "ConditioningError",
    "TrackingError",
    "InconsistentMonodromyError",
    "fiber",
    "track",
    "track_with_stats",
    "lollipop",
    "infinity_loop",
    "monodromy_pair",
    "dessin_of",
]


_ROUNDING = 64 * np.finfo(float).eps


class MonodromyError(RuntimeError):
    pass


class BasepointTooCloseError(MonodromyError):
    pass


class ConditioningError(MonodromyError):
    pass


class TrackingError(MonodromyError):
    def __init__(self, message: str, location: complex):
        super().__init__(message)
        self.location = location


class InconsistentMonodromyError(MonodromyError):
    pass


@dataclass
class TrackConfig:
    loop_radius: float = 0.25
    initial_step: float = 1e-2
    min_step: float = 1e-9
    guard_factor: float = 0.5
    infinity_radius: float = 2.0
    basepoint: complex = 0.5
    circle_points: int = 256
    max_newton: int = 8
    critical_tol: float = 1e-6
    max_degree: int = 40
    check_infinity: bool = True


@dataclass(frozen=True)
class LoopPath:
    vertices: tuple[complex, ...]
    basepoint: complex

    def __post_init__(self):
        vs = tuple(complex(v) for v in self.vertices)
        if not vs or vs[0] != vs[-1]:
            raise ValueError("loop path must be closed")
        if vs[0] != complex(self.basepoint):
            raise ValueError("loop path must start at its basepoint")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "basepoint", complex(self.basepoint))

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=complex)


def _circle(center: complex, radius: float, start_angle: float, clockwise: bool, points: int):
    sign = -1.0 if clockwise else 1.0
    return [
        center + radius * cmath.exp(1j * (start_angle + sign * 2 * math.pi * k / points))
        for k in range(points + 1)
    ]


def lollipop(basepoint: complex, center: complex, radius: float, points: int = 256) -> LoopPath:
    """Counterclockwise loop around ``center``: straight to the circle, once
    round it, and straight back."""
    basepoint = complex(basepoint)
    direction = basepoint - center
    if abs(direction) <= radius:
        raise ValueError("basepoint lies inside the loop circle")
    theta = cmath.phase(direction)
    ring = _circle(center, radius, theta, False, points)
    ring[-1] = ring[0]
    return LoopPath(tuple([basepoint] + ring + [basepoint]), basepoint)


def infinity_loop(basepoint: complex, radius: float, center: complex = 0.5, points: int = 256) -> LoopPath:
    """Clockwise circle of ``radius`` about ``center`` entered vertically
    from the basepoint, going upwards."""
    basepoint = complex(basepoint)
    dx = basepoint.real - center.real if isinstance(center, complex) else basepoint.real - center
    if abs(dx) >= radius:
        raise ValueError("basepoint outside the infinity circle")
    top = complex(basepoint.real, complex(center).imag + math.sqrt(radius**2 - dx**2))
    if top.imag <= basepoint.imag:
        raise ValueError("basepoint outside the infinity circle")
    theta = cmath.phase(top - center)
    ring = _circle(complex(center), radius, theta, True, points)
    ring[0] = ring[-1] = top
    return LoopPath(tuple([basepoint] + ring + [basepoint]), basepoint)


def _as_poly(p) -> Poly:
    return p.poly if isinstance(p, ShabatPolynomial) else p


def _pairwise_min(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices(len(z))] = np.inf
    return float(d.min())


def fiber(p, x0: complex, tol: float = 1e-6, guard: float = 1e-8) -> list[complex]:
    """All ``deg P`` solutions of ``P(z) = x0``, Newton-polished and sorted
    by (real, imaginary) part."""
    p = _as_poly(p)
    if p.degree < 1:
        raise ValueError("fiber needs degree >= 1")
    x0 = complex(x0)
    cv = critical_values_approx(p)
    if len(cv) and np.min(np.abs(cv - x0)) <= tol:
        raise BasepointTooCloseError(
            f"basepoint {x0} is within {tol} of a critical value"
        )
    c = p.as_array()
    shifted = c.copy()
    shifted[0] -= x0
    z = np.roots(shifted[::-1]).astype(complex)
    z = _polish(c, derivative(p).as_array(), z, x0)
    if _pairwise_min(z) < guard:
        raise ConditioningError(f"fiber points over {x0} collide within {guard}")
    key = lambda w: (round(w.real, 9), round(w.imag, 9))
    return sorted((complex(w) for w in z), key=key)


def _polish(c: np.ndarray, dc: np.ndarray, z: np.ndarray, x: complex, iters: int = 20) -> np.ndarray:
    cr, dcr = c[::-1], dc[::-1]
    for _ in range(iters):
        f = np.polyval(cr, z) - x
        step = f / np.polyval(dcr, z)
        z = z - step
        scale = np.polyval(np.abs(cr), np.abs(z))
        if np.all(np.abs(np.polyval(cr, z) - x) <= np.maximum(1e-12, _ROUNDING * scale)):
            break
    return z


@dataclass
class TrackStats:
    accepted: int = 0
    rejected: int = 0
    smallest_step: float = math.inf
    guard_trips: int = 0

    def as_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "smallest_step": self.smallest_step,
            "guard_trips": self.guard_trips,
        }


def track_with_stats(p, start_fiber, path: LoopPath, cfg: TrackConfig | None = None):
    """Continue every fiber point along ``path`` in lockstep.

    Returns the induced permutation (start index -> end index, 1-based)
    and step statistics.
    """
    cfg = cfg or TrackConfig()
    p = _as_poly(p)
    c = p.as_array()
    cr = c[::-1]
    acr = np.abs(cr)
    dcr = derivative(p).as_array()[::-1]
    z0 = np.array(start_fiber, dtype=complex)
    n = len(z0)
    if n != p.degree:
        raise ValueError(f"fiber has {n} points but degree is {p.degree}")
    vs = path.as_array()
    if abs(np.polyval(cr, z0) - path.basepoint).max() > 1e-8 * max(1.0, abs(path.basepoint)):
        raise ValueError("fiber does not lie over the path basepoint")

    seg = np.abs(np.diff(vs))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    length = float(cum[-1])
    stats = TrackStats()
    if length == 0 or n == 1:
        return identity(n), stats

    cv = critical_values_approx(p)
    if len(cv):
        near = np.min(np.abs(vs[:, None] - cv[None, :]))
        if near < cfg.critical_tol:
            raise TrackingError("path passes through a critical value", complex(vs[np.argmin(np.min(np.abs(vs[:, None] - cv[None, :]), axis=1))]))

    def point_at(s: float) -> complex:
        k = int(np.searchsorted(cum, s, side="right") - 1)
        k = min(max(k, 0), len(seg) - 1)
        if seg[k] == 0:
            return complex(vs[k])
        t = (s - cum[k]) / seg[k]
        return complex(vs[k] + t * (vs[k + 1] - vs[k]))

    sep0 = _pairwise_min(z0)
    guard = cfg.guard_factor * sep0
    hmax = cfg.initial_step * length
    hmin = cfg.min_step * length
    h = hmax
    s = 0.0
    z = z0.copy()
    x_prev = point_at(0.0)
    while s < length:
        s1 = min(s + h, length)
        x1 = point_at(s1)
        dp = np.polyval(dcr, z)
        z_pred = z + (x1 - x_prev) / dp
        w = z_pred.copy()
        ok = False
        with np.errstate(all="ignore"):
            for _ in range(cfg.max_newton):
                f = np.polyval(cr, w) - x1
                dw = f / np.polyval(dcr, w)
                w = w - dw
                if not np.all(np.isfinite(w)):
                    break
                # converged once the update or the residual hits rounding level
                floor = _ROUNDING * np.polyval(acr, np.abs(w))
                if np.all((np.abs(dw) <= 1e-13 * (1 + np.abs(w))) | (np.abs(f) <= floor)):
                    ok = True
                    break
        if ok:
            sep = _pairwise_min(w)
            if np.max(np.abs(w - z_pred)) >= 0.25 * sep or np.max(np.abs(w - z)) >= 0.5 * sep:
                ok = False
        if not ok:
            stats.rejected += 1
            h /= 2
            if h < hmin:
                raise TrackingError(
                    f"step underflow while tracking near x = {x1:.6g}", x1
                )
            continue
        stats.accepted += 1
        stats.smallest_step = min(stats.smallest_step, (s1 - s) / length)
        z, s, x_prev = w, s1, x1
        if sep < guard:
            stats.guard_trips += 1
            h = max(h / 2, hmin)
        else:
            h = min(2 * h, hmax)

    # match end points to start labels
    d = np.abs(z[:, None] - z0[None, :])
    images = [int(np.argmin(d[k])) + 1 for k in range(n)]
    if sorted(images) != list(range(1, n + 1)) or np.max(np.min(d, axis=1)) > 0.25 * sep0:
        raise TrackingError("continued fiber does not return onto the start fiber", path.basepoint)
    return Permutation(tuple(images)), stats


def track(p, start_fiber, path: LoopPath, cfg: TrackConfig | None = None) -> Permutation:
    return track_with_stats(p, start_fiber, path, cfg)[0]


@dataclass
class MonodromyResult:
    basepoint: complex
    fiber: list[complex]
    sigma: Permutation
    alpha: Permutation
    phi: Permutation
    phi_tracked: Permutation | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "basepoint": [self.basepoint.real, self.basepoint.imag],
            "fiber": [[z.real, z.imag] for z in self.fiber],
            "sigma": str(self.sigma),
            "alpha": str(self.alpha),
            "phi": str(self.phi),
            "phi_tracked": None if self.phi_tracked is None else str(self.phi_tracked),
            "steps": self.stats,
        }


def monodromy_pair(p, cfg: TrackConfig | None = None) -> MonodromyResult:
    """Monodromy permutations of a polynomial with critical values in ``{0, 1}``.

    ``sigma`` comes from the loop around 0, ``alpha`` from the loop around
    1, and ``phi = (sigma alpha)^-1``; the loop around infinity is tracked
    independently and must reproduce ``phi``.
    """
    cfg = cfg or TrackConfig()
    poly = _as_poly(p)
    if poly.degree < 1:
        raise ValueError("degree must be >= 1")
    if poly.degree > cfg.max_degree:
        raise ValueError(f"degree {poly.degree} exceeds limit {cfg.max_degree}")
    cv = critical_values_approx(poly)
    stray = [v for v in cv if min(abs(v), abs(v - 1)) > cfg.critical_tol]
    if stray:
        raise InconsistentMonodromyError(
            f"critical value {stray[0]:.6g} is not in {{0, 1}}; normalise the polynomial first"
        )
    x0 = complex(cfg.basepoint)
    fib = fiber(poly, x0, tol=cfg.critical_tol)
    n = poly.degree
    loops = {
        "sigma": lollipop(x0, 0j, cfg.loop_radius, cfg.circle_points),
        "alpha": lollipop(x0, 1 + 0j, cfg.loop_radius, cfg.circle_points),
    }
    perms, stats = {}, {}
    for name, path in loops.items():
        perms[name], st = track_with_stats(poly, fib, path, cfg)
        stats[name] = st.as_dict()
    sigma, alpha = perms["sigma"], perms["alpha"]
    phi = inverse(compose(sigma, alpha))
    phi_tracked = None
    if cfg.check_infinity:
        path = infinity_loop(x0, cfg.infinity_radius, 0.5, cfg.circle_points)
        phi_tracked, st = track_with_stats(poly, fib, path, cfg)
        stats["phi"] = st.as_dict()
        if phi_tracked != phi:
            raise InconsistentMonodromyError(
                f"loop around infinity gives {phi_tracked}, expected {phi}"
            )
    if not is_transitive([sigma, alpha], n):
        raise InconsistentMonodromyError(
            "monodromy group is not transitive; tracking failed or P is not Belyi-normalised"
        )
    return MonodromyResult(x0, fib, sigma, alpha, phi, phi_tracked, stats)


def dessin_of(p, cfg: TrackConfig | None = None) -> Hypermap:
    r = monodromy_pair(p, cfg)
    return from_pair(len(r.fiber), r.sigma, r.alpha)
