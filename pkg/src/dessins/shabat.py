"""Critical data, affine equivalence and numerical Shabat polynomials.

A Shabat polynomial has at most two critical values.  Here they are
always normalised to ``{0, 1}``: black vertices of a plane tree are the
roots of ``P`` and white vertices the roots of ``P - 1``, with
multiplicities equal to the vertex degrees.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .hypermap import Hypermap, is_isomorphic, is_plane_tree, passport
from .poly import Poly, chebyshev, derivative, evaluate

__all__ = [
    "CriticalData",
    "AmbiguousClusteringError",
    "critical_data",
    "critical_values_approx",
    "AffineEquivalence",
    "apply_equivalence",
    "ShabatPolynomial",
    "family_polynomial",
    "SolverConfig",
    "SolverError",
    "NonconvergenceError",
    "WrongClassError",
    "solve_tree",
    "coefficient_residual",
    "equiangular_layout",
]

logger = logging.getLogger(__name__)

Family = Literal["star", "two_star", "chain"]
FAMILIES = ("star", "two_star", "chain")

_AMBIGUITY_FACTOR = 10.0


class AmbiguousClusteringError(ValueError):
    def __init__(self, what: str, gap: float, tol: float):
        super().__init__(
            f"ambiguous clustering of {what}: gap {gap:.3e} straddles tolerance {tol:.3e}"
        )
        self.gap = gap
        self.tol = tol


@dataclass(frozen=True)
class CriticalData:
    points: list[tuple[complex, int]]
    values: list[complex]


def _single_linkage(xs: np.ndarray, tol: float, scale=None) -> list[list[int]]:
    """Group indices whose chained distances are below ``tol``.

    Raises if some pairwise distance lies in ``[tol, 10 tol)``, since the
    grouping would then depend on the exact tolerance.
    """
    n = len(xs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            t = tol if scale is None else tol * max(1.0, scale[i], scale[j])
            d = abs(xs[i] - xs[j])
            if d < t:
                parent[find(i)] = find(j)
            elif d < _AMBIGUITY_FACTOR * t:
                raise AmbiguousClusteringError("critical data", float(d), t)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _derivative_roots(p: Poly) -> np.ndarray:
    dp = derivative(p).as_array()
    if len(dp) <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(dp[::-1])


def critical_data(p: Poly, tol: float = 1e-6) -> CriticalData:
    """Critical points with multiplicities and the distinct critical values.

    Roots of ``P'`` come from companion-matrix eigenvalues and are clustered
    within ``tol``; a cluster of ``k`` roots is a critical point of
    multiplicity ``k + 1``.
    """
    if p.degree < 1:
        raise ValueError("critical data needs degree >= 1")
    roots = _derivative_roots(p)
    points = []
    for g in _single_linkage(roots, tol):
        z = complex(np.mean(roots[g]))
        points.append((z, len(g) + 1))
    imgs = np.array([complex(evaluate(p, z)) for z, _ in points], dtype=complex)
    values = []
    for g in _single_linkage(imgs, tol, scale=np.abs(imgs)):
        values.append(complex(np.mean(imgs[g])))
    return CriticalData(points, values)


def critical_values_approx(p: Poly) -> np.ndarray:
    """Images of all roots of ``P'``, without clustering.

    Critical values are well conditioned even when the critical points
    themselves are not, so this is what proximity checks use.
    """
    roots = _derivative_roots(p)
    coeffs = p.as_array()
    return np.array([np.polyval(coeffs[::-1], z) for z in roots], dtype=complex)


@dataclass(frozen=True)
class AffineEquivalence:
    """``Q(z) = A * P(a z + b) + B``."""

    A: complex
    B: complex
    a: complex
    b: complex

    def __post_init__(self):
        if self.A == 0 or self.a == 0:
            raise ValueError("A and a must be nonzero")

    def inverse(self) -> "AffineEquivalence":
        # P(w) = (Q((w - b) / a) - B) / A
        return AffineEquivalence(1 / self.A, -self.B / self.A, 1 / self.a, -self.b / self.a)

    def map_value(self, y):
        return self.A * y + self.B

    def map_point(self, z):
        """Where a point ``z`` of ``P`` sits for ``Q``: solves ``a w + b = z``."""
        return (z - self.b) / self.a


def apply_equivalence(p: Poly, e: AffineEquivalence) -> Poly:
    return p.compose_linear(e.a, e.b) * e.A + e.B


@dataclass
class ShabatPolynomial:
    poly: Poly
    critical_values: tuple[complex, complex]
    black_roots: list[tuple[complex, int]]
    white_roots: list[tuple[complex, int]]
    report: dict | None = None

    @property
    def degree(self) -> int:
        return self.poly.degree

    def critical_points(self) -> list[tuple[complex, int]]:
        return [(z, m) for z, m in self.black_roots + self.white_roots if m > 1]

    def check_degrees(self) -> None:
        nb = sum(m for _, m in self.black_roots)
        nw = sum(m for _, m in self.white_roots)
        if nb != self.degree or nw != self.degree:
            raise ValueError(f"root multiplicities {nb}, {nw} do not match degree {self.degree}")


def _roots_of_unity(n: int, radius: float = 1.0) -> list[complex]:
    return [radius * cmath.exp(2j * math.pi * k / n) for k in range(n)]


def family_polynomial(family: Family, n: int) -> ShabatPolynomial:
    """Closed-form Shabat polynomials of the star, 2-star and chain families,
    all with critical values ``{0, 1}``.

    star: ``z^n``; two_star: ``(z^n - 1)^2``; chain: ``(1 + T_n(z)) / 2``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if family == "star":
        poly = Poly((0,) * n + (1,))
        black = [(0j, n)]
        white = [(w, 1) for w in _roots_of_unity(n)]
    elif family == "two_star":
        poly = (Poly((-1,) + (0,) * (n - 1) + (1,))) ** 2
        black = [(w, 2) for w in _roots_of_unity(n)]
        white = [(0j, n)] + [(w, 1) for w in _roots_of_unity(n, 2.0 ** (1.0 / n))]
    elif family == "chain":
        poly = (chebyshev(n) + 1) * Fraction(1, 2)
        black, white = [], []
        for k in range(n + 1):
            z = complex(math.cos(k * math.pi / n))
            m = 1 if k in (0, n) else 2
            (white if k % 2 == 0 else black).append((z, m))
    else:
        raise ValueError(f"unknown family {family!r}")
    sp = ShabatPolynomial(poly, (0j, 1 + 0j), black, white)
    sp.check_degrees()
    return sp


# ---------------------------------------------------------------------------
# numerical realisation of plane trees


@dataclass
class SolverConfig:
    tol: float = 1e-10
    step_tol: float = 1e-12
    cluster_tol: float = 1e-6
    max_starts: int = 50
    max_iter: int = 100
    max_degree: int = 10
    seed: int = 0


class SolverError(RuntimeError):
    pass


class NonconvergenceError(SolverError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


class WrongClassError(SolverError):
    def __init__(self, message: str, target, found):
        super().__init__(message)
        self.target = target
        self.found = found


def _prod_coeffs(roots: np.ndarray, mults: list[int], skip: int = -1) -> np.ndarray:
    """Ascending coefficients of ``prod (z - r_i)^m_i``, with one factor
    removed from root ``skip``."""
    c = np.array([1.0 + 0j])
    for i, (r, m) in enumerate(zip(roots, mults)):
        for _ in range(m - (1 if i == skip else 0)):
            c = np.convolve(c, [-r, 1.0])
    return c


def _pad(c: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=complex)
    out[: len(c)] = c[:size]
    return out


def _integrate(c: np.ndarray) -> np.ndarray:
    """Antiderivative vanishing at 0, ascending coefficients."""
    return np.concatenate([[0j], c / np.arange(1, len(c) + 1)])


def _peval(c: np.ndarray, z):
    return np.polyval(c[::-1], z)


class _CriticalSystem:
    """Unknowns are the internal vertices (critical points) and the scale.

    ``P = C * integral_0^z prod (t - v)^(deg v - 1) dt`` over internal
    vertices ``v``; the equations ask ``P`` to vanish at internal black
    vertices and equal 1 at internal white ones.  Gauge: the first black
    vertex sits at 0, the first white one at 1.
    """

    def __init__(self, black_deg: list[int], white_deg: list[int]):
        self.Ib = len(black_deg)
        self.Iw = len(white_deg)
        self.m = [d - 1 for d in black_deg] + [e - 1 for e in white_deg]
        self.target = np.array([0] * self.Ib + [1] * self.Iw, dtype=complex)
        self.free = list(range(1, self.Ib)) + list(range(self.Ib + 1, self.Ib + self.Iw))

    def points(self, u: np.ndarray):
        z = np.concatenate([[0j], u[: self.Ib - 1], [1 + 0j], u[self.Ib - 1 : -1]])
        return z, u[-1]

    def antiderivative(self, z: np.ndarray) -> np.ndarray:
        return _integrate(_prod_coeffs(z, self.m))

    def residual(self, u: np.ndarray) -> np.ndarray:
        z, C = self.points(u)
        return (C * _peval(self.antiderivative(z), z) - self.target)[1:]

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        # d/dz_k of P(z_k) through the evaluation point is P'(z_k) = 0
        z, C = self.points(u)
        cols = []
        for j in self.free:
            dq = _integrate(-self.m[j] * _prod_coeffs(z, self.m, skip=j))
            cols.append(C * _peval(dq, z)[1:])
        cols.append(_peval(self.antiderivative(z), z)[1:])
        return np.column_stack(cols)

    def pack(self, b: np.ndarray, w: np.ndarray) -> np.ndarray:
        z = np.concatenate([b, w])
        qz = _peval(self.antiderivative(z), z)[1:]
        C = np.vdot(qz, self.target[1:]) / np.vdot(qz, qz)
        return np.concatenate([b[1:], w[1:], [C]]).astype(complex)


class _TreeSystem:
    """Coefficient matching ``c prod(z - b)^d - 1 = c prod(z - w)^e`` in the
    gauge ``b_1 = 0``, ``w_1 = 1``; used to polish to full precision."""

    def __init__(self, black_deg: list[int], white_deg: list[int]):
        self.d = black_deg
        self.e = white_deg
        self.n = sum(black_deg)
        self.B = len(black_deg)
        self.W = len(white_deg)

    def unpack(self, u: np.ndarray):
        b = np.concatenate([[0j], u[: self.B - 1]])
        w = np.concatenate([[1 + 0j], u[self.B - 1 : self.B + self.W - 2]])
        return b, w, u[-1]

    def residual(self, u: np.ndarray) -> np.ndarray:
        b, w, c = self.unpack(u)
        n = self.n
        r = c * _pad(_prod_coeffs(b, self.d), n + 1) - c * _pad(_prod_coeffs(w, self.e), n + 1)
        r[0] -= 1.0
        return r[:n]

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        b, w, c = self.unpack(u)
        n = self.n
        cols = []
        for i in range(1, self.B):
            cols.append(-self.d[i] * c * _pad(_prod_coeffs(b, self.d, skip=i), n))
        for j in range(1, self.W):
            cols.append(self.e[j] * c * _pad(_prod_coeffs(w, self.e, skip=j), n))
        cols.append(_pad(_prod_coeffs(b, self.d), n) - _pad(_prod_coeffs(w, self.e), n))
        return np.column_stack(cols)


def _newton(system, u: np.ndarray, cfg: SolverConfig):
    """Damped Newton; returns ``(u, max |residual|, iterations)``."""
    r = system.residual(u)
    rn = float(np.max(np.abs(r)))
    it = 0
    for it in range(1, cfg.max_iter + 1):
        if not np.isfinite(rn):
            break
        step = np.linalg.lstsq(system.jacobian(u), -r, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        lam = 1.0
        while True:
            u_new = u + lam * step
            r_new = system.residual(u_new)
            rn_new = float(np.max(np.abs(r_new)))
            if rn_new < rn or lam < 1e-4:
                break
            lam /= 2
        if not rn_new < rn:
            break
        u, r, rn = u_new, r_new, rn_new
        if lam * np.max(np.abs(step)) <= cfg.step_tol * (1 + np.max(np.abs(u))):
            break
    return u, rn, it


def _newton_homotopy(system, u0: np.ndarray, max_steps: int = 2000):
    """Follow ``F(u) = (1 - t) F(u0)`` from ``t = 0`` to 1.

    Fallback for starts where damped Newton stalls in a local minimum of
    the residual; returns None if the path cannot be followed.
    """
    r0 = system.residual(u0)
    u, t, dt = u0.copy(), 0.0, 0.05
    for _ in range(max_steps):
        if t >= 1:
            return u
        t1 = min(1.0, t + dt)
        try:
            du = np.linalg.solve(system.jacobian(u), -r0)
        except np.linalg.LinAlgError:
            return None
        w = u + (t1 - t) * du
        ok = False
        for _ in range(6):
            step = np.linalg.lstsq(system.jacobian(w), (1 - t1) * r0 - system.residual(w), rcond=None)[0]
            w = w + step
            if np.max(np.abs(step)) < 1e-9 * (1 + np.max(np.abs(w))):
                ok = True
                break
        if ok and np.max(np.abs(w - u)) < 0.3 * (1 + np.max(np.abs(u))):
            u, t, dt = w, t1, min(1.5 * dt, 0.2)
        else:
            dt /= 2
            if dt < 1e-7:
                return None
    return u if t >= 1 else None


def coefficient_residual(sp: ShabatPolynomial) -> float:
    """Max coefficient of ``c prod(z-b)^d - 1 - c prod(z-w)^e``, where ``c``
    is the leading coefficient of ``sp.poly``."""
    n = sp.degree
    c = complex(sp.poly.coeffs[-1])
    pb = Poly.from_roots(sp.black_roots, c).as_array()
    pw = Poly.from_roots(sp.white_roots, c).as_array()
    diff = _pad(pb, n + 1) - _pad(pw, n + 1)
    diff[0] -= 1
    return float(np.max(np.abs(diff)))


def _tree_vertices(tree: Hypermap):
    black = tree.sigma.cycles()
    white = tree.alpha.cycles()
    black_of = {x: i for i, c in enumerate(black) for x in c}
    white_of = {x: j for j, c in enumerate(white) for x in c}
    return black, white, black_of, white_of


def equiangular_layout(tree: Hypermap, shrink: float = 1.0, root_label: int = 1):
    """Drawing in which the edges at a vertex of degree ``d`` leave at
    angles ``2 pi / d`` apart, counterclockwise in rotation order.

    Shabat trees have exactly this local geometry.  Edge length decays by
    ``shrink`` per level.  Positions are normalised so that the ends of
    half-edge ``root_label`` sit at 0 (black) and 1 (white), and are
    indexed like the cycles of ``sigma`` and ``alpha``.
    """
    black, white, black_of, white_of = _tree_vertices(tree)
    rot = {("b", i): c for i, c in enumerate(black)}
    rot.update({("w", j): c for j, c in enumerate(white)})

    def other_end(v, x):
        return ("w", white_of[x]) if v[0] == "b" else ("b", black_of[x])

    root = ("b", black_of[root_label])
    pos = {root: 0j}
    # (vertex, reference half-edge, its angle, incoming half-edge, depth)
    stack = [(root, root_label, 0.0, None, 0)]
    while stack:
        v, ref, theta, incoming, depth = stack.pop()
        cyc = rot[v]
        d = len(cyc)
        k0 = cyc.index(ref)
        for k in range(d):
            x = cyc[(k0 + k) % d]
            if x == incoming:
                continue
            ang = theta + 2 * math.pi * k / d
            u = other_end(v, x)
            pos[u] = pos[v] + shrink**depth * cmath.exp(1j * ang)
            stack.append((u, x, ang + math.pi, x, depth + 1))
    w1 = pos[("w", white_of[root_label])]
    b = np.array([pos[("b", i)] / w1 for i in range(len(black))])
    w = np.array([pos[("w", j)] / w1 for j in range(len(white))])
    return b, w


def _star_polynomial(tree: Hypermap) -> ShabatPolynomial:
    n = tree.n
    roots = _roots_of_unity(n)
    if len(tree.sigma.cycles()) == 1:
        poly = Poly.from_roots([(0j, n)])
        return ShabatPolynomial(poly, (0j, 1 + 0j), [(0j, n)], [(w, 1) for w in roots])
    # white centre: P = 1 - z^n
    poly = Poly((1 + 0j,) + (0j,) * (n - 1) + (-1 + 0j,))
    return ShabatPolynomial(poly, (0j, 1 + 0j), [(w, 1) for w in roots], [(0j, n)])


def _min_gap(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices(len(z))] = np.inf
    return float(d.min())


def _leaf_roots(full: np.ndarray, internal: np.ndarray, mults: list[int], count: int) -> np.ndarray:
    """Simple roots of ``full`` left after dividing out the internal factors."""
    if count == 0:
        return np.zeros(0, dtype=complex)
    divisor = _prod_coeffs(internal, mults)
    quotient, _ = np.polydiv(full[::-1], divisor[::-1])
    z = np.roots(quotient)
    for _ in range(5):
        z = z - _peval(full, z) / _peval(np.polyder(full[::-1])[::-1], z)
    return z


def _finish(tree, crit, full, u, res, cfg, track_cfg):
    """Turn a critical-system solution into a checked Shabat polynomial.

    Returns ``(ShabatPolynomial, iterations)`` on success, the recovered
    dessin if it is a different tree, or None.
    """
    from .monodromy import MonodromyError, dessin_of

    if not res <= cfg.tol:
        return None
    z, C = crit.points(u)
    if _min_gap(z) < cfg.cluster_tol:
        return None
    zb, zw = z[: crit.Ib], z[crit.Ib :]
    nb_leaves = len(full.d) - crit.Ib
    nw_leaves = len(full.e) - crit.Iw
    pcoef = C * crit.antiderivative(z)
    lb = _leaf_roots(pcoef, zb, full.d[: crit.Ib], nb_leaves)
    p1 = pcoef.copy()
    p1[0] -= 1
    lw = _leaf_roots(p1, zw, full.e[: crit.Iw], nw_leaves)
    allb = np.concatenate([zb, lb])
    allw = np.concatenate([zw, lw])
    if _min_gap(np.concatenate([allb, allw])) < cfg.cluster_tol:
        return None
    u_full = np.concatenate([allb[1:], allw[1:], [pcoef[-1]]])
    u_full, res_full, it_full = _newton(full, u_full, cfg)
    if not res_full <= cfg.tol:
        return None
    allb, allw, c = full.unpack(u_full)
    broots = [(complex(r), m) for r, m in zip(allb, full.d)]
    wroots = [(complex(r), m) for r, m in zip(allw, full.e)]
    sp = ShabatPolynomial(Poly.from_roots(broots, complex(c)), (0j, 1 + 0j), broots, wroots)
    try:
        found = dessin_of(sp, track_cfg)
    except MonodromyError:
        return None
    if not is_isomorphic(found, tree):
        return found
    return sp, it_full


def solve_tree(tree: Hypermap, cfg: SolverConfig | None = None, track_cfg=None) -> ShabatPolynomial:
    """Shabat polynomial of a plane tree, with critical values ``{0, 1}``.

    The internal vertices are found by damped Newton iteration on the
    critical-value equations, started from equiangular drawings of the
    tree; the full root system is then polished on the coefficient
    identity.  A start is accepted only if the dessin recovered by
    monodromy is isomorphic to ``tree``.
    """
    from .monodromy import TrackConfig

    cfg = cfg or SolverConfig()
    track_cfg = track_cfg or TrackConfig()
    if not is_plane_tree(tree):
        raise ValueError("solve_tree needs a plane tree (genus 0, one face)")
    n = tree.n
    if n > cfg.max_degree:
        raise ValueError(f"tree with {n} edges exceeds the degree limit {cfg.max_degree}")

    black, white, black_of, white_of = _tree_vertices(tree)
    root = next(
        (x for x in range(1, n + 1) if len(black[black_of[x]]) > 1 and len(white[white_of[x]]) > 1),
        None,
    )
    if root is None:
        # a star: at most one internal vertex
        sp = _star_polynomial(tree)
        sp.report = {"n": n, "seed": cfg.seed, "start": 0, "strategy": "closed-form",
                     "iterations": 0, "residual": coefficient_residual(sp), "starts_tried": 0}
        return sp

    bi = [black_of[root]] + [i for i in range(len(black)) if i != black_of[root] and len(black[i]) > 1]
    wi = [white_of[root]] + [j for j in range(len(white)) if j != white_of[root] and len(white[j]) > 1]
    bdeg = [len(black[i]) for i in bi]
    wdeg = [len(white[j]) for j in wi]
    nb_leaves = sum(1 for c in black if len(c) == 1)
    nw_leaves = sum(1 for c in white if len(c) == 1)
    crit = _CriticalSystem(bdeg, wdeg)
    full = _TreeSystem(bdeg + [1] * nb_leaves, wdeg + [1] * nw_leaves)

    rng = np.random.default_rng(cfg.seed)
    best = math.inf
    wrong = None
    for k in range(cfg.max_starts):
        if k == 0:
            strategy, b, w = "equiangular", *equiangular_layout(tree, 1.0, root)
        elif k == 1:
            strategy, b, w = "equiangular-shrunk", *equiangular_layout(tree, 0.7, root)
        else:
            strategy = "equiangular-perturbed"
            b, w = equiangular_layout(tree, rng.uniform(0.4, 1.2), root)
            noise = 0.01 * k
            b = b + noise * (rng.normal(size=len(b)) + 1j * rng.normal(size=len(b)))
            w = w + noise * (rng.normal(size=len(w)) + 1j * rng.normal(size=len(w)))
        b, w = b[bi], w[wi]
        b[0], w[0] = 0, 1
        u0 = crit.pack(b, w)
        for method in ("newton", "homotopy"):
            if method == "newton":
                u, res, iters = _newton(crit, u0, cfg)
            else:
                u = _newton_homotopy(crit, u0)
                if u is None:
                    continue
                u, res, iters = _newton(crit, u, cfg)
            best = min(best, res)
            outcome = _finish(tree, crit, full, u, res, cfg, track_cfg)
            if isinstance(outcome, Hypermap):
                wrong = outcome
                continue
            if outcome is None:
                continue
            sp, it_full = outcome
            c = sp.poly.coeffs[-1]
            sp.report = {
                "n": n,
                "sigma": str(tree.sigma),
                "alpha": str(tree.alpha),
                "seed": cfg.seed,
                "start": k,
                "strategy": strategy,
                "method": method,
                "iterations": iters + it_full,
                "residual": coefficient_residual(sp),
                "leading_coefficient": [complex(c).real, complex(c).imag],
                "black_roots": [[r.real, r.imag, m] for r, m in sp.black_roots],
                "white_roots": [[r.real, r.imag, m] for r, m in sp.white_roots],
                "starts_tried": k + 1,
            }
            logger.debug("solved tree n=%d on start %d (%s, %s)", n, k, strategy, method)
            return sp

    if wrong is not None:
        raise WrongClassError(
            f"starts converged only to other trees; target passport "
            f"{passport(tree)}, found {passport(wrong)}",
            passport(tree),
            passport(wrong),
        )
    raise NonconvergenceError(
        f"no start out of {cfg.max_starts} converged; best residual {best:.3e}", best
    )
