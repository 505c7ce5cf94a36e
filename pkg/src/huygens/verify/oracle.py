"""Numeric Hadamard coefficients by integration along rays.

``U_nu(x) = -int_0^1 s**(nu - 1) (L U_{nu-1})(xi + s (x - xi)) ds`` is the
bounded solution of the transport recursion.  ``L`` is applied by central
finite differences to the recursively computed ``U_{nu-1}``; nothing here
uses the closed-form coefficients.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import NearSingularEvaluation, QuadratureFailure, SingularRayError
from ..hadamard import HadamardTable, u_eval
from ..spectral import angular_margin, angular_potential
from ..trig import compile_rational
from ..wronskian import KData
from .report import FAIL, NUMERIC_PASS, VerifyReport, timed

__all__ = [
    "transport_oracle_numeric",
    "ray_margin",
    "sample_admissible_rays",
    "check_transport_oracle",
    "ORACLE_TOLERANCES",
]

ORACLE_TOLERANCES = {1: 1e-6, 2: 1e-6, 3: 1e-4}
ANGULAR_MARGIN = 0.1
SWEEP_POINTS = 64
NODES_PER_PANEL = 12
MAX_PANELS = 8
FD_STEP = 1e-3  # relative to |y|
TUBE_WIDTH = 0.02  # relative to max(|x|, |xi|), capped by the clearance
TUBE_PANELS = 8
TUBE_NODES_S = 16
TUBE_NODES_T = 16
FD_CLEARANCE = 0.005  # step cap as a fraction of the distance to the nearest pole
# 4th-order second-derivative stencil at offsets -2..2
_STENCIL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


class _Potential:
    def __init__(self, data: KData, den_guard: float):
        self._v = compile_rational(angular_potential(data))
        self._guard = den_guard

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        r2 = pts[..., 0] ** 2 + pts[..., 1] ** 2
        p = np.arctan2(pts[..., 1], pts[..., 0])
        try:
            return np.asarray(self._v(p, den_guard=self._guard), dtype=float) / r2
        except NearSingularEvaluation as exc:
            raise SingularRayError(f"ray passes a singular line: {exc}") from None


def _rule(panels: int, n: int = NODES_PER_PANEL):
    """Composite Gauss-Legendre nodes and weights on ``[0, 1]``."""
    t, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(0.0, 1.0, panels + 1)
    nodes = np.concatenate([a + (b - a) * (t + 1) / 2 for a, b in zip(edges, edges[1:])])
    weights = np.concatenate([w * (b - a) / 2 for a, b in zip(edges, edges[1:])])
    return nodes, weights


class _Tube:
    """Thin rectangle around the segment with piecewise 2D Chebyshev interpolation.

    Local coordinates: ``s`` along ``x - xi`` in units of the segment length
    (``s = 0`` at ``xi``), ``t`` across it.  Every ray from ``xi`` to a point of
    the tube stays inside the tube, which is what makes the recursion closed.
    """

    def __init__(self, x, xi, panels: int, n_s: int, n_t: int, width: float, ext: float):
        self.xi = np.asarray(xi, dtype=float)
        d = np.asarray(x, dtype=float) - self.xi
        self.length = float(np.hypot(*d))
        self.e = d / self.length
        self.n = np.array([-self.e[1], self.e[0]])
        self.lo, self.hi = -ext, 1.0 + ext
        self.panels, self.width = panels, width
        self.plen = (self.hi - self.lo) / panels
        cs = np.cos(np.pi * (np.arange(n_s) + 0.5) / n_s)[::-1]
        ct = np.cos(np.pi * (np.arange(n_t) + 0.5) / n_t)[::-1]
        self._inv_s = np.linalg.inv(np.polynomial.chebyshev.chebvander(cs, n_s - 1))
        self._inv_t = np.linalg.inv(np.polynomial.chebyshev.chebvander(ct, n_t - 1))
        sl = self.lo + self.plen * (np.arange(panels)[:, None] + (cs[None, :] + 1) / 2)
        tl = width * ct
        S = np.broadcast_to(sl[..., None], (panels, n_s, n_t))
        T = np.broadcast_to(tl, (panels, n_s, n_t))
        self.nodes = self.to_global(S, T)  # (panels, n_s, n_t, 2)

    def to_global(self, s, t):
        return self.xi + (s * self.length)[..., None] * self.e + t[..., None] * self.n

    def fit(self, values: np.ndarray) -> np.ndarray:
        """Chebyshev coefficients per panel from values at ``self.nodes``."""
        return np.einsum("ij,pjk,lk->pil", self._inv_s, values, self._inv_t)

    def evaluate(self, coeffs: np.ndarray, pts: np.ndarray) -> np.ndarray:
        rel = pts - self.xi
        s = rel @ self.e / self.length
        t = rel @ self.n
        idx = np.clip(np.floor((s - self.lo) / self.plen).astype(int), 0, self.panels - 1)
        u = 2 * (s - self.lo - idx * self.plen) / self.plen - 1
        v = t / self.width
        out = np.empty(s.shape)
        cheb = np.polynomial.chebyshev
        for p in np.unique(idx):
            mask = idx == p
            out[mask] = cheb.chebval2d(u[mask], v[mask], coeffs[p])
        return out


class _Recursion:
    def __init__(self, pot: _Potential, tube: _Tube, nodes, weights, h_rel: float, h_cap: float):
        self.pot, self.tube = pot, tube
        self.s, self.w = nodes, weights
        self.h_rel, self.h_cap = h_rel, h_cap
        self.coeffs = {}

    def LU(self, level: int, pts: np.ndarray) -> np.ndarray:
        v = self.pot(pts)
        if level == 0:
            # L[1] = V; the stencil of a constant vanishes identically
            return v
        c = self.coeffs[level]
        h = np.minimum(self.h_rel * np.hypot(pts[..., 0], pts[..., 1]), self.h_cap)
        centre = self.tube.evaluate(c, pts)
        lap = _STENCIL[2] * 2 * centre
        for axis in (0, 1):
            for j in (0, 1, 3, 4):
                shifted = pts.copy()
                shifted[..., axis] += (j - 2) * h
                lap = lap + _STENCIL[j] * self.tube.evaluate(c, shifted)
        return -lap / (h * h) + v * centre

    def U(self, level: int, pts: np.ndarray) -> np.ndarray:
        """Ray integral of ``L U_{level-1}`` at ``pts`` of shape ``(..., 2)``."""
        xi = self.tube.xi
        y = xi + self.s[:, None] * (pts[..., None, :] - xi)
        weights = self.s ** (level - 1) * self.w
        return -(self.LU(level - 1, y) * weights).sum(axis=-1)

    def build(self, level: int):
        """Interpolant of ``U_level`` over the tube (needed before ``LU(level)``)."""
        self.coeffs[level] = self.tube.fit(self.U(level, self.tube.nodes))


def ray_margin(data: KData, x, xi, points: int = SWEEP_POINTS) -> tuple[float, float]:
    """``(angular margin, smallest radius)`` over the segment from ``xi`` to ``x``."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    s = np.linspace(0.0, 1.0, points + 2)
    y = xi + s[:, None] * (x - xi)
    radii = np.hypot(y[:, 0], y[:, 1])
    if radii.min() == 0.0:
        return 0.0, 0.0
    angles = np.arctan2(y[:, 1], y[:, 0])
    return min(angular_margin(data, float(a)) for a in angles), float(radii.min())


def transport_oracle_numeric(data: KData, x, xi, nu_max: int = 3, *, margin: float = ANGULAR_MARGIN,
                             h_rel: float = FD_STEP, den_guard: float = 1e-8, quad_tol: float = 1e-11):
    """``[U_0, ..., U_nu_max]`` at ``(x, xi)`` from the ray recursion.

    Each ``U_nu`` is tabulated at Chebyshev nodes of a thin tube around the
    segment by Gauss-Legendre ray integrals of ``L U_{nu-1}``, where ``L`` is a
    4th-order central difference stencil applied to the tabulated
    interpolant.  The ray rule is refined by panel doubling until ``U_1`` at
    ``x`` converges to ``quad_tol``.
    """
    if nu_max < 0:
        raise ValueError("nu_max must be non-negative")
    ang, rmin = ray_margin(data, x, xi)
    if ang < margin or rmin <= 0.0:
        raise SingularRayError(f"segment from {tuple(xi)} to {tuple(x)} has angular margin {ang:.3g} < {margin}")
    if nu_max == 0:
        return [1.0]
    pot = _Potential(data, den_guard)
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    scale = max(np.hypot(*x), np.hypot(*xi))
    length = float(np.hypot(*(x - xi)))
    # keep the tube and the stencils well clear of the nearest singular line
    clearance = ang * rmin
    width = min(TUBE_WIDTH * scale, 0.25 * clearance)
    h_cap = FD_CLEARANCE * clearance
    ext = 4 * h_rel * scale / length
    tube = _Tube(x, xi, TUBE_PANELS, TUBE_NODES_S, TUBE_NODES_T, width, ext)
    panels, prev = 1, None
    while True:
        s, w = _rule(panels)
        rec = _Recursion(pot, tube, s, w, h_rel, h_cap)
        u1 = float(rec.U(1, x))
        if prev is not None and abs(u1 - prev) <= quad_tol * max(1.0, abs(u1)):
            break
        if panels >= MAX_PANELS:
            raise QuadratureFailure(f"ray quadrature did not converge with {panels} panels")
        prev, panels = u1, panels * 2
    out = [1.0, u1]
    for nu in range(2, nu_max + 1):
        rec.build(nu - 1)
        out.append(float(rec.U(nu, x)))
    return out


def sample_admissible_rays(data: KData, count: int, rng: np.random.Generator, margin: float = ANGULAR_MARGIN,
                           max_tries: int = 100000):
    """``count`` pairs ``(x, xi)`` whose segments keep ``margin`` from singular lines."""
    rays = []
    tries = 0
    while len(rays) < count:
        tries += 1
        if tries > max_tries:
            raise SingularRayError("could not find enough admissible rays")
        rho = rng.uniform(0.8, 1.6)
        q = rng.uniform(0.0, 2 * math.pi)
        xi = np.array([rho * math.cos(q), rho * math.sin(q)])
        d = rng.uniform(0.2, 1.0)
        a = rng.uniform(0.0, 2 * math.pi)
        x = xi + d * np.array([math.cos(a), math.sin(a)])
        ang, rmin = ray_margin(data, x, xi)
        if ang >= margin and rmin >= 0.4:
            rays.append((x, xi))
    return rays


def check_transport_oracle(table: HadamardTable, rays=None, *, count: int = 20, seed: int = 0,
                           nu_max: int | None = None, tolerances=None) -> VerifyReport:
    """Compare the ray oracle with the closed-form ``U_nu`` on admissible rays."""
    data = table.data
    tol = dict(ORACLE_TOLERANCES, **(tolerances or {}))
    nu_max = min(3, table.k_max) if nu_max is None else nu_max
    with timed() as t:
        if rays is None:
            rays = sample_admissible_rays(data, count, np.random.default_rng(seed))
        worst, witness = 0.0, None
        per_level = {}
        for x, xi in rays:
            oracle = transport_oracle_numeric(data, x, xi, nu_max)
            for nu in range(1, nu_max + 1):
                closed = float(u_eval(table, tuple(map(float, x)), tuple(map(float, xi)), nu))
                err = abs(oracle[nu] - closed) / abs(closed) if closed else abs(oracle[nu])
                per_level[nu] = max(per_level.get(nu, 0.0), err)
                worst = max(worst, err)
                if err >= tol.get(nu, tol[max(tol)]) and witness is None:
                    witness = {"k": list(data.k), "x": list(map(float, x)), "xi": list(map(float, xi)),
                               "nu": nu, "oracle": oracle[nu], "closed_form": closed, "relative_error": err}
    details = {"per_level_max_error": {str(k): v for k, v in per_level.items()}, "nu_max": nu_max}
    status = FAIL if witness else NUMERIC_PASS
    return VerifyReport("transport-oracle", status, len(rays), t["elapsed"], max_residual=worst,
                        witness=witness, details=details)
