"""Separable cylinder test bed: rectangle cross-section times a vertical
Sturm-Liouville problem with a Robin condition on the top face.

The vertical problem -w'' = nu w on (0, H) with w'(0) = 0, w'(H) = h w(H)
has exactly one negative eigenvalue nu_0 = -s_0^2 (characteristic equation
s tanh(Hs) = h) plus positive eigenvalues nu_j = s_j^2 with tan(Hs) = -h/s.
Combined with Neumann cosine modes mu_pq on the rectangle this yields a
complete orthonormal system u = v_pq(x,y) w_j(z), lambda = mu_pq + nu_j,
whose smallest eigenvalue nu_0 is negative: the growing-mode configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .errors import BracketFailure, DecayTooSlow
from .spectral import (
    RIEMANN_LIOUVILLE,
    MonitorPoint,
    SpectralMode,
    SpectralModel,
    make_decay_report,
)

#: eigenvalues closer than this (relative) are treated as one multiple eigenvalue
MERGE_RTOL = 1e-10


@dataclass(frozen=True)
class CylinderConfig:
    Lx: float = 1.0
    Ly: float = 1.0
    H: float = 1.0
    h: float = 1.0
    Px: int = 8
    Py: int = 8
    J: int = 8
    quad_n: int = 48

    def __post_init__(self) -> None:
        if min(self.Lx, self.Ly, self.H, self.h) <= 0.0:
            raise ValueError("Lx, Ly, H, h must all be positive")
        if min(self.Px, self.Py, self.J) < 1:
            raise ValueError("mode cutoffs must be >= 1")
        if self.quad_n < 16:
            raise ValueError("quad_n must be >= 16")


@dataclass(frozen=True)
class Eigenpair1D:
    """Vertical eigenpair: nu = -+ s^2 with closed-form normalizer M."""

    nu: float
    s: float
    M: float
    kind: str  # "negative" | "positive"
    index: int

    def w(self, z):
        """Normalized eigenfunction w(z) on [0, H]."""
        z = np.asarray(z, dtype=float)
        if self.kind == "negative":
            return self.M * np.cosh(self.s * z)
        return self.M * np.cos(self.s * z)

    def dw(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "negative":
            return self.M * self.s * np.sinh(self.s * z)
        return -self.M * self.s * np.sin(self.s * z)

    def residual(self, H: float, h: float) -> float:
        """Characteristic-equation residual |tanh(Hs) - h/s| or |tan(Hs) + h/s|."""
        if self.kind == "negative":
            return abs(math.tanh(H * self.s) - h / self.s)
        return abs(math.tan(H * self.s) + h / self.s)


def sturm_negative_eig(H: float, h: float) -> Eigenpair1D:
    """Unique negative eigenvalue: s_0 solves s tanh(Hs) = h.

    g(s) = s tanh(Hs) - h increases strictly from -h to +inf, so the bracket
    is found by doubling from the small-s estimate h/(1 + hH).
    """
    g = lambda s: s * math.tanh(H * s) - h
    lo = h / (1.0 + h * H)
    while g(lo) > 0.0:
        lo *= 0.5
    hi = max(2.0 * lo, h)
    while g(hi) < 0.0:
        hi *= 2.0
    s0 = brentq(g, lo, hi, xtol=1e-300, rtol=8.9e-16)
    M0 = (H / 2.0 + math.sinh(2.0 * s0 * H) / (4.0 * s0)) ** -0.5
    return Eigenpair1D(nu=-s0 * s0, s=s0, M=M0, kind="negative", index=0)


def sturm_positive_eigs(H: float, h: float, count: int) -> list[Eigenpair1D]:
    """Positive eigenvalues nu_j = s_j^2, tan(Hs_j) = -h/s_j, one per bracket
    ((j - 1/2) pi / H, j pi / H).

    The root finder works on G(s) = s sin(Hs) + h cos(Hs), which is entire,
    so the bracket endpoints (including the tangent pole at the lower end)
    can be used exactly.
    """
    G = lambda s: s * math.sin(H * s) + h * math.cos(H * s)
    out = []
    for j in range(1, count + 1):
        a = (j - 0.5) * math.pi / H
        b = j * math.pi / H
        ga, gb = G(a), G(b)
        if ga * gb > 0.0:
            raise BracketFailure(
                f"no sign change for vertical mode {j} on ({a}, {b}): G = {ga}, {gb}"
            )
        sj = brentq(G, a, b, xtol=1e-300, rtol=8.9e-16)
        Mj = (H / 2.0 + math.sin(2.0 * sj * H) / (4.0 * sj)) ** -0.5
        out.append(Eigenpair1D(nu=sj * sj, s=sj, M=Mj, kind="positive", index=j))
    return out


@dataclass(frozen=True)
class RectMode:
    """Neumann cosine mode on the rectangle (0,Lx) x (0,Ly)."""

    p: int
    q: int
    mu: float
    Lx: float
    Ly: float

    def v(self, x, y):
        cx = math.sqrt((2.0 if self.p else 1.0) / self.Lx)
        cy = math.sqrt((2.0 if self.q else 1.0) / self.Ly)
        return (
            cx * np.cos(self.p * math.pi * np.asarray(x) / self.Lx)
            * cy * np.cos(self.q * math.pi * np.asarray(y) / self.Ly)
        )


def rectangle_eigs(Lx: float, Ly: float, Px: int, Py: int) -> list[RectMode]:
    """All Neumann modes with p < Px, q < Py, sorted by mu (mu = 0 first)."""
    out = [
        RectMode(p, q, (p * math.pi / Lx) ** 2 + (q * math.pi / Ly) ** 2, Lx, Ly)
        for p in range(Px)
        for q in range(Py)
    ]
    out.sort(key=lambda m: (m.mu, m.p, m.q))
    return out


@dataclass(frozen=True)
class Mode3D:
    """One separable eigenfunction v_pq(x,y) w_j(z) with lambda = mu + nu."""

    rect: RectMode
    vert: Eigenpair1D
    lam: float
    coeff: float  # projection (phi, v w)

    def u(self, x, y, z):
        return self.rect.v(x, y) * self.vert.w(z)


def _gauss(n: int, a: float, b: float):
    x, w = leggauss(n)
    return 0.5 * (b - a) * (x + 1.0) + a, 0.5 * (b - a) * w


def project_field(cfg: CylinderConfig, phi, rects: list[RectMode],
                  verts: list[Eigenpair1D]) -> np.ndarray:
    """Projection coefficients (phi, v_pq w_j) by tensor Gauss-Legendre.

    phi is a callable phi(x, y, z) accepting broadcastable arrays; returns an
    array of shape (len(rects), len(verts)).
    """
    n = cfg.quad_n
    x, wx = _gauss(n, 0.0, cfg.Lx)
    y, wy = _gauss(n, 0.0, cfg.Ly)
    z, wz = _gauss(n, 0.0, cfg.H)
    f = phi(x[:, None, None], y[None, :, None], z[None, None, :])
    f = np.broadcast_to(np.asarray(f, dtype=float), (n, n, n))
    vx = np.array([
        math.sqrt((2.0 if r.p else 1.0) / cfg.Lx) * np.cos(r.p * math.pi * x / cfg.Lx)
        for r in rects
    ])
    vy = np.array([
        math.sqrt((2.0 if r.q else 1.0) / cfg.Ly) * np.cos(r.q * math.pi * y / cfg.Ly)
        for r in rects
    ])
    wzm = np.array([e.w(z) for e in verts])
    # fold weights into the field once, then contract axis by axis
    fw = f * wx[:, None, None] * wy[None, :, None] * wz[None, None, :]
    t = np.einsum("xyz,rx,ry->rz", fw, vx, vy)  # diagonal in the rect index
    return np.einsum("rz,jz->rj", t, wzm)


def build_model(cfg: CylinderConfig, phi, points: list[tuple[float, float, float]],
                kind: str = RIEMANN_LIOUVILLE) -> SpectralModel:
    """Assemble the cylinder SpectralModel: all lambda = mu_pq + nu_j under the
    cutoffs, projection coefficients of phi, eigenfunctions evaluated at the
    monitoring points, equal eigenvalues merged.
    """
    rects = rectangle_eigs(cfg.Lx, cfg.Ly, cfg.Px, cfg.Py)
    verts = [sturm_negative_eig(cfg.H, cfg.h)] + sturm_positive_eigs(cfg.H, cfg.h, cfg.J)
    coeffs = project_field(cfg, phi, rects, verts)

    pts = [np.asarray(p, dtype=float) for p in points]
    for p in pts:
        if not (0.0 < p[0] < cfg.Lx and 0.0 < p[1] < cfg.Ly and 0.0 < p[2] < cfg.H):
            raise ValueError(f"monitoring point {tuple(p)} is not interior")

    entries = []  # (lam, per-point contribution c * u(x0))
    for i, r in enumerate(rects):
        for j, e in enumerate(verts):
            lam = r.mu + e.nu
            c = coeffs[i, j]
            vals = np.array([c * r.v(p[0], p[1]) * e.w(p[2]) for p in pts])
            entries.append((lam, vals))
    entries.sort(key=lambda t: t[0])

    merged: list[list] = []
    for lam, vals in entries:
        if merged and abs(lam - merged[-1][0]) <= MERGE_RTOL * max(1.0, abs(merged[-1][0])):
            merged[-1][1] = merged[-1][1] + vals
        else:
            merged.append([lam, vals.copy()])

    modes = tuple(SpectralMode(float(lam), tuple(float(v) for v in vals))
                  for lam, vals in merged)
    mpoints = tuple(
        MonitorPoint(f"p{i}", tuple(float(c) for c in p)) for i, p in enumerate(pts)
    )
    model = SpectralModel(modes, mpoints, kind)

    # smallest eigenvalue must be the vertical ground state nu_0 (mu >= 0)
    nu0 = verts[0].nu
    if abs(model.lambdas[0] - nu0) > 1e-12 * max(1.0, abs(nu0)):
        raise AssertionError("assembled spectrum does not start at nu_0")

    rep = make_decay_report(np.abs(coeffs).sum(axis=0, keepdims=True).T)
    if not rep.summable:
        raise DecayTooSlow(
            f"projection tail fraction {rep.tail_fraction:.3g} exceeds summability limit"
        )
    from dataclasses import replace
    return replace(model, decay_report=make_decay_report(model.coeff_matrix))


def rayleigh_identity_check(cfg: CylinderConfig, rect: RectMode,
                            vert: Eigenpair1D) -> float:
    """Residual of lambda = int |grad u|^2 - h int_{z=H} |u|^2 by quadrature.

    The negative eigenvalue arises entirely from the -h boundary term; the
    rectangle factor contributes mu exactly since v is normalized, so only the
    vertical factor needs quadrature.
    """
    lam = rect.mu + vert.nu
    z, wz = _gauss(max(cfg.quad_n, 64), 0.0, cfg.H)
    w2 = float(np.sum(wz * vert.w(z) ** 2))
    dw2 = float(np.sum(wz * vert.dw(z) ** 2))
    # grad(v w) integrates to mu * |w|^2 + |w'|^2 over the cylinder
    rhs = rect.mu * w2 + dw2 - cfg.h * float(vert.w(cfg.H)) ** 2
    return abs(lam - rhs) / (1.0 + abs(lam))


def reconstruct_field(cfg: CylinderConfig, phi, point, Px=None, Py=None, J=None) -> float:
    """Partial-sum reconstruction of phi at a point (completeness diagnostic)."""
    c = CylinderConfig(cfg.Lx, cfg.Ly, cfg.H, cfg.h,
                       Px or cfg.Px, Py or cfg.Py, J or cfg.J, cfg.quad_n)
    rects = rectangle_eigs(c.Lx, c.Ly, c.Px, c.Py)
    verts = [sturm_negative_eig(c.H, c.h)] + sturm_positive_eigs(c.H, c.h, c.J)
    coeffs = project_field(c, phi, rects, verts)
    x0, y0, z0 = point
    total = 0.0
    for i, r in enumerate(rects):
        vv = float(r.v(x0, y0))
        for j, e in enumerate(verts):
            total += coeffs[i, j] * vv * float(e.w(z0))
    return total
