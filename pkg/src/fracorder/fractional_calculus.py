"""Riemann-Liouville integral/derivative and Caputo derivative on sampled data.

Product-trapezoidal quadrature: the sampled function is taken piecewise linear
on its grid and the weakly singular kernel is integrated exactly on each cell.
These routines act as independent oracles for the spectral solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, beta as beta_fn, gamma as gamma_fn

from .errors import OutOfRange, SingularityTooStrong
from .mittag_leffler import ml_log_array


@dataclass(frozen=True)
class SampledFunction:
    """Function samples on a strictly increasing grid starting at exactly 0.

    If the function has a power singularity c*t^p at the origin (p in (-1, 0)),
    store 0.0 in values[0] and pass the exponent p as leading_exponent to the
    operators below; the first cell is then integrated against that power.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or v.ndim != 1 or t.size != v.size or t.size < 3:
            raise ValueError("times/values must be 1-d, equal length >= 3")
        if t[0] != 0.0:
            raise ValueError("times[0] must be exactly 0")
        if not np.all(np.diff(t) > 0.0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")


def graded_grid(t_max: float, n: int, rho: float) -> np.ndarray:
    """Grid t_i = T (i/n)^(1/rho + 1), clustered at the singular origin."""
    return t_max * (np.arange(n + 1) / n) ** (1.0 / rho + 1.0)


def _check_exponent(leading_exponent: float) -> None:
    if leading_exponent <= -1.0:
        raise SingularityTooStrong(
            f"leading exponent {leading_exponent} is not integrable"
        )


def _first_cell(t: float, t1: float, f1: float, p: float, beta: float) -> float:
    """Exact integral of (f1/t1^p) xi^p (t-xi)^(beta-1) over [0, min(t1, t)]."""
    c = f1 / t1**p
    x = min(t1 / t, 1.0)
    return c * t ** (p + beta) * beta_fn(p + 1.0, beta) * betainc(p + 1.0, beta, x)


def _cells_weighted(ta, tb, fa, fb, t, beta):
    """Sum of int_{ta}^{tb} (t-xi)^{beta-1} * (linear interpolant) d xi, vectorised.

    The closed forms A(A^b-B^b)/b - (A^{b+1}-B^{b+1})/(b+1) cancel catastrophically
    when the cell is tiny relative to its distance from t (graded grids create
    h/A ~ 1e-10), so small cells use a series expansion about u = B instead.
    """
    ta = np.atleast_1d(np.asarray(ta, dtype=float))
    tb = np.atleast_1d(np.asarray(tb, dtype=float))
    fa = np.atleast_1d(np.asarray(fa, dtype=float))
    fb = np.atleast_1d(np.asarray(fb, dtype=float))
    A = t - ta
    B = t - tb
    h = tb - ta
    Ab = A**beta
    with np.errstate(divide="ignore"):
        lr = np.where(B > 0.0, np.log(np.maximum(B, 1e-300) / A), -np.inf)
    d1 = -np.expm1(beta * lr)          # 1 - (B/A)^beta, stable
    d2 = -np.expm1((beta + 1.0) * lr)  # 1 - (B/A)^(beta+1)
    i0 = Ab * d1 / beta
    i1_closed = A * i0 - A * Ab * d2 / (beta + 1.0)
    small = (B > 0.0) & (h < 1e-4 * A)
    if small.any():
        Bs = np.where(small, B, 1.0)
        Bb1 = Bs ** (beta - 1.0)
        i1_series = Bb1 * (
            h * h / 2.0
            + (beta - 1.0) * h**3 / (6.0 * Bs)
            + (beta - 1.0) * (beta - 2.0) * h**4 / (24.0 * Bs * Bs)
        )
        i1 = np.where(small, i1_series, i1_closed)
    else:
        i1 = i1_closed
    slope = (fb - fa) / h
    return float(np.sum(fa * i0 + slope * i1))


def frac_integral(
    f: SampledFunction, beta: float, t: float, leading_exponent: float = 0.0
) -> float:
    """Riemann-Liouville integral (1/Gamma(beta)) int_0^t (t-xi)^{beta-1} f d xi."""
    if not (0.0 < beta < 1.0):
        raise OutOfRange(f"beta={beta} outside (0,1)")
    _check_exponent(leading_exponent)
    times, values = f.times, f.values
    if not (0.0 < t <= times[-1] * (1.0 + 1e-12)):
        raise OutOfRange(f"t={t} outside grid span (0, {times[-1]}]")
    t = min(t, times[-1])

    acc = 0.0
    t1 = times[1]
    if leading_exponent != 0.0:
        acc += _first_cell(t, t1, values[1], leading_exponent, beta)
        start = 1
    else:
        start = 0
    if t > t1 or start == 0:
        k = int(np.searchsorted(times, t, side="right")) - 1  # cell [times[k], times[k+1]) holds t
        k = min(k, times.size - 2)
        lo = start
        if k > lo:
            acc += _cells_weighted(
                times[lo:k], times[lo + 1 : k + 1], values[lo:k], values[lo + 1 : k + 1], t, beta
            )
        if t > times[k] and k >= start:
            # partial cell up to t with f interpolated linearly
            fa = values[k]
            fb = fa + (values[k + 1] - fa) * (t - times[k]) / (times[k + 1] - times[k])
            if t > times[k]:
                acc += _cells_weighted(
                    np.array([times[k]]), np.array([t]), np.array([fa]), np.array([fb]), t, beta
                )
    return acc / gamma_fn(beta)


def frac_integral_grid(
    f: SampledFunction, beta: float, leading_exponent: float = 0.0
) -> np.ndarray:
    """J^beta f at every grid node (0 at the origin node)."""
    if not (0.0 < beta < 1.0):
        raise OutOfRange(f"beta={beta} outside (0,1)")
    _check_exponent(leading_exponent)
    times, values = f.times, f.values
    n = times.size
    out = np.zeros(n)
    g = gamma_fn(beta)
    t1 = times[1]
    start = 1 if leading_exponent != 0.0 else 0
    for i in range(1, n):
        t = times[i]
        acc = 0.0
        if leading_exponent != 0.0:
            acc += _first_cell(t, t1, values[1], leading_exponent, beta)
        if i > start:
            acc += _cells_weighted(
                times[start:i], times[start + 1 : i + 1],
                values[start:i], values[start + 1 : i + 1], t, beta,
            )
        out[i] = acc / g
    return out


def _nonuniform_diff(tm, t0, tp, gm, g0, gp) -> float:
    """Three-point first derivative at the middle node of a nonuniform stencil."""
    h1 = t0 - tm
    h2 = tp - t0
    return (
        -h2 / (h1 * (h1 + h2)) * gm
        + (h2 - h1) / (h1 * h2) * g0
        + h1 / (h2 * (h1 + h2)) * gp
    )


def rl_derivative(
    f: SampledFunction, rho: float, t: float, leading_exponent: float = 0.0
) -> float:
    """d/dt J^{1-rho} f at an interior grid node."""
    if not (0.0 < rho < 1.0):
        raise OutOfRange(f"rho={rho} outside (0,1)")
    _check_exponent(leading_exponent)
    times = f.times
    idx = int(np.argmin(np.abs(times - t)))
    if not math.isclose(times[idx], t, rel_tol=1e-9, abs_tol=1e-15) or idx <= 0 or idx >= times.size - 1:
        raise OutOfRange(f"t={t} is not an interior grid node")
    g = [
        frac_integral(f, 1.0 - rho, float(times[j]), leading_exponent)
        for j in (idx - 1, idx, idx + 1)
    ]
    return _nonuniform_diff(times[idx - 1], times[idx], times[idx + 1], *g)


def caputo_derivative(f: SampledFunction, rho: float, t: float) -> float:
    """L1 scheme: piecewise-linear f, exact kernel integration of f' against
    (t-xi)^{-rho}/Gamma(1-rho)."""
    if not (0.0 < rho < 1.0):
        raise OutOfRange(f"rho={rho} outside (0,1)")
    times, values = f.times, f.values
    if not (0.0 < t <= times[-1] * (1.0 + 1e-12)):
        raise OutOfRange(f"t={t} outside grid span (0, {times[-1]}]")
    t = min(t, times[-1])
    k = int(np.searchsorted(times, t, side="right")) - 1
    k = min(k, times.size - 2)
    acc = 0.0
    e = 1.0 - rho
    if k > 0:
        ta = times[:k]
        tb = times[1 : k + 1]
        slope = (values[1 : k + 1] - values[:k]) / (tb - ta)
        A = t - ta
        B = t - tb
        with np.errstate(divide="ignore"):
            lr = np.where(B > 0.0, np.log(np.maximum(B, 1e-300) / A), -np.inf)
        acc += float(np.sum(slope * (-(A**e) * np.expm1(e * lr))))
    if t > times[k]:
        slope = (values[k + 1] - values[k]) / (times[k + 1] - times[k])
        acc += slope * (t - times[k]) ** e
    return acc / (gamma_fn(e) * e)


@dataclass(frozen=True)
class EquationResidualReport:
    """Residual of the forward PDE checked by the quadrature oracles."""

    max_residual: float
    ic_residual: float
    n_nodes: int
    t_window: tuple[float, float]


def verify_equation(
    model,
    rho: float,
    point_index: int,
    times: np.ndarray | None = None,
    t_window: tuple[float, float] = (0.1, None),
) -> EquationResidualReport:
    """Check that the spectral solution satisfies the fractional Cauchy problem.

    Builds u on the grid, applies the numerical fractional derivative (RL or
    Caputo per the model convention), and compares against -Au evaluated
    spectrally.  Also reports the initial-condition residual at the first
    positive node.
    """
    from .spectral import model_arrays  # deferred: avoid module cycle

    lam, coeffs, kind = model_arrays(model)
    c = coeffs[:, point_index]
    if times is None:
        times = graded_grid(2.0, 4096, rho)
    times = np.asarray(times, dtype=float)
    t_lo = t_window[0]
    t_hi = t_window[1] if t_window[1] is not None else times[-1]

    tpos = times[1:]
    z = -np.outer(lam, tpos**rho)  # (n_modes, n_times)
    rl = kind == "riemann_liouville"
    mu = rho if rl else 1.0
    sg, la = ml_log_array(rho, mu, z)
    mode_vals = sg * np.exp(np.minimum(la, 700.0))
    if rl:
        mode_vals = mode_vals * tpos ** (rho - 1.0)

    u = np.zeros(times.size)
    u[1:] = c @ mode_vals
    au = np.zeros(times.size)
    au[1:] = (lam * c) @ mode_vals
    phi = float(np.sum(c))
    if not rl:
        u[0] = phi  # Caputo solution is continuous at t = 0

    f = SampledFunction(times, u)

    if rl:
        g = frac_integral_grid(f, 1.0 - rho, leading_exponent=rho - 1.0)
        dfrac = np.full(times.size, np.nan)
        for i in range(1, times.size - 1):
            dfrac[i] = _nonuniform_diff(
                times[i - 1], times[i], times[i + 1], g[i - 1], g[i], g[i + 1]
            )
        ic_residual = abs(g[1] - phi)
    else:
        dfrac = np.full(times.size, np.nan)
        for i in range(1, times.size - 1):
            dfrac[i] = caputo_derivative(f, rho, float(times[i]))
        ic_residual = abs(u[1] - phi)

    mask = (times >= t_lo) & (times <= t_hi) & np.isfinite(dfrac)
    res = np.abs(dfrac[mask] + au[mask]) / (1.0 + np.abs(au[mask]))
    return EquationResidualReport(
        max_residual=float(np.max(res)),
        ic_residual=ic_residual,
        n_nodes=int(mask.sum()),
        t_window=(float(t_lo), float(t_hi)),
    )
