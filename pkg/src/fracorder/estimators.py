"""Recover the fractional order from a solution time series.

Two growth-based estimators exploit the double-log law of the growing leading
mode (direct running formula and a tail-slope fit), both requiring the first
eigenvalue as input.  Two derivative-ratio baselines cover the decaying
regime (large-t and small-t limits of t u_t over u or u - phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    Assumption6Violated,
    DenominatorVanishes,
    NotDecaying,
    OutOfRange,
    SlopeDegenerate,
    WindowTooSmall,
)

LAMBDA1_TOL = 1e-9


@dataclass(frozen=True)
class ObservationSeries:
    """Time series of |u(x0, t)| stored as (sign, log|u|) so that the growing
    regime never overflows."""

    point_label: str
    times: np.ndarray
    signs: np.ndarray
    log_abs: np.ndarray
    noise_level: float = 0.0

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.signs, dtype=np.int8)
        la = np.asarray(self.log_abs, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "signs", s)
        object.__setattr__(self, "log_abs", la)
        if t.size < 8:
            raise ValueError("need at least 8 samples")
        if t[0] <= 0.0 or not np.all(np.diff(t) > 0.0):
            raise ValueError("times must be strictly increasing and positive")
        if not (s.size == t.size == la.size):
            raise ValueError("times, signs, log_abs must have equal length")

    @classmethod
    def from_values(cls, times, values, point_label: str = "",
                    noise_level: float = 0.0) -> "ObservationSeries":
        v = np.asarray(values, dtype=float)
        signs = np.sign(v).astype(np.int8)
        with np.errstate(divide="ignore"):
            la = np.where(v == 0.0, -np.inf, np.log(np.abs(np.where(v == 0.0, 1.0, v))))
        return cls(point_label, np.asarray(times, dtype=float), signs, la, noise_level)

    @property
    def values(self) -> np.ndarray:
        """Linear-scale values; overflowing entries come back as +/-inf."""
        with np.errstate(over="ignore"):
            return self.signs * np.exp(self.log_abs)


@dataclass(frozen=True)
class OrderEstimate:
    rho_hat: float
    method: str
    window: tuple[int, int]
    sequence: np.ndarray
    residual: float
    failed: bool = False
    reason: str = ""


def _check_lambda1(lambda1: float) -> float:
    if lambda1 >= 0.0:
        raise Assumption6Violated("lambda_1 >= 0: series has no growing mode")
    if abs(abs(lambda1) - 1.0) <= LAMBDA1_TOL:
        raise Assumption6Violated(
            "|lambda_1| = 1: double-log growth rate does not determine the order"
        )
    return math.log(abs(lambda1))


def estimate_thm1(series: ObservationSeries, lambda1: float) -> OrderEstimate:
    """Running double-log formula: rho(t) = ln|lambda_1| / (ln ln|u| - ln t).

    Uses only samples with |u| > 1 (where ln ln|u| exists); the reported value
    is the reading at the largest time, with the full running sequence kept
    for convergence inspection.
    """
    ln_l1 = _check_lambda1(lambda1)
    usable = np.nonzero(series.log_abs > 0.0)[0]
    if usable.size == 0:
        raise WindowTooSmall("no samples with |u| > 1")
    i0, i1 = int(usable[0]), int(usable[-1])
    idx = usable
    denom = np.log(series.log_abs[idx]) - np.log(series.times[idx])
    with np.errstate(divide="ignore"):
        seq = np.where(denom != 0.0, ln_l1 / np.where(denom == 0.0, 1.0, denom), np.inf)
    rho_hat = float(seq[-1])
    if not (0.0 < rho_hat < 1.0):
        raise OutOfRange(f"recovered order {rho_hat} outside (0, 1)")
    resid = float(np.max(np.abs(seq[-max(2, seq.size // 4):] - rho_hat)))
    return OrderEstimate(rho_hat, "thm1_direct", (i0, i1), seq, resid)


def estimate_slope(series: ObservationSeries, lambda1: float,
                   window: tuple[int, int] | None = None) -> OrderEstimate:
    """Tail-slope fit: ln|u| grows like a t with a = |lambda_1|^(1/rho), so
    rho = ln|lambda_1| / ln a.  Default window is the tail half of the series."""
    ln_l1 = _check_lambda1(lambda1)
    n = series.times.size
    if window is None:
        window = (n // 2, n - 1)
    i0, i1 = window
    t = series.times[i0:i1 + 1]
    la = series.log_abs[i0:i1 + 1]
    ok = np.isfinite(la)
    if ok.sum() < 2:
        raise WindowTooSmall("fewer than 2 finite samples in the fit window")
    a, b = np.polyfit(t[ok], la[ok], 1)
    if a <= 0.0:
        raise SlopeDegenerate(f"fitted growth slope {a} is not positive")
    if abs(a - 1.0) < 1e-9:
        raise SlopeDegenerate("fitted slope 1 would require |lambda_1| = 1")
    rho_hat = ln_l1 / math.log(a)
    if not (0.0 < rho_hat < 1.0):
        raise OutOfRange(f"recovered order {rho_hat} outside (0, 1)")
    rms = float(np.sqrt(np.mean((la[ok] - (a * t[ok] + b)) ** 2)))
    with np.errstate(divide="ignore", invalid="ignore"):
        slopes = np.diff(la) / np.diff(t)
        seq = np.where(slopes > 0.0, ln_l1 / np.log(np.where(slopes > 0, slopes, 1.0)), np.nan)
    return OrderEstimate(rho_hat, "lemma1_slope", (int(i0), int(i1)), seq[i0:i1], rms)


def _loglog_slopes(times: np.ndarray, log_abs: np.ndarray) -> np.ndarray:
    """Centered d ln|u| / d ln t at interior nodes (equals t u_t / u)."""
    lt = np.log(times)
    out = np.empty(times.size)
    out[:] = np.nan
    h1 = lt[1:-1] - lt[:-2]
    h2 = lt[2:] - lt[1:-1]
    out[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * log_abs[:-2]
        + (h2 - h1) / (h1 * h2) * log_abs[1:-1]
        + h1 / (h2 * (h1 + h2)) * log_abs[2:]
    )
    return out


def estimate_hatano_large_t(series: ObservationSeries) -> OrderEstimate:
    """Decaying-regime baseline: rho = |t u_t / u| as t grows.

    The ratio is the log-log slope of |u|, computed by centered differences;
    the reading is taken at the last interior node.  The sign convention of
    the source formula is ambiguous for a t^(-rho) profile, so the magnitude
    is reported.
    """
    la = series.log_abs
    n = la.size
    tail = la[n // 2:]
    if tail[-1] > tail[0]:
        raise NotDecaying("|u| grows over the tail window; not the decaying regime")
    seq = np.abs(_loglog_slopes(series.times, la))
    rho_hat = float(seq[-2])
    resid = float(np.nanstd(seq[-max(3, n // 4):-1]))
    return OrderEstimate(rho_hat, "hatano_large_t", (1, n - 2), seq[1:-1], resid)


def estimate_hatano_small_t(series: ObservationSeries, phi_at_point: float,
                            extrapolate: bool = True) -> OrderEstimate:
    """Small-time baseline: rho = t u_t / (u - phi(x0)) as t -> 0.

    Centered differences need t well above the local step, so the ratio is
    formed at the smallest usable nodes and extrapolated against the model
    r(t) = rho + c t^rho (the leading correction of the one-mode expansion),
    iterating the exponent.
    """
    t = series.times
    u = series.values
    d = u - phi_at_point
    if np.any(np.abs(d[1:]) < 1e-12 * max(1.0, abs(phi_at_point))):
        raise DenominatorVanishes("u - phi(x0) below usable threshold: A phi(x0) ~ 0")
    ut = np.empty(t.size)
    ut[:] = np.nan
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    ut[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * u[:-2]
        + (h2 - h1) / (h1 * h2) * u[1:-1]
        + h1 / (h2 * (h1 + h2)) * u[2:]
    )
    ratio = t * ut / d
    local_h = np.empty(t.size)
    local_h[1:-1] = np.maximum(h1, h2)
    local_h[0] = local_h[1]
    local_h[-1] = local_h[-2]
    usable = np.nonzero(np.isfinite(ratio) & (t >= 8.0 * local_h))[0]
    if usable.size < 3:
        raise WindowTooSmall("fewer than 3 nodes clear of the difference stencil")
    k = usable[:3]
    t1, t2 = t[k[0]], t[k[2]]
    r1, r2 = ratio[k[0]], ratio[k[2]]
    rho_hat = float(r1)
    if extrapolate:
        p = max(rho_hat, 0.05)
        for _ in range(20):
            w = (t1 / t2) ** p
            new = float((r1 - w * r2) / (1.0 - w))
            if abs(new - rho_hat) < 1e-12:
                rho_hat = new
                break
            rho_hat = new
            p = min(max(rho_hat, 0.05), 1.0)
    if not (0.0 < rho_hat < 1.0):
        raise OutOfRange(f"recovered order {rho_hat} outside (0, 1)")
    resid = float(abs(r2 - r1))
    seq = ratio[usable]
    return OrderEstimate(rho_hat, "hatano_small_t",
                         (int(usable[0]), int(usable[-1])), seq, resid)


def add_noise(series: ObservationSeries, level: float, seed: int) -> ObservationSeries:
    """Multiplicative noise u -> u (1 + level xi), xi uniform on [-1, 1],
    applied in log scale so the growing regime stays representable."""
    if not (0.0 <= level <= 0.2):
        raise ValueError("noise level must be in [0, 0.2]")
    if level == 0.0:
        return series
    rng = np.random.default_rng(seed)
    xi = rng.uniform(-1.0, 1.0, size=series.times.size)
    return ObservationSeries(
        series.point_label,
        series.times,
        series.signs,
        series.log_abs + np.log1p(level * xi),
        noise_level=level,
    )
