"""Spectral representation of the forward subdiffusion problem.

A model is an ascending list of distinct eigenvalues with, per monitoring
point, the projection of the initial data onto the corresponding eigenspace.
The solution expansion is evaluated either in linear scale or, for the
exponentially growing regime, purely in log scale via signed log-sum-exp.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import Assumption6Violated, Overflow, ZeroProjection
from .mittag_leffler import ml_log_array, ml_value_array

RIEMANN_LIOUVILLE = "riemann_liouville"
CAPUTO = "caputo"

#: |lambda_1 + 1| must exceed this for the growth condition to count as satisfied
LAMBDA1_TOL = 1e-9
#: tail fraction of the per-mode coefficient mass allowed in the top quarter
TAIL_FRACTION_LIMIT = 0.1


@dataclass(frozen=True)
class MonitorPoint:
    label: str
    coords: tuple[float, ...]


@dataclass(frozen=True)
class SpectralMode:
    """One distinct eigenvalue with P_k(phi) evaluated at each monitoring point."""

    lam: float
    coeffs: tuple[float, ...]


@dataclass(frozen=True)
class DecayReport:
    """Summability diagnostic for the projection tail (expansion-bound surrogate)."""

    coeff_l1: float
    tail_fraction: float
    fitted_decay: float
    tail_estimate: float
    summable: bool


@dataclass(frozen=True)
class SpectralModel:
    modes: tuple[SpectralMode, ...]
    points: tuple[MonitorPoint, ...]
    kind: str = RIEMANN_LIOUVILLE
    decay_report: DecayReport | None = None

    def __post_init__(self) -> None:
        if self.kind not in (RIEMANN_LIOUVILLE, CAPUTO):
            raise ValueError(f"unknown derivative convention {self.kind!r}")
        if not self.modes:
            raise ValueError("model needs at least one mode")
        lam = np.array([m.lam for m in self.modes])
        if not np.all(np.diff(lam) > 0.0):
            raise ValueError("eigenvalues must be strictly increasing (merge multiplicities)")
        npts = len(self.points)
        for m in self.modes:
            if len(m.coeffs) != npts or not all(math.isfinite(c) for c in m.coeffs):
                raise ValueError("each mode needs one finite coefficient per point")

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([m.lam for m in self.modes])

    @property
    def coeff_matrix(self) -> np.ndarray:
        return np.array([m.coeffs for m in self.modes])

    @property
    def n_negative(self) -> int:
        return int(np.sum(self.lambdas < 0.0))

    def with_kind(self, kind: str) -> "SpectralModel":
        return replace(self, kind=kind)


def model_arrays(model: SpectralModel):
    """(lambdas, coeff matrix, kind) as plain arrays for numeric kernels."""
    return model.lambdas, model.coeff_matrix, model.kind


@dataclass(frozen=True)
class Assumption6Status:
    lambda1: float
    satisfied: bool
    reason: str


def check_assumption6(model: SpectralModel, tol: float = LAMBDA1_TOL) -> Assumption6Status:
    """lambda_1 < 0 and lambda_1 != -1 (|lambda_1| = 1 degenerates the order/growth map)."""
    lam1 = float(model.lambdas[0])
    if lam1 >= 0.0:
        return Assumption6Status(lam1, False, "lambda_1 >= 0: no growing mode")
    if abs(lam1 + 1.0) <= tol:
        return Assumption6Status(
            lam1, False, "lambda_1 = -1 excluded: growth index independent of the order"
        )
    return Assumption6Status(lam1, True, "lambda_1 < 0 and |lambda_1| != 1")


def _mode_logs(model: SpectralModel, rho: float, point_index: int, t: float):
    """Per-mode (sign, log|term|) of the expansion at time t and one point."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    lam = model.lambdas
    c = model.coeff_matrix[:, point_index]
    z = -lam * t**rho
    mu = rho if model.kind == RIEMANN_LIOUVILLE else 1.0
    sg, la = ml_log_array(rho, mu, z)
    if model.kind == RIEMANN_LIOUVILLE:
        la = la + (rho - 1.0) * math.log(t)
    with np.errstate(divide="ignore"):
        lc = np.where(c == 0.0, -np.inf, np.log(np.abs(np.where(c == 0.0, 1.0, c))))
    return sg * np.sign(c), la + lc


def _signed_logsumexp(signs: np.ndarray, logs: np.ndarray):
    """Signed log-sum-exp; degenerate total cancellation yields (0, -inf)."""
    finite = np.isfinite(logs)
    if not finite.any():
        return 0, -math.inf
    signs = signs[finite]
    logs = logs[finite]
    top = float(np.max(logs))
    scaled = np.exp(logs - top)
    s = float(np.sum(signs * scaled))
    gross = float(np.sum(scaled))
    if s == 0.0 or abs(s) < 1e-13 * gross:
        return 0, -math.inf
    return (1 if s > 0 else -1), top + math.log(abs(s))


def solve_forward(model: SpectralModel, rho: float, point_index: int, t: float) -> float:
    """Linear-scale truncated expansion; raises Overflow in the huge-growth regime."""
    signs, logs = _mode_logs(model, rho, point_index, t)
    if np.any(logs > 700.0):
        raise Overflow("expansion term exceeds double range; use solve_forward_log")
    return float(np.sum(signs * np.exp(np.where(np.isfinite(logs), logs, -np.inf))))


def solve_forward_log(model: SpectralModel, rho: float, point_index: int, t: float):
    """(sign, log|u|) by signed log-sum-exp over all stored modes."""
    signs, logs = _mode_logs(model, rho, point_index, t)
    return _signed_logsumexp(signs, logs)


def leading_term(model: SpectralModel, rho: float, point_index: int, t: float):
    """(sign, log|u_1|): the first-mode contribution only.

    Requires the growth condition and a nonvanishing first-mode projection at the
    monitoring point.
    """
    status = check_assumption6(model)
    if not status.satisfied:
        raise Assumption6Violated(status.reason)
    c1 = model.coeff_matrix[0, point_index]
    if c1 == 0.0:
        raise ZeroProjection("first-mode projection vanishes at this point")
    signs, logs = _mode_logs(model, rho, point_index, t)
    return int(signs[0]), float(logs[0])


@dataclass(frozen=True)
class Decomposition:
    """Leading mode, remaining growing modes, decaying tail, and the gap rate."""

    u1: tuple[int, float]
    sigma_prime: tuple[int, float]
    sigma_dprime: tuple[int, float]
    epsilon: float


def growth_gap(model: SpectralModel, rho: float) -> float:
    """Gap between the leading growth rate and the next-fastest contribution."""
    lam = model.lambdas
    g1 = abs(lam[0]) ** (1.0 / rho)
    if lam.size > 1 and lam[1] < 0.0:
        return g1 - abs(lam[1]) ** (1.0 / rho)
    return g1


def asymptotic_decomposition(
    model: SpectralModel, rho: float, point_index: int, t: float
) -> Decomposition:
    """u = u_1 + (other negative modes) + (nonnegative-mode tail), in log scale."""
    u1 = leading_term(model, rho, point_index, t)
    signs, logs = _mode_logs(model, rho, point_index, t)
    lam = model.lambdas
    neg_rest = (lam < 0.0) & (np.arange(lam.size) >= 1)
    nonneg = lam >= 0.0
    sp = _signed_logsumexp(signs[neg_rest], logs[neg_rest]) if neg_rest.any() else (0, -math.inf)
    sd = _signed_logsumexp(signs[nonneg], logs[nonneg]) if nonneg.any() else (0, -math.inf)
    return Decomposition(u1, sp, sd, growth_gap(model, rho))


_ml_neg_max_cache: dict[float, float] = {}


def _ml_neg_max(rho: float) -> float:
    """max_{z >= 0} E_{rho,rho}(-z), computed once per rho."""
    key = round(rho, 12)
    if key not in _ml_neg_max_cache:
        z = np.concatenate([np.linspace(0.0, 12.0, 121), np.geomspace(12.0, 1e4, 40)])
        _ml_neg_max_cache[key] = float(np.max(ml_value_array(rho, rho, -z)))
    return _ml_neg_max_cache[key]


def truncation_bound(model: SpectralModel, rho: float, point_index: int, t: float) -> float:
    """Bound on the contribution of modes beyond the stored cutoff:
    C * t^{rho-1} * (estimated tail coefficient mass)."""
    rep = model.decay_report
    tail = rep.tail_estimate if rep is not None else 0.0
    c = _ml_neg_max(rho)
    pref = t ** (rho - 1.0) if model.kind == RIEMANN_LIOUVILLE else 1.0
    return c * pref * tail


# {{{ decay diagnostics and serialization

def make_decay_report(coeff_matrix: np.ndarray) -> DecayReport:
    """Fit the per-mode coefficient mass decay and estimate the beyond-cutoff tail."""
    mass = np.sum(np.abs(coeff_matrix), axis=1)
    total = float(np.sum(mass))
    n = mass.size
    q3 = max(1, (3 * n) // 4)
    tail_fraction = float(np.sum(mass[q3:]) / total) if total > 0 else 0.0
    nz = np.nonzero(mass)[0]
    fitted = 0.0
    tail_estimate = 0.0
    if nz.size >= 4:
        k = nz[nz >= max(1, n // 4)]
        if k.size >= 3:
            slope, intercept = np.polyfit(np.log(k + 1.0), np.log(mass[k]), 1)
            fitted = float(slope)
            if slope < -1.0:
                # sum_{k > n} a k^slope ~ a n^(slope+1) / (-slope - 1)
                a = math.exp(intercept)
                tail_estimate = a * (n + 1.0) ** (slope + 1.0) / (-slope - 1.0)
    summable = total > 0 and tail_fraction <= TAIL_FRACTION_LIMIT
    return DecayReport(total, tail_fraction, fitted, tail_estimate, summable)


def model_to_dict(model: SpectralModel) -> dict:
    return {
        "kind": model.kind,
        "points": [{"label": p.label, "coords": list(p.coords)} for p in model.points],
        "modes": [{"lambda": m.lam, "coeffs": list(m.coeffs)} for m in model.modes],
    }


def model_from_dict(d: dict) -> SpectralModel:
    points = tuple(MonitorPoint(p["label"], tuple(p["coords"])) for p in d["points"])
    modes = tuple(SpectralMode(m["lambda"], tuple(m["coeffs"])) for m in d["modes"])
    model = SpectralModel(modes=modes, points=points, kind=d["kind"])
    return replace(model, decay_report=make_decay_report(model.coeff_matrix))


def save_model(model: SpectralModel, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=1)


def load_model(path: str) -> SpectralModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))

# }}}
