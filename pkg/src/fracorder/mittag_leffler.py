"""Two-parameter Mittag-Leffler function E_{rho,mu}(z) for real z.

Three regimes: defining power series near the origin, exponential-plus-algebraic
asymptotics for large positive z (with a pure log-scale path when the value
overflows), and the algebraic expansion for large negative z.  The series is
summed in double precision with compensated summation and escalates to mpmath
when alternating-sign cancellation would destroy the accuracy target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import gammaln

from .errors import NonConvergence, RangeError
from .gammafn import rgamma

RHO_MIN, RHO_MAX = 0.1, 2.0
MU_MAX = 3.0

#: hard cap on series terms (band-edge evaluations at small rho are slow to converge)
SERIES_TERM_CAP = 3000
#: default number of algebraic correction terms for the positive asymptotic
POS_TAIL_TERMS = 10
#: default cap for the negative-argument algebraic expansion (min-term truncated)
NEG_TAIL_TERMS = 60

_EPS = float(np.finfo(float).eps)
#: escalate the series to mpmath when the cancellation penalty exceeds this
_ESCALATE_PENALTY = 1e-11
#: largest exponent exp() can represent
_EXP_MAX = 709.0

#: worst-case relative error advertised per regime (dispatcher-reachable points)
ADVERTISED_BOUND = {
    "series": 1e-10,
    "asymptotic_pos": 1e-8,
    "asymptotic_neg": 1e-4,
}


def series_radius(rho: float) -> float:
    """Switch point between the series and the asymptotic branches.

    12 for moderate orders; shrinks for small rho, where the series needs
    ~|z|^(1/rho)/rho terms and would blow past the term cap at |z| = 12.
    """
    return min(12.0, (250.0 * rho) ** rho)


@dataclass(frozen=True)
class MLQuery:
    """Evaluation request for E_{rho,mu}(z)."""

    rho: float
    mu: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rho) and math.isfinite(self.mu) and math.isfinite(self.z)):
            raise RangeError("rho, mu, z must be finite")
        if not (RHO_MIN <= self.rho <= RHO_MAX):
            raise RangeError(f"rho={self.rho} outside supported [{RHO_MIN}, {RHO_MAX}]")
        if not (0.0 < self.mu <= MU_MAX):
            raise RangeError(f"mu={self.mu} outside supported (0, {MU_MAX}]")


@dataclass(frozen=True)
class MLValue:
    """Evaluation result; log_abs/sign stay meaningful when value overflows."""

    value: float
    log_abs: float
    sign: int
    est_rel_error: float
    regime: str


def _from_signed(value: float, est: float, regime: str) -> MLValue:
    if value == 0.0:
        return MLValue(0.0, -math.inf, 0, est, regime)
    return MLValue(value, math.log(abs(value)), 1 if value > 0 else -1, est, regime)


# {{{ series

def _series_float(rho: float, mu: float, z: float, tol: float):
    """Compensated double-precision sum; returns (sum, max_term, n_terms, converged)."""
    s = rgamma(mu)
    c = 0.0
    maxt = abs(s)
    lz = math.log(abs(z))
    neg = z < 0.0
    small = 0
    m = 0
    for m in range(1, SERIES_TERM_CAP + 1):
        lt = m * lz - gammaln(rho * m + mu)
        t = math.exp(lt) if lt > -745.0 else 0.0
        if neg and (m & 1):
            t = -t
        # Kahan update
        y = t - c
        tmp = s + y
        c = (tmp - s) - y
        s = tmp
        at = abs(t)
        if at > maxt:
            maxt = at
        if m >= 2 and at <= tol * max(abs(s), 1e-300):
            small += 1
            if small == 2:
                return s, maxt, m, True
        else:
            small = 0
    return s, maxt, m, False


_mp_rgamma_cache: dict[tuple, list] = {}


def _mp_rgamma_table(rho: float, mu: float, dps: int, upto: int) -> list:
    """Reciprocal gammas 1/Gamma(rho m + mu) for m = 0..upto, grown on demand.

    The table depends only on (rho, mu, dps), so batch evaluations over many
    z values (the spectral solver's hot path) pay the gamma cost once."""
    key = (rho, mu, dps)
    tab = _mp_rgamma_cache.setdefault(key, [])
    if len(tab) <= upto:
        with mp.workdps(dps):
            r = mp.mpf(rho)
            u = mp.mpf(mu)
            for m in range(len(tab), upto + 1):
                tab.append(mp.rgamma(r * m + u))
    return tab


def _series_mp(rho: float, mu: float, z: float, dps: int):
    """High-precision series; returns (sum: float, max_term_log10, lost_digits)."""
    with mp.workdps(dps):
        x = mp.mpf(z)
        tab = _mp_rgamma_table(rho, mu, dps, 64)
        s = tab[0]
        maxt = abs(s)
        cutoff = mp.mpf(10) ** (-dps + 2)
        small = 0
        xp = mp.mpf(1)
        for m in range(1, SERIES_TERM_CAP + 1):
            if m >= len(tab):
                tab = _mp_rgamma_table(rho, mu, dps, 2 * len(tab))
            xp *= x
            t = xp * tab[m]
            s += t
            if abs(t) > maxt:
                maxt = abs(t)
            if m >= 2 and abs(t) <= cutoff * abs(s):
                small += 1
                if small == 2:
                    break
            else:
                small = 0
        else:
            raise NonConvergence(
                f"series for E_{{{rho},{mu}}}({z}) needs more than {SERIES_TERM_CAP} terms"
            )
        lost = float(mp.log10(maxt / abs(s))) if s != 0 else float(mp.log10(maxt)) + dps
        return float(s), float(mp.log10(maxt)), lost


def ml_series(q: MLQuery, tol: float = 1e-15) -> MLValue:
    """Truncated defining series with cancellation tracking.

    Valid for |z| up to one unit past the switch point (the overlap band).
    For z < 0, a cancellation penalty (max term / result) * eps is added to
    est_rel_error; when that penalty exceeds the accuracy budget the sum is
    redone in mpmath at a precision sized to the cancellation.
    """
    if tol <= 0.0:
        raise RangeError("tol must be positive")
    radius = series_radius(q.rho)
    if abs(q.z) > radius + 1.0 + 1e-9:
        raise RangeError(f"|z|={abs(q.z)} beyond series radius {radius} (+1 band slack)")
    if q.z == 0.0:
        return _from_signed(rgamma(q.mu), _EPS, "series")

    s, maxt, _, converged = _series_float(q.rho, q.mu, q.z, tol)
    if not converged:
        raise NonConvergence(
            f"series for E_{{{q.rho},{q.mu}}}({q.z}) hit the {SERIES_TERM_CAP}-term cap"
        )
    if q.z > 0.0:
        return _from_signed(s, 10.0 * tol, "series")

    penalty = maxt / max(abs(s), 1e-300) * _EPS
    if penalty <= _ESCALATE_PENALTY and s != 0.0:
        return _from_signed(s, 10.0 * tol + penalty, "series")

    # heavy cancellation: redo at elevated precision (|E| >= 1e-8 assumed in-domain)
    dps = 41 + max(0, int(math.log10(max(maxt, 1.0))))
    value, _, lost = _series_mp(q.rho, q.mu, q.z, dps)
    if dps - lost < 14.0:
        dps = int(lost) + 30
        value, _, lost = _series_mp(q.rho, q.mu, q.z, dps)
    est = max(1e-14, 10.0 ** (lost - dps + 2))
    return _from_signed(value, est, "series")

# }}}


# {{{ asymptotics

def _alg_terms(rho: float, mu: float, w: float, cap: int, alternating: bool):
    """Algebraic tail terms w^{-k}/Gamma(mu - rho k), truncated at the smallest
    nonzero term (the expansion is asymptotic, not convergent).

    Returns (signed_sum, magnitude_of_smallest_kept_term).
    """
    ks = np.arange(1, cap + 1)
    mags = np.exp(-ks * math.log(w)) * np.abs(rgamma(mu - rho * ks))
    nz = np.nonzero(mags)[0]
    if nz.size == 0:
        return 0.0, 0.0
    kstop = nz[np.argmin(mags[nz])]
    terms = mags[: kstop + 1].copy()
    if alternating:
        terms[1::2] *= -1.0
    signs = np.sign(rgamma(mu - rho * ks[: kstop + 1]))
    return float(np.sum(terms * signs)), float(mags[kstop])


def ml_asymptotic_pos(q: MLQuery, terms: int = POS_TAIL_TERMS) -> MLValue:
    """Large positive z: (1/rho) z^{(1-mu)/rho} e^{z^{1/rho}} minus the
    algebraic tail sum_k z^{-k}/Gamma(mu - rho k).

    log_abs is formed directly from the exponent, so the result stays usable
    when e^{z^{1/rho}} overflows.
    """
    if terms < 1:
        raise RangeError("terms must be >= 1")
    switch = series_radius(q.rho)
    if q.z < switch - 1.0 - 1e-9:
        raise RangeError(f"z={q.z} below positive switch point {switch} (-1 band slack)")
    explog = q.z ** (1.0 / q.rho) + ((1.0 - q.mu) / q.rho) * math.log(q.z) - math.log(q.rho)
    tail, trunc = _alg_terms(q.rho, q.mu, q.z, terms, alternating=False)
    if explog <= _EXP_MAX:
        value = math.exp(explog) - tail
        est = trunc / max(abs(value), 1e-300) + 1e-13
        out = _from_signed(value, est, "asymptotic_pos")
        return out
    # overflowing regime: tail correction underflows relative to the exponential
    return MLValue(math.inf, explog, 1, 1e-13, "asymptotic_pos")


def ml_asymptotic_neg(q: MLQuery, terms: int = NEG_TAIL_TERMS) -> MLValue:
    """Large |z|, z < 0: E_{rho,mu}(-w) ~ -sum_k (-w)^{-k}/Gamma(mu - rho k).

    For mu = rho the k=1 coefficient 1/Gamma(0) vanishes identically, leaving
    the w^{-2}/|Gamma(-rho)| leading behaviour.
    """
    if terms < 2:
        raise RangeError("terms must be >= 2")
    if q.rho >= 1.95:
        raise RangeError("negative-argument algebraic expansion unsupported for rho ~ 2")
    switch = series_radius(q.rho)
    if q.z > -(switch - 1.0) + 1e-9:
        raise RangeError(f"z={q.z} above negative switch point -{switch} (+1 band slack)")
    w = -q.z
    # -sum (-w)^{-k}/Gamma = sum (-1)^{k+1} w^{-k}/Gamma: alternating in k
    s, trunc = _alg_terms(q.rho, q.mu, w, terms, alternating=True)
    est = trunc / max(abs(s), 1e-300) + _EPS
    return _from_signed(s, est, "asymptotic_neg")

# }}}


def ml(q: MLQuery) -> MLValue:
    """Regime dispatcher: series within the switch radius, asymptotics beyond."""
    radius = series_radius(q.rho)
    if abs(q.z) <= radius:
        return ml_series(q)
    if q.z > 0.0:
        return ml_asymptotic_pos(q)
    return ml_asymptotic_neg(q)


def ml_point(rho: float, mu: float, z: float) -> MLValue:
    """Convenience wrapper building the query inline."""
    return ml(MLQuery(rho, mu, z))


# {{{ vectorised log-scale path

def _series_log_vec(rho: float, mu: float, z: np.ndarray, tol: float = 1e-14):
    """Vectorised series for a batch of in-radius arguments.

    Returns (sign, log_abs).  Elements whose cancellation penalty exceeds the
    escalation threshold fall back to the scalar (mpmath) path.
    """
    n = z.size
    s = np.full(n, rgamma(mu))
    comp = np.zeros(n)
    maxt = np.abs(s).copy()
    with np.errstate(divide="ignore"):
        lz = np.where(z == 0.0, -np.inf, np.log(np.abs(z)))
    neg = z < 0.0
    small = np.zeros(n, dtype=np.int8)
    done = np.zeros(n, dtype=bool)
    for m in range(1, SERIES_TERM_CAP + 1):
        lt = m * lz - gammaln(rho * m + mu)
        t = np.where(lt > -745.0, np.exp(np.minimum(lt, _EXP_MAX)), 0.0)
        if m & 1:
            t = np.where(neg, -t, t)
        t = np.where(done, 0.0, t)
        y = t - comp
        tmp = s + y
        comp = (tmp - s) - y
        s = tmp
        at = np.abs(t)
        np.maximum(maxt, at, out=maxt)
        conv = at <= tol * np.maximum(np.abs(s), 1e-300)
        small = np.where(conv & ~done, small + 1, 0)
        done |= (small >= 2) & (m >= 2)
        if done.all():
            break
    else:
        raise NonConvergence("vectorised series hit the term cap")
    penalty = maxt / np.maximum(np.abs(s), 1e-300) * _EPS
    bad = neg & ((penalty > _ESCALATE_PENALTY) | (s == 0.0))
    sign = np.sign(s).astype(np.int8)
    with np.errstate(divide="ignore"):
        log_abs = np.where(s == 0.0, -np.inf, np.log(np.maximum(np.abs(s), 1e-300)))
    for i in np.nonzero(bad)[0]:
        v = ml_series(MLQuery(rho, mu, float(z[i])))
        sign[i] = v.sign
        log_abs[i] = v.log_abs
    return sign, log_abs


def ml_log_array(rho: float, mu: float, z: np.ndarray):
    """(sign, log_abs) of E_{rho,mu} over an array of real arguments.

    Fast path used by the spectral solver; handles all three regimes and never
    overflows.
    """
    z = np.asarray(z, dtype=float)
    flat = z.ravel()
    sign = np.zeros(flat.size, dtype=np.int8)
    log_abs = np.full(flat.size, -np.inf)
    radius = series_radius(rho)

    mid = np.abs(flat) <= radius
    if mid.any():
        s, la = _series_log_vec(rho, mu, flat[mid])
        sign[mid] = s
        log_abs[mid] = la

    pos = flat > radius
    if pos.any():
        zp = flat[pos]
        explog = zp ** (1.0 / rho) + ((1.0 - mu) / rho) * np.log(zp) - math.log(rho)
        vals = np.empty(zp.size)
        sg = np.ones(zp.size, dtype=np.int8)
        la = np.empty(zp.size)
        for i, (zi, ei) in enumerate(zip(zp, explog)):
            tail, _ = _alg_terms(rho, mu, float(zi), POS_TAIL_TERMS, alternating=False)
            if ei <= _EXP_MAX:
                v = math.exp(ei) - tail
                sg[i] = 1 if v >= 0 else -1
                la[i] = math.log(abs(v)) if v != 0.0 else -math.inf
            else:
                la[i] = ei
        del vals
        sign[pos] = sg
        log_abs[pos] = la

    negm = flat < -radius
    if negm.any():
        for i in np.nonzero(negm)[0]:
            v = ml_asymptotic_neg(MLQuery(rho, mu, float(flat[i])))
            sign[i] = v.sign
            log_abs[i] = v.log_abs

    return sign.reshape(z.shape), log_abs.reshape(z.shape)


def ml_value_array(rho: float, mu: float, z: np.ndarray) -> np.ndarray:
    """Linear-scale batch evaluation; overflowing entries come back as +/-inf."""
    sign, log_abs = ml_log_array(rho, mu, z)
    with np.errstate(over="ignore"):
        return sign * np.exp(log_abs)

# }}}
