"""Gamma-function helpers: reciprocal gamma that is exactly zero at poles."""

import numpy as np
from scipy import special

#: non-positive integers within this absolute distance are treated as poles
POLE_TOL = 1e-12


def rgamma(x):
    """1/Gamma(x), exactly 0.0 at non-positive integers.

    scipy already returns 0.0 at exact poles; this wrapper additionally
    snaps arguments within POLE_TOL of a pole so that expressions like
    mu - rho*k with mu == rho hit the pole exactly.
    """
    x = np.asarray(x, dtype=float)
    near = np.round(x)
    pole = (near <= 0.0) & (np.abs(x - near) < POLE_TOL)
    out = special.rgamma(np.where(pole, 1.0, x))
    out = np.where(pole, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def gammaln_signed(x):
    """(log|Gamma(x)|, sign) for real x away from poles."""
    return special.gammaln(x), special.gammasgn(x)
