"""Exception hierarchy shared by all fracorder modules."""


class FracOrderError(Exception):
    """Base class for all library errors."""


class RangeError(FracOrderError):
    """Query parameters outside the supported accuracy window."""


class NonConvergence(FracOrderError):
    """An iterative evaluation hit its term cap before converging."""


class OutOfRange(FracOrderError):
    """Evaluation point outside the sampled grid span."""


class SingularityTooStrong(FracOrderError):
    """Declared leading exponent is not integrable (<= -1)."""


class Overflow(FracOrderError):
    """Linear-scale result not representable; use the log-scale path."""


class ZeroProjection(FracOrderError):
    """First-mode projection vanishes at the monitoring point."""


class Assumption6Violated(FracOrderError):
    """lambda_1 >= 0 or |lambda_1| = 1: growth/order relation degenerate."""


class WindowTooSmall(FracOrderError):
    """No usable samples in the requested estimation window."""


class SlopeDegenerate(FracOrderError):
    """Fitted growth slope is non-positive or exactly 1."""


class NotDecaying(FracOrderError):
    """Series magnitude grows over the tail window of a decay-only estimator."""


class DenominatorVanishes(FracOrderError):
    """|u - phi(x0)| below the usable threshold for the small-t ratio."""


class BracketFailure(FracOrderError):
    """Root bracket lost its sign change (tangent pole contamination)."""


class DecayTooSlow(FracOrderError):
    """Projection coefficients fail the tail summability check."""
