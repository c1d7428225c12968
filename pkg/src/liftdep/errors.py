"""Semantic exception hierarchy.

Every error a caller can act on has its own class; the class name is the
stable machine-readable identifier surfaced by the CLI on the diagnostic
stream. Do not raise bare ValueError from public functions.
"""


class LiftDepError(Exception):
    """Base error for the liftdep library."""

    @property
    def name(self) -> str:
        return type(self).__name__


class CurveSingularHasNoDensity(LiftDepError):
    """A curve-singular joint has no density w.r.t. area measure."""


class OutOfSupport(LiftDepError):
    """A discrete label is not present in the distribution's support."""


class DegenerateCorrelation(LiftDepError):
    """Bivariate-normal correlation with |r| >= 1."""


class NonMonotonePiece(LiftDepError):
    """The derivative changes sign inside a declared monotone piece."""


class DerivativeVanishes(LiftDepError):
    """|phi'(x*)| is numerically zero at a preimage of y."""


class UndefinedAtPoint(LiftDepError):
    """The requested pointwise quantity is undefined at this point."""


class QuadratureNotConverged(LiftDepError):
    """Adaptive quadrature exhausted its budget above the error target."""


class InsufficientRadii(LiftDepError):
    """Fewer than the minimum number of radii survived the count filter."""


class DegenerateSample(LiftDepError):
    """A sample axis has zero variance; no bandwidth can be formed."""


class MinSampleSize(LiftDepError):
    """Sample is smaller than the estimator's minimum size."""


class TargetHasZeroMass(LiftDepError):
    """The targeting event has zero marginal probability."""


class NotSampleable(LiftDepError):
    """No sampler is defined for this distribution class."""
