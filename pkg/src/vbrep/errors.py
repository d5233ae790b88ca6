"""Exception types shared across the reconstruction pipeline."""


class VbrepError(Exception):
    """Base class for all package errors."""


class SingularPoint(VbrepError):
    """Normal requested at a point on a primitive's singular locus."""


class Degenerate(VbrepError):
    """Minimal sample set does not determine a primitive (collinear, coincident, ...)."""


class InsufficientPoints(VbrepError):
    """Fewer samples than the minimal set size for the requested primitive type."""


class NoConsensus(VbrepError):
    """RANSAC best inlier fraction fell below the consensus threshold."""


class InvalidAxisClass(VbrepError):
    """Operation requires an aligned axis class (X, Y or Z)."""


class DimensionMismatch(VbrepError):
    """Raster dimensions disagree with the camera intrinsics."""


class LmDiverged(VbrepError):
    """Levenberg-Marquardt exceeded the rejected-step budget.

    Carries the last accepted state so callers can continue from it.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ProjectionFailed(VbrepError):
    """No surface point found along a view ray within tolerance."""


class ExtentOverflow(VbrepError):
    """UV grid extent doubling exceeded the allowed number of doublings."""


class AllConfigsInvalid(VbrepError):
    """No depth-sheet configuration covers enough of the 2D region."""


class EmptyFrame(VbrepError):
    """Ray-cast scene produced no visible geometry."""


class EmptySet(VbrepError):
    """Metric requested on an empty point set."""


class NoAxedMatches(VbrepError):
    """Primitive alignment requested but no matched pair carries an axis."""


class InputMissing(VbrepError):
    """A required input file is absent from the bundle."""


class StageError(VbrepError):
    """Pipeline stage failure, tagged with the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
