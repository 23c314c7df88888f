"""Exception types shared across the package."""


class FrametopError(Exception):
    """Base class for all domain errors."""


# -- diagonal targets ---------------------------------------------------------

class HypersimplexViolation(FrametopError):
    """The target vector is not a valid hypersimplex point."""


class HypothesisViolation(FrametopError):
    """The target fails the subset-sum connectivity hypothesis."""


class BetaOutOfRange(FrametopError):
    pass


class RankOutOfRange(FrametopError):
    pass


# -- matrices -----------------------------------------------------------------

class FrameInvariantViolation(FrametopError):
    """Rows of the matrix are not orthonormal within tolerance."""


class ProjectionInvariantViolation(FrametopError):
    """Matrix is not a symmetric idempotent of the expected trace."""


class DimensionMismatch(FrametopError):
    pass


class ShapeMismatch(FrametopError):
    pass


class SpectralGapTooSmall(FrametopError):
    """Eigenvalues too close to 1/2 to split into rank-one blocks."""


class NotSpecialOrthogonal(FrametopError):
    pass


# -- builders -----------------------------------------------------------------

class NormDeficit(FrametopError):
    """A requested column norm is smaller than the part already committed."""


# -- paths and certificates ---------------------------------------------------

class PartitionInvalid(FrametopError):
    pass


class BlockNotNTF(FrametopError):
    """A column block does not form a scaled normalized tight frame."""


class HeadNormMismatch(FrametopError):
    pass


class PatternMismatch(FrametopError):
    """The target does not match the combinatorial pattern of the rule."""


class SubcertificateInvalid(FrametopError):
    pass


class CompletionDiscontinuity(FrametopError):
    """Consecutive orthonormal completions are too far apart; refine the grid."""


class DetSignUnexpected(FrametopError):
    """The lifted endpoint matrix has determinant +1; the lift is broken."""


class EndpointInvalid(FrametopError):
    pass


class PathSearchFailure(FrametopError):
    """Numerical path search exhausted its budget (inconclusive)."""


# -- fibers and strata --------------------------------------------------------

class InvalidStart(FrametopError):
    pass


class NoConvergedSamples(FrametopError):
    pass


class TooLarge(FrametopError):
    """Enumeration bound exceeded."""


class IndexOutOfRange(FrametopError):
    pass


# -- polygons -----------------------------------------------------------------

class NotRankTwo(FrametopError):
    pass


class NotNormalized(FrametopError):
    pass
