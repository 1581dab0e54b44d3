"""Exception hierarchy shared by all sector_lab modules."""


class SectorLabError(Exception):
    """Base class for every error raised by sector_lab."""


class DimensionMismatch(SectorLabError, ValueError):
    """Vector or matrix sizes do not agree with the model space."""


class SingularMatrix(SectorLabError, ArithmeticError):
    """A pivot fell below the relative singularity threshold."""


class NotHermitian(SectorLabError, ValueError):
    """The matrix is not Hermitian within tolerance."""


class UnresolvedFunction(SectorLabError, ArithmeticError):
    """Grid doubling changed a function-space norm by more than allowed."""


class OrderTooLow(SectorLabError, ValueError):
    """The function does not carry derivatives up to the requested order."""


class SpectrumHit(SectorLabError, ValueError):
    """A resolvent was requested at (or numerically at) a point of the spectrum."""


class IllConditionedEigenbasis(SectorLabError, ArithmeticError):
    """The eigenvector matrix is too ill-conditioned for an eigenbasis calculus."""


class ContourNotConverged(SectorLabError, ArithmeticError):
    """Node doubling on the Cauchy contour did not settle."""


class SpectrumNotCovered(SectorLabError, ValueError):
    """The dyadic partition range does not cover the spectrum."""


class NotSectorial(SectorLabError, ValueError):
    """The matrix fails the sectoriality certificate."""


class UnsupportedSpace(SectorLabError, ValueError):
    """The model space is outside the range where the machinery applies."""


class InvalidSpec(SectorLabError, ValueError):
    """A model specification cannot be built."""


class UnknownExperiment(SectorLabError, KeyError):
    """No experiment is registered under the requested name."""


class SchemaViolation(SectorLabError, ValueError):
    """An experiment config does not match the schema of its kind."""
