"""Exception hierarchy.

Errors fall in two families that the command line maps to distinct exit
codes: violated mathematical preconditions (:class:`MathDomainError`) and
failed sampled theorem hypotheses (:class:`HypothesisFailed`).
"""


class SliceRegError(Exception):
    """Base class for all package errors."""


class MathDomainError(SliceRegError, ValueError):
    """An operation was called outside its mathematical domain."""


class QuaternionZeroDivision(MathDomainError, ZeroDivisionError):
    pass


class ZeroArgument(MathDomainError):
    """The zero quaternion has no trigonometric form."""


class NonInvertibleConstantTerm(MathDomainError):
    pass


class NonzeroConstantTerm(MathDomainError):
    pass


class NotNormalizable(MathDomainError):
    """Compositional inverse requested for a series with a0 != 0 or a1 == 0."""


class NotNormalized(MathDomainError):
    """Series is not of the form q + a2 q^2 + ... (or fails a class requirement)."""


class NotIntrinsic(NotNormalized):
    pass


class NonOrthogonalUnits(MathDomainError):
    pass


class NonUnitRotor(MathDomainError):
    pass


class ParameterOutOfRange(MathDomainError):
    pass


class PrerequisiteNotMet(MathDomainError):
    pass


class InsufficientSamples(MathDomainError):
    """Every sample point was skipped, so a check has nothing to report."""


class HypothesisFailed(SliceRegError):
    """A sampled check of a theorem hypothesis failed."""


class SchwarzViolation(HypothesisFailed):
    pass


class InputFormatError(SliceRegError, ValueError):
    """Malformed serialized input (series, tail or grid files)."""
