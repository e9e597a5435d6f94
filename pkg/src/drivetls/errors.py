"""Exception and warning types shared across the package.

``ParameterError`` marks bad input (CLI exit code 2); ``NumericalError`` marks a
failure of a numerical procedure on valid input (CLI exit code 3).
"""


class ParameterError(ValueError):
    """Invalid physical or numerical parameter."""


class BesselDomainError(ParameterError):
    """Non-finite argument passed to a Bessel routine."""


class BesselOrderError(ParameterError):
    """Bessel order beyond the supported ceiling."""


class NumericalError(RuntimeError):
    """A numerical routine failed on otherwise valid input."""


class EigensolverError(NumericalError):
    pass


class AmbiguousDoubletError(NumericalError):
    """Two candidate eigenstates overlap equally with the unperturbed doublet."""


class SingularDenominatorError(NumericalError):
    """A retained perturbative denominator is closer to zero than allowed."""


class RootFindingError(NumericalError):
    pass


class IntegrationError(NumericalError):
    pass


class SpectrumResolutionError(NumericalError):
    pass


class TierMismatchError(ParameterError):
    """Density matrix and eigenstates come from different solution tiers."""


class TruncationWarning(UserWarning):
    """Truncated ladder or series loses more weight than the tolerance allows."""


class PositivityWarning(UserWarning):
    """Redfield evolution left the physical population range."""
