"""Exception and warning types raised by :mod:`qcontract`.

Every error derives from :class:`QContractError`, which is itself a
:class:`ValueError`, so callers can catch either.  Each class carries an
``exit_code`` used by the command-line front end:

* ``1`` -- input could not be parsed or named something unknown,
* ``2`` -- a mathematical precondition of the requested operation failed,
* ``3`` -- a numerical check failed after the computation ran.
"""


class QContractError(ValueError):
    """Base class for all library errors."""

    exit_code = 2


# --- input / parsing -------------------------------------------------------


class ParseError(QContractError):
    """Input file or command-line value could not be parsed."""

    exit_code = 1


class UnknownSuite(QContractError):
    """The requested verification suite does not exist."""

    exit_code = 1


# --- preconditions ---------------------------------------------------------


class DimensionMismatch(QContractError):
    """Operand shapes are incompatible."""


class NotHermitian(QContractError):
    """A matrix required to be Hermitian is not, within tolerance."""


class NotPSD(QContractError):
    """A matrix required to be positive semidefinite is not."""


class NotDensity(QContractError):
    """A matrix is not a valid density operator."""


class NotCPTP(QContractError):
    """A map is not completely positive and trace preserving."""


class DomainError(QContractError):
    """A scalar argument lies outside a function's domain."""


class RankDeficient(QContractError):
    """A state required to be full rank (on some support) is singular."""


class SupportViolation(QContractError):
    """The support condition rho << sigma fails."""


class BandViolation(QContractError):
    """A monotone function does not satisfy the required properties."""


class NotADistribution(QContractError):
    """A table is not a joint probability distribution."""


class InvalidProjectors(QContractError):
    """Supplied projectors are not orthogonal projectors."""


class NotFixedPoint(QContractError):
    """The supplied state is not a fixed point of the channel."""


class NoUniqueFixedPoint(QContractError):
    """The channel's fixed-point space is not one-dimensional."""


# --- numerical failures ----------------------------------------------------


class ConvergenceFailure(QContractError):
    """An iterative linear-algebra routine did not converge."""

    exit_code = 3


class LinearDependence(QContractError):
    """Gram-Schmidt met a vector numerically dependent on its predecessors."""

    exit_code = 3


class ImagResidualTooLarge(QContractError):
    """A matrix expected to be real symmetric had a large residual."""

    exit_code = 3


class NumericalError(QContractError):
    """A post-computation sanity check failed."""

    exit_code = 3


class RankDeficientWarning(UserWarning):
    """Pseudoinverse applied where downstream formulas assume full rank."""
