"""Exception types raised by the stochmap toolkit.

Every failure mode has a dedicated class so callers (and the CLI exit-code
mapping) can distinguish structural violations from algorithmic failures.
"""


class StochmapError(Exception):
    """Base class for all toolkit errors."""


# -- structural / precondition violations ------------------------------------

class DimensionMismatch(StochmapError):
    """Operand dimensions are incompatible."""


class NotPerfectSquare(StochmapError):
    """A supermatrix side is not a perfect square."""


class NotHermitian(StochmapError):
    """A matrix required to be hermitian is not, beyond tolerance."""


class TraceNotOne(StochmapError):
    """A density matrix candidate does not have unit trace."""


class NotPositive(StochmapError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


class BadRank(StochmapError):
    """Requested rank is outside the valid range."""


class IndexOutOfRange(StochmapError):
    """An index argument exceeds the available dimension."""


class BadWeights(StochmapError):
    """Convex weights are negative or do not sum to one."""


class BadArguments(StochmapError):
    """Arguments violate a documented precondition."""


class NotOrthonormal(StochmapError):
    """Input columns are not orthonormal within tolerance."""


class NotPseudoOrthonormal(StochmapError):
    """Input columns are not pseudo-orthonormal for the given metric."""


class NotHermiticityPreserving(StochmapError):
    """The map's Choi-form matrix is not hermitian, beyond tolerance."""


class TraceConditionViolated(StochmapError):
    """The operator-sum trace condition does not hold within tolerance."""


class NotCompletelyPositive(StochmapError):
    """Operation requires a completely positive map."""


class NotApplicable(StochmapError):
    """Operation does not apply to this input (use the sibling operation)."""


class NotResolution(StochmapError):
    """An operator family does not resolve the identity within tolerance."""


class FileFormatError(StochmapError):
    """A matrix file cannot be parsed or has an inconsistent layout."""


# -- algorithmic failures -----------------------------------------------------

class ConvergenceFailure(StochmapError):
    """An iterative solver exhausted its iteration budget."""


class NullVectorEncountered(StochmapError):
    """Indefinite-metric completion hit a candidate with a near-null self-product."""


class InsufficientOperators(StochmapError):
    """A single non-isometric operator cannot absorb the normalization transfer."""


class SinhDegenerate(StochmapError):
    """Negative-part operators carry weight on directions where the hyperbolic
    scale factor vanishes, so the scale cannot be divided out."""

    def __init__(self, directions, message=None):
        self.directions = list(directions)
        super().__init__(message or f"degenerate directions: {self.directions}")


class SamplingBudgetExhausted(StochmapError):
    """Rejection sampling used up its retry budget without an acceptable draw."""
