"""Exception hierarchy.

Input problems derive from :class:`InvalidInputError` (a ``ValueError``);
failures of the geometry itself (cut locus, non-convergence) derive from
:class:`NumericalError` (an ``ArithmeticError``).  The CLI maps the first
family to exit code 1 and the second to exit code 2.
"""


class InvalidInputError(ValueError):
    pass


class NotPositiveDefiniteError(InvalidInputError):
    pass


class NotOnManifoldError(InvalidInputError):
    pass


class OutOfChartError(InvalidInputError):
    pass


class ProjectionError(InvalidInputError):
    """Raised when a vector is too close to zero to be projected."""


class BaseMismatchError(InvalidInputError):
    pass


class DimensionMismatchError(InvalidInputError):
    pass


class NumericalError(ArithmeticError):
    pass


class CutLocusError(NumericalError):
    """The logarithm is undefined: the target lies on the cut locus."""


class MeanUndefinedError(NumericalError):
    def __init__(self, message, iteration):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration


class CutLocusWarning(RuntimeWarning):
    pass
