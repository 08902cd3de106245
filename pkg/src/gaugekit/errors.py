"""Exception hierarchy.

Every error raised by the package derives from :class:`GaugekitError`.
Errors that signal a numerical tolerance failure (as opposed to bad input)
derive from :class:`NumericalError`; the CLI maps those to exit status 2.
"""


class GaugekitError(Exception):
    """Base class for all package errors."""


class InputError(GaugekitError, ValueError):
    """Invalid arguments (bad shapes, indices, dimensions)."""


class NumericalError(GaugekitError, ArithmeticError):
    """A computation could not meet its stated tolerance."""


# group_core
class AntipodalElement(NumericalError):
    pass


class NonUnit(InputError):
    pass


# lattice
class BadDimension(InputError):
    pass


class BadSize(InputError):
    pass


class BadIndex(InputError):
    pass


class BadPath(InputError):
    pass


class MismatchedLattice(InputError):
    pass


# gauge_field / holonomy
class NotConverged(NumericalError):
    """An iterative solver stopped above tolerance.

    The best iterate and any diagnostics are attached as attributes so that
    callers can still inspect what was reached.
    """

    def __init__(self, message, best=None, history=None, residual=None):
        super().__init__(message)
        self.best = best
        self.history = history
        self.residual = residual


class NotFlat(NumericalError):
    pass


class RankAmbiguous(NumericalError):
    pass


# chern / chern_simons
class BranchAmbiguity(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    pass


class IntegralityError(NumericalError):
    """A characteristic number did not round to an integer within tolerance."""


class TooRough(InputError):
    pass


# dirac
class BadFlux(InputError):
    pass


class NoSpectralGap(NumericalError):
    pass


# sw
class NotIntegral(NumericalError):
    def __init__(self, message, raw=None):
        super().__init__(message)
        self.raw = raw


# degree
class SingularRoot(NumericalError):
    pass


class DegreeJump(NumericalError):
    def __init__(self, message, t=None, y=None):
        super().__init__(message)
        self.t = t
        self.y = y


# cli
class ConfigError(InputError):
    pass
