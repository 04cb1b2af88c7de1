"""Exception types raised by symplex."""


class SymplexError(Exception):
    """Base class for all symplex errors."""


class NotSymplecticError(SymplexError, ValueError):
    pass


class AmbiguousSpectrumError(SymplexError):
    """Two distinct unit eigen-angles fall within the clustering tolerance."""


class RankAmbiguityError(SymplexError):
    """A rank decision had a singular value too close to the threshold."""


class DegenerateFormError(SymplexError):
    """A Hermitian form that must be nondegenerate has a (numerically) zero eigenvalue."""


class NonRegularCrossingError(DegenerateFormError):
    """A crossing form is degenerate and perturbing omega did not resolve it."""


class UnsupportedInputError(SymplexError, ValueError):
    pass


class CrossingResolutionError(SymplexError):
    """Crossing detection did not stabilise under grid refinement."""
