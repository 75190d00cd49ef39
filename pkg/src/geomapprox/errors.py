"""Exception types shared across the package."""


class UnsupportedLawError(ValueError):
    """The requested operation is not available for this family of laws."""


class TagMismatchError(ValueError):
    """The law's aging tag does not license the requested bound."""


class NoContractionError(RuntimeError):
    """No power of the transition matrix contracts in total variation."""


class DegenerateModelError(ValueError):
    """The model parameters make the approximation degenerate."""
