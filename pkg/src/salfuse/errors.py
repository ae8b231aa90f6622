"""Exception types shared across the toolkit."""


class FusionError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(FusionError, ValueError):
    """A configuration value is out of its legal range."""


class InvalidInputError(FusionError, ValueError):
    """An input image (or combination of inputs) violates a precondition."""


class ImageTooSmallError(InvalidInputError):
    """The operation needs a larger image than the one supplied."""
