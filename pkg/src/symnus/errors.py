"""Exception types shared across the package."""


class InvalidParameter(ValueError):
    """A parameter is outside its documented domain."""


class DegenerateInput(ValueError):
    """Input is well-formed but the requested quantity is undefined for it."""


class FormatError(ValueError):
    """A file does not follow the expected on-disk layout."""
