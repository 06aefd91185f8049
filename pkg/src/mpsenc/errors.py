"""Exception types shared across the package."""


class MpsEncError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(MpsEncError, ValueError):
    """A value is semantically invalid (zero norm, bad parameter range, ...)."""


class ShapeError(MpsEncError, ValueError):
    """An array or index has an incompatible shape or is out of range."""


class UnitarityError(MpsEncError, ValueError):
    """A matrix that must be unitary is not, within tolerance."""


class FormatError(MpsEncError, ValueError):
    """A file does not conform to its declared on-disk format."""


class CapacityError(MpsEncError, RuntimeError):
    """A requested operation exceeds a configured resource guard."""


class SynthesisError(MpsEncError, RuntimeError):
    """Gate synthesis failed to reach its reconstruction tolerance."""
