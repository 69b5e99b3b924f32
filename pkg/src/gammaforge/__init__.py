"""gammaforge: elementary functions over local fields and their Fourier transforms."""

__version__ = "0.1.0"

from .characters import COMPLEX, REAL, Character, LocalField, nonarch  # noqa: E402,F401

__all__ = ["COMPLEX", "REAL", "Character", "LocalField", "nonarch", "__version__"]
