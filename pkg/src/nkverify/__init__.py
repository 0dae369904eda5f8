"""Numerical certificates for almost complex structures tamed by the nearly
Kaehler form on S^6."""

__version__ = "0.1.0"

from nkverify._backend import BACKEND  # noqa: E402

__all__ = ["__version__", "BACKEND"]
