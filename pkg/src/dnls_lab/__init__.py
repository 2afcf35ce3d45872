"""Numerical laboratory for the derivative nonlinear Schrodinger equation."""

__version__ = "0.1.0"

from .spectral import Field, Grid, make_grid  # noqa: E402

__all__ = ["Field", "Grid", "make_grid", "__version__"]
