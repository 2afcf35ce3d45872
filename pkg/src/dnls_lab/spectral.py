"""Periodic-grid substrate for whole-line fields.

The real line is approximated by the periodic box ``[-L/2, L/2)`` sampled at
``n`` equispaced points. Transforms use numpy's convention: the forward FFT
is unscaled and the inverse carries the ``1/n`` factor. Wavenumbers are
stored in FFT order, ``k = 2*pi*fftfreq(n, dx)``, i.e. mode indices
``0, 1, ..., n/2-1, -n/2, ..., -1``; ``Grid.k_sorted`` gives them ascending.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_L = 40.0
DEFAULT_N = 1024


class GridError(ValueError):
    pass


class NonFiniteFieldError(FloatingPointError):
    pass


@dataclass(frozen=True)
class Grid:
    """Equispaced periodic grid on ``[-L/2, L/2)``."""

    L: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise GridError(f"box length must be positive, got {self.L!r}")
        n = self.n
        if int(n) != n or n < 16 or (int(n) & (int(n) - 1)) != 0:
            raise GridError(f"n must be a power of two >= 16, got {n!r}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "n", int(n))

    @property
    def dx(self) -> float:
        return self.L / self.n

    @cached_property
    def x(self) -> np.ndarray:
        x = -0.5 * self.L + self.dx * np.arange(self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def k(self) -> np.ndarray:
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)
        k.setflags(write=False)
        return k

    @property
    def k_sorted(self) -> np.ndarray:
        return np.fft.fftshift(self.k)

    @property
    def k_max(self) -> float:
        """Magnitude of the Nyquist wavenumber, ``pi*n/L``."""
        return np.pi * self.n / self.L

    @cached_property
    def derivative_multiplier(self) -> np.ndarray:
        # i*k with the unpaired Nyquist mode zeroed
        m = 1j * self.k
        m[self.n // 2] = 0.0
        m.setflags(write=False)
        return m

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        mask = np.abs(self.k) <= (2.0 / 3.0) * self.k_max
        mask.setflags(write=False)
        return mask

    def reflect_index(self) -> np.ndarray:
        """Index map realizing ``x -> -x`` on the periodic grid."""
        return (-np.arange(self.n)) % self.n


def make_grid(L: float = DEFAULT_L, n: int = DEFAULT_N) -> Grid:
    return Grid(L, n)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples of a function on a :class:`Grid`.

    The sample array is copied, made read-only and checked for NaN/Inf, so a
    ``Field`` can be shared freely between threads.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"expected {self.grid.n} samples, got array of shape {vals.shape}"
            )
        if not np.isfinite(vals).all():
            raise NonFiniteFieldError("field contains NaN or Inf samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: Grid, func) -> "Field":
        return cls(grid, func(grid.x))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.n))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def modulus_squared(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)

    def __mul__(self, other) -> "Field":
        if isinstance(other, Field):
            other = other.values
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values - other.values)

    def conj(self) -> "Field":
        return Field(self.grid, np.conj(self.values))

    def reflect(self) -> "Field":
        """``f(x) -> f(-x)``."""
        return Field(self.grid, self.values[self.grid.reflect_index()])

    def roll(self, shift: int) -> "Field":
        return Field(self.grid, np.roll(self.values, shift))

    def sup_distance(self, other: "Field") -> float:
        return float(np.max(np.abs(self.values - other.values)))


def derivative_array(grid: Grid, values: np.ndarray) -> np.ndarray:
    return np.fft.ifft(grid.derivative_multiplier * np.fft.fft(values))


def spectral_derivative(f: Field) -> Field:
    """Exact derivative of the trigonometric interpolant of ``f``."""
    return Field(f.grid, derivative_array(f.grid, f.values))


def second_derivative_array(grid: Grid, values: np.ndarray) -> np.ndarray:
    return np.fft.ifft(-(grid.k**2) * np.fft.fft(values))


def integrate(f, grid: Grid | None = None):
    """Periodic trapezoid rule, ``dx * sum(samples)``.

    Accepts a :class:`Field` or a raw sample array together with its grid.
    Real input gives a real result.
    """
    if isinstance(f, Field):
        grid, values = f.grid, f.values
    else:
        if grid is None:
            raise TypeError("a grid is required when integrating a raw array")
        values = np.asarray(f)
    total = grid.dx * np.sum(values)
    if np.iscomplexobj(total):
        return complex(total)
    return float(total)


def cumulative_primitive(g, grid: Grid | None = None) -> np.ndarray:
    """Running trapezoid integral from the left box edge.

    ``G[0] = 0`` and ``G[j+1] = G[j] + dx*(g[j] + g[j+1])/2``. Adding the
    closing panel ``dx*(g[-1] + g[0])/2`` to ``G[-1]`` recovers
    ``integrate(g)``.
    """
    if isinstance(g, Field):
        grid, values = g.grid, g.values
    else:
        if grid is None:
            raise TypeError("a grid is required for a raw array")
        values = np.asarray(g)
    if np.iscomplexobj(values):
        if np.any(values.imag != 0):
            raise ValueError("cumulative_primitive expects real samples")
        values = values.real
    G = np.empty(values.shape, dtype=np.float64)
    G[0] = 0.0
    np.cumsum(0.5 * grid.dx * (values[:-1] + values[1:]), out=G[1:])
    return G


def spectral_primitive(g, grid: Grid | None = None) -> np.ndarray:
    """Spectrally accurate running integral from the left box edge.

    The mean of ``g`` integrates to a linear ramp; the zero-mean remainder
    has the periodic antiderivative ``ghat_k / (i k)``. ``G[0] = 0``.
    """
    if isinstance(g, Field):
        grid, values = g.grid, g.values.real
    else:
        if grid is None:
            raise TypeError("a grid is required for a raw array")
        values = np.real(np.asarray(g))
    spec = np.fft.fft(values)
    mean = spec[0].real / grid.n
    inv_ik = np.zeros(grid.n, dtype=np.complex128)
    nz = grid.derivative_multiplier != 0
    inv_ik[nz] = 1.0 / grid.derivative_multiplier[nz]
    periodic = np.fft.ifft(spec * inv_ik).real
    G = mean * (grid.x - grid.x[0]) + periodic - periodic[0]
    return G


def dealias(f: Field) -> Field:
    """Two-thirds rule: zero every mode with ``|k| > (2/3) k_max``."""
    spec = np.fft.fft(f.values)
    spec[~f.grid.dealias_mask] = 0.0
    return Field(f.grid, np.fft.ifft(spec))
