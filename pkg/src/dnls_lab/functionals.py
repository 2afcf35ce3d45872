"""Conserved functionals and diagnostic scalars.

Original-form quantities (for solutions ``u`` of
``i u_t + u_xx = i (|u|^2 u)_x``)::

    M_D(u) = int |u|^2
    E_D(u) = int |u_x|^2 + (3/2) Im(|u|^2 u conj(u_x)) + (1/2)|u|^6
    P_D(u) = Im int conj(u) u_x - (1/2) int |u|^4

Gauged-form quantities (for ``v``, the gauge transform of ``u``)::

    E(v) = ||v_x||_2^2 - (1/16) ||v||_6^6
    P(v) = Im int conj(v) v_x + (1/4) ||v||_4^4
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .spectral import Field, derivative_array, integrate


class UndefinedDiagnosticError(ValueError):
    """Raised when a diagnostic is evaluated on a field where it has no meaning."""


@dataclass(frozen=True)
class InvariantSet:
    form: Literal["original", "gauged"]
    mass: float
    energy: float
    momentum: float
    time_tag: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def _power_integral(f: Field, p: int) -> float:
    rho = f.modulus_squared
    return integrate(rho ** (p // 2), f.grid)


def mass(f: Field) -> float:
    return integrate(f.modulus_squared, f.grid)


def kinetic(f: Field) -> float:
    """``||f_x||_2^2`` with the spectral derivative."""
    fx = derivative_array(f.grid, f.values)
    return integrate(fx.real**2 + fx.imag**2, f.grid)


def current(f: Field) -> float:
    """``Im int conj(f) f_x``."""
    fx = derivative_array(f.grid, f.values)
    return integrate(np.imag(np.conj(f.values) * fx), f.grid)


def lp_norm(f: Field, p: int) -> float:
    if p not in (2, 4, 6):
        raise ValueError(f"only p in {{2, 4, 6}} is supported, got {p!r}")
    return _power_integral(f, p) ** (1.0 / p)


def energy_original(u: Field) -> float:
    ux = derivative_array(u.grid, u.values)
    rho = u.modulus_squared
    density = (
        ux.real**2
        + ux.imag**2
        + 1.5 * np.imag(rho * u.values * np.conj(ux))
        + 0.5 * rho**3
    )
    return integrate(density, u.grid)


def momentum_original(u: Field) -> float:
    return current(u) - 0.5 * _power_integral(u, 4)


def energy_gauged(v: Field) -> float:
    return kinetic(v) - _power_integral(v, 6) / 16.0


def momentum_gauged(v: Field) -> float:
    return current(v) + 0.25 * _power_integral(v, 4)


def invariants(f: Field, form: str = "gauged", time_tag: float = 0.0) -> InvariantSet:
    if form == "gauged":
        return InvariantSet("gauged", mass(f), energy_gauged(f), momentum_gauged(f), time_tag)
    if form == "original":
        return InvariantSet("original", mass(f), energy_original(f), momentum_original(f), time_tag)
    raise ValueError(f"unknown invariant form {form!r}")


def f_functional(v: Field) -> float:
    """``||v||_4^4 / ||v||_6^3``, homogeneous of degree one."""
    a4 = _power_integral(v, 4)
    a6 = _power_integral(v, 6)
    if a6 <= 0.0:
        raise UndefinedDiagnosticError("undefined diagnostic: f-functional of the zero field")
    return a4 / np.sqrt(a6)


def check_quartic_identity(v: Field, E0: float) -> float:
    """Residual of ``||v||_4^8 = 16 f(v)^2 (||v_x||_2^2 - E0)``.

    Vanishes to roundoff when ``E0 = energy_gauged(v)``, since then
    ``16 (||v_x||^2 - E0) = ||v||_6^6``.
    """
    a4 = _power_integral(v, 4)
    f = f_functional(v)
    return a4**2 - 16.0 * f**2 * (kinetic(v) - E0)


def h1_equivalence_constant(u0_mass: float) -> float:
    """Factor ``1 + 3 m / (2 pi)`` bounding ``||u_x||_2`` by ``||v_x||_2``."""
    if u0_mass < 0:
        raise ValueError("mass must be nonnegative")
    return 1.0 + 3.0 * u0_mass / (2.0 * np.pi)
