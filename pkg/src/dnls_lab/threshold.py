"""Boosted-momentum bounds, f-functional bracket and the cubic mass threshold.

For a gauged field ``v`` with mass ``m0``, energy ``E0``, ``f = ||v||_4^4/||v||_6^3``
and boost ``phi = exp(i alpha x) v``::

    E(phi) = E(v) + 2 alpha Im int conj(v) v_x + alpha^2 m0
    -Im int conj(v) v_x <= (1/16 - C^-18 f^-4) ||v||_6^6 / (2 alpha) + alpha m0 / 2 + E0 / (2 alpha)

for every ``alpha > 0`` (``C = C_GN``). The cubic ``F(X) = X^3 - m0 X^2 + b``,
``b = 16 m0 C^-18 - eps``, is nonnegative at its interior minimum ``2 m0 / 3``
exactly when ``m0 <= 4 pi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np
from scipy import optimize

from . import functionals as fn
from .spectral import Field
from .variational import cgn_inv9, cgn_inv9_half, cgn_inv18

Regime = Literal["subcritical_bracket", "boost_regime"]

FOUR_PI = 4.0 * math.pi
BOUNDARY_RTOL = 1e-9


class RegimeError(ValueError):
    """The optimal boost is undefined: ``1 - 16 C^-18 f^-4 < 0``."""


class KineticDegenerateError(ValueError):
    pass


class BoostBoundaryWarning(UserWarning):
    pass


# --------------------------------------------------------------------------
# constants


def threshold_constant() -> float:
    """``6 sqrt(3) C_GN^-9``, equal to ``4 pi``."""
    return 6.0 * math.sqrt(3.0) * cgn_inv9()


def bracket_floor() -> float:
    """``4 C_GN^-9 = 8 pi / (3 sqrt 3)``, the lower end of the root bracket."""
    return 4.0 * cgn_inv9()


def f_lower_constant() -> float:
    """``2 C_GN^-(9/2)``, the limit of the f lower bound."""
    return 2.0 * cgn_inv9_half()


# --------------------------------------------------------------------------
# field-level bounds


@dataclass(frozen=True)
class BoundReport:
    time_tag: float
    lhs: float
    rhs: float
    alpha_used: float
    slack: float
    f_value: float
    f_lower: float
    f_upper: float
    regime: Regime

    def as_dict(self) -> dict:
        return asdict(self)


def _require_nonzero(v: Field) -> None:
    if fn.mass(v) <= 0.0:
        raise fn.UndefinedDiagnosticError("undefined diagnostic: zero field")


def boost(v: Field, alpha: float) -> Field:
    return Field(v.grid, np.exp(1j * alpha * v.grid.x) * v.values)


def lattice_alpha(grid, alpha: float) -> float:
    """Nearest wavenumber ``2 pi m / L`` to ``alpha``; boosts by it stay periodic."""
    step = 2.0 * math.pi / grid.L
    return round(alpha / step) * step


def boosted_energy_identity(v: Field, alpha: float) -> float:
    """``E(e^{i alpha x} v) - [E(v) + 2 alpha Im int conj(v) v_x + alpha^2 M(v)]``.

    ``E`` of the boosted field is computed from its own spectral derivative.
    Off the wavenumber lattice the boost is not periodic, so the residual is
    only small when ``v`` vanishes at the box edge; see :func:`lattice_alpha`.
    """
    if alpha == 0:
        return 0.0
    lhs = fn.energy_gauged(boost(v, alpha))
    return lhs - (fn.energy_gauged(v) + 2.0 * alpha * fn.current(v) + alpha**2 * fn.mass(v))


def momentum_identity(v: Field, P0: float) -> float:
    """``(1/4)||v||_4^4 + Im int conj(v) v_x - P0``."""
    return 0.25 * fn.lp_norm(v, 4) ** 4 + fn.current(v) - P0


def boost_radicand(f_value: float) -> float:
    """``1 - 16 C^-18 f^-4``; its sign picks the regime."""
    return 1.0 - 16.0 * cgn_inv18() / f_value**4


def regime_of(f_value: float) -> Regime:
    return "boost_regime" if boost_radicand(f_value) >= 0.0 else "subcritical_bracket"


def fn_bounds(v: Field) -> tuple[float, float, float]:
    """``(lower, f(v), upper)`` with the pre-limit lower bound.

    ``lower = 2 C^-(9/2) ||v||_6^(3/2) / (||v||_6^6 + 16 E0)^(1/4)`` and
    ``upper = sqrt(M(v))``.
    """
    _require_nonzero(v)
    a6 = fn.lp_norm(v, 6) ** 6
    denom = a6 + 16.0 * fn.energy_gauged(v)
    if denom <= 0.0:
        raise KineticDegenerateError("kinetic degenerate: ||v||_6^6 + 16 E0 <= 0")
    lower = f_lower_constant() * a6**0.25 / denom**0.25
    return lower, fn.f_functional(v), math.sqrt(fn.mass(v))


def momentum_bound_rhs(v: Field, alpha: float, time_tag: float = 0.0) -> BoundReport:
    """Evaluate both sides of the boosted momentum bound at boost ``alpha``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    _require_nonzero(v)
    m0 = fn.mass(v)
    E0 = fn.energy_gauged(v)
    a6 = fn.lp_norm(v, 6) ** 6
    f = fn.f_functional(v)
    lhs = -fn.current(v)
    rhs = (1.0 / 16.0 - cgn_inv18() / f**4) * a6 / (2.0 * alpha) + 0.5 * alpha * m0 + E0 / (2.0 * alpha)
    try:
        lower, _, upper = fn_bounds(v)
    except KineticDegenerateError:
        lower, upper = float("nan"), math.sqrt(m0)
    return BoundReport(time_tag, lhs, rhs, alpha, rhs - lhs, f, lower, upper, regime_of(f))


def alpha_from_invariants(m0: float, f_value: float, l6: float, boundary_tol: float = 1e-14) -> float:
    """``(1/4) sqrt((1 - 16 C^-18 f^-4) / m0) ||v||_6^3``."""
    rad = boost_radicand(f_value)
    if abs(rad) <= boundary_tol:
        warnings.warn("boost radicand vanishes: alpha = 0 boundary", BoostBoundaryWarning, stacklevel=2)
        return 0.0
    if rad < 0:
        raise RegimeError(
            f"subcritical_bracket regime: 1 - 16 C^-18 f^-4 = {rad:.6g} < 0; use alpha = 1"
        )
    return 0.25 * math.sqrt(rad / m0) * l6**3


def optimal_alpha(v: Field) -> float:
    _require_nonzero(v)
    return alpha_from_invariants(fn.mass(v), fn.f_functional(v), fn.lp_norm(v, 6))


def optimal_bound_rhs(v: Field) -> float:
    """Closed form of the bound at the optimal boost:
    ``(1/4) sqrt(m0 (1 - 16 C^-18 f^-4)) ||v||_6^3 + E0 / (2 alpha)``."""
    alpha = optimal_alpha(v)
    f = fn.f_functional(v)
    m0 = fn.mass(v)
    return 0.25 * math.sqrt(m0 * boost_radicand(f)) * fn.lp_norm(v, 6) ** 3 + fn.energy_gauged(v) / (2.0 * alpha)


def remainder_Rn(v: Field) -> float:
    """``2 sqrt(m0 (1 - 16 C^-18 f^-4)) (2 E0/alpha + 4 P0) ||v||_6^-3 + (2 E0/alpha + 4 P0)^2 ||v||_6^-6``."""
    alpha = optimal_alpha(v)
    if alpha <= 0:
        raise RegimeError("remainder needs a positive optimal boost")
    m0 = fn.mass(v)
    E0 = fn.energy_gauged(v)
    P0 = fn.momentum_gauged(v)
    f = fn.f_functional(v)
    l6_3 = fn.lp_norm(v, 6) ** 3
    c = 2.0 * E0 / alpha + 4.0 * P0
    return 2.0 * math.sqrt(m0 * boost_radicand(f)) * c / l6_3 + c**2 / l6_3**2


# --------------------------------------------------------------------------
# cubic threshold


@dataclass(frozen=True)
class CubicReport:
    m0: float
    epsilon: float
    b: float
    F_at_two_thirds: float
    X1: float | None
    X2: float | None
    bracket_ok: bool | None
    gwp_verdict: Literal["below_threshold", "at_or_above"]
    at_boundary: bool
    double_root: bool

    def as_dict(self) -> dict:
        return asdict(self)


def cubic_F(X: float, m0: float, b: float) -> float:
    return X**3 - m0 * X**2 + b


def cubic_b(m0: float, epsilon: float = 0.0) -> float:
    return 16.0 * m0 * cgn_inv18() - epsilon


def gwp_verdict(m0: float, rtol: float = BOUNDARY_RTOL) -> tuple[str, bool]:
    """Verdict against ``4 pi``; masses within ``rtol`` of it count as the boundary."""
    at_boundary = abs(m0 - FOUR_PI) <= rtol * FOUR_PI
    if m0 < FOUR_PI and not at_boundary:
        return "below_threshold", False
    return "at_or_above", at_boundary


def cubic_analyze(m0: float, epsilon: float = 0.0, root_rtol: float = 1e-12) -> CubicReport:
    """Roots and verdict for ``X^3 - m0 X^2 + b < 0``.

    Roots are located by bisection on ``[0, 2 m0/3]`` and
    ``[2 m0/3, m0 + b^(1/3) + 1]``. When ``F(2 m0/3)`` is zero to rounding
    the double root ``2 m0 / 3`` is reported.
    """
    if not m0 > 0:
        raise ValueError("m0 must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    b = cubic_b(m0, epsilon)
    if not b > 0:
        raise ValueError(f"b = 16 m0 C^-18 - epsilon must be positive, got {b!r}")
    xm = 2.0 * m0 / 3.0
    Fm = cubic_F(xm, m0, b)
    scale = max(1.0, b, xm**3)
    verdict, at_boundary = gwp_verdict(m0)
    X1 = X2 = None
    double = False
    if abs(Fm) <= 64 * np.finfo(float).eps * scale:
        X1 = X2 = xm
        double = True
    elif Fm < 0:
        F = lambda X: cubic_F(X, m0, b)  # noqa: E731
        X1 = optimize.bisect(F, 0.0, xm, xtol=1e-300, rtol=root_rtol, maxiter=500)
        X2 = optimize.bisect(F, xm, m0 + b ** (1.0 / 3.0) + 1.0, xtol=1e-300, rtol=root_rtol, maxiter=500)
    bracket_ok = None if X1 is None else bool(bracket_floor() < X1 and X2 < m0)
    return CubicReport(m0, epsilon, b, Fm, X1, X2, bracket_ok, verdict, at_boundary, double)
