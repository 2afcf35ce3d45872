"""Integrating-factor RK4 pseudospectral solver for DNLS and its gauged form.

Both equations are written as ``d/dt w = i w_xx + N(w)``:

* original,  ``i u_t + u_xx = i (|u|^2 u)_x``  gives
  ``u_t = i u_xx + (|u|^2 u)_x``;
* gauged,    ``i v_t + v_xx = (i/2)|v|^2 v_x - (i/2) v^2 conj(v_x) - (3/16)|v|^4 v``
  gives ``v_t = i v_xx + (1/2)|v|^2 v_x - (1/2) v^2 conj(v_x) + (3/16) i |v|^4 v``.

In Fourier space the linear part is ``-i k^2``; the scheme advances
``exp(i k^2 t) w_hat`` with classical RK4 so dispersion is propagated exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from . import functionals as fn
from .gauge import gauge_forward
from .spectral import Field, Grid, derivative_array, make_grid

log = logging.getLogger(__name__)

Equation = Literal["original", "gauged"]

CSV_COLUMNS = ("t", "mass", "energy", "momentum", "l2_grad", "l4", "l6", "f", "bound_residual")


class NumericalBlowUpError(FloatingPointError):
    """The solution stopped being finite.

    ``t`` is the time of the failed step, ``last_row`` the last finite
    diagnostics and ``partial`` the time series up to that point.
    """

    def __init__(self, t: float, last_row: dict | None = None, partial: "TimeSeries | None" = None):
        super().__init__(f"numerical blow-up at t={t:.6g}")
        self.t = t
        self.last_row = last_row
        self.partial = partial


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class InitialDataSpec:
    """Initial datum family.

    ``scaled_ground_state``: ``a * Q``; ``gaussian``: ``A exp(-x^2/sigma^2) exp(i c x)``;
    ``psi_profile``: ``a * Psi``; ``raw_samples``: explicit complex samples.
    """

    family: Literal["scaled_ground_state", "gaussian", "psi_profile", "raw_samples"]
    a: float = 1.0
    A: float = 1.0
    sigma: float = 1.0
    c: float = 0.0
    samples: tuple | None = None

    def build(self, grid: Grid) -> Field:
        from .variational import ground_state_Q, psi_optimizer

        if self.family == "scaled_ground_state":
            return self.a * ground_state_Q(grid)
        if self.family == "gaussian":
            x = grid.x
            return Field(grid, self.A * np.exp(-((x / self.sigma) ** 2)) * np.exp(1j * self.c * x))
        if self.family == "psi_profile":
            return self.a * psi_optimizer(grid)
        if self.family == "raw_samples":
            if self.samples is None:
                raise ValueError("raw_samples family needs samples")
            return Field(grid, np.asarray(self.samples, dtype=np.complex128))
        raise ValueError(f"unknown initial data family {self.family!r}")

    def echo(self) -> dict:
        d = asdict(self)
        if self.family != "raw_samples":
            d.pop("samples")
        else:
            d["samples"] = f"<{len(self.samples)} complex samples>"
        return d


@dataclass(frozen=True)
class SimConfig:
    equation: Equation
    initial_data: InitialDataSpec
    L: float = 40.0
    n: int = 1024
    t_final: float = 1.0
    dt: float = 1e-3
    output_every: int = 10
    dealias: bool = True
    cfl_c: float = 1.0

    def __post_init__(self):
        if self.equation not in ("original", "gauged"):
            raise ValueError(f"equation must be 'original' or 'gauged', got {self.equation!r}")
        if not (self.t_final > 0 and self.dt > 0):
            raise ValueError("t_final and dt must be positive")
        if self.dt > self.t_final:
            raise ValueError("dt must not exceed t_final")
        if int(self.output_every) != self.output_every or self.output_every < 1:
            raise ValueError("output_every must be a positive integer")
        make_grid(self.L, self.n)

    @property
    def grid(self) -> Grid:
        return make_grid(self.L, self.n)

    def replace(self, **changes) -> "SimConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return SimConfig(**d)

    def echo(self) -> dict:
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d["initial_data"] = self.initial_data.echo()
        return d


# --------------------------------------------------------------------------
# right-hand sides


def _nonlinear_original(grid: Grid, u: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    """Fourier coefficients of ``(|u|^2 u)_x``."""
    cubic = (u.real**2 + u.imag**2) * u
    spec = np.fft.fft(cubic)
    if mask is not None:
        spec = spec * mask
    return grid.derivative_multiplier * spec


def _nonlinear_gauged(grid: Grid, v: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    """Fourier coefficients of ``(1/2)|v|^2 v_x - (1/2) v^2 conj(v_x) + (3/16) i |v|^4 v``."""
    vx = derivative_array(grid, v)
    rho = v.real**2 + v.imag**2
    nl = 0.5 * rho * vx - 0.5 * v * v * np.conj(vx) + (3.0j / 16.0) * rho * rho * v
    spec = np.fft.fft(nl)
    if mask is not None:
        spec = spec * mask
    return spec


_NONLINEAR = {"original": _nonlinear_original, "gauged": _nonlinear_gauged}


def _rhs(field_: Field, equation: Equation, dealias: bool) -> Field:
    grid = field_.grid
    mask = grid.dealias_mask if dealias else None
    spec = -1j * grid.k**2 * np.fft.fft(field_.values)
    spec = spec + _NONLINEAR[equation](grid, field_.values, mask)
    return Field(grid, np.fft.ifft(spec))


def rhs_original(u: Field, dealias: bool = True) -> Field:
    """``u_t = i u_xx + (|u|^2 u)_x``."""
    return _rhs(u, "original", dealias)


def rhs_gauged(v: Field, dealias: bool = True) -> Field:
    """``v_t = i v_xx + (1/2)|v|^2 v_x - (1/2) v^2 conj(v_x) + (3/16) i |v|^4 v``."""
    return _rhs(v, "gauged", dealias)


# --------------------------------------------------------------------------
# time stepping


class _Stepper:
    """IFRK4 in Fourier space for one equation, grid and step size."""

    def __init__(self, grid: Grid, equation: Equation, dt: float, dealias: bool = True):
        self.grid = grid
        self.dt = dt
        self._nl = _NONLINEAR[equation]
        self._mask = grid.dealias_mask if dealias else None
        self._half = np.exp(-0.5j * grid.k**2 * dt)
        self._full = self._half * self._half

    def _N(self, spec: np.ndarray) -> np.ndarray:
        return self._nl(self.grid, np.fft.ifft(spec), self._mask)

    def step_spec(self, vh: np.ndarray) -> np.ndarray:
        dt, E, E2 = self.dt, self._half, self._full
        k1 = self._N(vh)
        k2 = self._N(E * (vh + 0.5 * dt * k1))
        k3 = self._N(E * vh + 0.5 * dt * k2)
        k4 = self._N(E2 * vh + dt * E * k3)
        return E2 * vh + (dt / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4)


def step_ifrk4(state: Field, dt: float, equation: Equation, dealias: bool = True) -> Field:
    if dt <= 0:
        raise ValueError("dt must be positive")
    stepper = _Stepper(state.grid, equation, dt, dealias)
    out = np.fft.ifft(stepper.step_spec(np.fft.fft(state.values)))
    if not np.isfinite(out).all():
        raise NumericalBlowUpError(dt, last_row=diagnostics_row(state, 0.0, equation))
    return Field(state.grid, out)


def evolve(state: Field, dt: float, n_steps: int, equation: Equation, dealias: bool = True) -> Field:
    """Take ``n_steps`` fixed steps; no diagnostics."""
    stepper = _Stepper(state.grid, equation, dt, dealias)
    vh = np.fft.fft(state.values)
    for i in range(n_steps):
        with np.errstate(over="ignore", invalid="ignore"):
            vh = stepper.step_spec(vh)
        if not np.isfinite(vh).all():
            raise NumericalBlowUpError((i + 1) * dt)
    return Field(state.grid, np.fft.ifft(vh))


def reverse_in_time(f: Field) -> Field:
    """``w(x) = conj(f(-x))``; maps solutions at ``t`` to solutions at ``-t``."""
    return f.reflect().conj()


# --------------------------------------------------------------------------
# diagnostics and simulation


def diagnostics_row(state: Field, t: float, equation: Equation) -> dict:
    """One time-series row.

    Energy and momentum follow the equation's own form. The f-functional and
    the momentum-bound slack (at boost 1) always refer to the gauged field.
    Both are undefined on the zero field and recorded as NaN.
    """
    from .threshold import momentum_bound_rhs

    inv = fn.invariants(state, equation, t)
    a4 = fn.lp_norm(state, 4)
    a6 = fn.lp_norm(state, 6)
    if a6 > 0:
        f_val = fn.f_functional(state)
        v = state if equation == "gauged" else gauge_forward(state, check=False)
        slack = momentum_bound_rhs(v, 1.0).slack
    else:
        f_val = slack = float("nan")
    return {
        "t": float(t),
        "mass": inv.mass,
        "energy": inv.energy,
        "momentum": inv.momentum,
        "l2_grad": math.sqrt(fn.kinetic(state)),
        "l4": a4,
        "l6": a6,
        "f": f_val,
        "bound_residual": slack,
    }


@dataclass
class TimeSeries:
    rows: list[dict]
    config: SimConfig
    final: Field
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def drift(self) -> dict:
        if not self.rows:
            return {}
        m = self.column("mass")
        e = self.column("energy")
        p = self.column("momentum")
        m0 = m[0]
        return {
            "mass_relative": float(np.max(np.abs(m - m0)) / m0) if m0 > 0 else float(np.max(np.abs(m))),
            "energy_absolute": float(np.max(np.abs(e - e[0]))),
            "momentum_absolute": float(np.max(np.abs(p - p[0]))),
        }


Observer = Callable[[float, Field], None]


def _step_plan(t_final: float, dt: float) -> tuple[int, float]:
    """Number of steps and size of the last one (shortened if dt does not divide t_final)."""
    ratio = t_final / dt
    n = int(round(ratio))
    if n >= 1 and abs(n - ratio) <= 1e-9 * max(1.0, ratio):
        return n, dt
    n = int(math.ceil(ratio))
    return n, t_final - (n - 1) * dt


def simulate(config: SimConfig, observer: Observer | None = None, initial: Field | None = None) -> TimeSeries:
    """Integrate to ``t_final`` sampling diagnostics every ``output_every`` steps.

    The last step is always sampled. ``observer(t, field)`` is called at every
    sampled time. On blow-up, :class:`NumericalBlowUpError` carries the
    partial series.
    """
    grid = config.grid
    state = initial if initial is not None else config.initial_data.build(grid)
    n_steps, last_dt = _step_plan(config.t_final, config.dt)
    meta = {
        "grid": {"L": grid.L, "n": grid.n, "dx": grid.dx},
        "n_steps": n_steps,
        "last_dt": last_dt,
        "final_partial_interval": n_steps % config.output_every != 0 or last_dt != config.dt,
        "cfl": {"dt_over_dx": config.dt / grid.dx, "c": config.cfl_c,
                "satisfied": config.dt <= config.cfl_c * grid.dx},
        "status": "completed",
    }
    if not meta["cfl"]["satisfied"]:
        log.warning("dt=%g exceeds %g*dx=%g", config.dt, config.cfl_c, config.cfl_c * grid.dx)

    rows = [diagnostics_row(state, 0.0, config.equation)]
    if observer is not None:
        observer(0.0, state)
    stepper = _Stepper(grid, config.equation, config.dt, config.dealias)
    vh = np.fft.fft(state.values)
    for i in range(1, n_steps + 1):
        if i == n_steps and last_dt != config.dt:
            stepper = _Stepper(grid, config.equation, last_dt, config.dealias)
        with np.errstate(over="ignore", invalid="ignore"):
            vh = stepper.step_spec(vh)
        t = config.t_final if i == n_steps else i * config.dt
        if not np.isfinite(vh).all():
            meta["status"] = "blowup"
            meta["blowup_time"] = t
            partial = TimeSeries(rows, config, state, meta)
            meta["drift"] = partial.drift()
            raise NumericalBlowUpError(t, rows[-1], partial)
        if i % config.output_every == 0 or i == n_steps:
            state = Field(grid, np.fft.ifft(vh))
            rows.append(diagnostics_row(state, t, config.equation))
            if observer is not None:
                observer(t, state)
    final = Field(grid, np.fft.ifft(vh))
    series = TimeSeries(rows, config, final, meta)
    meta["drift"] = series.drift()
    return series


# --------------------------------------------------------------------------
# convergence


@dataclass
class ConvergenceReport:
    dts: list[float]
    errors: list[float]
    reference_dt: float
    slope: float | None
    status: Literal["ok", "floor_reached", "non_monotone"]

    def as_dict(self) -> dict:
        return asdict(self)


def convergence_study(
    config: SimConfig,
    dts: Sequence[float],
    reference_factor: int = 16,
    floor: float = 1e-12,
) -> ConvergenceReport:
    """Observed temporal order from successive halvings of ``dt``.

    Errors are sup-norm distances at ``t_final`` to a reference run with
    ``min(dts) / reference_factor``. Errors below ``floor`` (relative to the
    reference amplitude) mean the study hit roundoff and no slope is fitted.
    """
    dts = sorted((float(d) for d in dts), reverse=True)
    if len(dts) < 3:
        raise ValueError("need at least three step sizes")
    for coarse, fine in zip(dts, dts[1:]):
        if not math.isclose(coarse, 2 * fine, rel_tol=1e-9):
            raise ValueError("each step size must halve the previous one")
    init = config.initial_data.build(config.grid)

    def run(dt: float) -> Field:
        n, last = _step_plan(config.t_final, dt)
        if last != dt:
            raise ValueError(f"dt={dt} does not divide t_final={config.t_final}")
        return evolve(init, dt, n, config.equation, config.dealias)

    ref_dt = dts[-1] / reference_factor
    ref = run(ref_dt)
    scale = max(float(np.max(np.abs(ref.values))), np.finfo(float).tiny)
    errors = [run(dt).sup_distance(ref) for dt in dts]
    if max(errors) / scale < floor:
        return ConvergenceReport(dts, errors, ref_dt, None, "floor_reached")
    if any(e_fine >= e_coarse for e_coarse, e_fine in zip(errors, errors[1:])):
        return ConvergenceReport(dts, errors, ref_dt, None, "non_monotone")
    slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    return ConvergenceReport(dts, errors, ref_dt, slope, "ok")
