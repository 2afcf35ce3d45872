"""``dnls-lab`` command line.

Exit status: 0 success, 1 numerical failure (blow-up, non-convergence;
partial outputs are still written), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import functionals as fn
from . import io
from .config import ConfigError, FieldModel, SimModel, apply_overrides, read_document, validate
from .evolution import NumericalBlowUpError, convergence_study, simulate
from .gauge import BoundaryContaminationError, correspondence_check, gauge_forward, gauge_inverse, ux_from_v
from .random_fields import random_suite
from .spectral import Field, make_grid, spectral_derivative
from .sweep import mass_sweep
from .threshold import (
    RegimeError,
    cubic_analyze,
    fn_bounds,
    momentum_bound_rhs,
    optimal_alpha,
    threshold_constant,
)
from .variational import (
    BoxTooSmallError,
    DegenerateFieldError,
    PSI_GRID,
    SharpConstantConvergenceError,
    elliptic_residual,
    gn1_check,
    gn2_check,
    ground_state_Q,
    maximize_weinstein,
    psi_optimizer,
)

FIELD_PRESETS = {
    "Q": {"initial": {"family": "scaled_ground_state", "a": 1.0}},
    "psi": {"initial": {"family": "psi_profile", "a": 1.0}, "grid": {"L": PSI_GRID[0], "n": PSI_GRID[1]}},
    "gaussian": {"initial": {"family": "gaussian", "A": 1.0, "sigma": math.sqrt(2.0)}},
}


class NumericalFailure(RuntimeError):
    pass


class Run:
    """Output bookkeeping for one command invocation."""

    def __init__(self, args, echo: dict):
        self.command = args.command
        self.out = Path(args.output_dir)
        self.seed = args.seed
        self.files: list[str] = []
        self.grid = None
        self.write("config_echo.json", {"command": self.command, "seed": self.seed, "config": echo})

    def write(self, name: str, obj) -> None:
        io.write_json(obj, self.out / name)
        self.files.append(name)

    def add(self, paths) -> None:
        self.files.extend(str(Path(p).relative_to(self.out)) for p in paths)

    def finish(self, extra: dict | None = None) -> None:
        self.files.append("manifest.json")
        io.write_json(io.manifest(self.command, self.files, self.grid, self.seed, extra), self.out / "manifest.json")


# --------------------------------------------------------------------------
# document assembly


def _sim_doc(args, require_config: bool = True) -> dict:
    if args.config is None and require_config:
        raise ConfigError(f"{args.command} needs --config PATH")
    return apply_overrides(read_document(args.config), args.set)


def _field_doc(args) -> dict:
    if args.config is not None:
        doc = read_document(args.config)
    elif getattr(args, "field", None) is not None:
        doc = FIELD_PRESETS[args.field]
    else:
        raise ConfigError(f"{args.command} needs --field or --config")
    doc = apply_overrides(doc, args.set)
    if getattr(args, "random", None):
        doc["random_fields"] = args.random
    return doc


def _build_fields(model: FieldModel, seed: int) -> tuple[Field, list[Field]]:
    grid = make_grid(model.grid.L, model.grid.n)
    main = model.initial.to_spec().build(grid)
    extra = random_suite(grid, model.random_fields, seed) if model.random_fields else []
    return main, extra


# --------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> dict:
    model = validate(SimModel, _sim_doc(args))
    run = Run(args, model.model_dump())
    config = model.to_sim_config()
    run.grid = config.grid
    try:
        series = simulate(config)
    except NumericalBlowUpError as exc:
        if exc.partial is not None:
            run.add(io.write_timeseries(exc.partial, run.out))
        run.finish({"status": "blowup", "blowup_time": exc.t})
        raise NumericalFailure(str(exc)) from exc
    run.add(io.write_timeseries(series, run.out))
    report = {"status": "completed", "drift": series.drift(), "final_row": series.rows[-1],
              "metadata": series.metadata}
    run.write("report.json", report)
    run.finish({"status": "completed"})
    return report


def cmd_sweep(args) -> dict:
    doc = _sim_doc(args)
    if args.amplitudes:
        doc["amplitudes"] = [float(a) for a in args.amplitudes.split(",")]
    model = validate(SimModel, doc)
    if not model.amplitudes:
        raise ConfigError("sweep needs amplitudes (config key 'amplitudes' or --amplitudes)")
    run = Run(args, model.model_dump())
    base = model.to_sim_config()
    run.grid = base.grid
    report = mass_sweep(base, model.amplitudes, workers=model.workers)
    for summary in report.runs:
        sub = Path(f"run_a={summary.amplitude:.12g}")
        series = report.series.get(summary.amplitude)
        sub_files = []
        if series is not None:
            paths = io.write_timeseries(series, run.out / sub)
            run.add(paths)
            sub_files = [Path(p).name for p in paths]
        sub_manifest = io.manifest("sweep-run", sub_files + ["manifest.json"], base.grid,
                                   extra={"run": summary.manifest, "status": summary.status})
        run.write(str(sub / "manifest.json"), sub_manifest)
    out = report.as_dict()
    run.write("sweep_summary.json", out)
    run.finish()
    return out


def cmd_convergence(args) -> dict:
    doc = _sim_doc(args)
    if args.dts:
        doc["dts"] = [float(d) for d in args.dts.split(",")]
    model = validate(SimModel, doc)
    run = Run(args, model.model_dump())
    config = model.to_sim_config()
    run.grid = config.grid
    dts = model.dts or [4e-3, 2e-3, 1e-3]
    try:
        result = convergence_study(config, dts, reference_factor=model.reference_factor)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = result.as_dict()
    run.write("report.json", out)
    run.finish({"status": result.status})
    if result.status == "non_monotone":
        raise NumericalFailure(f"non-monotone error sequence {result.errors}")
    return out


def _invariant_report(f: Field) -> dict:
    out = {
        "mass": fn.mass(f),
        "original": fn.invariants(f, "original").as_dict(),
        "gauged": fn.invariants(f, "gauged").as_dict(),
        "l2": fn.lp_norm(f, 2),
        "l4": fn.lp_norm(f, 4),
        "l6": fn.lp_norm(f, 6),
        "l2_grad": math.sqrt(fn.kinetic(f)),
        "h1_equivalence_constant": fn.h1_equivalence_constant(fn.mass(f)),
    }
    if out["l6"] > 0:
        E0 = fn.energy_gauged(f)
        lower, value, upper = fn_bounds(f)
        out["f"] = value
        out["f_bounds"] = {"lower": lower, "upper": upper}
        out["quartic_identity_residual"] = fn.check_quartic_identity(f, E0)
        out["bound_alpha_1"] = momentum_bound_rhs(f, 1.0).as_dict()
        try:
            alpha = optimal_alpha(f)
            if alpha > 0:
                out["bound_alpha_optimal"] = momentum_bound_rhs(f, alpha).as_dict()
        except RegimeError:
            pass
    return out


def cmd_invariants(args) -> dict:
    model = validate(FieldModel, _field_doc(args))
    run = Run(args, model.model_dump())
    main, extra = _build_fields(model, args.seed)
    run.grid = main.grid
    out = {"field": _invariant_report(main)}
    if extra:
        out["random"] = [_invariant_report(f) for f in extra]
    run.write("report.json", out)
    run.finish()
    return out


def _gauge_report(u: Field) -> dict:
    dE, dP = correspondence_check(u)
    v = gauge_forward(u)
    u_back = gauge_inverse(v)
    agreement = ux_from_v(v).sup_distance(spectral_derivative(u_back))
    return {
        "energy_residual": dE,
        "momentum_residual": dP,
        "mass_residual": fn.mass(v) - fn.mass(u),
        "round_trip_sup": u_back.sup_distance(u),
        "ux_agreement_sup": agreement,
    }


def cmd_gauge_check(args) -> dict:
    model = validate(FieldModel, _field_doc(args))
    run = Run(args, model.model_dump())
    main, extra = _build_fields(model, args.seed)
    run.grid = main.grid
    out = {"field": _gauge_report(main)}
    if extra:
        reps = [_gauge_report(f) for f in extra]
        out["random"] = {
            "count": len(reps),
            "max_abs_energy_residual": max(abs(r["energy_residual"]) for r in reps),
            "max_abs_momentum_residual": max(abs(r["momentum_residual"]) for r in reps),
            "max_round_trip_sup": max(r["round_trip_sup"] for r in reps),
        }
    run.write("report.json", out)
    run.finish()
    return out


def cmd_ground_state(args) -> dict:
    grid = make_grid(args.L, args.n)
    run = Run(args, {"L": args.L, "n": args.n})
    run.grid = grid
    Q = ground_state_Q(grid)
    Qn = ground_state_Q(grid, method="numerical")
    psi = psi_optimizer()
    x0 = grid.n // 2
    out = {
        "Q": {
            "Q0": float(Q.values[x0].real),
            "mass": fn.mass(Q),
            "energy_gauged": fn.energy_gauged(Q),
            "momentum_gauged": fn.momentum_gauged(Q),
            "f": fn.f_functional(Q),
            "elliptic_residual": elliptic_residual(Q, "dnls_ground_state"),
            "numerical_route_sup_difference": Q.sup_distance(Qn),
            "gn1": gn1_check(Q, "Q").as_dict(),
        },
        "psi": {
            "grid": io.grid_metadata(psi.grid),
            "psi0": float(psi.values[psi.grid.n // 2].real),
            "l4_4": fn.lp_norm(psi, 4) ** 4,
            "l6_6": fn.lp_norm(psi, 6) ** 6,
            "grad_2": fn.kinetic(psi),
            "elliptic_residual_central_half": elliptic_residual(math.sqrt(2.0) * psi, "quartic_quintic", window=0.5),
            "gn2": gn2_check(psi, "psi").as_dict(),
        },
    }
    run.write("report.json", out)
    run.finish()
    return out


def cmd_gn_verify(args) -> dict:
    model = validate(FieldModel, _field_doc(args))
    run = Run(args, model.model_dump())
    main, extra = _build_fields(model, args.seed)
    run.grid = main.grid
    label = args.field or "config"
    out = {"field": {"gn1": gn1_check(main, label).as_dict(), "gn2": gn2_check(main, label).as_dict()}}
    if extra:
        r1 = [gn1_check(f, f"random_{i}").ratio for i, f in enumerate(extra)]
        r2 = [gn2_check(f, f"random_{i}").ratio for i, f in enumerate(extra)]
        out["random"] = {"count": len(extra), "max_gn1_ratio": max(r1), "max_gn2_ratio": max(r2)}
    if args.estimate:
        try:
            est = {k: maximize_weinstein(k) for k in ("gn1", "gn2")}
        except SharpConstantConvergenceError as exc:
            run.write("report.json", out)
            run.finish({"status": "non_convergence"})
            raise NumericalFailure(str(exc)) from exc
        out["estimates"] = {
            k: {"constant": e.constant, "parametric_constant": e.parametric_constant,
                "shape_a": e.shape_a, "shape_p": e.shape_p, "refine_iterations": e.refine_iterations}
            for k, e in est.items()
        }
    run.write("report.json", out)
    run.finish()
    return out


def cmd_cubic(args) -> dict:
    run = Run(args, {"m0": args.m0, "epsilon": args.epsilon})
    try:
        report = cubic_analyze(args.m0, args.epsilon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = report.as_dict()
    out["threshold_mass"] = threshold_constant()
    run.write("report.json", out)
    run.finish()
    return out


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnls-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key, dotted for nesting (repeatable)")
        p.add_argument("--output-dir", default="dnls_output", help="directory for outputs")
        p.add_argument("--seed", type=int, default=0, help="seed for random-field suites")
        return p

    add("simulate", cmd_simulate, "integrate DNLS or its gauged form")
    p = add("sweep", cmd_sweep, "mass sweep over a*Q with bound checks")
    p.add_argument("--amplitudes", help="comma-separated, ascending")
    p = add("convergence", cmd_convergence, "temporal convergence order")
    p.add_argument("--dts", help="comma-separated step sizes, each half the previous")
    for name, func, help_ in (
        ("invariants", cmd_invariants, "conserved functionals and bound diagnostics of a field"),
        ("gauge-check", cmd_gauge_check, "gauge transform correspondences"),
        ("gn-verify", cmd_gn_verify, "Gagliardo-Nirenberg ratios"),
    ):
        p = add(name, func, help_)
        p.add_argument("--field", choices=sorted(FIELD_PRESETS))
        p.add_argument("--random", type=int, default=0, metavar="N", help="also check N seeded random fields")
        if name == "gn-verify":
            p.add_argument("--estimate", action="store_true", help="also estimate both sharp constants")
    p = add("ground-state", cmd_ground_state, "certify Q and Psi")
    p.add_argument("--L", type=float, default=40.0)
    p.add_argument("--n", type=int, default=1024)
    p = add("cubic", cmd_cubic, "cubic threshold analysis")
    p.add_argument("--m0", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.0)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except (ConfigError, BoundaryContaminationError, BoxTooSmallError, DegenerateFieldError,
            fn.UndefinedDiagnosticError) as exc:
        print(f"dnls-lab {args.command}: error: {exc}", file=sys.stderr)
        if isinstance(exc, ConfigError):
            parser.print_usage(sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"dnls-lab {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(io.dumps(out))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
