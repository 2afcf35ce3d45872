"""JSON run configuration with strict validation.

A simulation document needs ``equation`` and ``initial``; everything else
has a documented default (``grid.L = 40``, ``grid.n = 1024``,
``dt = 1e-3``, ``t_final = 1``, ``output_every = 10``, ``dealias = true``).
Unknown keys are errors.

Example::

    {"equation": "gauged",
     "initial": {"family": "scaled_ground_state", "a": 1}}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field as PydField, ValidationError, field_validator, model_validator

from .evolution import InitialDataSpec, SimConfig
from .spectral import GridError, make_grid


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridModel(_Strict):
    L: float = 40.0
    n: int = 1024

    @model_validator(mode="after")
    def _grid_rules(self):
        try:
            make_grid(self.L, self.n)
        except GridError as exc:
            raise ValueError(str(exc)) from None
        return self


class InitialModel(_Strict):
    family: Literal["scaled_ground_state", "gaussian", "psi_profile", "raw_samples"]
    a: float = 1.0
    A: float = 1.0
    sigma: float = PydField(1.0, gt=0)
    c: float = 0.0
    samples: Optional[list[tuple[float, float]]] = None

    @model_validator(mode="after")
    def _nonzero(self):
        amp = self.A if self.family == "gaussian" else self.a
        if self.family != "raw_samples" and amp == 0:
            raise ValueError("zero initial data has no diagnostics")
        if self.family == "raw_samples" and not self.samples:
            raise ValueError("raw_samples needs a non-empty samples list of [re, im] pairs")
        return self

    def to_spec(self) -> InitialDataSpec:
        samples = None
        if self.samples is not None:
            samples = tuple(complex(re, im) for re, im in self.samples)
        return InitialDataSpec(self.family, self.a, self.A, self.sigma, self.c, samples)


class SimModel(_Strict):
    equation: Literal["original", "gauged"]
    initial: InitialModel
    grid: GridModel = GridModel()
    t_final: float = PydField(1.0, gt=0)
    dt: float = PydField(1e-3, gt=0)
    output_every: int = PydField(10, ge=1)
    dealias: bool = True
    # sweep
    amplitudes: Optional[list[float]] = None
    workers: int = PydField(4, ge=1)
    # convergence
    dts: Optional[list[float]] = None
    reference_factor: int = PydField(16, ge=2)

    @field_validator("amplitudes")
    @classmethod
    def _sorted(cls, v):
        if v is not None and list(v) != sorted(v):
            raise ValueError("amplitudes must be sorted ascending")
        if v is not None and any(a == 0 for a in v):
            raise ValueError("zero initial data has no diagnostics")
        return v

    def to_sim_config(self) -> SimConfig:
        return SimConfig(
            equation=self.equation,
            initial_data=self.initial.to_spec(),
            L=self.grid.L,
            n=self.grid.n,
            t_final=self.t_final,
            dt=self.dt,
            output_every=self.output_every,
            dealias=self.dealias,
        )


class FieldModel(_Strict):
    """Field selection for the analysis commands."""

    initial: InitialModel
    grid: GridModel = GridModel()
    random_fields: int = PydField(0, ge=0)


def parse_override(item: str) -> tuple[list[str], object]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    doc = json.loads(json.dumps(doc))
    for item in overrides:
        path, value = parse_override(item)
        node = doc
        for part in path[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r} descends into a non-object")
        node[path[-1]] = value
    return doc


def read_document(path: str | Path | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    return doc


def _describe(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def validate(model: type[BaseModel], doc: dict):
    try:
        return model.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {_describe(exc)}") from None


def load_config(path: str | Path | None, overrides: list[str] | None = None, model: type[BaseModel] = SimModel):
    """Read, override and validate a configuration document."""
    doc = apply_overrides(read_document(path), overrides or [])
    return validate(model, doc)
