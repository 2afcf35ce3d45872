import json

import pytest

from dnls_lab.config import (
    ConfigError,
    FieldModel,
    apply_overrides,
    load_config,
    parse_override,
)


def test_defaults():
    m = load_config(None, ["equation=gauged", "initial.family=scaled_ground_state"])
    cfg = m.to_sim_config()
    assert (cfg.L, cfg.n, cfg.dt, cfg.t_final, cfg.output_every, cfg.dealias) == (40.0, 1024, 1e-3, 1.0, 10, True)


def test_override_parsing():
    assert parse_override("grid.n=2048") == (["grid", "n"], 2048)
    assert parse_override("equation=gauged") == (["equation"], "gauged")
    with pytest.raises(ConfigError):
        parse_override("no-equals")


def test_overrides_do_not_mutate_input():
    doc = {"grid": {"L": 40}}
    out = apply_overrides(doc, ["grid.L=80"])
    assert doc["grid"]["L"] == 40 and out["grid"]["L"] == 80


def test_raw_samples(tmp_path):
    p = tmp_path / "c.json"
    samples = [[0.0, 0.0]] * 1024
    p.write_text(json.dumps({"equation": "original", "initial": {"family": "raw_samples", "samples": samples}}))
    spec = load_config(p).initial.to_spec()
    assert len(spec.samples) == 1024


@pytest.mark.parametrize("doc,where", [
    ({"equation": "gauged"}, "initial"),
    ({"equation": "gauged", "initial": {"family": "gaussian", "A": 0}}, "initial"),
    ({"equation": "gauged", "initial": {"family": "gaussian"}, "grid": {"n": 1000}}, "grid"),
    ({"equation": "gauged", "initial": {"family": "gaussian"}, "amplitudes": [1.0, 0.5]}, "amplitudes"),
    ({"equation": "gauged", "initial": {"family": "gaussian", "colour": 1}}, "colour"),
])
def test_invalid_documents_name_the_key(doc, where):
    with pytest.raises(ConfigError, match=where):
        load_config(None, [f"{k}={json.dumps(v)}" for k, v in doc.items()])


def test_field_model():
    m = FieldModel.model_validate({"initial": {"family": "psi_profile"}, "grid": {"L": 200, "n": 8192}})
    assert m.grid.L == 200
