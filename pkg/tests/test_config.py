from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampletheta.config import (
    SUITES,
    Budgets,
    ConfigError,
    Tolerances,
    defaults,
    load_config,
    loads,
)


def test_minimal_config_fills_defaults():
    cfg = loads('suite = "star"\ng = 3\n')
    assert cfg.suite == "star" and cfg.model.g == 3
    assert cfg.model.d == 5 and cfg.tolerances.delta_coll == 1e-8
    assert len(cfg.model.tau_dprime) == 2 and len(cfg.model.tau_prime_offdiag) == 1


def test_sectioned_keys():
    cfg = loads("seed = 4\n[model]\ng = 2\nd = 3\n[tolerances]\ndelta_bpf = 1e-5\n")
    assert (cfg.seed, cfg.model.d, cfg.tolerances.delta_bpf) == (4, 3, 1e-5)


@pytest.mark.parametrize("text,key", [
    ("delta_coll = -1", "delta_coll"),
    ("[tolerances]\ndelta_coll = -1", "delta_coll"),
    ("tol = 0", "tol"),
    ("g = 0", "g"),
    ("d = 0", "d"),
    ("seed = -1", "seed"),
    ("restarts = 0", "restarts"),
    ("g = 2\ntau_dprime = [[0.1, 0.2], [0.3, 0.4]]", "tau_dprime"),
    ("tau_g = [0.1, -1.0]", "tau_g"),
    ("t_scales = [2.0]", "t_scales"),
    ("g = 1.5", "g"),
    ("tau_g = 3", "tau_g"),
])
def test_validation_names_key(text, key):
    with pytest.raises(ConfigError) as info:
        loads(text)
    assert info.value.key == key
    assert key in str(info.value)


def test_unknown_and_misplaced_keys():
    with pytest.raises(ConfigError) as info:
        loads("gg = 3")
    assert info.value.key == "gg"
    with pytest.raises(ConfigError) as info:
        loads("[model]\ndelta_bpf = 1e-6")
    assert info.value.key == "model.delta_bpf"
    with pytest.raises(ConfigError):
        loads("[model]\nfoo = 1")
    with pytest.raises(ConfigError):
        loads("g = 2\n[model]\ng = 3")


def test_parse_error_has_position(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('suite = "bpf"\ng = = 3\n')
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.line == 2 and info.value.column is not None


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/cfg.toml")


def test_defaults_roundtrip():
    cfg = defaults()
    assert loads(cfg.to_toml()) == cfg


positive = st.floats(1e-15, 1e3, allow_nan=False, allow_infinity=False)
pair = st.tuples(st.floats(-2, 2), st.floats(-2, 2)).map(list)


@st.composite
def configs(draw):
    g = draw(st.integers(1, 4))
    tol = {f.name: draw(positive) for f in dataclasses.fields(Tolerances)}
    bud = {f.name: draw(st.integers(1, 10 ** 6)) for f in dataclasses.fields(Budgets)}
    raw = {
        "suite": draw(st.sampled_from(SUITES)),
        "seed": draw(st.integers(0, 2 ** 64 - 1)),
        "model": {"g": g, "d": draw(st.integers(1, 20)),
                  "tau_g": [draw(st.floats(-1, 1)), draw(st.floats(0.1, 3))],
                  "tau_dprime": [draw(pair) for _ in range(g - 1)],
                  "tau_prime_offdiag": [draw(pair) for _ in range((g - 1) * (g - 2) // 2)]},
        "tolerances": tol,
        "budgets": bud,
    }
    return raw


@settings(max_examples=60, deadline=None)
@given(configs())
def test_roundtrip_property(raw):
    import tomli_w

    cfg = loads(tomli_w.dumps(raw))
    again = loads(cfg.to_toml())
    assert again == cfg
    assert again.to_dict() == cfg.to_dict()


def test_with_seed_validates():
    with pytest.raises(ConfigError):
        defaults().with_seed(2 ** 64)
    assert defaults().with_seed(7).seed == 7
