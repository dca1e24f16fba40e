"""Strict TOML configuration for verification runs.

Layout::

    suite = "bpf"
    seed = 1

    [model]        g, d, tau_g, tau_dprime, tau_prime_offdiag, n_rel
    [tolerances]   tol, tol_rel, delta_bpf, delta_coll, ...
    [budgets]      samples, restarts, iterations, ...
    [theta]        test matrices and sweeps for the theta-level suites

Complex numbers are written as ``[re, im]`` pairs.  Every key may also be
given at top level (``g = 3`` instead of ``[model] g = 3``); unknown keys,
keys in the wrong section and keys given twice are errors.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomli
import tomli_w

SUITES = ("lattice-exact", "theta-identities", "factorization", "limit", "gluing", "bpf",
          "product-bpf", "independence", "injectivity", "immersion", "divisibility", "full")

SEED_MAX = 2 ** 64 - 1


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None,
                 column: int | None = None):
        super().__init__(message)
        self.key = key
        self.line = line
        self.column = column


# Default translation data per genus.  Beyond g = 3 the entries are spread
# irrationally so that no small integer relation holds between them.
_DEFAULT_DPRIME = {1: [], 2: [[0.21, 0.38]], 3: [[0.21, 0.38], [0.13, 0.59]]}
_DEFAULT_OFFDIAG = {1: [], 2: [], 3: [[0.31, 0.27]]}


def default_tau_dprime(g: int) -> list[list[float]]:
    if g in _DEFAULT_DPRIME:
        return [list(v) for v in _DEFAULT_DPRIME[g]]
    golden = (math.sqrt(5) - 1) / 2
    return [[round((0.21 + i * golden) % 1, 6), round(0.38 + ((i * math.sqrt(2)) % 1) * 0.4, 6)]
            for i in range(g - 1)]


def default_tau_prime_offdiag(g: int) -> list[list[float]]:
    if g in _DEFAULT_OFFDIAG:
        return [list(v) for v in _DEFAULT_OFFDIAG[g]]
    n = (g - 1) * (g - 2) // 2
    return [[round((0.31 + i * math.sqrt(3)) % 1 * 0.5, 6), round(0.1 + ((i * math.sqrt(7)) % 1) * 0.2, 6)]
            for i in range(n)]


@dataclass
class ModelConfig:
    g: int = 2
    d: int = 5
    tau_g: list[float] = field(default_factory=lambda: [0.4, 1.1])
    tau_dprime: list[list[float]] | None = None
    tau_prime_offdiag: list[list[float]] | None = None
    n_rel: int = 8


@dataclass
class Tolerances:
    tol: float = 1e-12
    tol_rel: float = 1e-8
    delta_bpf: float = 1e-6
    delta_coll: float = 1e-8
    sep_floor: float = 1e-3
    zero_tol: float = 1e-8
    identity: float = 1e-9
    factorization: float = 1e-8
    limit: float = 1e-6
    gluing: float = 1e-9
    singular_ratio: float = 1e-7


@dataclass
class Budgets:
    samples: int = 2048
    restarts: int = 10_000
    iterations: int = 40
    structured: int = 200
    refine_starts: int = 6
    refine_iterations: int = 400
    product_samples: int = 4096
    product_refine_starts: int = 8
    product_iterations: int = 2000
    points_per_stratum: int = 20
    random_inputs: int = 100
    subsets: int = 100
    gluing_points: int = 200
    limit_samples: int = 20
    factorization_points: int = 5
    box: int = 6
    g_max: int = 6
    lattice_bound: int = 3
    involution_g_max: int = 8


@dataclass
class ThetaConfig:
    # upper triangle, row-major; empty means the built-in instance for g
    factorization_tau: list[list[float]] = field(default_factory=list)
    t_scales: list[float] = field(default_factory=lambda: [1e-2, 1e-4])
    product_taus: list[list[float]] = field(
        default_factory=lambda: [[0.3, 1.0], [-0.2, 0.9], [0.1, 1.3]])
    identity_g_max: int = 3
    identity_d_max: int = 6
    identity_min_eig: float = 0.5


@dataclass
class SuiteConfig:
    suite: str = "full"
    seed: int = 0
    model: ModelConfig = field(default_factory=ModelConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    budgets: Budgets = field(default_factory=Budgets)
    theta: ThetaConfig = field(default_factory=ThetaConfig)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_toml(self) -> str:
        return tomli_w.dumps(_strip_none(self.to_dict()))

    def with_seed(self, seed: int) -> SuiteConfig:
        out = dataclasses.replace(self, seed=int(seed))
        _validate(out)
        return out


_SECTIONS = {"model": ModelConfig, "tolerances": Tolerances, "budgets": Budgets,
             "theta": ThetaConfig}
_OWNER = {f.name: sec for sec, cls in _SECTIONS.items() for f in dataclasses.fields(cls)}


def _strip_none(d):
    if isinstance(d, dict):
        return {k: _strip_none(v) for k, v in d.items() if v is not None}
    return d


def _is_pair(v) -> bool:
    return (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v))


def _coerce(key: str, value, default):
    """Check ``value`` against the type of the field default."""
    if isinstance(default, bool):
        raise AssertionError("no boolean fields")
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}", key)
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}", key)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}", key)
        return value
    raise AssertionError(key)


_PAIR_KEYS = {"tau_g"}
_PAIR_LIST_KEYS = {"tau_dprime", "tau_prime_offdiag", "factorization_tau", "product_taus"}
_FLOAT_LIST_KEYS = {"t_scales"}


def _coerce_field(key: str, value, default):
    if key in _PAIR_KEYS:
        if not _is_pair(value):
            raise ConfigError(f"{key} must be a [re, im] pair", key)
        return [float(x) for x in value]
    if key in _PAIR_LIST_KEYS:
        if not isinstance(value, list) or not all(_is_pair(v) for v in value):
            raise ConfigError(f"{key} must be a list of [re, im] pairs", key)
        return [[float(x) for x in v] for v in value]
    if key in _FLOAT_LIST_KEYS:
        if not isinstance(value, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
            raise ConfigError(f"{key} must be a list of numbers", key)
        return [float(x) for x in value]
    return _coerce(key, value, default)


def from_dict(raw: dict[str, Any]) -> SuiteConfig:
    """Validate a parsed mapping and fill in defaults."""
    flat: dict[str, dict[str, Any]] = {sec: {} for sec in _SECTIONS}
    top: dict[str, Any] = {}
    for key, value in raw.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"[{key}] must be a table", key)
            for sub, v in value.items():
                if sub not in _OWNER:
                    raise ConfigError(f"unknown key {key}.{sub}", f"{key}.{sub}")
                if _OWNER[sub] != key:
                    raise ConfigError(f"{sub} belongs in [{_OWNER[sub]}], not [{key}]",
                                      f"{key}.{sub}")
                if sub in flat[key]:
                    raise ConfigError(f"{sub} given twice", sub)
                flat[key][sub] = v
        elif key in ("suite", "seed"):
            top[key] = value
        elif key in _OWNER:
            sec = _OWNER[key]
            if key in flat[sec]:
                raise ConfigError(f"{key} given both at top level and in [{sec}]", key)
            flat[sec][key] = value
        else:
            raise ConfigError(f"unknown key {key}", key)
    sections = {}
    for sec, cls in _SECTIONS.items():
        inst = cls()
        for key, value in flat[sec].items():
            default = getattr(inst, key)
            if default is None:
                default = [] if key in _PAIR_LIST_KEYS else None
            setattr(inst, key, _coerce_field(key, value, default))
        sections[sec] = inst
    cfg = SuiteConfig(**sections)
    if "suite" in top:
        cfg.suite = _coerce("suite", top["suite"], "")
    if "seed" in top:
        cfg.seed = _coerce("seed", top["seed"], 0)
    m = cfg.model
    if m.tau_dprime is None and isinstance(m.g, int) and m.g >= 1:
        m.tau_dprime = default_tau_dprime(m.g)
    if m.tau_prime_offdiag is None and isinstance(m.g, int) and m.g >= 1:
        m.tau_prime_offdiag = default_tau_prime_offdiag(m.g)
    _validate(cfg)
    return cfg


def _validate(cfg: SuiteConfig) -> None:
    if not 0 <= cfg.seed <= SEED_MAX:
        raise ConfigError("seed must be a 64-bit unsigned integer", "seed")
    m = cfg.model
    if m.g < 1:
        raise ConfigError("g must be >= 1", "g")
    if m.d < 1:
        raise ConfigError("d must be >= 1", "d")
    if m.tau_g[1] <= 0:
        raise ConfigError("tau_g must have positive imaginary part", "tau_g")
    if len(m.tau_dprime) != m.g - 1:
        raise ConfigError(f"tau_dprime needs {m.g - 1} entries", "tau_dprime")
    if len(m.tau_prime_offdiag) != (m.g - 1) * (m.g - 2) // 2:
        raise ConfigError(f"tau_prime_offdiag needs {(m.g - 1) * (m.g - 2) // 2} entries",
                          "tau_prime_offdiag")
    if m.n_rel < 1:
        raise ConfigError("n_rel must be >= 1", "n_rel")
    for f in dataclasses.fields(Tolerances):
        v = getattr(cfg.tolerances, f.name)
        if not (v > 0 and math.isfinite(v)):
            raise ConfigError(f"{f.name} must be positive, got {v}", f.name)
    for f in dataclasses.fields(Budgets):
        v = getattr(cfg.budgets, f.name)
        if v < 1:
            raise ConfigError(f"{f.name} must be >= 1, got {v}", f.name)
    th = cfg.theta
    if any(not 0 < s < 1 for s in th.t_scales) or not th.t_scales:
        raise ConfigError("t_scales must be a nonempty list in (0, 1)", "t_scales")
    if any(p[1] <= 0 for p in th.product_taus):
        raise ConfigError("product_taus must lie in the upper half-plane", "product_taus")
    if th.factorization_tau and len(th.factorization_tau) != m.g * (m.g + 1) // 2:
        raise ConfigError(f"factorization_tau needs {m.g * (m.g + 1) // 2} entries",
                          "factorization_tau")
    if th.identity_g_max < 1 or th.identity_d_max < 1:
        raise ConfigError("identity_g_max and identity_d_max must be >= 1", "identity_g_max")
    if not th.identity_min_eig > 0:
        raise ConfigError("identity_min_eig must be positive", "identity_min_eig")


def loads(text: str) -> SuiteConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}", line=getattr(exc, "lineno", None),
                          column=getattr(exc, "colno", None)) from None
    return from_dict(raw)


def load_config(path: str | Path) -> SuiteConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return loads(text)


def defaults() -> SuiteConfig:
    return from_dict({})
