"""Experiment configuration: flat key = value text files, versioned schema.

Unknown keys, malformed values and out-of-range parameters are reported with
field-level messages.  The config hash (sha256 of the canonicalized text,
first 12 hex digits) is stamped on every emitted record.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional

SCHEMA_VERSION = 1

_MODELS = ("bilayer", "trig")
_FAMILIES = ("gaussian-scalar", "gaussian-jordan", "two-bump")
_COMMANDS = ("critical-points", "fermi", "ft-decay", "cancellation", "bs-norm",
             "eig", "verify-thm1", "verify-thm2", "schatten-sweep")


class ConfigError(ValueError):
    """Config validation failure; message carries the offending field."""


@dataclass
class ExperimentConfig:
    schema_version: int = SCHEMA_VERSION
    model: str = "bilayer"
    m: float = 0.0
    grid_n: int = 32
    grid_l: float = 16.0
    potential_family: str = "gaussian-scalar"
    potential_amplitude: complex = -0.5 + 0.0j
    potential_width: float = 2.0
    q: float = 1.5
    seed: int = 0
    # level-curve commands
    lam: float = 0.125
    step: float = 0.005
    # ft-decay
    radii_min: float = 10.0
    radii_max: float = 1024.0
    radii_count: int = 24
    n_directions: int = 128
    cutoff_center_x: Optional[float] = None
    cutoff_center_y: Optional[float] = None
    cutoff_radius: Optional[float] = None
    # cancellation
    rho_min: float = 1e-3
    rho_max: float = 1e3
    rho_count: int = 200
    # z windows / sweeps
    z_re_min: float = -0.99
    z_re_max: float = 0.99
    z_im_min: float = 0.0
    z_im_max: float = 0.0
    z_re_steps: int = 60
    z_im_steps: int = 1
    method: str = "dense"
    # verify-thm1
    dilation_lams: List[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    n_eigs: int = 3
    im_floor: float = 0.02
    # verify-thm2 sweep along z = 1/16 + t
    t_min: float = 1e-4
    t_max: float = 1e-1
    t_count: int = 13
    delta: float = 0.1
    constant_c: float = 1.0
    # schatten-sweep
    alpha: float = 3.0
    im_z_min: float = 1e-4
    im_z_max: float = 1e-1
    im_z_count: int = 13

    def canonical_text(self) -> str:
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            v = getattr(self, f.name)
            lines.append(f"{_to_key(f.name)} = {_format_value(v)}")
        return "\n".join(lines) + "\n"

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:12]


def _to_key(name: str) -> str:
    return {"lam": "lambda"}.get(name, name)


def _from_key(key: str) -> str:
    return {"lambda": "lam"}.get(key, key)


def _format_value(v) -> str:
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, list):
        return ",".join(f"{x:.17g}" for x in v)
    if v is None:
        return "none"
    return str(v)


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def parse_config(text: str) -> ExperimentConfig:
    """Parse key = value lines ('#' comments allowed) into a config."""
    cfg = ExperimentConfig()
    typemap = {f.name: f for f in fields(cfg)}
    seen: Dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        name = _from_key(key)
        if name not in typemap:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if name in seen:
            raise ConfigError(f"line {ln}: duplicate key {key!r}")
        seen[name] = val
        try:
            setattr(cfg, name, _convert(name, val, getattr(cfg, name)))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"field {key!r}: cannot parse {val!r} ({exc})") from exc
    validate_config(cfg)
    return cfg


def _convert(name: str, val: str, default):
    if val.lower() == "none":
        return None
    if name == "dilation_lams":
        return [float(x) for x in val.split(",") if x.strip()]
    if name == "potential_amplitude":
        return _parse_complex(val)
    if isinstance(default, bool):
        return val.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(val)
    if isinstance(default, float):
        return float(val)
    if isinstance(default, complex):
        return _parse_complex(val)
    if default is None:
        return float(val)
    return val


def validate_config(cfg: ExperimentConfig) -> None:
    if cfg.schema_version != SCHEMA_VERSION:
        raise ConfigError(f"field 'schema_version': expected {SCHEMA_VERSION}, "
                          f"got {cfg.schema_version}")
    if cfg.model not in _MODELS:
        raise ConfigError(f"field 'model': {cfg.model!r} not in {_MODELS}")
    if cfg.potential_family not in _FAMILIES:
        raise ConfigError(f"field 'potential_family': {cfg.potential_family!r} "
                          f"not in {_FAMILIES}")
    if cfg.m < 0:
        raise ConfigError(f"field 'm': mass must be >= 0, got {cfg.m}")
    if cfg.grid_n not in (16, 32, 64, 128, 256):
        raise ConfigError(f"field 'grid_n': must be a power of two in 16..256, "
                          f"got {cfg.grid_n}")
    if not (4.0 <= cfg.grid_l <= 64.0):
        raise ConfigError(f"field 'grid_l': must lie in [4, 64], got {cfg.grid_l}")
    if not (1.0 <= cfg.q <= 2.0):
        raise ConfigError(f"field 'q': must lie in [1, 2], got {cfg.q}")
    if cfg.potential_width <= 0:
        raise ConfigError(f"field 'potential_width': must be positive, "
                          f"got {cfg.potential_width}")
    if not (0.0 < cfg.step <= 0.05):
        raise ConfigError(f"field 'step': must lie in (0, 0.05], got {cfg.step}")
    if cfg.lam <= 0:
        raise ConfigError(f"field 'lambda': must be positive, got {cfg.lam}")
    if cfg.method not in ("dense", "bs-scan", "both"):
        raise ConfigError(f"field 'method': {cfg.method!r} not in "
                          f"('dense', 'bs-scan', 'both')")
    if not (0.0 < cfg.delta <= 0.2):
        raise ConfigError(f"field 'delta': must lie in (0, 0.2], got {cfg.delta}")
    if cfg.radii_count < 2 or cfg.rho_count < 1 or cfg.t_count < 2:
        raise ConfigError("fields 'radii_count'/'rho_count'/'t_count': too few points")
    if cfg.alpha < 1.0:
        raise ConfigError(f"field 'alpha': must be >= 1, got {cfg.alpha}")


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def known_commands() -> tuple:
    return _COMMANDS
