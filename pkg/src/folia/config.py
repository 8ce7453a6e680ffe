"""Run configuration: embedded defaults, JSON file overrides, flag overrides."""
from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError

log = logging.getLogger(__name__)

TOLERANCE_FIELDS = (
    "det_tol", "class_tol", "rel_tol", "prox_tol", "conv_tol", "const_tol", "sup_tol", "tail_tol",
)


@dataclass(frozen=True)
class Config:
    det_tol: float = 1e-12
    class_tol: float = 1e-9
    rel_tol: float = 1e-9
    prox_tol: float = 1e-6
    conv_tol: float = 1e-6
    const_tol: float = 1e-10
    sup_tol: float = 1e-6
    tail_tol: float = 1e-8
    comp_bound: float = 1e3
    seed: int = 20240601
    radius: int = 3
    samples: int = 10_000
    leaf_samples: int = 12
    t_zero_leaves: int = 4
    grid_size: int = 21
    grid_radius: float = 0.7
    dbar_step: float = 1e-4
    laplacian_step: float = 1e-3
    degree: int = 64
    probe_samples: int = 1000
    probe_iterations: int = 200
    orbit_bound: int = 1000
    orbit_terms: int = 40
    leaf_grid_size: int = 129
    leaf_fiber: tuple = (1.0, 0.0, 0.0, 0.0, 1.0)
    pgm_mode: str = "abs"
    out_dir: Optional[str] = None

    def to_json(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["leaf_fiber"] = list(self.leaf_fiber)
        return doc

    def validate(self, source: str = "<config>") -> "Config":
        for name in TOLERANCE_FIELDS + ("comp_bound", "dbar_step", "laplacian_step", "grid_radius"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{source}: field '{name}': must be positive")
        if not 0 <= self.radius <= 12:
            raise ConfigError(f"{source}: field 'radius': must lie in [0, 12]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"{source}: field 'seed': must be a 64-bit unsigned integer")
        for name in ("samples", "leaf_samples", "grid_size", "degree", "probe_samples",
                     "probe_iterations", "orbit_bound", "orbit_terms", "leaf_grid_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{source}: field '{name}': must be a positive integer")
        if self.leaf_samples < 2:
            raise ConfigError(f"{source}: field 'leaf_samples': need at least 2")
        if len(self.leaf_fiber) != 5:
            raise ConfigError(f"{source}: field 'leaf_fiber': expected [re z1, im z1, re z2, im z2, t]")
        if self.pgm_mode not in ("abs", "arg"):
            raise ConfigError(f"{source}: field 'pgm_mode': expected 'abs' or 'arg'")
        return self


def _coerce(name: str, value: Any, default: Any, source: str) -> Any:
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, tuple):
        ok = isinstance(value, list) and all(isinstance(v, (int, float)) for v in value)
        value = tuple(float(v) for v in value) if ok else value
    elif isinstance(default, str):
        ok = isinstance(value, str)
    else:  # Optional[str]
        ok = value is None or isinstance(value, str)
    if not ok:
        raise ConfigError(f"{source}: field '{name}': unexpected value {value!r}")
    return value


def from_mapping(doc: dict, source: str = "<config>") -> Config:
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    known = {f.name: f.default for f in fields(Config)}
    kwargs = {}
    for key, value in doc.items():
        if key not in known:
            log.warning("%s: ignoring unknown field %r", source, key)
            continue
        kwargs[key] = _coerce(key, value, known[key], source)
    return Config(**kwargs).validate(source)


def load_config(path: Optional[Path], overrides: Optional[dict] = None) -> Config:
    doc: dict = {}
    source = "<defaults>"
    if path is not None:
        source = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"{source}: cannot read ({exc.strerror})") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: invalid JSON at byte {exc.pos}: {exc.msg}") from exc
    cfg = from_mapping(doc, source)
    if overrides:
        cfg = dataclasses.replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
        cfg.validate("<flags>")
    return cfg
