"""Run configuration: strict JSON parsing, documented defaults, flag overrides.

Schema (every key optional)::

    {
      "g": 1.0, "kappa": 2.0, "delta": 1.0, "gamma": 0.0, "omega0": 0.0,
      "match_g": false,
      "pulse":   {"shape": "gaussian", "width": 0.01, "center": 0.0, "duration": 10.0},
      "storage": {"efficiency": 1.0, "phase_store": 0.0, "phase_retrieve": 0.0},
      "grid":    {"nu_min": -20.0, "nu_max": 20.0, "n_points": 4096},
      "solver":  {"rtol": 1e-10, "atol": 1e-10, "window": null},
      "control": {"alpha": 0.7071067811865476, "beta": 0.7071067811865476},
      "output":  {"format": "json", "path": null}
    }

Defaults: ``kappa = 1``, ``delta = 1``, ``gamma = 0``, ``g`` on the matching
condition when omitted, Gaussian pulse of width ``kappa / 100`` at ``nu = 0``,
grid ``[-20 kappa, 20 kappa)`` with 4096 points, ideal storage, equal control
superposition. ``solver.window`` (half length of the time window) rebuilds the
grid around the pulse with the same number of points; ``"auto"`` picks
``8 / width`` plus the ringdown time of the slowest cavity-atom mode, and at
least ``20 / kappa``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .dynamics import SolverOptions, auto_window
from .model import PhysicalParams, matching_g, validate
from .protocol import StorageModel
from .wavepacket import PULSE_SHAPES, SpectralGrid, Wavepacket, make_pulse

TOP_KEYS = {"g", "kappa", "delta", "gamma", "omega0", "match_g",
            "pulse", "storage", "grid", "solver", "control", "output"}
BLOCK_KEYS = {
    "pulse": {"shape", "width", "center", "duration"},
    "storage": {"efficiency", "phase_store", "phase_retrieve"},
    "grid": {"nu_min", "nu_max", "n_points"},
    "solver": {"rtol", "atol", "window"},
    "control": {"alpha", "beta"},
    "output": {"format", "path"},
}
OUTPUT_FORMATS = ("csv", "json")
DEFAULT_GRID_POINTS = 4096
DEFAULT_DURATION_KAPPA = 10.0


class ConfigError(ValueError):
    """Malformed, unknown or conflicting configuration entries."""


@dataclass(frozen=True)
class PulseSpec:
    shape: str
    width: float | None = None
    center: float = 0.0
    duration: float | None = None


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams
    pulse: PulseSpec
    storage: StorageModel
    grid: SpectralGrid
    solver: SolverOptions
    window: float | None
    control: tuple[float, float]
    output_format: str
    output_path: str | None
    raw: dict

    def build_pulse(self) -> Wavepacket:
        return make_pulse(self.grid, self.pulse.shape, width=self.pulse.width,
                          center=self.pulse.center, duration=self.pulse.duration)


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level JSON value must be an object")
    return data


def merge(base: dict, overrides: dict) -> dict:
    """Overlay ``overrides`` (same nesting as the schema) onto a copy of ``base``."""
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict):
            block = out.setdefault(key, {})
            if not isinstance(block, dict):
                raise ConfigError(f"'{key}' must be an object")
            block.update(value)
        else:
            out[key] = value
    return out


def check_keys(data: dict) -> None:
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    for block, allowed in BLOCK_KEYS.items():
        if block not in data:
            continue
        if not isinstance(data[block], dict):
            raise ConfigError(f"'{block}' must be an object")
        unknown = set(data[block]) - allowed
        if unknown:
            raise ConfigError(f"unknown key(s) in '{block}': {', '.join(sorted(unknown))}")


def _num(data: dict, key: str, default, where: str = ""):
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{where}{key}' must be a number")
    return float(value)


def resolve(data: dict) -> RunConfig:
    """Fill defaults and build the typed configuration."""
    check_keys(data)
    kappa = _num(data, "kappa", 1.0)
    delta = _num(data, "delta", 1.0)
    gamma = _num(data, "gamma", 0.0)
    omega0 = _num(data, "omega0", 0.0)
    match = data.get("match_g", False)
    if not isinstance(match, bool):
        raise ConfigError("'match_g' must be true or false")
    if match and data.get("g") is not None:
        raise ConfigError("conflicting settings: both 'g' and 'match_g' given")
    g = _num(data, "g", None)
    if g is None:
        g = matching_g(kappa, delta)
    params = validate(PhysicalParams(g=g, kappa=kappa, delta=delta, gamma=gamma, omega0=omega0),
                      allow_uncoupled=True)

    pulse_data = data.get("pulse", {})
    shape = pulse_data.get("shape", "gaussian")
    if shape not in PULSE_SHAPES:
        raise ConfigError(f"'pulse.shape' must be one of {', '.join(PULSE_SHAPES)}")
    pulse = PulseSpec(
        shape=shape,
        width=_num(pulse_data, "width", kappa / 100.0, "pulse."),
        center=_num(pulse_data, "center", 0.0, "pulse."),
        duration=_num(pulse_data, "duration", DEFAULT_DURATION_KAPPA / kappa, "pulse."),
    )

    st = data.get("storage", {})
    storage = StorageModel(
        efficiency=_num(st, "efficiency", 1.0, "storage."),
        phase_store=_num(st, "phase_store", 0.0, "storage."),
        phase_retrieve=_num(st, "phase_retrieve", 0.0, "storage."),
    )

    sv = data.get("solver", {})
    solver = SolverOptions(rtol=_num(sv, "rtol", 1e-10, "solver."), atol=_num(sv, "atol", 1e-10, "solver."))
    window = sv.get("window")
    if window == "auto":
        scale = pulse.width if shape == "gaussian" else 1.0 / (2.0 * pulse.duration)
        window = auto_window(params, scale)
    elif window is not None:
        window = _num(sv, "window", None, "solver.")

    gd = data.get("grid", {})
    n_points = gd.get("n_points", DEFAULT_GRID_POINTS)
    if isinstance(n_points, bool) or not isinstance(n_points, int):
        raise ConfigError("'grid.n_points' must be an integer")
    if window is not None:
        if "nu_min" in gd or "nu_max" in gd:
            raise ConfigError("conflicting settings: 'solver.window' and explicit grid bounds")
        grid = SpectralGrid.for_window(window, n_points, center=pulse.center)
    else:
        grid = SpectralGrid(_num(gd, "nu_min", -20.0 * kappa, "grid."),
                            _num(gd, "nu_max", 20.0 * kappa, "grid."), n_points)

    ct = data.get("control", {})
    control = (_num(ct, "alpha", 1 / math.sqrt(2), "control."), _num(ct, "beta", 1 / math.sqrt(2), "control."))

    out = data.get("output", {})
    fmt = out.get("format", "json")
    if fmt not in OUTPUT_FORMATS:
        raise ConfigError(f"'output.format' must be one of {', '.join(OUTPUT_FORMATS)}")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("'output.path' must be a string")

    return RunConfig(params=params, pulse=pulse, storage=storage, grid=grid, solver=solver,
                     window=window, control=control, output_format=fmt, output_path=path,
                     raw=copy.deepcopy(data))


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Read ``path`` (optional), overlay ``overrides`` and resolve defaults."""
    data: dict[str, Any] = load_json(path) if path is not None else {}
    check_keys(data)
    if overrides:
        if overrides.get("g") is not None and data.get("match_g"):
            data = dict(data, match_g=False)
        if overrides.get("match_g") and "g" in data:
            data = {k: v for k, v in data.items() if k != "g"}
        data = merge(data, overrides)
    return resolve(data)
