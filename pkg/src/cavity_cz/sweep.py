"""One-dimensional parameter sweeps producing CSV/JSON metric tables."""

from __future__ import annotations

import copy
import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, check_keys, resolve
from .protocol import run_gate

TARGETS = ("g", "kappa", "delta", "gamma", "pulse_width", "storage_efficiency")
METRICS = ("controlled_phase", "fidelity_raw", "fidelity_opt", "leakage_1", "leakage_2", "phase_error")
SIGNIFICANT_DIGITS = 12


class SweepSpecError(ValueError):
    pass


class SweepError(RuntimeError):
    pass


def round_sig(x: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    return float(f"{x:.{digits}g}")


@dataclass(frozen=True)
class SweepSpec:
    target: str
    start: float
    stop: float
    n_points: int
    spacing: str = "linear"
    baseline: dict = field(default_factory=dict)
    metrics: tuple[str, ...] = METRICS
    path: str = "frequency"

    def __post_init__(self):
        if self.target not in TARGETS:
            raise SweepSpecError(f"sweep target must be one of {', '.join(TARGETS)}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise SweepSpecError("a sweep needs n_points >= 2")
        if not self.start < self.stop:
            raise SweepSpecError("sweep start must be smaller than stop")
        if self.spacing not in ("linear", "log"):
            raise SweepSpecError("spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.start <= 0:
            raise SweepSpecError("log spacing requires positive endpoints")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad or not self.metrics:
            raise SweepSpecError(f"metrics must be a non-empty subset of {', '.join(METRICS)}")
        if self.path not in ("frequency", "time"):
            raise SweepSpecError("path must be 'frequency' or 'time'")
        object.__setattr__(self, "metrics", tuple(self.metrics))
        object.__setattr__(self, "n_points", int(self.n_points))

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.n_points)
        return np.linspace(self.start, self.stop, self.n_points)

    def to_dict(self) -> dict:
        return {
            "target": self.target, "start": self.start, "stop": self.stop,
            "n_points": self.n_points, "spacing": self.spacing,
            "baseline": copy.deepcopy(self.baseline), "metrics": list(self.metrics),
            "path": self.path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        allowed = {"target", "start", "stop", "n_points", "spacing", "baseline", "metrics", "path"}
        unknown = set(data) - allowed
        if unknown:
            raise SweepSpecError(f"unknown sweep key(s): {', '.join(sorted(unknown))}")
        try:
            return cls(
                target=data["target"], start=float(data["start"]), stop=float(data["stop"]),
                n_points=data["n_points"], spacing=data.get("spacing", "linear"),
                baseline=data.get("baseline", {}), metrics=tuple(data.get("metrics", METRICS)),
                path=data.get("path", "frequency"),
            )
        except KeyError as exc:
            raise SweepSpecError(f"sweep spec is missing {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class SweepTable:
    """Rows ``(value, metric..., error)``; failed points carry ``None`` metrics."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    provenance: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def point_config(baseline: dict, target: str, value: float) -> dict:
    data = copy.deepcopy(baseline)
    if target == "pulse_width":
        data.setdefault("pulse", {})["width"] = value
    elif target == "storage_efficiency":
        data.setdefault("storage", {})["efficiency"] = value
    else:
        if target == "g":
            data.pop("match_g", None)
        data[target] = value
    return data


def evaluate_point(baseline: dict, target: str, value: float, metrics: tuple, path: str) -> tuple:
    """One sweep row; validation and numerical failures become an error string."""
    try:
        cfg = resolve(point_config(baseline, target, value))
        result = run_gate(cfg.params, cfg.build_pulse(), cfg.storage, cfg.control,
                          method=path, solver=cfg.solver)
    except ConfigError:
        raise
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        return (value, *([None] * len(metrics)), f"{type(exc).__name__}: {exc}")
    available = {
        "controlled_phase": result.controlled_phase,
        "fidelity_raw": result.fidelity_raw,
        "fidelity_opt": result.fidelity_opt,
        "leakage_1": result.leakage[0],
        "leakage_2": result.leakage[1],
        "phase_error": result.phase_error,
    }
    return (value, *(round_sig(available[m]) for m in metrics), "")


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepTable:
    """Evaluate every sweep point; rows come back in range order for any ``jobs``."""
    check_keys(spec.baseline)
    values = [round_sig(v) for v in spec.values()]
    args = [(spec.baseline, spec.target, v, spec.metrics, spec.path) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(evaluate_point, *zip(*args)))
    else:
        rows = [evaluate_point(*a) for a in args]
    if all(row[-1] for row in rows):
        raise SweepError(f"all {len(rows)} sweep points failed; first error: {rows[0][-1]}")
    solver = spec.baseline.get("solver", {})
    provenance = {
        "version": __version__,
        "spec": spec.to_dict(),
        "baseline": copy.deepcopy(spec.baseline),
        "tolerances": {"rtol": solver.get("rtol", 1e-10), "atol": solver.get("atol", 1e-10),
                       "significant_digits": SIGNIFICANT_DIGITS},
    }
    return SweepTable(columns=(spec.target, *spec.metrics, "error"), rows=tuple(rows), provenance=provenance)


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return repr(float(x))


def to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def to_json(table: SweepTable) -> str:
    payload = {
        "provenance": table.provenance,
        "columns": list(table.columns),
        "rows": [list(row) for row in table.rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def from_csv(text: str) -> SweepTable:
    reader = list(csv.reader(io.StringIO(text)))
    columns = tuple(reader[0])
    rows = []
    for raw in reader[1:]:
        *numbers, error = raw
        rows.append(tuple(None if x == "" else float(x) for x in numbers) + (error,))
    return SweepTable(columns=columns, rows=tuple(rows))


def from_json(text: str) -> SweepTable:
    data = json.loads(text)
    return SweepTable(columns=tuple(data["columns"]), rows=tuple(tuple(r) for r in data["rows"]),
                      provenance=data["provenance"])


def emit(table: SweepTable, fmt: str, destination) -> None:
    """Write ``table`` as ``csv`` or ``json`` to a path or a text stream."""
    if not table.rows:
        raise SweepError("refusing to emit an empty table")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    text = to_csv(table) if fmt == "csv" else to_json(table)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    path = Path(destination)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write sweep table: {exc.strerror}", str(path)) from exc


def read_table(path, fmt: str | None = None) -> SweepTable:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    text = path.read_text(encoding="utf-8")
    return from_json(text) if fmt == "json" else from_csv(text)


def bracket_sign_change(table: SweepTable, column: str = "phase_error") -> list[tuple[float, float]]:
    """Adjacent row pairs between which ``column`` changes sign."""
    xs = table.column(table.columns[0])
    ys = table.column(column)
    out = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if y0 is None or y1 is None:
            continue
        # a jump across the +/-pi branch cut is not a root
        if y0 * y1 < 0 and abs(y1 - y0) < math.pi:
            out.append((x0, x1))
    return out
