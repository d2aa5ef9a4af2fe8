"""Command-line interface: ``transfer``, ``dynamics``, ``gate``, ``match``, ``sweep``.

Exit codes::

    0  success
    1  unexpected internal error
    2  usage error (unknown subcommand or flag, bad flag value)
    3  configuration error (malformed JSON, unknown key, conflicting settings)
    4  validation error (physical parameters, storage model, sweep spec)
    5  numerical error (grid too small, integration failure, undecayed transient)
    6  I/O error

Failures print one line to stderr: ``error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .config import ConfigError, load_config, load_json
from .dynamics import IntegrationError, TransientError, frequency_domain_residual, integrate_branch
from .model import ParameterError, matching_delta, matching_g
from .protocol import ProtocolError, gate_truth_table, run_gate
from .sweep import METRICS, TARGETS, SweepError, SweepSpec, SweepSpecError, emit, run_sweep
from .transfer import Branch, SingularParametersError, reflection_narrowband, response_on_grid
from .wavepacket import PULSE_SHAPES, GridError

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4, 5, 6
SIG = 12

PHYSICS = {"transfer", "dynamics", "gate", "sweep"}
PULSED = {"dynamics", "gate", "sweep"}


@dataclass(frozen=True)
class Flag:
    name: str
    help: str
    commands: frozenset
    config: tuple | None = None
    type: object = float
    choices: tuple | None = None
    action: str | None = None


def _f(name, help, commands, config=None, **kw):
    return Flag(name, help, frozenset(commands), config, **kw)


FLAGS = (
    _f("--config", "JSON run configuration file (flags override its values)", PHYSICS, type=str),
    _f("--g", "atom-cavity coupling rate g", PHYSICS | {"match"}, ("g",)),
    _f("--kappa", "cavity decay rate kappa", PHYSICS | {"match"}, ("kappa",)),
    _f("--delta", "ground-state splitting / detuning span delta", PHYSICS | {"match"}, ("delta",)),
    _f("--gamma", "atomic coherence decay rate gamma", PHYSICS, ("gamma",)),
    _f("--omega0", "cavity reference frequency (bookkeeping only)", PHYSICS, ("omega0",)),
    _f("--match-g", "choose g from the matching condition 2 g^2 = kappa delta", PHYSICS,
       ("match_g",), type=None, action="store_true"),
    _f("--nu-min", "lower bound of the spectral grid", PHYSICS, ("grid", "nu_min")),
    _f("--nu-max", "upper bound of the spectral grid (excluded)", PHYSICS, ("grid", "nu_max")),
    _f("--n-points", "number of grid points (power of two, >= 16)", PHYSICS, ("grid", "n_points"), type=int),
    _f("--pulse", "signal pulse shape", PULSED, ("pulse", "shape"), type=str, choices=PULSE_SHAPES),
    _f("--width", "gaussian spectral amplitude width", PULSED, ("pulse", "width")),
    _f("--center", "gaussian center frequency", PULSED, ("pulse", "center")),
    _f("--duration", "rising-exponential duration dt_c", PULSED, ("pulse", "duration")),
    _f("--efficiency", "storage efficiency per pass, in [0, 1]", {"gate", "sweep"}, ("storage", "efficiency")),
    _f("--phase-store", "phase imprinted by storage [rad]", {"gate", "sweep"}, ("storage", "phase_store")),
    _f("--phase-retrieve", "phase imprinted by retrieval [rad]", {"gate", "sweep"}, ("storage", "phase_retrieve")),
    _f("--alpha", "control-qubit vacuum amplitude", {"gate"}, ("control", "alpha")),
    _f("--beta", "control-qubit single-photon amplitude", {"gate"}, ("control", "beta")),
    _f("--rtol", "ODE relative tolerance", PULSED, ("solver", "rtol")),
    _f("--atol", "ODE absolute tolerance", PULSED, ("solver", "atol")),
    _f("--window", "half length of the time window, or 'auto'", PULSED, ("solver", "window"), type=str),
    _f("--format", "output format", PHYSICS, ("output", "format"), type=str, choices=("csv", "json")),
    _f("--output", "output file (default: stdout)", PHYSICS, ("output", "path"), type=str),
    _f("--branch", "atomic ground state of the scattering branch", {"transfer", "dynamics"},
       type=int, choices=(1, 2)),
    _f("--mode", "reflection model", {"transfer"}, type=str, choices=("exact", "narrowband")),
    _f("--summary", "file for the JSON run summary (default: stderr)", {"dynamics"}, type=str),
    _f("--method", "how branch overlaps are computed", {"gate"}, type=str, choices=("frequency", "time")),
    _f("--reference-delay", "project the reflected photon on the input delayed by this time", {"gate"}),
    _f("--table", "also print the human-readable truth table", {"gate"}, type=None, action="store_true"),
    _f("--spec", "JSON sweep specification file", {"sweep"}, type=str),
    _f("--target", "parameter to sweep", {"sweep"}, type=str, choices=TARGETS),
    _f("--start", "first sweep value", {"sweep"}),
    _f("--stop", "last sweep value", {"sweep"}),
    _f("--n-sweep", "number of sweep points (>= 2)", {"sweep"}, type=int),
    _f("--spacing", "sweep spacing", {"sweep"}, type=str, choices=("linear", "log")),
    _f("--metrics", "comma-separated metrics: " + ",".join(METRICS), {"sweep"}, type=str),
    _f("--path", "evaluation path for the metrics", {"sweep"}, type=str, choices=("frequency", "time")),
    _f("--jobs", "number of worker processes", {"sweep"}, type=int),
)

COMMANDS = {
    "transfer": "reflection coefficient r(nu) on a grid",
    "dynamics": "time-domain integration of one branch",
    "gate": "run the controlled-phase gate and score it against CZ",
    "match": "solve the matching condition for g or delta",
    "sweep": "scan one parameter and tabulate gate metrics",
}
DEFAULT_FORMAT = {"transfer": "csv", "dynamics": "csv", "gate": "json", "sweep": "csv"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cavity-cz", description="Cavity-QED controlled-phase photon gate toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for command, help_text in COMMANDS.items():
        p = sub.add_parser(command, help=help_text, description=help_text)
        for flag in FLAGS:
            if command not in flag.commands:
                continue
            kwargs = {"help": flag.help, "default": None}
            if flag.action:
                kwargs["action"] = flag.action
            else:
                kwargs["type"] = flag.type
            if flag.choices:
                kwargs["choices"] = flag.choices
            p.add_argument(flag.name, dest=_dest(flag), **kwargs)
    return parser


def _dest(flag: Flag) -> str:
    return flag.name.lstrip("-").replace("-", "_")


def _overrides(args, command: str) -> dict:
    out: dict = {}
    for flag in FLAGS:
        if flag.config is None or command not in flag.commands:
            continue
        value = getattr(args, _dest(flag))
        if value is None or (flag.action == "store_true" and not value):
            continue
        if flag.name == "--window" and value != "auto":
            try:
                value = float(value)
            except ValueError:
                raise UsageError(f"argument --window: expected a number or 'auto', got {value!r}")
        if len(flag.config) == 1:
            out[flag.config[0]] = value
        else:
            out.setdefault(flag.config[0], {})[flag.config[1]] = value
    return out


def fmt(x: float) -> str:
    return f"{float(x) + 0.0:.{SIG}g}"


def _round(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def _write(text: str, path: str | None, stdout) -> None:
    if path is None:
        stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def _csv(header, columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _format(cfg, command: str) -> str:
    return cfg.raw.get("output", {}).get("format") or DEFAULT_FORMAT[command]


def cmd_transfer(args, stdout) -> int:
    cfg = load_config(args.config, _overrides(args, "transfer"))
    branch = Branch.parse(args.branch or 1)
    nu = cfg.grid.frequencies()
    if (args.mode or "exact") == "exact":
        r = response_on_grid(cfg.params, branch, cfg.grid).r
    else:
        r = np.full(nu.shape, reflection_narrowband(cfg.params, branch))
    header = ("nu", "re_r", "im_r", "abs_r", "arg_r")
    cols = (nu, r.real, r.imag, np.abs(r), np.angle(r))
    if _format(cfg, "transfer") == "csv":
        text = _csv(header, cols)
    else:
        text = _dumps({"params": cfg.params.to_dict(), "branch": int(branch), "mode": args.mode or "exact",
                       "columns": list(header), "rows": [list(map(float, row)) for row in zip(*cols)]})
    _write(text, cfg.output_path, stdout)
    return EXIT_OK


def cmd_dynamics(args, stdout, stderr) -> int:
    overrides = _overrides(args, "dynamics")
    cfg = load_config(args.config, overrides)
    if cfg.window is None and "grid" not in cfg.raw:
        # no grid given anywhere: size the time window to the pulse
        cfg = load_config(args.config, dict(overrides, solver={**overrides.get("solver", {}), "window": "auto"}))
    branch = Branch.parse(args.branch or 1)
    wp = cfg.build_pulse()
    traj = integrate_branch(cfg.params, branch, wp, cfg.solver)
    header = ("t", "re_chi", "im_chi", "re_xi", "im_xi", "re_fout", "im_fout")
    cols = (traj.t, traj.chi.real, traj.chi.imag, traj.xi.real, traj.xi.imag, traj.f_out.real, traj.f_out.imag)
    if _format(cfg, "dynamics") == "csv":
        text = _csv(header, cols)
    else:
        text = _dumps({"columns": list(header), "rows": [list(map(float, row)) for row in zip(*cols)]})
    _write(text, cfg.output_path, stdout)
    summary = {
        "version": __version__,
        "params": cfg.params.to_dict(),
        "branch": int(branch),
        "grid": cfg.grid.to_dict(),
        "input_norm": traj.input_norm(),
        "output_norm": traj.output_norm(),
        "residual": frequency_domain_residual(cfg.params, branch, wp, cfg.solver),
        "rtol": cfg.solver.rtol,
        "atol": cfg.solver.atol,
    }
    if args.summary:
        _write(_dumps(summary), args.summary, stdout)
    else:
        stderr.write(_dumps(summary))
    return EXIT_OK


def cmd_gate(args, stdout) -> int:
    cfg = load_config(args.config, _overrides(args, "gate"))
    result = run_gate(cfg.params, cfg.build_pulse(), cfg.storage, cfg.control,
                      method=args.method or "frequency", reference_delay=args.reference_delay or 0.0,
                      solver=cfg.solver)
    payload = result.to_dict()
    payload["phase_error"] = result.phase_error
    payload["version"] = __version__
    if _format(cfg, "gate") == "csv":
        text = _csv(("basis", "re_u", "im_u"), ((0, 1, 10, 11),
                                                  [z.real for z in result.u], [z.imag for z in result.u]))
    else:
        text = _dumps(payload)
    _write(text, cfg.output_path, stdout)
    if args.table:
        stdout.write(gate_truth_table(result) + "\n")
    return EXIT_OK


def cmd_match(args, stdout) -> int:
    if args.kappa is None:
        raise UsageError("match needs --kappa together with --delta or --g")
    if args.delta is not None and args.g is None:
        stdout.write(f"g = {matching_g(args.kappa, args.delta):.12f}\n")
    elif args.g is not None and args.delta is None:
        stdout.write(f"delta = {matching_delta(args.g, args.kappa):.12f}\n")
    else:
        raise UsageError("match needs exactly one of --delta (solve for g) or --g (solve for delta)")
    return EXIT_OK


def cmd_sweep(args, stdout) -> int:
    baseline = load_json(args.config) if args.config else {}
    overrides = _overrides(args, "sweep")
    output = overrides.pop("output", {})
    from .config import merge

    baseline = merge(baseline, overrides)
    out_cfg = baseline.pop("output", {})
    out_cfg.update(output)
    if args.spec:
        data = load_json(args.spec)
        if baseline:
            data["baseline"] = merge(data.get("baseline", {}), baseline)
        for key, flag in (("target", "target"), ("start", "start"), ("stop", "stop"),
                          ("n_points", "n_sweep"), ("spacing", "spacing"), ("path", "path")):
            if getattr(args, flag) is not None:
                data[key] = getattr(args, flag)
        if args.metrics:
            data["metrics"] = args.metrics.split(",")
        spec = SweepSpec.from_dict(data)
    else:
        missing = [f for f in ("target", "start", "stop", "n_sweep") if getattr(args, f) is None]
        if missing:
            raise UsageError("sweep needs --spec or all of " + ", ".join("--" + m.replace("_", "-") for m in missing))
        spec = SweepSpec(target=args.target, start=args.start, stop=args.stop, n_points=args.n_sweep,
                         spacing=args.spacing or "linear", baseline=baseline,
                         metrics=tuple(args.metrics.split(",")) if args.metrics else METRICS,
                         path=args.path or "frequency")
    table = run_sweep(spec, jobs=args.jobs or 1)
    fmt_name = out_cfg.get("format") or DEFAULT_FORMAT["sweep"]
    buf = io.StringIO()
    emit(table, fmt_name, buf)
    _write(buf.getvalue(), out_cfg.get("path"), stdout)
    return EXIT_OK


def _classify(exc: BaseException) -> tuple[int, str]:
    if isinstance(exc, UsageError):
        return EXIT_USAGE, "usage"
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG, "config"
    if isinstance(exc, (ParameterError, ProtocolError, SweepSpecError)):
        return EXIT_VALIDATION, "validation"
    if isinstance(exc, (GridError, IntegrationError, TransientError, SingularParametersError, SweepError)):
        return EXIT_NUMERICAL, "numerical"
    if isinstance(exc, OSError):
        return EXIT_IO, "io"
    return EXIT_INTERNAL, "internal"


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "transfer":
            return cmd_transfer(args, stdout)
        if args.command == "dynamics":
            return cmd_dynamics(args, stdout, stderr)
        if args.command == "gate":
            return cmd_gate(args, stdout)
        if args.command == "match":
            return cmd_match(args, stdout)
        return cmd_sweep(args, stdout)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001 - every failure maps to one error line
        code, kind = _classify(exc)
        message = " ".join(str(exc).split())
        stderr.write(f"error: {kind}: {message}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
