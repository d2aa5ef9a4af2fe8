"""Single-photon wavepackets on uniform spectral grids.

Fourier convention (fixed everywhere in the package)::

    f_t(t)  = 1/sqrt(2 pi) * integral f(nu) exp(-i nu t) dnu
    f(nu)   = 1/sqrt(2 pi) * integral f_t(t) exp(+i nu t) dt

with ``nu = omega - omega0`` the rotating-frame frequency. A spectral tone at
``nu1`` therefore carries the temporal phase ``exp(-i nu1 t)``. The unitary
prefactor makes the temporal and spectral norms identical.

The discrete pair used here is exact on the grid: with ``N`` points spaced
``dnu``, the conjugate time grid has ``dt = 2 pi / (N dnu)`` and
``t_j = (j - N/2) dt``. Both directions are a single FFT.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import erfc

GAUSSIAN_EDGE_WIDTHS = 8.0
LORENTZIAN_TAIL_TOL = 1e-6


class GridError(ValueError):
    """Raised for malformed grids or pulses that do not fit their grid."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform grid ``nu_k = nu_min + k * dnu`` for ``k = 0 .. n_points - 1``.

    ``nu_max`` itself is excluded so that ``dnu = (nu_max - nu_min) / n_points``.
    """

    nu_min: float
    nu_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.nu_min) and math.isfinite(self.nu_max)):
            raise GridError("grid bounds must be finite")
        if not self.nu_min < self.nu_max:
            raise GridError("nu_min must be smaller than nu_max")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise GridError("n_points must be an integer >= 16")
        if not _is_power_of_two(int(self.n_points)):
            raise GridError("n_points must be a power of two")
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def centered(cls, half_span: float, n_points: int) -> "SpectralGrid":
        return cls(-half_span, half_span, n_points)

    @classmethod
    def for_window(cls, half_window: float, n_points: int, center: float = 0.0) -> "SpectralGrid":
        """Grid whose conjugate time axis spans ``[-half_window, half_window)``."""
        dnu = math.pi / half_window
        half = 0.5 * n_points * dnu
        return cls(center - half, center + half, n_points)

    @property
    def dnu(self) -> float:
        return (self.nu_max - self.nu_min) / self.n_points

    @property
    def dt(self) -> float:
        return 2.0 * math.pi / (self.n_points * self.dnu)

    @property
    def half_window(self) -> float:
        """Half length of the conjugate time window."""
        return 0.5 * self.n_points * self.dt

    def frequencies(self) -> np.ndarray:
        return self.nu_min + self.dnu * np.arange(self.n_points)

    def times(self) -> np.ndarray:
        return self.dt * (np.arange(self.n_points) - self.n_points // 2)

    def to_dict(self) -> dict:
        return {"nu_min": self.nu_min, "nu_max": self.nu_max, "n_points": self.n_points}


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


def freq_to_time(grid: SpectralGrid, spectral: np.ndarray) -> np.ndarray:
    """Temporal samples on ``grid.times()`` of a spectral amplitude array."""
    n = grid.n_points
    sign = 1 - 2 * (np.arange(n) % 2)
    t = grid.times()
    return grid.dnu / math.sqrt(2 * math.pi) * np.exp(-1j * grid.nu_min * t) * np.fft.fft(spectral * sign)


def time_to_freq(grid: SpectralGrid, temporal: np.ndarray) -> np.ndarray:
    """Inverse of :func:`freq_to_time`."""
    n = grid.n_points
    sign = 1 - 2 * (np.arange(n) % 2)
    t = grid.times()
    return grid.dt * n / math.sqrt(2 * math.pi) * sign * np.fft.ifft(temporal * np.exp(1j * grid.nu_min * t))


@dataclass(frozen=True, eq=False)
class Wavepacket:
    """Spectral amplitudes ``f(nu_k)`` with an optional cached temporal copy.

    Constructors return normalized packets; scattering outputs may carry a
    norm below one, so normalization is not enforced here.
    """

    grid: SpectralGrid
    spectral: np.ndarray
    temporal: np.ndarray | None = None

    def __post_init__(self):
        spectral = _frozen(self.spectral)
        if spectral.shape != (self.grid.n_points,):
            raise GridError(f"expected {self.grid.n_points} spectral samples, got {spectral.shape}")
        object.__setattr__(self, "spectral", spectral)
        if self.temporal is not None:
            temporal = _frozen(self.temporal)
            if temporal.shape != spectral.shape:
                raise GridError("temporal samples do not match the grid")
            object.__setattr__(self, "temporal", temporal)

    @property
    def temporal_amplitudes(self) -> np.ndarray:
        if self.temporal is not None:
            return self.temporal
        return _frozen(freq_to_time(self.grid, self.spectral))

    def norm(self) -> float:
        """Spectral norm ``sum |f|^2 dnu``."""
        return float(np.sum(np.abs(self.spectral) ** 2) * self.grid.dnu)

    def temporal_norm(self) -> float:
        return float(np.sum(np.abs(self.temporal_amplitudes) ** 2) * self.grid.dt)

    def normalized(self) -> "Wavepacket":
        scale = 1.0 / math.sqrt(self.norm())
        temporal = None if self.temporal is None else self.temporal * scale
        return Wavepacket(self.grid, self.spectral * scale, temporal)

    def scaled(self, factor: complex) -> "Wavepacket":
        temporal = None if self.temporal is None else self.temporal * factor
        return Wavepacket(self.grid, self.spectral * factor, temporal)

    def mean_frequency(self) -> float:
        p = np.abs(self.spectral) ** 2
        return float(np.sum(self.grid.frequencies() * p) / np.sum(p))

    def spectral_variance(self) -> float:
        """Second central moment of ``|f(nu)|^2``."""
        nu = self.grid.frequencies()
        p = np.abs(self.spectral) ** 2
        p = p / np.sum(p)
        mean = np.sum(nu * p)
        return float(np.sum((nu - mean) ** 2 * p))


def transform_to_time(wp: Wavepacket) -> Wavepacket:
    """Return a copy of ``wp`` with the temporal samples filled in."""
    if wp.temporal is not None:
        return wp
    return Wavepacket(wp.grid, wp.spectral, freq_to_time(wp.grid, wp.spectral))


def transform_to_frequency(grid: SpectralGrid, temporal: np.ndarray) -> Wavepacket:
    """Build a wavepacket from samples on ``grid.times()``."""
    temporal = np.asarray(temporal, dtype=complex)
    return Wavepacket(grid, time_to_freq(grid, temporal), temporal)


def overlap(a: Wavepacket, b: Wavepacket) -> complex:
    """``sum conj(f_a) f_b dnu``; linear in ``b``."""
    if a.grid != b.grid:
        raise GridError("overlap requires identical grids")
    return complex(np.vdot(a.spectral, b.spectral) * a.grid.dnu)


def make_gaussian(grid: SpectralGrid, center_nu: float, spectral_width: float) -> Wavepacket:
    """Gaussian amplitude ``exp(-(nu - center)^2 / (2 width^2))``, normalized.

    The intensity ``|f|^2`` then has variance ``width^2 / 2`` and the temporal
    amplitude is a Gaussian of width ``1 / width``.
    """
    if not spectral_width > 0:
        raise GridError("spectral_width must be positive")
    edge = GAUSSIAN_EDGE_WIDTHS * spectral_width
    if center_nu - edge < grid.nu_min or center_nu + edge > grid.nu_max - grid.dnu:
        # mass of |f|^2 beyond the grid, reported for the error message
        lo = (center_nu - grid.nu_min) / spectral_width
        hi = (grid.nu_max - grid.dnu - center_nu) / spectral_width
        lost = 0.5 * (erfc(lo) + erfc(hi))
        raise GridError(
            f"gaussian support truncated by the grid (needs {GAUSSIAN_EDGE_WIDTHS:g} widths "
            f"to each edge, truncated mass ~{lost:.1e})"
        )
    nu = grid.frequencies()
    f = np.exp(-((nu - center_nu) ** 2) / (2.0 * spectral_width**2))
    f = f / math.sqrt(np.sum(f**2) * grid.dnu)
    return transform_to_time(Wavepacket(grid, f))


def gaussian_temporal(t, center_nu: float, spectral_width: float):
    """Closed-form temporal amplitude of :func:`make_gaussian` (continuum limit)."""
    amp = math.pi**-0.25 * math.sqrt(spectral_width)
    t = np.asarray(t, dtype=float)
    return amp * np.exp(-1j * center_nu * t - 0.5 * (spectral_width * t) ** 2)


def rising_exponential_profile(t, duration_dt: float):
    """Normalized ``exp(t / (2 dt_c))`` for ``t < 0``, zero for ``t > 0``.

    At exactly ``t = 0`` the midpoint of the jump is returned, which makes the
    sampled profile a trapezoid-rule discretization of the step.
    """
    t = np.asarray(t, dtype=float)
    amp = 1.0 / math.sqrt(duration_dt)
    inside = amp * np.exp(np.minimum(t, 0.0) / (2.0 * duration_dt))
    return np.where(t < 0, inside, np.where(t == 0, 0.5 * amp, 0.0))


def rising_exponential_spectrum(nu, duration_dt: float):
    """Spectral amplitude of :func:`rising_exponential_profile`.

    ``1 / (sqrt(2 pi dt_c) (1 / (2 dt_c) + i nu))``: a Lorentzian intensity
    with half width ``1 / (2 dt_c)``.
    """
    nu = np.asarray(nu, dtype=float)
    return 1.0 / (math.sqrt(2 * math.pi * duration_dt) * (0.5 / duration_dt + 1j * nu))


def make_rising_exponential(grid: SpectralGrid, duration_dt: float) -> Wavepacket:
    """Exponentially rising pulse ending at ``t = 0``, built on the time grid."""
    if not duration_dt > 0:
        raise GridError("duration_dt must be positive")
    hw = 0.5 / duration_dt
    inside = (math.atan((grid.nu_max - grid.dnu) / hw) - math.atan(grid.nu_min / hw)) / math.pi
    if 1.0 - inside > LORENTZIAN_TAIL_TOL:
        raise GridError(
            f"lorentzian tail mass outside the spectral grid is {1.0 - inside:.2e} "
            f"(limit {LORENTZIAN_TAIL_TOL:g}); widen the grid"
        )
    early = math.exp(-grid.half_window / duration_dt)
    if early > LORENTZIAN_TAIL_TOL:
        raise GridError(
            f"pulse mass before the time window is {early:.2e} "
            f"(limit {LORENTZIAN_TAIL_TOL:g}); refine the grid spacing"
        )
    temporal = rising_exponential_profile(grid.times(), duration_dt)
    temporal = temporal / math.sqrt(np.sum(np.abs(temporal) ** 2) * grid.dt)
    return transform_to_frequency(grid, temporal)


PULSE_SHAPES = ("gaussian", "rising-exp")


def make_pulse(grid: SpectralGrid, shape: str, **kwargs) -> Wavepacket:
    """Dispatch a constructor by name: ``gaussian`` or ``rising-exp``."""
    if shape == "gaussian":
        return make_gaussian(grid, kwargs.get("center", 0.0), kwargs["width"])
    if shape == "rising-exp":
        return make_rising_exponential(grid, kwargs["duration"])
    raise GridError(f"unknown pulse shape {shape!r}; expected one of {', '.join(PULSE_SHAPES)}")


def to_csv(wp: Wavepacket) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["nu", "re", "im"])
    for nu, f in zip(wp.grid.frequencies(), wp.spectral):
        writer.writerow([repr(float(nu)), repr(float(f.real)), repr(float(f.imag))])
    return buf.getvalue()


def from_csv(text: str) -> Wavepacket:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["nu", "re", "im"]:
        raise GridError("wavepacket CSV must start with the header nu,re,im")
    data = np.array([[float(x) for x in row] for row in rows[1:]])
    nu = data[:, 0]
    n = len(nu)
    dnu = (nu[-1] - nu[0]) / (n - 1)
    grid = SpectralGrid(float(nu[0]), float(nu[0] + n * dnu), n)
    if not np.allclose(grid.frequencies(), nu, rtol=0, atol=1e-9 * max(1.0, abs(dnu))):
        raise GridError("CSV frequencies are not on a uniform grid")
    return Wavepacket(grid, data[:, 1] + 1j * data[:, 2])


def to_json(wp: Wavepacket) -> str:
    return json.dumps(
        {
            "grid": wp.grid.to_dict(),
            "re": [float(x) for x in wp.spectral.real],
            "im": [float(x) for x in wp.spectral.imag],
        }
    )


def from_json(text: str) -> Wavepacket:
    data = json.loads(text)
    grid = SpectralGrid(**data["grid"])
    return Wavepacket(grid, np.asarray(data["re"]) + 1j * np.asarray(data["im"]))


def save(wp: Wavepacket, path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    text = to_json(wp) if fmt == "json" else to_csv(wp)
    path.write_text(text, encoding="utf-8")


def load(path, fmt: str | None = None) -> Wavepacket:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    text = path.read_text(encoding="utf-8")
    return from_json(text) if fmt == "json" else from_csv(text)
