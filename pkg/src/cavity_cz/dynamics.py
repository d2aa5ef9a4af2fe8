"""Time-domain amplitude equations, used as an independent check of :mod:`transfer`.

With the atom in ground state ``|n>`` the intracavity amplitude ``chi`` and
the atomic coherence ``xi`` obey::

    d chi / dt = -(kappa/2) chi - i g xi + sqrt(kappa) f_in(t)
    d xi / dt  = -(gamma - i s_n delta) xi - i g chi,    s_1 = +1, s_2 = -1

and the reflected field is ``f_out = sqrt(kappa) chi - f_in``. Driving with a
tone ``exp(-i nu t)`` gives ``f_out / f_in = r_n(nu)`` exactly as written in
:mod:`cavity_cz.transfer`. The coupling is Hermitian and ``gamma`` only
removes amplitude, so the system is stable and passive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .model import PhysicalParams, validate
from .transfer import Branch, scatter_spectrum
from .wavepacket import GridError, Wavepacket, time_to_freq, transform_to_frequency

EDGE_TOL = 1e-6
TRANSIENT_TOL = 1e-8


class IntegrationError(RuntimeError):
    """The ODE solver failed; ``t_fail`` is the last time it reached."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (at t = {t_fail:.6g})")
        self.t_fail = t_fail


class TransientError(RuntimeError):
    """The cavity was still ringing at the end of the time window."""


@dataclass(frozen=True)
class SolverOptions:
    rtol: float = 1e-10
    atol: float = 1e-10
    method: str = "DOP853"
    # in units of the grid time step; limits how far a step can jump over the pulse
    max_step_samples: float = 4.0


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    params: PhysicalParams
    branch: Branch
    input: Wavepacket
    t: np.ndarray
    chi: np.ndarray
    xi: np.ndarray
    f_in: np.ndarray
    f_out: np.ndarray
    nfev: int = 0

    def input_norm(self) -> float:
        return float(np.sum(np.abs(self.f_in) ** 2) * self.input.grid.dt)

    def output_norm(self) -> float:
        return float(np.sum(np.abs(self.f_out) ** 2) * self.input.grid.dt)


def ringdown_rate(params: PhysicalParams) -> float:
    """Slowest amplitude decay rate of the coupled cavity-atom modes, over both branches."""
    if params.g == 0:
        return 0.5 * params.kappa
    rates = []
    for s in (1.0, -1.0):
        drift = np.array([[-0.5 * params.kappa, -1j * params.g],
                          [-1j * params.g, -(params.gamma - 1j * s * params.delta)]])
        rates.append(-np.max(np.linalg.eigvals(drift).real))
    return float(min(rates))


def auto_window(params: PhysicalParams, pulse_scale: float) -> float:
    """Half window holding a pulse of spectral scale ``pulse_scale`` plus the ringdown.

    The pulse is allowed ``8 / pulse_scale`` on each side; after it the slowest
    mode needs ``ln(1 / TRANSIENT_TOL) / rate`` to fall below the transient limit.
    """
    tail = 8.0 / pulse_scale + math.log(1.0 / TRANSIENT_TOL) / ringdown_rate(params)
    return max(tail, 20.0 / params.kappa)


def _check_window(params: PhysicalParams, wp: Wavepacket, f_in: np.ndarray) -> None:
    grid = wp.grid
    if grid.half_window < 20.0 / params.kappa:
        raise GridError(
            f"time window +/-{grid.half_window:.4g} is shorter than 20/kappa; "
            "use a finer spectral spacing"
        )
    peak = np.max(np.abs(f_in))
    if peak == 0:
        return
    n_edge = max(1, grid.n_points // 64)
    edge = max(np.max(np.abs(f_in[:n_edge])), np.max(np.abs(f_in[-n_edge:])))
    if edge > EDGE_TOL * peak:
        raise GridError(
            f"input pulse reaches the edge of the time window (edge/peak = {edge / peak:.2e}); "
            "use a finer spectral spacing"
        )


def integrate_branch(
    params: PhysicalParams,
    branch,
    input: Wavepacket,
    solver: SolverOptions = SolverOptions(),
) -> AmplitudeTrajectory:
    """Integrate from vacuum over the conjugate time window of ``input.grid``."""
    validate(params, allow_uncoupled=True)
    branch = Branch.parse(branch)
    grid = input.grid
    t = grid.times()
    f_in = np.asarray(input.temporal_amplitudes)
    _check_window(params, input, f_in)

    # demodulate by the grid centre so the spline sees a baseband signal
    carrier = 0.5 * (grid.nu_min + grid.nu_max)
    drive = CubicSpline(t, f_in * np.exp(1j * carrier * t))

    g, kappa, gamma = params.g, params.kappa, params.gamma
    s = 1.0 if branch == Branch.ATOM1 else -1.0
    atom_rate = gamma - 1j * s * params.delta
    sqrt_kappa = math.sqrt(kappa)

    def rhs(time, y):
        chi, xi = y
        fin = drive(time) * np.exp(-1j * carrier * time)
        return np.array(
            [-0.5 * kappa * chi - 1j * g * xi + sqrt_kappa * fin, -atom_rate * xi - 1j * g * chi]
        )

    sol = solve_ivp(
        rhs,
        (t[0], t[-1]),
        np.zeros(2, dtype=complex),
        method=solver.method,
        t_eval=t,
        rtol=solver.rtol,
        atol=solver.atol,
        max_step=solver.max_step_samples * grid.dt,
    )
    if not sol.success:
        t_fail = float(sol.t[-1]) if sol.t.size else float(t[0])
        raise IntegrationError(f"integration failed: {sol.message}", t_fail)
    chi, xi = sol.y
    f_out = sqrt_kappa * chi - f_in
    return AmplitudeTrajectory(
        params=params, branch=branch, input=input, t=t, chi=chi, xi=xi,
        f_in=f_in, f_out=f_out, nfev=int(sol.nfev),
    )


def output_pulse(traj: AmplitudeTrajectory) -> tuple[Wavepacket, float]:
    """Reflected pulse as a normalized wavepacket, plus its norm before normalizing."""
    scale = math.sqrt(max(traj.input_norm(), 1e-300))
    if abs(traj.chi[-1]) > TRANSIENT_TOL * scale:
        raise TransientError(
            f"cavity amplitude {abs(traj.chi[-1]):.2e} at the end of the window has not decayed; "
            "use a longer time window"
        )
    out = transform_to_frequency(traj.input.grid, traj.f_out)
    norm = out.norm()
    if norm == 0:
        return out, 0.0
    return out.normalized(), norm


def output_spectrum(traj: AmplitudeTrajectory) -> np.ndarray:
    """Spectrum of the time-domain reflected field, unnormalized."""
    return time_to_freq(traj.input.grid, traj.f_out)


def frequency_domain_residual(
    params: PhysicalParams,
    branch,
    input: Wavepacket,
    solver: SolverOptions = SolverOptions(),
) -> float:
    """Relative L2 distance between time-domain and transfer-function outputs."""
    traj = integrate_branch(params, branch, input, solver)
    from_time = output_spectrum(traj)
    from_freq = scatter_spectrum(params, branch, input).spectral
    return float(np.linalg.norm(from_time - from_freq) / np.linalg.norm(from_freq))
