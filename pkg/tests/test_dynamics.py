import math
from types import SimpleNamespace

import numpy as np
import pytest

from cavity_cz import PhysicalParams, SpectralGrid, make_gaussian
from cavity_cz import dynamics
from cavity_cz.dynamics import (
    IntegrationError,
    SolverOptions,
    TransientError,
    frequency_domain_residual,
    integrate_branch,
    output_pulse,
    output_spectrum,
)
from cavity_cz.wavepacket import GridError, Wavepacket, time_to_freq, transform_to_frequency


@pytest.fixture
def ref_grid():
    # 4096 points on [-16 kappa, 16 kappa) for kappa = 2
    return SpectralGrid(-32.0, 32.0, 4096)


@pytest.fixture
def ref_pulse(ref_grid):
    return make_gaussian(ref_grid, 0.0, 2.0 / 50)


def test_zero_input(matched, ref_grid):
    silent = Wavepacket(ref_grid, np.zeros(ref_grid.n_points, dtype=complex))
    traj = integrate_branch(matched, 1, silent)
    assert np.all(traj.chi == 0) and np.all(traj.xi == 0) and np.all(traj.f_out == 0)


def test_empty_cavity_response(ref_grid):
    empty = PhysicalParams(0.0, 2.0, 1.0)
    wp = make_gaussian(ref_grid, 0.0, 1.0)
    traj = integrate_branch(empty, 1, wp)
    nu = ref_grid.frequencies()
    band = np.abs(nu) < 3.0
    chi_spec = time_to_freq(ref_grid, traj.chi)
    gain = chi_spec[band] / wp.spectral[band]
    expected = math.sqrt(2.0) / (1.0 - 1j * nu[band])
    assert np.max(np.abs(gain / expected - 1)) < 5e-5
    assert np.all(traj.xi == 0)


@pytest.mark.parametrize("branch", [1, 2])
def test_energy_conserved_without_loss(matched, ref_pulse, branch):
    traj = integrate_branch(matched, branch, ref_pulse)
    assert traj.output_norm() == pytest.approx(traj.input_norm(), abs=1e-8)


def test_loss_ladder_monotone(matched, ref_grid):
    wp = make_gaussian(ref_grid, 0.0, 0.5)
    norms = []
    for gamma in (0.0, 0.01, 0.05, 0.2, 1.0):
        _, norm = output_pulse(integrate_branch(matched.replace(gamma=gamma), 1, wp))
        norms.append(norm)
    assert norms[0] == pytest.approx(1.0, abs=1e-8)
    assert all(a > b for a, b in zip(norms, norms[1:]))


def test_large_loss_still_reflects(matched, ref_pulse):
    # a strongly damped atom detunes nothing: the photon leaves the empty cavity
    out, norm = output_pulse(integrate_branch(matched.replace(gamma=100.0), 1, ref_pulse))
    assert 0.9 < norm <= 1.0
    assert np.all(np.isfinite(out.spectral))


@pytest.mark.parametrize("gamma", [0.0, 0.02])
@pytest.mark.parametrize("branch", [1, 2])
def test_residual_against_transfer(matched, ref_pulse, gamma, branch):
    assert frequency_domain_residual(matched.replace(gamma=gamma), branch, ref_pulse) < 1e-6


def test_residual_uncoupled(ref_pulse):
    assert frequency_domain_residual(PhysicalParams(0.0, 2.0, 1.0), 1, ref_pulse) < 1e-8


def test_residual_coarse_tolerance(matched, ref_pulse):
    coarse = SolverOptions(rtol=1e-6, atol=1e-9)
    assert frequency_domain_residual(matched, 1, ref_pulse, coarse) < 1e-3


def test_linearity(matched, ref_grid):
    a = make_gaussian(ref_grid, 0.0, 0.3)
    b = make_gaussian(ref_grid, 1.0, 0.5)
    ca, cb = 0.6 - 0.2j, -1.1j
    mix = Wavepacket(ref_grid, ca * a.spectral + cb * b.spectral)
    out = lambda wp: integrate_branch(matched, 2, wp).f_out
    combined = ca * out(a) + cb * out(b)
    assert np.max(np.abs(out(mix) - combined)) < 1e-6 * np.max(np.abs(combined))


def test_causality(matched, ref_grid):
    t = ref_grid.times()
    early = np.exp(-((t + 30.0) ** 2) / 8.0)
    late = early + 0.5 * np.exp(-((t - 30.0) ** 2) / 8.0)
    out_early = integrate_branch(matched, 1, transform_to_frequency(ref_grid, early)).f_out
    out_late = integrate_branch(matched, 1, transform_to_frequency(ref_grid, late)).f_out
    before = t < 0.0
    assert np.max(np.abs(out_early[before] - out_late[before])) < 1e-9


def test_output_spectrum_matches_pulse(matched, ref_pulse):
    traj = integrate_branch(matched, 1, ref_pulse)
    out, norm = output_pulse(traj)
    assert np.allclose(out.spectral * math.sqrt(norm), output_spectrum(traj), atol=1e-12)


def test_transient_detected():
    grid = SpectralGrid.for_window(25.0, 1024)
    wp = make_gaussian(grid, 0.0, 0.5)
    traj = integrate_branch(PhysicalParams(0.5, 1.0, 1.0), 1, wp)
    with pytest.raises(TransientError, match="longer time window"):
        output_pulse(traj)


def test_short_window_rejected(matched):
    grid = SpectralGrid.for_window(5.0, 256)
    wp = make_gaussian(grid, 0.0, 2.0)
    with pytest.raises(GridError, match="20/kappa"):
        integrate_branch(matched, 1, wp)


def test_pulse_at_window_edge_rejected(matched):
    grid = SpectralGrid.for_window(20.0, 1024)
    wp = make_gaussian(grid, 0.0, 0.1)
    with pytest.raises(GridError, match="edge"):
        integrate_branch(matched, 1, wp)


def test_solver_failure_reported(matched, ref_pulse, monkeypatch):
    def failing(*args, **kwargs):
        return SimpleNamespace(success=False, message="step size too small", t=np.array([-3.5]))

    monkeypatch.setattr(dynamics, "solve_ivp", failing)
    with pytest.raises(IntegrationError) as info:
        integrate_branch(matched, 1, ref_pulse)
    assert info.value.t_fail == -3.5


def test_ringdown_rate(matched):
    # the slow dressed mode at the matching point decays far slower than kappa/2
    assert dynamics.ringdown_rate(matched) == pytest.approx(0.25706586, rel=1e-6)
    assert dynamics.ringdown_rate(PhysicalParams(0.0, 2.0, 1.0)) == 1.0


def test_auto_window_holds_ringdown(matched):
    wp_width = 0.5
    grid = SpectralGrid.for_window(dynamics.auto_window(matched, wp_width), 4096)
    wp = make_gaussian(grid, 0.0, wp_width)
    out, norm = output_pulse(integrate_branch(matched, 1, wp))
    assert norm == pytest.approx(1.0, abs=1e-8)
    assert frequency_domain_residual(matched, 1, wp) < 1e-6
