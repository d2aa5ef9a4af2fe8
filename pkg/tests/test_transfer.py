import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cavity_cz import PhysicalParams, SpectralGrid, scattering_phase
from cavity_cz.transfer import (
    Branch,
    branch_overlap,
    group_delay,
    reflection_exact,
    reflection_narrowband,
    reflection_printed,
    response_on_grid,
    scatter_spectrum,
)

from helpers import gaussian_on_own_grid, random_params

positive = st.floats(min_value=0.05, max_value=20.0)


def test_matched_point_values(matched):
    assert abs(reflection_exact(matched, 1, 0.0) - (-1j)) < 1e-14
    assert abs(reflection_exact(matched, 2, 0.0) - 1j) < 1e-14


def test_printed_variant_agrees_on_resonance(matched):
    for b in (1, 2):
        assert reflection_printed(matched, b, 0.0) == pytest.approx(reflection_exact(matched, b, 0.0), abs=1e-14)


def test_printed_variant_amplifies_with_loss(matched):
    nu = np.linspace(-30, 30, 20001)
    lossy = matched.replace(gamma=0.2)
    assert np.max(np.abs(reflection_printed(lossy, 1, nu))) > 1.5
    assert np.max(np.abs(reflection_exact(lossy, 1, nu))) <= 1.0


def test_branch_parse():
    assert Branch.parse("atom2") is Branch.ATOM2
    assert Branch.parse(1) is Branch.ATOM1
    with pytest.raises(ValueError):
        Branch.parse(3)


@settings(max_examples=200, deadline=None)
@given(positive, positive, positive, st.floats(min_value=-50, max_value=50), st.sampled_from([1, 2]))
def test_unitary_without_loss(g, kappa, delta, nu, b):
    r = reflection_exact(PhysicalParams(g, kappa, delta), b, nu)
    assert abs(abs(r) - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(positive, positive, positive, st.floats(min_value=1e-3, max_value=10),
       st.floats(min_value=-50, max_value=50), st.sampled_from([1, 2]))
def test_passive_with_loss(g, kappa, delta, gamma, nu, b):
    r = reflection_exact(PhysicalParams(g, kappa, delta, gamma), b, nu)
    assert abs(r) <= 1 + 1e-12


@settings(max_examples=100, deadline=None)
@given(positive, positive, positive, st.floats(min_value=0, max_value=5), st.floats(min_value=-20, max_value=20))
def test_branch_mirror_symmetry(g, kappa, delta, gamma, nu):
    # exchanging the branches mirrors the spectrum and conjugates the response
    p = PhysicalParams(g, kappa, delta, gamma)
    r1 = reflection_exact(p, 1, nu)
    r2 = reflection_exact(p, 2, -nu)
    assert r1 == pytest.approx(r2.conjugate(), rel=1e-12, abs=1e-12)


def test_resonant_phase_identity():
    rng = np.random.default_rng(3)
    for p in random_params(rng, 50):
        phi = scattering_phase(p).phi
        assert cmath.phase(reflection_exact(p, 1, 0.0)) == pytest.approx(-2 * phi, abs=1e-12)
        assert cmath.phase(reflection_exact(p, 2, 0.0)) == pytest.approx(2 * phi, abs=1e-12)
        assert reflection_narrowband(p, 1) == pytest.approx(reflection_exact(p, 1, 0.0), abs=1e-12)


def test_narrowband_independent_of_loss(matched):
    assert reflection_narrowband(matched.replace(gamma=0.5), 2) == reflection_narrowband(matched, 2)


def test_uncoupled_cavity():
    empty = PhysicalParams(0.0, 2.0, 1.0)
    nu = np.linspace(-5, 5, 11)
    expected = (1 + 1j * nu) / (1 - 1j * nu)
    for b in (1, 2):
        assert np.allclose(reflection_exact(empty, b, nu), expected, atol=1e-14)
    wp = gaussian_on_own_grid(0.5)
    c1, c2 = (branch_overlap(empty, b, wp) for b in (1, 2))
    assert c1 == pytest.approx(c2, abs=1e-14)
    assert abs(c1.imag) < 1e-14


def test_response_grid_read_only(matched):
    resp = response_on_grid(matched, 1, SpectralGrid(-1, 1, 16))
    with pytest.raises(ValueError):
        resp.r[0] = 0


def test_finite_on_atomic_resonance(matched):
    # nu = -delta (branch 1) and nu = +delta (branch 2) hit the bare atomic pole
    assert reflection_exact(matched, 1, -matched.delta) == pytest.approx(-1, abs=1e-14)
    assert reflection_exact(matched, 2, matched.delta) == pytest.approx(-1, abs=1e-14)


@pytest.mark.parametrize("b", [1, 2])
def test_overlap_matches_quadrature(matched, b):
    w = 0.3
    wp = gaussian_on_own_grid(w, n_points=4096)
    norm = 1 / (math.sqrt(math.pi) * w)

    def integrand(nu, part):
        val = reflection_exact(matched, b, nu) * norm * math.exp(-(nu**2) / w**2)
        return val.real if part == 0 else val.imag

    lim = 16 * w
    ref = complex(quad(integrand, -lim, lim, args=(0,), epsabs=1e-13)[0],
                  quad(integrand, -lim, lim, args=(1,), epsabs=1e-13)[0])
    assert branch_overlap(matched, b, wp) == pytest.approx(ref, abs=1e-10)


def test_narrow_pulse_modulus_deficit(matched):
    # width kappa/100: the deficit is set by the group delay, tau^2 w^2 / 4
    wp = gaussian_on_own_grid(matched.kappa / 100, n_points=4096)
    tau = group_delay(matched, 1)
    assert tau == pytest.approx(2.0, rel=1e-8)
    for b in (1, 2):
        c = branch_overlap(matched, b, wp)
        assert 1 - abs(c) == pytest.approx(4.0004e-4, rel=1e-3)
        assert 1 - abs(c) == pytest.approx(tau**2 * (matched.kappa / 100) ** 2 / 4, rel=1e-2)


def test_delay_compensated_overlap(matched):
    wp = gaussian_on_own_grid(matched.kappa / 100, n_points=4096)
    c = branch_overlap(matched, 1, wp, reference_delay=group_delay(matched, 1))
    assert 1 - abs(c) < 1e-6


def test_scatter_spectrum_preserves_norm(matched):
    wp = gaussian_on_own_grid(0.5, n_points=2048)
    out = scatter_spectrum(matched, 1, wp)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    lossy = scatter_spectrum(matched.replace(gamma=0.1), 1, wp)
    assert lossy.norm() < 1.0


def test_overlap_converges_to_narrowband(matched):
    errors = []
    for w in (0.2, 0.02, 0.002):
        wp = gaussian_on_own_grid(w)
        errors.append(abs(branch_overlap(matched, 1, wp) - reflection_narrowband(matched, 1)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-4


@pytest.mark.parametrize("b, expected", [(1, -1j), (2, 1j)])
def test_very_narrow_overlap(matched, b, expected):
    wp = gaussian_on_own_grid(matched.kappa / 1000, n_points=4096)
    assert abs(branch_overlap(matched, b, wp) - expected) < 1e-4
