"""Frequency-domain reflection of a single photon from the one-sided cavity.

For the atom parked in ground state ``|1>`` or ``|2>`` the cavity reflects
the rotating-frame component ``nu`` with coefficient ``r_n(nu)``::

    s_1 = 2 g^2 / (kappa (delta + nu + i gamma))
    r_1 = (1 + 2i nu/kappa - i s_1) / (1 - 2i nu/kappa + i s_1)

    s_2 = 2 g^2 / (kappa (delta - nu - i gamma))
    r_2 = (1 + 2i nu/kappa + i s_2) / (1 - 2i nu/kappa - i s_2)

At ``nu = 0`` and ``gamma = 0`` these reduce to ``exp(-2i phi)`` and
``exp(+2i phi)`` with ``tan(phi) = 2 g^2 / (kappa delta)``. They are the
steady-state response of the passive amplitude equations in
:mod:`cavity_cz.dynamics`, so ``|r_n| <= 1`` and ``|r_n| = 1`` when
``gamma = 0``.

:func:`reflection_printed` keeps the variant in which the two susceptibility
factors ``(delta -/+ nu -/+ i gamma)`` are attached to the opposite branches.
It agrees with the forms above at ``nu = 0, gamma = 0`` but amplifies for
``gamma > 0`` and has a pole in the upper half plane; it is kept for
comparison only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import PhysicalParams, validate
from .wavepacket import SpectralGrid, Wavepacket

POLE_GUARD = 1e-300


class SingularParametersError(ArithmeticError):
    """Raised when a reflection denominator vanishes."""


class Branch(enum.IntEnum):
    """Atomic ground state holding the stored control excitation."""

    ATOM1 = 1
    ATOM2 = 2

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, Branch):
            return value
        if isinstance(value, str):
            key = value.strip().lower().replace("atom", "")
            return cls(int(key))
        return cls(int(value))


@dataclass(frozen=True, eq=False)
class ScatteringResponse:
    grid: SpectralGrid
    r: np.ndarray
    branch: Branch
    params: PhysicalParams


def _reflect(params: PhysicalParams, branch: Branch, nu, swapped: bool):
    nu = np.asarray(nu, dtype=float)
    g, k, d, gm = params.g, params.kappa, params.delta, params.gamma
    coupling = 2.0 * g**2 / k
    # numerator and denominator multiplied through by q to clear the atomic pole
    if (branch == Branch.ATOM1) != swapped:
        q = d + nu + 1j * gm
    else:
        q = d - nu - 1j * gm
    if coupling == 0:
        q = 1.0
    sign = -1.0 if branch == Branch.ATOM1 else 1.0
    num = (1 + 2j * nu / k) * q + sign * 1j * coupling
    den = (1 - 2j * nu / k) * q - sign * 1j * coupling
    if np.any(np.abs(den) < POLE_GUARD):
        raise SingularParametersError(
            f"reflection denominator vanishes for branch {int(branch)} at {params}"
        )
    r = num / den
    return complex(r) if r.ndim == 0 else r


def reflection_exact(params: PhysicalParams, branch, nu):
    """Reflection coefficient ``r_n(nu)``; ``nu`` may be a scalar or an array."""
    validate(params, allow_uncoupled=True)
    return _reflect(params, Branch.parse(branch), nu, swapped=False)


def reflection_printed(params: PhysicalParams, branch, nu):
    """Variant with the susceptibility factors exchanged between branches."""
    validate(params, allow_uncoupled=True)
    return _reflect(params, Branch.parse(branch), nu, swapped=True)


def reflection_narrowband(params: PhysicalParams, branch) -> complex:
    """Narrow-spectrum limit ``exp(-/+ 2i phi)``, independent of ``nu`` and ``gamma``."""
    validate(params, allow_uncoupled=True)
    phi = math.atan(2.0 * params.g**2 / (params.kappa * params.delta))
    sign = -1.0 if Branch.parse(branch) == Branch.ATOM1 else 1.0
    return complex(np.exp(sign * 2j * phi))


def response_on_grid(params: PhysicalParams, branch, grid: SpectralGrid) -> ScatteringResponse:
    branch = Branch.parse(branch)
    r = np.asarray(reflection_exact(params, branch, grid.frequencies()), dtype=complex)
    r.setflags(write=False)
    return ScatteringResponse(grid=grid, r=r, branch=branch, params=params)


def scatter_spectrum(params: PhysicalParams, branch, wp: Wavepacket) -> Wavepacket:
    """Reflected wavepacket ``r(nu) f(nu)`` (not renormalized)."""
    resp = response_on_grid(params, branch, wp.grid)
    return Wavepacket(wp.grid, resp.r * wp.spectral)


def branch_overlap(params: PhysicalParams, branch, wp: Wavepacket, reference_delay: float = 0.0) -> complex:
    """Amplitude for the reflected photon to stay in the input mode.

    ``sum r(nu) |f(nu)|^2 dnu``. A nonzero ``reference_delay`` projects onto the
    input pulse shifted later in time by that amount instead.
    """
    resp = response_on_grid(params, branch, wp.grid)
    weights = np.abs(wp.spectral) ** 2
    if reference_delay:
        weights = weights * np.exp(-1j * wp.grid.frequencies() * reference_delay)
    return complex(np.sum(resp.r * weights) * wp.grid.dnu)


def group_delay(params: PhysicalParams, branch, nu: float = 0.0) -> float:
    """``d arg r / d nu``: the time by which a narrow pulse at ``nu`` is delayed."""
    scale = min(params.kappa, abs(params.delta), params.gamma or math.inf)
    h = 1e-5 * scale
    r_hi = reflection_exact(params, branch, nu + h)
    r_lo = reflection_exact(params, branch, nu - h)
    return float(np.angle(r_hi / r_lo) / (2 * h))
