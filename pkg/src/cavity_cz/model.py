"""Physical parameters of the atom-cavity system and the closed-form scattering phase.

All rates (``g``, ``kappa``, ``delta``, ``gamma``) share one arbitrary unit;
only ratios such as ``2 g**2 / (kappa * delta)`` enter the physics. The usual
convention in this package is ``kappa = 1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Mapping

PARAM_KEYS = ("g", "kappa", "delta", "gamma", "omega0")


class ParameterError(ValueError):
    """Raised when a physical parameter violates its invariant."""


@dataclass(frozen=True)
class PhysicalParams:
    """Rates defining one scattering problem.

    Attributes:
        g: atom-cavity coupling rate.
        kappa: cavity field decay rate into the input/output channel.
        delta: ground-state splitting, also the symmetric detuning span of the
            two optical transitions around the cavity frequency.
        gamma: phenomenological decay rate of the atomic coherence.
        omega0: cavity reference frequency. Bookkeeping only; everything is
            computed in the frame rotating at ``omega0``.
    """

    g: float
    kappa: float
    delta: float
    gamma: float = 0.0
    omega0: float = 0.0

    @property
    def cooperativity_ratio(self) -> float:
        """``2 g**2 / (kappa * delta)``; equal to one at the matching point."""
        return 2.0 * self.g**2 / (self.kappa * self.delta)

    def replace(self, **changes: float) -> "PhysicalParams":
        values = asdict(self)
        values.update(changes)
        return PhysicalParams(**values)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PhysicalParams":
        unknown = set(data) - set(PARAM_KEYS)
        if unknown:
            raise ParameterError(f"unknown parameter key(s): {', '.join(sorted(unknown))}")
        missing = {"g", "kappa", "delta"} - set(data)
        if missing:
            raise ParameterError(f"missing parameter key(s): {', '.join(sorted(missing))}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class ScatteringPhase:
    """Single-branch scattering phase ``phi`` and the conditional phase ``4 phi``."""

    phi: float
    controlled_phase: float


def validate(params: PhysicalParams, *, allow_uncoupled: bool = False) -> PhysicalParams:
    """Check the parameter invariants and return ``params`` unchanged.

    ``allow_uncoupled`` admits ``g == 0`` (empty-cavity reference runs); the
    strict form requires ``g > 0``.
    """
    for name in ("g", "kappa", "delta", "gamma", "omega0"):
        if not math.isfinite(getattr(params, name)):
            raise ParameterError(f"{name} must be finite")
    if allow_uncoupled:
        if params.g < 0:
            raise ParameterError("g must be non-negative")
    elif params.g <= 0:
        raise ParameterError("g must be positive")
    if params.kappa <= 0:
        raise ParameterError("kappa must be positive")
    if params.gamma < 0:
        raise ParameterError("gamma must be non-negative")
    if params.delta == 0:
        raise ParameterError("delta must be nonzero")
    return params


def scattering_phase(params: PhysicalParams) -> ScatteringPhase:
    """Return ``phi = arctan(2 g^2 / (kappa delta))`` and ``4 phi``.

    >>> scattering_phase(PhysicalParams(g=1, kappa=2, delta=1)).controlled_phase
    3.141592653589793

    Only ``g**2`` enters, so the sign of ``g`` is irrelevant here.
    """
    validate(params.replace(g=abs(params.g)), allow_uncoupled=True)
    phi = math.atan(2.0 * params.g**2 / (params.kappa * params.delta))
    return ScatteringPhase(phi=phi, controlled_phase=4.0 * phi)


def matching_g(kappa: float, delta: float) -> float:
    """Coupling that satisfies the matching condition ``2 g^2 = kappa delta``."""
    if kappa <= 0:
        raise ParameterError("kappa must be positive")
    if delta <= 0:
        raise ParameterError("delta must be positive for the matching condition")
    return math.sqrt(kappa * delta / 2.0)


def matching_delta(g: float, kappa: float) -> float:
    """Splitting that satisfies the matching condition, ``2 g^2 / kappa``."""
    if g <= 0:
        raise ParameterError("g must be positive")
    if kappa <= 0:
        raise ParameterError("kappa must be positive")
    return 2.0 * g**2 / kappa


def matched_params(kappa: float = 1.0, delta: float = 1.0, gamma: float = 0.0) -> PhysicalParams:
    """Convenience constructor for a parameter set on the matching condition."""
    return PhysicalParams(g=matching_g(kappa, delta), kappa=kappa, delta=delta, gamma=gamma)
