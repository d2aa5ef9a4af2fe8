"""Controlled-phase photon gate from off-resonant scattering on a three-level atom in a cavity."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    ParameterError,
    PhysicalParams,
    ScatteringPhase,
    matched_params,
    matching_delta,
    matching_g,
    scattering_phase,
    validate,
)
from .wavepacket import (  # noqa: E402
    GridError,
    SpectralGrid,
    Wavepacket,
    make_gaussian,
    make_rising_exponential,
    overlap,
    transform_to_frequency,
    transform_to_time,
)
from .transfer import (  # noqa: E402
    Branch,
    ScatteringResponse,
    branch_overlap,
    group_delay,
    reflection_exact,
    reflection_narrowband,
    reflection_printed,
    response_on_grid,
    scatter_spectrum,
)
from .dynamics import (  # noqa: E402
    AmplitudeTrajectory,
    SolverOptions,
    frequency_domain_residual,
    integrate_branch,
    output_pulse,
)
from .protocol import (  # noqa: E402
    GateResult,
    StorageModel,
    fidelity_vs_cz,
    gate_truth_table,
    run_gate,
    storage_map,
)
