"""Trapped ion in a cavity, beyond the Lamb-Dicke regime.

A small numpy library that builds the three-subsystem model
(vibration x cavity x two-level ion) in a truncated Fock basis, dresses it
with the displacement transformation that diagonalizes the coupling at every
Lamb-Dicke parameter, runs the pulse-and-measure protocol that prepares even
and odd motional cat states, and cross-checks every closed form against
brute-force spectral evolution.
"""

from .linalg import (
    DEFAULT_TOLS,
    MAX_TOTAL_DIM,
    Tolerances,
    fidelity,
    herm_eig,
    hermiticity_defect,
    kron,
    max_abs,
    propagator,
    unitarity_defect,
)
from .spaces import (
    EXCITED,
    GROUND,
    GUARD_DEFAULT,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    Operator,
    PureState,
    SpaceSignature,
    TruncationScheme,
    annihilation,
    apply,
    coherent_amplitude_bound,
    coherent_leakage,
    coherent_state,
    compose,
    cos_position,
    displacement,
    embed,
    fock_state,
    guard_band_resident,
    interior_block,
    number,
    parity_diag,
    phase_of_position,
    position,
    product_state,
)
from .model import (
    DRIVE_RATIO_THRESHOLD,
    LAMB_DICKE_THRESHOLD,
    RegimeReport,
    SystemParams,
    build_h_full,
    build_h_regime,
    build_h_transformed,
    build_t,
    regime_report,
)
from .dynamics import (
    PULSE_V,
    CatProtocolRecord,
    CatState,
    CollapseResult,
    Observables,
    TrajectoryRecord,
    TruncationError,
    ValidationReport,
    analytic_propagator,
    analytic_state,
    apply_pulse_v,
    cat_protocol,
    cat_state,
    collapse_measure,
    evolve_numeric,
    initial_state,
    observables,
    phase_space_grid,
    validation_run,
    wigner_grid,
)

__version__ = "0.1.0"
