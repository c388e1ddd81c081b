"""phaselab: a numerical lab for phase-oracle query bounds.

Simulates oracle-aided query algorithms against families of commuting phase
unitaries, in both the fixed-label and purified (counter-register) views,
and verifies the exact finite-size facts behind the (q+1)/n success ceiling:
counter-spectrum sparsity, bound tightness, the basis-change identity of the
maximally correlated state, and the rounding reduction from estimation to
distinguishing.
"""

from ._version import __version__
from .algorithms import (
    EprPair,
    PhaseEstimate,
    ReducedPdSolver,
    build_cemm,
    build_truncated_optimal,
    cemm_on_continuous_phase,
    epr_fourier_deviation,
    epr_state,
    phase_distance,
    reduction_estimator_to_pd,
    round_to_grid,
    threshold_toggle,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    ResultRow,
    VerificationError,
    adversarial_search,
    run_experiment,
)
from .fourier import (
    FourierBasisIndex,
    conjugate_fourier_state,
    fourier_state,
    fourier_weights,
    phase_gradient,
    qft_matrix,
)
from .linalg import (
    RegisterLayout,
    StateVector,
    UnitaryMatrix,
    apply_to_registers,
    basis_state,
    complete_orthonormal_basis,
    haar_random_unitary,
    inner_product,
    projection_norm_sq,
    zero_state,
)
from .oracles import (
    FORWARD,
    INVERSE,
    PhaseInstance,
    PhaseOracleFamily,
    QueryKind,
    coherent_controlled_u,
    controlled_u,
    default_family,
    phase_unitary,
    u_y_matrix,
)
from .simulate import (
    QueryAlgorithm,
    RunTranscript,
    counter_leakage,
    counter_leakage_outside,
    haar_random_algorithm,
    reachable_counter_values,
    run_fixed_phase,
    run_fixed_y,
    run_purified,
    run_purified_transcript,
    standard_layout,
    success_probability_average,
    success_probability_purified,
)

__all__ = [name for name in dir() if not name.startswith("_")]
