"""quanprism: analysis of mixed unitary quantum channels.

Core surface: dense linear algebra helpers (:mod:`quanprism.linalg`),
states and fidelity (:mod:`quanprism.states`), channels and their
equivalences (:mod:`quanprism.channels`), preservation criteria
(:mod:`quanprism.preservation`), the general phase damping family
(:mod:`quanprism.dephasing`), and circuit synthesis
(:mod:`quanprism.circuits`).
"""

from .channels import (
    KrausChannel,
    MixedUnitaryChannel,
    apply,
    as_kraus,
    channels_equal,
    choi,
    choi_rank,
    complementary_apply,
    controlled_phase_damping,
    kraus_equivalent,
    local_operation,
    n_consecutive,
    tensor,
    tensor_factorization_check,
)
from .circuits import Circuit, Gate, circuit_to_channel, emit_text, gate_matrix, parse_text, synth_gpd
from .dephasing import (
    GPDChannel,
    amplitude_damping,
    coherence_multiplier,
    decoherence_sweep,
    depolarizing,
    from_phase_damping,
    make_gpd,
    phase_damping,
    preserved_set_probe,
    recognize_gpd,
    to_mixed_unitary,
)
from .preservation import (
    PreservationVerdict,
    RelativityValue,
    all_diagonal_criterion,
    diagonal_criterion_qubit,
    is_schur_channel,
    is_symmetric_pair,
    is_two_level,
    preserves_fidelity_direct,
    rank2_fidelity_criterion,
    rank_n_necessary_condition,
    relativity,
    subset_criterion,
    two_level_criterion_qutrit,
    unit_conjugate_test,
    uncorrelated_criterion,
)
from .states import (
    DensityOperator,
    PureState,
    Purification,
    cross_operator,
    density_of,
    fidelity,
    fidelity_pure,
    partial_trace,
    purify,
)

__version__ = "0.1.0"
