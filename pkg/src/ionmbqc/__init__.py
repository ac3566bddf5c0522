"""Graph-state MBQC toolkit: dense simulation kernel, ion-pulse compiler,
measurement patterns with feedforward, phase-flip QEC, Bell-operator tests,
and maximum-likelihood tomography."""

from .core import (
    BranchRecord,
    CoreError,
    DensityMatrix,
    MeasurementBasis,
    NoiseChannel,
    StateVector,
    apply_channel,
    apply_unitary,
    dephase,
    depolarize,
    fidelity,
    measure,
    partial_trace,
    purity,
    tangle,
)
from .pauli import PauliString
from .graphs import (
    BellReport,
    CorrectionTable,
    GraphSpec,
    StabilizerSet,
    apply_correction_table,
    bell_expectation,
    build_graph_state,
    ecn_graph,
    ghz_graph,
    lc4_graph,
    lhv_bound,
    rc4_graph,
    reinterpret_pauli_setting,
    stabilizer_group,
)
from .pulses import (
    PhysicalParams,
    PulsePrimitive,
    PulseSequence,
    compile_graph,
    ms_unitary,
    simulate_sequence,
    theta_from_physics,
)
from .mbqc import (
    PatternResult,
    aggregate_branches,
    equivalent_circuit_single,
    equivalent_circuit_two,
    run_single_qubit_pattern,
    run_two_qubit_pattern,
)
from .qec import (
    ATFReport,
    ECLayout,
    ErrorSpec,
    atf,
    build_ec_state,
    decode_and_recover,
    encode_input,
    ideal_atf_curve,
    inject_errors,
    noise_robustness_study,
)
from .tomography import (
    CountsTable,
    MeasurementSettings,
    ReconstructionResult,
    bell_from_counts,
    mc_error_bar,
    mle_reconstruct,
    sample_counts,
)

__version__ = "0.1.0"
