"""Simulation toolkit for dormant pair entanglement.

Submodules:

- core: dense statevector engine (states, gates, measurement, permutations)
- states: the psi3 / psiN / psi3L families, activation and destruction tables
- entanglement: density matrices, partial trace, PPT test, conditionals
- chsh: CHSH observables, sign patterns, rotation sweeps, level classification
- channel: the n-party collective channel protocol and teleportation
- cli: the `dormantsim` command line front end
"""
from . import channel, chsh, cli, core, entanglement, states
from .channel import (
    ChannelSession,
    ClassicalMessage,
    Party,
    ProtocolError,
    ResourcePlan,
    plan_resources,
    setup_session,
)
from .chsh import (
    ADMISSIBLE_PATTERNS,
    ALL_PATTERNS,
    CHSHResult,
    CHSHSetting,
    SignPattern,
    SweepSummary,
    classify,
    default_setting,
    rotated_setting,
    rotation_sweep,
)
from .core import (
    MeasurementRecord,
    PermutationMap,
    StateVector,
    Unitary1Q,
    apply_1q,
    apply_cx,
    apply_permutation,
    dump_amplitudes,
    fidelity,
    measure_qubit,
    new_basis_state,
    outcome_probability,
    random_unitary_1q,
)
from .entanglement import (
    CorrelationReport,
    DensityMatrix,
    conditional_report,
    density_from_state,
    lockless_deviation,
    no_signalling_check,
    partial_trace,
    ppt_min_eigenvalue,
)
from .states import (
    ActivationRow,
    ActivationTable,
    DormantFamily,
    activation_table,
    build_psi3,
    build_psi3_lock,
    build_psi_n,
    concurrence,
    destruction_check,
)

__version__ = "0.1.0"

__all__ = [
    "ADMISSIBLE_PATTERNS",
    "ALL_PATTERNS",
    "ActivationRow",
    "ActivationTable",
    "CHSHResult",
    "CHSHSetting",
    "ChannelSession",
    "ClassicalMessage",
    "CorrelationReport",
    "DensityMatrix",
    "DormantFamily",
    "MeasurementRecord",
    "Party",
    "PermutationMap",
    "ProtocolError",
    "ResourcePlan",
    "SignPattern",
    "StateVector",
    "SweepSummary",
    "Unitary1Q",
    "activation_table",
    "apply_1q",
    "apply_cx",
    "apply_permutation",
    "build_psi3",
    "build_psi3_lock",
    "build_psi_n",
    "channel",
    "chsh",
    "classify",
    "cli",
    "concurrence",
    "conditional_report",
    "core",
    "default_setting",
    "density_from_state",
    "destruction_check",
    "dump_amplitudes",
    "entanglement",
    "fidelity",
    "lockless_deviation",
    "measure_qubit",
    "new_basis_state",
    "no_signalling_check",
    "outcome_probability",
    "partial_trace",
    "plan_resources",
    "ppt_min_eigenvalue",
    "random_unitary_1q",
    "rotated_setting",
    "rotation_sweep",
    "setup_session",
    "states",
]
