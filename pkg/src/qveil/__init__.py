"""qveil: client-side quantum circuit encryption and structure obfuscation.

Pipeline: one-time-pad encrypt (key walks through the Clifford gates, T/Tdg
become key-signed RZ), fill scheduling idle windows with identity decoupling
sequences, verify functional equivalence on path sums, run, then decrypt the
measurement counts classically.
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .circuit import (
    Circuit,
    CircuitDag,
    CircuitError,
    Gate,
    GateKind,
    QasmError,
    build_dag,
    concat,
    emit_qasm,
    gate_census,
    parse_qasm,
    random_clifford_t_circuit,
)
from .decouple import (
    AnalogSchedule,
    DDChoice,
    DurationTable,
    IdleWindow,
    discrete_frames,
    find_idle_windows,
    insert_dd,
    merge_z_u3,
    obfuscate,
    schedule_circuit,
    select_sequence,
    to_analog,
)
from .metrics import GedResult, ObfuscationReport, norm_ged, overhead_report, tvd
from .pathsum import (
    EquivVerdict,
    PathSum,
    canonical_equal,
    circuit_to_pathsum,
    mutate_circuit,
    pathsum_to_unitary,
    positive_negative_test,
    sampled_equal,
)
from .qotp import (
    EncryptionResult,
    PauliKey,
    decrypt_counts,
    encrypt_circuit,
    keygen,
    replace_t_gate,
    update_key_clifford,
    update_key_u3,
)
from .simulator import (
    State,
    apply_pauli_frame,
    exact_distribution,
    fidelity,
    gate_matrix,
    sample_counts,
    simulate,
    unitary_of,
)

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
