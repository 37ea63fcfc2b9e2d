"""Quantum logic on ion-pair qubits encoded in decoherence-free states.

The package simulates and verifies a four-ion scheme where each qubit lives
on a pair of ions as |1~> = |eg>, |0~> = |ge>:

* :mod:`iondfs.core`     — states, unitaries, measurement, the pair encoding;
* :mod:`iondfs.gates`    — the pulse-level gate set and the composed CNOT;
* :mod:`iondfs.dynamics` — effective Rabi frequency, ladder-model oracle,
  pulse timing;
* :mod:`iondfs.teleport` — state transfer between trap regions by
  teleportation with a complete Bell measurement;
* :mod:`iondfs.noise`    — collective/independent dephasing channels;
* :mod:`iondfs.cli`      — the ``iondfs`` command with verification suites.
"""

from .core import (
    Layout,
    LayoutError,
    MeasurementRecord,
    PureState,
    Unitary,
    apply,
    basis_state,
    embed_logical_to_physical,
    fidelity,
    measure_distribution,
    project_physical_to_logical,
    sample_outcome,
    states_equal,
    tensor,
)
from .dynamics import (
    DynamicsReport,
    LadderModel,
    PerturbativeRegimeError,
    TrapParams,
    ValidityCheck,
    bell_pulse_time,
    build_ladder,
    dynamics_report,
    effective_rabi,
    evolve,
    gate_time_cnot,
    max_leakage,
    oracle_frequency,
    validity_check,
)
from .gates import (
    CNOT_THETA,
    GateSchedule,
    ScheduleStep,
    apply_schedule,
    cnot_sequence,
    cnot_truth_table,
    gate_r,
    logical_hadamard,
    pair_gate,
    pauli_correction,
)
from .noise import (
    DephaseSpec,
    EnsembleFidelity,
    bare_dephasing_mean,
    collective_dephase,
    ensemble_fidelity,
    independent_dephase,
)
from .teleport import (
    BellOutcome,
    CorrectionTable,
    TeleportReport,
    TeleportSetup,
    bell_measure,
    bell_measure_sampled,
    derived_correction_table,
    make_input,
    make_resource,
    paper_correction_table,
    readout_phase,
    teleport,
)

__version__ = "0.1.0"
