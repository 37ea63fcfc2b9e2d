"""Gate set acting on pair-encoded qubits.

Single-pair gates, in the (|1~>, |0~>) basis:

* ``H``    — simultaneous two-ion pulse: |1~> -> (|1~> - i|0~>)/sqrt(2),
  |0~> -> (|0~> - i|1~>)/sqrt(2).
* ``P``    — pi/2 phase on |1~> = |eg> only: diag(i, 1). ``Pinv`` is its inverse.
* ``X,Z``  — encoded Pauli flips, with the sign convention Z|1~> = +|1~>,
  Z|0~> = -|0~>.

The two-pair interaction ``gate_r(theta)`` is the collective pair-flip
evolution: within each of the blocks {|1~1~>, |0~0~>} and {|1~0~>, |0~1~>} it
rotates with diagonal cos(theta) and off-diagonal -i sin(theta); the two
blocks never mix. theta is the accumulated half-angle (effective Rabi
frequency times pulse duration, halved).

A controlled-NOT between neighboring pairs is composed from seven pulses,
see ``cnot_sequence``. Its net unitary equals a textbook CNOT (control =
second pair, target = first pair, control "on" state |1~>) times a global
phase of -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Layout, PureState, Unitary, apply

SQRT_HALF = 1.0 / math.sqrt(2.0)

PAIR_GATES: dict[str, Unitary] = {
    "H": Unitary(np.array([[1, -1j], [-1j, 1]], dtype=complex) * SQRT_HALF),
    "P": Unitary(np.diag([1j, 1]).astype(complex)),
    "Pinv": Unitary(np.diag([-1j, 1]).astype(complex)),
    "X": Unitary(np.array([[0, 1], [1, 0]], dtype=complex)),
    "Z": Unitary(np.diag([1, -1]).astype(complex)),
}

# Half-angle reproducing the published truth table: R at theta = 3*pi/4.
CNOT_THETA = 3.0 * math.pi / 4.0

# Pauli corrections used by the teleportation protocol, written as the
# physical operations on ions 3 and 4 of the target pair. "X3X4Z3" applies
# Z first, then X (reading the operator product right to left); the other
# order differs only by a global sign.
CORRECTION_LABELS = ("I", "Z3", "X3X4", "X3X4Z3")


def pair_gate(name: str) -> Unitary:
    """Look up a single-pair gate by name (H, P, Pinv, X, Z)."""
    try:
        return PAIR_GATES[name]
    except KeyError:
        raise ValueError(f"unknown pair gate {name!r}") from None


def gate_r(theta: float) -> Unitary:
    """Two-pair collective flip by half-angle ``theta``.

    R(0) is the identity and R(a) @ R(b) = R(a+b); a half-angle of pi/2
    maps |1~1~> to -i|0~0~> and |1~0~> to -i|0~1~>.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = math.cos(theta), -1j * math.sin(theta)
    return Unitary(
        np.array(
            [
                [c, 0, 0, s],
                [0, c, s, 0],
                [0, s, c, 0],
                [s, 0, 0, c],
            ],
            dtype=complex,
        )
    )


@dataclass(frozen=True)
class ScheduleStep:
    """One pulse: a named gate aimed at one or two pair indices."""

    gate: str
    targets: tuple[int, ...]
    theta: float | None = None  # only for the R interaction

    def unitary(self) -> Unitary:
        if self.gate == "R":
            if self.theta is None:
                raise ValueError("R step requires a theta")
            return gate_r(self.theta)
        return pair_gate(self.gate)


@dataclass(frozen=True)
class GateSchedule:
    """Ordered pulse list; the first step is applied first."""

    steps: tuple[ScheduleStep, ...]

    def __post_init__(self):
        if not self.steps:
            raise ValueError("schedule must contain at least one step")

    def composed_unitary(self, n_pairs: int) -> Unitary:
        """Dense unitary of the whole schedule on an ``n_pairs`` register."""
        dim = 2**n_pairs
        mat = np.eye(dim, dtype=complex)
        for step in self.steps:
            mat = _expand(step.unitary(), step.targets, n_pairs) @ mat
        return Unitary(mat)


def _expand(u: Unitary, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Dense n-pair matrix with ``u`` routed to ``targets``."""
    dim = 2**n
    cols = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[j] = 1.0
        cols[:, j] = apply(u, PureState(basis, Layout.LOGICAL), targets).amplitudes
    return cols


def apply_schedule(schedule: GateSchedule, s: PureState) -> PureState:
    """Run the schedule on a state, first step first."""
    out = s
    for step in schedule.steps:
        out = apply(step.unitary(), out, step.targets)
    return out


def cnot_sequence(theta: float = CNOT_THETA) -> tuple[GateSchedule, Unitary]:
    """Seven-pulse controlled-NOT on two neighboring pairs.

    Pair 0 (ions 1, 2) is the target; pair 1 (ions 3, 4) is the control, and
    control state |1~> = |eg> flips the target. Returns the pulse schedule
    and its composed 4x4 unitary. With the canonical ``theta`` the composed
    matrix is exactly -1 times the textbook CNOT; any other angle gives a
    different (non-CNOT) unitary, which is useful for negative checks.
    """
    schedule = GateSchedule(
        (
            ScheduleStep("H", (1,)),
            ScheduleStep("P", (1,)),
            ScheduleStep("R", (0, 1), theta),
            ScheduleStep("P", (1,)),
            ScheduleStep("H", (0,)),
            ScheduleStep("H", (1,)),
            ScheduleStep("Pinv", (1,)),
        )
    )
    return schedule, schedule.composed_unitary(2)


def cnot_truth_table() -> dict[str, str]:
    """Published input -> output map (pair 0, pair 1), phases omitted."""
    return {"11": "01", "10": "10", "01": "11", "00": "00"}


def logical_hadamard() -> Unitary:
    """Encoded Hadamard: the H pulse followed by the P phase (P @ H).

    Maps |1~> -> i(|1~> - |0~>)/sqrt(2) and |0~> -> (|0~> + |1~>)/sqrt(2).
    """
    return PAIR_GATES["P"] @ PAIR_GATES["H"]


def pauli_correction(label: str) -> Unitary:
    """Encoded correction operator for a Bell-measurement outcome.

    Labels name the physical pulses on ions 3 and 4: "Z3" is sigma_z on ion 3
    (encoded Z), "X3X4" flips both ions (encoded X), "X3X4Z3" is Z then X.
    """
    if label == "I":
        return Unitary.identity(2)
    if label == "Z3":
        return PAIR_GATES["Z"]
    if label == "X3X4":
        return PAIR_GATES["X"]
    if label == "X3X4Z3":
        return PAIR_GATES["X"] @ PAIR_GATES["Z"]
    raise ValueError(f"unknown correction label {label!r}")
