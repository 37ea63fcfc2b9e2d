"""State vectors, unitaries and projective measurement for small ion registers.

Everything in this package runs on one of two register layouts:

* ``Layout.PHYSICAL`` — one two-level system per ion, basis ``|e>``/``|g>``.
* ``Layout.LOGICAL`` — one two-level system per *ion pair*, with the encoded
  basis ``|1~> = |eg>`` and ``|0~> = |ge>``.

Basis convention (used everywhere, defined only here):

* per ion: ``|e> -> 0``, ``|g> -> 1``;
* per pair: ``|1~> -> 0``, ``|0~> -> 1``;
* tensor order: the lowest-numbered ion/pair is the most significant index,
  so for two pairs the basis order is ``|1~1~>, |1~0~>, |0~1~>, |0~0~>``.

States and operators are immutable once constructed; all operations are pure
functions, so values can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

NORM_TOL = 1e-12
UNITARITY_TOL = 1e-12

# Product-basis outcomes below this probability are treated as exactly zero
# (they arise from destructive interference, not from physical weight).
PROB_CUTOFF = 1e-12


class LayoutError(ValueError):
    """Raised when an operation receives a state in the wrong layout."""


class Layout(Enum):
    """Register layout: subsystems are encoded pairs or bare ions."""

    LOGICAL = "logical"
    PHYSICAL = "physical"


def _as_state_vector(amplitudes) -> np.ndarray:
    vec = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
    if vec.size == 0:
        raise ValueError("amplitudes must be a non-empty vector")
    k = vec.size.bit_length() - 1
    if vec.size != 2**k:
        raise ValueError(f"state dimension {vec.size} is not a power of two")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state norm {norm!r} deviates from 1 by more than {NORM_TOL}")
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over a register of two-level systems.

    The dimension must be a power of two; ``n_subsystems`` is the number of
    pairs (logical layout) or ions (physical layout). Norm is validated to
    ``NORM_TOL`` at construction. A dimension-1 state (zero subsystems) is the
    residue of measuring every subsystem and carries only a phase.
    """

    amplitudes: np.ndarray
    layout: Layout

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_state_vector(self.amplitudes))
        if not isinstance(self.layout, Layout):
            raise TypeError("layout must be a Layout")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_subsystems(self) -> int:
        return self.dim.bit_length() - 1

    @classmethod
    def normalized(cls, amplitudes, layout: Layout) -> "PureState":
        """Construct from an unnormalized vector by rescaling it to unit norm."""
        vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm, layout)


@dataclass(frozen=True)
class Unitary:
    """Square complex matrix verified unitary (max |U†U - I| <= UNITARITY_TOL)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("unitary must be a square matrix")
        defect = np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])).max()
        if defect > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary: max |U†U - I| = {defect:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Unitary":
        return Unitary(self.matrix.conj().T)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        return Unitary(self.matrix @ other.matrix)

    @classmethod
    def identity(cls, dim: int) -> "Unitary":
        return cls(np.eye(dim))


@dataclass(frozen=True)
class MeasurementRecord:
    """One projective outcome: its e/g label, probability and post-state."""

    outcome_label: str
    probability: float
    post_state: PureState


# --- label <-> index conversion (the one place the convention is encoded) ---

_ION_CHARS = {"e": 0, "g": 1}
_PAIR_CHARS = {"1": 0, "0": 1}
_PAIR_TO_IONS = {0: "eg", 1: "ge"}  # encoded |1~> = |eg>, |0~> = |ge>


def physical_index(label: str) -> int:
    """Basis index of an e/g string, first ion most significant."""
    idx = 0
    for ch in label:
        if ch not in _ION_CHARS:
            raise ValueError(f"invalid ion label character {ch!r}")
        idx = 2 * idx + _ION_CHARS[ch]
    return idx


def physical_label(index: int, n_ions: int) -> str:
    if not 0 <= index < 2**n_ions:
        raise ValueError("index out of range")
    return "".join("e" if (index >> (n_ions - 1 - j)) & 1 == 0 else "g" for j in range(n_ions))


def logical_index(label: str) -> int:
    """Basis index of a 1/0 pair string, first pair most significant."""
    idx = 0
    for ch in label:
        if ch not in _PAIR_CHARS:
            raise ValueError(f"invalid pair label character {ch!r}")
        idx = 2 * idx + _PAIR_CHARS[ch]
    return idx


def logical_label(index: int, n_pairs: int) -> str:
    if not 0 <= index < 2**n_pairs:
        raise ValueError("index out of range")
    return "".join("1" if (index >> (n_pairs - 1 - j)) & 1 == 0 else "0" for j in range(n_pairs))


def basis_state(label: str, layout: Layout) -> PureState:
    """Computational basis state from a label ("10" logical, "egge" physical)."""
    if layout is Layout.LOGICAL:
        idx, dim = logical_index(label), 2 ** len(label)
    else:
        idx, dim = physical_index(label), 2 ** len(label)
    vec = np.zeros(dim, dtype=complex)
    vec[idx] = 1.0
    return PureState(vec, layout)


# --- operations ---


def tensor(a: PureState, b: PureState) -> PureState:
    """Kronecker product of two states; ``a`` supplies the most significant part."""
    if a.layout is not b.layout:
        raise LayoutError(f"cannot tensor {a.layout.value} with {b.layout.value} state")
    return PureState(np.kron(a.amplitudes, b.amplitudes), a.layout)


def _check_targets(targets, n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target {t} out of range for {n} subsystems")
    return targets


def apply(u: Unitary, s: PureState, targets) -> PureState:
    """Apply ``u`` to the listed subsystems, identity elsewhere.

    ``targets[0]`` is routed to the most significant index of ``u``'s basis.
    """
    n = s.n_subsystems
    targets = _check_targets(targets, n)
    m = len(targets)
    if u.dim != 2**m:
        raise ValueError(f"unitary dim {u.dim} does not match {m} target subsystems")
    psi = s.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, targets, range(m))
    psi = (u.matrix @ psi.reshape(2**m, -1)).reshape((2,) * n)
    psi = np.moveaxis(psi, range(m), targets)
    return PureState(psi.reshape(-1), s.layout)


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2; symmetric and invariant under global phases."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def states_equal(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    """True when the states agree up to a global phase."""
    return a.dim == b.dim and 1.0 - fidelity(a, b) <= tol


def _subsystem_label(bit: int, layout: Layout) -> str:
    return "eg"[bit] if layout is Layout.PHYSICAL else _PAIR_TO_IONS[bit]


def measure_distribution(s: PureState, targets) -> list[MeasurementRecord]:
    """Projective product-basis measurement of the target subsystems.

    Returns one record per outcome with nonzero probability, ordered by
    outcome index. Labels are e/g strings covering the measured ions (a
    measured logical pair contributes its two-ion pattern, "eg" or "ge").
    The post-state lives on the unmeasured subsystems, renormalized; phases
    relative to the measured branch are preserved.
    """
    n = s.n_subsystems
    targets = _check_targets(targets, n)
    m = len(targets)
    psi = s.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, targets, range(m)).reshape(2**m, -1)
    probs = np.sum(np.abs(psi) ** 2, axis=1)
    records = []
    for idx in range(2**m):
        p = float(probs[idx])
        if p <= PROB_CUTOFF:
            continue
        label = "".join(
            _subsystem_label((idx >> (m - 1 - j)) & 1, s.layout) for j in range(m)
        )
        post = PureState(psi[idx] / math.sqrt(p), s.layout)
        records.append(MeasurementRecord(label, p, post))
    return records


def sample_outcome(distribution: list[MeasurementRecord], seed: int) -> MeasurementRecord:
    """Draw one outcome by its Born probability.

    Uses a single uniform variate from numpy's PCG64 generator
    (``numpy.random.default_rng(seed)``), inverted through the cumulative
    distribution; identical seeds give identical outcomes on any platform.
    """
    if not distribution:
        raise ValueError("cannot sample from an empty distribution")
    u = np.random.default_rng(seed).random()
    acc = 0.0
    for record in distribution:
        acc += record.probability
        if u < acc:
            return record
    return distribution[-1]


def embed_logical_to_physical(s: PureState) -> PureState:
    """Expand each encoded pair into its two-ion pattern (|1~> -> |eg>, |0~> -> |ge>).

    Amplitudes land only in the single-excitation sector of each pair; the
    |ee> and |gg> sectors stay empty.
    """
    if s.layout is not Layout.LOGICAL:
        raise LayoutError("embed_logical_to_physical requires a logical state")
    k = s.n_subsystems
    out = np.zeros(4**k, dtype=complex)
    for idx in range(s.dim):
        out[physical_index(_logical_to_ion_string(idx, k))] = s.amplitudes[idx]
    return PureState(out, Layout.PHYSICAL)


def _logical_to_ion_string(index: int, n_pairs: int) -> str:
    return "".join(_PAIR_TO_IONS[(index >> (n_pairs - 1 - j)) & 1] for j in range(n_pairs))


def project_physical_to_logical(s: PureState, tol: float = 1e-9) -> PureState:
    """Inverse of the embedding; fails if weight leaked outside the pair code.

    The physical register must hold an even number of ions. Probability mass
    outside the single-excitation pair sectors beyond ``tol`` raises
    ValueError.
    """
    if s.layout is not Layout.PHYSICAL:
        raise LayoutError("project_physical_to_logical requires a physical state")
    if s.n_subsystems % 2 != 0:
        raise ValueError("physical register must contain an even number of ions")
    k = s.n_subsystems // 2
    out = np.empty(2**k, dtype=complex)
    captured = 0.0
    for idx in range(2**k):
        amp = s.amplitudes[physical_index(_logical_to_ion_string(idx, k))]
        out[idx] = amp
        captured += abs(amp) ** 2
    if 1.0 - captured > tol:
        raise ValueError(f"state has weight {1 - captured:.3e} outside the pair encoding")
    return PureState.normalized(out, Layout.LOGICAL)
