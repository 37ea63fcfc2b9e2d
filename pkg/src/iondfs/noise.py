"""Dephasing channels on physical ion registers.

Collective dephasing multiplies every ion's |e> component by the same random
phase e^{i phi}; it is the noise the pair encoding is built to survive, since
every ket of an encoded state carries exactly one excitation per pair and so
picks up only a global phase. Independent per-ion dephasing is included as
the contrast channel that the encoding does *not* protect against.

Phases are applied to |e> only; splitting the phase symmetrically between
|e> and |g> would differ by a global phase and change nothing measurable.

Ensemble averages draw all Gaussian phases up front from PCG64
(``numpy.random.default_rng(seed)``), so a run is reproducible from its seed
alone; a parallel implementation must split that presampled array (not
reseed per worker) to reproduce the same numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Layout, LayoutError, PureState


@dataclass(frozen=True)
class DephaseSpec:
    """Ensemble description: channel mode, Gaussian width, sample count, seed."""

    mode: str  # "collective" or "independent"
    sigma: float
    samples: int
    seed: int

    def __post_init__(self):
        if self.mode not in ("collective", "independent"):
            raise ValueError(f"unknown dephasing mode {self.mode!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


def _excitation_counts(n_ions: int) -> np.ndarray:
    """Number of ions in |e> for every basis index (|e> = bit 0)."""
    idx = np.arange(2**n_ions)
    ones = np.zeros(2**n_ions, dtype=int)
    for j in range(n_ions):
        ones += (idx >> j) & 1
    return n_ions - ones


def _excitation_pattern(n_ions: int) -> np.ndarray:
    """(n_ions, dim) 0/1 matrix: row j marks the states with ion j in |e>."""
    idx = np.arange(2**n_ions)
    return np.array([((idx >> (n_ions - 1 - j)) & 1) == 0 for j in range(n_ions)], dtype=float)


def collective_dephase(s: PureState, phi: float) -> PureState:
    """All ions acquire the same phase e^{i phi} on |e>."""
    if s.layout is not Layout.PHYSICAL:
        raise LayoutError("dephasing acts on physical registers")
    counts = _excitation_counts(s.n_subsystems)
    return PureState(np.exp(1j * phi * counts) * s.amplitudes, Layout.PHYSICAL)


def independent_dephase(s: PureState, phis) -> PureState:
    """Ion j acquires its own phase e^{i phi_j} on |e>."""
    if s.layout is not Layout.PHYSICAL:
        raise LayoutError("dephasing acts on physical registers")
    phis = np.asarray(phis, dtype=float)
    if phis.shape != (s.n_subsystems,):
        raise ValueError(f"need one phase per ion ({s.n_subsystems}), got shape {phis.shape}")
    total = phis @ _excitation_pattern(s.n_subsystems)
    return PureState(np.exp(1j * total) * s.amplitudes, Layout.PHYSICAL)


@dataclass(frozen=True)
class EnsembleFidelity:
    mean: float
    stderr: float | None  # None when a single sample gives no spread estimate


def ensemble_fidelity(s: PureState, spec: DephaseSpec) -> EnsembleFidelity:
    """Mean fidelity with the input over Gaussian-random dephasing.

    Since the channel is diagonal, the per-sample fidelity reduces to
    |sum_b |a_b|^2 e^{i phase_b}|^2, evaluated vectorized over all samples.
    """
    if s.layout is not Layout.PHYSICAL:
        raise LayoutError("dephasing acts on physical registers")
    rng = np.random.default_rng(spec.seed)
    weights = np.abs(s.amplitudes) ** 2
    if spec.mode == "collective":
        phis = rng.normal(0.0, spec.sigma, spec.samples)
        phase_per_basis = np.outer(phis, _excitation_counts(s.n_subsystems))
    else:
        phis = rng.normal(0.0, spec.sigma, (spec.samples, s.n_subsystems))
        phase_per_basis = phis @ _excitation_pattern(s.n_subsystems)
    overlaps = np.exp(1j * phase_per_basis) @ weights
    fids = np.abs(overlaps) ** 2
    mean = float(fids.mean())
    if spec.samples < 2:
        return EnsembleFidelity(mean, None)
    return EnsembleFidelity(mean, float(fids.std(ddof=1) / math.sqrt(spec.samples)))


def bare_dephasing_mean(sigma: float) -> float:
    """Analytic ensemble fidelity of (|e>+|g>)/sqrt(2): (1 + e^{-sigma^2/2})/2."""
    return 0.5 * (1.0 + math.exp(-0.5 * sigma * sigma))
