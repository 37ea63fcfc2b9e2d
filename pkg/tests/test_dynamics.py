"""Closed-form effective frequency vs the exact ladder evolution."""

import math

import numpy as np
import pytest

from iondfs.dynamics import (
    LADDER_BASIS,
    LadderModel,
    PerturbativeRegimeError,
    TrapParams,
    bell_pulse_time,
    build_ladder,
    dynamics_report,
    effective_rabi,
    evolve,
    gate_time_cnot,
    leakage_bound,
    max_leakage,
    oracle_frequency,
    peak_intermediate_population,
    validity_check,
)
from iondfs.gates import gate_r


def params_at(ratio: float, n: int = 0, scale: float = 1.0) -> TrapParams:
    """TrapParams with 2*nu - delta = scale and Omega*eta = ratio*scale."""
    eta = 0.1
    return TrapParams(
        rabi=ratio * scale / eta, lamb_dicke=eta, trap_freq=scale, detuning=scale, fock_n=n
    )


class TestTrapParams:
    def test_invariants(self):
        with pytest.raises(ValueError):
            TrapParams(rabi=-1, lamb_dicke=0.1, trap_freq=1, detuning=1)
        with pytest.raises(ValueError):
            TrapParams(rabi=1, lamb_dicke=0.1, trap_freq=1, detuning=2.5)
        with pytest.raises(ValueError):
            TrapParams(rabi=1, lamb_dicke=0.1, trap_freq=1, detuning=1, fock_n=-2)
        with pytest.raises(ValueError, match="ratio"):
            TrapParams(rabi=20, lamb_dicke=0.1, trap_freq=1, detuning=1)

    def test_validity_ratio(self):
        p = params_at(0.02)
        assert p.validity_ratio == pytest.approx(0.02, rel=1e-12)


class TestClosedForm:
    def test_direct_substitution(self):
        p = TrapParams(rabi=1.0, lamb_dicke=0.1, trap_freq=1.0, detuning=0.9)
        assert effective_rabi(p) == pytest.approx(0.01 / 1.1, rel=1e-12)

    @pytest.mark.parametrize("n,factor", [(1, 3), (2, 5), (5, 11)])
    def test_fock_scaling(self, n, factor):
        base = params_at(0.02, n=0)
        excited = params_at(0.02, n=n)
        assert effective_rabi(excited) / effective_rabi(base) == pytest.approx(
            factor, rel=1e-15
        )

    def test_scaling_laws_random_grid(self):
        rng = np.random.default_rng(20)
        for _ in range(100):
            scale = 10 ** rng.uniform(0, 7)
            ratio = rng.uniform(0.001, 0.5)
            n = int(rng.integers(0, 10))
            p = params_at(ratio, n=n, scale=scale)
            base = params_at(ratio, n=0, scale=scale)
            # linear in (2n+1)
            assert effective_rabi(p) / effective_rabi(base) == pytest.approx(
                2 * n + 1, rel=1e-14
            )
            # quadratic in Omega*eta
            doubled = TrapParams(2 * p.rabi, p.lamb_dicke, p.trap_freq, p.detuning, n) \
                if 2 * ratio < 1 else None
            if doubled is not None:
                assert effective_rabi(doubled) / effective_rabi(p) == pytest.approx(
                    4.0, rel=1e-14
                )


class TestLadderModel:
    def test_ground_state_couplings(self):
        m = build_ladder(params_at(0.02, n=0))
        assert m.g_minus == 0.0
        assert m.g_plus == pytest.approx((0.02 / 2) * math.sqrt(2), rel=1e-12)

    def test_n1_lower_path_closed(self):
        m = build_ladder(params_at(0.02, n=1))
        assert m.g_minus == 0.0
        assert m.g_plus == pytest.approx((0.02 / 2) * math.sqrt(6), rel=1e-12)

    def test_structure(self):
        m = build_ladder(params_at(0.05, n=3))
        h = m.hamiltonian
        np.testing.assert_allclose(h, h.T, atol=1e-15)
        np.testing.assert_allclose(np.diag(h), [0, m.delta_gap, -m.delta_gap, 0])
        assert h[0, 3] == 0 and h[3, 0] == 0
        np.testing.assert_allclose(h[0, 1:3], h[3, 1:3])
        assert len(LADDER_BASIS) == 4

    @pytest.mark.parametrize("n", range(11))
    def test_second_order_identity(self, n):
        # 2*(g+^2 - g-^2)/gap reproduces the closed form: (n+1)(n+2) - n(n-1) = 4n+2
        p = params_at(0.02, n=n)
        m = build_ladder(p)
        second_order = 2 * (m.g_plus**2 - m.g_minus**2) / m.delta_gap
        assert second_order == pytest.approx(effective_rabi(p), rel=1e-12)


class TestEvolve:
    def test_zero_time(self):
        s0 = np.array([1, 0, 0, 0], complex)
        h = build_ladder(params_at(0.02)).hamiltonian
        np.testing.assert_allclose(evolve(h, 0.0, s0), s0, atol=1e-15)

    def test_diagonal_phases(self):
        h = np.diag([1.0, -2.0, 0.5])
        s0 = np.ones(3, complex) / math.sqrt(3)
        out = evolve(h, 1.3, s0)
        np.testing.assert_allclose(out, np.exp(-1j * np.diag(h) * 1.3) * s0, atol=1e-12)

    def test_two_level_transfer(self):
        g, t = 0.3, 1.7
        out = evolve(np.array([[0, g], [g, 0]]), t, np.array([1, 0], complex))
        assert abs(out[1]) ** 2 == pytest.approx(math.sin(g * t) ** 2, abs=1e-12)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            evolve(np.array([[0, 1], [0, 0]]), 1.0, np.array([1, 0]))

    def test_norm_drift_over_ten_periods(self):
        p = params_at(0.02, n=2)
        h = build_ladder(p).hamiltonian
        t = 10 * 2 * math.pi / effective_rabi(p)
        out = evolve(h, t, np.array([1, 0, 0, 0], complex))
        assert abs(np.linalg.norm(out) - 1) <= 1e-9


class TestOracleFrequency:
    @pytest.mark.parametrize("n", [0, 2])
    def test_matches_closed_form_at_2_percent(self, n):
        p = params_at(0.02, n=n, scale=1e6)
        measured = oracle_frequency(p)
        assert abs(measured - effective_rabi(p)) / effective_rabi(p) <= 0.02

    def test_fock_scaling_against_ground(self):
        ground = effective_rabi(params_at(0.02, n=0))
        measured = oracle_frequency(params_at(0.02, n=2))
        assert measured == pytest.approx(5 * ground, rel=0.02)

    def test_agreement_random_params(self):
        rng = np.random.default_rng(21)
        for _ in range(12):
            p = params_at(
                ratio=rng.uniform(0.005, 0.02),
                n=int(rng.integers(0, 6)),
                scale=10 ** rng.uniform(2, 7),
            )
            rel = abs(oracle_frequency(p) - effective_rabi(p)) / effective_rabi(p)
            assert rel <= 0.02, (p, rel)

    def test_regime_guard(self):
        with pytest.raises(PerturbativeRegimeError, match="ratio"):
            oracle_frequency(params_at(0.5))

    def test_breakdown_flagged_when_forced(self):
        p = params_at(0.5)
        measured = oracle_frequency(p, enforce_regime=False)
        assert abs(measured - effective_rabi(p)) / effective_rabi(p) > 0.10

    def test_dressed_doublet_gap(self):
        # with g- = 0 the static diagnosis: the two near-zero eigenvalues split
        # by the effective frequency
        p = params_at(0.02, n=0)
        w = np.linalg.eigvalsh(build_ladder(p).hamiltonian)
        w = w[np.argsort(np.abs(w))]
        gap = abs(w[1] - w[0])
        assert gap == pytest.approx(effective_rabi(p), rel=0.02)


class TestLeakage:
    def test_bounded_at_small_ratio(self):
        p = params_at(0.02, n=0)
        leak = max_leakage(p)
        model = build_ladder(p)
        assert leak <= leakage_bound(model)
        assert leak == pytest.approx(8e-4, rel=0.15)  # ~(2 g+/gap)^2

    def test_zeroed_couplings_leak_nothing(self):
        gap = 1.0
        h = np.diag([0.0, gap, -gap, 0.0])
        model = LadderModel(gap, 0.0, 0.0, h)
        assert peak_intermediate_population(model, horizon=50.0, n_points=5001) == 0.0

    def test_monotone_in_ratio(self):
        leaks = [max_leakage(params_at(r)) for r in (0.01, 0.05, 0.1)]
        assert leaks[0] < leaks[1] < leaks[2]

    def test_regime_guard(self):
        with pytest.raises(PerturbativeRegimeError):
            max_leakage(params_at(0.3))


class TestTiming:
    def test_ground_state_formula(self):
        p = TrapParams(rabi=2.0, lamb_dicke=0.05, trap_freq=3.0, detuning=1.5)
        expected = (3 * math.pi / 2) * (2 * 3.0 - 1.5) / (2.0 * 0.05) ** 2
        assert gate_time_cnot(p) == pytest.approx(expected, rel=1e-12)

    def test_published_operating_point(self):
        omega = 2 * math.pi * 500e3
        p = TrapParams(rabi=omega, lamb_dicke=0.115, trap_freq=10 * omega, detuning=10 * omega)
        t = gate_time_cnot(p)
        assert t == pytest.approx(1.134e-3, rel=0.01)
        # same order as the published 7e-4 s reference
        assert 0.5 < t / 7e-4 < 2.0

    def test_fock_speedup(self):
        p0, p1 = params_at(0.02, n=0), params_at(0.02, n=1)
        assert gate_time_cnot(p0) / gate_time_cnot(p1) == pytest.approx(3.0, rel=1e-15)

    def test_bell_pulse_relations(self):
        p = params_at(0.03, n=2)
        assert gate_time_cnot(p) / bell_pulse_time(p) == pytest.approx(3.0, rel=1e-15)
        # the pulse accumulates exactly the quarter-pi half-angle
        half_angle = effective_rabi(p) * bell_pulse_time(p) / 2
        np.testing.assert_allclose(
            gate_r(half_angle).matrix, gate_r(math.pi / 4).matrix, atol=1e-12
        )

    def test_bell_pulse_absolute(self):
        # omega_eff = (1e5*0.1)^2/1e5 = 1000 rad/s exactly: pulse is pi/2000 s
        p = TrapParams(rabi=1e5, lamb_dicke=0.1, trap_freq=1e5, detuning=1e5)
        assert effective_rabi(p) == pytest.approx(1000.0, rel=1e-14)
        assert bell_pulse_time(p) == pytest.approx(math.pi / 2000, rel=1e-12)
        assert bell_pulse_time(p) == pytest.approx(1.5708e-3, rel=1e-4)


class TestValidity:
    @pytest.mark.parametrize("ratio,verdict", [(0.02, "pass"), (0.1, "warn"), (0.3, "fail")])
    def test_thresholds(self, ratio, verdict):
        assert validity_check(params_at(ratio)).verdict == verdict


class TestReport:
    def test_fields_consistent(self):
        p = params_at(0.02, n=1)
        rep = dynamics_report(p)
        assert rep.validity_ratio == p.validity_ratio
        assert rep.relative_error == pytest.approx(
            abs(rep.oracle_frequency - rep.effective_rabi) / rep.effective_rabi
        )
        assert 0 <= rep.max_leakage <= 1
        assert rep.relative_error <= 0.02
