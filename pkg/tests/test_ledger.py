"""Resource accounting, the stopping criterion, and the scaling-law curves."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wcsim.ledger import (
    ResourceLedger,
    SlotRecord,
    epsilon_stop,
    mse,
    theory_curve,
)


class TestLedgerAccounting:
    def test_single_slot_energy(self):
        ledger = ResourceLedger(k_uses=10)
        ledger.record_slot(SlotRecord(1, 2.5, 1, 1))
        assert ledger.e_energy == pytest.approx(25.0)
        assert ledger.t_slots == 1

    def test_empty_ledger(self):
        ledger = ResourceLedger(k_uses=10)
        assert ledger.e_energy == 0.0
        assert ledger.b_tbp == 0
        assert ledger.t_slots == 0

    def test_bandwidth_sum(self):
        ledger = ResourceLedger(k_uses=10)
        ledger.record_slot(SlotRecord(1, 0.0, 3, 0))
        ledger.record_slot(SlotRecord(2, 0.0, 4, 0))
        assert ledger.b_tbp == 70

    def test_out_of_order_slots_rejected(self):
        ledger = ResourceLedger(k_uses=1)
        ledger.record_slot(SlotRecord(3, 1.0, 1, 1))
        with pytest.raises(ValueError):
            ledger.record_slot(SlotRecord(3, 1.0, 1, 1))

    def test_unknown_bandwidth_propagates(self):
        ledger = ResourceLedger(k_uses=2)
        ledger.record_slot(SlotRecord(1, 1.0, None, 4))
        assert ledger.b_tbp is None

    def test_uniform_slots(self):
        ledger = ResourceLedger(k_uses=1)
        ledger.record_uniform_slots(8, 0.5, 1, 1)
        assert ledger.t_slots == 8
        assert ledger.e_energy == pytest.approx(4.0)
        assert ledger.b_tbp == 8

    def test_k_scales_energy_and_bandwidth_linearly(self):
        def totals(k):
            ledger = ResourceLedger(k_uses=k)
            ledger.record_slot(SlotRecord(1, 1.5, 2, 2))
            ledger.record_slot(SlotRecord(2, 0.5, 3, 1))
            return ledger.e_energy, ledger.b_tbp

        e1, b1 = totals(5)
        e2, b2 = totals(10)
        assert e2 == pytest.approx(2 * e1)
        assert b2 == 2 * b1

    def test_slot_record_validation(self):
        with pytest.raises(ValueError):
            SlotRecord(1, -1.0, 1, 1)
        with pytest.raises(ValueError):
            SlotRecord(1, 0.0, 0, 3)  # transmitters need a frequency slot


class TestEpsilonStop:
    def test_exact_consensus_stops(self):
        z = np.full(10, 0.37)
        assert epsilon_stop(z, 1.0, 1e-12, z_ave=0.37)

    def test_initial_state_does_not_stop(self):
        z0 = np.array([0.0, 1.0])
        assert not epsilon_stop(z0, float(np.linalg.norm(z0)), 1e-6, z_ave=0.5)

    def test_hand_threshold(self):
        z0 = np.array([0.0, 1.0])
        z0_norm = 1.0
        for delta in (1e-3, 1e-5):
            z = np.array([0.5 - delta, 0.5 + delta])
            want = delta * math.sqrt(2) < 1e-4
            assert epsilon_stop(z, z0_norm, 1e-4, z_ave=0.5) == want

    @given(eps1=st.floats(min_value=1e-9, max_value=1.0),
           eps2=st.floats(min_value=1e-9, max_value=1.0))
    def test_monotone_in_epsilon(self, eps1, eps2):
        z = np.array([0.4999, 0.5001])
        lo, hi = sorted((eps1, eps2))
        if epsilon_stop(z, 1.0, lo, z_ave=0.5):
            assert epsilon_stop(z, 1.0, hi, z_ave=0.5)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            epsilon_stop(np.zeros(2), 0.0, 1e-4, z_ave=0.0)
        with pytest.raises(ValueError):
            epsilon_stop(np.zeros(2), 1.0, 0.0, z_ave=0.0)


class TestMse:
    def test_exact_consensus_is_zero(self):
        assert mse(np.full(8, 0.5), 0.5) == 0.0

    def test_constant_offset(self):
        assert mse(np.full(8, 0.5 + 0.01), 0.5) == pytest.approx(1e-4)

    def test_hand_value(self):
        assert mse(np.array([0.4, 0.6]), 0.5) == pytest.approx(0.01)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(0)
        z = rng.random(20)
        assert mse(z, 0.5) == pytest.approx(mse(rng.permutation(z), 0.5))


class TestTheoryCurve:
    def test_randomized_time_ratio(self):
        n = 256
        ratio = (theory_curve("randomized", "T", 4 * n)
                 / theory_curve("randomized", "T", n))
        assert ratio == pytest.approx(4 * math.log(n) / math.log(4 * n))

    def test_hierarchical_uniform_energy_at_alpha_two(self):
        kappa = 1e-4
        for n in (64, 1024):
            got = theory_curve("hierarchical", "E", n, alpha=2.0, kappa=kappa,
                               phase_mode="uniform")
            assert got == pytest.approx(n ** kappa)

    def test_lower_bound_energy_constant_at_alpha_two(self):
        a = theory_curve("bound", "E", 64, alpha=2.0)
        b = theory_curve("bound", "E", 1024, alpha=2.0)
        assert a == pytest.approx(b)

    def test_unknown_pair_rejected(self):
        with pytest.raises(ValueError):
            theory_curve("bound", "mse", 64)
        with pytest.raises(ValueError):
            theory_curve("telepathy", "T", 64)
