import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qesim import elements as el
from qesim.measure import (
    ConditioningError,
    OutcomeDistribution,
    ValidationError,
    born_distribution,
    conditional,
    marginal,
    rng_for,
    sample,
    total_variation,
)
from qesim.qstate import Dof, StateVector

A = Dof("a", ("a0", "a1"))
B = Dof("b", ("b0", "b1", "b2"))


def random_state(seed, weight=1.0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    return StateVector((A, B), v / np.linalg.norm(v), weight)


class TestOutcomeDistribution:
    def test_mass_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            OutcomeDistribution(("a",), {("a0",): 0.5}, 0.9)

    def test_negative_probability_rejected(self):
        with pytest.raises(ValidationError):
            OutcomeDistribution(("a",), {("a0",): -0.1, ("a1",): 1.1}, 1.0)

    def test_renormalized(self):
        d = OutcomeDistribution(("a",), {("a0",): 0.25}, 0.25)
        assert abs(d.renormalized().prob(("a0",)) - 1.0) < 1e-15


class TestBorn:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_probabilities_sum_to_weight(self, seed):
        s = random_state(seed, weight=0.5)
        d = born_distribution(s, [("a", None), ("b", None)])
        assert abs(sum(d.outcomes.values()) - 0.5) < 1e-12

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_axis_order_invariance(self, seed):
        s = random_state(seed)
        ab = born_distribution(s, [("a", None), ("b", None)])
        ba = born_distribution(s, [("b", None), ("a", None)])
        for (x, y), p in ab.outcomes.items():
            assert abs(ba.prob((y, x)) - p) < 1e-12

    def test_rebased_measurement(self):
        s = StateVector.from_amplitudes((A,), {("a0",): 1, ("a1",): 1})
        d = born_distribution(s, [("a", el.basis_change("pm45", A))])
        assert abs(d.prob(("+",)) - 1.0) < 1e-12
        assert d.prob(("-",)) < 1e-15

    def test_marginal_consistency(self):
        s = random_state(7)
        joint = born_distribution(s, [("a", None), ("b", None)])
        only_a = born_distribution(s, [("a", None)])
        m = marginal(joint, ["a"])
        for k in only_a.outcomes:
            assert abs(m.prob(k) - only_a.prob(k)) < 1e-12


class TestConditional:
    def test_conditional_renormalizes(self):
        joint = born_distribution(random_state(3), [("a", None), ("b", None)])
        c = conditional(joint, ("a", "a0"))
        assert abs(sum(c.outcomes.values()) - 1.0) < 1e-12
        assert c.axes == ("b",)

    def test_conditioning_on_null_outcome_raises(self):
        s = StateVector.basis_state((A,), ("a0",))
        d = born_distribution(s, [("a", None)])
        with pytest.raises(ConditioningError):
            conditional(d, ("a", "a1"))


class TestTotalVariation:
    def test_identical_distributions(self):
        d = born_distribution(random_state(5), [("a", None)])
        assert total_variation(d, d) < 1e-15

    def test_disjoint_distributions(self):
        a = OutcomeDistribution(("x",), {("0",): 1.0}, 1.0)
        b = OutcomeDistribution(("x",), {("1",): 1.0}, 1.0)
        assert abs(total_variation(a, b) - 1.0) < 1e-15

    def test_mass_is_renormalized_away(self):
        a = OutcomeDistribution(("x",), {("0",): 0.3, ("1",): 0.3}, 0.6)
        b = OutcomeDistribution(("x",), {("0",): 0.5, ("1",): 0.5}, 1.0)
        assert total_variation(a, b) < 1e-15


class TestSampling:
    def test_identical_seed_identical_counts(self):
        d = born_distribution(random_state(11), [("a", None), ("b", None)])
        s1 = sample(d, 5000, seed=42)
        s2 = sample(d, 5000, seed=42)
        assert s1.counts == s2.counts

    def test_different_seeds_differ(self):
        d = born_distribution(random_state(11), [("a", None)])
        assert sample(d, 5000, seed=1).counts != sample(d, 5000, seed=2).counts

    def test_counts_sum_to_shots(self):
        d = born_distribution(random_state(13), [("b", None)])
        batch = sample(d, 1234, seed=0)
        assert sum(batch.counts.values()) == 1234

    def test_frequencies_within_5_sigma(self):
        d = born_distribution(random_state(17), [("a", None), ("b", None)])
        shots = 100_000
        batch = sample(d, shots, seed=99)
        for k, p in d.outcomes.items():
            sigma = max(np.sqrt(shots * p * (1 - p)), 1.0)
            assert abs(batch.counts.get(k, 0) - shots * p) < 5 * sigma

    def test_rng_streams_are_independent_named_algorithm(self):
        a = rng_for(7, 0).random(4)
        b = rng_for(7, 1).random(4)
        assert not np.allclose(a, b)
        assert np.allclose(a, rng_for(7, 0).random(4))
