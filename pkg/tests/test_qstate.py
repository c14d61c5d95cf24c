import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qesim.qstate import (
    BasisChange,
    CompositionError,
    Dof,
    StateVector,
    ValidationError,
    global_phase_deviation,
    global_phase_equivalent,
    inner,
    rebase,
    tensor,
)

RNG = np.random.default_rng(12345)


def random_state(dofs, rng=RNG, weight=1.0):
    n = int(np.prod([d.dim for d in dofs]))
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return StateVector(tuple(dofs), v / np.linalg.norm(v), weight)


def random_unitary(n, rng=RNG):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


AB = (Dof("a", ("a0", "a1")), Dof("b", ("b0", "b1", "b2")))


class TestDof:
    def test_labels_and_index(self):
        d = Dof("pol", ("v", "h"))
        assert d.dim == 2 and d.index("h") == 1

    def test_rejects_single_label(self):
        with pytest.raises(ValidationError):
            Dof("x", ("only",))

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValidationError):
            Dof("x", ("l", "l"))


class TestStateVector:
    def test_basis_state_amplitudes(self):
        s = StateVector.basis_state(AB, ("a1", "b2"))
        assert s.amplitude(("a1", "b2")) == 1.0
        assert s.amplitude(("a0", "b0")) == 0.0

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            StateVector(AB[:1], np.array([1.0, 1.0]))

    def test_silently_fixes_tiny_norm_drift(self):
        eps = 1e-11
        s = StateVector(AB[:1], np.array([1.0 + eps, 0.0]))
        assert abs(np.linalg.norm(s.amps) - 1.0) < 1e-14

    def test_from_amplitudes_normalizes(self):
        s = StateVector.from_amplitudes(AB[:1], {("a0",): 3.0, ("a1",): 4.0})
        assert abs(s.amplitude(("a0",)) - 0.6) < 1e-15

    def test_duplicate_dof_names_rejected(self):
        with pytest.raises(CompositionError):
            StateVector((Dof("x", ("0", "1")), Dof("x", ("2", "3"))), np.eye(4)[0])

    def test_weight_bounds(self):
        with pytest.raises(ValidationError):
            StateVector(AB[:1], np.array([1.0, 0.0]), weight=1.5)

    def test_to_records_covers_all_basis_states(self):
        s = random_state(AB)
        rec = s.to_records()
        assert len(rec["amplitudes"]) == 6
        assert rec["weight"] == s.weight

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_random_states_are_normalized(self, seed):
        s = random_state(AB, np.random.default_rng(seed))
        assert abs(np.vdot(s.amps, s.amps).real - 1.0) < 1e-12


class TestTensorInner:
    def test_tensor_dims(self):
        s = tensor(random_state(AB[:1]), random_state(AB[1:]))
        assert s.dims == (2, 3)

    def test_tensor_rejects_name_collision(self):
        with pytest.raises(CompositionError):
            tensor(random_state(AB[:1]), random_state(AB[:1]))

    def test_inner_self_is_one(self):
        s = random_state(AB)
        assert abs(inner(s, s) - 1.0) < 1e-12

    def test_inner_requires_same_space(self):
        with pytest.raises(CompositionError):
            inner(random_state(AB[:1]), random_state(AB[1:]))


class TestRebase:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_round_trip_with_random_unitaries(self, seed):
        rng = np.random.default_rng(seed)
        s = random_state(AB, rng)
        u = random_unitary(3, rng)
        fwd = BasisChange("b", u, ("n0", "n1", "n2"))
        back = fwd.inverse(AB[1].labels)
        s2 = rebase(rebase(s, fwd), back)
        assert s2.dofs == s.dofs
        assert np.max(np.abs(s2.amps - s.amps)) < 1e-12

    def test_rebase_preserves_norm_and_weight(self):
        s = random_state(AB, weight=0.25)
        u = random_unitary(2)
        s2 = rebase(s, BasisChange("a", u, ("p", "m")))
        assert abs(np.vdot(s2.amps, s2.amps).real - 1.0) < 1e-12
        assert s2.weight == 0.25

    def test_nonunitary_matrix_rejected(self):
        with pytest.raises(ValidationError):
            BasisChange("a", np.array([[1, 1], [0, 1]]), ("p", "m"))


class TestGlobalPhase:
    @given(st.floats(0, 2 * math.pi, allow_nan=False), st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_phase_rotation_is_equivalent(self, theta, seed):
        s = random_state(AB, np.random.default_rng(seed))
        rotated = StateVector(s.dofs, s.amps * np.exp(1j * theta), s.weight)
        assert global_phase_equivalent(s, rotated, 1e-10)
        assert global_phase_equivalent(rotated, s, 1e-10)

    def test_distinct_states_are_not_equivalent(self):
        a = StateVector.basis_state(AB, ("a0", "b0"))
        b = StateVector.basis_state(AB, ("a1", "b0"))
        assert not global_phase_equivalent(a, b, 1e-10)
        assert global_phase_deviation(a, b) > 0.5

    def test_relative_phase_is_detected(self):
        d = AB[:1]
        a = StateVector.from_amplitudes(d, {("a0",): 1, ("a1",): 1})
        b = StateVector.from_amplitudes(d, {("a0",): 1, ("a1",): -1})
        assert not global_phase_equivalent(a, b, 1e-10)
