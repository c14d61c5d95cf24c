import math

import numpy as np
import pytest

from qesim.qstate import Dof, StateVector, ValidationError
from qesim.screen import (
    DEFAULT_GEOMETRY,
    Pattern,
    SlitGeometry,
    fringe_visibility,
    pattern_from_bin_probs,
    pattern_from_state,
    sum_patterns,
    visibility,
)

SLIT = Dof("slit", ("s1", "s2"))
POL = Dof("pol", ("v", "h"))


class TestGeometry:
    def test_delta_is_linear_in_x(self):
        g = DEFAULT_GEOMETRY
        x = np.array([0.0, 1e-3, 2e-3])
        d = g.delta(x)
        assert d[0] == 0.0
        assert abs(d[2] - 2 * d[1]) < 1e-12

    def test_invalid_geometry_rejected(self):
        with pytest.raises(ValidationError):
            SlitGeometry(slit_separation=-1)
        with pytest.raises(ValidationError):
            SlitGeometry(bins=1)

    def test_bin_labels_are_stable(self):
        assert DEFAULT_GEOMETRY.bin_label(7) == "bin007"


class TestPatterns:
    def test_coherent_pattern_is_one_plus_cos(self):
        s = StateVector.from_amplitudes((SLIT,), {("s1",): 1, ("s2",): 1})
        p = pattern_from_state(s, "slit")
        expect = 1 + np.cos(DEFAULT_GEOMETRY.delta(DEFAULT_GEOMETRY.bin_centers()))
        assert np.max(np.abs(np.array(p.intensities) - expect)) < 1e-12

    def test_marked_pattern_is_flat(self):
        # which-slit marking on an auxiliary dof removes the cross term
        s = StateVector.from_amplitudes(
            (SLIT, POL), {("s1", "v"): 1, ("s2", "h"): 1}
        )
        p = pattern_from_state(s, "slit")
        assert np.max(np.abs(np.array(p.intensities) - 1.0)) < 1e-12

    def test_relative_phase_shifts_fringes(self):
        s = StateVector.from_amplitudes((SLIT,), {("s1",): 1, ("s2",): 1j})
        p = pattern_from_state(s, "slit")
        expect = 1 + np.sin(DEFAULT_GEOMETRY.delta(DEFAULT_GEOMETRY.bin_centers()))
        assert np.max(np.abs(np.array(p.intensities) - expect)) < 1e-12

    def test_csv_round_shape(self):
        p = pattern_from_state(
            StateVector.basis_state((SLIT,), ("s1",)), "slit"
        )
        lines = p.to_csv().strip().split("\n")
        assert lines[0] == "x,intensity"
        assert len(lines) == DEFAULT_GEOMETRY.bins + 1


class TestVisibility:
    def test_full_visibility(self):
        s = StateVector.from_amplitudes((SLIT,), {("s1",): 1, ("s2",): 1})
        p = pattern_from_state(s, "slit")
        assert abs(fringe_visibility(p) - 1.0) < 1e-12

    def test_zero_visibility(self):
        p = Pattern(tuple(DEFAULT_GEOMETRY.bin_centers()), (1.0,) * DEFAULT_GEOMETRY.bins)
        assert fringe_visibility(p) < 1e-12
        assert visibility(p) < 1e-12

    def test_partial_visibility(self):
        # amplitudes sqrt(3)/2 and 1/2 give coherence 2*(sqrt(3)/4) = sin(60)
        s = StateVector.from_amplitudes(
            (SLIT,), {("s1",): math.sqrt(3) / 2, ("s2",): 0.5}
        )
        p = pattern_from_state(s, "slit")
        assert abs(fringe_visibility(p) - math.sin(math.pi / 3)) < 1e-12

    def test_fitted_visibility_ignores_bin_placement(self):
        # a grid whose bins miss the extrema still reports visibility 1
        g = SlitGeometry(bins=17, x_range=(-0.0173, 0.0191))
        s = StateVector.from_amplitudes((SLIT,), {("s1",): 1, ("s2",): 1})
        p = pattern_from_state(s, "slit", g)
        assert abs(fringe_visibility(p, g) - 1.0) < 1e-9
        assert visibility(p) < 1.0  # max/min estimate undershoots here


class TestPatternAlgebra:
    def test_fringe_plus_antifringe_is_flat(self):
        a = StateVector.from_amplitudes((SLIT,), {("s1",): 1, ("s2",): 1})
        b = StateVector.from_amplitudes((SLIT,), {("s1",): 1, ("s2",): -1})
        total = sum_patterns(
            pattern_from_state(a, "slit"), pattern_from_state(b, "slit"), (0.5, 0.5)
        )
        assert np.max(np.abs(np.array(total.intensities) - 1.0)) < 1e-12

    def test_histogram_normalization(self):
        g = SlitGeometry(bins=4)
        p = pattern_from_bin_probs(
            {g.bin_label(i): c for i, c in enumerate([2.0, 4.0, 2.0, 0.0])}, g
        )
        assert abs(sum(p.intensities) / g.bins - 1.0) < 1e-12

    def test_grid_mismatch_rejected(self):
        g = SlitGeometry(bins=8)
        a = Pattern(tuple(g.bin_centers()), (1.0,) * 8)
        b = Pattern(tuple(DEFAULT_GEOMETRY.bin_centers()), (1.0,) * DEFAULT_GEOMETRY.bins)
        with pytest.raises(ValidationError):
            sum_patterns(a, b)
