"""Prebuilt circuits for every experiment, each with machine-checkable
expected properties.

Detector naming for the interferometers: D1 is the port in line with the
transmitted arm, D2 the port in line with the reflected arm; with the
i-reflection beam-splitter convention the two-splitter arrangement routes all
probability to D2 at zero phase, so P(D2) = cos^2(phi/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import elements as el
from .circuit import (
    Apply,
    Choice,
    Circuit,
    Detect,
    DetectorSpec,
    compare_marginals,
    evolve,
    joint_distribution,
)
from .measure import conditional, marginal, rng_for
from .qstate import (
    BasisChange,
    Dof,
    StateVector,
    ValidationError,
    global_phase_deviation,
    inner,
    rebase,
)
from .screen import (
    DEFAULT_GEOMETRY,
    pattern_from_bin_probs,
    fringe_visibility,
    pattern_from_state,
    sum_patterns,
)


class CatalogError(KeyError):
    """Unknown scenario name; carries the list of valid names."""

    def __init__(self, name: str):
        self.name = name
        self.valid = list_names()
        super().__init__(
            f"unknown scenario {name!r}; valid names: {', '.join(self.valid)}"
        )


@dataclass(frozen=True)
class Check:
    """One executable expectation: passes iff measured() <= tol."""

    name: str
    tol: float
    measured: Callable[[], float]

    def run(self) -> tuple[float, bool]:
        v = float(self.measured())
        return v, v <= self.tol


@dataclass(frozen=True)
class Scenario:
    name: str
    circuit: Circuit
    settings: tuple[dict, ...]
    expectations: tuple[Check, ...]
    paper_figure: str
    description: str
    params: dict = field(default_factory=dict)
    detector_outcomes: dict = field(default_factory=dict)
    default_delays: dict = field(default_factory=dict)


# -- shared pieces --------------------------------------------------------------

PHI_GRID = tuple(2 * math.pi * k / 64 for k in range(64))


def _lr_to_pm(dof_name: str) -> BasisChange:
    """Basis change from circular (L/R) labels to +/- (diagonal) labels."""
    row_p = np.conj(np.array([(1 - 1j) / 2, (1 + 1j) / 2]))
    row_m = np.conj(np.array([(1 + 1j) / 2, (1 - 1j) / 2]))
    return BasisChange(dof_name, np.array([row_p, row_m]), ("+", "-"))


def _random_pol(rng) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def _expect_state(st) -> StateVector:
    if not isinstance(st, StateVector):
        raise ValidationError("evolution unexpectedly blocked")
    return st


# -- two_slit -------------------------------------------------------------------


def _build_two_slit(params) -> Scenario:
    slit = Dof("slit", ("s1", "s2"))
    source = StateVector.basis_state((slit,), ("s1",))
    circ = Circuit(
        (slit,),
        source,
        (
            Apply(el.splitter(slit)),
            Detect(DetectorSpec("D_s", screen_of="slit")),
        ),
    )

    def fringe_vis_dev():
        pat = pattern_from_state(_expect_state(evolve(circ)), "slit")
        return abs(1.0 - fringe_visibility(pat))

    def fringe_shape_dev():
        geo = DEFAULT_GEOMETRY
        pat = pattern_from_state(_expect_state(evolve(circ)), "slit")
        expect = 1 + np.cos(geo.delta(geo.bin_centers()))
        return float(np.max(np.abs(np.array(pat.intensities) - expect)))

    return Scenario(
        name="two_slit",
        circuit=circ,
        settings=({},),
        expectations=(
            Check("two_slit.fringe_visibility_1", 1e-9, fringe_vis_dev),
            Check("two_slit.pattern_is_1_plus_cos", 1e-10, fringe_shape_dev),
        ),
        paper_figure="Figure 1a",
        description="plain double slit: slit superposition shows fringes on the wall",
    )


# -- wheeler --------------------------------------------------------------------


def _build_wheeler(params) -> Scenario:
    slit = Dof("slit", ("s1", "s2"))
    source = StateVector.basis_state((slit,), ("s1",))
    circ = Circuit(
        (slit,),
        source,
        (
            Apply(el.splitter(slit)),
            Choice(
                "screen",
                {
                    "in": (Detect(DetectorSpec("wall", screen_of="slit")),),
                    "out": (Detect(DetectorSpec("counters", measured=(("slit", "path"),))),),
                },
            ),
        ),
    )

    def screen_in_vis_dev():
        pat = pattern_from_state(_expect_state(evolve(circ, {"screen": "in"})), "slit")
        return abs(1.0 - fringe_visibility(pat))

    def screen_out_5050_dev():
        d = joint_distribution(circ, {"screen": "out"})
        return max(abs(d.prob(("s1",)) - 0.5), abs(d.prob(("s2",)) - 0.5))

    def marginal_invariance():
        return compare_marginals(circ, ["slit"], "screen")

    return Scenario(
        name="wheeler",
        circuit=circ,
        settings=({"screen": "in"}, {"screen": "out"}),
        expectations=(
            Check("wheeler.screen_in_interference", 1e-9, screen_in_vis_dev),
            Check("wheeler.screen_out_50_50", 1e-12, screen_out_5050_dev),
            Check("wheeler.marginal_invariance", 1e-10, marginal_invariance),
        ),
        paper_figure="Figure 1b",
        description="delayed choice: removable screen vs path counters behind it",
    )


# -- Mach-Zehnder family --------------------------------------------------------


def _mz_dof() -> Dof:
    return Dof("arm", ("t", "r"))


def _build_mz_one_bs(params) -> Scenario:
    phi = float(params.get("phi", 0.0))
    arm = _mz_dof()
    source = StateVector.basis_state((arm,), ("t",))
    circ = Circuit(
        (arm,),
        source,
        (
            Apply(el.beam_splitter(arm, "t", "r")),
            Apply(el.phase_shifter(arm, "t", phi)),
            Detect(DetectorSpec("arms", measured=(("arm", "path"),))),
        ),
    )

    def half_half_dev():
        worst = 0.0
        for ph in PHI_GRID:
            d = joint_distribution(_build_mz_one_bs({"phi": ph}).circuit)
            worst = max(
                worst, abs(d.prob(("t",)) - 0.5), abs(d.prob(("r",)) - 0.5)
            )
        return worst

    return Scenario(
        name="mz_one_bs",
        circuit=circ,
        settings=({},),
        expectations=(
            Check("mz_one_bs.half_half_all_phi", 1e-12, half_half_dev),
        ),
        paper_figure="Figure 2",
        description="one beam splitter: 50/50 at the counters, independent of phase",
        params={"phi": phi},
        detector_outcomes={"D1": ("arm", "t"), "D2": ("arm", "r")},
    )


def _mz_two_bs_circuit(phi: float) -> Circuit:
    arm = _mz_dof()
    source = StateVector.basis_state((arm,), ("t",))
    return Circuit(
        (arm,),
        source,
        (
            Apply(el.beam_splitter(arm, "t", "r")),
            Apply(el.phase_shifter(arm, "t", phi)),
            Apply(el.beam_splitter(arm, "t", "r")),
            Detect(DetectorSpec("arms", measured=(("arm", "path"),))),
        ),
    )


def _build_mz_two_bs(params) -> Scenario:
    phi = float(params.get("phi", 0.0))
    circ = _mz_two_bs_circuit(phi)

    def cos2_dev():
        worst = 0.0
        for ph in PHI_GRID:
            d = joint_distribution(_mz_two_bs_circuit(ph))
            worst = max(worst, abs(d.prob(("r",)) - math.cos(ph / 2) ** 2))
        return worst

    def all_on_one_port_dev():
        return abs(joint_distribution(_mz_two_bs_circuit(0.0)).prob(("r",)) - 1.0)

    def regroup_dev():
        t_amp, r_amp = 1 / math.sqrt(2), 1j / math.sqrt(2)
        worst = 0.0
        for ph in PHI_GRID:
            st = _expect_state(evolve(_mz_two_bs_circuit(ph)))
            e = np.exp(1j * ph)
            port_t = t_amp * e * t_amp + r_amp * r_amp  # histories T1T2 + R1R2
            port_r = t_amp * e * r_amp + r_amp * t_amp  # histories T1R2 + R1T2
            worst = max(
                worst,
                abs(st.amplitude(("t",)) - port_t),
                abs(st.amplitude(("r",)) - port_r),
            )
        return worst

    return Scenario(
        name="mz_two_bs",
        circuit=circ,
        settings=({},),
        expectations=(
            Check("mz_two_bs.p_d2_cos2_half_phi", 1e-10, cos2_dev),
            Check("mz_two_bs.phi0_single_port", 1e-12, all_on_one_port_dev),
            Check("mz_two_bs.regrouped_amplitudes", 1e-12, regroup_dev),
        ),
        paper_figure="Figure 3",
        description="two beam splitters with a phase shifter: interference at the counters",
        params={"phi": phi},
        detector_outcomes={"D1": ("arm", "t"), "D2": ("arm", "r")},
    )


def _build_mz_recombine(params) -> Scenario:
    phi = float(params.get("phi", 0.0))
    arm = _mz_dof()
    source = StateVector.basis_state((arm,), ("t",))
    # the fixed -pi/2 on the reflected arm is the mirror/lens path phase that
    # parks the single detector on the bright port at phi = 0
    circ = Circuit(
        (arm,),
        source,
        (
            Apply(el.beam_splitter(arm, "t", "r")),
            Apply(el.phase_shifter(arm, "t", phi)),
            Apply(el.phase_shifter(arm, "r", -math.pi / 2)),
            Apply(el.recombiner(arm, "t")),
            Detect(DetectorSpec("D", measured=(("arm", "path"),))),
        ),
    )

    def phi0_prob1_dev():
        d = joint_distribution(_build_mz_recombine({"phi": 0.0}).circuit)
        return abs(d.prob(("t",)) - 1.0)

    return Scenario(
        name="mz_recombine_single_detector",
        circuit=circ,
        settings=({},),
        expectations=(
            Check("mz_recombine.phi0_detector_prob_1", 1e-12, phi0_prob1_dev),
        ),
        paper_figure="Figure 4",
        description="mirrors, a lens, and a single detector registering both arms",
        params={"phi": phi},
        detector_outcomes={"D": ("arm", "t")},
    )


# -- analyzer loop --------------------------------------------------------------


def _analyzer_loop_circuit(pol_amps: np.ndarray) -> Circuit:
    pol = Dof("pol", ("v", "h"))
    chan = Dof("chan", ("U", "L"))
    source = StateVector.from_amplitudes(
        (pol, chan), {("v", "U"): pol_amps[0], ("h", "U"): pol_amps[1]}
    )
    return Circuit(
        (pol, chan),
        source,
        (
            Apply(el.analyzer(pol, chan)),
            Choice(
                "mask",
                {
                    "open": (),
                    "block_L": (Apply(el.blocker(chan, "L")),),
                    "block_U": (Apply(el.blocker(chan, "U")),),
                },
            ),
            Apply(el.inverse_analyzer(pol, chan)),
            Detect(DetectorSpec("D", measured=(("pol", "pm45"),))),
        ),
    )


def _build_analyzer_loop(params) -> Scenario:
    amps45 = np.array([1, 1]) / math.sqrt(2)
    circ = _analyzer_loop_circuit(amps45)
    src45 = circ.source

    def loop_identity_45_dev():
        return global_phase_deviation(
            _expect_state(evolve(circ, {"mask": "open"})), src45
        )

    def loop_identity_random_dev():
        rng = rng_for(20260824)
        worst = 0.0
        for _ in range(100):
            amps = _random_pol(rng)
            c = _analyzer_loop_circuit(amps)
            out = _expect_state(evolve(c, {"mask": "open"}))
            worst = max(worst, global_phase_deviation(out, c.source))
        return worst

    def blocked_lower_dev():
        # |45> with the lower (h-tagged) channel masked: pure |v> out, weight 1/2
        out = _expect_state(evolve(circ, {"mask": "block_L"}))
        pol, chan = circ.dofs
        want = StateVector.basis_state((pol, chan), ("v", "U"))
        return max(global_phase_deviation(out, want), abs(out.weight - 0.5))

    return Scenario(
        name="analyzer_loop",
        circuit=circ,
        settings=({"mask": "open"}, {"mask": "block_L"}, {"mask": "block_U"}),
        expectations=(
            Check("analyzer_loop.identity_on_45", 1e-10, loop_identity_45_dev),
            Check("analyzer_loop.identity_on_random", 1e-10, loop_identity_random_dev),
            Check("analyzer_loop.blocked_lower_gives_v", 1e-10, blocked_lower_dev),
        ),
        paper_figure="Figures 5-6",
        description="vh analyzer followed by its inverse restores the input polarization",
    )


# -- Stern-Gerlach loop ---------------------------------------------------------


def _sg_loop_circuit(spin_amps: np.ndarray) -> Circuit:
    spin = Dof("spin", ("plus", "zero", "minus"))
    path = Dof("path", ("top", "mid", "bot"))
    source = StateVector.from_amplitudes(
        (spin, path),
        {(l, "top"): a for l, a in zip(spin.labels, spin_amps)},
    )
    return Circuit(
        (spin, path),
        source,
        (
            Apply(el.stern_gerlach(spin, path)),
            Choice(
                "mask",
                {
                    "open": (),
                    "keep_top": (
                        Apply(el.blocker(path, "mid")),
                        Apply(el.blocker(path, "bot")),
                    ),
                    "keep_mid": (
                        Apply(el.blocker(path, "top")),
                        Apply(el.blocker(path, "bot")),
                    ),
                    "keep_bot": (
                        Apply(el.blocker(path, "top")),
                        Apply(el.blocker(path, "mid")),
                    ),
                },
            ),
            Apply(el.inverse_stern_gerlach(spin, path)),
            Detect(DetectorSpec("D", measured=(("spin", "path"),))),
        ),
    )


def _build_sg_loop(params) -> Scenario:
    amps = np.array([1, 1, 1]) / math.sqrt(3)
    circ = _sg_loop_circuit(amps)

    def loop_fidelity_dev():
        rng = rng_for(20260825)
        worst = 0.0
        for _ in range(100):
            v = rng.normal(size=3) + 1j * rng.normal(size=3)
            v = v / np.linalg.norm(v)
            c = _sg_loop_circuit(v)
            out = _expect_state(evolve(c, {"mask": "open"}))
            worst = max(worst, abs(1.0 - abs(inner(c.source, out)) ** 2))
        return worst

    def masked_dev():
        rng = rng_for(20260826)
        worst = 0.0
        keep = {"keep_top": ("plus", "top"), "keep_mid": ("zero", "mid"), "keep_bot": ("minus", "bot")}
        for _ in range(20):
            v = rng.normal(size=3) + 1j * rng.normal(size=3)
            v = v / np.linalg.norm(v)
            c = _sg_loop_circuit(v)
            for i, (setting, (spin_label, _)) in enumerate(keep.items()):
                out = _expect_state(evolve(c, {"mask": setting}))
                want = StateVector.basis_state(c.dofs, (spin_label, "top"))
                worst = max(
                    worst,
                    global_phase_deviation(out, want),
                    abs(out.weight - abs(v[i]) ** 2),
                )
        return worst

    return Scenario(
        name="sg_loop",
        circuit=circ,
        settings=({"mask": "open"}, {"mask": "keep_top"}),
        expectations=(
            Check("sg_loop.identity_on_random_spins", 1e-10, loop_fidelity_dev),
            Check("sg_loop.masked_gives_eigenstate", 1e-12, masked_dev),
        ),
        paper_figure="Figures 7-8",
        description="modified Stern-Gerlach loop: separation into three beams is reversible",
    )


# -- one-photon eraser ----------------------------------------------------------


def _build_one_photon_eraser(params) -> Scenario:
    slit = Dof("slit", ("s1", "s2"))
    pol = Dof("pol", ("v", "h"))
    source = StateVector.from_amplitudes(
        (slit, pol), {("s1", "v"): 1, ("s1", "h"): 1}
    )
    circ = Circuit(
        (slit, pol),
        source,
        (
            Apply(el.splitter(slit)),
            Apply(el.linear_polarizer(pol, math.pi / 2, condition=("slit", "s1"))),
            Apply(el.linear_polarizer(pol, 0.0, condition=("slit", "s2"))),
            Choice(
                "eraser",
                {
                    "plus45": (Apply(el.linear_polarizer(pol, math.pi / 4)),),
                    "minus45": (Apply(el.linear_polarizer(pol, 3 * math.pi / 4)),),
                    "absent": (),
                },
            ),
            Detect(DetectorSpec("wall", screen_of="slit")),
        ),
    )

    def marked_flat_dev():
        st = _expect_state(evolve(circ, {"eraser": "absent"}))
        return fringe_visibility(pattern_from_state(st, "slit"))

    def erased_vis_dev():
        worst = 0.0
        for setting in ("plus45", "minus45"):
            st = _expect_state(evolve(circ, {"eraser": setting}))
            worst = max(worst, abs(1.0 - fringe_visibility(pattern_from_state(st, "slit"))))
        return worst

    def fringe_sum_dev():
        marked = _expect_state(evolve(circ, {"eraser": "absent"}))
        plus = _expect_state(evolve(circ, {"eraser": "plus45"}))
        minus = _expect_state(evolve(circ, {"eraser": "minus45"}))
        p_plus = plus.weight / marked.weight
        p_minus = minus.weight / marked.weight
        total = sum_patterns(
            pattern_from_state(plus, "slit"),
            pattern_from_state(minus, "slit"),
            (p_plus, p_minus),
        )
        flat = pattern_from_state(marked, "slit")
        return float(
            np.max(np.abs(np.array(total.intensities) - np.array(flat.intensities)))
        )

    def marked_weight_dev():
        return abs(_expect_state(evolve(circ, {"eraser": "absent"})).weight - 0.5)

    return Scenario(
        name="one_photon_eraser",
        circuit=circ,
        settings=({"eraser": "plus45"}, {"eraser": "minus45"}, {"eraser": "absent"}),
        expectations=(
            Check("one_photon_eraser.marked_pattern_flat", 1e-9, marked_flat_dev),
            Check("one_photon_eraser.erased_visibility_1", 1e-9, erased_vis_dev),
            Check("one_photon_eraser.fringe_plus_antifringe_flat", 1e-10, fringe_sum_dev),
            Check("one_photon_eraser.marked_weight_half", 1e-12, marked_weight_dev),
        ),
        paper_figure="Figures 9-11",
        description="h/v marking kills fringes; a 45-degree polarizer selects fringe or antifringe",
    )


# -- Walborn two-photon eraser --------------------------------------------------


def _walborn_circuit() -> Circuit:
    slit = Dof("slit", ("s1", "s2"))
    spol = Dof("spol", ("x", "y"))
    ppol = Dof("ppol", ("x", "y"))
    source = StateVector.from_amplitudes(
        (slit, spol, ppol), {("s1", "x", "y"): 1, ("s1", "y", "x"): 1}
    )
    return Circuit(
        (slit, spol, ppol),
        source,
        (
            Apply(el.splitter(slit)),
            Apply(el.quarter_wave_plate(spol, math.pi / 4, condition=("slit", "s1"))),
            Apply(el.quarter_wave_plate(spol, -math.pi / 4, condition=("slit", "s2"))),
            Choice(
                "p_pol",
                {
                    "plus45": (Apply(el.linear_polarizer(ppol, math.pi / 4)),),
                    "minus45": (Apply(el.linear_polarizer(ppol, 3 * math.pi / 4)),),
                    "absent": (),
                },
            ),
            Detect(DetectorSpec("D_s", screen_of="slit")),
            Detect(DetectorSpec("D_p", measured=(("ppol", "pm45"),))),
        ),
    )


def _walborn_post_slit_lr(circ: Circuit) -> StateVector:
    """Evolved pre-choice state with the s polarization in circular labels."""
    pre = Circuit(circ.dofs, circ.source, circ.stages[:3])
    st = _expect_state(evolve(pre))
    return rebase(st, el.basis_change("circular", st.dof("spol")))


def _walborn_checks(circ: Circuit, name: str) -> tuple[Check, ...]:
    slit = circ.dofs[0]
    spol_lr = Dof("spol", ("L", "R"))
    spol_pm = Dof("spol", ("+", "-"))
    ppol = circ.dofs[2]
    ppol_pm = Dof("ppol", ("+", "-"))

    def four_term_dev():
        got = _walborn_post_slit_lr(circ)
        want = StateVector.from_amplitudes(
            (slit, spol_lr, ppol),
            {
                ("s1", "L", "y"): 0.5,
                ("s1", "R", "x"): 0.5j,
                ("s2", "R", "y"): 0.5,
                ("s2", "L", "x"): -0.5j,
            },
        )
        return global_phase_deviation(got, want)

    def pm_rewrite_dev():
        got = _walborn_post_slit_lr(circ)
        got = rebase(got, _lr_to_pm("spol"))
        got = rebase(got, el.basis_change("pm45", ppol))
        want = StateVector.from_amplitudes(
            (slit, spol_pm, ppol_pm),
            {
                ("s1", "+", "+"): 0.5,
                ("s2", "+", "+"): -0.5j,
                ("s1", "-", "-"): 0.5j,
                ("s2", "-", "-"): -0.5,
            },
        )
        return global_phase_deviation(got, want)

    def conditioned_on_x_dev():
        st = _walborn_post_slit_lr(circ)
        st = el.apply_op(st, el.linear_polarizer(ppol, 0.0))
        want = StateVector.from_amplitudes(
            (slit, spol_lr, ppol),
            {("s1", "R", "x"): 1j, ("s2", "L", "x"): -1j},
        )
        return global_phase_deviation(st, want)

    def conditioned_vis_dev():
        d = joint_distribution(circ, {"p_pol": "absent"})
        worst = 0.0
        for outcome in ("+", "-"):
            sub = conditional(d, ("ppol", outcome))
            pat = pattern_from_bin_probs(
                {k[0]: p for k, p in sub.outcomes.items()}, DEFAULT_GEOMETRY
            )
            worst = max(worst, abs(1.0 - fringe_visibility(pat)))
        return worst

    def unconditioned_flat_dev():
        st = _expect_state(evolve(circ, {"p_pol": "absent"}))
        return fringe_visibility(pattern_from_state(st, "slit"))

    def fringe_sum_dev():
        d = joint_distribution(circ, {"p_pol": "absent"})
        pats, weights = [], []
        for outcome in ("+", "-"):
            sub = conditional(d, ("ppol", outcome))
            pats.append(
                pattern_from_bin_probs(
                    {k[0]: p for k, p in sub.outcomes.items()}, DEFAULT_GEOMETRY
                )
            )
            weights.append(marginal(d, ["ppol"]).prob((outcome,)))
        total = sum_patterns(pats[0], pats[1], tuple(weights))
        flat = pattern_from_bin_probs(
            {k[0]: p for k, p in marginal(d, ["D_s"]).outcomes.items()},
            DEFAULT_GEOMETRY,
        )
        return float(
            np.max(np.abs(np.array(total.intensities) - np.array(flat.intensities)))
        )

    def polarizer_before_ds_dev():
        # selecting +/- on the p photon or directly on the s photon picks out
        # the same fringe/antifringe at the screen
        st = _walborn_post_slit_lr(circ)
        st_pm = rebase(st, _lr_to_pm("spol"))
        st_pm = rebase(st_pm, el.basis_change("pm45", ppol))
        worst = 0.0
        for proj in (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])):
            via_p = el.apply_op(st_pm, el.ElementOp(el.FILTER, ("ppol",), proj))
            via_s = el.apply_op(st_pm, el.ElementOp(el.FILTER, ("spol",), proj))
            pa = pattern_from_state(via_p, "slit")
            pb = pattern_from_state(via_s, "slit")
            worst = max(
                worst,
                float(np.max(np.abs(np.array(pa.intensities) - np.array(pb.intensities)))),
            )
        return worst

    def marginal_invariance():
        return compare_marginals(circ, ["D_s"], "p_pol")

    return (
        Check(f"{name}.four_term_state", 1e-10, four_term_dev),
        Check(f"{name}.pm_basis_rewrite", 1e-10, pm_rewrite_dev),
        Check(f"{name}.conditioned_on_p_x", 1e-10, conditioned_on_x_dev),
        Check(f"{name}.conditioned_visibility_1", 1e-9, conditioned_vis_dev),
        Check(f"{name}.unconditioned_flat", 1e-9, unconditioned_flat_dev),
        Check(f"{name}.fringe_plus_antifringe_total", 1e-10, fringe_sum_dev),
        Check(f"{name}.polarizer_before_ds_same_selection", 1e-10, polarizer_before_ds_dev),
        Check(f"{name}.s_marginal_invariance", 1e-10, marginal_invariance),
    )


def _build_walborn(params) -> Scenario:
    circ = _walborn_circuit()
    return Scenario(
        name="walborn",
        circuit=circ,
        settings=({"p_pol": "absent"}, {"p_pol": "plus45"}, {"p_pol": "minus45"}),
        expectations=_walborn_checks(circ, "walborn"),
        paper_figure="Figures 12-14",
        description="two-photon eraser: quarter-wave plates over the slits, polarizer at D_p",
    )


def _build_walborn_delayed(params) -> Scenario:
    circ = _walborn_circuit()
    return Scenario(
        name="walborn_delayed",
        circuit=circ,
        settings=({"p_pol": "absent"}, {"p_pol": "plus45"}, {"p_pol": "minus45"}),
        expectations=_walborn_checks(circ, "walborn_delayed"),
        paper_figure="Figure 15",
        description="delayed erasure: D_p fires long after D_s; coincidences pick the fringes",
        default_delays={"D_p": 1e9},
    )


# -- catalog --------------------------------------------------------------------

_CATALOG: dict[str, tuple[Callable[[dict], Scenario], str, str]] = {
    "two_slit": (_build_two_slit, "Figure 1a", "plain double slit"),
    "wheeler": (_build_wheeler, "Figure 1b", "delayed-choice removable screen"),
    "mz_one_bs": (_build_mz_one_bs, "Figure 2", "one-beam-splitter interferometer"),
    "mz_two_bs": (_build_mz_two_bs, "Figure 3", "two-beam-splitter interferometer"),
    "mz_recombine_single_detector": (
        _build_mz_recombine,
        "Figure 4",
        "single detector registering both arms",
    ),
    "analyzer_loop": (_build_analyzer_loop, "Figures 5-6", "vh analyzer loop"),
    "sg_loop": (_build_sg_loop, "Figures 7-8", "Stern-Gerlach loop"),
    "one_photon_eraser": (
        _build_one_photon_eraser,
        "Figures 9-11",
        "single-beam eraser with marking polarizers",
    ),
    "walborn": (_build_walborn, "Figures 12-14", "two-photon eraser"),
    "walborn_delayed": (_build_walborn_delayed, "Figure 15", "delayed erasure"),
}


def list_names() -> list[str]:
    return list(_CATALOG.keys())


def build(name: str, **params) -> Scenario:
    try:
        builder = _CATALOG[name][0]
    except KeyError:
        raise CatalogError(name) from None
    return builder(params)


def list_scenarios() -> list[tuple[str, str, str]]:
    return [(name, fig, desc) for name, (_, fig, desc) in _CATALOG.items()]


def expected_properties(name: str) -> tuple[Check, ...]:
    return build(name).expectations
