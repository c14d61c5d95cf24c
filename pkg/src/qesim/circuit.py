"""Executable experiments: sources, elements, choice points, and detectors.

Evolution is pure and deterministic.  Detection is ideal projective
measurement in each detector's declared basis; a screen detector measures the
far-field position distribution of a two-label path dof.  Filters post-select:
the evolved state is renormalized and the pass probability accumulates in its
weight.  ``compare_marginals`` instead keeps the absorbed branches, so the
full-ensemble marginal of an untouched subsystem can be compared across
delayed-choice settings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import elements as el
from .measure import OutcomeDistribution
from .qstate import CompositionError, Dof, StateVector, ValidationError, rebase
from .screen import DEFAULT_GEOMETRY, SlitGeometry


class ContractError(ValueError):
    """A caller violated an operation's stated precondition."""


@dataclass(frozen=True)
class DetectorSpec:
    """What one detector registers.

    Either ``measured`` (dof name, basis name) pairs, or ``screen_of`` naming
    a two-label path dof whose far-field pattern the detector bins.
    ``time_offset`` (ns) shifts this detector's event timestamps.
    """

    name: str
    measured: tuple[tuple[str, str], ...] = ()
    screen_of: str | None = None
    geometry: SlitGeometry = DEFAULT_GEOMETRY
    time_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "measured", tuple(tuple(m) for m in self.measured))
        if (self.screen_of is None) == (not self.measured):
            raise ValidationError(
                f"detector {self.name!r} must measure dofs or be a screen, not both/neither"
            )

    def measured_dofs(self) -> tuple[str, ...]:
        if self.screen_of is not None:
            return (self.screen_of,)
        return tuple(d for d, _ in self.measured)

    def axis_names(self) -> tuple[str, ...]:
        if self.screen_of is not None:
            return (self.name,)
        return tuple(d for d, _ in self.measured)


@dataclass(frozen=True)
class Apply:
    op: el.ElementOp


@dataclass(frozen=True)
class Detect:
    spec: DetectorSpec


@dataclass(frozen=True)
class Choice:
    """A named point where one of several alternative stage lists is wired in."""

    name: str
    alternatives: dict[str, tuple]

    def __post_init__(self):
        if not self.alternatives:
            raise ValidationError(f"choice {self.name!r} needs >= 1 alternative")
        object.__setattr__(
            self,
            "alternatives",
            {k: tuple(v) for k, v in self.alternatives.items()},
        )


Stage = Apply | Detect | Choice


@dataclass(frozen=True)
class AllBlocked:
    """Degenerate evolution result: every branch was absorbed by filters."""

    dofs: tuple[Dof, ...]
    weight: float = 0.0


@dataclass(frozen=True)
class Circuit:
    dofs: tuple[Dof, ...]
    source: StateVector
    stages: tuple[Stage, ...]

    def __post_init__(self):
        object.__setattr__(self, "dofs", tuple(self.dofs))
        object.__setattr__(self, "stages", tuple(self.stages))
        if self.source.dofs != self.dofs:
            raise ValidationError("source state space does not match circuit dofs")
        names = {d.name for d in self.dofs}
        for spec in self.detectors():
            for dn in spec.measured_dofs():
                if dn not in names:
                    raise ValidationError(
                        f"detector {spec.name!r} references unknown dof {dn!r}"
                    )

    def choice_names(self) -> list[str]:
        names: list[str] = []

        def walk(stages):
            for s in stages:
                if isinstance(s, Choice):
                    names.append(s.name)
                    for alt in s.alternatives.values():
                        walk(alt)

        walk(self.stages)
        return names

    def detectors(self, settings: dict[str, str] | None = None) -> list[DetectorSpec]:
        """Detectors in stage order; with settings, only the active branch."""
        out: list[DetectorSpec] = []

        def walk(stages):
            for s in stages:
                if isinstance(s, Detect):
                    out.append(s.spec)
                elif isinstance(s, Choice):
                    if settings is None:
                        for alt in s.alternatives.values():
                            walk(alt)
                    else:
                        walk(s.alternatives[settings[s.name]])

        walk(self.stages)
        return out

    def find_choice(self, name: str) -> Choice:
        def walk(stages):
            for s in stages:
                if isinstance(s, Choice):
                    if s.name == name:
                        return s
                    for alt in s.alternatives.values():
                        found = walk(alt)
                        if found:
                            return found
            return None

        c = walk(self.stages)
        if c is None:
            raise ValidationError(f"no choice named {name!r}")
        return c


def validate_settings(c: Circuit, settings: dict[str, str]) -> None:
    wanted = set(c.choice_names())
    got = set(settings)
    if wanted - got:
        raise ValidationError(f"missing settings for choices {sorted(wanted - got)}")
    if got - wanted:
        raise ValidationError(f"unknown choice names {sorted(got - wanted)}")

    def check_alt(stages):
        for s in stages:
            if isinstance(s, Choice):
                if settings[s.name] not in s.alternatives:
                    raise ValidationError(
                        f"choice {s.name!r} has no alternative {settings[s.name]!r}"
                    )
                for alt in s.alternatives.values():
                    check_alt(alt)

    check_alt(c.stages)


def _active_stages(stages, settings) -> list[Stage]:
    out: list[Stage] = []
    for s in stages:
        if isinstance(s, Choice):
            out.extend(_active_stages(s.alternatives[settings[s.name]], settings))
        else:
            out.append(s)
    return out


def evolve(c: Circuit, settings: dict[str, str] | None = None) -> StateVector | AllBlocked:
    """Pre-measurement state after all active Apply stages (Detects are inert)."""
    settings = settings or {}
    validate_settings(c, settings)
    state = c.source
    for s in _active_stages(c.stages, settings):
        if isinstance(s, Apply):
            try:
                state = el.apply_op(state, s.op)
            except el.AllBlockedError:
                return AllBlocked(c.dofs)
    return state


def _branched_evolve(c: Circuit, settings: dict[str, str]) -> list[StateVector]:
    """Evolve keeping both outcomes of every filter (pass and absorbed).

    Returns a list of normalized branch states whose weights sum to the
    pre-filter mass; zero-weight branches are dropped.
    """
    validate_settings(c, settings)
    branches = [c.source]
    for s in _active_stages(c.stages, settings):
        if not isinstance(s, Apply):
            continue
        op = s.op
        nxt: list[StateVector] = []
        for st in branches:
            if op.kind == el.UNITARY:
                nxt.append(el.apply_op(st, op))
                continue
            raw = el._transform(st, op)
            blocked = st.amps - raw
            for arr in (raw, blocked):
                p = float(np.vdot(arr, arr).real)
                if p < el.ALL_BLOCKED_EPS:
                    continue
                nxt.append(StateVector(st.dofs, arr / np.sqrt(p), st.weight * p))
        branches = nxt
    return branches


def _screen_matrix(geometry: SlitGeometry) -> np.ndarray:
    delta = geometry.delta(geometry.bin_centers())
    return np.stack([np.exp(1j * delta / 2), np.exp(-1j * delta / 2)], axis=1)


def distribution_from_state(
    state: StateVector, detectors: list[DetectorSpec]
) -> OutcomeDistribution:
    """Joint Born distribution over the detectors' declared measurements."""
    seen: set[str] = set()
    for spec in detectors:
        for dn in spec.measured_dofs():
            if dn in seen:
                raise ValidationError(f"dof {dn!r} measured by two detectors")
            seen.add(dn)

    for spec in detectors:
        if spec.screen_of is None:
            for dn, basis in spec.measured:
                change = el.basis_change(basis, state.dof(dn))
                if change is not None:
                    state = rebase(state, change)

    t = state.tensor_view()
    dof_axis = {d.name: i for i, d in enumerate(state.dofs)}
    n_dofs = len(state.dofs)
    screens = [s for s in detectors if s.screen_of is not None]
    # contract each screen's path axis against its bin-phase matrix; the new
    # bin axis is appended at the end, so earlier axes keep their meaning
    for spec in screens:
        ax = dof_axis[spec.screen_of]
        if state.dof(spec.screen_of).dim != 2:
            raise ValidationError("screen path dof must have 2 labels")
        m = _screen_matrix(spec.geometry)
        t = np.moveaxis(
            np.tensordot(m, np.moveaxis(t, ax, 0), axes=([1], [0])), 0, -1
        )
        for name in list(dof_axis):
            if dof_axis[name] > ax:
                dof_axis[name] -= 1
        del dof_axis[spec.screen_of]

    n_plain = n_dofs - len(screens)
    screen_axis = {spec.name: n_plain + i for i, spec in enumerate(screens)}
    axis_info: list[tuple[str, tuple[str, ...], int]] = []  # name, labels, axis
    for spec in detectors:
        if spec.screen_of is not None:
            labels = tuple(
                spec.geometry.bin_label(i) for i in range(spec.geometry.bins)
            )
            axis_info.append((spec.name, labels, screen_axis[spec.name]))
        else:
            for dn, _basis in spec.measured:
                axis_info.append((dn, state.dof(dn).labels, dof_axis[dn]))

    probs = np.abs(t) ** 2
    keep = [ax for _, _, ax in axis_info]
    drop = tuple(i for i in range(probs.ndim) if i not in keep)
    p = probs.sum(axis=drop) if drop else probs
    if keep:
        p = np.transpose(p, np.argsort(np.argsort(keep)))
    total = float(p.sum())
    if total > 0:
        p = p * (state.weight / total)
    out: dict[tuple[str, ...], float] = {}
    label_sets = [labels for _, labels, _ in axis_info]
    for idx in np.ndindex(*p.shape):
        out[tuple(label_sets[i][j] for i, j in enumerate(idx))] = float(p[idx])
    mass = state.weight if total > 0 else 0.0
    return OutcomeDistribution(tuple(name for name, _, _ in axis_info), out, mass)


def joint_distribution(
    c: Circuit, settings: dict[str, str] | None = None
) -> OutcomeDistribution:
    """Born probabilities over the joint outcomes of all active detectors."""
    settings = settings or {}
    state = evolve(c, settings)
    specs = c.detectors(settings)
    if not specs:
        raise ContractError("circuit has no Detect stage under these settings")
    if isinstance(state, AllBlocked):
        axes: list[str] = []
        for spec in specs:
            axes.extend(spec.axis_names())
        return OutcomeDistribution(tuple(axes), {}, 0.0)
    return distribution_from_state(state, specs)


def _acted_dofs(stages) -> set[str]:
    acted: set[str] = set()
    for s in stages:
        if isinstance(s, Apply):
            acted.update(s.op.acts_on())
        elif isinstance(s, Choice):
            for alt in s.alternatives.values():
                acted.update(_acted_dofs(alt))
    return acted


def compare_marginals(
    c: Circuit,
    axis_subset,
    choice_name: str,
    base_settings: dict[str, str] | None = None,
) -> float:
    """Max pairwise total-variation distance of the subset's full-ensemble
    marginal across all alternatives of the named choice.

    Each axis is either a screen detector declared outside the choice or a dof
    name (measured in its computational basis).  Filters inside the evolution
    keep their absorbed branches here, so the marginal covers the whole
    ensemble, not just post-selected survivors.
    """
    axis_subset = [axis_subset] if isinstance(axis_subset, str) else list(axis_subset)
    choice = c.find_choice(choice_name)
    common_screens = {
        s.name: s for s in c.detectors(None) if s.screen_of is not None
    }
    choice_detnames = set()
    for alt in choice.alternatives.values():
        for s in alt:
            if isinstance(s, Detect):
                choice_detnames.add(s.spec.name)

    subset_dofs: set[str] = set()
    probes: list[DetectorSpec] = []
    for ax in axis_subset:
        if ax in common_screens and ax not in choice_detnames:
            probes.append(common_screens[ax])
            subset_dofs.add(common_screens[ax].screen_of)
        else:
            d = c.source.dof(ax)  # raises CompositionError for unknown names
            probes.append(DetectorSpec(name=f"_probe_{ax}", measured=((ax, "path"),)))
            subset_dofs.add(d.name)

    for alt_stages in choice.alternatives.values():
        touched = _acted_dofs(alt_stages)
        overlap = touched & subset_dofs
        if overlap:
            raise ContractError(
                f"choice {choice_name!r} acts on subset dofs {sorted(overlap)}"
            )

    base = dict(base_settings or {})
    mixtures: list[OutcomeDistribution] = []
    for alt in choice.alternatives:
        settings = {**base, choice_name: alt}
        acc: dict[tuple[str, ...], float] = {}
        axes = None
        mass = 0.0
        for branch in _branched_evolve(c, settings):
            dist = distribution_from_state(branch, probes)
            axes = dist.axes
            mass += dist.total_mass
            for k, p in dist.outcomes.items():
                acc[k] = acc.get(k, 0.0) + p
        if axes is None:
            raise ContractError("all branches blocked; marginal undefined")
        mixtures.append(OutcomeDistribution(axes, acc, mass))

    worst = 0.0
    from .measure import total_variation

    for i in range(len(mixtures)):
        for j in range(i + 1, len(mixtures)):
            worst = max(worst, total_variation(mixtures[i], mixtures[j]))
    return worst
