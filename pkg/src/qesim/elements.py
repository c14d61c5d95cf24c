"""The physical element library: unitaries and filters apparatuses are built from.

Conventions (all fixed, checked by tests):

* beam splitter: transmission 1/sqrt2, reflection i/sqrt2 (symmetric);
* circular basis: |L> = (|x> + i|y>)/sqrt2, |R> = (|x> - i|y>)/sqrt2;
* quarter-wave plate: R(theta) . diag(1, -i) . R(-theta), i.e. unit phase on
  the fast axis and -i on the slow axis, with a configurable extra unit phase.

With these choices the two-photon eraser pipeline produces the familiar
entangled four-term state whose plus/minus-basis form makes the erasure
correlations explicit; the scenario tests pin the exact amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .qstate import (
    NORM_TOL,
    BasisChange,
    Dof,
    StateVector,
    ValidationError,
    is_unitary,
)

UNITARY = "unitary"
FILTER = "filter"

#: survival probability below which a filtered state counts as fully blocked
ALL_BLOCKED_EPS = 1e-15


class AllBlockedError(RuntimeError):
    """Every branch of the state was removed by a filter."""


@dataclass(frozen=True)
class Conventions:
    """Phase conventions the element matrices are built from."""

    bs_transmission: complex = 1 / math.sqrt(2)
    bs_reflection: complex = 1j / math.sqrt(2)
    circular_l: tuple[complex, complex] = (1 / math.sqrt(2), 1j / math.sqrt(2))
    circular_r: tuple[complex, complex] = (1 / math.sqrt(2), -1j / math.sqrt(2))
    qwp_global_phase: complex = 1.0 + 0.0j


DEFAULT_CONVENTIONS = Conventions()


@dataclass(frozen=True)
class ElementOp:
    """One element's action on a state.

    ``matrix`` acts on the product space of ``target_dofs`` (C order).  A
    ``condition`` restricts the action to the branch where the named dof
    carries the given label; elsewhere the element is the identity.
    """

    kind: str
    target_dofs: tuple[str, ...]
    matrix: np.ndarray = field(repr=False)
    condition: Optional[tuple[str, str]] = None
    name: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "target_dofs", tuple(self.target_dofs))
        if self.kind not in (UNITARY, FILTER):
            raise ValidationError(f"unknown element kind {self.kind!r}")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("element matrix must be square")
        if self.condition is not None and self.condition[0] in self.target_dofs:
            raise ValidationError("condition dof cannot also be a target dof")
        if self.kind == UNITARY:
            if not is_unitary(m):
                raise ValidationError("unitary element matrix fails M^dag M = I")
        else:
            if np.max(np.abs(m @ m - m)) > NORM_TOL or np.max(np.abs(m.conj().T - m)) > NORM_TOL:
                raise ValidationError("filter matrix must be an orthogonal projector")

    def acts_on(self) -> tuple[str, ...]:
        """Dofs whose joint state this element can change or correlate."""
        if self.condition is None:
            return self.target_dofs
        return self.target_dofs + (self.condition[0],)


def _transform(state: StateVector, op: ElementOp) -> np.ndarray:
    """Raw (unnormalized) amplitude array after the element's matrix action."""
    dims = state.dims
    axes = [state.axis(n) for n in op.target_dofs]
    k = int(np.prod([dims[a] for a in axes]))
    if op.matrix.shape[0] != k:
        raise ValidationError(
            f"element expects dimension {op.matrix.shape[0]}, targets give {k}"
        )
    t = state.tensor_view().copy()
    rest_axes = [i for i in range(len(dims)) if i not in axes]
    perm = axes + rest_axes
    t = np.transpose(t, perm).reshape(k, -1)

    if op.condition is None:
        t = op.matrix @ t
    else:
        cond_dof, cond_label = op.condition
        cax = state.axis(cond_dof)
        ci = state.dofs[cax].index(cond_label)
        # column block selection: reshape the rest-dimensions so the condition
        # axis is addressable, then transform only the matching slice
        rest_dims = [dims[i] for i in rest_axes]
        pos = rest_axes.index(cax)
        t = t.reshape([k] + rest_dims)
        sl = [slice(None)] * t.ndim
        sl[1 + pos] = ci
        sub = t[tuple(sl)].reshape(k, -1)
        t[tuple(sl)] = (op.matrix @ sub).reshape(t[tuple(sl)].shape)
        t = t.reshape(k, -1)

    inv = np.argsort(perm)
    return np.transpose(
        t.reshape([dims[a] for a in axes] + [dims[i] for i in rest_axes]), inv
    ).reshape(-1)


def apply_op(state: StateVector, op: ElementOp) -> StateVector:
    """Apply an element to a state.

    Unitaries rotate amplitudes; filters project, renormalize, and fold the
    pass probability into the state's weight.  Raises :class:`AllBlockedError`
    when a filter removes (essentially) all probability mass.
    """
    out = _transform(state, op)
    if op.kind == UNITARY:
        return StateVector(state.dofs, out, state.weight)
    pass_prob = float(np.vdot(out, out).real)
    if pass_prob < ALL_BLOCKED_EPS:
        raise AllBlockedError(f"filter {op.name or op.target_dofs} blocked everything")
    return StateVector(state.dofs, out / math.sqrt(pass_prob), state.weight * pass_prob)


# -- constructors ---------------------------------------------------------------


def _pair_axes(dof: Dof, a: str, b: str) -> tuple[int, int]:
    return dof.index(a), dof.index(b)


def _embed_two(dof: Dof, ia: int, ib: int, block: np.ndarray) -> np.ndarray:
    m = np.eye(dof.dim, dtype=complex)
    m[ia, ia], m[ia, ib] = block[0, 0], block[0, 1]
    m[ib, ia], m[ib, ib] = block[1, 0], block[1, 1]
    return m


def beam_splitter(
    path_dof: Dof, port_a: str, port_b: str, conv: Conventions = DEFAULT_CONVENTIONS
) -> ElementOp:
    """50/50 beam splitter coupling two port labels of a path dof."""
    ia, ib = _pair_axes(path_dof, port_a, port_b)
    t, r = conv.bs_transmission, conv.bs_reflection
    m = _embed_two(path_dof, ia, ib, np.array([[t, r], [r, t]]))
    return ElementOp(UNITARY, (path_dof.name,), m, name="bs")


def phase_shifter(path_dof: Dof, label: str, phi: float) -> ElementOp:
    """Multiply one path label's amplitude by e^{i phi}."""
    m = np.eye(path_dof.dim, dtype=complex)
    m[path_dof.index(label), path_dof.index(label)] = np.exp(1j * phi)
    return ElementOp(UNITARY, (path_dof.name,), m, name="phase")


def _tag_matrix(internal: Dof, path: Dof) -> np.ndarray:
    """Controlled shift: internal label k moves path label j to j+k (mod n).

    From the reference path label (index 0) this correlates internal label k
    with path label k; the adjoint removes the tags.
    """
    n = internal.dim
    if path.dim != n:
        raise ValidationError("internal and path dofs must have equal dimension")
    m = np.zeros((n * n, n * n), dtype=complex)
    for k in range(n):
        for j in range(n):
            m[k * n + (j + k) % n, k * n + j] = 1.0
    return m


def analyzer(pol_dof: Dof, path_dof: Dof) -> ElementOp:
    """Tag polarization eigenstates with path channels (first pol label to the
    first/reference channel, second to the other)."""
    if pol_dof.dim != 2 or path_dof.dim != 2:
        raise ValidationError("analyzer needs 2-dim polarization and path dofs")
    m = _tag_matrix(pol_dof, path_dof)
    return ElementOp(UNITARY, (pol_dof.name, path_dof.name), m, name="analyzer")


def inverse_analyzer(pol_dof: Dof, path_dof: Dof) -> ElementOp:
    op = analyzer(pol_dof, path_dof)
    return ElementOp(UNITARY, op.target_dofs, op.matrix.conj().T, name="analyzer_inv")


def stern_gerlach(spin_dof: Dof, path_dof: Dof) -> ElementOp:
    """Tag the three spin labels with three path labels."""
    if spin_dof.dim != 3 or path_dof.dim != 3:
        raise ValidationError("stern_gerlach needs 3-dim spin and path dofs")
    m = _tag_matrix(spin_dof, path_dof)
    return ElementOp(UNITARY, (spin_dof.name, path_dof.name), m, name="sg")


def inverse_stern_gerlach(spin_dof: Dof, path_dof: Dof) -> ElementOp:
    op = stern_gerlach(spin_dof, path_dof)
    return ElementOp(UNITARY, op.target_dofs, op.matrix.conj().T, name="sg_inv")


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def quarter_wave_plate(
    pol_dof: Dof,
    fast_axis: float,
    condition: Optional[tuple[str, str]] = None,
    conv: Conventions = DEFAULT_CONVENTIONS,
) -> ElementOp:
    """Quarter-wave plate with its fast axis at ``fast_axis`` radians."""
    if pol_dof.dim != 2:
        raise ValidationError("quarter_wave_plate needs a 2-dim polarization dof")
    m = conv.qwp_global_phase * (
        _rot(fast_axis) @ np.diag([1.0, -1.0j]) @ _rot(-fast_axis)
    )
    return ElementOp(UNITARY, (pol_dof.name,), m, condition=condition, name="qwp")


def linear_polarizer(
    pol_dof: Dof, angle: float, condition: Optional[tuple[str, str]] = None
) -> ElementOp:
    """Projector onto cos(angle)|first> + sin(angle)|second>."""
    if pol_dof.dim != 2:
        raise ValidationError("linear_polarizer needs a 2-dim polarization dof")
    v = np.array([math.cos(angle), math.sin(angle)], dtype=complex)
    return ElementOp(FILTER, (pol_dof.name,), np.outer(v, v.conj()), condition=condition, name="pol")


def blocker(path_dof: Dof, label: str) -> ElementOp:
    """Absorb the named path label: project onto its complement."""
    m = np.eye(path_dof.dim, dtype=complex)
    i = path_dof.index(label)
    m[i, i] = 0.0
    return ElementOp(FILTER, (path_dof.name,), m, name="block")


def recombiner(path_dof: Dof, into_label: str) -> ElementOp:
    """Map the symmetric combination of a 2-label path dof onto ``into_label``."""
    if path_dof.dim != 2:
        raise ValidationError("recombiner needs a 2-dim path dof")
    i = path_dof.index(into_label)
    s = 1 / math.sqrt(2)
    m = np.empty((2, 2), dtype=complex)
    m[i, :] = (s, s)
    m[1 - i, :] = (s, -s)
    return ElementOp(UNITARY, (path_dof.name,), m, name="recombine")


def splitter(path_dof: Dof) -> ElementOp:
    """Two-slit screen: reference label -> equal superposition of both labels."""
    if path_dof.dim != 2:
        raise ValidationError("splitter needs a 2-dim path dof")
    s = 1 / math.sqrt(2)
    m = np.array([[s, s], [s, -s]], dtype=complex)
    return ElementOp(UNITARY, (path_dof.name,), m, name="split")


# -- named measurement bases ----------------------------------------------------


def basis_change(name: str, dof: Dof, conv: Conventions = DEFAULT_CONVENTIONS) -> Optional[BasisChange]:
    """Resolve a named detector basis to a BasisChange (None = computational)."""
    if name in ("path", "comp", "computational"):
        return None
    if name in ("pm45", "diag"):
        if dof.dim != 2:
            raise ValidationError(f"basis {name!r} needs a 2-dim dof")
        s = 1 / math.sqrt(2)
        return BasisChange(dof.name, np.array([[s, s], [s, -s]]), ("+", "-"))
    if name == "circular":
        if dof.dim != 2:
            raise ValidationError("basis 'circular' needs a 2-dim dof")
        l_row = np.conj(conv.circular_l)
        r_row = np.conj(conv.circular_r)
        return BasisChange(dof.name, np.array([l_row, r_row]), ("L", "R"))
    raise ValidationError(f"unknown basis name {name!r}")


BASIS_NAMES = ("path", "pm45", "circular")
