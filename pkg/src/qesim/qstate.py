"""Complex-amplitude state algebra over composite labeled Hilbert spaces.

States live on an ordered list of degrees of freedom (dofs), each with a
small set of named basis labels.  Amplitudes are stored dense over the full
product basis in canonical order (C order over dof positions, label order
within each dof), always normalized; survival probability through filters is
tracked separately as ``weight``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12


class ValidationError(ValueError):
    """A constructor argument violates a structural invariant."""


class CompositionError(ValueError):
    """Two values cannot be combined (mismatched or colliding spaces)."""


@dataclass(frozen=True)
class Dof:
    """A named degree of freedom with ordered basis labels."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) < 2:
            raise ValidationError(f"dof {self.name!r} needs >= 2 labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"dof {self.name!r} has duplicate labels")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(
                f"dof {self.name!r} has no label {label!r}"
            ) from None


@dataclass(frozen=True)
class BasisChange:
    """A unitary relabeling of one dof's basis."""

    dof: str
    matrix: np.ndarray  # rows: new labels, columns: old labels
    new_labels: tuple[str, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "new_labels", tuple(self.new_labels))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("basis-change matrix must be square")
        if len(self.new_labels) != m.shape[0]:
            raise ValidationError("label count must match matrix dimension")
        if not is_unitary(m):
            raise ValidationError("basis-change matrix is not unitary")

    def inverse(self, old_labels: tuple[str, ...]) -> "BasisChange":
        return BasisChange(self.dof, self.matrix.conj().T, old_labels)


def is_unitary(m: np.ndarray, tol: float = NORM_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    eye = np.eye(m.shape[0])
    return np.max(np.abs(m.conj().T @ m - eye)) < tol


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitudes over the product basis of ``dofs``.

    ``weight`` is the probability mass that survived all filters applied so
    far; it multiplies any Born probability computed from the amplitudes.
    """

    dofs: tuple[Dof, ...]
    amps: np.ndarray = field(repr=False)
    weight: float = 1.0

    def __post_init__(self):
        dofs = tuple(self.dofs)
        object.__setattr__(self, "dofs", dofs)
        names = [d.name for d in dofs]
        if len(set(names)) != len(names):
            raise CompositionError(f"duplicate dof names in {names}")
        a = np.asarray(self.amps, dtype=complex).reshape(-1)
        n = self.dim
        if a.size != n:
            raise ValidationError(f"expected {n} amplitudes, got {a.size}")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > 1e-9:
            raise ValidationError(f"amplitudes not normalized (norm={norm})")
        if abs(norm - 1.0) > NORM_TOL:
            a = a / norm
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)
        if not (-NORM_TOL <= self.weight <= 1.0 + NORM_TOL):
            raise ValidationError(f"weight {self.weight} outside [0, 1]")
        object.__setattr__(self, "weight", float(min(max(self.weight, 0.0), 1.0)))

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def from_amplitudes(dofs, mapping, weight: float = 1.0) -> "StateVector":
        """Build a state from a {label tuple: amplitude} mapping (normalized)."""
        dofs = tuple(dofs)
        dims = tuple(d.dim for d in dofs)
        a = np.zeros(int(np.prod(dims)), dtype=complex)
        for labels, amp in mapping.items():
            labels = (labels,) if isinstance(labels, str) else tuple(labels)
            if len(labels) != len(dofs):
                raise ValidationError(f"key {labels} has wrong arity")
            idx = np.ravel_multi_index(
                tuple(d.index(l) for d, l in zip(dofs, labels)), dims
            )
            a[idx] += amp
        norm = np.linalg.norm(a)
        if norm < 1e-15:
            raise ValidationError("amplitudes are not normalizable (all zero)")
        return StateVector(dofs, a / norm, weight)

    @staticmethod
    def basis_state(dofs, labels, weight: float = 1.0) -> "StateVector":
        return StateVector.from_amplitudes(dofs, {tuple(labels): 1.0}, weight)

    # -- structure ------------------------------------------------------------

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d.dim for d in self.dofs)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def dof(self, name: str) -> Dof:
        for d in self.dofs:
            if d.name == name:
                return d
        raise CompositionError(f"no dof named {name!r}")

    def axis(self, name: str) -> int:
        for i, d in enumerate(self.dofs):
            if d.name == name:
                return i
        raise CompositionError(f"no dof named {name!r}")

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def basis_labels(self):
        """Joint label tuples in canonical order."""
        return itertools.product(*(d.labels for d in self.dofs))

    def amplitude(self, labels) -> complex:
        labels = (labels,) if isinstance(labels, str) else tuple(labels)
        idx = np.ravel_multi_index(
            tuple(d.index(l) for d, l in zip(self.dofs, labels)), self.dims
        )
        return complex(self.amps[idx])

    def amplitudes(self) -> dict[tuple[str, ...], complex]:
        return {
            labels: complex(a)
            for labels, a in zip(self.basis_labels(), self.amps)
        }

    def same_space(self, other: "StateVector") -> bool:
        return self.dofs == other.dofs

    # -- serialization --------------------------------------------------------

    def to_records(self) -> dict:
        """Canonical JSON-friendly form: every basis entry, canonical order."""
        return {
            "weight": self.weight,
            "amplitudes": [
                {"labels": list(labels), "re": float(a.real), "im": float(a.imag)}
                for labels, a in zip(self.basis_labels(), self.amps)
            ],
        }


# -- operations ----------------------------------------------------------------


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state over the concatenated dof list."""
    shared = {d.name for d in a.dofs} & {d.name for d in b.dofs}
    if shared:
        raise CompositionError(f"duplicate dof names {sorted(shared)}")
    return StateVector(a.dofs + b.dofs, np.kron(a.amps, b.amps), a.weight * b.weight)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b> over the joint basis; spaces must match exactly."""
    if not a.same_space(b):
        raise CompositionError("inner product requires identical spaces")
    return complex(np.vdot(a.amps, b.amps))


def rebase(s: StateVector, change: BasisChange) -> StateVector:
    """Express the same physical state in a new basis for one dof."""
    ax = s.axis(change.dof)
    old = s.dofs[ax]
    if change.matrix.shape[0] != old.dim:
        raise ValidationError(
            f"basis change dimension {change.matrix.shape[0]} != dof dim {old.dim}"
        )
    t = np.moveaxis(s.tensor_view(), ax, 0)
    new = np.moveaxis(np.tensordot(change.matrix, t, axes=([1], [0])), 0, ax)
    dofs = list(s.dofs)
    dofs[ax] = Dof(old.name, change.new_labels)
    return StateVector(tuple(dofs), new.reshape(-1), s.weight)


def global_phase_deviation(a: StateVector, b: StateVector) -> float:
    """min over unit phases c of max_k |a_k - c*b_k|, with c fixed from the
    largest-magnitude component of b (deterministic and numerically stable)."""
    if not a.same_space(b):
        raise CompositionError("comparison requires identical spaces")
    k = int(np.argmax(np.abs(b.amps)))
    c = a.amps[k] / b.amps[k]
    if abs(c) < 1e-15:
        return float(np.max(np.abs(a.amps - b.amps)))
    c = c / abs(c)
    return float(np.max(np.abs(a.amps - c * b.amps)))


def global_phase_equivalent(a: StateVector, b: StateVector, tol: float) -> bool:
    """True iff a unit complex c exists with max_k |a_k - c*b_k| < tol."""
    return global_phase_deviation(a, b) < tol
