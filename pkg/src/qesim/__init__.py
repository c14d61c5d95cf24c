"""qesim: deterministic state-vector simulation of quantum separation experiments."""

from .qstate import (
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

__all__ = [
    "BasisChange",
    "CompositionError",
    "Dof",
    "StateVector",
    "ValidationError",
    "global_phase_deviation",
    "global_phase_equivalent",
    "inner",
    "rebase",
    "tensor",
]

__version__ = "0.1.0"
