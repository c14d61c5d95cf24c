"""Far-field two-slit screen: intensity patterns, visibility, pattern algebra.

Small-angle model: each slit contributes an equal-envelope plane wave with
relative phase delta(x) = 2 pi d x / (lambda L); the single-slit diffraction
envelope is ignored.  Intensities are normalized so a fully incoherent (flat)
pattern sits at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import StateVector, ValidationError


@dataclass(frozen=True)
class SlitGeometry:
    """Two-slit far-field geometry (far-field assumption L >> d is assumed,
    not enforced)."""

    slit_separation: float = 50e-6
    wavelength: float = 650e-9
    screen_distance: float = 1.0
    x_range: tuple[float, float] = (-0.02, 0.02)
    bins: int = 256

    def __post_init__(self):
        if min(self.slit_separation, self.wavelength, self.screen_distance) <= 0:
            raise ValidationError("geometry lengths must be positive")
        if self.bins < 2:
            raise ValidationError("need at least 2 bins")
        if self.x_range[1] <= self.x_range[0]:
            raise ValidationError("empty x range")

    def bin_centers(self) -> np.ndarray:
        lo, hi = self.x_range
        w = (hi - lo) / self.bins
        return lo + w * (np.arange(self.bins) + 0.5)

    def delta(self, x: np.ndarray) -> np.ndarray:
        return 2 * math.pi * self.slit_separation * x / (
            self.wavelength * self.screen_distance
        )

    def bin_label(self, i: int) -> str:
        return f"bin{i:03d}"


DEFAULT_GEOMETRY = SlitGeometry()


@dataclass(frozen=True)
class Pattern:
    """Binned screen intensities (non-negative, one value per bin center)."""

    xs: tuple[float, ...]
    intensities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(x) for x in self.xs))
        object.__setattr__(
            self, "intensities", tuple(float(v) for v in self.intensities)
        )
        if len(self.xs) != len(self.intensities):
            raise ValidationError("xs and intensities lengths differ")
        if any(v < -1e-12 for v in self.intensities):
            raise ValidationError("negative intensity")

    def to_csv(self) -> str:
        lines = ["x,intensity"]
        for x, v in zip(self.xs, self.intensities):
            lines.append(f"{x:.12g},{v:.12g}")
        return "\n".join(lines) + "\n"


def branch_amplitudes(s: StateVector, path_dof: str) -> list[tuple[complex, complex]]:
    """Per residual-basis-state slit amplitude pairs (a1, a2)."""
    ax = s.axis(path_dof)
    if s.dofs[ax].dim != 2:
        raise ValidationError("screen path dof must have exactly 2 labels")
    t = np.moveaxis(s.tensor_view(), ax, 0).reshape(2, -1)
    return [(complex(t[0, i]), complex(t[1, i])) for i in range(t.shape[1])]


def intensity_profile(
    s: StateVector, path_dof: str, geometry: SlitGeometry
) -> np.ndarray:
    """Unnormalized I(x) over bin centers, other dofs Born-marginalized."""
    delta = geometry.delta(geometry.bin_centers())
    e1 = np.exp(1j * delta / 2)
    e2 = np.exp(-1j * delta / 2)
    total = np.zeros(geometry.bins)
    for a1, a2 in branch_amplitudes(s, path_dof):
        total += np.abs(a1 * e1 + a2 * e2) ** 2
    return total


def pattern_from_state(
    s: StateVector, path_dof: str, geometry: SlitGeometry = DEFAULT_GEOMETRY
) -> Pattern:
    """Interference pattern of a state on the screen, flat baseline at 1."""
    total = intensity_profile(s, path_dof, geometry)
    # baseline: the incoherent (cross-term-free) intensity, which is the
    # squared norm of the state = 1 per bin
    return Pattern(tuple(geometry.bin_centers()), tuple(total))


def pattern_from_bin_probs(
    probs: dict[str, float], geometry: SlitGeometry
) -> Pattern:
    """Pattern from a bin-label probability (or count) map, mean-normalized to 1."""
    vals = np.array([probs.get(geometry.bin_label(i), 0.0) for i in range(geometry.bins)])
    mean = vals.mean()
    if mean < 1e-300:
        raise ValidationError("all-zero histogram")
    return Pattern(tuple(geometry.bin_centers()), tuple(vals / mean))


def visibility(p: Pattern) -> float:
    """(max - min) / (max + min) over bins."""
    hi, lo = max(p.intensities), min(p.intensities)
    if hi <= 0:
        raise ValidationError("visibility of an all-zero pattern is undefined")
    return (hi - lo) / (hi + lo)


def fringe_visibility(
    p: Pattern, geometry: SlitGeometry = DEFAULT_GEOMETRY
) -> float:
    """Visibility sqrt(B^2 + C^2) / A of the least-squares fit
    I(x) = A + B cos(delta) + C sin(delta).

    Every pattern this model produces lies exactly in that span, so the fit is
    exact and the result does not depend on whether the bin grid happens to
    hit the fringe extrema (unlike a max/min estimate).
    """
    delta = geometry.delta(np.asarray(p.xs))
    design = np.stack([np.ones_like(delta), np.cos(delta), np.sin(delta)], axis=1)
    (a, b, c), *_ = np.linalg.lstsq(design, np.asarray(p.intensities), rcond=None)
    if a <= 0:
        raise ValidationError("fitted baseline is not positive")
    return float(math.hypot(b, c) / a)


def sum_patterns(a: Pattern, b: Pattern, weights: tuple[float, float] = (1.0, 1.0)) -> Pattern:
    """Pointwise weighted sum of two patterns on the same grid."""
    if a.xs != b.xs:
        raise ValidationError("patterns live on different grids")
    wa, wb = weights
    return Pattern(a.xs, tuple(wa * x + wb * y for x, y in zip(a.intensities, b.intensities)))
