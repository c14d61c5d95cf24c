"""Timestamped detection events and coincidence counting.

Each shot samples one joint outcome from the active detectors' Born
distribution; every detector then logs an event at

    t = shot * period + detector time_offset + extra delay (all in ns).

Delays shift timestamps only: the sampled outcome sequence of each detector
is byte-identical whatever delays are applied to the others.  Coincidence
search pairs two detectors' events greedily in time order inside a window,
optionally after subtracting per-detector compensation offsets — which is how
a delayed eraser's pairs are recovered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, joint_distribution
from .measure import rng_for
from .qstate import ValidationError
from .screen import DEFAULT_GEOMETRY, Pattern, SlitGeometry, pattern_from_bin_probs

#: default shot spacing and coincidence window, in nanoseconds
DEFAULT_PERIOD_NS = 1e6
DEFAULT_WINDOW_NS = 1e3

#: placeholder outcome label for shots where filters absorbed the particle
NO_DETECTION = "none"


@dataclass(frozen=True)
class DetectionEvent:
    shot: int
    time: float  # ns
    detector: str
    outcome: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "shot": self.shot,
            "t": self.time,
            "det": self.detector,
            "outcome": list(self.outcome),
        }


@dataclass(frozen=True)
class EventLog:
    seed: int
    shots: int
    events: tuple[DetectionEvent, ...]

    def for_detector(self, name: str) -> tuple[DetectionEvent, ...]:
        return tuple(e for e in self.events if e.detector == name)

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(e.to_json_dict(), separators=(",", ":")) + "\n"
            for e in self.events
        )

    def to_csv(self) -> str:
        lines = ["shot,t,det,outcome"]
        for e in self.events:
            lines.append(
                f"{e.shot},{e.time:.12g},{e.detector},{'|'.join(e.outcome)}"
            )
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str, seed: int = 0, shots: int = 0) -> "EventLog":
        events = []
        for line in text.splitlines():
            if not line.strip():
                continue
            d = json.loads(line)
            events.append(
                DetectionEvent(d["shot"], d["t"], d["det"], tuple(d["outcome"]))
            )
        return EventLog(seed=seed, shots=shots, events=tuple(events))


def generate_events(
    c: Circuit,
    settings: dict[str, str] | None = None,
    shots: int = 1000,
    seed: int = 0,
    delays: dict[str, float] | None = None,
    period: float = DEFAULT_PERIOD_NS,
) -> EventLog:
    """Sample per-shot joint outcomes and emit one event per detector.

    Shots whose particle was absorbed by a filter produce no events.  The
    outcome sequence depends only on (circuit, settings, shots, seed); delays
    and period affect timestamps alone.
    """
    if shots < 0:
        raise ValidationError("shots must be >= 0")
    settings = settings or {}
    delays = delays or {}
    dist = joint_distribution(c, settings)
    specs = c.detectors(settings)

    # split the joint axes among detectors, in declaration order
    spans: list[tuple[str, float, slice]] = []
    pos = 0
    for spec in specs:
        n = len(spec.axis_names())
        offset = spec.time_offset + delays.get(spec.name, 0.0)
        spans.append((spec.name, offset, slice(pos, pos + n)))
        pos += n

    keys = list(dist.outcomes.keys())
    probs = [dist.outcomes[k] for k in keys]
    survive = sum(probs)
    if survive < dist.total_mass - 1e-9 or dist.total_mass > 1 + 1e-9:
        raise ValidationError("inconsistent distribution mass")
    # residual outcome: the particle never reached the detectors
    if survive < 1.0 - 1e-12:
        keys.append(None)
        probs.append(1.0 - survive)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    picks = np.searchsorted(cdf, rng_for(seed).random(shots), side="right")

    events: list[DetectionEvent] = []
    for shot, pick in enumerate(picks):
        outcome = keys[int(pick)]
        if outcome is None:
            continue
        base = shot * period
        for det, offset, span in spans:
            events.append(DetectionEvent(shot, base + offset, det, outcome[span]))
    events.sort(key=lambda e: (e.time, e.detector, e.shot))
    return EventLog(seed=seed, shots=shots, events=tuple(events))


@dataclass(frozen=True)
class CoincidencePair:
    a: DetectionEvent
    b: DetectionEvent


def coincidences(
    log: EventLog,
    det_a: str,
    det_b: str,
    window: float = DEFAULT_WINDOW_NS,
    offsets: dict[str, float] | None = None,
) -> tuple[CoincidencePair, ...]:
    """Greedy earliest-first pairing of two detectors' events.

    Each event is used at most once.  ``offsets`` (ns, subtracted per
    detector before comparison) compensate known delays, e.g. a delayed
    eraser arm.
    """
    if window < 0:
        raise ValidationError("window must be >= 0")
    offsets = offsets or {}

    def shifted(e: DetectionEvent) -> float:
        return e.time - offsets.get(e.detector, 0.0)

    a_events = sorted(log.for_detector(det_a), key=shifted)
    b_events = sorted(log.for_detector(det_b), key=shifted)
    pairs: list[CoincidencePair] = []
    j = 0
    for ea in a_events:
        ta = shifted(ea)
        while j < len(b_events) and shifted(b_events[j]) < ta - window:
            j += 1
        if j < len(b_events) and abs(shifted(b_events[j]) - ta) <= window:
            pairs.append(CoincidencePair(ea, b_events[j]))
            j += 1
    return tuple(pairs)


def conditioned_histogram(
    pairs,
    partner_outcome: tuple[str, ...] | str | None = None,
    geometry: SlitGeometry = DEFAULT_GEOMETRY,
) -> Pattern:
    """Screen pattern from the ``a`` side of pairs, optionally keeping only
    pairs whose ``b`` outcome matches.  The ``a`` events must carry single
    screen-bin outcomes."""
    if isinstance(partner_outcome, str):
        partner_outcome = (partner_outcome,)
    counts: dict[str, float] = {}
    for p in pairs:
        if partner_outcome is not None and p.b.outcome != partner_outcome:
            continue
        if len(p.a.outcome) != 1:
            raise ValidationError("screen events must carry a single bin label")
        key = p.a.outcome[0]
        counts[key] = counts.get(key, 0.0) + 1.0
    if not counts:
        raise ValidationError("no pairs satisfy the condition")
    return pattern_from_bin_probs(counts, geometry)
