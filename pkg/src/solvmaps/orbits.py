"""Orbit records: time-indexed state sequences with provenance and comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence


@dataclass
class OrbitRecord:
    """A computed orbit plus everything needed to audit it.

    states holds the labeled sequence s(0..L) when one exists (iterated runs,
    and closed-form runs of the coefficient system, which stay labeled).
    closed_states holds, per time index, the tuple of candidate states produced
    by the closed-form route; for the zeros system the tuple has one entry (the
    canonically ordered root pair), for conjugated systems two (one per root
    labeling).  An entry of None marks a time index where exact root extraction
    failed and only the symmetric-function check applies.

    residuals, present only for the zeros and conjugated systems, holds the
    per-step consistency-identity values (one pair of scalars per step, zero on
    every exact orbit).

    summary carries the iterated-vs-closed comparison when both were computed.
    """

    system: str
    backend: str
    method: str
    horizon: int
    states: Optional[Sequence] = None
    closed_states: Optional[Sequence] = None
    residuals: Optional[Sequence] = None
    summary: Optional[dict] = field(default=None)

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("orbit horizon must be non-negative")
        for name, seq, expected in (
            ("states", self.states, self.horizon + 1),
            ("closed_states", self.closed_states, self.horizon + 1),
            ("residuals", self.residuals, self.horizon),
        ):
            if seq is not None and len(seq) != expected:
                raise ValueError(f"{name} must have length {expected}, got {len(seq)}")

    def primary_states(self) -> Sequence:
        """The state sequence to report: labeled states when available,
        otherwise the first closed-form candidate per time index."""
        if self.states is not None:
            return self.states
        if self.closed_states is not None:
            out = []
            for entry in self.closed_states:
                if entry is None:
                    raise ValueError(
                        "closed-form orbit has gaps (exact root extraction failed); "
                        "no representative state sequence exists"
                    )
                out.append(entry[0])
            return out
        raise ValueError("orbit record holds no states")
