"""Spiking substrate: point integrators, WTA inhibition, dendrites, neurons, SDP.

These are the reference forms of each block, operating on small numpy
arrays.  The place-cell code drives the same arithmetic through the batched
kernels in :mod:`macrocolumn.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .codec import SpikeVector


@dataclass(frozen=True)
class SdpParams:
    theta: int = 8
    w_b: int = 6
    w_max: int = 8
    capture: int = 1
    backoff: int = 4
    search: int = 0

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError("theta must be >= 1")
        if not 0 <= self.w_b <= self.w_max:
            raise ValueError("need 0 <= w_b <= w_max")
        if min(self.capture, self.backoff, self.search) < 0:
            raise ValueError("SDP increments must be non-negative")
        if self.w_max > 255:
            raise ValueError("w_max must fit in a byte")


class WinnerRecord(NamedTuple):
    neuron: int
    dendrite: int
    segment: int
    potential: int


def segment_potential(column: np.ndarray, distal: SpikeVector, theta: int) -> int:
    """Dot product of the distal spikes with one segment's weights, or 0 below ``theta``."""
    column = np.asarray(column)
    if column.shape != (len(distal),):
        raise ValueError(f"weight column length {column.shape} != distal width {len(distal)}")
    p = int(np.dot(column.astype(np.int64), np.asarray(distal, dtype=np.int64)))
    return p if p >= theta else 0


def wta_1(potentials: Sequence[int]) -> np.ndarray:
    x = np.asarray(potentials, dtype=np.int64)
    out = np.zeros_like(x)
    if x.size and x.max() > 0:
        i = int(np.argmax(x))  # first maximum
        out[i] = x[i]
    return out


def wta_t(potentials: Sequence[int]) -> np.ndarray:
    x = np.asarray(potentials, dtype=np.int64)
    if not x.size or x.max() <= 0:
        return np.zeros_like(x)
    return np.where(x == x.max(), x, 0)


def dendrite_infer(weights: np.ndarray, distal: SpikeVector, proximal: int,
                   params: SdpParams) -> tuple[int, int | None]:
    """Best thresholded segment potential of a ``d x s`` weight matrix.

    Returns ``(potential, segment)``; the segment is ``None`` when the
    proximal line is silent or no segment reaches threshold.
    """
    weights = np.asarray(weights)
    if weights.ndim != 2 or weights.shape[0] != len(distal):
        raise ValueError(f"weights {weights.shape} do not match distal width {len(distal)}")
    if not proximal:
        return 0, None
    pots = np.asarray(distal, dtype=np.int64) @ weights.astype(np.int64)
    pots = np.where(pots >= params.theta, pots, 0)
    won = wta_1(pots)
    if not won.any():
        return 0, None
    j = int(np.flatnonzero(won)[0])
    return int(won[j]), j


def neuron_infer(dendrites: Sequence[np.ndarray], distal: SpikeVector, proximal: SpikeVector,
                 params: SdpParams, neuron: int = 0) -> tuple[int, WinnerRecord | None]:
    if len(proximal) != len(dendrites):
        raise ValueError(f"proximal width {len(proximal)} != dendrite count {len(dendrites)}")
    best, record = 0, None
    for k, (w, p) in enumerate(zip(dendrites, proximal)):
        pot, seg = dendrite_infer(w, distal, int(p), params)
        if pot > best:
            best, record = pot, WinnerRecord(neuron, k, seg, pot)
    return best, record


def sdp_apply(weights: np.ndarray, spikes: SpikeVector, fired: SpikeVector,
              params: SdpParams) -> np.ndarray:
    """Return updated ``d x s`` weights after one SDP pass.

    ``spikes`` are the distal inputs (rows), ``fired`` marks the segments
    that won (columns).  A silent input on a fired segment backs off toward
    0; an active input on a silent segment searches up to ``w_b`` (never
    lowering a weight already above it); active on fired captures up to
    ``w_max``.
    """
    w = np.asarray(weights, dtype=np.int64)
    pre = np.asarray(spikes, dtype=bool)
    post = np.asarray(fired, dtype=bool)
    if w.shape != (len(pre), len(post)):
        raise ValueError(f"weights {w.shape} != ({len(pre)}, {len(post)})")
    on, won = pre[:, None], post[None, :]
    captured = np.minimum(w + params.capture, params.w_max)
    backed = np.maximum(w - params.backoff, 0)
    searched = np.where(w < params.w_b, np.minimum(w + params.search, params.w_b), w)
    out = np.where(on & won, captured, np.where(~on & won, backed, np.where(on & ~won, searched, w)))
    return out.astype(np.asarray(weights).dtype)


def overlap_backoff_bound(synapses: int, overlap: int, capture: int) -> Fraction:
    """Exclusive upper bound on ``backoff`` that keeps a vector sharing ``overlap``
    of ``synapses`` active lines inside an existing cluster.

    Capturing ``overlap`` lines must outweigh backing off the rest, so
    ``backoff * (synapses - overlap) < capture * overlap``.  With 64 synapses,
    overlap 48 and capture 1 the bound is 3.
    """
    if not 0 < overlap < synapses:
        raise ValueError(f"need 0 < overlap < synapses, got {overlap} of {synapses}")
    return Fraction(capture * overlap, synapses - overlap)


def temporal_spike_time(matches: int, threshold: int) -> int:
    """First output time of a ramp-no-leak neuron driven by ``matches`` full-weight inputs.

    Its body potential after ``t`` steps is ``matches * (t + 1)``.
    """
    if matches < 1:
        raise ValueError("need at least one match")
    return -(-threshold // matches) - 1


def weights_to_text(weights: np.ndarray) -> str:
    """Flat decimal table, one row per distal line, one column per segment."""
    w = np.atleast_2d(np.asarray(weights))
    return "\n".join(" ".join(str(int(v)) for v in row) for row in w) + "\n"


def weights_from_text(text: str) -> np.ndarray:
    rows = [[int(t) for t in line.split()] for line in text.splitlines() if line.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("weight table must be a non-empty rectangle")
    return np.asarray(rows, dtype=np.uint8)
