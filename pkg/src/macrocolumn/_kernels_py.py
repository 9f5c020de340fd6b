"""Pure-Python (numpy) kernels; behaviourally identical to ``_ckernels``.

Array conventions shared with the compiled backend:

* ``w``: ``uint8[n, s, d]`` weights of one dendrite (the active head) for
  every neuron of a minicolumn.  Line 0 is the neuron's private D1 line.
* ``committed``: ``uint8[n, s]``, 1 once a segment holds a captured context.
* ``d1``: ``uint8[n]``, the D1 bit seen by each neuron.
* ``active``: ``intp[k]``, indices (>= 1) of the active shared D2 lines.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def column_potentials(w, d1, active):
    pots = w[:, :, 0].astype(np.int32) * d1[:, None].astype(np.int32)
    if len(active):
        pots += w[:, :, active].sum(axis=2, dtype=np.int32)
    return pots


def scan_minicolumn(w, committed, d1, active, theta, match_thr, exact):
    """Per-neuron segment selection for recall and for learning.

    Returns ``(recall_pot, recall_seg, learn_pot, learn_fresh, learn_seg, raw_pot)``.
    Recall in exact mode only considers committed segments reaching
    ``max(theta, match_thr)``; otherwise every segment reaching ``theta``.
    Learning considers every segment reaching ``theta``; exact mode breaks
    potential ties in favour of uncommitted segments, then lowest index.
    """
    pots = column_potentials(w, d1, active)
    n, s = pots.shape
    com = committed.astype(bool)
    above = pots >= theta

    if exact:
        ok = com & (pots >= max(theta, match_thr))
    else:
        ok = above
    masked = np.where(ok, pots, -1)
    recall_seg = np.argmax(masked, axis=1).astype(np.int32)
    recall_pot = masked[np.arange(n), recall_seg].astype(np.int32)
    none = recall_pot < 0
    recall_pot[none] = 0
    recall_seg[none] = -1

    lmask = np.where(above, pots, -1).astype(np.int64)
    if exact:
        key = lmask * 2 + np.where(above & ~com, 1, 0)
    else:
        key = lmask
    learn_seg = np.argmax(key, axis=1).astype(np.int32)
    rows = np.arange(n)
    learn_pot = lmask[rows, learn_seg].astype(np.int32)
    learn_fresh = (~com[rows, learn_seg]).astype(np.uint8)
    lnone = learn_pot < 0
    learn_pot[lnone] = 0
    learn_seg[lnone] = -1
    learn_fresh[lnone] = 0

    raw = np.where(com, pots, 0).max(axis=1).astype(np.int32) if s else np.zeros(n, np.int32)
    return recall_pot, recall_seg, learn_pot, learn_fresh, learn_seg, raw


def capture_segment(col, spikes, capture, backoff, w_max):
    """In-place SDP update of the one segment that won."""
    on = spikes.astype(bool)
    cur = col.astype(np.int32)
    col[:] = np.where(on, np.minimum(cur + capture, w_max), np.maximum(cur - backoff, 0))


def segment_committed(col, w_b):
    return bool((col > w_b).any())
