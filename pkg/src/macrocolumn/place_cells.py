"""Place cells: three minicolumns of multi-dendrite neurons (i_dx, i_dy, i_eId).

Each minicolumn has one neuron per line of its output bundle ``V`` and one
dendrite per head feature.  Neuron ``i`` sees its private D1 line ``V_i``
followed by the shared D2 lines (the remaining distal bundles).

Two recall rules are available:

``exact`` (default)
    A neuron recalls only from *committed* segments (segments that have
    captured a context) whose potential covers every non-null distal bundle
    at the strength of a single capture, i.e. reaches
    ``max(theta, (w_b + capture) * n_bundles)``.  A context seen once is
    therefore recallable, and any context differing in one bundle falls
    short because the mismatched line was backed off.  Fresh
    segments still take part in the learning competition, where a potential
    tie is resolved in favour of the fresh segment.
``threshold``
    Every segment reaching ``theta`` competes, ties go to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from . import kernels
from .codec import StateVector, SpikeVector, is_null
from .neural import SdpParams, WinnerRecord, sdp_apply, weights_to_text
from .reference import RefEdge

DISTAL = ("eId", "tail", "dx", "dy")
RECALL_RULES = ("exact", "threshold")


@dataclass
class ScanResult:
    head: int
    d1: np.ndarray
    active: np.ndarray
    recall_pot: np.ndarray
    recall_seg: np.ndarray
    learn_pot: np.ndarray
    learn_fresh: np.ndarray
    learn_seg: np.ndarray
    raw_pot: np.ndarray


@dataclass
class MinicolumnOutput:
    output: SpikeVector
    winners: list[WinnerRecord]
    scan: ScanResult | None = None

    @property
    def potentials(self) -> np.ndarray:
        """Neuron potentials before minicolumn WTA (zeros when head is null)."""
        if self.scan is None:
            return np.zeros(len(self.output), dtype=np.int32)
        return self.scan.recall_pot


class Minicolumn:
    def __init__(self, name: str, widths: dict[str, int], n_features: int, segments: int,
                 params: SdpParams, wta: str = "1", recall: str = "exact"):
        if name not in DISTAL:
            raise ValueError(f"unknown minicolumn bundle {name!r}")
        if wta not in ("1", "t"):
            raise ValueError("wta must be '1' or 't'")
        if recall not in RECALL_RULES:
            raise ValueError(f"recall rule must be one of {RECALL_RULES}")
        if segments < 1:
            raise ValueError("need at least one segment per dendrite")
        self.name = name
        self.wta = wta
        self.recall = recall
        self.tie_break = "lowest"
        self.params = params
        self.n_neurons = widths[name]
        self.n_features = n_features
        self.segments = segments
        self.d2_bundles = tuple(b for b in DISTAL if b != name)
        self.d2_offsets, self.d2_spans = {}, {}
        pos = 1
        for b in self.d2_bundles:
            self.d2_offsets[b] = pos
            self.d2_spans[b] = (pos, pos + widths[b])
            pos += widths[b]
        self.d = pos
        # head-major so that one head's block is contiguous for the kernels
        self.weights = np.full((n_features, self.n_neurons, segments, self.d), params.w_b,
                               dtype=np.uint8)
        self.committed = np.zeros((n_features, self.n_neurons, segments), dtype=np.uint8)

    def distal_lines(self, sv: StateVector) -> tuple[np.ndarray, np.ndarray, int]:
        """Return ``(d1 bits per neuron, active D2 line indices, non-null bundle count)``."""
        d1 = np.ascontiguousarray(sv.bundle(self.name), dtype=np.uint8)
        parts = []
        n_bundles = 0 if is_null(d1) else 1
        for b in self.d2_bundles:
            v = sv.bundle(b)
            hot = np.flatnonzero(v)
            if hot.size:
                n_bundles += 1
                parts.append(hot + self.d2_offsets[b])
        active = np.concatenate(parts).astype(np.intp) if parts else np.zeros(0, dtype=np.intp)
        return d1, active, n_bundles

    def distal_vector(self, neuron: int, d1: np.ndarray, active: np.ndarray) -> np.ndarray:
        vec = np.zeros(self.d, dtype=np.uint8)
        vec[0] = d1[neuron]
        vec[active] = 1
        return vec

    @property
    def recall_strength(self) -> int:
        """Per-bundle weight a line holds after one capture from a fresh segment."""
        return min(self.params.w_b + self.params.capture, self.params.w_max)

    def _head(self, sv: StateVector) -> int | None:
        hot = np.flatnonzero(sv.head)
        if hot.size == 0:
            return None
        if hot.size > 1:
            raise ValueError("head bundle must be 0- or 1-hot")
        return int(hot[0])

    def _wta(self, values: np.ndarray) -> np.ndarray:
        """Indices of surviving neurons for key array ``values`` (0 = silent)."""
        if values.size == 0 or values.max() <= 0:
            return np.zeros(0, dtype=np.intp)
        if self.wta == "1":
            if self.tie_break == "highest":  # only used for fault injection
                return np.array([len(values) - 1 - int(np.argmax(values[::-1]))])
            return np.array([int(np.argmax(values))])
        return np.flatnonzero(values == values.max())

    def infer(self, sv: StateVector) -> MinicolumnOutput:
        out = np.zeros(self.n_neurons, dtype=np.uint8)
        f = self._head(sv)
        if f is None:
            return MinicolumnOutput(out, [])
        d1, active, n_bundles = self.distal_lines(sv)
        p = self.params
        r_pot, r_seg, l_pot, l_fresh, l_seg, raw = kernels.scan_minicolumn(
            self.weights[f], self.committed[f], d1, active,
            p.theta, self.recall_strength * n_bundles, self.recall == "exact")
        scan = ScanResult(f, d1, active, r_pot, r_seg, l_pot, l_fresh, l_seg, raw)
        winners = []
        for i in self._wta(r_pot):
            out[i] = 1
            winners.append(WinnerRecord(int(i), f, int(r_seg[i]), int(r_pot[i])))
        return MinicolumnOutput(out, winners, scan)

    def learning_winners(self, scan: ScanResult) -> list[WinnerRecord]:
        if self.recall == "exact":
            key = scan.learn_pot.astype(np.int64) * 2 + scan.learn_fresh
        else:
            key = scan.learn_pot.astype(np.int64)
        return [WinnerRecord(int(i), scan.head, int(scan.learn_seg[i]), int(scan.learn_pot[i]))
                for i in self._wta(key)]

    def learn(self, scan: ScanResult) -> list[WinnerRecord]:
        """Apply SDP to the winning segment of every learning winner."""
        p = self.params
        winners = self.learning_winners(scan)
        for w in winners:
            spikes = self.distal_vector(w.neuron, scan.d1, scan.active)
            block = self.weights[w.dendrite, w.neuron]
            if p.search:
                fired = np.zeros(self.segments, dtype=np.uint8)
                fired[w.segment] = 1
                block[:] = sdp_apply(block.T, spikes, fired, p).T
                for j in range(self.segments):
                    self.committed[w.dendrite, w.neuron, j] = kernels.segment_committed(block[j], p.w_b)
            else:
                col = block[w.segment]
                kernels.capture_segment(col, spikes, p.capture, p.backoff, p.w_max)
                self.committed[w.dendrite, w.neuron, w.segment] = kernels.segment_committed(col, p.w_b)
        return winners

    def segment_contexts(self, neuron: int, dendrite: int, segment: int,
                         strong: int | None = None) -> dict[str, list[int]] | None:
        """Decode a segment's strong synapses to per-bundle line lists (0-based)."""
        if not self.committed[dendrite, neuron, segment]:
            return None
        strong = self.params.w_max - 1 if strong is None else strong
        col = self.weights[dendrite, neuron, segment]
        ctx = {self.name: [neuron] if col[0] >= strong else []}
        for b, (lo, hi) in self.d2_spans.items():
            ctx[b] = [int(k) for k in np.flatnonzero(col[lo:hi] >= strong)]
        return ctx

    def decoded_edges(self) -> set[RefEdge]:
        """Edges held by committed segments with exactly one strong line per bundle."""
        edges = set()
        for f, i, j in zip(*np.nonzero(self.committed)):
            ctx = self.segment_contexts(int(i), int(f), int(j))
            if ctx and all(len(ctx[b]) == 1 for b in DISTAL):
                edges.add(RefEdge(ctx["eId"][0], ctx["tail"][0], ctx["dx"][0], ctx["dy"][0], int(f)))
        return edges

    def segment_demand(self) -> int:
        """Largest number of committed segments in any one dendrite."""
        if self.committed.size == 0:
            return 0
        return int(self.committed.sum(axis=2).max())


PL_ORDER = ("dx", "dy", "eId")


@dataclass
class PLOutput:
    i_eId: SpikeVector
    i_dx: SpikeVector
    i_dy: SpikeVector
    columns: dict[str, MinicolumnOutput] = field(default_factory=dict)

    def winners(self) -> dict[str, list[WinnerRecord]]:
        return {k: v.winners for k, v in self.columns.items()}


class PlaceCells:
    def __init__(self, n_envs: int, n_features: int, width: int, segments: int,
                 params: SdpParams | None = None, recall: str = "exact",
                 learn_partial: bool = False):
        self.params = params or SdpParams()
        self.n_envs, self.n_features, self.width = n_envs, n_features, width
        self.segments = segments
        self.learn_partial = learn_partial
        widths = {"eId": n_envs, "tail": n_features, "dx": width, "dy": width}
        self.columns = {
            "dx": Minicolumn("dx", widths, n_features, segments, self.params, "1", recall),
            "dy": Minicolumn("dy", widths, n_features, segments, self.params, "1", recall),
            "eId": Minicolumn("eId", widths, n_features, segments, self.params, "t", recall),
        }

    def infer(self, sv: StateVector) -> PLOutput:
        cols = {k: mc.infer(sv) for k, mc in self.columns.items()}
        return PLOutput(cols["eId"].output, cols["dx"].output, cols["dy"].output, cols)

    def learning_gate(self, sv: StateVector) -> bool:
        if self.learn_partial:
            return not is_null(sv.head) and int(sv.eId.sum()) == 1
        return sv.complete

    def learn(self, sv: StateVector, result: PLOutput) -> dict[str, list[WinnerRecord]]:
        """SDP update for one explore cycle; returns the segments that were updated."""
        if not self.learning_gate(sv):
            return {}
        learned = {}
        for k, mc in self.columns.items():
            scan = result.columns[k].scan
            if scan is not None:
                learned[k] = mc.learn(scan)
        return learned

    def decoded_edges(self, column: str = "dx") -> set[RefEdge]:
        return self.columns[column].decoded_edges()

    def dump(self, symbols=None, full: bool = False) -> str:
        """Text dump: weight tables of dendrites holding committed segments, plus
        a decoded ``eId tail dx dy -> head`` line per entrenched segment."""
        lines = []
        strong = self.params.w_max - 1
        for name in PL_ORDER:
            mc = self.columns[name]
            lines.append(f"[minicolumn {name}]")
            for i in range(mc.n_neurons):
                for f in range(mc.n_features):
                    if not full and not mc.committed[f, i].any():
                        continue
                    lines.append(f"neuron {i} dendrite {f}")
                    lines.append(weights_to_text(mc.weights[f, i].T).rstrip("\n"))
                    for j in range(mc.segments):
                        ctx = mc.segment_contexts(i, f, j, strong)
                        if ctx is None:
                            continue
                        lines.append(f"segment {j}: " + _render_ctx(ctx, f, symbols, self.width))
        return "\n".join(lines) + "\n"


def _render_ctx(ctx, head, symbols, width):
    from .grid import displacement_to_signed

    def one(bundle, vals):
        if len(vals) != 1:
            return "?" if vals else "-"
        v = vals[0]
        if bundle in ("dx", "dy"):
            return str(displacement_to_signed(v, width))
        if symbols is None:
            return str(v)
        return symbols.envs[v] if bundle == "eId" else symbols.features[v]

    head_s = str(head) if symbols is None else symbols.features[head]
    return " ".join(one(b, ctx[b]) for b in DISTAL) + f" -> {head_s}"
