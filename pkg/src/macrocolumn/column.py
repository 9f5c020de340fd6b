"""The assembled macrocolumn: select blocks, three autaptic loops, one step per gamma cycle."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .codec import (BundleLayout, SpikeVector, StateVector, decode_hot_set, decode_one_hot,
                    encode_k_hot, encode_one_hot, is_null, render, zeros)
from .grid import DisplacementCode, DisplacementState, gd_step, displacement_to_signed
from .neural import SdpParams, WinnerRecord
from .place_cells import PlaceCells, PLOutput
from .reference import RefInputs, Symbols


def select_c(sel, d0: SpikeVector, d1: SpikeVector) -> SpikeVector:
    """Two-input multiplexer with a two-rail select: ``[1, 0]`` passes ``d0``."""
    sel = tuple(int(b) for b in sel)
    if sel == (1, 0):
        return d0
    if sel == (0, 1):
        return d1
    raise ValueError(f"invalid select code {sel}")


def select_d(d0: SpikeVector, d1: SpikeVector) -> SpikeVector:
    """Data-driven select: new data ``d1`` replaces ``d0`` unless it is null."""
    if len(d0) != len(d1):
        raise ValueError(f"width mismatch {len(d0)} != {len(d1)}")
    return d0 if is_null(d1) else d1


def _rail(bit: bool) -> tuple[int, int]:
    return (0, 1) if bit else (1, 0)


@dataclass(frozen=True)
class Dimensions:
    n_envs: int
    n_features: int
    width: int
    segments: int

    def __post_init__(self):
        for k in ("n_envs", "n_features", "width", "segments"):
            if getattr(self, k) < 1:
                raise ValueError(f"{k} must be >= 1")


@dataclass(frozen=True)
class ControlInputs:
    """One cycle of agent inputs, all as spike vectors.

    ``None`` for a vector input means null of the right width.
    """

    explore: bool = False
    query: bool = False
    orient_init: bool = False
    eid_in: SpikeVector | None = None
    target: SpikeVector | None = None
    xmove: int = 0
    ymove: int = 0
    feature: SpikeVector | None = None

    @classmethod
    def from_ref(cls, inp: RefInputs, dims: Dimensions) -> "ControlInputs":
        def one(v):
            return None if v is None else encode_one_hot(v + 1, dims.n_features)

        eid_in = encode_k_hot([e + 1 for e in inp.eid_in], dims.n_envs) if inp.eid_in else None
        return cls(inp.explore, inp.query, inp.orient_init, eid_in, one(inp.target),
                   inp.xmove, inp.ymove, one(inp.feature))


@dataclass
class StepOutputs:
    eid_out: SpikeVector
    i_dx: SpikeVector
    i_dy: SpikeVector
    i_eid: SpikeVector
    sv: StateVector | None = None
    winners: dict[str, list[WinnerRecord]] = field(default_factory=dict)
    learned: dict[str, list[WinnerRecord]] = field(default_factory=dict)
    pl: PLOutput | None = None

    def decoded(self) -> tuple[frozenset, int | None, int | None]:
        """``(eId_out set, i_dx, i_dy)`` with 0-based ids; the lockstep comparison key."""
        dx, dy = decode_one_hot(self.i_dx), decode_one_hot(self.i_dy)
        return (frozenset(i - 1 for i in decode_hot_set(self.eid_out)),
                None if dx is None else dx - 1, None if dy is None else dy - 1)


@dataclass
class MacrocolumnState:
    tail: SpikeVector
    eid: SpikeVector
    disp: DisplacementState


class Macrocolumn:
    """Grid cells + place cells + autaptic loops.  :meth:`step` is the only mutator."""

    def __init__(self, dims: Dimensions, params: SdpParams | None = None,
                 code: DisplacementCode | None = None, recall: str = "exact",
                 learn_partial: bool = False):
        self.dims = dims
        self.params = params or SdpParams()
        self.code = code or DisplacementCode(dims.width)
        if self.code.width != dims.width:
            raise ValueError("displacement code width differs from grid width")
        self.layout = BundleLayout.state_vector(dims.n_envs, dims.n_features, dims.width)
        self.pl = PlaceCells(dims.n_envs, dims.n_features, dims.width, dims.segments,
                             self.params, recall, learn_partial)
        self.state = MacrocolumnState(zeros(dims.n_features), zeros(dims.n_envs),
                                      DisplacementState.null(self.code))
        self.cycle = 0

    def clone(self) -> "Macrocolumn":
        return copy.deepcopy(self)

    def orient_reset(self) -> None:
        self.state = MacrocolumnState(zeros(self.dims.n_features),
                                      np.ones(self.dims.n_envs, dtype=np.uint8),
                                      DisplacementState.null(self.code))

    def _onehot_disp(self, presented: DisplacementState) -> tuple[SpikeVector, SpikeVector]:
        # the place cells always see plain one-hot displacement lines
        if self.code.composite is None:
            return presented.dx, presented.dy
        d = presented.decode(self.code)
        if d is None:
            return zeros(self.dims.width), zeros(self.dims.width)
        return encode_one_hot(d[0] + 1, self.dims.width), encode_one_hot(d[1] + 1, self.dims.width)

    def step(self, ctrl: ControlInputs) -> StepOutputs:
        dims = self.dims
        self.cycle += 1
        if ctrl.orient_init:
            self.orient_reset()
            z = zeros(dims.width)
            return StepOutputs(self.state.eid.copy(), z, z.copy(), zeros(dims.n_envs))

        feature = ctrl.feature if ctrl.feature is not None else zeros(dims.n_features)
        target = ctrl.target if ctrl.target is not None else zeros(dims.n_features)
        eid_in = ctrl.eid_in if ctrl.eid_in is not None else zeros(dims.n_envs)
        for name, v in (("feature", feature), ("target", target)):
            if v.sum() > 1:
                raise ValueError(f"{name} must be 0- or 1-hot")

        st = self.state
        presented, next_loop = gd_step(st.disp, ctrl.xmove, ctrl.ymove, not is_null(feature),
                                       self.code)
        head = select_c(_rail(ctrl.query), feature, target)
        eids = select_c(_rail(ctrl.explore), st.eid, eid_in)
        dx, dy = self._onehot_disp(presented)
        sv = StateVector(eids, st.tail, dx, dy, head)

        result = self.pl.infer(sv)
        new_eid = select_d(st.eid, result.i_eId)
        new_tail = select_d(st.tail, feature)
        learned = self.pl.learn(sv, result) if ctrl.explore else {}

        self.state = MacrocolumnState(new_tail, new_eid, next_loop)
        return StepOutputs(new_eid.copy(), result.i_dx, result.i_dy, result.i_eId, sv,
                           result.winners(), learned, result)

    def run(self, inputs) -> list[StepOutputs]:
        return [self.step(c) for c in inputs]


TRACE_HEADER = "\t".join(["step", "mode", "eId", "tail", "dx", "dy", "head",
                          "eId_out", "i_dx", "i_dy", "winners"])


def _fmt_set(v: SpikeVector, names) -> str:
    hot = sorted(decode_hot_set(v))
    return ",".join(names[i - 1] for i in hot) if hot else "-"


def _fmt_disp(v: SpikeVector, width: int) -> str:
    i = decode_one_hot(v)
    return "-" if i is None else str(displacement_to_signed(i - 1, width))


def trace_line(step: int, ctrl: ControlInputs, out: StepOutputs, symbols: Symbols,
               width: int) -> str:
    """Tab-separated record of one cycle (see ``TRACE_HEADER``)."""
    mode = ("I" if ctrl.orient_init else "-") + ("E" if ctrl.explore else "-") + \
           ("Q" if ctrl.query else "-")
    envs, feats = symbols.envs, symbols.features
    if out.sv is None:
        sv_cols = ["-"] * 5
    else:
        sv_cols = [_fmt_set(out.sv.eId, envs), _fmt_set(out.sv.tail, feats),
                   _fmt_disp(out.sv.dx, width), _fmt_disp(out.sv.dy, width),
                   _fmt_set(out.sv.head, feats)]
    wins = []
    for col in ("dx", "dy", "eId"):
        for w in out.winners.get(col, []):
            wins.append(f"{col}:{w.neuron}/{w.segment}/{w.potential}")
    return "\t".join([str(step), mode, *sv_cols, _fmt_set(out.eid_out, envs),
                      _fmt_disp(out.i_dx, width), _fmt_disp(out.i_dy, width),
                      " ".join(wins) or "-"])
