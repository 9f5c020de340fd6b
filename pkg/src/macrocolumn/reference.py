"""Exact state-machine model of the macrocolumn, used as the oracle.

Everything here is plain integers and sets.  Environment and feature ids are
0-based integers; displacements are residues modulo the grid width.
The spiking implementation must reproduce this module's decoded outputs
cycle for cycle once every learned edge is entrenched.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple, Sequence

from .grid import displacement_to_signed


class RefEdge(NamedTuple):
    eid: int
    tail: int
    dx: int
    dy: int
    head: int


@dataclass(frozen=True)
class Symbols:
    """Printable names for environment and feature ids."""

    envs: tuple[str, ...]
    features: tuple[str, ...]

    @classmethod
    def default(cls, n_envs: int, n_features: int) -> "Symbols":
        if n_features <= 26:
            feats = tuple(chr(ord("A") + i) for i in range(n_features))
        else:
            feats = tuple(f"F{i}" for i in range(n_features))
        return cls(tuple(f"e{i}" for i in range(n_envs)), feats)

    def env(self, name: str) -> int:
        return self.envs.index(name)

    def feature(self, name: str) -> int:
        return self.features.index(name)


class RefMemory:
    """Insertion-ordered, duplicate-free set of complete edges."""

    def __init__(self, edges: Iterable[RefEdge] = ()):
        self._edges: dict[RefEdge, None] = {}
        for e in edges:
            self.store(e)

    def store(self, edge: RefEdge) -> bool:
        """Store ``edge``; returns False when it was already present."""
        if edge in self._edges:
            return False
        self._edges[edge] = None
        return True

    def __contains__(self, edge) -> bool:
        return edge in self._edges

    def __iter__(self) -> Iterator[RefEdge]:
        return iter(self._edges)

    def __len__(self) -> int:
        return len(self._edges)

    def with_head(self, head: int) -> list[RefEdge]:
        return [e for e in self._edges if e.head == head]

    def copy(self) -> "RefMemory":
        return RefMemory(self._edges)

    def to_text(self, symbols: Symbols, width: int) -> str:
        rows = sorted(enumerate(self._edges), key=lambda ie: (ie[1].head, ie[0]))
        lines = []
        for _, e in rows:
            lines.append(" ".join([
                symbols.envs[e.eid], symbols.features[e.tail],
                str(displacement_to_signed(e.dx, width)),
                str(displacement_to_signed(e.dy, width)),
                symbols.features[e.head]]))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, symbols: Symbols, width: int) -> "RefMemory":
        mem = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 5:
                raise ValueError(f"line {lineno}: expected 'eId tail dx dy head', got {raw!r}")
            try:
                edge = RefEdge(symbols.env(parts[0]), symbols.feature(parts[1]),
                               int(parts[2]) % width, int(parts[3]) % width,
                               symbols.feature(parts[4]))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            mem.store(edge)
        return mem


@dataclass(frozen=True)
class RefState:
    eid_out: frozenset = frozenset()
    tail: int | None = None
    # displacement since the last feature; None before any feature is seen
    odometer: tuple[int, int] | None = None


@dataclass(frozen=True)
class RefInputs:
    eid_in: frozenset = frozenset()
    xmove: int = 0
    ymove: int = 0
    feature: int | None = None
    target: int | None = None
    explore: bool = False
    query: bool = False
    orient_init: bool = False

    def __post_init__(self):
        if self.target is not None and not self.query:
            raise ValueError("target given without query")


@dataclass(frozen=True)
class RefOut:
    i_eid: frozenset | None = None
    i_dx: int | None = None
    i_dy: int | None = None

    @property
    def is_null(self) -> bool:
        return self.i_eid is None and self.i_dx is None and self.i_dy is None


@dataclass(frozen=True)
class QueryVector:
    eids: frozenset
    tail: int | None
    dx: int | None
    dy: int | None
    head: int | None

    @property
    def complete(self) -> bool:
        return (len(self.eids) == 1 and self.tail is not None and self.dx is not None
                and self.dy is not None and self.head is not None)

    def as_edge(self) -> RefEdge:
        (eid,) = self.eids
        return RefEdge(eid, self.tail, self.dx, self.dy, self.head)


def _consistent(edge: RefEdge, q: QueryVector) -> bool:
    if q.eids and edge.eid not in q.eids:
        return False
    if q.tail is not None and edge.tail != q.tail:
        return False
    if q.dx is not None and edge.dx != q.dx:
        return False
    if q.dy is not None and edge.dy != q.dy:
        return False
    return True


def ref_candidates(mem: RefMemory, q: QueryVector) -> list[RefEdge]:
    """Stored edges whose components agree with every non-null query component."""
    if q.head is None:
        return []
    if not q.eids and q.tail is None and q.dx is None and q.dy is None:
        return []
    return [e for e in mem.with_head(q.head) if _consistent(e, q)]


def ref_query(mem: RefMemory, q: QueryVector) -> RefOut:
    """Associative lookup.

    The three outputs are independent reductions over the matching edges:
    the union of their environments, and the smallest dx / dy residue
    (mirroring lowest-index winner selection over one-hot lines).
    """
    cands = ref_candidates(mem, q)
    if not cands:
        return RefOut()
    return RefOut(frozenset(e.eid for e in cands),
                  min(e.dx for e in cands), min(e.dy for e in cands))


def advance_odometer(odometer, xmove: int, ymove: int, width: int):
    """Displacement presented this cycle, given the loop value and the move.

    Returns ``None`` while no reference feature exists and whenever the net
    displacement is the origin (the agent stands on its reference feature).
    """
    if odometer is None:
        return None
    d = ((odometer[0] + xmove) % width, (odometer[1] + ymove) % width)
    return None if d == (0, 0) else d


@dataclass
class RefModel:
    """Stateful wrapper around :func:`ref_step` for lockstep harnesses."""

    n_envs: int
    width: int
    state: RefState = field(default_factory=RefState)
    memory: RefMemory = field(default_factory=RefMemory)

    def step(self, inp: RefInputs) -> RefOut:
        self.state, out, _ = ref_step(self.state, inp, self.memory, self.n_envs, self.width)
        return out

    def orient_reset(self) -> None:
        self.state = ref_orient_init(self.state, self.n_envs)


def ref_orient_init(state: RefState, n_envs: int) -> RefState:
    return RefState(frozenset(range(n_envs)), None, None)


def ref_step(state: RefState, inp: RefInputs, mem: RefMemory, n_envs: int,
             width: int) -> tuple[RefState, RefOut, QueryVector | None]:
    """Advance one gamma cycle.  ``mem`` is updated in place when storing.

    Returns the new state, the inferred outputs, and the vector applied to
    the memory (``None`` on an orient-init cycle).
    """
    if inp.orient_init:
        return ref_orient_init(state, n_envs), RefOut(), None

    moved = advance_odometer(state.odometer, inp.xmove, inp.ymove, width)
    odometer_next = state.odometer
    if inp.feature is not None:
        odometer_next = (0, 0)
    elif state.odometer is not None:
        odometer_next = ((state.odometer[0] + inp.xmove) % width,
                         (state.odometer[1] + inp.ymove) % width)
    head = inp.target if inp.query else inp.feature
    eids = inp.eid_in if inp.explore else state.eid_out
    q = QueryVector(frozenset(eids), state.tail,
                    None if moved is None else moved[0],
                    None if moved is None else moved[1], head)
    out = ref_query(mem, q)
    eid_out = state.eid_out if out.i_eid is None else out.i_eid
    tail = state.tail if inp.feature is None else inp.feature
    if inp.explore and q.complete:
        mem.store(q.as_edge())
    return replace(state, eid_out=eid_out, tail=tail, odometer=odometer_next), out, q
