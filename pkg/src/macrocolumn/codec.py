"""Spike-vector codecs: one-hot bundles, state-vector layouts, residue codes.

A spike vector is a 1-D ``numpy.uint8`` array of 0/1 values.  The all-zero
vector is *null*.  Line positions are 1-based and counted from the left, so
``encode_one_hot(3, 4)`` renders as ``0010``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Sequence

import numpy as np

SpikeVector = np.ndarray

STATE_FIELDS = ("eId", "tail", "dx", "dy", "head")


def zeros(width: int) -> SpikeVector:
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    return np.zeros(width, dtype=np.uint8)


def as_spikes(bits: Iterable[int] | str) -> SpikeVector:
    """Build a spike vector from a 0/1 sequence or a string such as ``"0010"``."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits if c in "01"]
    v = np.asarray(list(bits), dtype=np.uint8)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("spike vector must be 1-D with width >= 1")
    if np.any(v > 1):
        raise ValueError("spike vector elements must be 0 or 1")
    return v


def is_null(v: SpikeVector) -> bool:
    return not v.any()


def encode_one_hot(index: int, width: int) -> SpikeVector:
    if not 1 <= index <= width:
        raise ValueError(f"index {index} outside 1..{width}")
    v = zeros(width)
    v[index - 1] = 1
    return v


def encode_k_hot(indices: Iterable[int], width: int) -> SpikeVector:
    v = zeros(width)
    for i in indices:
        if not 1 <= i <= width:
            raise ValueError(f"index {i} outside 1..{width}")
        v[i - 1] = 1
    return v


def decode_hot_set(v: SpikeVector) -> set[int]:
    """Return the 1-based positions of all set lines; empty set means null."""
    return {int(i) + 1 for i in np.flatnonzero(v)}


def decode_one_hot(v: SpikeVector) -> int | None:
    """Decode a 0- or 1-hot vector to a 1-based index (``None`` for null)."""
    hot = np.flatnonzero(v)
    if hot.size == 0:
        return None
    if hot.size > 1:
        raise ValueError(f"vector is {hot.size}-hot, expected at most 1-hot")
    return int(hot[0]) + 1


def render(v: SpikeVector) -> str:
    return "".join("1" if b else "0" for b in v)


@dataclass(frozen=True)
class BundleLayout:
    """Ordered named bundles; a vector of this layout is their concatenation."""

    fields: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate bundle names in {names}")
        for name, width in self.fields:
            if width < 1:
                raise ValueError(f"bundle {name!r} has width {width}")

    @classmethod
    def state_vector(cls, n_envs: int, n_features: int, width: int,
                     height: int | None = None) -> "BundleLayout":
        height = width if height is None else height
        return cls((("eId", n_envs), ("tail", n_features), ("dx", width),
                    ("dy", height), ("head", n_features)))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.fields)

    @property
    def width(self) -> int:
        return sum(w for _, w in self.fields)

    def offsets(self) -> dict[str, slice]:
        out, pos = {}, 0
        for name, w in self.fields:
            out[name] = slice(pos, pos + w)
            pos += w
        return out

    def pack(self, *parts: SpikeVector) -> SpikeVector:
        if len(parts) != len(self.fields):
            raise ValueError(f"expected {len(self.fields)} bundles, got {len(parts)}")
        for (name, w), p in zip(self.fields, parts):
            if len(p) != w:
                raise ValueError(f"bundle {name!r}: width {len(p)} != {w}")
        return np.concatenate([np.asarray(p, dtype=np.uint8) for p in parts])

    def unpack(self, v: SpikeVector) -> tuple[SpikeVector, ...]:
        if len(v) != self.width:
            raise ValueError(f"vector width {len(v)} != layout width {self.width}")
        return tuple(v[s].copy() for s in self.offsets().values())

    def render(self, v: SpikeVector) -> str:
        return "|" + "|".join(render(p) for p in self.unpack(v)) + "|"


def pack_state_vector(eid, tail, dx, dy, head, layout: BundleLayout) -> SpikeVector:
    return layout.pack(eid, tail, dx, dy, head)


def unpack_state_vector(v: SpikeVector, layout: BundleLayout) -> tuple[SpikeVector, ...]:
    return layout.unpack(v)


@dataclass(frozen=True)
class CompositeCode:
    """Residue code: one one-hot field per pairwise-coprime modulus."""

    field_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.field_sizes)
        object.__setattr__(self, "field_sizes", sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"field sizes must be positive: {sizes}")
        for i, a in enumerate(sizes):
            for b in sizes[i + 1:]:
                if gcd(a, b) != 1:
                    raise ValueError(f"field sizes {a} and {b} are not coprime")

    @property
    def capacity(self) -> int:
        return prod(self.field_sizes)

    @property
    def width(self) -> int:
        return sum(self.field_sizes)

    def layout(self) -> BundleLayout:
        return BundleLayout(tuple((f"mod{s}", s) for s in self.field_sizes))

    def encode(self, value: int) -> SpikeVector:
        if not 0 <= value < self.capacity:
            raise ValueError(f"value {value} outside [0, {self.capacity})")
        return np.concatenate([encode_one_hot(value % s + 1, s) for s in self.field_sizes])

    def residues(self, v: SpikeVector) -> tuple[int, ...] | None:
        parts = self.layout().unpack(v)
        res = [decode_one_hot(p) for p in parts]
        if all(r is None for r in res):
            return None
        if any(r is None for r in res):
            raise ValueError("partially null composite vector")
        return tuple(r - 1 for r in res)

    def decode(self, v: SpikeVector) -> int | None:
        res = self.residues(v)
        if res is None:
            return None
        return crt(res, self.field_sizes)

    def rotate(self, v: SpikeVector, amount: int) -> SpikeVector:
        parts = self.layout().unpack(v)
        return np.concatenate([np.roll(p, amount) for p in parts])


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Chinese-remainder reconstruction for pairwise-coprime moduli."""
    n = prod(moduli)
    total = 0
    for r, m in zip(residues, moduli):
        q = n // m
        total += r * q * pow(q, -1, m)
    return total % n


def composite_encode(value: int, code: CompositeCode) -> SpikeVector:
    return code.encode(value)


def composite_decode(v: SpikeVector, code: CompositeCode) -> int | None:
    return code.decode(v)


def composite_rotate(v: SpikeVector, amount: int, code: CompositeCode) -> SpikeVector:
    return code.rotate(v, amount)


def rotate_one_hot(v: SpikeVector, amount: int) -> SpikeVector:
    """Wraparound shift; rotating a null vector yields null."""
    return np.roll(v, amount)


@dataclass(frozen=True)
class StateVector:
    """The five bundles ``[eId tail dx dy head]`` applied to the place cells."""

    eId: SpikeVector
    tail: SpikeVector
    dx: SpikeVector
    dy: SpikeVector
    head: SpikeVector

    def bundle(self, name: str) -> SpikeVector:
        return getattr(self, name)

    @property
    def complete(self) -> bool:
        """All five bundles non-null with a single environment."""
        return (int(self.eId.sum()) == 1 and not is_null(self.tail) and not is_null(self.dx)
                and not is_null(self.dy) and not is_null(self.head))

    def pack(self, layout: BundleLayout) -> SpikeVector:
        return layout.pack(self.eId, self.tail, self.dx, self.dy, self.head)

    @classmethod
    def unpack(cls, v: SpikeVector, layout: BundleLayout) -> "StateVector":
        return cls(*layout.unpack(v))

    @classmethod
    def from_values(cls, layout: BundleLayout, eids: Iterable[int] = (), tail: int | None = None,
                    dx: int | None = None, dy: int | None = None,
                    head: int | None = None) -> "StateVector":
        """Build from 0-based ids/residues (``None`` for null bundles)."""
        w = dict(layout.fields)

        def one(value, width):
            return zeros(width) if value is None else encode_one_hot(value + 1, width)

        return cls(encode_k_hot([e + 1 for e in eids], w["eId"]), one(tail, w["tail"]),
                   one(dx, w["dx"]), one(dy, w["dy"]), one(head, w["head"]))
