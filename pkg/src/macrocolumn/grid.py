"""Grid cells: path integration with wraparound shifters on a torus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import CompositeCode, SpikeVector, decode_one_hot, encode_one_hot, is_null, zeros


def displacement_to_signed(m: int, width: int) -> int:
    """Signed representative of a torus displacement, e.g. ``(25, 30) -> -5``."""
    if not 0 <= m < width:
        raise ValueError(f"displacement {m} outside [0, {width})")
    return m if m <= (width - 1) // 2 else m - width


@dataclass(frozen=True)
class DisplacementCode:
    """How one displacement dimension is carried on lines.

    ``composite`` of ``None`` selects a plain one-hot bundle of ``width``
    lines; otherwise the residue code is used and its capacity must equal
    the grid width so rotations stay on the same torus.
    """

    width: int
    composite: CompositeCode | None = None

    def __post_init__(self):
        if self.composite is not None and self.composite.capacity != self.width:
            raise ValueError(f"composite capacity {self.composite.capacity} "
                             f"!= grid width {self.width}")

    @property
    def lines(self) -> int:
        return self.width if self.composite is None else self.composite.width

    def encode(self, value: int) -> SpikeVector:
        value %= self.width
        if self.composite is None:
            return encode_one_hot(value + 1, self.width)
        return self.composite.encode(value)

    def decode(self, v: SpikeVector) -> int | None:
        if self.composite is None:
            i = decode_one_hot(v)
            return None if i is None else i - 1
        return self.composite.decode(v)

    def rotate(self, v: SpikeVector, amount: int) -> SpikeVector:
        if self.composite is None:
            return np.roll(v, amount)
        return self.composite.rotate(v, amount)

    def null(self) -> SpikeVector:
        return zeros(self.lines)


@dataclass(frozen=True)
class DisplacementState:
    dx: SpikeVector
    dy: SpikeVector

    def __post_init__(self):
        if is_null(self.dx) != is_null(self.dy):
            raise ValueError("dx and dy must be null together")

    @property
    def is_null(self) -> bool:
        return is_null(self.dx)

    @classmethod
    def null(cls, code: DisplacementCode) -> "DisplacementState":
        return cls(code.null(), code.null())

    def decode(self, code: DisplacementCode) -> tuple[int, int] | None:
        if self.is_null:
            return None
        return code.decode(self.dx), code.decode(self.dy)


def gd_step(loop: DisplacementState, xmove: int, ymove: int, feature_present: bool,
            code: DisplacementCode) -> tuple[DisplacementState, DisplacementState]:
    """One cycle of the displacement loop.

    The loop holds the net displacement from the most recent feature (null
    before any feature).  Each cycle both vectors are shifted by the move;
    the shifted value is what the place cells see, except that it is
    suppressed when it lands back on the origin line.  Arriving at a
    feature loads the origin code into the loop for the next cycle.

    Returns ``(presented, next_loop)``.
    """
    if abs(xmove) >= code.width or abs(ymove) >= code.width:
        raise ValueError(f"move ({xmove}, {ymove}) exceeds grid width {code.width}")
    if loop.is_null:
        shifted = loop
    else:
        shifted = DisplacementState(code.rotate(loop.dx, xmove), code.rotate(loop.dy, ymove))
    presented = shifted
    if not shifted.is_null and shifted.decode(code) == (0, 0):
        presented = DisplacementState.null(code)
    if feature_present:
        origin = code.encode(0)
        next_loop = DisplacementState(origin, origin.copy())
    else:
        next_loop = shifted
    return presented, next_loop


def render_displacement(d: tuple[int, int] | None, width: int) -> str:
    if d is None:
        return "(-, -)"
    return f"({displacement_to_signed(d[0], width)}, {displacement_to_signed(d[1], width)})"
