"""Hand-built two-environment scenario (``alpha``/``beta``, features A..E).

The edge table lives in ``data/pair_edges.txt``.  Two scripted input streams
go with it: an exploration tour of ``alpha`` and a drop into ``beta`` that
orients in three feature visits and then navigates D -> E.
"""

from __future__ import annotations

from importlib import resources

from .reference import RefInputs, RefMemory, Symbols

PAIR_SYMBOLS = Symbols(("alpha", "beta"), ("A", "B", "C", "D", "E"))
PAIR_WIDTH = 30


def pair_edges_text() -> str:
    return resources.files(__package__).joinpath("data/pair_edges.txt").read_text()


def pair_memory() -> RefMemory:
    return RefMemory.from_text(pair_edges_text(), PAIR_SYMBOLS, PAIR_WIDTH)


# (xmove, ymove, feature) rows; feature letters are arrivals (or pauses on them)
ALPHA_TOUR = (
    (-1, 1, "C"), (0, 0, "C"),
    (1, 1, None), (3, 3, "B"), (0, 0, "B"),
    (-2, -3, None), (-3, 8, "A"), (0, 0, "A"),
    (-5, 5, None), (13, -6, "D"), (0, 0, "D"),
    (8, -1, None), (-8, 8, "E"), (0, 0, "E"),
    (0, 7, None), (-7, -8, "C"), (0, 0, "C"),
)


def alpha_tour_inputs() -> list[RefInputs]:
    eid = frozenset([PAIR_SYMBOLS.env("alpha")])
    f = PAIR_SYMBOLS.feature
    return [RefInputs(eid_in=eid, xmove=x, ymove=y, feature=None if c is None else f(c),
                      explore=True) for x, y, c in ALPHA_TOUR]


def beta_drop_inputs() -> list[RefInputs]:
    """Orient-init, three feature visits with pauses, a query for E, and the move."""
    f = PAIR_SYMBOLS.feature
    return [
        RefInputs(orient_init=True),
        RefInputs(xmove=-1, ymove=1, feature=f("C")),
        RefInputs(feature=f("C")),
        RefInputs(xmove=-2, ymove=-2),
        RefInputs(xmove=6, ymove=6, feature=f("B")),
        RefInputs(feature=f("B")),
        RefInputs(xmove=-6, ymove=1, feature=f("D")),
        RefInputs(feature=f("D")),
        RefInputs(feature=f("D"), target=f("E"), query=True),
        RefInputs(xmove=8, ymove=-5, feature=f("E")),
    ]
