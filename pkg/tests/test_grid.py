import pytest
from hypothesis import given, strategies as st

from macrocolumn.codec import CompositeCode
from macrocolumn.grid import (DisplacementCode, DisplacementState, displacement_to_signed,
                              gd_step, render_displacement)


def test_signed_rendering():
    assert displacement_to_signed(25, 30) == -5
    assert displacement_to_signed(14, 30) == 14
    assert displacement_to_signed(15, 30) == -15
    with pytest.raises(ValueError):
        displacement_to_signed(30, 30)
    assert render_displacement((8, 25), 30) == "(8, -5)"
    assert render_displacement(None, 30) == "(-, -)"


def _walk(code, rows):
    loop = DisplacementState.null(code)
    seen = []
    for x, y, feat in rows:
        pres, loop = gd_step(loop, x, y, feat, code)
        seen.append(pres.decode(code))
    return seen


@pytest.mark.parametrize("composite", [None, (2, 3, 5)])
def test_loop_tracks_and_resets(composite):
    code = DisplacementCode(30, CompositeCode(composite) if composite else None)
    rows = [(0, 0, False), (-1, 1, True), (0, 0, True), (1, 1, False), (3, 3, True),
            (0, 0, True), (-2, -3, False), (-3, 8, True)]
    assert _walk(code, rows) == [None, None, None, (1, 1), (4, 4), None, (28, 27), (25, 5)]


def test_return_to_origin_is_null():
    code = DisplacementCode(30)
    assert _walk(code, [(0, 0, True), (2, 0, False), (-2, 0, False)]) == [None, (2, 0), None]


def test_move_limit_and_width_check():
    code = DisplacementCode(30)
    with pytest.raises(ValueError):
        gd_step(DisplacementState.null(code), 30, 0, False, code)
    with pytest.raises(ValueError):
        DisplacementCode(30, CompositeCode((7, 8, 9)))


@given(st.lists(st.tuples(st.integers(-14, 14), st.integers(-14, 14)), min_size=1, max_size=12))
def test_loop_equals_coordinate_sum(moves):
    code = DisplacementCode(30)
    loop = DisplacementState(code.encode(0), code.encode(0))
    sx = sy = 0
    for x, y in moves:
        pres, loop = gd_step(loop, x, y, False, code)
        sx, sy = (sx + x) % 30, (sy + y) % 30
        assert pres.decode(code) == (None if (sx, sy) == (0, 0) else (sx, sy))
