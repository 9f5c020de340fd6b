import numpy as np
import pytest

from macrocolumn.benchmark import Lockstep, teach_edges
from macrocolumn.codec import CompositeCode, as_spikes, decode_hot_set, render
from macrocolumn.column import (ControlInputs, Dimensions, Macrocolumn, TRACE_HEADER, select_c,
                                select_d, trace_line)
from macrocolumn.fixtures import PAIR_SYMBOLS as S, alpha_tour_inputs, beta_drop_inputs, \
    pair_memory
from macrocolumn.grid import DisplacementCode
from macrocolumn.reference import RefInputs, RefModel


def test_select_blocks():
    a, b, z = as_spikes("10"), as_spikes("01"), as_spikes("00")
    assert select_c((1, 0), a, b) is a
    assert select_c((0, 1), a, b) is b
    assert render(select_c((1, 0), z, b)) == "00"
    with pytest.raises(ValueError):
        select_c((1, 1), a, b)
    assert select_d(a, z) is a and select_d(a, b) is b and render(select_d(z, z)) == "00"
    with pytest.raises(ValueError):
        select_d(a, as_spikes("010"))


def _taught(code=None):
    mc = Macrocolumn(Dimensions(2, 5, 30, 2), code=code)
    ls = Lockstep(mc, RefModel(2, 30))
    teach_edges(ls, list(pair_memory()))
    ls.compare = True
    return mc, ls


@pytest.mark.parametrize("composite", [None, (2, 3, 5)])
def test_beta_drop_replay(composite):
    code = DisplacementCode(30, CompositeCode(composite)) if composite else None
    mc, ls = _taught(code)
    outs = [ls.step(i) for i in beta_drop_inputs()]
    assert not ls.mismatches
    eids = [out.decoded()[0] for out in outs]
    assert eids[1] == eids[4] == {0, 1}
    assert eids[6] == eids[7] == eids[9] == {1}
    assert outs[8].decoded() == (frozenset({1}), 8, 25)


def test_alpha_tour_stores_five_edges():
    mc = Macrocolumn(Dimensions(2, 5, 30, 1))
    ls = Lockstep(mc, RefModel(2, 30))
    for inp in alpha_tour_inputs():
        ls.step(inp)
    assert mc.pl.decoded_edges() == {e for e in pair_memory() if e.eid == 0} == set(ls.ref.memory)


def test_orient_reset():
    mc, _ = _taught()
    mc.step(ControlInputs(xmove=1, feature=as_spikes("00100")))
    mc.orient_reset()
    first = (mc.state.eid.copy(), mc.state.tail.copy())
    mc.orient_reset()
    assert render(mc.state.eid) == "11" and render(mc.state.tail) == "00000"
    assert mc.state.disp.is_null
    assert all(np.array_equal(x, y) for x, y in zip(first, (mc.state.eid, mc.state.tail)))


def test_loops_hold_on_quiescent_cycles():
    mc, ls = _taught()
    for i in beta_drop_inputs()[:8]:
        ls.step(i)
    tail, eid = mc.state.tail.copy(), mc.state.eid.copy()
    for _ in range(5):
        out = ls.step(RefInputs())
        assert out.decoded()[1:] == (None, None)
    assert np.array_equal(mc.state.tail, tail) and np.array_equal(mc.state.eid, eid)


def test_inference_sees_previous_tail():
    mc, ls = _taught()
    outs = [ls.step(i) for i in beta_drop_inputs()[:3]]
    assert not outs[1].sv.tail.any()
    assert decode_hot_set(outs[2].sv.tail) == {3}


def test_trace_line_columns():
    mc, ls = _taught()
    inps = beta_drop_inputs()
    lines = []
    for k, inp in enumerate(inps, 1):
        out = ls.step(inp)
        lines.append(trace_line(k, ControlInputs.from_ref(inp, mc.dims), out, S, 30))
    assert len(TRACE_HEADER.split("\t")) == 11
    assert all(len(l.split("\t")) == 11 for l in lines)
    assert lines[8].split("\t")[:10] == ["9", "--Q", "beta", "D", "-", "-", "E", "beta", "8", "-5"]
    assert "dx:8/0/16" in lines[8]


def test_rejects_k_hot_feature():
    mc = Macrocolumn(Dimensions(2, 5, 30, 1))
    with pytest.raises(ValueError):
        mc.step(ControlInputs(feature=as_spikes("11000")))
