import numpy as np
import pytest

from macrocolumn.benchmark import Lockstep, compute_segment_bound, teach_edges
from macrocolumn.codec import BundleLayout, StateVector
from macrocolumn.column import Dimensions, Macrocolumn
from macrocolumn.fixtures import PAIR_SYMBOLS as S, pair_memory
from macrocolumn.place_cells import PlaceCells
from macrocolumn.reference import QueryVector, ref_query

A, B, C, D, E = range(5)
LAY = BundleLayout.state_vector(2, 5, 30)


@pytest.fixture(scope="module")
def taught():
    mc = Macrocolumn(Dimensions(2, 5, 30, 2))
    teach_edges(Lockstep(mc), list(pair_memory()), reps=2)
    return mc.pl


def sv(eids=(), tail=None, dx=None, dy=None, head=None):
    return StateVector.from_values(LAY, eids, tail, dx, dy, head)


def decode(out):
    dx = np.flatnonzero(out.i_dx)
    dy = np.flatnonzero(out.i_dy)
    return (set(np.flatnonzero(out.i_eId).tolist()),
            int(dx[0]) if dx.size else None, int(dy[0]) if dy.size else None)


def test_navigation_recall_potentials(taught):
    out = taught.infer(sv([1], D, head=E))
    assert decode(out) == ({1}, 8, 25)
    raw = sorted(out.columns["dx"].scan.raw_pot.tolist(), reverse=True)
    assert raw[:2] == [16, 8]


def test_entrenched_weights_are_bimodal(taught):
    for col in taught.columns.values():
        vals = col.weights[col.committed.astype(bool)]
        assert set(np.unique(vals).tolist()) <= {0, 8}


def test_decoded_edges_match_table(taught):
    for name in ("dx", "dy", "eId"):
        assert taught.decoded_edges(name) == set(pair_memory())


def test_pair_segment_bounds():
    # the dx=4/head B neuron holds both "C 4 4 B" edges
    assert compute_segment_bound(pair_memory()) == {"eId": 2, "dx": 2, "dy": 2, "max": 2}
    assert compute_segment_bound([])["max"] == 0


def test_cross_product_agrees_with_reference(taught):
    mem = pair_memory()
    dxs = [None] + sorted({e.dx for e in mem})
    dys = [None] + sorted({e.dy for e in mem})
    n = 0
    for eids in ([0], [1], [0, 1]):
        for tail in [None, A, B, C, D, E]:
            for dx, dy in zip(dxs, dys):
                for head in range(5):
                    qv = QueryVector(frozenset(eids), tail, dx, dy, head)
                    ref = ref_query(mem, qv)
                    got = decode(taught.infer(sv(eids, tail, dx, dy, head)))
                    want = (set(ref.i_eid or ()), ref.i_dx, ref.i_dy)
                    assert got == want, qv
                    n += 1
    assert n > 500


def test_null_head_is_silent(taught):
    out = taught.infer(sv([0, 1], C, 4, 4, None))
    assert decode(out) == (set(), None, None)


def test_learning_gate():
    pl = PlaceCells(2, 5, 30, 1)
    assert not pl.learning_gate(sv([0, 1], C, 4, 4, B))
    assert not pl.learning_gate(sv([0], C, None, None, B))
    assert pl.learning_gate(sv([0], C, 4, 4, B))
    assert PlaceCells(2, 5, 30, 1, learn_partial=True).learning_gate(sv([0], None, None, None, B))


def test_single_presentation_recalls_only_the_exact_context():
    mc = Macrocolumn(Dimensions(2, 5, 30, 1))
    teach_edges(Lockstep(mc), [e for e in pair_memory() if e.head == E], reps=1)
    col = mc.pl.columns["dx"]
    seg = col.weights[E, 8, 0]
    assert sorted(set(seg.tolist())) == [2, 7]
    assert decode(mc.pl.infer(sv([1], D, head=E))) == ({1}, 8, 25)
    # one bundle off: a weak line replaces a 7, so the segment stays below threshold
    assert decode(mc.pl.infer(sv([1], B, head=E))) == (set(), None, None)


def test_dump_lists_decoded_segments(taught):
    text = taught.dump(S)
    assert "segment 0: beta D 8 -5 -> E" in text
    assert text.count("[minicolumn") == 3


def test_threshold_rule_is_selectable():
    pl = PlaceCells(2, 5, 30, 2, recall="threshold")
    assert pl.columns["dx"].recall == "threshold"
    with pytest.raises(ValueError):
        PlaceCells(2, 5, 30, 2, recall="fuzzy")
