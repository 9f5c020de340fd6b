from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macrocolumn.neural import (SdpParams, dendrite_infer, neuron_infer, overlap_backoff_bound,
                                sdp_apply, segment_potential, temporal_spike_time, weights_from_text,
                                weights_to_text, wta_1, wta_t)

P = SdpParams()


def test_defaults():
    assert (P.theta, P.w_b, P.w_max, P.capture, P.backoff, P.search) == (8, 6, 8, 1, 4, 0)
    with pytest.raises(ValueError):
        SdpParams(w_b=9)


def test_potential_and_threshold():
    col = np.array([8, 8, 0, 8])
    assert segment_potential(col, np.array([1, 1, 0, 0]), 8) == 16
    assert segment_potential(col, np.array([0, 0, 1, 0]), 8) == 0
    assert segment_potential(col, np.array([0, 0, 0, 1]), 8) == 8


def test_wta_variants():
    assert wta_1([3, 9, 9, 1]).tolist() == [0, 9, 0, 0]
    assert wta_t([3, 9, 9, 1]).tolist() == [0, 9, 9, 0]
    assert wta_1([0, 0]).tolist() == [0, 0]


def test_dendrite_and_neuron():
    w = np.array([[8, 0], [8, 8], [0, 8]])
    assert dendrite_infer(w, np.array([1, 1, 0]), 1, P) == (16, 0)
    assert dendrite_infer(w, np.array([1, 1, 0]), 0, P) == (0, None)
    assert dendrite_infer(w, np.array([0, 1, 1]), 1, P) == (16, 1)
    pot, rec = neuron_infer([w, w * 0], np.array([0, 1, 1]), np.array([1, 1]), P, neuron=3)
    assert pot == 16 and rec == (3, 0, 1, 16)


def test_two_presentations_are_bimodal():
    w = np.full((6, 1), P.w_b, dtype=np.uint8)
    spikes = np.array([1, 0, 1, 1, 0, 0], dtype=np.uint8)
    w1 = sdp_apply(w, spikes, np.array([1]), P)
    assert w1[:, 0].tolist() == [7, 2, 7, 7, 2, 2]
    w2 = sdp_apply(w1, spikes, np.array([1]), P)
    assert w2[:, 0].tolist() == [8, 0, 8, 8, 0, 0]


def test_search_never_lowers():
    p = SdpParams(search=1)
    w = np.array([[8], [3], [6]], dtype=np.uint8)
    assert sdp_apply(w, np.array([1, 1, 1]), np.array([0]), p)[:, 0].tolist() == [8, 4, 6]


def test_backoff_bound():
    assert overlap_backoff_bound(64, 48, 1) == Fraction(3)
    assert overlap_backoff_bound(4, 3, 1) == Fraction(3)
    with pytest.raises(ValueError):
        overlap_backoff_bound(4, 4, 1)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 6), st.integers(1, 12), st.data())
def test_weights_stay_in_range(n_seg, n_lines, data):
    params = SdpParams(capture=data.draw(st.integers(0, 3)),
                       backoff=data.draw(st.integers(0, 8)), search=data.draw(st.integers(0, 3)))
    size = n_lines * n_seg
    w = np.array(data.draw(st.lists(st.integers(0, 8), min_size=size, max_size=size)),
                 dtype=np.uint8).reshape(n_lines, n_seg)
    bits = st.integers(0, 1)
    for _ in range(5):
        spikes = np.array(data.draw(st.lists(bits, min_size=n_lines, max_size=n_lines)))
        fired = np.array(data.draw(st.lists(bits, min_size=n_seg, max_size=n_seg)))
        w = sdp_apply(w, spikes, fired, params)
        assert w.min() >= 0 and w.max() <= params.w_max


def test_weights_stay_in_range_bulk():
    rng = np.random.default_rng(7)
    w = rng.integers(0, 9, size=(10, 4)).astype(np.uint8)
    for _ in range(100_000 // 40):
        ins = rng.integers(0, 2, size=(40, 10))
        outs = rng.integers(0, 2, size=(40, 4))
        for spikes, fired in zip(ins, outs):
            w = sdp_apply(w, spikes, fired, P)
        assert w.max() <= P.w_max


def test_spike_time_formula():
    assert temporal_spike_time(1, 8) == 7
    assert temporal_spike_time(2, 8) == 3
    assert temporal_spike_time(3, 8) == 2
    assert temporal_spike_time(8, 8) == 0
    with pytest.raises(ValueError):
        temporal_spike_time(0, 8)


def test_weight_text_round_trip():
    w = np.array([[8, 0], [0, 8]], dtype=np.uint8)
    assert weights_to_text(w) == "8 0\n0 8\n"
    assert np.array_equal(weights_from_text(weights_to_text(w)), w)
