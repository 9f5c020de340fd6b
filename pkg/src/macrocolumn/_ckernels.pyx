# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the array conventions."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint8_t, int32_t

cnp.import_array()

BACKEND = "cython"


def column_potentials(const uint8_t[:, :, ::1] w, const uint8_t[::1] d1,
                      const cnp.intp_t[::1] active):
    cdef Py_ssize_t n = w.shape[0], s = w.shape[1], k = active.shape[0]
    cdef Py_ssize_t i, j, a
    cdef int32_t p
    out = np.zeros((n, s), dtype=np.int32)
    cdef int32_t[:, ::1] pots = out
    for i in range(n):
        for j in range(s):
            p = w[i, j, 0] if d1[i] else 0
            for a in range(k):
                p += w[i, j, active[a]]
            pots[i, j] = p
    return out


def scan_minicolumn(const uint8_t[:, :, ::1] w, const uint8_t[:, ::1] committed,
                    const uint8_t[::1] d1, const cnp.intp_t[::1] active,
                    int theta, int match_thr, bint exact):
    cdef Py_ssize_t n = w.shape[0], s = w.shape[1], k = active.shape[0]
    cdef Py_ssize_t i, j, a
    cdef int32_t p, rbest, lbest, raw
    cdef int rseg, lseg, lfresh, fresh
    cdef int rthr = theta if (not exact or theta >= match_thr) else match_thr

    r_pot = np.zeros(n, dtype=np.int32)
    r_seg = np.full(n, -1, dtype=np.int32)
    l_pot = np.zeros(n, dtype=np.int32)
    l_fresh = np.zeros(n, dtype=np.uint8)
    l_seg = np.full(n, -1, dtype=np.int32)
    raw_pot = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] rp = r_pot, rs = r_seg, lp = l_pot, ls = l_seg, rw = raw_pot
    cdef uint8_t[::1] lf = l_fresh

    for i in range(n):
        rbest = -1; rseg = -1
        lbest = -1; lseg = -1; lfresh = 0
        raw = 0
        for j in range(s):
            p = w[i, j, 0] if d1[i] else 0
            for a in range(k):
                p += w[i, j, active[a]]
            fresh = committed[i, j] == 0
            if not fresh and p > raw:
                raw = p
            if exact:
                if not fresh and p >= rthr and p > rbest:
                    rbest = p; rseg = j
            elif p >= theta and p > rbest:
                rbest = p; rseg = j
            if p >= theta:
                if p > lbest or (exact and p == lbest and fresh and not lfresh):
                    lbest = p; lseg = j; lfresh = fresh
        if rseg >= 0:
            rp[i] = rbest; rs[i] = rseg
        if lseg >= 0:
            lp[i] = lbest; ls[i] = lseg; lf[i] = lfresh
        rw[i] = raw
    return r_pot, r_seg, l_pot, l_fresh, l_seg, raw_pot


def capture_segment(uint8_t[::1] col, const uint8_t[::1] spikes, int capture, int backoff, int w_max):
    cdef Py_ssize_t i, d = col.shape[0]
    cdef int v
    for i in range(d):
        v = col[i]
        if spikes[i]:
            v += capture
            if v > w_max:
                v = w_max
        else:
            v -= backoff
            if v < 0:
                v = 0
        col[i] = <uint8_t>v


def segment_committed(const uint8_t[::1] col, int w_b):
    cdef Py_ssize_t i
    for i in range(col.shape[0]):
        if col[i] > w_b:
            return True
    return False
