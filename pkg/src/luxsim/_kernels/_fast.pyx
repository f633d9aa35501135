# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels (see pure.py for semantics)."""

from libc.math cimport ceil

import numpy as np

IMPLEMENTATION = "cython"


def regrow_wood(res_kind, res_amt, int wood_code, double rate, long cap):
    cdef signed char[:, :] kind = res_kind
    cdef long long[:, :] amt = res_amt
    cdef Py_ssize_t h = kind.shape[0], w = kind.shape[1]
    cdef Py_ssize_t x, y
    cdef long long a, delta, grown = 0
    for y in range(h):
        for x in range(w):
            if kind[y, x] == wood_code:
                a = amt[y, x]
                if 0 < a < cap:
                    delta = <long long> ceil(a * rate)
                    amt[y, x] = a + delta
                    grown += delta
    return int(grown)


def water_fill(long long amount, requests):
    cdef Py_ssize_t n = len(requests)
    rem = np.asarray(requests, dtype=np.int64).copy()
    out = np.zeros(n, dtype=np.int64)
    cdef long long[:] remaining = rem
    cdef long long[:] grants = out
    cdef long long wasted = 0, share, grant
    cdef Py_ssize_t i, active
    while amount > 0:
        active = 0
        for i in range(n):
            if remaining[i] > 0:
                active += 1
        if active == 0:
            break
        share = amount // active
        if share == 0:
            wasted = amount
            amount = 0
            break
        for i in range(n):
            if remaining[i] > 0:
                grant = remaining[i] if remaining[i] < share else share
                grants[i] += grant
                remaining[i] -= grant
                amount -= grant
    return out.tolist(), int(wasted)


def diagonal_run_count(grid, int min_len):
    arr = np.ascontiguousarray(grid, dtype=np.uint8)
    cdef unsigned char[:, :] g = arr
    cdef Py_ssize_t h = g.shape[0], w = g.shape[1]
    cdef Py_ssize_t x, y, x0, y0
    cdef int dx, run, count = 0
    for dx in range(-1, 2, 2):
        for x0 in range(w):
            for y0 in range(h):
                # start only at diagonal heads
                if y0 > 0 and 0 <= x0 - dx < w:
                    continue
                run = 0
                x = x0
                y = y0
                while 0 <= x < w and y < h:
                    if g[y, x]:
                        run += 1
                    else:
                        if run >= min_len:
                            count += 1
                        run = 0
                    x += dx
                    y += 1
                if run >= min_len:
                    count += 1
    return count
