# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_python.py``.

Semantics, argument order and floating-point operation order match the
pure-Python versions exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

NAME = "cython"

EDGE_POS, NODE_POS, DEFICIT, N_NEG = 0, 1, 2, 3


def hc_select_pair(double[:, ::1] dissim, double[:, ::1] cl_dissim,
                   mask, vulnerable, double r_a):
    cdef Py_ssize_t n = dissim.shape[0]
    cdef Py_ssize_t a, b, i
    cdef Py_ssize_t best_a = -1, best_b = -1
    cdef double best = INFINITY
    cdef double d
    cdef long pa, pb
    if n < 2:
        return -1, -1
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef cnp.uint8_t[::1] v = np.ascontiguousarray(vulnerable, dtype=np.uint8)
    cdef long[::1] vcount = np.zeros(n, dtype=np.int_)
    for i in range(n):
        if v[i]:
            for a in range(n):
                if m[i, a]:
                    vcount[a] += 1
    for a in range(n - 1):
        for b in range(a + 1, n):
            if not (cl_dissim[a, b] <= r_a):
                continue
            pa = vcount[a]
            pb = vcount[b]
            if m[a, b]:
                if v[b]:
                    pa -= 1
                if v[a]:
                    pb -= 1
            if pa != 0 or pb != 0:
                continue
            d = dissim[a, b]
            if best_a < 0 or d < best:
                best = d
                best_a = a
                best_b = b
    return int(best_a), int(best_b)


def evaluate_population(pop, double[:, ::1] rates, double[::1] loads, long n_dbs):
    cdef cnp.int64_t[:, ::1] P = np.ascontiguousarray(np.atleast_2d(pop), dtype=np.int64)
    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t length = P.shape[1]
    out_arr = np.zeros((n, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, r
    cdef cnp.int64_t g, nxt
    cdef double acc, run_min, p
    for i in range(n):
        acc = 0.0
        run_min = INFINITY
        for r in range(length - 1):
            g = P[i, r]
            nxt = P[i, r + 1]
            if g < n_dbs:
                acc = acc + loads[g]
                p = rates[g, nxt] - acc
                if p < run_min:
                    run_min = p
                if p > 0.0:
                    out[i, 0] += p
                if run_min > 0.0:
                    out[i, 1] += run_min
                if p < 0.0:
                    out[i, 2] += p
                    out[i, 3] += 1.0
            else:
                acc = 0.0
                run_min = INFINITY
    return out_arr


cdef void _repair(cnp.int64_t[::1] leader, cnp.int64_t[::1] follower,
                  cnp.uint8_t[::1] take, long n_dbs,
                  cnp.int64_t[::1] child, cnp.int64_t[::1] buf,
                  cnp.int64_t[::1] spare, cnp.uint8_t[::1] used,
                  cnp.uint8_t[::1] seen, cnp.int64_t[::1] lens) noexcept nogil:
    cdef Py_ssize_t length = leader.shape[0]
    cdef Py_ssize_t n_mbs = length - n_dbs
    cdef Py_ssize_t i, j, k, pos, n_spare, si, shortest, b_read, li
    cdef cnp.int64_t g, d
    for i in range(n_dbs):
        used[i] = 0
        seen[i] = 0
    k = 0
    for i in range(length):
        g = leader[i]
        if g < n_dbs:
            if take[k]:
                used[g] = 1
        else:
            k += 1
    k = 0
    for i in range(length):
        g = follower[i]
        if g < n_dbs:
            if not take[k]:
                seen[g] = 1
        else:
            k += 1
    n_spare = 0
    for i in range(n_dbs):
        if not used[i] and not seen[i]:
            spare[n_spare] = i
            n_spare += 1
    # follower-sourced chains after repair, concatenated in MBS order
    for k in range(n_mbs):
        lens[k] = 0
    si = 0
    pos = 0
    k = 0
    for i in range(length):
        g = follower[i]
        if g >= n_dbs:
            k += 1
            continue
        if take[k]:
            continue
        d = g
        if used[d]:
            if si < n_spare:
                d = spare[si]
                si += 1
            else:
                continue
        used[d] = 1
        buf[pos] = d
        lens[k] += 1
        pos += 1
    shortest = -1
    if si < n_spare:
        for k in range(n_mbs):
            if not take[k] and (shortest < 0 or lens[k] < lens[shortest]):
                shortest = k
    b_read = 0
    li = 0
    pos = 0
    for k in range(n_mbs):
        if take[k]:
            while leader[li] < n_dbs:
                child[pos] = leader[li]
                pos += 1
                li += 1
        else:
            while leader[li] < n_dbs:
                li += 1
            for j in range(lens[k]):
                child[pos] = buf[b_read]
                pos += 1
                b_read += 1
            if k == shortest:
                for j in range(si, n_spare):
                    child[pos] = spare[j]
                    pos += 1
        li += 1
        child[pos] = n_dbs + k
        pos += 1


def crossover_repair(leader, follower, take, long n_dbs):
    out = crossover_batch(np.atleast_2d(leader), np.atleast_2d(follower),
                          np.atleast_2d(take), n_dbs)
    return out[0]


def crossover_batch(leaders, followers, takes, long n_dbs):
    cdef cnp.int64_t[:, ::1] L = np.ascontiguousarray(leaders, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] F = np.ascontiguousarray(followers, dtype=np.int64)
    cdef cnp.uint8_t[:, ::1] T = np.ascontiguousarray(takes, dtype=np.uint8)
    cdef Py_ssize_t n = L.shape[0]
    cdef Py_ssize_t length = L.shape[1]
    cdef Py_ssize_t n_mbs = length - n_dbs
    out_arr = np.empty((n, length), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t size = n_dbs if n_dbs > 0 else 1
    cdef cnp.int64_t[::1] buf = np.empty(size, dtype=np.int64)
    cdef cnp.int64_t[::1] spare = np.empty(size, dtype=np.int64)
    cdef cnp.uint8_t[::1] used = np.empty(size, dtype=np.uint8)
    cdef cnp.uint8_t[::1] seen = np.empty(size, dtype=np.uint8)
    cdef cnp.int64_t[::1] lens = np.empty(n_mbs if n_mbs > 0 else 1, dtype=np.int64)
    cdef Py_ssize_t i
    for i in range(n):
        _repair(L[i], F[i], T[i], n_dbs, out[i], buf, spare, used, seen, lens)
    return out_arr
