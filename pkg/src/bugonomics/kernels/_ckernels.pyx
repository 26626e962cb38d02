# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``_pykernels``. Same float operation order, same results."""

import numpy as np

from libc.math cimport floor, log, sqrt, INFINITY
from libc.stdint cimport uint64_t, int64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MUL1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MUL2 = 0x94D049BB133111EBULL
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = z + GOLDEN
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


cdef inline uint64_t _hash(uint64_t seed, uint64_t stream, uint64_t index) noexcept nogil:
    cdef uint64_t z = _mix(seed)
    z = _mix(z ^ stream)
    return _mix(z ^ index)


cdef inline double _uniform(uint64_t seed, uint64_t stream, uint64_t index) noexcept nogil:
    return <double>(_hash(seed, stream, index) >> 11) * INV53


cdef inline double _draw(long kind, double lo, double hi, double mode, double u) noexcept nogil:
    cdef double width, split
    if kind == 1:
        return lo + (hi - lo) * u
    if kind == 2:
        width = hi - lo
        if width <= 0.0:
            return lo
        split = (mode - lo) / width
        if u < split:
            return lo + sqrt(u * width * (mode - lo))
        return hi - sqrt((1.0 - u) * width * (hi - mode))
    return lo


def counter_hash(seed, stream, index):
    mask = (1 << 64) - 1
    return _hash(seed & mask, stream & mask, index & mask)


def counter_uniform(seed, stream, index):
    mask = (1 << 64) - 1
    return _uniform(seed & mask, stream & mask, index & mask)


def sample_block(seed, start, Py_ssize_t n, kinds, lo, hi, mode):
    cdef Py_ssize_t k = len(kinds)
    cdef long[::1] kv = np.ascontiguousarray(kinds, dtype=np.int_)
    cdef double[::1] lov = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[::1] hiv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef double[::1] mov = np.ascontiguousarray(mode, dtype=np.float64)
    out = np.empty((n, k), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef uint64_t s = seed & ((1 << 64) - 1)
    cdef uint64_t base = start
    cdef Py_ssize_t i, j
    cdef double u
    with nogil:
        for i in range(n):
            for j in range(k):
                u = _uniform(s, <uint64_t>j, base + <uint64_t>i)
                ov[i, j] = _draw(kv[j], lov[j], hiv[j], mov[j], u)
    return out


def poisson_arrivals(seed, stream, double rate_per_hour, double horizon):
    cdef uint64_t s = seed & ((1 << 64) - 1)
    cdef uint64_t st = stream & ((1 << 64) - 1)
    cdef double t = 0.0
    cdef double u
    cdef uint64_t k = 0
    times = []
    if rate_per_hour <= 0.0:
        return np.asarray(times, dtype=np.float64)
    while True:
        u = _uniform(s, st, k)
        t = t + (-log(1.0 - u)) / rate_per_hour
        if t >= horizon:
            break
        times.append(t)
        k += 1
    return np.asarray(times, dtype=np.float64)


def serve_stage(arrivals, service, priority, double capacity, double horizon, double week_hours):
    cdef double[::1] arr = np.ascontiguousarray(arrivals, dtype=np.float64)
    cdef double[::1] svc = np.ascontiguousarray(service, dtype=np.float64)
    cdef long[::1] pri = np.ascontiguousarray(priority, dtype=np.int_)
    cdef Py_ssize_t n = arr.shape[0]
    dep_arr = np.full(n, np.inf, dtype=np.float64)
    cdef double[::1] dep = dep_arr
    cdef double busy = 0.0
    cdef Py_ssize_t k

    if capacity < 0.0:
        for k in range(n):
            if arr[k] <= horizon:
                dep[k] = arr[k]
                busy += svc[k]
        return dep_arr, busy

    qbuf = np.empty((3, n if n > 0 else 1), dtype=np.int_)
    cdef long[:, ::1] q = qbuf
    cdef Py_ssize_t heads[3]
    cdef Py_ssize_t tails[3]
    cdef Py_ssize_t i = 0, c
    cdef long cur = -1
    cdef double t = 0.0, budget = capacity, remaining = 0.0
    cdef double week_end, seg, room
    cdef int64_t week = 0, w
    cdef bint done
    for c in range(3):
        heads[c] = 0
        tails[c] = 0

    with nogil:
        while True:
            w = <int64_t>floor(t / week_hours)
            if w != week:
                week = w
                budget = capacity
            if t >= horizon:
                break
            while i < n and arr[i] <= t:
                c = pri[i]
                q[c, tails[c]] = i
                tails[c] += 1
                i += 1
            if cur < 0:
                for c in range(3):
                    if heads[c] < tails[c]:
                        cur = q[c, heads[c]]
                        heads[c] += 1
                        break
                if cur < 0:
                    if i >= n:
                        break
                    t = arr[i]
                    continue
                remaining = svc[cur]
            if remaining <= 0.0:
                dep[cur] = t
                cur = -1
                continue
            week_end = (week + 1) * week_hours
            if budget <= 0.0 or week_end - t <= 0.0:
                t = week_end
                continue
            seg = remaining
            done = True
            if budget < seg:
                seg = budget
                done = False
            room = week_end - t
            if room < seg:
                seg = room
                done = False
            room = horizon - t
            if room < seg:
                seg = room
                done = False
            t = t + seg
            busy = busy + seg
            budget = budget - seg
            if done:
                dep[cur] = t
                cur = -1
            else:
                remaining = remaining - seg
    return dep_arr, busy
