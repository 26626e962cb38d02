"""Pure-Python reference kernels.

Every function here has a twin in ``_ckernels.pyx``. The two must produce
bit-identical floats for identical inputs, so the order of floating point
operations is part of the contract: change one, change both.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0

KIND_POINT = 0
KIND_UNIFORM = 1
KIND_TRIANGULAR = 2


def _mix(z: int) -> int:
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def counter_hash(seed: int, stream: int, index: int) -> int:
    """64-bit draw for ``(seed, stream, index)``; no generator state."""
    z = _mix(seed & MASK64)
    z = _mix(z ^ (stream & MASK64))
    return _mix(z ^ (index & MASK64))


def counter_uniform(seed: int, stream: int, index: int) -> float:
    return (counter_hash(seed, stream, index) >> 11) * _INV53


def _draw(kind: int, lo: float, hi: float, mode: float, u: float) -> float:
    if kind == KIND_UNIFORM:
        return lo + (hi - lo) * u
    if kind == KIND_TRIANGULAR:
        width = hi - lo
        if width <= 0.0:
            return lo
        split = (mode - lo) / width
        if u < split:
            return lo + math.sqrt(u * width * (mode - lo))
        return hi - math.sqrt((1.0 - u) * width * (hi - mode))
    return lo


def sample_block(seed, start, n, kinds, lo, hi, mode):
    """Draw samples ``start .. start+n-1`` for every parameter column.

    Column ``j`` uses stream ``j``; row ``i`` uses counter ``start + i``.
    """
    k = len(kinds)
    out = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        idx = start + i
        for j in range(k):
            u = counter_uniform(seed, j, idx)
            out[i, j] = _draw(int(kinds[j]), float(lo[j]), float(hi[j]), float(mode[j]), u)
    return out


def poisson_arrivals(seed, stream, rate_per_hour, horizon):
    """Arrival epochs of a Poisson process on ``[0, horizon)``."""
    times = []
    if rate_per_hour <= 0.0:
        return np.asarray(times, dtype=np.float64)
    t = 0.0
    k = 0
    while True:
        u = counter_uniform(seed, stream, k)
        t = t + (-math.log(1.0 - u)) / rate_per_hour
        if t >= horizon:
            break
        times.append(t)
        k += 1
    return np.asarray(times, dtype=np.float64)


def serve_stage(arrivals, service, priority, capacity, horizon, week_hours):
    """Single non-preemptive worker with a weekly effort budget.

    ``arrivals`` must be sorted; within a priority class items are served in
    array order. ``capacity < 0`` means unbounded: items complete at their
    arrival instant. Returns ``(departures, busy_hours)``; items not finished
    by ``horizon`` have departure ``inf``.
    """
    n = len(arrivals)
    dep = np.full(n, np.inf, dtype=np.float64)
    busy = 0.0
    if capacity < 0.0:
        for k in range(n):
            if arrivals[k] <= horizon:
                dep[k] = arrivals[k]
                busy += service[k]
        return dep, busy

    queues = ([], [], [])
    heads = [0, 0, 0]
    i = 0
    t = 0.0
    week = 0
    budget = capacity
    cur = -1
    remaining = 0.0
    while True:
        w = math.floor(t / week_hours)
        if w != week:
            week = w
            budget = capacity
        if t >= horizon:
            break
        while i < n and arrivals[i] <= t:
            queues[priority[i]].append(i)
            i += 1
        if cur < 0:
            for c in range(3):
                if heads[c] < len(queues[c]):
                    cur = queues[c][heads[c]]
                    heads[c] += 1
                    break
            if cur < 0:
                if i >= n:
                    break
                t = float(arrivals[i])
                continue
            remaining = float(service[cur])
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
    return dep, busy
