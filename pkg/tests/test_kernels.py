from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bugonomics import kernels
from bugonomics.kernels import _pykernels

BACKENDS = kernels.available_backends()
needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_uniform_range_and_determinism(backend):
    values = [kernels.counter_uniform(42, 0, i) for i in range(1000)]
    assert all(0.0 <= v < 1.0 for v in values)
    assert values == [kernels.counter_uniform(42, 0, i) for i in range(1000)]
    assert values != [kernels.counter_uniform(43, 0, i) for i in range(1000)]


def test_uniform_is_roughly_uniform(backend):
    u = np.array([kernels.counter_uniform(7, 1, i) for i in range(20000)])
    assert abs(u.mean() - 0.5) < 0.01
    hist, _ = np.histogram(u, bins=10, range=(0, 1))
    assert hist.min() > 1800


def test_sample_block_shapes_and_bounds(backend):
    kinds = [kernels.KIND_POINT, kernels.KIND_UNIFORM, kernels.KIND_TRIANGULAR]
    block = kernels.sample_block(1, 0, 5000, kinds, [3.0, 1.0, 0.0], [3.0, 2.0, 10.0], [3.0, 1.0, 2.0])
    assert block.shape == (5000, 3)
    assert (block[:, 0] == 3.0).all()
    assert block[:, 1].min() >= 1.0 and block[:, 1].max() < 2.0
    assert block[:, 2].min() >= 0.0 and block[:, 2].max() <= 10.0
    assert abs(block[:, 2].mean() - 4.0) < 0.15


def test_sample_block_offsets_compose(backend):
    kinds, lo, hi, mode = [kernels.KIND_UNIFORM] * 2, [0.0, 5.0], [1.0, 6.0], [0.0, 5.0]
    whole = kernels.sample_block(9, 0, 100, kinds, lo, hi, mode)
    tail = kernels.sample_block(9, 60, 40, kinds, lo, hi, mode)
    assert (whole[60:] == tail).all()


def test_poisson_count(backend):
    t = kernels.poisson_arrivals(3, 0, 0.5, 10_000.0)
    assert (np.diff(t) >= 0).all() and t.max() < 10_000.0
    assert abs(t.size - 5000) < 4 * math.sqrt(5000)


def test_serve_stage_weekly_budget(backend):
    arrivals = np.arange(10, dtype=np.float64)
    dep, busy = kernels.serve_stage(arrivals, np.ones(10), np.zeros(10, dtype=np.int_), 5.0, 168.0 * 2, 168.0)
    assert np.isfinite(dep).sum() == 10
    assert busy == 10.0
    dep, busy = kernels.serve_stage(arrivals, np.ones(10), np.zeros(10, dtype=np.int_), 5.0, 168.0, 168.0)
    assert np.isfinite(dep).sum() == 5


def test_serve_stage_unbounded_is_instant(backend):
    arrivals = np.array([0.0, 1.5, 3.0])
    dep, busy = kernels.serve_stage(arrivals, np.full(3, 100.0), np.zeros(3, dtype=np.int_), -1.0, 168.0, 168.0)
    assert (dep == arrivals).all()
    assert busy == 300.0


@needs_ext
@given(st.integers(0, 2**64 - 1), st.integers(0, 2**32), st.integers(0, 2**40))
def test_backends_bit_identical_hash(seed, stream, index):
    c = kernels.get_backend("cython")
    assert c.counter_hash(seed, stream, index) == _pykernels.counter_hash(seed, stream, index)
    assert c.counter_uniform(seed, stream, index) == _pykernels.counter_uniform(seed, stream, index)


@needs_ext
def test_backends_bit_identical_blocks():
    c = kernels.get_backend("cython")
    args = (123, 7, 2000, [0, 1, 2], [1.0, 0.5, 100.0], [1.0, 2.0, 250.0], [1.0, 0.5, 150.0])
    assert (c.sample_block(*args) == _pykernels.sample_block(*args)).all()
    assert (c.poisson_arrivals(5, 1, 0.3, 5000.0) == _pykernels.poisson_arrivals(5, 1, 0.3, 5000.0)).all()
    rng_arr = np.sort(_pykernels.poisson_arrivals(8, 0, 0.2, 1000.0))
    svc = _pykernels.sample_block(8, 0, rng_arr.size, [1], [0.5], [4.0], [0.5])[:, 0].copy()
    prio = (np.arange(rng_arr.size) % 3).astype(np.int_)
    for cap in (-1.0, 0.0, 7.5, 40.0):
        a = c.serve_stage(rng_arr, svc, prio, cap, 1000.0, 168.0)
        b = _pykernels.serve_stage(rng_arr, svc, prio, cap, 1000.0, 168.0)
        assert (a[0] == b[0]).all() or np.array_equal(a[0], b[0])
        assert a[1] == b[1]
