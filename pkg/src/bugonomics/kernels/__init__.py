"""Hot-loop kernels with a compiled backend and a pure-Python fallback.

The compiled extension (``_ckernels``) is used when it was built; otherwise
the functions come from ``_pykernels``. Both backends are bit-identical, so
results never depend on which one is active.

>>> from bugonomics import kernels
>>> kernels.BACKEND in ("cython", "python")
True
"""

from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

KIND_POINT = _pykernels.KIND_POINT
KIND_UNIFORM = _pykernels.KIND_UNIFORM
KIND_TRIANGULAR = _pykernels.KIND_TRIANGULAR

BACKEND = "cython" if _ckernels is not None else "python"


def available_backends() -> list[str]:
    return ["cython", "python"] if _ckernels is not None else ["python"]


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = name or BACKEND
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; reinstall with Cython available")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def use_backend(name: str) -> None:
    """Switch the process-wide default backend."""
    global BACKEND
    get_backend(name)
    BACKEND = name


def counter_uniform(seed: int, stream: int, index: int) -> float:
    return get_backend().counter_uniform(seed, stream, index)


def counter_hash(seed: int, stream: int, index: int) -> int:
    return get_backend().counter_hash(seed, stream, index)


def sample_block(seed, start, n, kinds, lo, hi, mode):
    return get_backend().sample_block(seed, start, n, kinds, lo, hi, mode)


def poisson_arrivals(seed, stream, rate_per_hour, horizon):
    return get_backend().poisson_arrivals(seed, stream, rate_per_hour, horizon)


def serve_stage(arrivals, service, priority, capacity, horizon, week_hours=168.0):
    return get_backend().serve_stage(arrivals, service, priority, capacity, horizon, week_hours)


__all__ = [
    "BACKEND",
    "KIND_POINT",
    "KIND_UNIFORM",
    "KIND_TRIANGULAR",
    "available_backends",
    "counter_hash",
    "counter_uniform",
    "get_backend",
    "poisson_arrivals",
    "sample_block",
    "serve_stage",
    "use_backend",
]
