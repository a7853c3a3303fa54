"""Simulation-kernel lane selection.

Two interchangeable kernel implementations exist: a numba-compiled
scalar lane and a vectorized numpy lane. They produce identical counts.
Selection order: the ``IFL_BACKEND`` environment variable ("numba" or
"numpy") if set, otherwise numba when importable, otherwise numpy.

``IFL_THREADS`` (or the CLI ``--threads`` flag) caps the numba thread
pool; it never changes results, only wall time.
"""

from __future__ import annotations

import os

from .errors import ValidationError

_BACKENDS = ("numba", "numpy")
_numba_kernels = None
_numba_failed = False


def _load_numba_kernels():
    global _numba_kernels, _numba_failed
    if _numba_kernels is None and not _numba_failed:
        try:
            from . import _kernels_numba
            _numba_kernels = _kernels_numba
        except ImportError:
            _numba_failed = True
    return _numba_kernels


def backend_name() -> str:
    env = os.environ.get("IFL_BACKEND", "").strip().lower()
    if env:
        if env not in _BACKENDS:
            raise ValidationError(
                f"IFL_BACKEND must be one of {_BACKENDS}, got {env!r}"
            )
        if env == "numba" and _load_numba_kernels() is None:
            raise ValidationError("IFL_BACKEND=numba but numba is not importable")
        return env
    return "numba" if _load_numba_kernels() is not None else "numpy"


def kernels():
    """The kernel module for the active backend."""
    if backend_name() == "numba":
        return _load_numba_kernels()
    from . import _kernels_numpy
    return _kernels_numpy


def configure_threads(threads: int | None = None) -> int:
    """Cap numba worker threads from the flag or IFL_THREADS. Returns the cap."""
    if threads is None:
        env = os.environ.get("IFL_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError as e:
                raise ValidationError(f"IFL_THREADS must be an integer, got {env!r}") from e
    if threads is None:
        return 0
    if threads < 1:
        raise ValidationError(f"thread cap must be >= 1, got {threads}")
    if _load_numba_kernels() is not None:
        import numba
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
    return threads
