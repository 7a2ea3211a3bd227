"""Backend selection for the convolution sums.

The compiled core is used when it imports; setting UNBOUNDED_DSP_PURE_PYTHON=1
forces the numpy fallback.  UNBOUNDED_DSP_THREADS caps the number of worker
threads over output points (0 or unset means one per CPU).
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

_core = None
if os.environ.get("UNBOUNDED_DSP_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _core  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        _core = None

BACKEND = "compiled" if _core is not None else "python"
# below this many (output x kernel) products threading is not worth it
_MIN_WORK_PER_THREAD = 1 << 20


def thread_count() -> int:
    raw = os.environ.get("UNBOUNDED_DSP_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _impl(backend):
    if backend is None:
        backend = BACKEND
    if backend == "compiled":
        if _core is None:
            raise RuntimeError("compiled backend is not available")
        return _core
    if backend == "python":
        return _fallback
    raise ValueError(f"unknown backend {backend!r}")


def _chunked(fn, t_out, work, *args):
    t_out = np.ascontiguousarray(t_out, dtype=np.float64)
    nthreads = min(thread_count(), max(1, work // _MIN_WORK_PER_THREAD), max(1, t_out.size))
    if nthreads <= 1:
        return fn(t_out, *args)
    chunks = np.array_split(t_out, nthreads)
    with ThreadPoolExecutor(max_workers=nthreads) as ex:
        parts = list(ex.map(lambda c: fn(c, *args), chunks))
    return np.concatenate(parts)


def convolve_symbolic(tau0, dt, hw, t_out, coeffs, powers, freqs, backend=None):
    impl = _impl(backend)

    def run(t, *a):
        return impl.convolve_symbolic(tau0, dt, hw, t, coeffs, powers, freqs)

    work = len(hw) * len(t_out) * max(1, len(coeffs))
    return _chunked(run, t_out, work)


def convolve_sampled(tau0, dt, hw, t_out, s0, ds, xv):
    def run(t, *a):
        return _fallback.convolve_sampled(tau0, dt, hw, t, s0, ds, xv)

    return _chunked(run, t_out, len(hw) * len(t_out))
