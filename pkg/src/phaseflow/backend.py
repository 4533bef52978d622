"""Kernel backend selection.

The pointwise kernels that sit inside the Newton and diagnostics loops exist
twice: a reference numpy implementation and numba ``@njit`` twins.  The
active backend is chosen once at import from the environment:

* ``PHASEFLOW_NUMBA=0`` (or ``false``/``off``) forces the numpy path,
* ``PHASEFLOW_NUMBA=1`` requires numba and fails loudly if it is missing,
* unset or ``auto``: numba when importable, numpy otherwise.

``PHASEFLOW_THREADS`` caps numba's thread pool.  Kernels are elementwise or
single-pass reductions, so results agree between backends to rounding; see
``benchmarks/bench_kernels.py`` for the measured speed trade-offs.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_FALSY = {"0", "false", "off", "no"}
_TRUTHY = {"1", "true", "on", "yes"}


def _load_numba_kernels():
    from . import _kernels_numba

    return _kernels_numba


def _select_initial():
    flag = os.environ.get("PHASEFLOW_NUMBA", "auto").strip().lower()
    if flag in _FALSY:
        return _kernels_numpy, "numpy"
    if flag in _TRUTHY:
        return _load_numba_kernels(), "numba"
    try:
        return _load_numba_kernels(), "numba"
    except ImportError:
        return _kernels_numpy, "numpy"


def _apply_thread_cap():
    cap = os.environ.get("PHASEFLOW_THREADS")
    if not cap:
        return
    try:
        n = max(1, int(cap))
    except ValueError:
        return
    try:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass


kernels, backend_name = _select_initial()
_apply_thread_cap()


def use(name: str) -> None:
    """Rebind the active kernel backend (``"numpy"`` or ``"numba"``)."""
    global kernels, backend_name
    if name == "numpy":
        kernels, backend_name = _kernels_numpy, "numpy"
    elif name == "numba":
        kernels, backend_name = _load_numba_kernels(), "numba"
    else:
        raise ValueError(f"unknown backend {name!r}")


def get(name: str):
    """Return a backend module without changing the active one."""
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        return _load_numba_kernels()
    raise ValueError(f"unknown backend {name!r}")
