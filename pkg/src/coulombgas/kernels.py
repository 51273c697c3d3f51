"""Backend selection for the pairwise kernels.

The compiled Cython extension is used when present; otherwise (or when
the environment variable ``COULOMBGAS_PUREPY`` is set) the blocked numpy
implementation takes over with identical semantics.  ``threads > 1`` is
served by the numpy backend, whose fixed block order keeps the reduction
deterministic.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pairwise_np

try:
    if os.environ.get("COULOMBGAS_PUREPY"):
        raise ImportError("pure-Python backend forced by COULOMBGAS_PUREPY")
    from . import _pairwise as _ext

    BACKEND = "compiled"
except ImportError:
    _ext = None
    BACKEND = "numpy"


def _dispatch(name, z, threads):
    z = np.ascontiguousarray(z, dtype=np.complex128)
    if _ext is not None and threads <= 1:
        return getattr(_ext, name)(z)
    return getattr(_pairwise_np, name)(z, threads=threads)


def interaction_energy(z, threads: int = 1) -> float:
    """sum_{j<k} log |z_j - z_k|^2"""
    return _dispatch("interaction_energy", z, threads)


def interaction_grad(z, threads: int = 1) -> np.ndarray:
    """per-particle sums sum_{k != j} 1/(conj(z_j) - conj(z_k))"""
    return _dispatch("interaction_grad", z, threads)


def mirror_energy(z, threads: int = 1) -> float:
    """sum_{j<=k} log |z_j - conj(z_k)|^2"""
    return _dispatch("mirror_energy", z, threads)


def mirror_grad(z, threads: int = 1) -> np.ndarray:
    """per-particle sums sum_{k != j} 1/(conj(z_j) - z_k) + 2/(conj(z_j) - z_j)"""
    return _dispatch("mirror_grad", z, threads)
