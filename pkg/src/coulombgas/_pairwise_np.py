"""Pure-numpy pairwise kernels; the fallback when the compiled extension
is unavailable.  Row blocks bound the O(N^2) broadcast memory and give a
fixed reduction order, so results are bitwise reproducible and, with
``threads > 1``, blocks can be evaluated concurrently and still reduced
deterministically.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

_BLOCK = 512


def _row_blocks(n):
    return [(s, min(s + _BLOCK, n)) for s in range(0, n, _BLOCK)]


def _map_blocks(fn, blocks, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, blocks))
    return [fn(b) for b in blocks]


def interaction_energy(z, threads: int = 1) -> float:
    z = np.ascontiguousarray(z, dtype=np.complex128)
    n = len(z)
    idx = np.arange(n)

    def block(bounds):
        s, e = bounds
        diff = z[s:e, None] - z[None, :]
        mask = idx[None, :] > idx[s:e, None]
        d2 = np.abs(diff) ** 2
        with np.errstate(divide="ignore"):
            # coincident points produce -inf; the caller's finiteness
            # check decides how to treat them
            return float(np.sum(np.log(d2, where=mask, out=np.zeros_like(d2)), where=mask))

    return float(sum(_map_blocks(block, _row_blocks(n), threads)))


def interaction_grad(z, threads: int = 1) -> np.ndarray:
    z = np.ascontiguousarray(z, dtype=np.complex128)
    n = len(z)
    idx = np.arange(n)

    def block(bounds):
        s, e = bounds
        diff = z[s:e, None] - z[None, :]
        diff[idx[None, :] == idx[s:e, None]] = 1.0
        inv = 1.0 / diff
        inv[idx[None, :] == idx[s:e, None]] = 0.0
        return inv.sum(axis=1)

    parts = _map_blocks(block, _row_blocks(n), threads)
    return np.conj(np.concatenate(parts))


def mirror_energy(z, threads: int = 1) -> float:
    z = np.ascontiguousarray(z, dtype=np.complex128)
    n = len(z)
    idx = np.arange(n)

    def block(bounds):
        s, e = bounds
        diff = z[s:e, None] - np.conj(z)[None, :]
        mask = idx[None, :] >= idx[s:e, None]
        d2 = np.abs(diff) ** 2
        return float(np.sum(np.log(d2, where=mask, out=np.zeros_like(d2)), where=mask))

    return float(sum(_map_blocks(block, _row_blocks(n), threads)))


def mirror_grad(z, threads: int = 1) -> np.ndarray:
    z = np.ascontiguousarray(z, dtype=np.complex128)
    n = len(z)
    idx = np.arange(n)

    def block(bounds):
        s, e = bounds
        diff = np.conj(z)[s:e, None] - z[None, :]
        sums = (1.0 / diff).sum(axis=1)
        # replace the self term 1/(zbar_j - z_j) with the doubled one
        self_term = 1.0 / np.diagonal(diff[:, s:e]) if e - s else np.array([])
        return sums + self_term

    parts = _map_blocks(block, _row_blocks(n), threads)
    return np.concatenate(parts)
