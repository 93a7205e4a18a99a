"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The numba path is used by default.  Set the environment variable
``LQDIM_NO_NUMBA=1`` before import to force the numpy implementations
(useful for debugging and for the benchmark in ``benchmarks/``).

All kernels deposit into dense accumulators indexed by ``cell - lo`` so the
caller must supply conservative ``lo``/``ncells`` bounds.  Both paths apply
additions in lexicographic word order, so their outputs agree bit for bit.
"""

import math
import os
import warnings

import numpy as np

_env_off = os.environ.get("LQDIM_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

if not _env_off:
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        warnings.warn("numba unavailable, falling back to pure numpy kernels")
        USING_NUMBA = False
else:
    USING_NUMBA = False


# ---------------------------------------------------------------------------
# pure numpy implementations


def deposit_tree_1d_np(offsets, probs, ks, base, scale, lo, ncells):
    """Expand the word tree level by level and bin leaf centers.

    offsets[m, j] is the center increment contributed by child j at level m,
    probs[m, j] the mass factor.  ks[m] is the branching factor at level m.
    Leaf center = base + sum of increments; cell = floor(center * scale) - lo.
    """
    centers = np.array([base])
    masses = np.array([1.0])
    for m in range(ks.shape[0]):
        k = ks[m]
        centers = (centers[:, None] + offsets[m, :k][None, :]).ravel()
        masses = (masses[:, None] * probs[m, :k][None, :]).ravel()
    cells = np.floor(centers * scale).astype(np.int64) - lo
    if cells.size and (cells.min() < 0 or cells.max() >= ncells):
        raise ValueError("deposit cell out of bounds")
    acc = np.zeros(ncells)
    np.add.at(acc, cells, masses)
    return acc


def collect_tree_1d_np(offsets, probs, ks, base, scale):
    """Like deposit_tree_1d but returns per-leaf (cell, mass) arrays in
    lexicographic word order, for levels too deep for a dense accumulator."""
    centers = np.array([base])
    masses = np.array([1.0])
    for m in range(ks.shape[0]):
        k = ks[m]
        centers = (centers[:, None] + offsets[m, :k][None, :]).ravel()
        masses = (masses[:, None] * probs[m, :k][None, :]).ravel()
    return np.floor(centers * scale).astype(np.int64), masses


def convolve_pairs_np(xc, xm, yc, ym, t, scale, lo, ncells, chunk=4096):
    """Deposit mass x*y at floor((cx + t*cy) * scale) for every cell pair."""
    acc = np.zeros(ncells)
    for i0 in range(0, xc.size, chunk):
        i1 = min(i0 + chunk, xc.size)
        z = xc[i0:i1, None] + t * yc[None, :]
        cells = np.floor(z * scale).astype(np.int64) - lo
        if cells.size and (cells.min() < 0 or cells.max() >= ncells):
            raise ValueError("convolution cell out of bounds")
        np.add.at(acc, cells.ravel(), (xm[i0:i1, None] * ym[None, :]).ravel())
    return acc


def riesz_energy_1d_np(pts, masses, s_grid, chunk=512):
    """Off-diagonal double sum of m_i m_j |x_i - x_j|^-s for each s."""
    n = pts.size
    out = np.zeros(s_grid.size)
    for i0 in range(0, n, chunk):
        i1 = min(i0 + chunk, n)
        d = np.abs(pts[i0:i1, None] - pts[None, :])
        w = masses[i0:i1, None] * masses[None, :]
        # zero out the diagonal pairs (and keep d finite there)
        np.fill_diagonal(d[:, i0:i1], 1.0)
        np.fill_diagonal(w[:, i0:i1], 0.0)
        for k, s in enumerate(s_grid):
            out[k] += np.sum(w * d ** (-s))
    return out


def riesz_energy_2d_np(pts, masses, s_grid, chunk=512):
    n = pts.shape[0]
    out = np.zeros(s_grid.size)
    for i0 in range(0, n, chunk):
        i1 = min(i0 + chunk, n)
        diff = pts[i0:i1, None, :] - pts[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=2))
        w = masses[i0:i1, None] * masses[None, :]
        np.fill_diagonal(d[:, i0:i1], 1.0)
        np.fill_diagonal(w[:, i0:i1], 0.0)
        for k, s in enumerate(s_grid):
            out[k] += np.sum(w * d ** (-s))
    return out


# ---------------------------------------------------------------------------
# numba implementations

if USING_NUMBA:

    @njit(cache=True, nogil=True)
    def _deposit_tree_1d_jit(offsets, probs, ks, base, scale, lo, ncells):
        depth = ks.shape[0]
        acc = np.zeros(ncells)
        child = np.zeros(depth, dtype=np.int64)
        cen = np.zeros(depth + 1)
        mas = np.ones(depth + 1)
        cen[0] = base
        m = 0
        while m >= 0:
            if m == depth:
                cell = np.int64(math.floor(cen[m] * scale)) - lo
                if cell < 0 or cell >= ncells:
                    raise ValueError("deposit cell out of bounds")
                acc[cell] += mas[m]
                m -= 1
                continue
            j = child[m]
            if j >= ks[m]:
                child[m] = 0
                m -= 1
                continue
            child[m] = j + 1
            cen[m + 1] = cen[m] + offsets[m, j]
            mas[m + 1] = mas[m] * probs[m, j]
            m += 1
        return acc

    @njit(cache=True, nogil=True)
    def _collect_tree_1d_jit(offsets, probs, ks, base, scale):
        depth = ks.shape[0]
        n_leaves = 1
        for m in range(depth):
            n_leaves *= ks[m]
        cells = np.empty(n_leaves, dtype=np.int64)
        masses = np.empty(n_leaves)
        child = np.zeros(depth, dtype=np.int64)
        cen = np.zeros(depth + 1)
        mas = np.ones(depth + 1)
        cen[0] = base
        out = 0
        m = 0
        while m >= 0:
            if m == depth:
                cells[out] = np.int64(math.floor(cen[m] * scale))
                masses[out] = mas[m]
                out += 1
                m -= 1
                continue
            j = child[m]
            if j >= ks[m]:
                child[m] = 0
                m -= 1
                continue
            child[m] = j + 1
            cen[m + 1] = cen[m] + offsets[m, j]
            mas[m + 1] = mas[m] * probs[m, j]
            m += 1
        return cells, masses

    @njit(cache=True, nogil=True)
    def _convolve_pairs_jit(xc, xm, yc, ym, t, scale, lo, ncells):
        acc = np.zeros(ncells)
        for i in range(xc.size):
            xi = xc[i]
            mi = xm[i]
            for j in range(yc.size):
                cell = np.int64(math.floor((xi + t * yc[j]) * scale)) - lo
                if cell < 0 or cell >= ncells:
                    raise ValueError("convolution cell out of bounds")
                acc[cell] += mi * ym[j]
        return acc

    @njit(cache=True, nogil=True)
    def _riesz_energy_1d_jit(pts, masses, s_grid, chunk):
        n = pts.size
        out = np.zeros(s_grid.size)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                ld = math.log(abs(pts[i] - pts[j]))
                w = masses[i] * masses[j]
                for k in range(s_grid.size):
                    out[k] += w * math.exp(-s_grid[k] * ld)
        return out

    @njit(cache=True, nogil=True)
    def _riesz_energy_2d_jit(pts, masses, s_grid, chunk):
        n = pts.shape[0]
        out = np.zeros(s_grid.size)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                dx = pts[i, 0] - pts[j, 0]
                dy = pts[i, 1] - pts[j, 1]
                ld = 0.5 * math.log(dx * dx + dy * dy)
                w = masses[i] * masses[j]
                for k in range(s_grid.size):
                    out[k] += w * math.exp(-s_grid[k] * ld)
        return out

    deposit_tree_1d = _deposit_tree_1d_jit
    collect_tree_1d = _collect_tree_1d_jit
    convolve_pairs = _convolve_pairs_jit

    def riesz_energy_1d(pts, masses, s_grid, chunk=512):
        return _riesz_energy_1d_jit(pts, masses, s_grid, chunk)

    def riesz_energy_2d(pts, masses, s_grid, chunk=512):
        return _riesz_energy_2d_jit(pts, masses, s_grid, chunk)

else:
    deposit_tree_1d = deposit_tree_1d_np
    collect_tree_1d = collect_tree_1d_np
    convolve_pairs = convolve_pairs_np
    riesz_energy_1d = riesz_energy_1d_np
    riesz_energy_2d = riesz_energy_2d_np
