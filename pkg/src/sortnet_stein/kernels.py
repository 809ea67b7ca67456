"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

The public names (``enumerate_reduced_words``, ``semicircle_crossings``)
dispatch on :data:`sortnet_stein._accel.USE_NUMBA`. Both flavours are always
importable so tests and the benchmark can run them side by side.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

# Below this distance from +-1 the semicircle CDF switches to its series.
SERIES_CUTOFF = 1e-8
_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# Reduced-word enumeration
# ---------------------------------------------------------------------------


@njit(cache=True)
def _dfs_enumerate_nb(n, total):
    length = n * (n - 1) // 2
    out = np.empty((total, length), dtype=np.uint8)
    perm = np.arange(1, n + 1)
    word = np.zeros(length, dtype=np.int64)
    # next letter to try at each depth (0-based position)
    cursor = np.zeros(length + 1, dtype=np.int64)
    depth = 0
    row = 0
    while depth >= 0:
        if depth == length:
            for t in range(length):
                out[row, t] = word[t] + 1
            row += 1
            depth -= 1
            if depth >= 0:
                s = word[depth]
                perm[s], perm[s + 1] = perm[s + 1], perm[s]
            continue
        s = cursor[depth]
        while s < n - 1 and perm[s] > perm[s + 1]:
            s += 1
        if s >= n - 1:
            cursor[depth] = 0
            depth -= 1
            if depth >= 0:
                s0 = word[depth]
                perm[s0], perm[s0 + 1] = perm[s0 + 1], perm[s0]
            continue
        cursor[depth] = s + 1
        word[depth] = s
        perm[s], perm[s + 1] = perm[s + 1], perm[s]
        depth += 1
    return out[:row]


def dfs_enumerate_numba(n, total):
    """All reduced words of the longest element of S_n, lexicographic order.

    ``total`` must be the exact word count (the output is preallocated).
    Rows are 1-based letters as ``uint8``.
    """
    return _dfs_enumerate_nb(int(n), int(total))


def frontier_enumerate_numpy(n, total=None):
    """Level-by-level expansion of every ascent; same rows and order as DFS.

    ``np.nonzero`` returns hits row-major, so a lexicographically sorted
    frontier stays sorted after each extension.
    """
    length = n * (n - 1) // 2
    perms = np.arange(1, n + 1, dtype=np.int16)[None, :]
    words = np.zeros((1, 0), dtype=np.uint8)
    for _ in range(length):
        ascents = perms[:, :-1] < perms[:, 1:]
        rows, cols = np.nonzero(ascents)
        perms = perms[rows].copy()
        idx = np.arange(len(rows))
        left = perms[idx, cols].copy()
        perms[idx, cols] = perms[idx, cols + 1]
        perms[idx, cols + 1] = left
        words = np.concatenate(
            [words[rows], (cols + 1).astype(np.uint8)[:, None]], axis=1
        )
    if total is not None and len(words) != total:
        raise RuntimeError(f"frontier produced {len(words)} words, expected {total}")
    return words


def enumerate_reduced_words(n, total):
    if USE_NUMBA:
        return dfs_enumerate_numba(n, total)
    return frontier_enumerate_numpy(n, total)


# ---------------------------------------------------------------------------
# Semicircle CDF and crossing search
# ---------------------------------------------------------------------------


@njit(cache=True)
def _edge_series(u):
    # F(-1 + u) for small u >= 0
    r = math.sqrt(u)
    return (2.0 * _SQRT2 / math.pi) * r * u * (
        2.0 / 3.0 - u / 10.0 - u * u / 112.0 - u * u * u / 576.0
    )


@njit(cache=True)
def semicircle_cdf_scalar(s):
    if s <= -1.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    if s + 1.0 < SERIES_CUTOFF:
        return _edge_series(s + 1.0)
    if 1.0 - s < SERIES_CUTOFF:
        return 1.0 - _edge_series(1.0 - s)
    root = math.sqrt((1.0 - s) * (1.0 + s))
    return 0.5 + (s * root + math.asin(s)) / math.pi


@njit(cache=True)
def _semicircle_crossings_nb(levels, lo, hi, scale, shift, iters):
    m = levels.shape[0]
    out = np.empty(m)
    for i in range(m):
        a = lo[i]
        b = hi[i]
        c = levels[i]
        for _ in range(iters):
            mid = 0.5 * (a + b)
            if semicircle_cdf_scalar(scale * mid + shift) < c:
                a = mid
            else:
                b = mid
        out[i] = 0.5 * (a + b)
    return out


def semicircle_crossings_numba(levels, lo, hi, scale=1.0, shift=0.0, iters=60):
    return _semicircle_crossings_nb(
        np.ascontiguousarray(levels, dtype=np.float64),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
        float(scale),
        float(shift),
        int(iters),
    )


def semicircle_cdf_array(s):
    s = np.asarray(s, dtype=np.float64)
    out = np.empty_like(s)
    lower = s <= -1.0
    upper = s >= 1.0
    near_lo = ~lower & (s + 1.0 < SERIES_CUTOFF)
    near_hi = ~upper & (1.0 - s < SERIES_CUTOFF)
    mid = ~(lower | upper | near_lo | near_hi)
    out[lower] = 0.0
    out[upper] = 1.0
    u = s[near_lo] + 1.0
    out[near_lo] = (2.0 * _SQRT2 / np.pi) * np.sqrt(u) * u * (
        2.0 / 3.0 - u / 10.0 - u * u / 112.0 - u**3 / 576.0
    )
    u = 1.0 - s[near_hi]
    out[near_hi] = 1.0 - (2.0 * _SQRT2 / np.pi) * np.sqrt(u) * u * (
        2.0 / 3.0 - u / 10.0 - u * u / 112.0 - u**3 / 576.0
    )
    sm = s[mid]
    out[mid] = 0.5 + (sm * np.sqrt((1.0 - sm) * (1.0 + sm)) + np.arcsin(sm)) / np.pi
    return out


def bisect_crossings_numpy(cdf, levels, lo, hi, iters=60):
    """Vectorised bisection for ``cdf(t) = level`` on each ``[lo, hi]``.

    Returns the endpoint when the level lies outside ``[cdf(lo), cdf(hi)]``.
    """
    a = np.array(lo, dtype=np.float64)
    b = np.array(hi, dtype=np.float64)
    c = np.asarray(levels, dtype=np.float64)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        below = cdf(mid) < c
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


def semicircle_crossings_numpy(levels, lo, hi, scale=1.0, shift=0.0, iters=60):
    return bisect_crossings_numpy(
        lambda t: semicircle_cdf_array(scale * t + shift), levels, lo, hi, iters
    )


def semicircle_crossings(levels, lo, hi, scale=1.0, shift=0.0, iters=60):
    if USE_NUMBA:
        return semicircle_crossings_numba(levels, lo, hi, scale, shift, iters)
    return semicircle_crossings_numpy(levels, lo, hi, scale, shift, iters)
