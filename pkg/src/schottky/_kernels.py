"""Compiled inner loops (numba) for the curve code."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def decimate(re, im, h):
    """Indices of a greedy subsequence whose consecutive gaps are at least ``h``.

    The first vertex is always kept; a trailing vertex closer than ``h`` to
    the first one is dropped so the cyclic closing gap also respects ``h``.
    """
    n = re.shape[0]
    keep = np.empty(n, dtype=np.int64)
    keep[0] = 0
    m = 1
    lx, ly = re[0], im[0]
    h2 = h * h
    for i in range(1, n):
        dx = re[i] - lx
        dy = im[i] - ly
        if dx * dx + dy * dy >= h2:
            keep[m] = i
            m += 1
            lx, ly = re[i], im[i]
    while m > 1:
        dx = re[keep[m - 1]] - re[0]
        dy = im[keep[m - 1]] - im[0]
        if dx * dx + dy * dy >= h2:
            break
        m -= 1
    return keep[:m]


@njit(cache=True)
def _dfd_shift(ar, ai, br, bi, shift, bound):
    """Discrete Frechet distance between closed sequences, ``b`` started at ``shift``.

    Both sequences are closed by repeating their first point.  Returns
    ``inf`` as soon as every cell of a row reaches ``bound``.
    """
    n = ar.shape[0]
    m = br.shape[0]
    prev = np.empty(m + 1)
    cur = np.empty(m + 1)
    for i in range(n + 1):
        ii = i % n
        row_min = np.inf
        for j in range(m + 1):
            jj = (shift + j) % m
            dx = ar[ii] - br[jj]
            dy = ai[ii] - bi[jj]
            d = np.sqrt(dx * dx + dy * dy)
            if i == 0 and j == 0:
                v = d
            elif i == 0:
                v = max(cur[j - 1], d)
            elif j == 0:
                v = max(prev[0], d)
            else:
                best = prev[j - 1]
                if prev[j] < best:
                    best = prev[j]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                v = max(best, d)
            cur[j] = v
            if v < row_min:
                row_min = v
        if row_min >= bound:
            return np.inf
        for j in range(m + 1):
            prev[j] = cur[j]
    return prev[m]


@njit(cache=True)
def dfd_cyclic(ar, ai, br, bi, prune):
    """Minimum over cyclic shifts of ``b`` of the closed discrete Frechet distance.

    With ``prune`` a shift is skipped when its start-point distance (a lower
    bound for that shift) already reaches the best value; the result is the
    same number the unpruned loop returns.
    """
    m = br.shape[0]
    best = np.inf
    for s in range(m):
        if prune:
            dx = ar[0] - br[s]
            dy = ai[0] - bi[s]
            if np.sqrt(dx * dx + dy * dy) >= best:
                continue
            v = _dfd_shift(ar, ai, br, bi, s, best)
        else:
            v = _dfd_shift(ar, ai, br, bi, s, np.inf)
        if v < best:
            best = v
    return best
