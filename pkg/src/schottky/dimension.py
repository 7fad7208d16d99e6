"""Hausdorff dimension of the limit set: Poincare-series and transfer-matrix estimators."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from .group import (
    DEFAULT_WORD_BUDGET,
    MarkedSchottkyGroup,
    WordBudgetExceeded,
    count_reduced_words,
    nested_disks_at,
    verify_classical,
    word_levels,
)

__all__ = [
    "S_MIN",
    "S_MAX",
    "DimensionReport",
    "DivergenceEvidence",
    "NonMonotoneRatio",
    "default_depth",
    "default_base_point",
    "poincare_partial_sums",
    "estimate_delta_poincare",
    "build_transfer_matrix",
    "spectral_radius",
    "estimate_delta_transfer",
    "poincare_diverges_at_one",
    "dimension_report",
]

logger = logging.getLogger(__name__)

S_MIN = 1e-3
S_MAX = 2.0


class NonMonotoneRatio(RuntimeError):
    """The series ratio is not monotone in the exponent; the depth is too small."""


def default_depth(rank: int) -> int:
    return 8 if rank <= 2 else 6


def _check(group: MarkedSchottkyGroup) -> None:
    report = verify_classical(group)
    if not report.ok:
        raise ValueError("group is not a verified classical Schottky group: " + "; ".join(report.violations))


def default_base_point(group: MarkedSchottkyGroup) -> complex:
    """A point of the fundamental region well away from every witness disk."""
    circles = group.require_witness()
    cen = np.array([c.center for c in circles])
    rad = np.array([c.radius for c in circles])
    lo = (cen - rad).real.min(), (cen - 1j * rad).imag.min()
    hi = (cen + rad).real.max(), (cen + 1j * rad).imag.max()
    span = max(hi[0] - lo[0], hi[1] - lo[1])
    xs = np.linspace(lo[0], hi[0], 41)
    ys = np.linspace(lo[1], hi[1], 41) if hi[1] - lo[1] > 1e-3 * span else np.array([0.5 * (lo[1] + hi[1])])
    grid = (xs[:, None] + 1j * ys[None, :]).ravel()
    clearance = (np.abs(grid[:, None] - cen[None, :]) / rad[None, :]).min(axis=1)
    return complex(grid[int(np.argmax(clearance))])


def _log_derivatives(group, max_len, z0, budget=DEFAULT_WORD_BUDGET):
    """log|w'(z0)| for each word length 1..max_len.

    Only the bottom row (c, d) of each word matrix enters the derivative, so
    only that row is carried from prefix to word.
    """
    g = group.rank
    n_letters = 2 * g
    total = sum(count_reduced_words(g, n) for n in range(1, max_len + 1))
    if total > budget:
        raise WordBudgetExceeded(f"{total} words requested, budget is {budget}")
    lm = group.letter_maps
    la = np.array([m.a for m in lm])
    lb = np.array([m.b for m in lm])
    lc = np.array([m.c for m in lm])
    ld = np.array([m.d for m in lm])
    c, d, last = lc.copy(), ld.copy(), np.arange(n_letters)
    out = [-2.0 * np.log(np.abs(c * z0 + d))]
    for _ in range(1, max_len):
        nxt = np.arange(n_letters)
        parent = np.repeat(np.arange(len(c)), n_letters)
        x = np.tile(nxt, len(c))
        keep = x != (last[parent] + g) % n_letters
        parent, x = parent[keep], x[keep]
        pc, pd = c[parent], d[parent]
        c = pc * la[x] + pd * lc[x]
        d = pc * lb[x] + pd * ld[x]
        last = x
        out.append(-2.0 * np.log(np.abs(c * z0 + d)))
    return out


def poincare_partial_sums(
    group: MarkedSchottkyGroup,
    s: float,
    max_len: int,
    z0: Optional[complex] = None,
    budget: int = DEFAULT_WORD_BUDGET,
) -> list:
    """Length-n sums S_n(s) = sum over |w| = n of |w'(z0)|^s, for n = 1..max_len."""
    _check(group)
    if not 0 < s <= 2:
        raise ValueError("exponent must lie in (0, 2]")
    z0 = default_base_point(group) if z0 is None else complex(z0)
    return [float(np.exp(logsumexp(s * L))) for L in _log_derivatives(group, max_len, z0, budget)]


def _bisect_decreasing(f, lo, hi, tol, what):
    """Root of a decreasing function on [lo, hi]; f(lo) > 0 > f(hi) expected."""
    flo, fhi = f(lo), f(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if not (flo >= fm >= fhi):
            raise NonMonotoneRatio(
                f"{what} is not monotone on [{lo:.6g}, {hi:.6g}]: values {flo:.6g}, {fm:.6g}, {fhi:.6g}"
            )
        if fm > 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def estimate_delta_poincare(
    group: MarkedSchottkyGroup,
    max_len: Optional[int] = None,
    z0: Optional[complex] = None,
    tol: float = 1e-4,
    budget: int = DEFAULT_WORD_BUDGET,
) -> float:
    """Exponent where the length-ratio S_{n+1}(s)/S_n(s) crosses one.

    Returns ``S_MIN`` when the ratio is already below one there (dimension
    below resolution).
    """
    _check(group)
    if max_len is None:
        max_len = default_depth(group.rank)
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    z0 = default_base_point(group) if z0 is None else complex(z0)
    logs = _log_derivatives(group, max_len + 1, z0, budget)
    L_n, L_next = logs[max_len - 1], logs[max_len]

    def log_ratio(s):
        return logsumexp(s * L_next) - logsumexp(s * L_n)

    if log_ratio(S_MIN) <= 0:
        return S_MIN
    if log_ratio(S_MAX) > 0:
        raise NonMonotoneRatio("series ratio still exceeds one at s = 2; depth too small")
    return _bisect_decreasing(log_ratio, S_MIN, S_MAX, tol, "Poincare ratio")


def _partition(group: MarkedSchottkyGroup, level: int):
    """States of the refined partition: (first letter, shift target, centers)."""
    g = group.rank
    n_letters = 2 * g
    prev = None
    for lv in word_levels(group, level):
        if lv.length == level:
            centers, radii = nested_disks_at(group, lv, prev)
            break
        prev = lv
    # reconstruct letter sequences of every level-`level` word
    seqs = [[k] for k in range(n_letters)]
    for _ in range(level - 1):
        seqs = [w + [k] for w in seqs for k in range(n_letters) if k != (w[-1] + g) % n_letters]
    return seqs, centers, radii


def _transfer_pattern(group: MarkedSchottkyGroup, level: int):
    """Sparsity pattern (rows, cols), acting letters and evaluation points."""
    g = group.rank
    n_letters = 2 * g
    if level == 1:
        circles = group.require_witness()
        rows, cols, letters, pts = [], [], [], []
        for k in range(n_letters):
            for j in range(n_letters):
                if j == (k + g) % n_letters:
                    continue
                rows.append(k)
                cols.append(j)
                letters.append((k + g) % n_letters)
                pts.append(circles[j].center)
        return n_letters, np.array(rows), np.array(cols), np.array(letters), np.array(pts)
    seqs, centers, _ = _partition(group, level)
    index = {tuple(w): i for i, w in enumerate(seqs)}
    rows, cols, letters, pts = [], [], [], []
    for j, v in enumerate(seqs):
        for letter in range(n_letters):
            if letter == (v[0] + g) % n_letters:
                continue
            rows.append(index[(letter, *v[:-1])])
            cols.append(j)
            letters.append(letter)
            pts.append(centers[j])
    return len(seqs), np.array(rows), np.array(cols), np.array(letters), np.array(pts)


def _log_entries(group, pattern):
    _, _, _, letters, pts = pattern
    maps = group.letter_maps
    c = np.array([maps[k].c for k in letters])
    d = np.array([maps[k].d for k in letters])
    return -2.0 * np.log(np.abs(c * pts + d))


def build_transfer_matrix(group: MarkedSchottkyGroup, s: float, level: int = 1):
    """Contraction-weighted transition matrix of the disk partition.

    At ``level = 1`` the states are the 2g witness disks and entry ``(k, j)``
    is ``|m_k'(z_j)|^s`` where ``m_k`` is the letter landing in disk ``k`` and
    ``z_j`` the center of disk ``j``; the transition is admissible unless ``j``
    is the disk that ``m_k`` cannot act on.  Higher levels use the nested disks
    of words of that length as states and return a sparse matrix.
    """
    if level < 1:
        raise ValueError("level must be at least 1")
    pattern = _transfer_pattern(group, level)
    n, rows, cols = pattern[:3]
    vals = np.exp(s * _log_entries(group, pattern))
    if level == 1:
        T = np.zeros((n, n))
        T[rows, cols] = vals
        return T
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def spectral_radius(T, rtol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Perron root of a nonnegative matrix by power iteration."""
    x = np.ones(T.shape[0])
    rho = 0.0
    for _ in range(max_iter):
        y = T @ x
        norm = np.abs(y).max()
        if norm == 0:
            return 0.0
        y /= norm
        if abs(norm - rho) <= rtol * norm and np.abs(y - x).max() <= 1e-8:
            return float(norm)
        x, rho = y, norm
    logger.warning("power iteration did not converge; falling back to eigvals")
    dense = T.toarray() if sparse.issparse(T) else T
    return float(np.abs(np.linalg.eigvals(dense)).max())


AUTO_MAX_STATES = 5000
AUTO_STEP = 0.01


def _transfer_at_level(group, tol, level):
    pattern = _transfer_pattern(group, level)
    n, rows, cols = pattern[:3]
    logs = _log_entries(group, pattern)

    def log_rho(s):
        vals = np.exp(s * logs)
        if level == 1:
            T = np.zeros((n, n))
            T[rows, cols] = vals
        else:
            T = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
        return math.log(spectral_radius(T))

    if log_rho(S_MIN) <= 0:
        return S_MIN
    if log_rho(S_MAX) > 0:
        raise ValueError("spectral radius exceeds one at s = 2; configuration is not well separated")
    return _bisect_decreasing(log_rho, S_MIN, S_MAX, tol, "spectral radius")


def estimate_delta_transfer(group: MarkedSchottkyGroup, tol: float = 1e-6, level=1) -> float:
    """Exponent where the transfer matrix has spectral radius one.

    ``level="auto"`` refines the partition until one more level moves the
    estimate by less than 0.01 (or the state count would pass 5000).
    Returns ``S_MIN`` when the spectral radius is already below one there.
    """
    _check(group)
    if tol < 1e-12:
        raise ValueError("tol too small")
    if level != "auto":
        return _transfer_at_level(group, tol, int(level))
    g = group.rank
    est = _transfer_at_level(group, tol, 1)
    lv = 1
    while count_reduced_words(g, lv + 1) <= AUTO_MAX_STATES:
        lv += 1
        nxt = _transfer_at_level(group, tol, lv)
        done = abs(nxt - est) < AUTO_STEP
        est = nxt
        if done:
            break
    return est


@dataclass
class DivergenceEvidence:
    """Outcome of the ratio test for the Poincare series at exponent one.

    ``diverges`` is ``None`` when the ratio trace is inconclusive.
    """

    diverges: Optional[bool]
    ratios: list
    status: str

    def __bool__(self):
        if self.diverges is None:
            raise ValueError("divergence test was inconclusive; check .status")
        return self.diverges


def poincare_diverges_at_one(
    group: MarkedSchottkyGroup,
    max_len: Optional[int] = None,
    z0: Optional[complex] = None,
    window: int = 3,
    slack: float = 1e-3,
) -> DivergenceEvidence:
    if max_len is None:
        max_len = default_depth(group.rank)
    if max_len < window + 1:
        raise ValueError(f"max_len must be at least {window + 1}")
    sums = poincare_partial_sums(group, 1.0, max_len, z0)
    ratios = [b / a for a, b in zip(sums, sums[1:])]
    tail = ratios[-window:]
    if all(r >= 1 - slack for r in tail):
        return DivergenceEvidence(True, ratios, "diverges")
    if all(r < 1 - slack for r in tail):
        return DivergenceEvidence(False, ratios, "converges")
    return DivergenceEvidence(None, ratios, "inconclusive")


@dataclass
class DimensionReport:
    delta_poincare: float
    delta_transfer: float
    depth_used: int
    agreement: float = field(init=False)

    def __post_init__(self):
        self.agreement = abs(self.delta_poincare - self.delta_transfer)

    @property
    def below_resolution(self) -> bool:
        return self.delta_poincare <= S_MIN and self.delta_transfer <= S_MIN

    def lines(self) -> list:
        return [
            f"delta_poincare={self.delta_poincare:.6f}",
            f"delta_transfer={self.delta_transfer:.6f}",
            f"agreement={self.agreement:.6f}",
            f"depth={self.depth_used}",
        ]


def dimension_report(
    group: MarkedSchottkyGroup,
    depth: Optional[int] = None,
    tol: float = 1e-6,
    level="auto",
) -> DimensionReport:
    depth = default_depth(group.rank) if depth is None else depth
    dp = estimate_delta_poincare(group, depth, tol=max(tol, 1e-6))
    dt = estimate_delta_transfer(group, tol=tol, level=level)
    return DimensionReport(dp, dt, depth)
