"""Frechet distance on closed rectifiable curves, plus the length term.

The positional part is the discrete Frechet distance between the cyclic
vertex sequences, minimized over every cyclic shift of the second curve and,
by default, over both orientations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .quasicircle import PolyCurve

__all__ = [
    "CurveDistance",
    "CauchyReport",
    "DownsampleWarning",
    "frechet_closed",
    "discrete_frechet_shift",
    "neighborhood_filter",
    "cauchy_diagnostic",
    "arclength_resample",
]

MAX_VERTICES = 1000
ORIENTATIONS = ("forward", "both")


class DownsampleWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CurveDistance:
    positional: float
    length_gap: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.positional + self.length_gap)

    def lines(self) -> list:
        return [
            f"positional={self.positional:.12g}",
            f"length_gap={self.length_gap:.12g}",
            f"total={self.total:.12g}",
        ]


def _check_curve(c: PolyCurve, name: str) -> np.ndarray:
    v = np.asarray(c.vertices, dtype=complex)
    if len(v) < 3:
        raise ValueError(f"{name} needs at least 3 vertices, got {len(v)}")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} passes through infinity and has no finite length")
    return v


def arclength_resample(v: np.ndarray, count: int) -> np.ndarray:
    """``count`` points equally spaced in arclength around the closed polyline, starting at ``v[0]``."""
    closed = np.append(v, v[0])
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(closed)))])
    if s[-1] == 0:
        return np.full(count, v[0])
    t = np.linspace(0.0, s[-1], count, endpoint=False)
    return np.interp(t, s, closed.real) + 1j * np.interp(t, s, closed.imag)


def discrete_frechet_shift(a: np.ndarray, b: np.ndarray, shift: int) -> float:
    """Closed discrete Frechet distance with ``b`` started at vertex ``shift`` (no pruning)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(_kernels._dfd_shift(a.real.copy(), a.imag.copy(), b.real.copy(), b.imag.copy(), int(shift), np.inf))


def _positional(a: np.ndarray, b: np.ndarray, orientation: str, prune: bool) -> float:
    ar, ai = a.real.copy(), a.imag.copy()
    best = _kernels.dfd_cyclic(ar, ai, b.real.copy(), b.imag.copy(), prune)
    if orientation == "both":
        r = b[::-1]
        best = min(best, _kernels.dfd_cyclic(ar, ai, r.real.copy(), r.imag.copy(), prune))
    return float(best)


def _canonical(a: np.ndarray, b: np.ndarray):
    """Order the pair so that swapping the arguments runs the identical computation."""
    ka = (len(a), a.tobytes())
    kb = (len(b), b.tobytes())
    return (a, b) if ka <= kb else (b, a)


def frechet_closed(
    c1: PolyCurve,
    c2: PolyCurve,
    orientation: str = "both",
    max_vertices: int = MAX_VERTICES,
    prune: bool = True,
) -> CurveDistance:
    """Cyclic discrete Frechet distance plus the length gap.

    ``orientation="forward"`` only allows couplings that keep both vertex
    orders; ``"both"`` also tries the second curve reversed.  Curves with
    more than ``max_vertices`` vertices are resampled by arclength from
    their first vertex, with a :class:`DownsampleWarning`.
    """
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    a = _check_curve(c1, "first curve")
    b = _check_curve(c2, "second curve")
    if len(a) > max_vertices or len(b) > max_vertices:
        warnings.warn(
            f"resampling curves with {len(a)} and {len(b)} vertices to at most {max_vertices}",
            DownsampleWarning,
            stacklevel=2,
        )
        if len(a) > max_vertices:
            a = arclength_resample(a, max_vertices)
        if len(b) > max_vertices:
            b = arclength_resample(b, max_vertices)
    a, b = _canonical(a, b)
    return CurveDistance(_positional(a, b, orientation, prune), abs(c1.length - c2.length))


def neighborhood_filter(center: PolyCurve, candidates: Sequence[PolyCurve], radius: float, **kw) -> list:
    """Candidates whose total distance to ``center`` is below ``radius``; exact duplicates always qualify."""
    if radius < 0 or math.isnan(radius):
        raise ValueError("radius must be nonnegative")
    out = []
    for c in candidates:
        t = frechet_closed(center, c, **kw).total
        if t < radius or t == 0:
            out.append(c)
    return out


@dataclass
class CauchyReport:
    is_cauchy_at_tol: bool
    tail_gaps: list
    threshold: float

    def __bool__(self):
        return self.is_cauchy_at_tol


def cauchy_diagnostic(sequence: Sequence[PolyCurve], rel_tol: float = 1e-3, **kw) -> CauchyReport:
    """Consecutive distances along a sequence of curves.

    Passes when the gaps never increase and the last one is below
    ``rel_tol`` times the diameter of the last curve.
    """
    if len(sequence) < 4:
        raise ValueError("need at least 4 curves")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DownsampleWarning)
        gaps = [frechet_closed(sequence[k], sequence[k + 1], **kw).total for k in range(len(sequence) - 1)]
    threshold = rel_tol * sequence[-1].diameter
    ok = all(g1 <= g0 for g0, g1 in zip(gaps, gaps[1:])) and gaps[-1] < threshold
    return CauchyReport(bool(ok), gaps, threshold)
