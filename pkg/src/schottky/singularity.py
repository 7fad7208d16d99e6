"""Where a family of witness circles stops being a classical configuration.

Three things can go wrong as a parameter moves: two circles touch
(tangency), a circle shrinks to a point (degeneration), or two circles
merge into one (collapsing).  Each has a scalar diagnostic in
:func:`gap_profile`; :func:`first_singularity` scans for the first
parameter at which one of them drops below tolerance.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .group import MarkedSchottkyGroup, verify_classical
from .moebius import Circle, apply
from .quasicircle import GeneratingCurveSpec, QuasiCircleReport, build_quasicircle, chain_spec

__all__ = [
    "GapProfile",
    "gap_profile",
    "CircleFamily",
    "SingularityKind",
    "SingularityEvent",
    "NonMonotoneFamily",
    "first_singularity",
    "neck_spec",
    "singular_curve_probe",
    "non_crossing",
]

MAX_BISECTIONS = 60
ON_CIRCLE_RADII = 10.0


class SingularityKind(str, Enum):
    TANGENCY = "tangency"
    DEGENERATION_ISOLATED = "degeneration_isolated"
    DEGENERATION_ON_CIRCLE = "degeneration_on_circle"
    COLLAPSING = "collapsing"
    NONE = "none"


class NonMonotoneFamily(ValueError):
    pass


def _pairs(circles) -> list:
    """(center, radius) pairs from Circles or pairs; radii may be zero here."""
    out = []
    for c in circles:
        if isinstance(c, Circle):
            out.append((complex(c.center), float(c.radius)))
        else:
            out.append((complex(c[0]), float(c[1])))
    return out


def _nested(a, b) -> bool:
    d = abs(a[0] - b[0])
    return d + min(a[1], b[1]) < max(a[1], b[1])


@dataclass(frozen=True)
class GapProfile:
    """Scalar diagnostics of a circle configuration with the indices that attain them.

    ``min_pair_gap`` only ranges over pairs that are not nested: for a circle
    inside another the outer-gap formula is meaningless.  It is ``inf`` when
    every pair is nested.
    """

    min_pair_gap: float
    gap_pair: tuple
    min_radius: float
    radius_index: int
    min_circle_hausdorff: float
    hausdorff_pair: tuple


def gap_profile(circles: Sequence) -> GapProfile:
    """Diagnostics of Circles, or of (center, radius) pairs whose radius may have reached zero."""
    cs = _pairs(circles)
    if len(cs) < 2:
        raise ValueError("need at least two circles")
    gap, gp = math.inf, ()
    haus, hp = math.inf, ()
    for i, j in itertools.combinations(range(len(cs)), 2):
        a, b = cs[i], cs[j]
        d = abs(a[0] - b[0])
        h = d + abs(a[1] - b[1])
        if h < haus:
            haus, hp = h, (i, j)
        if not _nested(a, b):
            g = d - a[1] - b[1]
            if g < gap:
                gap, gp = g, (i, j)
    k = min(range(len(cs)), key=lambda i: cs[i][1])
    return GapProfile(gap, gp, cs[k][1], k, haus, hp)


def non_crossing(circles: Sequence) -> list:
    """Pairs of circles that intersect (neither disjoint disks nor strictly nested)."""
    cs = _pairs(circles)
    bad = []
    for i, j in itertools.combinations(range(len(cs)), 2):
        a, b = cs[i], cs[j]
        if not (_nested(a, b) or abs(a[0] - b[0]) > a[1] + b[1]):
            bad.append((i, j))
    return bad


@dataclass
class CircleFamily:
    """Circles depending on a parameter ``t`` in ``[t0, t1]``.

    ``evaluator(t)`` returns the 2g circles (as Circles or (center, radius)
    pairs, so a radius may reach zero), paired ``i <-> i + g``; pairing
    maps use ``twists`` (default: pi for every generator).  ``samples`` is
    the number of scan points.  At ``t0`` no two circles may cross.
    """

    evaluator: Callable[[float], Sequence[Circle]]
    t0: float
    t1: float
    samples: int = 200
    twists: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("need t1 > t0")
        if self.samples < 2:
            raise ValueError("need at least two scan samples")
        circles = self.raw(self.t0)
        if len(circles) < 2 or len(circles) % 2:
            raise ValueError("a family needs an even number (at least 2) of circles")
        if min(r for _, r in circles) <= 0:
            raise ValueError(f"a radius is not positive at t0 = {self.t0}")
        bad = non_crossing(circles)
        if bad:
            raise ValueError(f"circles {bad[0]} cross at t0 = {self.t0}")

    def raw(self, t: float) -> list:
        return _pairs(self.evaluator(t))

    def circles(self, t: float) -> list:
        return [Circle(c, r) for c, r in self.raw(t)]

    def group(self, t: float) -> MarkedSchottkyGroup:
        return MarkedSchottkyGroup.from_circles(self.circles(t), twists=self.twists, name=f"{self.name}(t={t:g})")

    @property
    def scale(self) -> float:
        """Largest center distance at ``t0`` (largest radius for concentric circles)."""
        cs = self.raw(self.t0)
        s = max(abs(a[0] - b[0]) for a, b in itertools.combinations(cs, 2))
        return s if s > 0 else max(r for _, r in cs)

    @classmethod
    def linear(
        cls,
        circles: Sequence[Circle],
        velocities: Sequence[tuple],
        t0: float,
        t1: float,
        samples: int = 200,
        twists=None,
        name: str = "",
    ) -> "CircleFamily":
        """Centers and radii moving linearly: ``velocities[k] = (dcx, dcy, dr)`` per unit of ``t``."""
        base = [(complex(c.center), float(c.radius)) for c in circles]
        vel = [(complex(v[0], v[1]), float(v[2])) for v in velocities]
        if len(vel) != len(base):
            raise ValueError("one velocity per circle")
        origin = float(t0)

        def evaluator(t):
            s = t - origin
            return [(c + s * dc, max(r + s * dr, 0.0)) for (c, r), (dc, dr) in zip(base, vel)]

        fam = cls(evaluator, t0, t1, samples, twists, name)
        fam.base, fam.velocities = base, vel
        return fam


@dataclass(frozen=True)
class SingularityEvent:
    kind: SingularityKind
    t_star: float
    witness: tuple
    gap_at_t_star: float

    def lines(self) -> list:
        return [
            f"kind={self.kind.value}",
            f"t_star={self.t_star:.6f}",
            "witness=" + ",".join(str(k) for k in self.witness),
            f"gap_at_t_star={self.gap_at_t_star:.6e}",
        ]


_FIELDS = ("min_pair_gap", "min_radius", "min_circle_hausdorff")


def _profile(family: CircleFamily, t: float) -> GapProfile:
    return gap_profile(family.raw(t))


def _crossed(p: GapProfile, thr: float) -> bool:
    return any(getattr(p, f) < thr for f in _FIELDS)


def _check_monotone(values: list, what: str, ts: list) -> None:
    for k in range(1, len(values)):
        if values[k] > values[k - 1] * (1 + 1e-12) + 1e-15:
            raise NonMonotoneFamily(
                f"{what} increases between t={ts[k - 1]:.6g} and t={ts[k]:.6g}; "
                "the scan needs diagnostics that only decrease before the singularity"
            )


def _dip(family, last3, a, b, thr, tol):
    """If a diagnostic has a local minimum between samples ``a`` and ``b`` that goes below
    ``thr``, a parameter where it is below ``thr``; otherwise None."""
    for f in _FIELDS:
        v0, v1, v2 = (getattr(q, f) for q in last3)
        if not (v1 < v0 and v1 <= v2):
            continue
        t, v = _golden_min(lambda t: getattr(_profile(family, t), f), a, b, 1e-3 * tol)
        if v < thr:
            return t
    return None


def _golden_min(f, a, b, width):
    """Golden-section minimum of a unimodal ``f`` on [a, b], bracket shrunk to ``width``."""
    r = (math.sqrt(5) - 1) / 2
    c, d = b - r * (b - a), a + r * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def first_singularity(family: CircleFamily, tol: float = 1e-9) -> SingularityEvent:
    """First parameter at which a diagnostic falls below ``tol * scale``.

    Scans the family at its sample points, then bisects the bracketing
    interval down to width ``tol``.  A diagnostic that dips between two
    samples (one with a local minimum at a sample) is minimized over the
    surrounding interval, so touching events are not stepped over.  The
    returned ``t_star`` is the right end of the final bracket, where the
    crossing has already happened.  When two diagnostics cross together the
    order tangency, degeneration, collapsing decides the kind.
    """
    if tol < 1e-10:
        raise ValueError("tol must be at least 1e-10")
    scale = family.scale
    thr = tol * scale
    ts = list(np.linspace(family.t0, family.t1, family.samples))
    profiles = []
    lo = hi = None
    for k, t in enumerate(ts):
        p = _profile(family, t)
        profiles.append(p)
        if _crossed(p, thr):
            lo, hi = (ts[k - 1] if k else t), t
            break
        if k >= 2:
            dip = _dip(family, profiles[-3:], ts[k - 2], t, thr, tol)
            if dip is not None:
                lo, hi = ts[k - 2], dip
                break
    if hi is None:
        p = profiles[-1]
        return SingularityEvent(SingularityKind.NONE, float(family.t1), (), float(min(getattr(p, f) for f in _FIELDS)))
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if _crossed(_profile(family, mid), thr):
            hi = mid
        else:
            lo = mid
    seen = [t for t in ts if t < hi]
    trace = [_profile(family, t) for t in seen]
    p = _profile(family, hi)
    seen.append(hi)
    trace.append(p)
    if p.min_pair_gap < thr:
        _check_monotone([q.min_pair_gap for q in trace], "min_pair_gap", seen)
        return SingularityEvent(SingularityKind.TANGENCY, float(hi), p.gap_pair, float(max(p.min_pair_gap, 0.0)))
    if p.min_radius < thr:
        _check_monotone([q.min_radius for q in trace], "min_radius", seen)
        k = p.radius_index
        cs = family.raw(hi)
        limit, rk = cs[k]
        # shrinking onto another circle: within a few of its own (vanishing) radii of it
        others = [abs(abs(limit - c) - r) for j, (c, r) in enumerate(cs) if j != k]
        near = min(others) < ON_CIRCLE_RADII * rk + thr
        kind = SingularityKind.DEGENERATION_ON_CIRCLE if near else SingularityKind.DEGENERATION_ISOLATED
        return SingularityEvent(kind, float(hi), (k,), float(max(p.min_radius, 0.0)))
    _check_monotone([q.min_circle_hausdorff for q in trace], "min_circle_hausdorff", seen)
    return SingularityEvent(SingularityKind.COLLAPSING, float(hi), p.hausdorff_pair, float(p.min_circle_hausdorff))


def neck_spec(group: MarkedSchottkyGroup, angle: Optional[float] = None) -> GeneratingCurveSpec:
    """Rank-one generating curve that crosses the gap between the two circles twice.

    Circle 0 gets ports at ``+-angle`` about the direction of circle 1; the
    ports of circle 1 are their images.  Both connectors run through the neck
    between the circles, so as the gap closes the curve pinches there.  The
    default angle is the current gap, capped at pi/4: the anchors then tend to
    the point of tangency.
    """
    if group.rank != 1:
        raise ValueError("neck_spec is for rank-one groups")
    c0, c1 = group.require_witness()
    u = c1.center - c0.center
    if angle is None:
        angle = min(abs(u) - c0.radius - c1.radius, math.pi / 4)
    if not 0 < angle < math.pi / 2:
        raise ValueError("angle must lie in (0, pi/2)")
    e = u / abs(u)
    p_in = c0.center + c0.radius * e * cmath.exp(-1j * angle)
    p_out = c0.center + c0.radius * e * cmath.exp(1j * angle)
    f = group.generators[0]
    ports = {0: (p_in, p_out), 1: (apply(f, p_out), apply(f, p_in))}
    return chain_spec(group, (0, 1), ports)


SpecArg = Union[None, GeneratingCurveSpec, Callable[[MarkedSchottkyGroup], GeneratingCurveSpec]]


def singular_curve_probe(
    family: CircleFamily,
    t_values: Sequence[float],
    spec: SpecArg = None,
    depth: int = 6,
    **kw,
) -> list:
    """Quasi-circle reports along the family, for watching the curve degenerate.

    ``spec`` may be a fixed generating curve, a function of the group at each
    ``t``, or None for the default curve.  Every ``t`` must give a verified
    classical configuration; the probe refuses to run past a singularity.
    """
    groups = []
    for t in t_values:
        try:
            g = family.group(t)
        except ValueError as exc:
            raise ValueError(f"t={t:g} is not a classical configuration: {exc}") from None
        rep = verify_classical(g)
        if not rep.ok:
            raise ValueError(f"t={t:g} is not a classical configuration: " + "; ".join(rep.violations))
        groups.append(g)
    out = []
    for g in groups:
        s = spec(g) if callable(spec) else spec
        out.append(build_quasicircle(g, s, depth=depth, **kw))
    return out
