"""Truncated quasi-circles built from generating curves.

A generating curve visits the 2g witness circles in a cyclic ``chain_order``.
Connector ``j`` runs through the fundamental region from the *out* port of
circle ``chain_order[j]`` to the *in* port of ``chain_order[j + 1]``.  Ports on
circle ``i + g`` must be the images under generator ``i`` of the ports on
circle ``i``; then the part of the invariant curve inside disk ``k`` is the
image, under the letter landing in ``k``, of everything outside the opposite
disk.  Truncating that recursion at word length ``depth`` and closing the
innermost disks with straight chords gives a closed polyline.

Curves may pass through infinity (configurations on a line close up through
``INF``).  In vertex arrays the point at infinity is stored as ``inf + 0j``.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from . import _kernels
from .group import (
    DEFAULT_WORD_BUDGET,
    MarkedSchottkyGroup,
    count_reduced_words,
    enumerate_words,
    verify_classical,
    word_levels,
)
from .dimension import poincare_partial_sums
from .moebius import INF, Circle, apply, fixed_points, map_circle

__all__ = [
    "MAX_VERTICES",
    "Piece",
    "GeneratingCurveSpec",
    "PolyCurve",
    "QuasiCircleReport",
    "JordanResult",
    "AngleReport",
    "NoSimpleChain",
    "AssemblyError",
    "default_generating_curve",
    "chain_spec",
    "samples_per_connector",
    "level_samples",
    "truncation_lengths",
    "build_quasicircle",
    "jordan_check",
    "invariance_residual",
    "linearity_and_angles",
    "LengthComparison",
    "length_comparability",
]

logger = logging.getLogger(__name__)

MAX_VERTICES = 2_000_000
BASE_SAMPLES = 64
PORT_TOL = 1e-8
REGION_TOL = 1e-9
ORTHO_TOL = 1e-3
SEPARATION = 0.125
PINCH_RESOLUTION = 1e-4
PINCH_VERTICES = 4000
_INF_C = complex(np.inf, 0.0)


class NoSimpleChain(ValueError):
    """No straight-segment chain through the fundamental region was found."""


class AssemblyError(ValueError):
    """The generating curve cannot be assembled into a closed invariant curve."""


# -- connector pieces -------------------------------------------------------


def _circumcircle(p, q, r):
    ax, ay, bx, by, cx, cy = p.real, p.imag, q.real, q.imag, r.real, r.imag
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-300:
        raise ValueError("arc points are collinear")
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    c = complex(ux, uy)
    return c, abs(p - c)


def _ccw_span(a0, a1):
    return (a1 - a0) % (2 * math.pi)


@dataclass(frozen=True)
class Piece:
    """One elementary part of a connector.

    kinds: ``segment``; ``arc`` (the circular arc from ``start`` through
    ``via`` to ``end``); ``line_via_infinity`` (the part of the line through
    ``start`` and ``end`` that leaves ``start`` away from ``end`` and comes
    back through infinity); ``witness_arc`` (an arc of witness circle
    ``circle``, counterclockwise when ``ccw``); ``polyline`` (free form, the
    given ``points`` between ``start`` and ``end``).
    """

    kind: str
    start: complex
    end: complex
    via: Optional[complex] = None
    circle: Optional[int] = None
    ccw: bool = True
    points: tuple = ()

    KINDS = ("segment", "arc", "line_via_infinity", "witness_arc", "polyline")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown connector kind {self.kind!r}")
        object.__setattr__(self, "start", complex(self.start))
        object.__setattr__(self, "end", complex(self.end))
        if self.kind == "arc" and self.via is None:
            raise ValueError("arc pieces need a via point")
        if self.kind == "witness_arc" and self.circle is None:
            raise ValueError("witness_arc pieces need a circle index")

    @property
    def linear(self) -> bool:
        return self.kind != "polyline"

    def _arc_geometry(self, circles):
        if self.kind == "witness_arc":
            c = circles[self.circle]
            a0 = cmath.phase(self.start - c.center)
            a1 = cmath.phase(self.end - c.center)
            span = _ccw_span(a0, a1) if self.ccw else -_ccw_span(a1, a0)
            return c.center, c.radius, a0, span
        center, rad = _circumcircle(self.start, complex(self.via), self.end)
        a0 = cmath.phase(self.start - center)
        av = cmath.phase(complex(self.via) - center)
        a1 = cmath.phase(self.end - center)
        ccw = _ccw_span(a0, av) < _ccw_span(a0, a1)
        span = _ccw_span(a0, a1) if ccw else -_ccw_span(a1, a0)
        return center, rad, a0, span

    def sample(self, n: int, circles=None) -> np.ndarray:
        n = max(2, int(n))
        u = np.linspace(0.0, 1.0, n)
        if self.kind == "segment":
            return self.start + u * (self.end - self.start)
        if self.kind in ("arc", "witness_arc"):
            center, rad, a0, span = self._arc_geometry(circles)
            z = center + rad * np.exp(1j * (a0 + u * span))
            z[0], z[-1] = self.start, self.end
            return z
        if self.kind == "line_via_infinity":
            L = abs(self.start - self.end)
            e = (self.start - self.end) / L
            half = max(1, (n - 1) // 2)
            u1 = np.linspace(0.0, 1.0, half, endpoint=False)
            out = [self.start + e * L * u1 / (1 - u1), np.array([_INF_C])]
            rest = n - half - 1
            u2 = np.linspace(0.0, 1.0, rest + 1)[1:]
            out.append(self.end - e * L * (1 - u2) / u2)
            z = np.concatenate(out)
            z[-1] = self.end
            return z
        pts = np.array([self.start, *[complex(p) for p in self.points], self.end])
        return pts

    def tangent(self, at_end: bool, circles=None) -> complex:
        """Unit direction of travel at ``start`` (or ``end``)."""
        if self.kind == "segment":
            v = self.end - self.start
        elif self.kind in ("arc", "witness_arc"):
            center, _, _, span = self._arc_geometry(circles)
            p = self.end if at_end else self.start
            v = 1j * (p - center) * (1 if span > 0 else -1)
        elif self.kind == "line_via_infinity":
            v = self.start - self.end
        else:
            pts = self.sample(0)
            v = pts[-1] - pts[-2] if at_end else pts[1] - pts[0]
        return v / abs(v)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "start": [self.start.real, self.start.imag], "end": [self.end.real, self.end.imag]}
        if self.via is not None:
            d["via"] = [complex(self.via).real, complex(self.via).imag]
        if self.circle is not None:
            d["circle"] = self.circle
            d["ccw"] = self.ccw
        if self.points:
            d["points"] = [[complex(p).real, complex(p).imag] for p in self.points]
        return d


def _sample_connector(pieces, n, circles):
    if len(pieces) == 1:
        return pieces[0].sample(n, circles)
    per = max(2, -(-(n + len(pieces) - 1) // len(pieces)))
    parts = [pieces[0].sample(per, circles)]
    for p in pieces[1:]:
        parts.append(p.sample(per, circles)[1:])
    return np.concatenate(parts)


# -- generating curve -------------------------------------------------------


@dataclass(frozen=True)
class GeneratingCurveSpec:
    """Chain order of the witness circles plus one connector per chain link."""

    chain_order: tuple
    connectors: tuple

    def __post_init__(self):
        order = tuple(int(k) for k in self.chain_order)
        conns = tuple(tuple(c) for c in self.connectors)
        if len(conns) != len(order):
            raise ValueError("need exactly one connector per chain link")
        for j, pieces in enumerate(conns):
            if not pieces:
                raise ValueError(f"connector {j} is empty")
            for a, b in zip(pieces, pieces[1:]):
                if abs(a.end - b.start) > 1e-12 * max(1.0, abs(a.end)):
                    raise ValueError(f"connector {j}: pieces are not contiguous")
        object.__setattr__(self, "chain_order", order)
        object.__setattr__(self, "connectors", conns)

    @property
    def ports(self) -> dict:
        """circle index -> (in port, out port)."""
        n = len(self.chain_order)
        out = {}
        for j, k in enumerate(self.chain_order):
            p_in = self.connectors[(j - 1) % n][-1].end
            p_out = self.connectors[j][0].start
            out[k] = (p_in, p_out)
        return out

    def anchors(self, group: MarkedSchottkyGroup) -> dict:
        """Port angles (radians) on each circle, keyed by circle index."""
        circles = group.require_witness()
        return {
            k: tuple(cmath.phase(p - circles[k].center) for p in pts) for k, pts in self.ports.items()
        }

    def problems(self, group: MarkedSchottkyGroup) -> list:
        """Every violated invariant, as readable strings (empty when valid)."""
        circles = group.require_witness()
        g = group.rank
        n = 2 * g
        issues = []
        if sorted(self.chain_order) != list(range(n)):
            return [f"chain order {self.chain_order} is not a permutation of the {n} circles"]
        ports = self.ports
        scale = group.scale
        for k, (p_in, p_out) in ports.items():
            c = circles[k]
            for name, p in (("in", p_in), ("out", p_out)):
                if abs(abs(p - c.center) - c.radius) > PORT_TOL * max(1.0, c.radius):
                    issues.append(f"{name} port of circle {k} is not on the circle")
            if abs(p_in - p_out) <= PORT_TOL * c.radius:
                issues.append(f"circle {k} has coincident ports")
        for i, gen in enumerate(group.generators):
            img = [apply(gen, p) for p in ports[i]]
            tgt = ports[i + g]
            ok = any(
                all(w is not INF and abs(w - t) <= PORT_TOL * max(1.0, scale) for w, t in zip(img, perm))
                for perm in (tgt, tgt[::-1])
            )
            if not ok:
                issues.append(f"ports of circle {i + g} are not the images of the ports of circle {i}")
        samples = [_sample_connector(c, BASE_SAMPLES, circles) for c in self.connectors]
        cen = np.array([c.center for c in circles])
        rad = np.array([c.radius for c in circles])
        for j, z in enumerate(samples):
            zf = z[np.isfinite(z)]
            depth_in = rad[None, :] - np.abs(zf[:, None] - cen[None, :])
            worst = depth_in.max() if depth_in.size else -np.inf
            if worst > REGION_TOL * max(1.0, rad.max()):
                issues.append(f"connector {j} enters an open witness disk (by {worst:.3e})")
        for a, b in itertools.combinations(range(len(samples)), 2):
            if _polylines_meet(samples[a], samples[b]):
                issues.append(f"connectors {a} and {b} intersect")
        return issues

    def validate(self, group: MarkedSchottkyGroup) -> None:
        issues = self.problems(group)
        if issues:
            raise AssemblyError("invalid generating curve: " + "; ".join(issues))

    def to_dict(self) -> dict:
        return {
            "chain_order": list(self.chain_order),
            "connectors": [[p.to_dict() for p in conn] for conn in self.connectors],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratingCurveSpec":
        allowed = {"chain_order", "connectors"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown keys in generating curve: {sorted(extra)}")
        piece_keys = {"kind", "start", "end", "via", "circle", "ccw", "points"}
        conns = []
        for conn in data["connectors"]:
            pieces = []
            for p in conn:
                bad = set(p) - piece_keys
                if bad:
                    raise ValueError(f"unknown keys in connector piece: {sorted(bad)}")
                pieces.append(
                    Piece(
                        kind=p["kind"],
                        start=complex(*p["start"]),
                        end=complex(*p["end"]),
                        via=complex(*p["via"]) if "via" in p else None,
                        circle=p.get("circle"),
                        ccw=p.get("ccw", True),
                        points=tuple(complex(*q) for q in p.get("points", ())),
                    )
                )
            conns.append(tuple(pieces))
        return cls(tuple(data["chain_order"]), tuple(conns))


def _seg_dist(p0, p1, q0, q1):
    """Vectorized distance between segments [p0, p1] and [q0, q1] (complex arrays)."""

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    def pt_seg(z, a, b):
        ab = b - a
        L2 = np.abs(ab) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(L2 > 0, ((z - a) * np.conj(ab)).real / np.where(L2 > 0, L2, 1), 0.0)
        t = np.clip(t, 0.0, 1.0)
        return np.abs(z - (a + t * ab))

    d1 = cross(p1 - p0, q0 - p0)
    d2 = cross(p1 - p0, q1 - p0)
    d3 = cross(q1 - q0, p0 - q0)
    d4 = cross(q1 - q0, p1 - q0)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    dist = np.minimum(
        np.minimum(pt_seg(p0, q0, q1), pt_seg(p1, q0, q1)),
        np.minimum(pt_seg(q0, p0, p1), pt_seg(q1, p0, p1)),
    )
    return np.where(proper, 0.0, dist)


def _finite_runs(z):
    """Split a sample array at infinite entries into finite polylines."""
    runs, cur = [], []
    for w in z:
        if np.isfinite(w):
            cur.append(w)
        else:
            if len(cur) > 1:
                runs.append(np.array(cur))
            cur = []
    if len(cur) > 1:
        runs.append(np.array(cur))
    return runs


def _polylines_meet(a, b) -> bool:
    for ra in _finite_runs(a):
        for rb in _finite_runs(b):
            d = _seg_dist(ra[:-1, None], ra[1:, None], rb[None, :-1], rb[None, 1:])
            if d.min() <= 0.0:
                return True
    return False


def _toward(ci: Circle, cj: Circle) -> complex:
    u = cj.center - ci.center
    return ci.center + ci.radius * u / abs(u)


def chain_spec(group: MarkedSchottkyGroup, order: Sequence[int], ports: dict, via_infinity: Sequence[int] = ()) -> GeneratingCurveSpec:
    """Straight connectors for a chain order with explicit ``{circle: (in, out)}`` ports.

    Links listed in ``via_infinity`` (by position in the chain) close up
    through the point at infinity instead of running straight.
    """
    n = len(order)
    conns = []
    for j in range(n):
        a, b = order[j], order[(j + 1) % n]
        kind = "line_via_infinity" if j in via_infinity else "segment"
        conns.append((Piece(kind, ports[a][1], ports[b][0]),))
    return GeneratingCurveSpec(tuple(order), tuple(conns))


def _rank_one_curve(group: MarkedSchottkyGroup) -> GeneratingCurveSpec:
    circles = group.require_witness()
    gen = group.generators[0]
    f1, f2 = fixed_points(gen)
    if f1 is INF or f2 is INF:
        raise NoSimpleChain("a fixed point at infinity; conjugate the group first")
    m, rho = 0.5 * (f1 + f2), 0.5 * abs(f1 - f2)
    axis = (f2 - f1) / abs(f2 - f1)

    def meet(c: Circle):
        # intersections of |z - m| = rho with circle c
        d = abs(c.center - m)
        a = (rho * rho - c.radius**2 + d * d) / (2 * d)
        h2 = rho * rho - a * a
        if h2 <= 0:
            raise NoSimpleChain("the circle through the fixed points misses a witness circle")
        u = (c.center - m) / d
        base = m + a * u
        pts = [base + 1j * u * math.sqrt(h2), base - 1j * u * math.sqrt(h2)]
        # label by side of the fixed-point axis: (upper, lower)
        pts.sort(key=lambda z: -((z - m) / axis).imag)
        return pts

    up0, lo0 = meet(circles[0])
    up1, lo1 = gen(up0), gen(lo0)
    if ((up1 - m) / axis).imag < ((lo1 - m) / axis).imag:
        up1, lo1 = lo1, up1

    def via(p, q, side):
        a0, a1 = cmath.phase(p - m), cmath.phase(q - m)
        mid = cmath.exp(1j * 0.5 * (a0 + a1))
        cand = [m + rho * mid, m - rho * mid]
        return max(cand, key=lambda z: side * ((z - m) / axis).imag)

    conns = (
        (Piece("arc", up0, up1, via=via(up0, up1, 1)),),
        (Piece("arc", lo1, lo0, via=via(lo1, lo0, -1)),),
    )
    return GeneratingCurveSpec((0, 1), conns)


def _chain_order(circles) -> tuple:
    cen = np.array([c.center for c in circles])
    centroid = cen.mean()
    rel = cen - centroid
    span = np.abs(rel).max()
    # collinear centers: order along the line, close through infinity
    k0 = int(np.argmax(np.abs(rel)))
    axis = rel[k0] / abs(rel[k0])
    if np.all(np.abs((rel / axis).imag) <= 1e-12 * span):
        t = (rel / axis).real
        return tuple(int(k) for k in np.argsort(t, kind="stable")), True, axis
    ang = np.angle(rel)
    order = sorted(range(len(circles)), key=lambda k: (round(float(ang[k]), 12), abs(rel[k])))
    return tuple(order), False, None


def default_generating_curve(group: MarkedSchottkyGroup) -> GeneratingCurveSpec:
    """Straight-segment chain through the fundamental region.

    The chain visits circles by angle about the centroid of the centers
    (along the line, closing through infinity, when the centers are
    collinear).  For each pair, the ports of one circle are the points
    nearest its chain neighbours and the other circle gets their images;
    every choice of which circle leads is tried and the shortest valid system
    wins.  Rank one uses the two arcs of the circle on the segment between
    the generator's fixed points.
    """
    report = verify_classical(group)
    if not report.ok:
        raise ValueError("group is not a verified classical Schottky group")
    if group.rank == 1:
        spec = _rank_one_curve(group)
        spec.validate(group)
        return spec
    circles = group.circles
    g = group.rank
    n = 2 * g
    order, collinear, axis = _chain_order(circles)
    pos = {k: j for j, k in enumerate(order)}

    def natural(k):
        j = pos[k]
        prev, nxt = order[(j - 1) % n], order[(j + 1) % n]
        c = circles[k]
        if collinear and j == 0:
            p_in = c.center - c.radius * axis
        else:
            p_in = _toward(c, circles[prev])
        if collinear and j == n - 1:
            p_out = c.center + c.radius * axis
        else:
            p_out = _toward(c, circles[nxt])
        return p_in, p_out

    via = (n - 1,) if collinear else ()
    best, best_len, last_issue = None, math.inf, "no candidate"
    for leads in itertools.product((0, 1), repeat=g):
        ports = {}
        for i in range(g):
            lead, follow = (i, i + g) if leads[i] == 0 else (i + g, i)
            m = group.generators[i] if leads[i] == 0 else group.generators[i].inverse()
            p_in, p_out = natural(lead)
            ports[lead] = (p_in, p_out)
            imgs = [apply(m, p_in), apply(m, p_out)]
            nat_in, _ = natural(follow)
            imgs.sort(key=lambda z: abs(z - nat_in))
            ports[follow] = (imgs[0], imgs[1])
        spec = chain_spec(group, order, ports, via)
        issues = spec.problems(group)
        if issues:
            last_issue = issues[0]
            continue
        total = sum(abs(c[0].start - c[-1].end) for c in spec.connectors if c[0].kind == "segment")
        if total < best_len:
            best, best_len = spec, total
    if best is None:
        raise NoSimpleChain(f"no simple chain: {last_issue}; supply a manual generating curve")
    return best


# -- curves -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PolyCurve:
    """Closed polyline; vertex ``i`` joins vertex ``i + 1`` and the last joins the first.

    ``level`` and ``first`` optionally record, per vertex, the word length of
    the connector copy it came from and the witness disk that copy sits in
    (``-1`` for the generating curve itself); ``chord`` marks vertices whose
    outgoing segment is a closing chord.
    """

    vertices: np.ndarray
    depth: Optional[int] = None
    level: Optional[np.ndarray] = None
    first: Optional[np.ndarray] = None
    chord: Optional[np.ndarray] = None
    length: float = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex)
        if v.ndim != 1 or len(v) < 3:
            raise ValueError("a closed curve needs at least 3 vertices")
        if np.isnan(v).any():
            raise ValueError("vertices contain NaN")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "length", _closed_length(v))

    def __len__(self):
        return len(self.vertices)

    @property
    def through_infinity(self) -> bool:
        return bool(np.isinf(self.vertices).any())

    @property
    def finite_vertices(self) -> np.ndarray:
        return self.vertices[np.isfinite(self.vertices)]

    @property
    def diameter(self) -> float:
        return _diameter(self.finite_vertices)

    def mapped(self, f) -> "PolyCurve":
        """Image under a Moebius map (vertex-wise)."""
        z = np.array([_to_c(apply(f, _from_c(w))) for w in self.vertices])
        return PolyCurve(z, depth=self.depth, level=self.level, first=self.first, chord=self.chord)


def _to_c(w):
    return _INF_C if w is INF else complex(w)


def _from_c(z):
    return INF if not np.isfinite(z) else complex(z)


def _closed_length(v: np.ndarray) -> float:
    if not np.isfinite(v).all():
        return math.inf
    return float(np.abs(np.diff(np.append(v, v[0]))).sum())


def _diameter(z: np.ndarray) -> float:
    z = np.unique(z)
    if len(z) < 2:
        return 0.0
    if len(z) > 3:
        try:
            hull = ConvexHull(np.column_stack([z.real, z.imag]))
            z = z[hull.vertices]
        except QhullError:
            pass
    if len(z) > 4000:
        z = z[np.linspace(0, len(z) - 1, 4000).astype(int)]
    return float(np.abs(z[:, None] - z[None, :]).max())


# -- assembly ---------------------------------------------------------------


def level_samples(level: int) -> int:
    """Samples per connector copy at word length ``level``: 64 up to 6, halved per extra level, at least 2."""
    return BASE_SAMPLES if level <= 6 else max(2, BASE_SAMPLES >> (level - 6))


def samples_per_connector(rank: int, depth: int, cap: int = MAX_VERTICES) -> list:
    """Per-level sample counts for a depth-``depth`` curve with at most ``cap`` vertices.

    Starts from :func:`level_samples` and, while the total is over ``cap``,
    halves the count of the deepest level that still has more than 2.
    """
    n = [level_samples(L) for L in range(depth + 1)]
    words = [count_reduced_words(rank, L) for L in range(depth + 1)]

    def total():
        return sum(w * 2 * rank * (k - 1) for w, k in zip(words, n))

    while total() > cap:
        deep = [L for L in range(depth, -1, -1) if n[L] > 2]
        if not deep:
            raise ValueError(f"depth {depth} needs more than {cap} vertices even at 2 samples per connector")
        n[deep[0]] //= 2
    return n


def _images(a, b, c, d, z):
    """Images of the sample row ``z`` under every map (rows), infinity handled."""
    z = np.asarray(z)
    fin = np.isfinite(z)
    zz = np.where(fin, z, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (a[:, None] * zz[None, :] + b[:, None]) / (c[:, None] * zz[None, :] + d[:, None])
        if not fin.all():
            at_inf = np.where(c != 0, a / np.where(c != 0, c, 1), np.inf)
            out[:, ~fin] = at_inf[:, None]
    return out


def _flips(group, spec):
    """For each disk k, whether the image of the opposite arc runs out -> in."""
    g = group.rank
    n = 2 * g
    ports = spec.ports
    maps = group.letter_maps
    scale = max(1.0, group.scale)
    flips = {}
    for k in range(n):
        opp = (k + g) % n
        letter = opp  # the letter landing in disk k
        start = apply(maps[letter], ports[opp][1])
        p_in, p_out = ports[k]
        if abs(start - p_in) <= PORT_TOL * scale:
            flips[k] = False
        elif abs(start - p_out) <= PORT_TOL * scale:
            flips[k] = True
        else:
            word = "abcdefghijklmnopqrstuvwxyz"[letter] if letter < g else "ABCDEFGHIJKLMNOPQRSTUVWXYZ"[letter - g]
            raise AssemblyError(f"word {word!r} does not carry the ports of circle {opp} onto circle {k}")
    return flips


def _traverse(group, spec, depth, last_letters):
    """Order in which connector copies are visited.

    Returns arrays (level, word index, connector, reversed, chord_after).
    """
    g = group.rank
    n = 2 * g
    order = spec.chain_order
    pos = {k: j for j, k in enumerate(order)}
    flips = _flips(group, spec)
    rows = []
    append = rows.append

    def child(L, w, x):
        if L == 0:
            return x
        forbidden = (last_letters[L][w] + g) % n
        return w * (n - 1) + (x if x < forbidden else x - 1)

    def walk(L, w, skip, rev):
        if skip is None:
            items = [("c", 0)]
            for j in range(1, n):
                items += [("i", j), ("c", j)]
            items.append(("i", 0))
        else:
            items = [("c", skip)]
            for t in range(1, n):
                items += [("i", (skip + t) % n), ("c", (skip + t) % n)]
        if rev:
            items = items[::-1]
        last = len(items) - 1
        for idx, (kind, j) in enumerate(items):
            if kind == "c":
                append((L, w, j, rev, L == depth and idx < last))
            elif L < depth:
                k = order[j]
                x = (k + g) % n
                walk(L + 1, child(L, w, x), pos[x], rev ^ flips[k])

    walk(0, 0, None, False)
    return np.array(rows, dtype=np.int64).reshape(-1, 5)


def _level_arrays(group, depth, budget=DEFAULT_WORD_BUDGET):
    levels = list(word_levels(group, depth, budget))
    g = group.rank
    firsts = [np.array([-1])]
    for L in range(1, depth + 1):
        lv = levels[L]
        if L == 1:
            firsts.append((lv.last + g) % (2 * g))
        else:
            firsts.append(firsts[L - 1][lv.parent])
    return levels, firsts


def _connector_samples(spec, n, circles):
    return [_sample_connector(c, n, circles) for c in spec.connectors]


def _port_arrays(group, spec):
    ports = spec.ports
    n = 2 * group.rank
    p_in = np.array([ports[k][0] for k in range(n)])
    p_out = np.array([ports[k][1] for k in range(n)])
    return p_in, p_out


def _image_gaps(c, d, z0, z1):
    """|w(z1) - w(z0)| for det-one maps with bottom rows (c, d), one row per map.

    Uses w(z1) - w(z0) = (z1 - z0) / ((c z0 + d)(c z1 + d)), which stays
    accurate long after the image points themselves agree to machine
    precision.  Either endpoint may be infinite.
    """
    z0 = np.asarray(z0)
    z1 = np.asarray(z1)
    f0, f1 = np.isfinite(z0), np.isfinite(z1)
    u0, u1 = np.where(f0, z0, 0), np.where(f1, z1, 0)
    c = np.asarray(c)[:, None]
    d = np.asarray(d)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        q0 = np.where(f0, c * u0 + d, c)
        q1 = np.where(f1, c * u1 + d, c)
        num = np.where(f0 & f1, np.abs(u1 - u0), 1.0)
        out = num / np.abs(q0 * q1)
    out[:, ~(f0 | f1)] = 0.0
    return out


def _chord_total(group, spec, lv):
    """Total chord length closing the innermost disks of words in ``lv``."""
    p_in, p_out = _port_arrays(group, spec)
    if lv.length == 0:
        return float(np.abs(p_in - p_out).sum())
    chords = _image_gaps(lv.c, lv.d, p_in, p_out)
    # the arc of a word ending in letter x skips disk x
    chords[np.arange(len(lv)), lv.last] = 0.0
    return float(chords.sum())


def truncation_lengths(
    group: MarkedSchottkyGroup,
    spec: GeneratingCurveSpec,
    depth: int,
    samples=None,
    chunk: int = 200_000,
):
    """Lengths of the depth-1..``depth`` truncations, their chord parts, and copy lengths per level.

    Uses one sampling density for every depth, so differences between
    consecutive entries come from new connector copies and chords only.
    ``copies[n]`` is the summed length of the images of the generating curve
    under words of length exactly ``n`` (``n = 0..depth``).  Works in chunks
    and never assembles vertices.
    """
    circles = group.require_witness()
    if samples is None:
        samples = [level_samples(L) for L in range(depth + 1)]
    elif isinstance(samples, int):
        samples = [samples] * (depth + 1)
    Zs = {n: _connector_samples(spec, n, circles) for n in set(samples)}
    copy_total = []
    chord_total = []
    for lv in word_levels(group, depth):
        Z = Zs[samples[lv.length]]
        tot = 0.0
        chord = 0.0
        for s in range(0, len(lv), chunk):
            a, b, c, d = lv.a[s:s + chunk], lv.b[s:s + chunk], lv.c[s:s + chunk], lv.d[s:s + chunk]
            for z in Z:
                if lv.length == 0:
                    seg = np.abs(np.diff(z))
                else:
                    seg = _image_gaps(c, d, z[:-1], z[1:])
                tot += float(seg.sum()) if np.isfinite(seg).all() else math.inf
            sub = type(lv)(lv.length, lv.last[s:s + chunk], a, b, c, d, lv.parent[s:s + chunk])
            chord += _chord_total(group, spec, sub)
        copy_total.append(tot)
        chord_total.append(chord)
    lengths, chords = [], []
    running = copy_total[0]
    for m in range(1, depth + 1):
        running += copy_total[m]
        lengths.append(running + chord_total[m])
        chords.append(chord_total[m])
    return lengths, chords, copy_total


@dataclass
class JordanResult:
    ok: bool
    min_self_distance: float
    location: Optional[complex] = None
    threshold: float = 0.0

    def __bool__(self):
        return self.ok


@dataclass
class AngleReport:
    linear: bool
    transverse: bool
    parallel_arcs: int
    worst_angle_deviation: float


@dataclass
class QuasiCircleReport:
    curve: PolyCurve
    depth: int
    jordan_ok: bool
    min_self_distance: float
    invariance_residual: float
    linear: bool
    transverse: bool
    parallel_arcs: int
    worst_angle_deviation: float
    length_by_depth: list
    chord_length_by_depth: list
    copy_length_by_level: list
    samples_per_connector: list

    def __post_init__(self):
        if self.jordan_ok and not self.min_self_distance > 0:
            raise ValueError("jordan_ok requires a positive minimal self-distance")

    def lines(self) -> list:
        return [
            f"depth={self.depth}",
            f"vertices={len(self.curve)}",
            f"length={self.curve.length:.9g}",
            f"jordan_ok={str(self.jordan_ok).lower()}",
            f"min_self_distance={self.min_self_distance:.6e}",
            f"invariance_residual={self.invariance_residual:.6e}",
            f"linear={str(self.linear).lower()}",
            f"transverse={str(self.transverse).lower()}",
            f"parallel_arcs={self.parallel_arcs}",
            f"worst_angle_deviation={self.worst_angle_deviation:.6e}",
            "length_by_depth=" + ",".join(f"{x:.9g}" for x in self.length_by_depth),
        ]


def assemble_curve(group: MarkedSchottkyGroup, spec: GeneratingCurveSpec, depth: int, samples) -> PolyCurve:
    """The depth-``depth`` truncation as a single closed polyline."""
    circles = group.require_witness()
    levels, firsts = _level_arrays(group, depth)
    last_letters = [lv.last for lv in levels]
    rows = _traverse(group, spec, depth, last_letters)
    if isinstance(samples, int):
        samples = [samples] * (depth + 1)
    Zs = [_connector_samples(spec, samples[L], circles) for L in range(depth + 1)]
    # images per level and connector: arrays (words, samples)
    imgs = []
    for L, lv in enumerate(levels):
        imgs.append([z[None, :] if L == 0 else _images(lv.a, lv.b, lv.c, lv.d, z) for z in Zs[L]])
    L_, W_, J_, R_, C_ = rows.T
    counts = np.array([[len(z) for z in Z] for Z in Zs])
    sizes = counts[L_, J_] - 1 + C_
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    verts = np.empty(total, dtype=complex)
    lev = np.empty(total, dtype=np.int16)
    fst = np.empty(total, dtype=np.int16)
    chd = np.zeros(total, dtype=bool)
    for L in range(depth + 1):
        for j in range(len(Zs[L])):
            for rev in (0, 1):
                for chord in (0, 1):
                    sel = np.nonzero((L_ == L) & (J_ == j) & (R_ == rev) & (C_ == chord))[0]
                    if not len(sel):
                        continue
                    block = imgs[L][j][W_[sel]]
                    if rev:
                        block = block[:, ::-1]
                    if not chord:
                        block = block[:, :-1]
                    idx = offsets[sel][:, None] + np.arange(block.shape[1])[None, :]
                    verts[idx] = block
                    lev[idx] = L
                    fst[idx] = firsts[L][W_[sel]][:, None]
                    if chord:
                        chd[idx[:, -1]] = True
    return PolyCurve(verts, depth=depth, level=lev, first=fst, chord=chd)


def build_quasicircle(
    group: MarkedSchottkyGroup,
    spec: Optional[GeneratingCurveSpec] = None,
    depth: int = 6,
    residual_samples: int = 4096,
    cap: int = MAX_VERTICES,
) -> QuasiCircleReport:
    """Truncated invariant curve through the orbit of the generating curve."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    report = verify_classical(group)
    if not report.ok:
        raise ValueError("group is not a verified classical Schottky group: " + "; ".join(report.violations))
    if spec is None:
        spec = default_generating_curve(group)
    spec.validate(group)
    _flips(group, spec)  # combinatorial check before any geometry
    n = samples_per_connector(group.rank, depth, cap)
    curve = assemble_curve(group, spec, depth, n)
    lengths, chords, copies = truncation_lengths(group, spec, depth)
    jr = jordan_check(curve)
    res = invariance_residual(curve, group, residual_samples)
    ang = linearity_and_angles(curve, group, spec)
    return QuasiCircleReport(
        curve=curve,
        depth=depth,
        jordan_ok=jr.ok,
        min_self_distance=jr.min_self_distance,
        invariance_residual=res,
        linear=ang.linear,
        transverse=ang.transverse,
        parallel_arcs=ang.parallel_arcs,
        worst_angle_deviation=ang.worst_angle_deviation,
        length_by_depth=lengths,
        chord_length_by_depth=chords,
        copy_length_by_level=copies,
        samples_per_connector=n,
    )


# -- validators -------------------------------------------------------------


def _chart(z: np.ndarray) -> np.ndarray:
    """Move a curve through infinity into a bounded chart ``w = 1/(z - z*)``."""
    fin = z[np.isfinite(z)]
    centroid = fin.mean()
    spread = max(float(np.abs(fin - centroid).max()), 1e-300)
    best, best_d = None, -1.0
    for k in range(8):
        for rad in (0.25, 0.5, 1.0):
            cand = centroid + rad * spread * cmath.exp(1j * (math.pi / 8 + k * math.pi / 4))
            d = float(np.abs(fin - cand).min())
            if d > best_d:
                best, best_d = cand, d
    with np.errstate(divide="ignore", invalid="ignore"):
        w = 1.0 / (z - best)
    w[~np.isfinite(z)] = 0.0
    return w


def _subdivide(s0, s1, spacing):
    """Points along segments ``s0[i] -> s1[i]`` at most ``spacing`` apart, with owner ids."""
    seg = s1 - s0
    k = np.maximum(1, np.ceil(np.abs(seg) / spacing).astype(np.int64))
    owner = np.repeat(np.arange(len(s0)), k)
    starts = np.concatenate([[0], np.cumsum(k)[:-1]])
    frac = (np.arange(owner.size) - starts[owner]) / k[owner]
    return s0[owner] + frac * seg[owner], owner


def _segments(v):
    """Finite segments of a closed polyline (those touching infinity dropped)."""
    s0, s1 = v, np.roll(v, -1)
    ok = np.isfinite(s0) & np.isfinite(s1)
    return s0[ok], s1[ok]


def _rays(v):
    """Rays standing in for the pieces through infinity.

    A vertex pattern ``p, inf, q`` is the line through ``p`` and ``q`` minus
    the segment between them: one ray leaves ``p`` away from ``q`` and one
    arrives at ``q`` from the far side.  Returns (origins, unit directions).
    """
    n = len(v)
    org, dirs = [], []
    for k in np.nonzero(~np.isfinite(v))[0]:
        p, q = v[(k - 1) % n], v[(k + 1) % n]
        if not (np.isfinite(p) and np.isfinite(q)) or p == q:
            continue
        u = (p - q) / abs(p - q)
        org += [p, q]
        dirs += [u, -u]
    return np.array(org, dtype=complex), np.array(dirs, dtype=complex)


def _distance_to_rays(q, org, dirs):
    t = np.maximum(0.0, ((q[:, None] - org[None, :]) * np.conj(dirs[None, :])).real)
    return np.abs(q[:, None] - (org[None, :] + t * dirs[None, :])).min(axis=1)


def _distance_to_segments(q, s0, s1, max_points=2_000_000):
    """Distance from each point of ``q`` to the union of segments (exact up to candidate search)."""
    seglen = np.abs(s1 - s0)
    spacing = max(float(np.percentile(seglen, 90)), float(seglen.sum()) / max_points, 1e-300)
    pts, owner = _subdivide(s0, s1, spacing)
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    k = min(16, len(pts))
    _, nn = tree.query(np.column_stack([q.real, q.imag]), k=k)
    seg = owner[nn.reshape(len(q), k)]
    d = _seg_dist(q[:, None], q[:, None], s0[seg], s1[seg])
    return d.min(axis=1)


def _pinch(v: np.ndarray, diam: float) -> Optional[tuple]:
    """Closest approach between parts of the curve that are far apart along it.

    The curve is decimated to about ``PINCH_VERTICES`` vertices.  A pair of
    segments counts when the shorter stretch of curve between them is at
    least ``SEPARATION`` of the total length, so neighbours along the curve
    and small self-similar copies never qualify, while a narrow neck
    between distant parts of the curve does.
    Returns (distance, location) or None when no pair qualifies.
    """
    seg = np.abs(np.roll(v, -1) - v)
    total = float(seg.sum())
    h = max(PINCH_RESOLUTION * diam, total / PINCH_VERTICES)
    w = v[_kernels.decimate(v.real.copy(), v.imag.copy(), h)]
    n = len(w)
    if n < 4:
        return None
    q0, q1 = w, np.roll(w, -1)
    cum = np.concatenate([[0.0], np.cumsum(np.abs(q1 - q0))])
    length = cum[-1]
    best = (math.inf, None)
    i_all, j_all = np.triu_indices(n, 2)
    keep = (j_all - i_all) != n - 1
    i_all, j_all = i_all[keep], j_all[keep]
    for s0 in range(0, len(i_all), 1_000_000):
        i, j = i_all[s0:s0 + 1_000_000], j_all[s0:s0 + 1_000_000]
        d = _seg_dist(q0[i], q1[i], q0[j], q1[j])
        sep = np.minimum(cum[j] - cum[i + 1], length - cum[j + 1] + cum[i])
        ok = sep >= SEPARATION * length
        if ok.any():
            k = np.nonzero(ok)[0][np.argmin(d[ok])]
            if d[k] < best[0]:
                best = (float(d[k]), complex(0.5 * (q0[i[k]] + q0[j[k]])))
    return None if best[1] is None else best


def jordan_check(curve: PolyCurve, resolution: float = 1e-6, rel_tol: float = 1e-7) -> JordanResult:
    """Simplicity test plus the curve's minimal self-distance.

    Vertices closer than ``resolution * diameter`` to their predecessor are
    merged, and ``ok`` holds iff every pair of non-adjacent segments is more
    than ``rel_tol * diameter`` apart.  The reported ``min_self_distance`` is
    the closest approach of parts of the curve that are far apart along it
    (see :func:`_pinch`); if no such parts exist, as for convex curves, it is
    the plain non-adjacent segment minimum.  Curves through infinity are
    checked in the chart ``1/(z - z*)`` for a point ``z*`` off the curve.
    """
    v = curve.vertices
    if len(v) < 4:
        raise ValueError("jordan_check needs at least 4 vertices")
    if curve.through_infinity:
        v = _chart(v)
    diam = _diameter(v)
    if diam == 0:
        return JordanResult(False, 0.0, complex(v[0]), 0.0)
    keep = _kernels.decimate(v.real.copy(), v.imag.copy(), resolution * diam)
    v = v[keep]
    thr = rel_tol * diam
    dmin, loc = _nonadjacent_min(v, diam)
    if dmin <= thr:
        return JordanResult(False, dmin, loc, thr)
    pinch = _pinch(v, diam)
    if pinch is not None and pinch[0] < math.inf:
        return JordanResult(True, max(pinch[0], dmin), pinch[1], thr)
    return JordanResult(True, dmin, loc, thr)


def _nonadjacent_min(v: np.ndarray, diam: float) -> tuple:
    """Minimal distance between non-adjacent segments of a closed polyline, with its location."""
    n = len(v)
    if n < 4:
        return (diam if n == 3 else 0.0), None
    p0, p1 = v, np.roll(v, -1)
    seglen = np.abs(p1 - p0)
    if n <= 3000:
        i, j = np.triu_indices(n, 2)
        adj = (j - i) % n == n - 1
        i, j = i[~adj], j[~adj]
        d = _seg_dist(p0[i], p1[i], p0[j], p1[j])
    else:
        spacing = max(float(np.median(seglen)), _spacing_floor(seglen))
        pts, owner = _subdivide(p0, p1, spacing)
        tree = cKDTree(np.column_stack([pts.real, pts.imag]))
        r = 2 * spacing
        while True:
            pairs = tree.query_pairs(r, output_type="ndarray")
            i, j = owner[pairs[:, 0]], owner[pairs[:, 1]]
            gap = np.abs(i - j)
            ok = (gap > 1) & (gap < n - 1)
            i, j = i[ok], j[ok]
            if len(i):
                key = np.unique(np.minimum(i, j) * n + np.maximum(i, j))
                i, j = key // n, key % n
                d = _seg_dist(p0[i], p1[i], p0[j], p1[j])
                if d.min() <= r - spacing:
                    break
            if r > 4 * diam:
                d = np.array([diam])
                i = j = np.array([0])
                break
            r *= 2
    best = int(np.argmin(d))
    dmin = float(d[best])
    a, b = int(i[best]), int(j[best])
    loc = complex(0.5 * (p0[a] + p1[a]) if dmin > 0 else _closest_on(p0[a], p1[a], p0[b], p1[b]))
    return dmin, loc


def _spacing_floor(seglen) -> float:
    return float(seglen.sum()) / 2_000_000


def _closest_on(p0, p1, q0, q1):
    # intersection point of two crossing segments
    d1, d2 = p1 - p0, q1 - q0
    den = d1.real * d2.imag - d1.imag * d2.real
    if den == 0:
        return p0
    t = ((q0 - p0).real * d2.imag - (q0 - p0).imag * d2.real) / den
    return p0 + t * d1


def _address_depth(z, group, cap):
    """How many nested witness disks contain each point (up to ``cap``)."""
    circles = group.require_witness()
    g = group.rank
    n = 2 * g
    cen = np.array([c.center for c in circles])
    rad = np.array([c.radius for c in circles])
    maps = group.letter_maps
    inv = [maps[(k + g) % n].inverse() for k in range(n)]  # undoes the letter landing in k
    ia = np.array([m.a for m in inv])
    ib = np.array([m.b for m in inv])
    ic = np.array([m.c for m in inv])
    id_ = np.array([m.d for m in inv])
    z = np.array(z, dtype=complex)
    depth = np.zeros(len(z), dtype=np.int64)
    alive = np.isfinite(z)
    for _ in range(cap):
        idx = np.nonzero(alive)[0]
        if not len(idx):
            break
        inside = np.abs(z[idx, None] - cen[None, :]) < rad[None, :] * (1 - 1e-12)
        hit = inside.any(axis=1)
        k = np.argmax(inside, axis=1)
        alive[idx[~hit]] = False
        idx, k = idx[hit], k[hit]
        depth[idx] += 1
        zz = z[idx]
        z[idx] = (ia[k] * zz + ib[k]) / (ic[k] * zz + id_[k])
    return depth


def invariance_residual(curve: PolyCurve, group: MarkedSchottkyGroup, sample_count: int = 4096) -> float:
    """Worst distance from generator images of curve points back to the curve, over the diameter.

    Sample points are ``sample_count`` evenly spaced vertices plus up to
    ``sample_count`` midpoints of closing chords (of all segments when the
    curve carries no chord marks).  An image is only scored when it lands
    outside every nested disk one level deeper than the truncation, where the
    polyline is still an honest approximation of the invariant curve.
    For a curve through infinity the two pieces meeting there count as rays,
    and images farther than one diameter from the finite part are skipped.
    """
    if sample_count < 16:
        raise ValueError("sample_count must be at least 16")
    v = curve.vertices
    n = len(v)
    idx = np.unique(np.linspace(0, n - 1, min(sample_count, n)).astype(np.int64))
    cidx = np.nonzero(curve.chord)[0] if curve.chord is not None else np.arange(n)
    if len(cidx) > sample_count:
        cidx = cidx[np.unique(np.linspace(0, len(cidx) - 1, sample_count).astype(np.int64))]
    pts = np.concatenate([v[idx], 0.5 * (v[cidx] + v[(cidx + 1) % n])])
    pts = pts[np.isfinite(pts)]
    depth = curve.depth if curve.depth is not None else 0
    diam = curve.diameter
    s0, s1 = _segments(v)
    org, dirs = _rays(v)
    fin = curve.finite_vertices
    centroid = fin.mean()
    worst = 0.0
    for gen in group.generators:
        with np.errstate(divide="ignore", invalid="ignore"):
            img = (gen.a * pts + gen.b) / (gen.c * pts + gen.d)
        img = img[np.isfinite(img)]
        if len(org):
            # images far out sit near infinity, where Euclidean distance is meaningless
            img = img[np.abs(img - centroid) <= diam]
        if curve.depth is not None:
            img = img[_address_depth(img, group, depth + 1) <= depth]
        if not len(img):
            continue
        d = _distance_to_segments(img, s0, s1)
        if len(org):
            d = np.minimum(d, _distance_to_rays(img, org, dirs))
        worst = max(worst, float(d.max()))
    return worst / diam if diam > 0 else 0.0


def _line_angle(u: complex, w: complex) -> float:
    """Angle in [0, pi/2] between the lines spanned by ``u`` and ``w``."""
    a = abs(cmath.phase(u / w)) % math.pi
    return min(a, math.pi - a)


def linearity_and_angles(
    curve: Optional[PolyCurve],
    group: MarkedSchottkyGroup,
    spec: GeneratingCurveSpec,
    image_depth: int = 2,
) -> AngleReport:
    """Shape checks of the generating curve at its anchors and their images.

    The deviation from a right angle is measured at every port and at the
    images of the ports under all words of length up to ``image_depth``,
    using finite differences of the mapped connector and the mapped witness
    circle, so it also exercises conformality of the maps.
    """
    circles = group.require_witness()
    linear = all(p.linear for conn in spec.connectors for p in conn)
    parallel = 0
    for conn in spec.connectors:
        on_circle = False
        for p in conn:
            if p.kind == "witness_arc":
                on_circle = True
                break
            z = p.sample(16, circles)
            z = z[np.isfinite(z)]
            for c in circles:
                if np.all(np.abs(np.abs(z - c.center) - c.radius) <= 1e-9 * c.radius):
                    on_circle = True
        parallel += on_circle
    n = len(spec.chain_order)
    anchors = []  # (point, tangent direction, circle index)
    for j, conn in enumerate(spec.connectors):
        a, b = spec.chain_order[j], spec.chain_order[(j + 1) % n]
        anchors.append((conn[0].start, conn[0].tangent(False, circles), a))
        anchors.append((conn[-1].end, conn[-1].tangent(True, circles), b))
    worst = 0.0
    for p, t, k in anchors:
        radial = p - circles[k].center
        worst = max(worst, abs(math.pi / 2 - _line_angle(t, 1j * radial)))
    top = worst
    for word, m in enumerate_words(group, image_depth):
        if not word:
            continue
        for p, t, k in anchors:
            try:
                img_c = map_circle(m, circles[k])
            except ValueError:
                continue
            # central difference along the connector direction
            eps = 1e-5 * circles[k].radius * t / abs(t)
            q, q1, q2 = apply(m, p), apply(m, p - eps), apply(m, p + eps)
            if q is INF or q1 is INF or q2 is INF:
                continue
            worst = max(worst, abs(math.pi / 2 - _line_angle(q2 - q1, 1j * (q - img_c.center))))
    transverse = top < ORTHO_TOL and parallel == 0
    return AngleReport(linear=linear, transverse=transverse, parallel_arcs=parallel, worst_angle_deviation=worst)


# -- length versus the Poincare series --------------------------------------


@dataclass
class LengthComparison:
    depths: list
    copy_lengths: list
    predicted: list
    ratios: list
    base_point: complex
    generating_length: float

    @property
    def spread(self) -> float:
        """max/min of the measured ratios."""
        return max(self.ratios) / min(self.ratios)

    def within(self, factor: float) -> bool:
        return all(1 / factor <= r <= factor for r in self.ratios)


def length_comparability(
    group: MarkedSchottkyGroup,
    spec: Optional[GeneratingCurveSpec] = None,
    depths: Sequence[int] = tuple(range(3, 9)),
    z0: Optional[complex] = None,
    samples: int = BASE_SAMPLES,
) -> LengthComparison:
    """Compare the length added at each word length with mu(zeta) * S_n(1).

    The measured quantity at length ``n`` is the total length of the images
    of the generating curve under words of length exactly ``n``.  The base
    point defaults to the middle sample of the first connector, a point of
    the closed fundamental region lying on the generating curve.
    """
    circles = group.require_witness()
    if spec is None:
        spec = default_generating_curve(group)
    depths = sorted(int(n) for n in depths)
    if not depths or depths[0] < 1:
        raise ValueError("depths must be positive word lengths")
    Z = _connector_samples(spec, samples, circles)
    mu = sum(float(np.abs(np.diff(z)).sum()) for z in Z)
    if not math.isfinite(mu):
        raise ValueError("generating curve passes through infinity; conjugate the group first")
    if z0 is None:
        z0 = complex(Z[0][len(Z[0]) // 2])
    _, _, copies = truncation_lengths(group, spec, depths[-1], samples)
    sums = poincare_partial_sums(group, 1.0, depths[-1], z0=z0)
    measured = [copies[n] for n in depths]
    predicted = [mu * sums[n - 1] for n in depths]
    ratios = [m / p for m, p in zip(measured, predicted)]
    return LengthComparison(depths, measured, predicted, ratios, complex(z0), mu)
