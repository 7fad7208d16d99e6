"""Moebius transformations of the extended complex plane.

Points are plain Python ``complex`` numbers; the point at infinity is the
module-level sentinel :data:`INF`.  Maps are stored as determinant-one
matrices ``[[a, b], [c, d]]``; the overall sign is irrelevant everywhere.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "INF",
    "Circle",
    "MoebiusMap",
    "MapKind",
    "IDENTITY",
    "compose",
    "inverse",
    "apply",
    "apply_array",
    "derivative",
    "fixed_points",
    "classify",
    "isometric_circle",
    "map_circle",
    "is_inf",
    "from_three_points",
]

DET_TOL = 1e-12
PARABOLIC_TOL = 1e-9


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(z) -> bool:
    return z is INF


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"circle radius must be positive and finite, got {self.radius!r}")
        c = complex(self.center)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError("circle center must be finite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    def point(self, angle: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * angle)

    def points(self, n: int) -> np.ndarray:
        t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return self.center + self.radius * np.exp(1j * t)

    def contains(self, z, tol: float = 0.0) -> bool:
        """True if ``z`` lies in the open disk (shrunk by ``tol``)."""
        if z is INF:
            return False
        return abs(z - self.center) < self.radius - tol


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (a z + b) / (c z + d) with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if det == 0 or not cmath.isfinite(det):
            raise ValueError("singular or non-finite Moebius matrix")
        # deviations within the rounding noise of ad - bc are left alone;
        # dividing by a cancellation-dominated det would add error, not remove it
        if abs(det - 1) > DET_TOL * max(1.0, abs(a * d) + abs(b * c)):
            s = cmath.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def trace(self) -> complex:
        return self.a + self.d

    @property
    def pole(self):
        """Preimage of infinity."""
        if self.c == 0:
            return INF
        return -self.d / self.c

    def __call__(self, z):
        return apply(self, z)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return compose(self, other)

    def inverse(self) -> "MoebiusMap":
        return inverse(self)

    def close_to(self, other: "MoebiusMap", tol: float = 1e-10) -> bool:
        """Entrywise comparison up to the sign ambiguity of SL(2, C)."""
        m1, m2 = self.matrix, other.matrix
        return bool(min(np.abs(m1 - m2).max(), np.abs(m1 + m2).max()) <= tol)

    @staticmethod
    def translation(t: complex) -> "MoebiusMap":
        return MoebiusMap(1, t, 0, 1)

    @staticmethod
    def dilation(k: complex) -> "MoebiusMap":
        s = cmath.sqrt(k)
        return MoebiusMap(s, 0, 0, 1 / s)


IDENTITY = MoebiusMap(1, 0, 0, 1)


def compose(f: MoebiusMap, g: MoebiusMap) -> MoebiusMap:
    """Return f o g, renormalized to determinant one."""
    return MoebiusMap(
        f.a * g.a + f.b * g.c,
        f.a * g.b + f.b * g.d,
        f.c * g.a + f.d * g.c,
        f.c * g.b + f.d * g.d,
    )


def inverse(f: MoebiusMap) -> MoebiusMap:
    return MoebiusMap(f.d, -f.b, -f.c, f.a)


def apply(f: MoebiusMap, z):
    if z is INF:
        if f.c == 0:
            return INF
        return f.a / f.c
    z = complex(z)
    den = f.c * z + f.d
    if den == 0:
        return INF
    return (f.a * z + f.b) / den


def apply_array(f: MoebiusMap, z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`apply` for finite points; poles map to complex inf."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (f.a * z + f.b) / (f.c * z + f.d)


def derivative(f: MoebiusMap, z) -> complex:
    if z is INF:
        raise ValueError("derivative at infinity is not defined in this chart")
    den = f.c * complex(z) + f.d
    if den == 0:
        raise ValueError(f"derivative requested at the pole {z!r}")
    return 1 / (den * den)


class MapKind(str, Enum):
    IDENTITY = "identity"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    LOXODROMIC = "loxodromic"


def classify(f: MoebiusMap, tol: float = PARABOLIC_TOL) -> MapKind:
    if abs(f.b) <= tol and abs(f.c) <= tol and abs(f.a - f.d) <= tol and abs(abs(f.a) - 1) <= tol:
        return MapKind.IDENTITY
    tr2 = f.trace**2
    if abs(tr2 - 4) <= tol:
        return MapKind.PARABOLIC
    if abs(tr2.imag) <= tol and -tol <= tr2.real < 4:
        return MapKind.ELLIPTIC
    return MapKind.LOXODROMIC


def _multiplier(f: MoebiusMap, z) -> float:
    # at infinity (c = 0) use the chart w = 1/z, where the multiplier is d/a
    if z is INF:
        return abs(f.d / f.a)
    return abs(derivative(f, z))


def fixed_points(f: MoebiusMap) -> tuple:
    """Fixed points of a non-identity map.

    Loxodromic maps return ``(attracting, repelling)``; parabolic maps return a
    one-tuple; elliptic maps return both points in no particular order.
    """
    kind = classify(f)
    if kind is MapKind.IDENTITY:
        raise ValueError("the identity fixes every point")
    a, b, c, d = f.a, f.b, f.c, f.d
    if c == 0:
        if abs(a - d) <= PARABOLIC_TOL * max(1.0, abs(a)) or kind is MapKind.PARABOLIC:
            pts = (INF,)
        else:
            pts = (b / (d - a), INF)
    else:
        # c z^2 + (d - a) z - b = 0, cancellation-free form
        B = d - a
        disc = cmath.sqrt(B * B + 4 * b * c)
        q = -0.5 * (B + disc) if (B.conjugate() * disc).real >= 0 else -0.5 * (B - disc)
        if kind is MapKind.PARABOLIC or q == 0:
            pts = (-B / (2 * c),)
        else:
            pts = (q / c, -b / q)
    if len(pts) == 2 and kind is MapKind.LOXODROMIC:
        m0, m1 = _multiplier(f, pts[0]), _multiplier(f, pts[1])
        if m0 > m1:
            pts = (pts[1], pts[0])
    return pts


def _to_standard(p1, p2, p3) -> MoebiusMap:
    # sends p1, p2, p3 to 0, 1, inf
    return MoebiusMap(p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1))


def from_three_points(src, dst) -> MoebiusMap:
    """The unique map sending three distinct finite points ``src`` onto ``dst``."""
    src = [complex(z) for z in src]
    dst = [complex(z) for z in dst]
    if len(src) != 3 or len(dst) != 3:
        raise ValueError("need exactly three source and three target points")
    for pts in (src, dst):
        if min(abs(pts[0] - pts[1]), abs(pts[1] - pts[2]), abs(pts[0] - pts[2])) == 0:
            raise ValueError("points must be distinct")
    return compose(inverse(_to_standard(*dst)), _to_standard(*src))


def isometric_circle(f: MoebiusMap) -> Circle:
    if f.c == 0:
        raise ValueError("map fixes infinity; no isometric circle")
    return Circle(-f.d / f.c, 1.0 / abs(f.c))


def map_circle(f: MoebiusMap, circle: Circle, tol: float = 1e-12) -> Circle:
    """Exact image of a circle whose image is again a (finite) circle."""
    p, r = circle.center, circle.radius
    q = f.c * p + f.d
    s = abs(f.c) * r
    if abs(abs(q) - s) <= tol * s:
        raise ValueError("pole lies on the circle; image is a line")
    # the image center is the image of the pole's reflection in the circle,
    # p - r^2 conj(c) / conj(q); this form stays accurate as c -> 0
    if q == 0:  # centered on the pole: the reflection is infinity
        center = f.a / f.c
    else:
        refl = p - r * r * f.c.conjugate() / q.conjugate()
        center = (f.a * refl + f.b) / (f.c * refl + f.d)
    radius = r / abs(abs(q) ** 2 - s * s)
    return Circle(center, radius)
