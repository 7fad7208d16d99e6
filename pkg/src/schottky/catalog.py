"""Named circle configurations used by the tests, the CLI data files and the docs."""

from __future__ import annotations

import cmath
import math

from .group import MarkedSchottkyGroup
from .moebius import Circle, MoebiusMap, from_three_points

__all__ = [
    "cyclic",
    "sym2",
    "ring",
    "near_tangent",
    "neck_point",
    "suite",
    "DELTA_04_MEMBER",
]


def cyclic() -> MarkedSchottkyGroup:
    """Rank one: ``z -> (2z + 3) / (z + 2)`` with its isometric circles at -2 and 2."""
    gen = MoebiusMap(2, 3, 1, 2)
    return MarkedSchottkyGroup((gen,), (Circle(-2, 1.0), Circle(2, 1.0)), name="cyclic")


def sym2(radius: float = 0.3) -> MarkedSchottkyGroup:
    """Four circles on the real axis at -3, -1, 3, 1; -3 pairs with 3 and -1 with 1."""
    circles = [Circle(x, radius) for x in (-3.0, -1.0, 3.0, 1.0)]
    return MarkedSchottkyGroup.from_circles(circles, name="sym2")


def ring(rank: int, R: float, r: float, twist: float = 0.0, name: str = "") -> MarkedSchottkyGroup:
    """2g equal circles evenly spaced on ``|z| = R``; opposite circles are paired.

    With ``twist = 0`` each generator is the half-turn-symmetric pairing that
    sends the points facing the neighbouring circles to the points facing the
    neighbours of the target; ``twist`` adds a rotation on top.
    """
    circles = [Circle(R * cmath.exp(1j * math.pi * k / rank), r) for k in range(2 * rank)]
    twists = [math.pi + 2 * math.pi * i / rank + twist for i in range(rank)]
    return MarkedSchottkyGroup.from_circles(circles, twists, name=name or f"ring{rank}")


def neck_point(ci: Circle, cj: Circle) -> complex:
    """Point of ``ci`` closest to ``cj``."""
    u = cj.center - ci.center
    return ci.center + ci.radius * u / abs(u)


def near_tangent(gap: float = 1e-3) -> MarkedSchottkyGroup:
    """Rank two, all six circle pairs nearly tangent.

    Three outer circles of radius ``1 - gap`` around a small inner circle,
    with centers taken from the tangent (Descartes) packing.  Each generator
    sends the neck points of its source circle to those of its target, so as
    ``gap -> 0`` the group approaches one whose limit set is a circle packing
    and the dimension climbs well above one.
    """
    if not 0 < gap < 0.05:
        raise ValueError("gap must lie in (0, 0.05)")
    s = 2 / math.sqrt(3)
    outer = [Circle(s * cmath.exp(1j * (2 * math.pi * k / 3 + math.pi / 2)), 1.0 - gap) for k in range(3)]
    circles = outer + [Circle(0, s - 1 - gap)]
    gens = []
    for k, kk in ((0, 2), (1, 3)):
        others = [j for j in range(4) if j not in (k, kk)]
        src = [neck_point(circles[k], circles[kk])] + [neck_point(circles[k], circles[j]) for j in others]
        dst = [neck_point(circles[kk], circles[k])] + [neck_point(circles[kk], circles[j]) for j in others]
        gens.append(from_three_points(src, dst))
    return MarkedSchottkyGroup(tuple(gens), tuple(circles), name=f"near_tangent(gap={gap:g})")


DELTA_04_MEMBER = "ring2"


def suite() -> dict:
    """Five well-separated verified classical groups, ranks one to three."""
    return {
        "cyclic": cyclic(),
        "sym2": sym2(),
        "ring2": ring(2, 2.0, 0.76, name="ring2"),
        "twist2": ring(2, 2.0, 0.5, twist=0.5, name="twist2"),
        "ring3": ring(3, 2.0, 0.4, name="ring3"),
    }
