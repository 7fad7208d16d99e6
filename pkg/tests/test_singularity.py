import math

import pytest

from schottky.fileio import read_family
from schottky.moebius import Circle
from schottky.singularity import (
    CircleFamily,
    NonMonotoneFamily,
    SingularityKind,
    first_singularity,
    gap_profile,
    neck_spec,
    non_crossing,
    singular_curve_probe,
)


def tangency_family(samples=200):
    return CircleFamily.linear([Circle(0, 1), Circle(4, 1)], [(0, 0, 0), (-1, 0, 0)], 0, 3, samples, name="tangency")


def degeneration_family():
    circles = [Circle(0, 1), Circle(-10, 1), Circle(3, 1), Circle(10, 1)]
    vel = [(0, 0, 0), (0, 0, 0), (0, 0, 0), (0, 0, -1)]
    return CircleFamily.linear(circles, vel, 0, 1.5)


def collapse_family():
    # circle 1 slides and shrinks onto circle 0; they coincide at t = 2
    return CircleFamily.linear([Circle(0, 1), Circle(0.3, 2)], [(0, 0, 0), (-0.15, 0, -0.5)], 0, 3)


def test_gap_profile_examples():
    assert gap_profile([Circle(0, 1), Circle(3, 2)]).min_pair_gap == pytest.approx(0, abs=1e-15)
    p = gap_profile([Circle(0, 1), Circle(4, 2)])
    assert p.min_pair_gap == pytest.approx(1) and p.gap_pair == (0, 1)
    assert p.min_radius == 1 and p.radius_index == 0
    p = gap_profile([Circle(0, 1), Circle(0.001, 1.0005)])
    assert p.min_circle_hausdorff == pytest.approx(0.0015)
    with pytest.raises(ValueError):
        gap_profile([Circle(0, 1)])


def test_gap_profile_nested_pairs_skipped():
    p = gap_profile([Circle(0, 1), Circle(0.2, 3)])
    assert p.min_pair_gap == math.inf
    assert non_crossing([Circle(0, 1), Circle(0.2, 3)]) == []
    assert non_crossing([Circle(0, 1), Circle(1.5, 1)]) == [(0, 1)]


def test_gap_profile_zero_radius():
    p = gap_profile([(0, 0.0), (5, 1.0)])
    assert p.min_radius == 0 and p.radius_index == 0


@pytest.mark.parametrize("tol", [1e-9, 1e-10])
def test_tangency(tol):
    ev = first_singularity(tangency_family(), tol=tol)
    assert ev.kind is SingularityKind.TANGENCY
    assert abs(ev.t_star - 2) < 1e-6
    # the threshold tol * scale is crossed just before the analytic contact
    assert 2 - 2 * tol * 4 <= ev.t_star <= 2 + tol
    assert ev.witness == (0, 1)
    assert ev.gap_at_t_star < 1e-6 * 4


def test_degeneration_isolated():
    ev = first_singularity(degeneration_family())
    assert ev.kind is SingularityKind.DEGENERATION_ISOLATED
    assert abs(ev.t_star - 1) < 1e-6
    assert ev.witness == (3,)


def test_degeneration_on_circle():
    # circle 1 shrinks toward a point of circle 0 while moving onto it
    fam = CircleFamily.linear([Circle(0, 1), Circle(4, 1)], [(0, 0, 0), (-3, 0, -1)], 0, 1.5)
    ev = first_singularity(fam)
    assert ev.kind is SingularityKind.DEGENERATION_ON_CIRCLE
    assert abs(ev.t_star - 1) < 1e-6


def test_collapsing():
    ev = first_singularity(collapse_family())
    assert ev.kind is SingularityKind.COLLAPSING
    assert abs(ev.t_star - 2) < 1e-6
    assert ev.witness == (0, 1)


def test_no_crossing():
    fam = CircleFamily.linear([Circle(0, 1), Circle(4, 1)], [(0, 0, 0), (1, 0, 0)], 0, 3)
    ev = first_singularity(fam)
    assert ev.kind is SingularityKind.NONE and ev.t_star == 3 and ev.witness == ()


def test_priority_tangency_first():
    # the gap of circles 0, 1 and the radius of circle 3 are both 2 - t: tangency wins
    circles = [Circle(0, 1), Circle(4, 1), Circle(-10, 1), Circle(10, 2)]
    vel = [(0, 0, 0), (-1, 0, 0), (0, 0, 0), (0, 0, -1)]
    ev = first_singularity(CircleFamily.linear(circles, vel, 0, 3))
    assert ev.kind is SingularityKind.TANGENCY
    assert abs(ev.t_star - 2) < 1e-6


def test_touching_between_samples_found():
    # the two circles touch exactly once (at t = 1) and then separate
    fam = CircleFamily(lambda t: [(0, 1.0), (2 + abs(t - 1.0001) * 3, 1.0)], 0, 3, samples=4)
    ev = first_singularity(fam)
    assert ev.kind is SingularityKind.TANGENCY
    assert abs(ev.t_star - 1.0001) < 1e-6


def test_non_monotone_rejected():
    fam = CircleFamily(lambda t: [(0, 1.0), (4 - t + 0.5 * math.sin(6 * t), 1.0)], 0, 3)
    with pytest.raises(NonMonotoneFamily):
        first_singularity(fam)


def test_bad_tolerance_and_family():
    with pytest.raises(ValueError):
        first_singularity(tangency_family(), tol=1e-12)
    with pytest.raises(ValueError):
        CircleFamily.linear([Circle(0, 1), Circle(1, 1)], [(0, 0, 0)] * 2, 0, 1)
    with pytest.raises(ValueError):
        CircleFamily.linear([Circle(0, 1), Circle(4, 1)], [(0, 0, 0)] * 2, 1, 0)


def test_scale_fixed_at_t0():
    assert tangency_family().scale == 4
    assert collapse_family().scale == pytest.approx(0.3)


def test_event_lines():
    lines = first_singularity(tangency_family()).lines()
    assert lines[:2] == ["kind=tangency", "t_star=2.000000"]
    assert lines[2] == "witness=0,1"


@pytest.mark.parametrize("name,kind,t", [
    ("tangency.fam", "tangency", 2.0),
    ("degeneration.fam", "degeneration_isolated", 1.0),
    ("collapse.fam", "collapsing", 2.0),
    ("none.fam", "none", None),
])
def test_bundled_families(name, kind, t):
    fam = read_family(name)
    ev = first_singularity(fam)
    assert ev.kind.value == kind
    if t is not None:
        assert abs(ev.t_star - t) < 1e-6


def test_neck_spec_ports():
    g = tangency_family().group(1.0)
    spec = neck_spec(g)
    assert spec.problems(g) == []
    p_in, p_out = spec.ports[0]
    assert p_in == pytest.approx(p_out.conjugate())
    assert p_out == pytest.approx(complex(math.cos(math.pi / 4), math.sin(math.pi / 4)))
    # the angle follows the gap, so the ports close in on the tangency point
    p_in, p_out = neck_spec(tangency_family().group(1.95)).ports[0]
    assert abs(p_out - 1) < 0.06
    with pytest.raises(ValueError):
        neck_spec(g, angle=2.0)


def test_probe_trend():
    fam = tangency_family()
    reps = singular_curve_probe(fam, [0.5, 1.5, 1.8, 1.9, 1.95], spec=neck_spec, depth=6)
    assert all(r.jordan_ok for r in reps)
    d = [r.min_self_distance for r in reps]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[0] > 0.3


def test_probe_refuses_past_singularity():
    with pytest.raises(ValueError, match="not a classical configuration"):
        singular_curve_probe(tangency_family(), [1.0, 2.5], spec=neck_spec, depth=3)
