import json

import numpy as np
import pytest

from schottky.catalog import suite
from schottky.fileio import (
    InputError,
    curve_to_text,
    family_to_text,
    group_to_text,
    parse_curve,
    parse_family,
    parse_group,
    parse_spec,
    read_group,
    read_spec,
    resolve_path,
    spec_to_text,
)
from schottky.group import verify_classical
from schottky.quasicircle import PolyCurve, default_generating_curve
from schottky.singularity import CircleFamily
from schottky.moebius import Circle


@pytest.mark.parametrize("name", list(suite()))
def test_group_roundtrip(name):
    g = suite()[name]
    h = parse_group(group_to_text(g))
    for m1, m2 in zip(g.generators, h.generators):
        assert m1.close_to(m2, 1e-15)
    for c1, c2 in zip(g.circles, h.circles):
        assert c1 == c2
    assert h.name == g.name
    assert group_to_text(h) == group_to_text(g)


def test_bundled_groups_read():
    for name in ("sym2", "cyclic", "ring2", "twist2", "ring3", "near_tangent"):
        assert verify_classical(read_group(f"{name}.grp")).ok
    assert not verify_classical(read_group("overlap.grp")).ok


def test_pairing_reorders():
    g = suite()["sym2"]
    data = json.loads(group_to_text(g))
    circles = data["circles"]
    data["circles"] = [circles[2], circles[0], circles[3], circles[1]]
    data["pairing"] = [[1, 0], [3, 2]]
    h = parse_group(json.dumps(data))
    assert h.circles == g.circles


def test_malformed_located():
    with pytest.raises(InputError) as exc:
        read_group("malformed.grp")
    assert exc.value.line == 4 and exc.value.col > 1
    assert str(exc.value).startswith("malformed.grp:4:")


@pytest.mark.parametrize(
    "patch,msg",
    [
        ({"colour": 1}, "unknown key"),
        ({"rank": 0}, "rank must be"),
        ({"rank": 3}, "expected 3 generators"),
        ({"pairing": [[0, 0], [1, 1]]}, "pairing"),
    ],
)
def test_group_strict(patch, msg):
    data = json.loads(group_to_text(suite()["sym2"]))
    data.update(patch)
    with pytest.raises(InputError, match=msg):
        parse_group(json.dumps(data, indent=1))


def test_unknown_key_location():
    text = group_to_text(suite()["sym2"]).replace('"name"', '"nmae"')
    with pytest.raises(InputError) as exc:
        parse_group(text)
    assert exc.value.line == 3 and exc.value.col == 3


def test_circle_keys_strict():
    data = json.loads(group_to_text(suite()["cyclic"]))
    data["circles"][0]["radius"] = 1
    with pytest.raises(InputError, match="unknown key 'radius'"):
        parse_group(json.dumps(data))


def test_non_loxodromic_generator():
    text = json.dumps({"rank": 1, "generators": [[[1, 0], [1, 0], [0, 0], [1, 0]]]})
    with pytest.raises(InputError, match="not loxodromic"):
        parse_group(text)


def test_family_roundtrip():
    fam = CircleFamily.linear([Circle(0, 1), Circle(4, 1)], [(0, 0, 0), (-1, 0, 0.5)], 0, 3, samples=50, name="x")
    text = family_to_text(fam)
    back = parse_family(text)
    assert family_to_text(back) == text
    assert back.raw(1.5) == fam.raw(1.5)
    bad = json.loads(text)
    bad["velocities"][0]["dx"] = 0
    with pytest.raises(InputError, match="unknown key"):
        parse_family(json.dumps(bad))


def test_spec_roundtrip():
    g = suite()["ring3"]
    spec = default_generating_curve(g)
    assert parse_spec(spec_to_text(spec)) == spec
    assert read_spec("near_tangent.spec").problems(read_group("near_tangent.grp")) == []


def test_curve_roundtrip():
    v = np.array([0.1, 1 + 1e-17j, 1 / 3 + 1j, np.inf, -2.5j])
    c = PolyCurve(v, depth=4)
    text = curve_to_text(c)
    assert text.startswith("# length=inf\n# depth=4\n")
    back = parse_curve(text)
    assert np.array_equal(back.vertices, c.vertices)
    assert back.depth == 4


@pytest.mark.parametrize(
    "text,msg",
    [
        ("0 0\n1 0\n", "at least 3"),
        ("0 0\n1 0\n1 x\n", "not a number"),
        ("0 0\n1 0 3\n1 1\n", "two numbers"),
        ("# colour=red\n0 0\n1 0\n1 1\n", "unknown header"),
        ("0 0\nnan 0\n1 1\n", "finite"),
    ],
)
def test_curve_errors(text, msg):
    with pytest.raises(InputError, match=msg):
        parse_curve(text, "c.crv")


def test_resolve_path(tmp_path):
    assert resolve_path("sym2.grp").is_file()
    local = tmp_path / "sym2.grp"
    local.write_text("{}")
    assert resolve_path(local) == local
    assert not resolve_path("no_such_file.grp").exists()
    with pytest.raises(InputError, match="cannot read"):
        read_group("no_such_file.grp")
