import math
import re

import numpy as np
import pytest

from schottky.cli import main, render_svg
from schottky.catalog import sym2
from schottky.fileio import read_curve
from schottky.quasicircle import build_quasicircle


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(out):
    d = {}
    for line in out.splitlines():
        k, _, v = line.partition("=")
        d.setdefault(k, v)
    return d


def test_check(capsys):
    code, out, _ = run(capsys, "check", "sym2.grp")
    assert code == 0 and "ok=true" in out
    assert out.startswith("command=check\ninput=sym2.grp\ndepth=default\ntol=default\nseed=0\n")
    code, out, _ = run(capsys, "check", "overlap.grp")
    assert code == 1
    assert any(line.startswith("violation=disks overlap") for line in out.splitlines())
    code, _, err = run(capsys, "check", "malformed.grp")
    assert code == 2 and "malformed.grp:4:" in err


def test_unknown_subcommand_and_missing_file(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "check", "nothing_here.grp")[0] == 2
    assert run(capsys, "dim", "sym2.grp", "--depth", "0")[0] == 2


def test_dim(capsys):
    code, out, _ = run(capsys, "dim", "sym2.grp")
    d = kv(out)
    assert code == 0
    assert abs(float(d["delta_poincare"]) - float(d["delta_transfer"])) < 0.02
    assert d["depth"] == "8" and out.count("depth=") == 1
    d = kv(run(capsys, "dim", "cyclic.grp")[1])
    assert d["below_resolution"] == "true"
    d = kv(run(capsys, "dim", "near_tangent.grp")[1])
    assert float(d["delta_poincare"]) > 1 and float(d["delta_transfer"]) > 1


def test_dim_overlap_fails(capsys):
    code, _, err = run(capsys, "dim", "overlap.grp")
    assert code == 1 and "not a verified classical" in err


def test_limitset(capsys, tmp_path):
    code, out, _ = run(capsys, "limitset", "ring2.grp", "--depth", "6", "--out", str(tmp_path))
    assert code == 0 and "rows=972" in out
    rows = (tmp_path / "ring2.csv").read_text().splitlines()
    assert rows[0] == "re,im" and len(rows) == 973
    from schottky.fileio import read_group

    g = read_group("ring2.grp")
    for row in rows[1:]:
        x, y = map(float, row.split(","))
        assert any(c.contains(complex(x, y)) for c in g.circles)
    run(capsys, "limitset", "cyclic.grp", "--depth", "5", "--out", str(tmp_path))
    assert len((tmp_path / "cyclic.csv").read_text().splitlines()) == 3


def test_quasicircle(capsys, tmp_path):
    code, out, _ = run(capsys, "quasicircle", "ring2.grp", "--depth", "3", "--out", str(tmp_path))
    d = kv(out)
    assert code == 0 and d["jordan_ok"] == "true"
    curve = read_curve(tmp_path / "ring2.crv")
    assert curve.depth == 3
    header = (tmp_path / "ring2.crv").read_text().splitlines()[0]
    assert float(header.split("=")[1]) == pytest.approx(float(d["length"]), rel=1e-8)
    svg = (tmp_path / "ring2.svg").read_text()
    assert svg.count("<path") == 3 and svg.count("<g ") == 3


def test_quasicircle_depth_one(capsys, tmp_path):
    code, out, _ = run(capsys, "quasicircle", "twist2.grp", "--depth", "1", "--out", str(tmp_path))
    assert code == 0 and kv(out)["length_by_depth"].count(",") == 0


def test_quasicircle_bad_spec(capsys, tmp_path):
    spec = tmp_path / "bad.spec"
    text = (
        '{"chain_order": [0, 1], "connectors": ['
        '[{"kind": "segment", "start": [-1, 0], "end": [1, 0]}],'
        '[{"kind": "segment", "start": [1, 0.5], "end": [-1, 0.5]}]]}'
    )
    spec.write_text(text)
    code, _, err = run(capsys, "quasicircle", "cyclic.grp", "--spec", str(spec), "--out", str(tmp_path))
    assert code == 1 and "invalid generating curve" in err


def test_quasicircle_with_spec(capsys, tmp_path):
    code, out, _ = run(
        capsys, "quasicircle", "near_tangent.grp", "--spec", "near_tangent.spec", "--depth", "3", "--out", str(tmp_path)
    )
    assert code == 0 and "input=near_tangent.spec" in out


def test_frechet(capsys, tmp_path):
    code, out, _ = run(capsys, "frechet", "circle_r1.crv", "circle_r2.crv")
    d = kv(out)
    assert code == 0
    assert float(d["positional"]) == pytest.approx(1, abs=1e-12)
    assert float(d["total"]) == pytest.approx(1 + 2 * math.pi, abs=1e-3)
    d = kv(run(capsys, "frechet", "circle_r1.crv", "circle_r1.crv")[1])
    assert float(d["total"]) == 0
    tiny = tmp_path / "tiny.crv"
    tiny.write_text("0 0\n1 1\n")
    assert run(capsys, "frechet", str(tiny), "circle_r1.crv")[0] == 2


def test_frechet_resampled(capsys, tmp_path):
    code, out, _ = run(capsys, "frechet", "circle_r1.crv", "circle_r2.crv", "--max-vertices", "100")
    assert code == 0 and "resampled_to=100" in out


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "tangency.fam")
    assert code == 0 and "kind=tangency\nt_star=2.000000\n" in out
    assert "kind=none" in run(capsys, "scan", "none.fam")[1]
    assert "kind=collapsing" in run(capsys, "scan", "collapse.fam")[1]
    assert "kind=degeneration_isolated" in run(capsys, "scan", "degeneration.fam")[1]


def test_svg_layers():
    g = sym2()
    rep = build_quasicircle(g, depth=3)
    svg = render_svg(g, rep.curve, 3)
    ids = re.findall(r'<g id="([^"]+)">', svg)
    assert ids == ["circles", "limit-set", "curve"]
    widths = set(re.findall(r'stroke-width="([^"]+)"', svg))
    assert len(widths) == 1
    # viewport: circle bounding box [-3.3, 3.3] x [-0.3, 0.3] padded 10%
    m = re.search(r'viewBox="([^"]+)"', svg)
    x0, y0, w, h = map(float, m.group(1).split())
    assert x0 == pytest.approx(-3.96) and w == pytest.approx(7.92)
    assert h == pytest.approx(0.72)
    assert float(widths.pop()) == pytest.approx(0.005 * 7.92, rel=1e-6)
    # the curve path is on the real axis (y printed flipped)
    path = re.search(r'<g id="curve"><path d="([^"]+)"', svg).group(1)
    ys = [float(t.split()[1]) for t in re.findall(r"[ML](-?[\d.e+-]+ -?[\d.e+-]+)", path)]
    assert np.abs(ys).max() < 1e-6
