"""Regenerate the files bundled in src/schottky/data.

Run from the repository root: ``python3 scripts/make_data.py``.
"""

from pathlib import Path

import numpy as np

from schottky.catalog import cyclic, near_tangent, neck_point, suite
from schottky.fileio import family_to_text, spec_to_text, write_curve, write_group
from schottky.group import MarkedSchottkyGroup
from schottky.moebius import Circle
from schottky.quasicircle import PolyCurve, chain_spec
from schottky.singularity import CircleFamily

DATA = Path(__file__).resolve().parents[1] / "src" / "schottky" / "data"


def main():
    DATA.mkdir(exist_ok=True)
    for name, group in suite().items():
        write_group(group, DATA / f"{name}.grp")

    nt = near_tangent(1e-3)
    write_group(nt, DATA / "near_tangent.grp")
    c = nt.circles
    order = [0, 1, 2, 3]
    ports = {
        k: (neck_point(c[k], c[order[(i - 1) % 4]]), neck_point(c[k], c[order[(i + 1) % 4]]))
        for i, k in enumerate(order)
    }
    (DATA / "near_tangent.spec").write_text(spec_to_text(chain_spec(nt, order, ports)), encoding="utf-8")

    overlap = MarkedSchottkyGroup(cyclic().generators, (Circle(-2, 2.1), Circle(2, 2.1)), name="overlap")
    write_group(overlap, DATA / "overlap.grp")
    (DATA / "malformed.grp").write_text(
        '{\n  "rank": 1,\n  "generators": [[[2, 0], [3, 0], [1, 0], [2, 0]]],\n'
        '  "circles": [{"cx": -2, "cy": 0, "r": 1}, {"cx": 2, "cy": 0 "r": 1}]\n}\n',
        encoding="utf-8",
    )

    theta = np.arange(360) * 2 * np.pi / 360
    write_curve(PolyCurve(np.exp(1j * theta)), DATA / "circle_r1.crv")
    write_curve(PolyCurve(2 * np.exp(1j * theta)), DATA / "circle_r2.crv")

    still = (0, 0, 0)
    families = {
        "tangency": ([Circle(0, 1), Circle(4, 1)], [still, (-1, 0, 0)], 0, 3),
        "degeneration": (
            [Circle(0, 1), Circle(-10, 1), Circle(3, 1), Circle(10, 1)],
            [still, still, still, (0, 0, -1)],
            0,
            1.5,
        ),
        "collapse": ([Circle(0, 1), Circle(0.3, 2)], [still, (-0.15, 0, -0.5)], 0, 3),
        "none": ([Circle(0, 1), Circle(4, 1)], [still, (1, 0, 0)], 0, 3),
    }
    for name, (circles, vel, t0, t1) in families.items():
        fam = CircleFamily.linear(circles, vel, t0, t1, name=name)
        (DATA / f"{name}.fam").write_text(family_to_text(fam), encoding="utf-8")


if __name__ == "__main__":
    main()
