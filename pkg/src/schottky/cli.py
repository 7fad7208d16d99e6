"""``schottky`` command line: check, dim, limitset, quasicircle, frechet, scan.

Reports are ``key=value`` lines on stdout, starting with the run
configuration.  Exit status: 0 success, 1 a check or computation failed,
2 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .curvespace import DownsampleWarning, frechet_closed
from .dimension import default_depth, dimension_report
from .fileio import InputError, read_curve, read_family, read_group, read_spec, write_curve
from .group import WordBudgetExceeded, count_reduced_words, limit_set_sample, verify_classical
from .quasicircle import AssemblyError, NoSimpleChain, build_quasicircle
from .singularity import NonMonotoneFamily, first_singularity

__all__ = ["main", "build_parser", "render_svg"]

SVG_LIMIT_POINTS = 20_000
SVG_CURVE_RESOLUTION = 2e-4


class Failure(Exception):
    """A computation that ran but did not succeed (exit status 1)."""


def _fmt(x: float) -> str:
    return format(float(x), ".7g")


def _config(args, inputs: Sequence[str], depth: Optional[int] = None) -> list:
    lines = [f"command={args.command}"]
    lines += [f"input={Path(p).name}" for p in inputs]
    if depth is None:
        depth = getattr(args, "depth", None)
    for key, val in (("depth", depth), ("tol", args.tol), ("seed", args.seed)):
        lines.append(f"{key}={'default' if val is None else val}")
    return lines


def _without_depth(lines: list) -> list:
    return [s for s in lines if not s.startswith("depth=")]


def _load_group(path: str):
    g = read_group(path)
    if not g.has_witness:
        raise InputError("group file has no circles; a classical witness is required", source=Path(path).name)
    return g


def _require_classical(group) -> None:
    rep = verify_classical(group)
    if not rep.ok:
        raise Failure("group is not a verified classical Schottky group: " + "; ".join(rep.violations))


# -- subcommands ----------------------------------------------------------------


def cmd_check(args) -> tuple:
    group = _load_group(args.group)
    rep = verify_classical(group)
    lines = _config(args, [args.group]) + [f"rank={group.rank}", f"ok={str(rep.ok).lower()}"]
    lines += [f"violation={v}" for v in rep.violations]
    return lines, 0 if rep.ok else 1


def cmd_dim(args) -> tuple:
    group = _load_group(args.group)
    _require_classical(group)
    depth = args.depth or default_depth(group.rank)
    rep = dimension_report(group, depth=depth, tol=args.tol or 1e-6)
    lines = _config(args, [args.group], depth) + _without_depth(rep.lines())
    lines.append(f"below_resolution={str(rep.below_resolution).lower()}")
    return lines, 0


def cmd_limitset(args) -> tuple:
    group = _load_group(args.group)
    _require_classical(group)
    depth = args.depth or 6
    pts = limit_set_sample(group, depth)
    out = _out_dir(args) / f"{Path(args.group).stem}.csv"
    text = "re,im\n" + "".join(f"{z.real:.17g},{z.imag:.17g}\n" for z in pts)
    out.write_text(text, encoding="utf-8")
    lines = _config(args, [args.group], depth) + [f"rows={len(pts)}", f"wrote={out.name}"]
    return lines, 0


def cmd_quasicircle(args) -> tuple:
    group = _load_group(args.group)
    _require_classical(group)
    spec = read_spec(args.spec) if args.spec else None
    depth = args.depth or 6
    rep = build_quasicircle(group, spec, depth=depth)
    stem = Path(args.group).stem
    out = _out_dir(args)
    write_curve(rep.curve, out / f"{stem}.crv")
    (out / f"{stem}.svg").write_text(render_svg(group, rep.curve, depth), encoding="utf-8")
    inputs = [args.group] + ([args.spec] if args.spec else [])
    lines = _config(args, inputs, depth) + _without_depth(rep.lines())
    lines += [f"wrote={stem}.crv", f"wrote={stem}.svg"]
    return lines, 0


def cmd_frechet(args) -> tuple:
    a, b = read_curve(args.curve_a), read_curve(args.curve_b)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DownsampleWarning)
        d = frechet_closed(a, b, orientation=args.orientation, max_vertices=args.max_vertices)
    lines = _config(args, [args.curve_a, args.curve_b])
    lines.append(f"orientation={args.orientation}")
    if caught:
        lines.append(f"resampled_to={args.max_vertices}")
    return lines + d.lines(), 0


def cmd_scan(args) -> tuple:
    fam = read_family(args.family)
    ev = first_singularity(fam, tol=args.tol or 1e-9)
    return _config(args, [args.family]) + ev.lines(), 0


# -- svg --------------------------------------------------------------------------


def _limit_depth(rank: int, depth: int) -> int:
    d = max(1, depth)
    while d > 1 and count_reduced_words(rank, d) > SVG_LIMIT_POINTS:
        d -= 1
    return d


def render_svg(group, curve, depth: int) -> str:
    """Three layers, one path each: witness circles, limit-set sample, the curve.

    The viewport is the bounding box of the circles padded by 10%; y points
    up.  Stroke widths are 0.5% of the larger viewport side.
    """
    circles = group.require_witness()
    x0 = min(c.center.real - c.radius for c in circles)
    x1 = max(c.center.real + c.radius for c in circles)
    y0 = min(c.center.imag - c.radius for c in circles)
    y1 = max(c.center.imag + c.radius for c in circles)
    px, py = 0.1 * (x1 - x0), 0.1 * (y1 - y0)
    x0, x1, y0, y1 = x0 - px, x1 + px, y0 - py, y1 + py
    w, h = x1 - x0, y1 - y0
    stroke = 0.005 * max(w, h)

    def P(z):
        return f"{_fmt(z.real)} {_fmt(-z.imag)}"

    circ = []
    for c in circles:
        r = _fmt(c.radius)
        a, b = c.center + c.radius, c.center - c.radius
        circ.append(f"M{P(a)} A{r} {r} 0 1 0 {P(b)} A{r} {r} 0 1 0 {P(a)} Z")
    pts = limit_set_sample(group, _limit_depth(group.rank, depth))
    dots = "".join(f"M{P(z)} h0" for z in pts)
    v = curve.vertices
    segs = []
    run = []
    for z in _svg_vertices(v, SVG_CURVE_RESOLUTION * max(w, h)):
        if np.isfinite(z):
            run.append(z)
        elif run:
            segs.append(run)
            run = []
    if run:
        segs.append(run)
    closed = not curve.through_infinity
    if not closed and len(segs) > 1 and np.isfinite(v[0]) and np.isfinite(v[-1]):
        segs = [segs[-1] + segs[0]] + segs[1:-1]
    path = []
    for s in segs:
        path.append("M" + " L".join(P(z) for z in s) + (" Z" if closed else ""))
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(w)} {_fmt(h)}" '
        f'width="800" height="{_fmt(800 * h / w)}">'
    )
    body = [
        head,
        f'<g id="circles"><path d="{" ".join(circ)}" fill="none" stroke="#1f4e79" stroke-width="{_fmt(stroke)}"/></g>',
        f'<g id="limit-set"><path d="{dots}" fill="none" stroke="#b03a2e" stroke-width="{_fmt(stroke)}" '
        'stroke-linecap="round"/></g>',
        f'<g id="curve"><path d="{" ".join(path)}" fill="none" stroke="#222222" stroke-width="{_fmt(stroke)}" '
        'stroke-linejoin="round"/></g>',
        "</svg>",
    ]
    return "\n".join(body) + "\n"


def _svg_vertices(v: np.ndarray, h: float) -> np.ndarray:
    """Vertices thinned to spacing ``h`` within each finite run (infinity kept as a break)."""
    out = []
    fin = np.isfinite(v)
    k = 0
    n = len(v)
    while k < n:
        if not fin[k]:
            out.append(v[k : k + 1])
            k += 1
            continue
        e = k
        while e < n and fin[e]:
            e += 1
        run = v[k:e]
        keep = _kernels.decimate(run.real.copy(), run.imag.copy(), h) if len(run) > 2 else np.arange(len(run))
        out.append(run[keep])
        k = e
    return np.concatenate(out) if out else v


# -- entry point ------------------------------------------------------------------


def _out_dir(args) -> Path:
    p = Path(args.out or ".")
    p.mkdir(parents=True, exist_ok=True)
    return p


def _common(p: argparse.ArgumentParser, depth: bool = True) -> None:
    if depth:
        p.add_argument("--depth", type=int, default=None, help="word length / truncation depth")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--out", default=None, help="output directory (default: current)")
    p.add_argument("--seed", type=int, default=0, help="recorded in the report; no subcommand draws random numbers")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schottky", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", help="verify a classical circle witness")
    p.add_argument("group")
    _common(p, depth=False)
    p = sub.add_parser("dim", help="dimension estimates")
    p.add_argument("group")
    _common(p)
    p = sub.add_parser("limitset", help="limit-set sample as CSV")
    p.add_argument("group")
    _common(p)
    p = sub.add_parser("quasicircle", help="truncated quasi-circle: curve file and SVG")
    p.add_argument("group")
    p.add_argument("--spec", default=None, help="generating curve file (default: automatic chain)")
    _common(p)
    p = sub.add_parser("frechet", help="distance between two curve files")
    p.add_argument("curve_a")
    p.add_argument("curve_b")
    p.add_argument("--orientation", choices=("both", "forward"), default="both")
    p.add_argument("--max-vertices", type=int, default=1000)
    _common(p, depth=False)
    p = sub.add_parser("scan", help="first singularity along a circle family")
    p.add_argument("family")
    _common(p, depth=False)
    return ap


COMMANDS = {
    "check": cmd_check,
    "dim": cmd_dim,
    "limitset": cmd_limitset,
    "quasicircle": cmd_quasicircle,
    "frechet": cmd_frechet,
    "scan": cmd_scan,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "depth", None) is not None and args.depth < 1:
        print("error=depth must be at least 1", file=sys.stderr)
        return 2
    try:
        lines, code = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error={exc}", file=sys.stderr)
        return 2
    except (Failure, AssemblyError, NoSimpleChain, WordBudgetExceeded, NonMonotoneFamily, ValueError) as exc:
        print(f"error={exc}", file=sys.stderr)
        return 1
    sys.stdout.write("".join(line + "\n" for line in lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
