"""Reading and writing group, family, generating-curve and curve files.

Group, family and generating-curve files are JSON objects with a fixed set
of keys; anything unknown is rejected.  Errors carry the line and column of
the offending text.  Floats are written with 17 significant digits.
"""

from __future__ import annotations

import json
import math
import re
from importlib import resources
from pathlib import Path
from typing import Union

import numpy as np

from .group import MarkedSchottkyGroup
from .moebius import Circle, MoebiusMap
from .quasicircle import GeneratingCurveSpec, PolyCurve
from .singularity import CircleFamily

__all__ = [
    "InputError",
    "resolve_path",
    "group_to_text",
    "parse_group",
    "read_group",
    "write_group",
    "parse_family",
    "read_family",
    "family_to_text",
    "parse_spec",
    "read_spec",
    "spec_to_text",
    "curve_to_text",
    "parse_curve",
    "read_curve",
    "write_curve",
]

PathLike = Union[str, Path]

GROUP_KEYS = {"rank", "generators", "circles", "pairing", "name"}
CIRCLE_KEYS = {"cx", "cy", "r"}
FAMILY_KEYS = {"circles", "velocities", "t_range", "samples", "twists", "name"}
VELOCITY_KEYS = {"dcx", "dcy", "dr"}


class InputError(ValueError):
    """Malformed input file, located by line and column (1-based)."""

    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = ""):
        self.line, self.col, self.source = line, col, source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}" if line else f"{where} {message}".strip())


def resolve_path(path: PathLike) -> Path:
    """``path`` itself if it exists, else a bundled data file of that bare name."""
    p = Path(path)
    if p.exists() or p.parent != Path("."):
        return p
    bundled = resources.files("schottky") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    return p


def _read_text(path: PathLike) -> tuple:
    p = resolve_path(path)
    try:
        return p.read_text(encoding="utf-8"), p.name
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror}", source=Path(path).name) from None


# -- JSON with located errors -------------------------------------------------


def _locate(text: str, token: str) -> tuple:
    k = text.find(token)
    if k < 0:
        return 1, 1
    line = text.count("\n", 0, k) + 1
    col = k - (text.rfind("\n", 0, k) + 1) + 1
    return line, col


def _load(text: str, source: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, exc.lineno, exc.colno, source) from None


def _fail(msg: str, text: str, token: str, source: str):
    line, col = _locate(text, token)
    raise InputError(msg, line, col, source)


def _keys(obj, allowed: set, required: set, what: str, text: str, source: str) -> None:
    if not isinstance(obj, dict):
        _fail(f"{what} must be an object", text, "", source)
    for k in obj:
        if k not in allowed:
            _fail(f"unknown key {k!r} in {what}", text, json.dumps(k), source)
    for k in required:
        if k not in obj:
            _fail(f"missing key {k!r} in {what}", text, "{", source)


def _number(x, what, text, source, token=None) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        _fail(f"{what} must be a finite number", text, token or what, source)
    return float(x)


def _num(x: float) -> str:
    x = float(x) + 0.0  # no negative zero
    if not math.isfinite(x):
        raise ValueError("cannot write a non-finite number")
    s = format(x, ".17g")
    return s if any(ch in s for ch in ".en") else s + ".0"


def _dump(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(str(v) if isinstance(v, int) else _num(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    return json.dumps(obj)


# -- groups -------------------------------------------------------------------


def _circle(d, text, source, what="circle") -> Circle:
    _keys(d, CIRCLE_KEYS, CIRCLE_KEYS, what, text, source)
    cx = _number(d["cx"], "cx", text, source, '"cx"')
    cy = _number(d["cy"], "cy", text, source, '"cy"')
    r = _number(d["r"], "r", text, source, '"r"')
    if r <= 0:
        _fail("circle radius must be positive", text, '"r"', source)
    return Circle(complex(cx, cy), r)


def parse_group(text: str, source: str = "") -> MarkedSchottkyGroup:
    data = _load(text, source)
    _keys(data, GROUP_KEYS, {"rank", "generators"}, "group", text, source)
    rank = data["rank"]
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        _fail("rank must be a positive integer", text, '"rank"', source)
    gens_raw = data["generators"]
    if not isinstance(gens_raw, list) or len(gens_raw) != rank:
        _fail(f"expected {rank} generators", text, '"generators"', source)
    gens = []
    for i, g in enumerate(gens_raw):
        if not isinstance(g, list) or len(g) != 4:
            _fail(f"generator {i} must list 4 entries a, b, c, d", text, '"generators"', source)
        entries = []
        for e in g:
            if not isinstance(e, list) or len(e) != 2:
                _fail(f"generator {i}: entries are [re, im] pairs", text, '"generators"', source)
            entries.append(complex(*(_number(x, "matrix entry", text, source, '"generators"') for x in e)))
        try:
            gens.append(MoebiusMap(*entries))
        except ValueError as exc:
            _fail(f"generator {i}: {exc}", text, '"generators"', source)
    circles = None
    if "circles" in data:
        raw = data["circles"]
        if not isinstance(raw, list) or len(raw) != 2 * rank:
            _fail(f"expected {2 * rank} circles", text, '"circles"', source)
        circles = [_circle(c, text, source) for c in raw]
        pairing = data.get("pairing")
        if pairing is not None:
            ok = (
                isinstance(pairing, list)
                and len(pairing) == rank
                and all(isinstance(p, list) and len(p) == 2 and all(isinstance(k, int) for k in p) for p in pairing)
                and sorted(k for p in pairing for k in p) == list(range(2 * rank))
            )
            if not ok:
                _fail("pairing must list each circle index once, as [source, target] per generator",
                      text, '"pairing"', source)
            circles = [circles[p[0]] for p in pairing] + [circles[p[1]] for p in pairing]
    elif "pairing" in data:
        _fail("pairing given without circles", text, '"pairing"', source)
    name = data.get("name", "")
    if not isinstance(name, str):
        _fail("name must be a string", text, '"name"', source)
    try:
        return MarkedSchottkyGroup(tuple(gens), tuple(circles) if circles else None, name=name)
    except ValueError as exc:
        _fail(str(exc), text, '"generators"', source)


def read_group(path: PathLike) -> MarkedSchottkyGroup:
    text, name = _read_text(path)
    return parse_group(text, name)


def group_to_text(group: MarkedSchottkyGroup) -> str:
    data = {"rank": group.rank}
    if group.name:
        data["name"] = group.name
    data["generators"] = [
        [[complex(x).real, complex(x).imag] for x in (m.a, m.b, m.c, m.d)] for m in group.generators
    ]
    if group.circles is not None:
        data["circles"] = [{"cx": c.center.real, "cy": c.center.imag, "r": c.radius} for c in group.circles]
        data["pairing"] = [[i, i + group.rank] for i in range(group.rank)]
    return _dump(data) + "\n"


def write_group(group: MarkedSchottkyGroup, path: PathLike) -> None:
    Path(path).write_text(group_to_text(group), encoding="utf-8")


# -- circle families ------------------------------------------------------------


def parse_family(text: str, source: str = "") -> CircleFamily:
    """Base circles, one linear velocity ``{dcx, dcy, dr}`` per circle, and ``t_range``."""
    data = _load(text, source)
    _keys(data, FAMILY_KEYS, {"circles", "velocities", "t_range"}, "family", text, source)
    raw = data["circles"]
    if not isinstance(raw, list) or len(raw) < 2 or len(raw) % 2:
        _fail("a family needs an even number (at least 2) of circles", text, '"circles"', source)
    circles = [_circle(c, text, source) for c in raw]
    vel_raw = data["velocities"]
    if not isinstance(vel_raw, list) or len(vel_raw) != len(circles):
        _fail("one velocity per circle", text, '"velocities"', source)
    vel = []
    for v in vel_raw:
        _keys(v, VELOCITY_KEYS, VELOCITY_KEYS, "velocity", text, source)
        vel.append(tuple(_number(v[k], k, text, source, json.dumps(k)) for k in ("dcx", "dcy", "dr")))
    tr = data["t_range"]
    if not isinstance(tr, list) or len(tr) != 2:
        _fail("t_range must be [t0, t1]", text, '"t_range"', source)
    t0, t1 = (_number(x, "t_range", text, source, '"t_range"') for x in tr)
    samples = data.get("samples", 200)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        _fail("samples must be an integer of at least 2", text, '"samples"', source)
    twists = data.get("twists")
    if twists is not None:
        if not isinstance(twists, list) or len(twists) != len(circles) // 2:
            _fail("one twist per generator", text, '"twists"', source)
        twists = tuple(_number(x, "twist", text, source, '"twists"') for x in twists)
    name = data.get("name", "")
    if not isinstance(name, str):
        _fail("name must be a string", text, '"name"', source)
    try:
        return CircleFamily.linear(circles, vel, t0, t1, samples=samples, twists=twists, name=name)
    except ValueError as exc:
        _fail(str(exc), text, '"circles"', source)


def read_family(path: PathLike) -> CircleFamily:
    text, name = _read_text(path)
    return parse_family(text, name)


def family_to_text(family: CircleFamily) -> str:
    if not hasattr(family, "velocities"):
        raise ValueError("only linear families can be written")
    data = {}
    if family.name:
        data["name"] = family.name
    data["circles"] = [{"cx": c.real, "cy": c.imag, "r": r} for c, r in family.base]
    data["velocities"] = [{"dcx": v.real, "dcy": v.imag, "dr": dr} for v, dr in family.velocities]
    data["t_range"] = [float(family.t0), float(family.t1)]
    data["samples"] = int(family.samples)
    if family.twists is not None:
        data["twists"] = [float(x) for x in family.twists]
    return _dump(data) + "\n"


# -- generating curves ------------------------------------------------------------


def parse_spec(text: str, source: str = "") -> GeneratingCurveSpec:
    data = _load(text, source)
    if not isinstance(data, dict):
        _fail("generating curve must be an object", text, "", source)
    try:
        return GeneratingCurveSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        m = re.search(r"'([A-Za-z_]+)'", str(exc))
        _fail(f"invalid generating curve: {exc}", text, f'"{m.group(1)}"' if m else "", source)


def read_spec(path: PathLike) -> GeneratingCurveSpec:
    text, name = _read_text(path)
    return parse_spec(text, name)


def spec_to_text(spec: GeneratingCurveSpec) -> str:
    return _dump(spec.to_dict()) + "\n"


# -- curves -----------------------------------------------------------------------


def curve_to_text(curve: PolyCurve) -> str:
    """Header comments ``# length=`` and ``# depth=``, then one ``re im`` line per vertex."""
    lines = [f"# length={curve.length:.17g}"]
    if curve.depth is not None:
        lines.append(f"# depth={curve.depth}")
    v = curve.vertices
    lines.extend(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in v)
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return "inf" if x == math.inf else format(float(x) + 0.0, ".17g")


def parse_curve(text: str, source: str = "") -> PolyCurve:
    pts = []
    depth = None
    for ln, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = re.fullmatch(r"#\s*(\w+)\s*=\s*(\S+)", s)
            if m and m.group(1) == "depth":
                try:
                    depth = int(m.group(2))
                except ValueError:
                    raise InputError("depth must be an integer", ln, line.index("=") + 2, source) from None
            elif m and m.group(1) not in ("length",):
                raise InputError(f"unknown header key {m.group(1)!r}", ln, line.index(m.group(1)) + 1, source)
            continue
        parts = s.split()
        if len(parts) != 2:
            raise InputError("expected two numbers 're im'", ln, line.index(s[0]) + 1, source)
        try:
            re_, im_ = float(parts[0]), float(parts[1])
        except ValueError:
            raise InputError("not a number", ln, line.index(s[0]) + 1, source) from None
        if math.isnan(re_) or math.isnan(im_) or im_ in (math.inf, -math.inf) or re_ == -math.inf or (re_ == math.inf and im_ != 0):
            raise InputError("vertex must be finite (or 'inf 0' for infinity)", ln, 1, source)
        pts.append(complex(re_, im_))
    if len(pts) < 3:
        raise InputError(f"a closed curve needs at least 3 vertices, got {len(pts)}", source=source)
    return PolyCurve(np.array(pts, dtype=complex), depth=depth)


def read_curve(path: PathLike) -> PolyCurve:
    text, name = _read_text(path)
    return parse_curve(text, name)


def write_curve(curve: PolyCurve, path: PathLike) -> None:
    Path(path).write_text(curve_to_text(curve), encoding="utf-8")
