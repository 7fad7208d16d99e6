"""Marked Schottky groups and the free-group bookkeeping around them.

Letters are indexed ``0 .. 2g-1``: index ``i < g`` is generator ``i`` and
index ``i + g`` its inverse.  As strings, generators are ``a, b, c, ...`` and
inverses the matching capitals.

Disk convention: generator ``i`` maps the exterior of disk ``i`` onto the
interior of disk ``i + g``.  Letter ``k`` therefore lands in disk
``(k + g) % 2g``, which is also the index of its inverse letter.  A word is
admissible exactly when it is freely reduced.
"""

from __future__ import annotations

import cmath
import math
import string
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .moebius import (
    IDENTITY,
    INF,
    Circle,
    MapKind,
    MoebiusMap,
    apply,
    classify,
    compose,
    inverse,
    map_circle,
)

__all__ = [
    "DEFAULT_WORD_BUDGET",
    "WordBudgetExceeded",
    "NoWitnessError",
    "MarkedSchottkyGroup",
    "ClassicalReport",
    "pairing_map",
    "enumerate_words",
    "verify_classical",
    "nested_disk",
    "limit_set_sample",
    "word_to_letters",
    "letters_to_word",
    "count_reduced_words",
]

DEFAULT_WORD_BUDGET = 5_000_000
CIRCLE_MATCH_TOL = 1e-8


class WordBudgetExceeded(RuntimeError):
    """Raised when an enumeration would compose more maps than allowed."""


class NoWitnessError(ValueError):
    """Raised when an operation needs the classical circle witness."""


def word_to_letters(word: str, rank: int) -> list[int]:
    out = []
    for ch in word:
        k = string.ascii_lowercase.find(ch.lower())
        if k < 0 or k >= rank:
            raise ValueError(f"letter {ch!r} outside the alphabet of rank {rank}")
        out.append(k if ch.islower() else k + rank)
    return out


def letters_to_word(letters: Sequence[int], rank: int) -> str:
    return "".join(
        string.ascii_lowercase[k] if k < rank else string.ascii_uppercase[k - rank]
        for k in letters
    )


def count_reduced_words(rank: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


def pairing_map(source: Circle, target: Circle, twist: float = math.pi) -> MoebiusMap:
    """Map sending ``source`` onto ``target``, exterior onto interior.

    ``z -> q + exp(i*twist) * r s / (z - p)``.  With ``twist = pi`` and real
    centers the map preserves the real axis and is hyperbolic.
    """
    p, r = source.center, source.radius
    q, s = target.center, target.radius
    u = cmath.exp(1j * twist)
    # snap roundoff so that twists of multiples of pi/2 give exactly real or imaginary factors
    u = complex(0.0 if abs(u.real) < 1e-15 else u.real, 0.0 if abs(u.imag) < 1e-15 else u.imag)
    k = u * r * s
    return MoebiusMap(q, k - p * q, 1, -p)


@dataclass(frozen=True)
class MarkedSchottkyGroup:
    """Generators of a Schottky group, optionally with a classical witness.

    ``circles`` holds 2g circles; generator ``i`` pairs circle ``i`` with
    circle ``i + g``.
    """

    generators: tuple
    circles: Optional[tuple] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("a marked Schottky group needs at least one generator")
        for i, g in enumerate(gens):
            if not isinstance(g, MoebiusMap):
                raise TypeError(f"generator {i} is not a MoebiusMap")
            if classify(g) is not MapKind.LOXODROMIC:
                raise ValueError(f"generator {i} is {classify(g).value}, not loxodromic")
        object.__setattr__(self, "generators", gens)
        if self.circles is not None:
            circles = tuple(self.circles)
            if len(circles) != 2 * len(gens):
                raise ValueError(f"witness needs {2 * len(gens)} circles, got {len(circles)}")
            object.__setattr__(self, "circles", circles)

    @classmethod
    def from_circles(cls, circles: Sequence[Circle], twists=None, name: str = "") -> "MarkedSchottkyGroup":
        circles = tuple(circles)
        if len(circles) % 2:
            raise ValueError("need an even number of circles")
        g = len(circles) // 2
        if twists is None:
            twists = [math.pi] * g
        gens = tuple(pairing_map(circles[i], circles[i + g], twists[i]) for i in range(g))
        return cls(gens, circles, name=name)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def has_witness(self) -> bool:
        return self.circles is not None

    def require_witness(self) -> tuple:
        if self.circles is None:
            raise NoWitnessError("operation needs the classical circle witness")
        return self.circles

    @property
    def letter_maps(self) -> tuple:
        """Maps for letters ``0 .. 2g-1`` (generators, then inverses)."""
        return self.generators + tuple(inverse(g) for g in self.generators)

    def landing_disk(self, letter: int) -> int:
        return (letter + self.rank) % (2 * self.rank)

    def inverse_letter(self, letter: int) -> int:
        return (letter + self.rank) % (2 * self.rank)

    def word_map(self, word) -> MoebiusMap:
        letters = word_to_letters(word, self.rank) if isinstance(word, str) else list(word)
        maps = self.letter_maps
        m = IDENTITY
        for k in letters:
            m = compose(m, maps[k])
        return m

    def conjugate(self, h: MoebiusMap) -> "MarkedSchottkyGroup":
        """The group ``h G h^-1`` with the witness circles pushed forward by ``h``."""
        hi = inverse(h)
        gens = tuple(compose(h, compose(g, hi)) for g in self.generators)
        circles = None
        if self.circles is not None:
            circles = tuple(map_circle(h, c) for c in self.circles)
        return MarkedSchottkyGroup(gens, circles, name=self.name)

    def scale_radii(self, t: float, twists=None) -> "MarkedSchottkyGroup":
        """Rebuild with all witness radii multiplied by ``t`` (pairing maps recomputed)."""
        circles = tuple(Circle(c.center, c.radius * t) for c in self.require_witness())
        return MarkedSchottkyGroup.from_circles(circles, twists=twists, name=self.name)

    @property
    def scale(self) -> float:
        """Largest pairwise distance between witness centers."""
        cs = self.require_witness()
        return max(abs(a.center - b.center) for i, a in enumerate(cs) for b in cs[i + 1:])


def enumerate_words(
    group: MarkedSchottkyGroup, max_len: int, budget: int = DEFAULT_WORD_BUDGET
) -> Iterator[tuple[str, MoebiusMap]]:
    """Yield every reduced word of length <= ``max_len`` with its map.

    Words come out in length-lexicographic order.  Each length is walked
    depth-first with an explicit stack holding composed prefix maps.
    """
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    g = group.rank
    total = sum(count_reduced_words(g, n) for n in range(max_len + 1))
    if total > budget:
        raise WordBudgetExceeded(f"{total} words requested, budget is {budget}")
    maps = group.letter_maps
    n_letters = 2 * g
    yield "", IDENTITY
    for n in range(1, max_len + 1):
        # stack entries: (letters, map); pushed in reverse so pops are lexicographic
        stack = [((k,), maps[k]) for k in reversed(range(n_letters))]
        while stack:
            letters, m = stack.pop()
            if len(letters) == n:
                yield letters_to_word(letters, g), m
                continue
            forbidden = (letters[-1] + g) % n_letters
            for k in reversed(range(n_letters)):
                if k != forbidden:
                    stack.append((letters + (k,), compose(m, maps[k])))


@dataclass
class ClassicalReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def verify_classical(group: MarkedSchottkyGroup, sep_tol: float = 1e-12) -> ClassicalReport:
    """Check that the witness circles certify a classical Schottky group."""
    circles = group.require_witness()
    g = group.rank
    violations = []
    scale = max(1.0, max(abs(c.center) + c.radius for c in circles))
    for i in range(2 * g):
        for j in range(i + 1, 2 * g):
            ci, cj = circles[i], circles[j]
            gap = abs(ci.center - cj.center) - ci.radius - cj.radius
            if not gap > sep_tol * scale:
                violations.append(f"disks overlap: circles {i} and {j} (gap {gap:.3e})")
    for i, gen in enumerate(group.generators):
        src, dst = circles[i], circles[i + g]
        try:
            img = map_circle(gen, src)
        except ValueError:
            violations.append(f"image circle mismatch: generator {i} sends circle {i} to a line")
            continue
        err = max(abs(img.center - dst.center), abs(img.radius - dst.radius))
        if err > CIRCLE_MATCH_TOL * dst.radius:
            violations.append(
                f"image circle mismatch: generator {i} sends circle {i} off circle {i + g} (error {err:.3e})"
            )
            continue
        probes = [INF, src.center + 2.0 * src.radius]
        for z in probes:
            w = apply(gen, z)
            if w is INF or not dst.contains(w):
                violations.append(
                    f"orientation: generator {i} does not send the exterior of disk {i} into disk {i + g}"
                )
                break
    return ClassicalReport(ok=not violations, violations=violations)


def nested_disk(word, group: MarkedSchottkyGroup) -> Circle:
    """Image of the terminal letter's landing disk under the word's prefix."""
    circles = group.require_witness()
    letters = word_to_letters(word, group.rank) if isinstance(word, str) else list(word)
    if not letters:
        raise ValueError("nested_disk needs a nonempty word")
    for x, y in zip(letters, letters[1:]):
        if y == group.inverse_letter(x):
            raise ValueError("word is not freely reduced")
    prefix = group.word_map(letters[:-1])
    return map_circle(prefix, circles[group.landing_disk(letters[-1])])


# -- vectorized word levels ------------------------------------------------


@dataclass
class WordLevel:
    """All reduced words of one length, as parallel arrays (length-lex order)."""

    length: int
    last: np.ndarray  # last letter index, -1 for the empty word
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    parent: np.ndarray  # index of the prefix in the previous level

    def __len__(self):
        return len(self.a)


def word_levels(
    group: MarkedSchottkyGroup, max_len: int, budget: int = DEFAULT_WORD_BUDGET
) -> Iterator[WordLevel]:
    """Breadth-first word maps as numpy arrays, one level per length.

    Products of determinant-one letters are not renormalized: the computed
    determinant of a deep word is dominated by cancellation.
    """
    g = group.rank
    n_letters = 2 * g
    total = sum(count_reduced_words(g, n) for n in range(max_len + 1))
    if total > budget:
        raise WordBudgetExceeded(f"{total} words requested, budget is {budget}")
    lm = group.letter_maps
    la = np.array([m.a for m in lm])
    lb = np.array([m.b for m in lm])
    lc = np.array([m.c for m in lm])
    ld = np.array([m.d for m in lm])
    one = np.ones(1, dtype=complex)
    zero = np.zeros(1, dtype=complex)
    level = WordLevel(0, np.array([-1]), one, zero, zero.copy(), one.copy(), np.array([-1]))
    yield level
    for n in range(1, max_len + 1):
        if n == 1:
            parent = np.zeros(n_letters, dtype=int)
            last = np.arange(n_letters)
        else:
            parent = np.repeat(np.arange(len(level)), n_letters)
            last = np.tile(np.arange(n_letters), len(level))
            keep = last != (level.last[parent] + g) % n_letters
            parent, last = parent[keep], last[keep]
        pa, pb, pc, pd = level.a[parent], level.b[parent], level.c[parent], level.d[parent]
        xa, xb, xc, xd = la[last], lb[last], lc[last], ld[last]
        a = pa * xa + pb * xc
        b = pa * xb + pb * xd
        c = pc * xa + pd * xc
        d = pc * xb + pd * xd
        level = WordLevel(n, last, a, b, c, d, parent)
        yield level


def map_circles_array(a, b, c, d, centers, radii):
    """Vectorized :func:`map_circle` (images assumed to be circles)."""
    centers = np.asarray(centers, dtype=complex)
    radii = np.asarray(radii, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = c * centers + d
        s = np.abs(c) * radii
        refl = centers - radii * radii * np.conj(c) / np.conj(q)
        out_c = np.where(q == 0, a / np.where(c == 0, 1, c), (a * refl + b) / (c * refl + d))
        out_r = radii / np.abs(np.abs(q) ** 2 - s * s)
    return out_c, out_r


def nested_disks_at(group: MarkedSchottkyGroup, level: WordLevel, prev: WordLevel):
    """Nested disks for every word of ``level``, using prefix maps from ``prev``."""
    circles = group.require_witness()
    g = group.rank
    cen = np.array([c.center for c in circles])
    rad = np.array([c.radius for c in circles])
    land = (level.last + g) % (2 * g)
    p = level.parent
    return map_circles_array(prev.a[p], prev.b[p], prev.c[p], prev.d[p], cen[land], rad[land])


def limit_set_sample(group: MarkedSchottkyGroup, depth: int, budget: int = DEFAULT_WORD_BUDGET) -> list:
    """Centers of the nested disks of all reduced words of length ``depth``."""
    group.require_witness()
    if depth < 1:
        raise ValueError("depth must be at least 1")
    prev = None
    for level in word_levels(group, depth, budget):
        if level.length == depth:
            centers, _ = nested_disks_at(group, level, prev)
            return [complex(z) for z in centers]
        prev = level
    raise AssertionError("unreachable")
