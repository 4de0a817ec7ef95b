"""P_n realized as a subdivision of the cube I^{n-1}.

Coordinates are exact dyadic rationals stored as integer numerators over
the common denominator 2^{n-1}. Side ``s`` of a box records where the
element ``s + 2`` was inserted in the recursive construction.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import (
    OrderedPartition, Permutation, boundary_P, enumerate_faces_P, format_partition,
    partition_key,
)
from .permdiag import cp_factors, left_run_cell, right_run_cell


def denominator(n: int) -> int:
    return 1 << (n - 1)


@dataclass(frozen=True)
class Box:
    """A product of closed intervals [lo, hi] / 2^{n-1}; lo == hi is allowed."""

    n: int
    sides: tuple[tuple[int, int], ...]

    @property
    def dim(self) -> int:
        return sum(1 for lo, hi in self.sides if hi > lo)

    @property
    def volume(self) -> int:
        """Volume in its own dimension, in units of 2^{-(n-1)} per side."""
        v = 1
        for lo, hi in self.sides:
            if hi > lo:
                v *= hi - lo
        return v

    @property
    def lo(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.sides)

    @property
    def hi(self) -> tuple[int, ...]:
        return tuple(s[1] for s in self.sides)

    def contains(self, other: "Box") -> bool:
        return all(a <= c and d <= b for (a, b), (c, d) in zip(self.sides, other.sides))

    def __str__(self) -> str:
        if not self.sides:
            return "point"
        den = denominator(self.n)

        def fr(x: int) -> str:
            return str(Fraction(x, den))

        return "×".join(
            fr(lo) if lo == hi else f"[{fr(lo)},{fr(hi)}]" for lo, hi in self.sides
        )


def _coord(n: int, exponent: int | None) -> int:
    """Numerator of 1 - 2^{-exponent}; ``None`` stands for an infinite exponent."""
    den = denominator(n)
    return den if exponent is None else den - (den >> exponent)


def box_of_face(a: Sequence[Sequence[int]]) -> Box:
    """Box assigned to the face a by the recursive cube construction."""
    blocks = [tuple(b) for b in a]
    n = sum(len(b) for b in blocks)
    sides = []
    for m in range(n, 1, -1):
        idx = next(i for i, b in enumerate(blocks) if m in b)
        alone = len(blocks[idx]) == 1
        rest = [tuple(x for x in b if x != m) for b in blocks]
        rest = [b for b in rest if b]
        p = len(rest)
        sizes = [len(b) for b in rest]

        def exp(j: int) -> int | None:
            # a_j: elements in the last j blocks of the smaller partition
            if j == 0:
                return 0
            if j == p:
                return None
            return sum(sizes[p - j:])

        if alone:
            if idx == len(blocks) - 1:
                x = 0
            elif idx == 0:
                x = denominator(n)
            else:
                x = _coord(n, exp(len(blocks) - 1 - idx))
            sides.append((x, x))
        else:
            j = p - idx
            sides.append((_coord(n, exp(j - 1)), _coord(n, exp(j))))
        blocks = rest
    return Box(n, tuple(reversed(sides)))


def vertex_point(v: Sequence[int]) -> tuple[int, ...]:
    return box_of_face([(x,) for x in v]).lo


def is_cubical_vertex(v: Sequence[int]) -> bool:
    den = denominator(len(v))
    return all(x in (0, den) for x in vertex_point(v))


def cubical_vertices(n: int) -> set[Permutation]:
    """Cubical vertices by the recursion v -> {v|n, n|v} from the vertex of P_1."""
    verts = {(1,)}
    for m in range(2, n + 1):
        verts = {v + (m,) for v in verts} | {(m,) + v for v in verts}
    return {Permutation._make(v) for v in verts}


# ---------------------------------------------------------------- tiling

@dataclass
class Report:
    n: int
    check: str
    passed: bool
    witnesses: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@lru_cache(maxsize=None)
def face_boxes(n: int) -> dict[OrderedPartition, Box]:
    return {a: box_of_face(a) for a in enumerate_faces_P(n)}


def _interiors_meet(b1: Box, b2: Box) -> bool:
    """Relative interiors of two boxes of the same affine span intersect."""
    for (a, b), (c, d) in zip(b1.sides, b2.sides):
        if a == b:
            if c != d or a != c:
                return False
        elif min(b, d) <= max(a, c):
            return False
    return True


def _span(b: Box) -> tuple:
    return tuple((lo,) if lo == hi else None for lo, hi in b.sides)


def verify_tiling(n: int) -> Report:
    """Check that the face boxes form a cellular subdivision of I^{n-1}."""
    boxes = face_boxes(n)
    den = denominator(n)
    bad: list[str] = []

    for a, b in boxes.items():
        if b.dim != a.dim:
            bad.append(f"{a}: box {b} has dimension {b.dim}, face has {a.dim}")

    points = {}
    for a, b in boxes.items():
        if a.dim == 0:
            if b.lo in points:
                bad.append(f"vertices {points[b.lo]} and {a} share the point {b}")
            points[b.lo] = a

    top = boxes[OrderedPartition._make([tuple(range(1, n + 1))])]
    if top.sides != ((0, den),) * (n - 1):
        bad.append(f"top cell box {top} is not the whole cube")

    by_span: dict[tuple, list] = {}
    for a, b in boxes.items():
        by_span.setdefault(_span(b), []).append((a, b))
    for group in by_span.values():
        for (a1, b1), (a2, b2) in combinations(group, 2):
            if _interiors_meet(b1, b2):
                bad.append(f"interiors of {a1} and {a2} overlap")

    # every box facet is tiled exactly by the boxes of the boundary faces
    for a, b in boxes.items():
        if a.dim == 0:
            continue
        pieces = [boxes[f] for f in boundary_P(a)]
        covered = [False] * len(pieces)
        for s, (lo, hi) in enumerate(b.sides):
            if lo == hi:
                continue
            for end in (lo, hi):
                facet = Box(n, b.sides[:s] + ((end, end),) + b.sides[s + 1:])
                inside = [k for k, pc in enumerate(pieces) if facet.contains(pc)]
                for k in inside:
                    covered[k] = True
                if sum(pieces[k].volume for k in inside) != facet.volume:
                    bad.append(f"facet {facet} of {a} is not tiled by its boundary faces")
        for k, ok in enumerate(covered):
            if not ok:
                bad.append(f"boundary box {pieces[k]} of {a} lies on no facet of {b}")

    volume = Fraction(sum(b.volume for a, b in boxes.items() if a.dim == n - 1), den ** (n - 1))
    if volume != 1:
        bad.append(f"top-dimensional boxes have total volume {volume}")

    # the codimension-one cells cover each facet of the cube exactly once
    facets = [b for a, b in boxes.items() if a.dim == n - 2]
    full = den ** max(n - 2, 0)
    tiled = sum(1 for v in _cube_facet_volumes(n, facets).values() if v == full)
    if n > 1 and tiled != 2 * (n - 1):
        bad.append(f"only {tiled} of {2 * (n - 1)} cube facets are tiled by facets of P_{n}")
    details = {"volume": str(volume), "faces": len(boxes), "cube_facets_tiled": tiled}
    return Report(n, "tiling", not bad, bad[:50], details)


def _cube_facet_volumes(n: int, facets: list[Box]) -> dict[tuple[int, int], int]:
    den = denominator(n)
    vols: dict[tuple[int, int], int] = {}
    for b in facets:
        for s, (lo, hi) in enumerate(b.sides):
            if lo == hi and lo in (0, den):
                vols[(s, lo)] = vols.get((s, lo), 0) + b.volume
    return vols


# ---------------------------------------------------------------- subdivision cube pairs

@dataclass(frozen=True)
class SubdivisionCubePair:
    first: frozenset
    second: frozenset
    k1: int
    k2: int
    anchor: Permutation

    def __str__(self) -> str:
        def cells(s: Iterable) -> str:
            return "{" + ", ".join(format_partition(c) for c in sorted(s, key=partition_key)) + "}"
        return f"({cells(self.first)}, {cells(self.second)})"


def union_box(cells: Iterable[Sequence[Sequence[int]]]) -> Box | None:
    """The box covered by the cells' boxes, or None if their union is not one."""
    boxes = [box_of_face(c) for c in cells]
    if not boxes:
        return None
    n = boxes[0].n
    hull = Box(n, tuple(
        (min(b.sides[s][0] for b in boxes), max(b.sides[s][1] for b in boxes))
        for s in range(n - 1)
    ))
    if any(b.dim != hull.dim for b in boxes):
        return None
    if sum(b.volume for b in boxes) != hull.volume:
        return None
    return hull


def maximal_pair_scp(sigma: Sequence[int]) -> SubdivisionCubePair:
    """(union of A_σ, union of B_σ), checked to be cubes meeting at σ."""
    sigma = Permutation(sigma)
    A, B = cp_factors(sigma)
    pt = vertex_point(sigma)
    b1, b2 = union_box(A), union_box(B)
    if b1 is None or b1.hi != pt:
        raise ValueError(f"A_σ for σ = {sigma} is not a subcube with top corner at σ")
    if b2 is None or b2.lo != pt:
        raise ValueError(f"B_σ for σ = {sigma} is not a subcube with bottom corner at σ")
    return SubdivisionCubePair(
        frozenset(A), frozenset(B), left_run_cell(sigma).dim, right_run_cell(sigma).dim, sigma
    )


@lru_cache(maxsize=None)
def _face_arrays(n: int):
    boxes = face_boxes(n)
    faces = list(boxes)
    lo = np.array([boxes[a].lo for a in faces], dtype=np.int64).reshape(len(faces), n - 1)
    hi = np.array([boxes[a].hi for a in faces], dtype=np.int64).reshape(len(faces), n - 1)
    dim = np.array([a.dim for a in faces])
    vol = np.array([boxes[a].volume for a in faces], dtype=np.int64)
    return faces, lo, hi, dim, vol


def _coordinate_values(n: int) -> list[int]:
    return sorted({_coord(n, e) for e in range(n - 1)} | {denominator(n)})


def _representable(n: int, lo: tuple[int, ...], hi: tuple[int, ...], k: int) -> frozenset | None:
    faces, LO, HI, DIM, VOL = _face_arrays(n)
    inside = (DIM == k) & np.all(LO >= np.array(lo), axis=1) & np.all(HI <= np.array(hi), axis=1)
    vol = 1
    for a, b in zip(lo, hi):
        if b > a:
            vol *= b - a
    if int(VOL[inside].sum()) != vol:
        return None
    return frozenset(faces[i] for i in np.nonzero(inside)[0])


def _anchored_cubes(n: int, pt: tuple[int, ...], k: int, below: bool) -> list[tuple[Box, frozenset]]:
    values = _coordinate_values(n)
    out = []
    for sides in combinations(range(n - 1), k):
        options = [
            [x for x in values if (x < pt[s] if below else x > pt[s])] for s in sides
        ]
        for ends in product(*options):
            lo, hi = list(pt), list(pt)
            for s, x in zip(sides, ends):
                if below:
                    lo[s] = x
                else:
                    hi[s] = x
            cells = _representable(n, tuple(lo), tuple(hi), k)
            if cells is not None:
                out.append((Box(n, tuple(zip(lo, hi))), cells))
    return out


def enumerate_pairs_at(v: Sequence[int]) -> list[SubdivisionCubePair]:
    """Every pair of subdivision cubes of the top cell of P_n meeting at v.

    Exhaustive search over dyadic boxes; meant for small n.
    """
    v = Permutation(v)
    n = len(v)
    if n == 1:
        cell = frozenset([OrderedPartition._make([(1,)])])
        return [SubdivisionCubePair(cell, cell, 0, 0, v)]
    pt = vertex_point(v)
    out = []
    for k1 in range(n):
        k2 = n - 1 - k1
        firsts = _anchored_cubes(n, pt, k1, below=True)
        if not firsts:
            continue
        seconds = _anchored_cubes(n, pt, k2, below=False)
        for (_, c1), (_, c2) in product(firsts, seconds):
            out.append(SubdivisionCubePair(c1, c2, k1, k2, v))
    return out


def oracle_maximal_pair(v: Sequence[int]) -> SubdivisionCubePair | None:
    """The member of e_v whose cubes contain those of every other member."""
    pairs = enumerate_pairs_at(v)

    def box(cells: frozenset) -> Box:
        return union_box(cells)

    boxed = [(p, box(p.first), box(p.second)) for p in pairs]
    winners = [
        p for p, b1, b2 in boxed
        if all(b1.contains(c1) and b2.contains(c2) for _, c1, c2 in boxed)
    ]
    return winners[0] if len(winners) == 1 else None


def delta_P_from_maximal_pairs(n: int) -> frozenset:
    """Components e1 × e2 read off the oracle's maximal pairs over all vertices."""
    from itertools import permutations

    comps = set()
    for v in permutations(range(1, n + 1)):
        best = oracle_maximal_pair(v)
        if best is None:
            raise ValueError(f"no unique maximal pair at {format_partition([(x,) for x in v])}")
        comps.update(product(best.first, best.second))
    return frozenset(comps)


def verify_cubical(n: int) -> Report:
    """Count cubical vertices and compare the recursion with the corner test."""
    from itertools import permutations

    geometric = {Permutation._make(v) for v in permutations(range(1, n + 1)) if is_cubical_vertex(v)}
    recursive = cubical_vertices(n)
    bad = [
        f"{v}: corner test {v in geometric}, recursion {v in recursive}"
        for v in sorted(geometric ^ recursive)
    ]
    if len(recursive) != 1 << (n - 1):
        bad.append(f"{len(recursive)} cubical vertices, expected {1 << (n - 1)}")
    return Report(n, "cubical", not bad, bad, {"count": len(geometric)})


def verify_maximal_pairs(n: int) -> Report:
    """Compare the run formula with the oracle's maximal pair at every vertex."""
    from itertools import permutations

    from .permdiag import delta_P_top

    bad = []
    comps = set()
    for v in permutations(range(1, n + 1)):
        v = Permutation._make(v)
        best = oracle_maximal_pair(v)
        try:
            mine = maximal_pair_scp(v)
        except ValueError as exc:
            bad.append(str(exc))
            continue
        if best is None:
            bad.append(f"{v}: the oracle found no unique maximal pair")
        elif (best.first, best.second) != (mine.first, mine.second):
            bad.append(f"{v}: oracle {best}, formula {mine}")
        else:
            comps.update(product(best.first, best.second))
    if not bad and frozenset(comps) != delta_P_top(n).components:
        bad.append("cell pairs read off the maximal pairs differ from the run formula")
    return Report(n, "maximal-pairs", not bad, bad[:50], {"vertices": factorial(n)})
