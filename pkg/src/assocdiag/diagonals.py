"""Diagonals on the associahedra and the matching-pair/CP correspondence.

Two independent routes compute the diagonal on the top cell of K_{n+1}:

* ``delta_K_su`` pushes the non-degenerate complementary pairs of Δ_P
  through the Tonks projection;
* ``delta_K_magical`` lists every pair of faces of complementary dimension
  that is comparable in the Tamari order.

``verify_agreement`` compares them and round-trips every matching pair back
to its complementary pair.
"""
from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Sequence

import numpy as np

from .associahedron import (
    KFace, Tree, boundary_K, corolla, faces_K, format_tree, graft, kface_index,
    tree_key, tree_of,
)
from .combinatorics import (
    OrderedPartition, Permutation, boundary_P, enumerate_faces_P, format_partition,
    inversion_mask, is_degenerate, min_vertex, weak_leq,
)
from .errors import NotMatchingPairError, PathNotFoundError, RejectedMoveError
from .permdiag import (
    ComplementaryPair, DiagonalSet, ShiftSequence, _chunks, cp_factors, delta_P_face,
    delta_P_top, left_run_cell, left_shift, right_run_cell, right_shift, right_runs,
)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- projected complementary pairs

def _nondegenerate_chunk(sigmas: list[tuple[int, ...]]) -> set:
    out = set()
    for s in sigmas:
        A, B = cp_factors(s)
        alphas = [a for a in A if not is_degenerate(a)]
        if not alphas:
            continue
        betas = [b for b in B if not is_degenerate(b)]
        out.update(product(alphas, betas))
    return out


def nondegenerate_cps(n: int, jobs: int = 1) -> frozenset:
    """Distinct non-degenerate components α × β of Δ_P(P_n)."""
    if jobs <= 1:
        return _nondegenerate_cps_cached(n)
    sigmas = list(permutations(range(1, n + 1)))
    out: set = set()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_nondegenerate_chunk, _chunks(sigmas, jobs)):
            out |= part
    return frozenset(out)


@lru_cache(maxsize=None)
def _nondegenerate_cps_cached(n: int) -> frozenset:
    return frozenset(_nondegenerate_chunk(list(permutations(range(1, n + 1)))))


def delta_K_su(n: int, jobs: int = 1) -> DiagonalSet:
    """θ×θ applied to the non-degenerate CPs of Δ_P(P_n)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    comps = frozenset((tree_of(a), tree_of(b)) for a, b in nondegenerate_cps(n, jobs))
    return DiagonalSet("K", n, comps)


# ---------------------------------------------------------------- magical formula

def matching_pairs(n: int) -> list[tuple[KFace, KFace]]:
    """All (F, G) with |F| + |G| = n - 1 and F <= G in the Tamari order."""
    out = []
    # masks hold one bit per value pair; past 63 bits fall back to Python ints
    dtype = np.int64 if n * (n - 1) // 2 < 63 else object
    for k in range(n):
        Fs, Gs = faces_K(n, k), faces_K(n, n - 1 - k)
        fmax = np.array([F.max_mask for F in Fs], dtype=dtype)
        gmin = np.array([G.min_mask for G in Gs], dtype=dtype)
        gnot = ~gmin
        step = max(1, 2_000_000 // max(1, len(Gs)))
        for lo in range(0, len(Fs), step):
            hits = (fmax[lo:lo + step, None] & gnot[None, :]) == 0
            for i, j in zip(*np.nonzero(hits)):
                out.append((Fs[lo + i], Gs[j]))
    return out


def delta_K_magical(n: int) -> DiagonalSet:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return DiagonalSet("K", n, frozenset((F.tree, G.tree) for F, G in matching_pairs(n)))


# ---------------------------------------------------------------- shift paths

def rshift_path(src: OrderedPartition, dst: OrderedPartition) -> ShiftSequence:
    """M with R_M(src) = dst, sweeping block positions left to right."""
    if len(src) != len(dst) or src.n != dst.n:
        raise PathNotFoundError(f"{src} and {dst} have different shapes")
    cur, moves = src, []
    for j in range(1, len(src)):
        M = frozenset(cur[j - 1]) - frozenset(dst[j - 1])
        try:
            cur = right_shift(cur, j, M)
        except RejectedMoveError as exc:
            raise PathNotFoundError(f"no right shifts take {src} to {dst}: {exc}") from None
        moves.append(M)
    if cur != dst:
        raise PathNotFoundError(f"no right shifts take {src} to {dst}")
    return ShiftSequence("R", tuple(moves))


def _lshift_sweep(a: OrderedPartition, b: OrderedPartition) -> ShiftSequence:
    cur, moves = a, []
    for j in range(len(a), 1, -1):
        N = frozenset(cur[j - 1]) - frozenset(b[j - 1])
        try:
            cur = left_shift(cur, j, N)
        except RejectedMoveError as exc:
            raise PathNotFoundError(f"no left shifts take {a} to {b}: {exc}") from None
        moves.append(N)
    if cur != b:
        raise PathNotFoundError(f"no left shifts take {a} to {b}")
    return ShiftSequence("L", tuple(moves))


def _single_left_move(u: OrderedPartition, w: OrderedPartition) -> tuple[int, int] | None:
    """(position, element) if w = L_{x}(u) for a single x, else None."""
    where_u = {x: j for j, blk in enumerate(u, 1) for x in blk}
    moved = [x for j, blk in enumerate(w, 1) for x in blk if where_u[x] != j]
    if len(moved) != 1:
        return None
    x = moved[0]
    j = where_u[x]
    try:
        if left_shift(u, j, {x}) != w:
            return None
    except RejectedMoveError:
        return None
    return j, x


def transposition_chain(a: OrderedPartition, b: OrderedPartition) -> list[Permutation]:
    """A saturated weak-order chain from min a to min b whose right-run cells
    of a's dimension are successive single left shifts ending at b.

    Returns the chain of vertices; raises PathNotFoundError if none exists.
    """
    start, goal = min_vertex(a), min_vertex(b)
    goal_mask = inversion_mask(goal)
    if inversion_mask(start) & goal_mask != inversion_mask(start):
        raise PathNotFoundError(f"min {a} is not below min {b}")
    blocks = len(a)
    dead: set[tuple[Permutation, OrderedPartition]] = set()

    def dfs(v: Permutation, last: OrderedPartition, chain: list[Permutation]) -> bool:
        if v == goal:
            return last == b
        state = (v, last)
        if state in dead:
            return False
        for i in range(len(v) - 1):
            x, y = v[i], v[i + 1]
            if x > y or not goal_mask >> _pair_index(len(v), x, y) & 1:
                continue
            w = Permutation._make(v[:i] + (y, x) + v[i + 2:])
            u = right_run_cell(w)
            nxt = last
            if len(u) == blocks and u != last:
                if _single_left_move(last, u) is None:
                    continue
                nxt = u
            chain.append(w)
            if dfs(w, nxt, chain):
                return True
            chain.pop()
        dead.add(state)
        return False

    chain = [start]
    if right_run_cell(start) != a or not dfs(start, a, chain):
        raise PathNotFoundError(f"no transposition chain from {a} to {b}")
    return chain


@lru_cache(maxsize=None)
def _pair_bits_index(n: int) -> dict[tuple[int, int], int]:
    from itertools import combinations
    return {pair: k for k, pair in enumerate(combinations(range(1, n + 1), 2))}


def _pair_index(n: int, x: int, y: int) -> int:
    return _pair_bits_index(n)[(min(x, y), max(x, y))]


def _lshift_from_chain(a: OrderedPartition, b: OrderedPartition) -> ShiftSequence:
    chain = transposition_chain(a, b)
    cells = [a]
    for v in chain[1:]:
        u = right_run_cell(v)
        if len(u) == len(a) and u != cells[-1]:
            cells.append(u)
    moved: dict[int, set[int]] = {}
    for u, w in zip(cells, cells[1:]):
        j, x = _single_left_move(u, w)
        moved.setdefault(j, set()).add(x)
    seq = ShiftSequence("L", tuple(frozenset(moved.get(j, ())) for j in range(len(a), 1, -1)))
    try:
        result = seq.apply(a)
    except RejectedMoveError as exc:
        raise PathNotFoundError(f"chain moves do not form an admissible sequence: {exc}") from None
    if result != b:
        raise PathNotFoundError(f"chain moves give {result}, not {b}")
    return seq


def lshift_path(
    a: OrderedPartition, b: OrderedPartition, method: str = "sweep", check: bool = True
) -> ShiftSequence:
    """N with L_N(a) = b, where a is the right-run cell of a vertex of K.

    ``method="sweep"`` reads each move off block differences right to left;
    ``method="chain"`` assembles the moves from a chain of increasing
    transpositions between the minimal vertices.
    """
    if check:
        if len(a) != len(b) or a.n != b.n:
            raise ValueError(f"{a} and {b} have different dimensions")
        v = min_vertex(a)
        if right_run_cell(v) != a or is_degenerate(a):
            raise ValueError(f"{a} is not the right-run cell of an associahedral vertex")
        if is_degenerate(b):
            raise ValueError(f"{b} is degenerate")
        if not weak_leq(v, min_vertex(b)):
            raise ValueError(f"min {a} is not below min {b}")
    if method == "sweep":
        return _lshift_sweep(a, b)
    if method == "chain":
        return _lshift_from_chain(a, b)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- MP -> CP

def _as_face(F: KFace | Tree, n: int | None = None) -> KFace:
    if isinstance(F, KFace):
        t = F.tree
    else:
        t = F
    face = KFace(t)
    return kface_index(face.n).get(t, face)


def mp_to_cp(F: KFace | Tree, G: KFace | Tree, method: str = "sweep") -> ComplementaryPair:
    """The complementary pair F_min × G_min lying over the matching pair F × G."""
    F, G = _as_face(F), _as_face(G)
    n = F.n
    if G.n != n:
        raise NotMatchingPairError(f"faces of different associahedra: {F} and {G}")
    if F.dim + G.dim != n - 1:
        raise NotMatchingPairError(f"dimensions {F.dim} + {G.dim} != {n - 1}")
    if not weak_leq(F.max_vertex, G.min_vertex):
        raise NotMatchingPairError(f"{F} is not below {G} in the Tamari order")
    sigma = F.max_vertex
    f_max = left_run_cell(sigma)
    if f_max != F.max_cell:
        raise PathNotFoundError(f"maximal cell {F.max_cell} of {F} is not a_σ = {f_max}")
    M = rshift_path(f_max, F.min_cell)
    beta = right_run_cell(sigma)
    N = lshift_path(beta, G.min_cell, method=method)
    cp = ComplementaryPair(F.min_cell, G.min_cell, sigma, M, N)
    if tree_of(cp.alpha) != F.tree or tree_of(cp.beta) != G.tree:
        raise PathNotFoundError(f"{cp} does not project onto {F} × {G}")
    return cp


# ---------------------------------------------------------------- agreement

@dataclass
class AgreementCertificate:
    n: int
    su_count: int
    magical_count: int
    equal: bool
    preimage_unique: bool
    roundtrip_ok: bool
    missing: list[str] = field(default_factory=list)
    extra: list[str] = field(default_factory=list)
    roundtrip_failures: list[str] = field(default_factory=list)
    runtime_ms: int = 0
    schema_version: int = SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        return self.equal and self.preimage_unique and self.roundtrip_ok

    def to_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("runtime_ms")
        return d


def _pair_str(pair: tuple[Tree, Tree]) -> str:
    return f"{format_tree(pair[0])} × {format_tree(pair[1])}"


def verify_agreement(n: int, jobs: int = 1, roundtrip: bool = True) -> AgreementCertificate:
    start = time.perf_counter()
    cps = nondegenerate_cps(n, jobs)
    su = delta_K_su(n, jobs)
    mps = matching_pairs(n)
    magical = frozenset((F.tree, G.tree) for F, G in mps)
    key = lambda c: (tree_key(c[0]), tree_key(c[1]))  # noqa: E731
    missing = sorted(magical - su.components, key=key)
    extra = sorted(su.components - magical, key=key)
    failures = []
    if roundtrip:
        for F, G in mps:
            try:
                cp = mp_to_cp(F, G)
                if (cp.alpha, cp.beta) not in cps:
                    failures.append(f"{F} × {G}: {cp} is not a non-degenerate CP")
            except (PathNotFoundError, NotMatchingPairError) as exc:
                failures.append(f"{F} × {G}: {exc}")
    return AgreementCertificate(
        n=n,
        su_count=len(su),
        magical_count=len(magical),
        equal=not missing and not extra,
        preimage_unique=len(cps) == len(su),
        roundtrip_ok=not failures,
        missing=[_pair_str(c) for c in missing],
        extra=[_pair_str(c) for c in extra],
        roundtrip_failures=failures,
        runtime_ms=round((time.perf_counter() - start) * 1000),
    )


# ---------------------------------------------------------------- faces of K

def delta_K_face(F: KFace | Tree) -> DiagonalSet:
    """Comultiplicative extension: one factor Δ_K(K_r) per node of arity r."""
    t = F.tree if isinstance(F, KFace) else F

    def options(s: Tree) -> set[tuple[Tree, Tree]]:
        if not s:
            return {((), ())}
        kids = [options(c) for c in s]
        out = set()
        for x, y in delta_K_su(len(s) - 1).components:
            for choice in product(*kids):
                out.add((graft(x, [c[0] for c in choice]), graft(y, [c[1] for c in choice])))
        return out

    n = sum(1 for _ in _leaves(t)) - 1
    return DiagonalSet("K", n, frozenset(options(t)))


def _leaves(t: Tree):
    if not t:
        yield t
    for c in t:
        yield from _leaves(c)


# ---------------------------------------------------------------- chain maps

@dataclass
class ChainMapReport:
    polytope: str
    n: int
    chain_map_ok: bool
    boundary_squared_ok: bool
    offending: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.chain_map_ok and self.boundary_squared_ok

    def to_dict(self) -> dict:
        return asdict(self)


def _odd(counter: Counter) -> set:
    return {k for k, v in counter.items() if v % 2}


def chain_map_check(polytope: str, n: int) -> ChainMapReport:
    """Check ∂Δ = (∂⊗1 + 1⊗∂)Δ on the top cell and ∂∂ = 0, over GF(2)."""
    if polytope == "P":
        top = OrderedPartition._make([tuple(range(1, n + 1))])
        delta_top = delta_P_top(n).components
        bd = boundary_P
        delta_face = lambda f: delta_P_face(f).components  # noqa: E731
        fmt = format_partition
        faces = list(enumerate_faces_P(n))
    elif polytope == "K":
        top = corolla(n + 1)
        delta_top = delta_K_su(n).components
        bd = lambda t: {F.tree for F in boundary_K(t)}  # noqa: E731
        delta_face = lambda f: delta_K_face(f).components  # noqa: E731
        fmt = format_tree
        faces = [F.tree for d in range(n) for F in faces_K(n, d)]
    else:
        raise ValueError(f"unknown polytope {polytope!r}")

    lhs: Counter = Counter()
    for x, y in delta_top:
        for x2 in bd(x):
            lhs[(x2, y)] += 1
        for y2 in bd(y):
            lhs[(x, y2)] += 1
    rhs: Counter = Counter()
    for f in bd(top):
        rhs.update(delta_face(f))
    diff = _odd(lhs) ^ _odd(rhs)
    offending = [f"Δ∂ ≠ ∂Δ at {fmt(x)} × {fmt(y)}" for x, y in sorted(diff, key=str)[:20]]

    dd_bad = []
    for f in faces:
        twice: Counter = Counter()
        for g in bd(f):
            twice.update(bd(g))
        if _odd(twice):
            dd_bad.append(f)
    offending += [f"∂∂ ≠ 0 on {fmt(f)}" for f in dd_bad[:20]]
    return ChainMapReport(polytope, n, not diff, not dd_bad, offending)


def clear_caches() -> None:
    """Drop every memoized enumeration, e.g. before timing a cold run."""
    from . import associahedron, combinatorics, cube, permdiag

    for fn in (
        associahedron._compositions, associahedron.trees_with_leaves,
        associahedron._trees_by_dim, associahedron.faces_K, associahedron.kface_index,
        combinatorics._pair_bits, cube.face_boxes, cube._face_arrays,
        _nondegenerate_cps_cached, _pair_bits_index, permdiag._delta_P_top_cached,
    ):
        fn.cache_clear()
