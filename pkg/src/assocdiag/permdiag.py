"""The diagonal on the permutahedra: SCPs, step matrices, shifts and CPs.

Block positions are 1-based and counted left to right. Right shifts move
elements from block j into block j+1; left shifts move them from block j
into block j-1. A left-shift sequence is stored in the right-to-left order
in which it is applied: ``N[0]`` acts on the last block.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import chain, combinations, permutations, product
from typing import Iterable, Iterator, Sequence

from .combinatorics import OrderedPartition, Permutation, partition_key
from .errors import RejectedMoveError

Blocks = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------- runs

def left_runs(sigma: Sequence[int]) -> list[tuple[int, ...]]:
    """Maximal decreasing runs of sigma read left to right, as sorted blocks."""
    runs, cur = [], [sigma[0]]
    for x in sigma[1:]:
        if x < cur[-1]:
            cur.append(x)
        else:
            runs.append(tuple(sorted(cur)))
            cur = [x]
    runs.append(tuple(sorted(cur)))
    return runs


def right_runs(sigma: Sequence[int]) -> list[tuple[int, ...]]:
    """Maximal decreasing runs of sigma read right to left.

    Element ``i`` of the result is the i-th run met from the right, so the
    cell b_sigma lists these blocks in reverse.
    """
    return left_runs(sigma[::-1])


@dataclass(frozen=True)
class RunDecomposition:
    source: Permutation
    left_runs: tuple[tuple[int, ...], ...]
    right_runs: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, sigma: Sequence[int]) -> "RunDecomposition":
        return cls(Permutation(sigma), tuple(left_runs(sigma)), tuple(right_runs(sigma)))

    @property
    def p(self) -> int:
        return len(self.left_runs)

    @property
    def q(self) -> int:
        return len(self.right_runs)


def left_run_cell(sigma: Sequence[int]) -> OrderedPartition:
    """a_sigma: the left-run blocks in order."""
    return OrderedPartition._make(left_runs(sigma))


def right_run_cell(sigma: Sequence[int]) -> OrderedPartition:
    """b_sigma: the right-run blocks, last-found first."""
    return OrderedPartition._make(reversed(right_runs(sigma)))


# ---------------------------------------------------------------- shifts

@dataclass(frozen=True)
class ShiftSequence:
    """A chained sequence of right-shift ("R") or left-shift ("L") moves."""

    kind: str
    moves: tuple[frozenset[int], ...]

    def apply(self, a: OrderedPartition) -> OrderedPartition:
        p = len(a)
        if len(self.moves) != p - 1:
            raise RejectedMoveError(
                f"{self.kind}-sequence of length {len(self.moves)} does not fit {p} blocks"
            )
        for i, move in enumerate(self.moves):
            if self.kind == "R":
                a = right_shift(a, i + 1, move)
            else:
                a = left_shift(a, p - i, move)
        return a

    def trimmed(self) -> tuple[frozenset[int], ...]:
        """The moves with trailing identity moves dropped."""
        moves = list(self.moves)
        while moves and not moves[-1]:
            moves.pop()
        return tuple(moves)

    def __str__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, sorted(m))) + "}" for m in self.moves)
        return f"({inner})"


def right_shift(a: Sequence[Sequence[int]], j: int, M: Iterable[int]) -> OrderedPartition:
    """Move M from block j to block j+1."""
    M = frozenset(M)
    a = tuple(a)
    if not M:
        return OrderedPartition._make(a)
    if not 1 <= j < len(a):
        raise RejectedMoveError(f"right shift position {j} outside 1..{len(a) - 1}")
    src, dst = a[j - 1], a[j]
    if not M <= set(src) - {min(src)}:
        raise RejectedMoveError(f"{sorted(M)} is not a subset of block {j} minus its minimum")
    if min(M) <= max(dst):
        raise RejectedMoveError(f"min {sorted(M)} does not exceed max of block {j + 1}")
    new_src = tuple(x for x in src if x not in M)
    new_dst = tuple(sorted(dst + tuple(M)))
    return OrderedPartition._make(a[:j - 1] + (new_src, new_dst) + a[j + 1:])


def left_shift(a: Sequence[Sequence[int]], j: int, N: Iterable[int]) -> OrderedPartition:
    """Move N from block j to block j-1."""
    N = frozenset(N)
    a = tuple(a)
    if not N:
        return OrderedPartition._make(a)
    if not 2 <= j <= len(a):
        raise RejectedMoveError(f"left shift position {j} outside 2..{len(a)}")
    src, dst = a[j - 1], a[j - 2]
    if not N <= set(src) - {min(src)}:
        raise RejectedMoveError(f"{sorted(N)} is not a subset of block {j} minus its minimum")
    if min(N) <= max(dst):
        raise RejectedMoveError(f"min {sorted(N)} does not exceed max of block {j - 1}")
    new_src = tuple(x for x in src if x not in N)
    new_dst = tuple(sorted(dst + tuple(N)))
    return OrderedPartition._make(a[:j - 2] + (new_dst, new_src) + a[j:])


def _subsets(xs: Sequence[int]) -> Iterator[tuple[int, ...]]:
    return chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))


def _right_orbit(blocks: Blocks, j: int, moves: tuple) -> Iterator[tuple[Blocks, tuple]]:
    # j is a 0-based block index; every chained choice of M_j..M_{p-1}
    if j >= len(blocks) - 1:
        yield blocks, moves
        return
    src, dst = blocks[j], blocks[j + 1]
    top = dst[-1]
    cands = [x for x in src[1:] if x > top]
    for M in _subsets(cands):
        if M:
            nb = (blocks[:j] + (tuple(x for x in src if x not in M),
                                tuple(sorted(dst + M))) + blocks[j + 2:])
        else:
            nb = blocks
        yield from _right_orbit(nb, j + 1, moves + (frozenset(M),))


def _left_orbit(blocks: Blocks, j: int, moves: tuple) -> Iterator[tuple[Blocks, tuple]]:
    if j <= 0:
        yield blocks, moves
        return
    src, dst = blocks[j], blocks[j - 1]
    top = dst[-1]
    cands = [x for x in src[1:] if x > top]
    for N in _subsets(cands):
        if N:
            nb = (blocks[:j - 1] + (tuple(sorted(dst + N)),
                                    tuple(x for x in src if x not in N)) + blocks[j + 1:])
        else:
            nb = blocks
        yield from _left_orbit(nb, j - 1, moves + (frozenset(N),))


def right_orbit(a: OrderedPartition) -> dict[OrderedPartition, ShiftSequence]:
    """Every R_M(a), keyed by result, with the first M producing it."""
    out: dict[OrderedPartition, ShiftSequence] = {}
    for blocks, moves in _right_orbit(tuple(a), 0, ()):
        out.setdefault(OrderedPartition._make(blocks), ShiftSequence("R", moves))
    return out


def left_orbit(b: OrderedPartition) -> dict[OrderedPartition, ShiftSequence]:
    """Every L_N(b), keyed by result, with the first N producing it."""
    out: dict[OrderedPartition, ShiftSequence] = {}
    for blocks, moves in _left_orbit(tuple(b), len(b) - 1, ()):
        out.setdefault(OrderedPartition._make(blocks), ShiftSequence("L", moves))
    return out


# ---------------------------------------------------------------- complementary pairs

@dataclass(frozen=True)
class ComplementaryPair:
    alpha: OrderedPartition
    beta: OrderedPartition
    sigma: Permutation = field(compare=False)
    M: ShiftSequence = field(compare=False)
    N: ShiftSequence = field(compare=False)

    def __str__(self) -> str:
        return f"{self.alpha} × {self.beta}"


def scp(sigma: Sequence[int]) -> ComplementaryPair:
    """The strong complementary pair a_sigma × b_sigma."""
    sigma = Permutation(sigma)
    a, b = left_run_cell(sigma), right_run_cell(sigma)
    return ComplementaryPair(
        a, b, sigma,
        ShiftSequence("R", (frozenset(),) * (len(a) - 1)),
        ShiftSequence("L", (frozenset(),) * (len(b) - 1)),
    )


def cp_factors(sigma: Sequence[int]) -> tuple[dict, dict]:
    """(A_sigma, B_sigma) as dicts from cell to the shift sequence reaching it."""
    return right_orbit(left_run_cell(sigma)), left_orbit(right_run_cell(sigma))


def enumerate_cps(sigma: Sequence[int]) -> list[ComplementaryPair]:
    """All CPs R_M(a_sigma) × L_N(b_sigma), in canonical order."""
    sigma = Permutation(sigma)
    A, B = cp_factors(sigma)
    out = [
        ComplementaryPair(alpha, beta, sigma, A[alpha], B[beta])
        for alpha, beta in product(A, B)
    ]
    out.sort(key=lambda cp: (partition_key(cp.alpha), partition_key(cp.beta)))
    return out


# ---------------------------------------------------------------- step matrices

@dataclass(frozen=True)
class StepMatrix:
    """Rows indexed by right runs (first found on top), columns by left runs."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def is_step(self) -> bool:
        """Positive entries contiguous and increasing along every row and column."""
        lines = list(self.rows) + [tuple(r[j] for r in self.rows) for j in range(self.shape[1])]
        for line in lines:
            idx = [k for k, x in enumerate(line) if x]
            if not idx or idx[-1] - idx[0] + 1 != len(idx):
                return False
            vals = [line[k] for k in idx]
            if vals != sorted(vals):
                return False
        return True

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows)


def cp_matrix(alpha: Sequence[Sequence[int]], beta: Sequence[Sequence[int]]) -> StepMatrix:
    """Matrix of a pair: entry (i, j) is the element of B_i ∩ A_j, 0 if none.

    B_i is the i-th block of ``beta`` counted from the right.
    """
    rows = []
    for rb in reversed(beta):
        row = []
        for ca in alpha:
            common = set(rb) & set(ca)
            if len(common) > 1:
                raise ValueError(f"blocks {rb} and {ca} share more than one element")
            row.append(common.pop() if common else 0)
        rows.append(tuple(row))
    return StepMatrix(tuple(rows))


def step_matrix(sigma: Sequence[int]) -> StepMatrix:
    pair = scp(sigma)
    return cp_matrix(pair.alpha, pair.beta)


def matrix_to_pair(m: StepMatrix) -> tuple[OrderedPartition, OrderedPartition]:
    """Read (alpha, beta) back off a matrix."""
    q, p = m.shape
    alpha = [tuple(sorted(m.rows[i][j] for i in range(q) if m.rows[i][j])) for j in range(p)]
    beta = [tuple(sorted(x for x in row if x)) for row in reversed(m.rows)]
    return OrderedPartition._make(alpha), OrderedPartition._make(beta)


def matrix_right_shift(m: StepMatrix, j: int, M: Iterable[int]) -> StepMatrix:
    """Move the entries M of column j one column to the right."""
    M = set(M)
    if not 1 <= j < m.shape[1]:
        raise RejectedMoveError(f"column {j} has no column to its right")
    rows = [list(r) for r in m.rows]
    for r in rows:
        if r[j - 1] in M:
            if r[j]:
                raise RejectedMoveError(f"cell right of {r[j - 1]} is occupied")
            r[j], r[j - 1] = r[j - 1], 0
    return StepMatrix(tuple(tuple(r) for r in rows))


def matrix_down_shift(m: StepMatrix, i: int, N: Iterable[int]) -> StepMatrix:
    """Move the entries N of row i one row down."""
    N = set(N)
    if not 1 <= i < m.shape[0]:
        raise RejectedMoveError(f"row {i} has no row below it")
    rows = [list(r) for r in m.rows]
    for j in range(len(rows[0])):
        if rows[i - 1][j] in N:
            if rows[i][j]:
                raise RejectedMoveError(f"cell below {rows[i - 1][j]} is occupied")
            rows[i][j], rows[i - 1][j] = rows[i - 1][j], 0
    return StepMatrix(tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------- diagonal sets

@dataclass(frozen=True)
class DiagonalSet:
    """A set of product cells alpha × beta, canonically ordered on iteration."""

    polytope: str
    n: int
    components: frozenset

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.components

    def sorted(self) -> list:
        if self.polytope == "P":
            return sorted(self.components, key=lambda c: (partition_key(c[0]), partition_key(c[1])))
        from .associahedron import tree_key
        return sorted(self.components, key=lambda c: (tree_key(c[0]), tree_key(c[1])))


def _cps_of_chunk(sigmas: list[tuple[int, ...]]) -> set:
    out = set()
    for s in sigmas:
        A, B = cp_factors(s)
        out.update(product(A, B))
    return out


def _chunks(items: list, jobs: int) -> list[list]:
    size = max(1, -(-len(items) // (jobs * 4)))
    return [items[k:k + size] for k in range(0, len(items), size)]


def delta_P_top(n: int, jobs: int = 1) -> DiagonalSet:
    """Δ_P on the top cell of P_n: the union of A_σ × B_σ over σ in S_n."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if jobs <= 1:
        return _delta_P_top_cached(n)
    sigmas = list(permutations(range(1, n + 1)))
    comps: set = set()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_cps_of_chunk, _chunks(sigmas, jobs)):
            comps |= part
    return DiagonalSet("P", n, frozenset(comps))


@lru_cache(maxsize=None)
def _delta_P_top_cached(n: int) -> DiagonalSet:
    comps = _cps_of_chunk(list(permutations(range(1, n + 1))))
    return DiagonalSet("P", n, frozenset(comps))


def delta_P_face(a: OrderedPartition) -> DiagonalSet:
    """Comultiplicative extension of Δ_P to the face a ≅ P_|A_1| × ... × P_|A_p|."""
    factors = []
    for block in a:
        relabel = dict(enumerate(block, start=1))
        factors.append([
            (tuple(tuple(relabel[x] for x in b) for b in al),
             tuple(tuple(relabel[x] for x in b) for b in be))
            for al, be in delta_P_top(len(block)).components
        ])
    comps = set()
    for choice in product(*factors):
        alpha = OrderedPartition._make(b for al, _ in choice for b in al)
        beta = OrderedPartition._make(b for _, be in choice for b in be)
        comps.add((alpha, beta))
    return DiagonalSet("P", a.n, frozenset(comps))
