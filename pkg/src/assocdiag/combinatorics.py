"""Permutations, ordered set partitions and the weak order on S_n.

A permutation is stored as the tuple of its values read left to right; an
ordered partition as a tuple of blocks, each block a sorted tuple. Both are
thin ``tuple`` subclasses so they hash, compare and sort like tuples.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial
from typing import Iterable, Iterator, Sequence

from .errors import NotationError, SizeMismatchError

#: Faces of P_n are enumerated eagerly only up to this n unless overridden.
DEFAULT_MAX_N = 9


class Permutation(tuple):
    """A vertex of the permutahedron P_n, i.e. a word in 1..n."""

    __slots__ = ()

    def __new__(cls, word: Iterable[int]) -> "Permutation":
        word = tuple(int(x) for x in word)
        if not word or sorted(word) != list(range(1, len(word) + 1)):
            raise NotationError(f"not a permutation of 1..n: {word!r}")
        return tuple.__new__(cls, word)

    @classmethod
    def _make(cls, word: Iterable[int]) -> "Permutation":
        # unchecked constructor for internal hot paths
        return tuple.__new__(cls, word)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._make(range(1, n + 1))

    @classmethod
    def reversal(cls, n: int) -> "Permutation":
        return cls._make(range(n, 0, -1))

    @property
    def n(self) -> int:
        return len(self)

    @property
    def word(self) -> tuple[int, ...]:
        return tuple(self)

    def as_partition(self) -> "OrderedPartition":
        return OrderedPartition._make((x,) for x in self)

    def __str__(self) -> str:
        return format_permutation(self)

    def __repr__(self) -> str:
        return f"Permutation('{self}')"


class OrderedPartition(tuple):
    """A face A_1|...|A_p of P_n; blocks are kept as ascending tuples."""

    __slots__ = ()

    def __new__(cls, blocks: Iterable[Iterable[int]]) -> "OrderedPartition":
        blocks = tuple(tuple(sorted(int(x) for x in b)) for b in blocks)
        if not blocks or any(not b for b in blocks):
            raise NotationError(f"empty block in {blocks!r}")
        flat = sorted(x for b in blocks for x in b)
        if flat != list(range(1, len(flat) + 1)):
            raise NotationError(f"blocks do not cover 1..n exactly once: {blocks!r}")
        return tuple.__new__(cls, blocks)

    @classmethod
    def _make(cls, blocks: Iterable[tuple[int, ...]]) -> "OrderedPartition":
        return tuple.__new__(cls, blocks)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self)

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self)

    @property
    def dim(self) -> int:
        return self.n - len(self)

    def is_vertex(self) -> bool:
        return all(len(b) == 1 for b in self)

    def __str__(self) -> str:
        return format_partition(self)

    def __repr__(self) -> str:
        return f"OrderedPartition('{self}')"


# ---------------------------------------------------------------- notation

def _split_elements(token: str, compact: bool) -> list[int]:
    token = token.strip()
    if not token:
        raise NotationError("empty block")
    if "," in token or not compact:
        parts = token.split(",")
    else:
        parts = list(token)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise NotationError(f"bad element in {token!r}") from None


def parse_permutation(text: str) -> Permutation:
    """Parse ``"2|1|3|5|4"`` or the compact ``"21354"`` (n <= 9)."""
    text = text.strip().replace(" ", "")
    if "|" in text:
        word = []
        for tok in text.split("|"):
            elems = _split_elements(tok, compact=False)
            if len(elems) != 1:
                raise NotationError(f"{text!r}: a permutation has one value per slot")
            word.extend(elems)
    else:
        word = _split_elements(text, compact=True)
    return Permutation(word)


def parse_partition(text: str) -> OrderedPartition:
    """Parse ``"12|3|45"``; blocks may be written in any internal order."""
    text = text.strip().replace(" ", "")
    if not text:
        raise NotationError("empty partition")
    compact = "," not in text
    return OrderedPartition(_split_elements(tok, compact) for tok in text.split("|"))


def format_permutation(v: Sequence[int]) -> str:
    return "|".join(str(x) for x in v)


def format_partition(a: Sequence[Sequence[int]]) -> str:
    sep = "" if sum(len(b) for b in a) <= 9 else ","
    return "|".join(sep.join(str(x) for x in b) for b in a)


# ---------------------------------------------------------------- weak order

@lru_cache(maxsize=None)
def _pair_bits(n: int) -> dict[tuple[int, int], int]:
    return {pair: 1 << k for k, pair in enumerate(combinations(range(1, n + 1), 2))}


def inversion_mask(word: Sequence[int]) -> int:
    """Inversion set of ``word`` packed into an int, one bit per value pair."""
    bits = _pair_bits(len(word))
    mask = 0
    for i, x in enumerate(word):
        for y in word[i + 1:]:
            if y < x:
                mask |= bits[(y, x)]
    return mask


def inversion_set(v: Sequence[int]) -> frozenset[tuple[int, int]]:
    """Value pairs (i, j), i < j, with j to the left of i."""
    return frozenset(
        (y, x) for i, x in enumerate(v) for y in v[i + 1:] if y < x
    )


def weak_leq(u: Sequence[int], v: Sequence[int]) -> bool:
    """Weak (Bruhat) order: inversion-set containment."""
    if len(u) != len(v):
        raise SizeMismatchError(f"permutations of different sizes: {len(u)} vs {len(v)}")
    mu = inversion_mask(u)
    return mu & inversion_mask(v) == mu


# ---------------------------------------------------------------- faces of P_n

def vertices_of(a: Sequence[Sequence[int]]) -> set[Permutation]:
    """All vertices of a face: each block listed in every possible order."""
    return {
        Permutation._make(x for part in choice for x in part)
        for choice in product(*(permutations(b) for b in a))
    }


def min_vertex(a: Sequence[Sequence[int]]) -> Permutation:
    return Permutation._make(x for b in a for x in sorted(b))


def max_vertex(a: Sequence[Sequence[int]]) -> Permutation:
    return Permutation._make(x for b in a for x in sorted(b, reverse=True))


def extreme_vertices(a: Sequence[Sequence[int]]) -> tuple[Permutation, Permutation]:
    return min_vertex(a), max_vertex(a)


def face_leq_P(e: OrderedPartition, f: OrderedPartition) -> bool:
    """e <= f iff an oriented edge path runs from max e to min f."""
    if e.n != f.n:
        raise SizeMismatchError(f"faces of different P_n: {e.n} vs {f.n}")
    return weak_leq(max_vertex(e), min_vertex(f))


def is_degenerate(a: Sequence[Sequence[int]]) -> bool:
    """True iff some block holds x < z with a value x < y < z in a later block.

    Vertices are never degenerate.
    """
    later: list[int] = []
    for block in reversed(a):
        if len(block) > 1:
            lo, hi = min(block), max(block)
            if any(lo < y < hi for y in later):
                return True
        later.extend(block)
    return False


def _ordered_splits(block: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    for r in range(1, len(block)):
        for left in combinations(block, r):
            right = tuple(x for x in block if x not in left)
            yield left, right


def boundary_P(a: OrderedPartition) -> set[OrderedPartition]:
    """Mod-2 cellular boundary: split one block into an ordered pair."""
    out = set()
    for j, block in enumerate(a):
        for left, right in _ordered_splits(block):
            out.add(OrderedPartition._make(a[:j] + (left, right) + a[j + 1:]))
    return out


def _partitions_into(elems: tuple[int, ...], p: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    if p == 1:
        yield (elems,)
        return
    m = len(elems)
    for r in range(1, m - p + 2):
        for first in combinations(elems, r):
            rest = tuple(x for x in elems if x not in first)
            for tail in _partitions_into(rest, p - 1):
                yield (first,) + tail


def enumerate_faces_P(
    n: int, dim: int | None = None, *, max_n: int = DEFAULT_MAX_N
) -> Iterator[OrderedPartition]:
    """Lazily yield the faces of P_n, optionally only those of one dimension."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the enumeration cap {max_n}; raise max_n to override")
    if dim is not None and not 0 <= dim <= n - 1:
        raise ValueError(f"dim must lie in 0..{n - 1}, got {dim}")
    elems = tuple(range(1, n + 1))
    block_counts = [n - dim] if dim is not None else range(1, n + 1)
    for p in block_counts:
        for blocks in _partitions_into(elems, p):
            yield OrderedPartition._make(blocks)


def fubini(n: int) -> int:
    """Number of ordered set partitions of an n-set."""
    # sum over block counts of p! * Stirling2(n, p)
    stirling = [[0] * (n + 1) for _ in range(n + 1)]
    stirling[0][0] = 1
    for i in range(1, n + 1):
        for k in range(1, i + 1):
            stirling[i][k] = k * stirling[i - 1][k] + stirling[i - 1][k - 1]
    return sum(factorial(k) * stirling[n][k] for k in range(n + 1))


def relabel(a: Sequence[Sequence[int]], mapping: dict[int, int]) -> OrderedPartition:
    return OrderedPartition._make(tuple(sorted(mapping[x] for x in b)) for b in a)


def partition_key(a: Sequence[Sequence[int]]) -> tuple:
    """Canonical sort key: block count, then blocks lexicographically."""
    return (len(a), tuple(a))
