"""Planar rooted trees, the Tonks projection and the Tamari order.

A tree is a nested tuple: a leaf is ``()`` and an internal node is the
tuple of its (at least two) children. Trees with n+1 leaves index the faces
of the associahedron K_{n+1}.

Leaves are numbered 1..n+1 left to right and gap ``i`` sits between leaves
i and i+1. An ordered partition of 1..n puts gap i at the level of the block
holding i; later blocks are closer to the root.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterator, Sequence

from .combinatorics import (
    OrderedPartition, Permutation, inversion_mask, is_degenerate, max_vertex,
    min_vertex,
)
from .errors import NotationError, SizeMismatchError
from .permdiag import left_orbit, right_run_cell

Tree = tuple
LEAF: Tree = ()


# ---------------------------------------------------------------- notation

def format_tree(t: Tree) -> str:
    if not t:
        return "o"
    return "(" + "".join(format_tree(c) for c in t) + ")"


def parse_tree(text: str) -> Tree:
    """Parse ``tree := "o" | "(" tree tree+ ")"``.

    A bare sequence of trees such as ``"(ooo)oo"`` is read as the children of
    an implicit root.
    """
    s = "".join(text.split()).replace("•", "o")
    pos = 0

    def one() -> Tree:
        nonlocal pos
        if pos >= len(s):
            raise NotationError(f"unexpected end of tree {text!r}")
        ch = s[pos]
        if ch == "o":
            pos += 1
            return LEAF
        if ch != "(":
            raise NotationError(f"unexpected {ch!r} at {pos} in {text!r}")
        pos += 1
        kids = []
        while pos < len(s) and s[pos] != ")":
            kids.append(one())
        if pos >= len(s):
            raise NotationError(f"unbalanced parentheses in {text!r}")
        pos += 1
        if len(kids) < 2:
            raise NotationError(f"internal node with fewer than two children in {text!r}")
        return tuple(kids)

    top = []
    while pos < len(s):
        top.append(one())
    if len(top) == 1 and top[0]:
        return top[0]
    if len(top) < 2:
        raise NotationError(f"not a tree with at least two leaves: {text!r}")
    return tuple(top)


def leaf_count(t: Tree) -> int:
    return 1 if not t else sum(leaf_count(c) for c in t)


def internal_count(t: Tree) -> int:
    return 0 if not t else 1 + sum(internal_count(c) for c in t)


def tree_dim(t: Tree) -> int:
    """Dimension of the face of K_{leaves} indexed by t."""
    return leaf_count(t) - 1 - internal_count(t)


def tree_key(t: Tree) -> tuple:
    return (internal_count(t), format_tree(t))


def corolla(leaves: int) -> Tree:
    return (LEAF,) * leaves


def graft(t: Tree, subtrees: Sequence[Tree]) -> Tree:
    """Replace the leaves of t, left to right, by ``subtrees``."""
    it = iter(subtrees)

    def go(s: Tree) -> Tree:
        return next(it) if not s else tuple(go(c) for c in s)

    out = go(t)
    if next(it, None) is not None:
        raise ValueError("more subtrees than leaves")
    return out


# ---------------------------------------------------------------- Tonks projection

def tree_from_levels(levels: Sequence[int]) -> Tree:
    """Forget levels: ``levels[g-1]`` is the level of gap g."""
    lev = (None,) + tuple(levels)

    def build(lo: int, hi: int) -> Tree:
        if lo == hi:
            return LEAF
        top = max(lev[lo:hi])
        kids, start = [], lo
        for g in range(lo, hi):
            if lev[g] == top:
                kids.append(build(start, g))
                start = g + 1
        kids.append(build(start, hi))
        return tuple(kids)

    return build(1, len(levels) + 1)


def tree_of(a: Sequence[Sequence[int]]) -> Tree:
    """Tonks projection of the face a of P_n to a face of K_{n+1}."""
    n = sum(len(b) for b in a)
    levels = [0] * n
    for j, block in enumerate(a):
        for x in block:
            levels[x - 1] = j
    return tree_from_levels(levels)


def theta_vertex(v: Sequence[int]) -> Tree:
    levels = [0] * len(v)
    for pos, x in enumerate(v):
        levels[x - 1] = pos
    return tree_from_levels(levels)


# ---------------------------------------------------------------- face enumeration

@lru_cache(maxsize=None)
def _compositions(total: int, parts_min: int = 2) -> tuple[tuple[int, ...], ...]:
    out = []

    def go(rest: int, acc: tuple[int, ...]) -> None:
        if rest == 0:
            if len(acc) >= parts_min:
                out.append(acc)
            return
        for k in range(1, rest + 1):
            go(rest - k, acc + (k,))

    go(total, ())
    return tuple(out)


@lru_cache(maxsize=None)
def trees_with_leaves(leaves: int) -> tuple[Tree, ...]:
    """All planar rooted trees with the given number of leaves."""
    if leaves == 1:
        return (LEAF,)
    out = []
    for comp in _compositions(leaves):
        out.extend(product(*(trees_with_leaves(c) for c in comp)))
    return tuple(out)


def node_gaps(t: Tree) -> list[tuple[int, ...]]:
    """Gap sets of the internal nodes, ordered right subtree first, root last."""
    out: list[tuple[int, ...]] = []

    def go(s: Tree, first_leaf: int) -> int:
        # returns the number of leaves of s; appends nodes post-order, right to left
        sizes = [leaf_count(c) for c in s]
        starts = [first_leaf]
        for k in sizes[:-1]:
            starts.append(starts[-1] + k)
        for c, st in reversed(list(zip(s, starts))):
            if c:
                go(c, st)
        out.append(tuple(st + k - 1 for st, k in zip(starts[:-1], sizes[:-1])))
        return sum(sizes)

    if t:
        go(t, 1)
    return out


def minimal_cell(t: Tree) -> OrderedPartition:
    """F_min: the non-degenerate cell over t whose minimal vertex lies in K.

    Nodes become blocks, ordered by a post-order walk that visits children
    right to left.
    """
    return OrderedPartition._make(node_gaps(t))


def subdivision_cells(a_min: OrderedPartition) -> tuple[OrderedPartition, ...]:
    orbit = left_orbit(a_min)
    degenerate, claimed = [], set()
    for u in orbit:
        if u == a_min:
            continue
        if is_degenerate(u):
            degenerate.append(u)
        else:
            claimed.update(left_orbit(u))
    return (a_min, *sorted(u for u in degenerate if u not in claimed))


def associahedral_vertex(t: Tree) -> Permutation:
    """The vertex of P_n standing for the binary tree t (t must be binary)."""
    cell = minimal_cell(t)
    if any(len(b) != 1 for b in cell):
        raise ValueError(f"{format_tree(t)} is not a binary tree")
    return Permutation._make(b[0] for b in cell)


def is_associahedral_vertex(v: Sequence[int]) -> bool:
    return not is_degenerate(right_run_cell(v))


@dataclass(frozen=True)
class KFace:
    """A face of K_{n+1} together with its subdivision cells in P_n."""

    tree: Tree

    @classmethod
    def parse(cls, text: str) -> "KFace":
        return cls(parse_tree(text))

    @property
    def n(self) -> int:
        return leaf_count(self.tree) - 1

    @property
    def dim(self) -> int:
        return tree_dim(self.tree)

    @cached_property
    def min_cell(self) -> OrderedPartition:
        return minimal_cell(self.tree)

    @cached_property
    def cells(self) -> tuple[OrderedPartition, ...]:
        """Subdivision cells of P_n making up this face, F_min first.

        These are the degenerate left-shifts of F_min, except those already
        reachable from another non-degenerate left-shift of F_min: such a
        cell belongs to that other face.
        """
        return subdivision_cells(self.min_cell)

    @cached_property
    def max_cell(self) -> OrderedPartition:
        return max(self.cells, key=lambda u: inversion_mask(max_vertex(u)).bit_count())

    @cached_property
    def min_vertex(self) -> Permutation:
        return min_vertex(self.min_cell)

    @cached_property
    def max_vertex(self) -> Permutation:
        return max_vertex(self.max_cell)

    @cached_property
    def min_mask(self) -> int:
        return inversion_mask(self.min_vertex)

    @cached_property
    def max_mask(self) -> int:
        return inversion_mask(self.max_vertex)

    def __str__(self) -> str:
        return format_tree(self.tree)


def fiber(F: KFace) -> tuple[tuple[OrderedPartition, ...], OrderedPartition, OrderedPartition]:
    """(subdivision cells, F_min, F_max) of the face F."""
    return F.cells, F.min_cell, F.max_cell


def enumerate_faces_K(n: int, dim: int | None = None) -> list[KFace]:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return [KFace(t) for t in _trees_by_dim(n, dim)]


@lru_cache(maxsize=None)
def _trees_by_dim(n: int, dim: int | None) -> tuple[Tree, ...]:
    trees = trees_with_leaves(n + 1)
    if dim is None:
        return trees
    return tuple(t for t in trees if tree_dim(t) == dim)


@lru_cache(maxsize=None)
def faces_K(n: int, dim: int) -> tuple[KFace, ...]:
    """Cached faces of one dimension; shared so fibers are computed once."""
    return tuple(KFace(t) for t in _trees_by_dim(n, dim))


def tamari_leq(F: KFace, G: KFace) -> bool:
    """F <= G iff the top vertex of F precedes the bottom vertex of G."""
    if F.n != G.n:
        raise SizeMismatchError(f"faces of different associahedra: {F.n} vs {G.n}")
    return F.max_mask & G.min_mask == F.max_mask


# ---------------------------------------------------------------- boundary

def _expansions(t: Tree) -> Iterator[Tree]:
    r = len(t)
    for size in range(2, r):
        for i in range(r - size + 1):
            yield t[:i] + (t[i:i + size],) + t[i + size:]
    for k, c in enumerate(t):
        if c:
            for e in _expansions(c):
                yield t[:k] + (e,) + t[k + 1:]


def boundary_K(F: KFace | Tree) -> set[KFace]:
    """Mod-2 boundary: split one node into a parent and a contiguous child node."""
    t = F.tree if isinstance(F, KFace) else F
    return {KFace(e) for e in _expansions(t)}


# ---------------------------------------------------------------- binary trees

def right_rotations(t: Tree) -> Iterator[Tree]:
    """Binary trees one Tamari covering step above t: ((A B) C) -> (A (B C))."""
    if not t:
        return
    left, right = t
    if left:
        a, b = left
        yield (a, (b, right))
    for s in right_rotations(left):
        yield (s, right)
    for s in right_rotations(right):
        yield (left, s)


def bottom_tree(t: Tree) -> Tree:
    """Minimal binary tree refining t (every node becomes a left comb)."""
    if not t:
        return t
    kids = [bottom_tree(c) for c in t]
    acc = kids[0]
    for c in kids[1:]:
        acc = (acc, c)
    return acc


def top_tree(t: Tree) -> Tree:
    """Maximal binary tree refining t (every node becomes a right comb)."""
    if not t:
        return t
    kids = [top_tree(c) for c in t]
    acc = kids[-1]
    for c in reversed(kids[:-1]):
        acc = (c, acc)
    return acc


@lru_cache(maxsize=None)
def kface_index(n: int) -> dict[Tree, KFace]:
    """Every face of K_{n+1}, keyed by tree, sharing cached fiber data."""
    return {F.tree: F for d in range(n) for F in faces_K(n, d)}
