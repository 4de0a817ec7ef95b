"""Diagonals on the permutahedra and associahedra, with exact verification.

The diagonal on P_n is enumerated from complementary pairs; the diagonal
on K_{n+1} is computed both by projecting the non-degenerate pairs through
the Tonks map and by listing Tamari-comparable faces of complementary
dimension.
"""
from .associahedron import (
    KFace, associahedral_vertex, boundary_K, enumerate_faces_K, fiber, format_tree,
    is_associahedral_vertex, parse_tree, tamari_leq, theta_vertex, tree_of,
)
from .combinatorics import (
    OrderedPartition, Permutation, boundary_P, enumerate_faces_P, extreme_vertices,
    face_leq_P, format_partition, format_permutation, inversion_set, is_degenerate,
    parse_partition, parse_permutation, vertices_of, weak_leq,
)
from .cube import (
    Box, SubdivisionCubePair, box_of_face, enumerate_pairs_at, is_cubical_vertex,
    maximal_pair_scp, verify_tiling,
)
from .diagonals import (
    chain_map_check, clear_caches, delta_K_face, delta_K_magical, delta_K_su, lshift_path, mp_to_cp,
    rshift_path, verify_agreement,
)
from .errors import (
    NotationError, NotMatchingPairError, PathNotFoundError, RejectedMoveError,
    SizeMismatchError,
)
from .permdiag import (
    ComplementaryPair, DiagonalSet, ShiftSequence, StepMatrix, delta_P_face, delta_P_top,
    enumerate_cps, left_shift, right_shift, scp, step_matrix,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
