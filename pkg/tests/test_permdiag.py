from itertools import permutations

import pytest

from assocdiag.combinatorics import (
    OrderedPartition, enumerate_faces_P, face_leq_P, parse_partition as P,
)
from assocdiag.errors import RejectedMoveError
from assocdiag.permdiag import (
    RunDecomposition, ShiftSequence, StepMatrix, cp_matrix, delta_P_face, delta_P_top,
    enumerate_cps, left_orbit, left_runs, left_shift, matrix_down_shift,
    matrix_right_shift, matrix_to_pair, right_orbit, right_runs, right_shift, scp,
    step_matrix,
)

# sizes of the top-cell diagonal on P_1..P_7, as tabulated in the literature
# on permutahedral diagonals
DELTA_P_SIZES = [1, 2, 8, 50, 432, 4802, 65536]


def test_runs():
    # blocks are stored sorted
    assert left_runs((2, 1, 3, 5, 4)) == [(1, 2), (3,), (4, 5)]
    assert right_runs((2, 1, 3, 5, 4)) == [(4,), (1, 3, 5), (2,)]
    rd = RunDecomposition.of((2, 1, 3, 5, 4))
    assert (rd.p, rd.q) == (3, 3)


def test_scp_example():
    cp = scp((2, 1, 3, 5, 4))
    assert cp.alpha == P("12|3|45")
    assert cp.beta == P("2|135|4")
    assert str(cp) == "12|3|45 × 2|135|4"


@pytest.mark.parametrize("n", range(1, 6))
def test_scp_dimensions(n):
    for s in permutations(range(1, n + 1)):
        cp = scp(s)
        assert cp.alpha.dim + cp.beta.dim == n - 1
        assert face_leq_P(cp.alpha, cp.beta)


def test_step_matrix_example():
    m = step_matrix((2, 1, 3, 5, 4))
    assert m.rows == ((0, 0, 4), (1, 3, 5), (2, 0, 0))
    assert m.is_step()
    assert matrix_to_pair(m) == (P("12|3|45"), P("2|135|4"))
    down = matrix_down_shift(m, 2, {5})
    assert down.rows == ((0, 0, 4), (1, 3, 0), (2, 0, 5))
    assert matrix_to_pair(down) == (P("12|3|45"), P("25|13|4"))
    assert str(m) == "0 0 4\n1 3 5\n2 0 0"


def test_matrix_shifts_reject_bad_positions():
    m = step_matrix((2, 1, 3, 5, 4))
    with pytest.raises(RejectedMoveError):
        matrix_down_shift(m, 0, {5})
    with pytest.raises(RejectedMoveError):
        matrix_right_shift(m, 3, {4})
    with pytest.raises(RejectedMoveError):
        matrix_down_shift(m, 1, {4})


def test_matrix_right_shift_matches_partition_shift():
    m = step_matrix((4, 2, 3, 1))
    alpha, beta = matrix_to_pair(m)
    shifted = matrix_right_shift(m, 1, {4})
    assert matrix_to_pair(shifted) == (right_shift(alpha, 1, {4}), beta)


def test_shift_rules():
    assert right_shift(P("134|2"), 1, {3, 4}) == P("1|234")
    assert left_shift(P("2|135|4"), 2, {5}) == P("25|13|4")
    assert right_shift(P("12|3"), 1, ()) == P("12|3")
    with pytest.raises(RejectedMoveError):
        right_shift(P("12|3"), 1, {1})  # the minimum never moves
    with pytest.raises(RejectedMoveError):
        right_shift(P("12|3"), 1, {2})  # 2 < max of the next block
    assert left_shift(P("2|135|4"), 2, {3}) == P("23|15|4")
    with pytest.raises(RejectedMoveError):
        left_shift(P("4|135|2"), 2, {3})
    with pytest.raises(RejectedMoveError):
        left_shift(P("2|13"), 1, {3})


@pytest.mark.parametrize("n", range(2, 6))
def test_cp_matrices(n):
    # only the strong pair is guaranteed a step matrix; shifts may open gaps
    for s in permutations(range(1, n + 1)):
        assert step_matrix(s).is_step()
        for cp in enumerate_cps(s):
            m = cp_matrix(cp.alpha, cp.beta)
            assert matrix_to_pair(m) == (cp.alpha, cp.beta)
            a0, b0 = scp(s).alpha, scp(s).beta
            assert cp.M.apply(a0) == cp.alpha
            assert cp.N.apply(b0) == cp.beta


def test_orbits_record_working_sequences():
    a = P("134|2")
    for cell, seq in right_orbit(a).items():
        assert seq.apply(a) == cell
    b = P("5|3|1246")
    for cell, seq in left_orbit(b).items():
        assert seq.apply(b) == cell


def test_shift_sequence_str_and_trim():
    seq = ShiftSequence("L", (frozenset({3}), frozenset()))
    assert str(seq) == "({3}, {})"
    assert seq.trimmed() == (frozenset({3}),)


def test_not_step():
    assert not StepMatrix(((1, 0, 2), (0, 3, 0))).is_step()


def test_delta_P3():
    got = {(str(a), str(b)) for a, b in delta_P_top(3)}
    assert got == {
        ("1|2|3", "123"), ("12|3", "2|13"), ("12|3", "23|1"), ("1|23", "13|2"),
        ("1|23", "3|12"), ("2|13", "23|1"), ("13|2", "3|12"), ("123", "3|2|1"),
    }


@pytest.mark.parametrize("n", range(1, 7))
def test_delta_P_sizes(n):
    ds = delta_P_top(n)
    assert len(ds) == DELTA_P_SIZES[n - 1]
    for a, b in ds.components:
        assert a.dim + b.dim == n - 1
        assert face_leq_P(a, b)


def test_parallel_matches_serial():
    assert delta_P_top(5, jobs=2).components == delta_P_top(5).components


def test_iteration_order_is_canonical():
    listed = list(delta_P_top(3))
    assert listed[0] == (P("123"), P("3|2|1"))
    assert listed == delta_P_top(3).sorted()


def test_delta_on_faces():
    assert set(delta_P_face(P("1|2|3"))) == {(P("1|2|3"), P("1|2|3"))}
    assert set(delta_P_face(P("12|3"))) == {(P("12|3"), P("2|1|3")), (P("1|2|3"), P("12|3"))}
    top = OrderedPartition([(1, 2, 3)])
    assert delta_P_face(top).components == delta_P_top(3).components
    # a face of P_4 is a product, so its diagonal is a product of diagonals
    assert len(delta_P_face(P("13|24"))) == 4
    for a in enumerate_faces_P(4, 2):
        for x, y in delta_P_face(a):
            assert x.dim + y.dim == a.dim
