"""Reduction engine tests.

Frozen matrices below were cross-checked before freezing: kernel vectors
re-verified against verify_congruence over every residue, and determinant
unit claims against a cofactor-expansion oracle defined in this file.
"""

from __future__ import annotations

import random

import pytest

from charcong.cyclo_ring import RingDescriptor, format_element
from charcong.dirichlet import character_matrix, verify_congruence
from charcong.triplet import (
    ELEMENTARY_KINDS,
    InvalidOperationError,
    NothingToUndoError,
    ReductionReport,
    Triplet,
    new_triplet,
)

Z16 = RingDescriptor(4, 16)


def grid(ring: RingDescriptor, rows):
    return [[ring.coerce(x) for x in row] for row in rows]


def shown(vec, balanced: bool = True):
    return [format_element(a, balanced=balanced) for a in vec]


def mat_vec_oracle(rows, v):
    ring = v[0].ring
    return [sum((x * y for x, y in zip(row, v)), ring.zero) for row in rows]


def det_oracle(rows):
    """Cofactor expansion over the ring; fine for the sizes under test."""
    k = len(rows)
    if k == 1:
        return rows[0][0]
    ring = rows[0][0].ring
    total = ring.zero
    for j in range(k):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * det_oracle(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def state(t: Triplet):
    return (
        [[a.coeffs for a in row] for row in t.L],
        [[a.coeffs for a in row] for row in t.E],
        [[a.coeffs for a in row] for row in t.R],
    )


# ---------------------------------------------------------------------------
# Construction.


def test_new_triplet_identity_source():
    t = new_triplet(grid(Z16, [[1, 0], [0, 1]]))
    eye = [[Z16.one, Z16.zero], [Z16.zero, Z16.one]]
    assert t.L == eye and t.E == eye and t.R == eye
    assert t.m == 2 and t.n == 2
    assert t.op_log == []
    assert t.assert_invariant()


def test_new_triplet_zero_one_by_one():
    ring = RingDescriptor(1, 3)
    t = new_triplet(grid(ring, [[0]]))
    rep = t.normalize()
    assert rep.pseudo_rank == 0
    assert rep.guaranteed_kernel == 1
    assert len(t.op_log) == 0  # nothing to pivot, nothing to move


def test_new_triplet_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Triplet([])
    with pytest.raises(ValueError):
        Triplet([[]])
    with pytest.raises(ValueError):
        Triplet(grid(Z16, [[1, 0], [0]]))


def test_new_triplet_rejects_mixed_rings():
    other = RingDescriptor(4, 8)
    with pytest.raises(ValueError):
        Triplet([[Z16.one, other.one]])


def test_new_triplet_needs_finite_quotient():
    exact = RingDescriptor(4, 0)
    with pytest.raises(ValueError):
        Triplet([[exact.one]])


def test_source_matrix_is_frozen():
    t = Triplet.from_character_matrix(5, 16)
    before = [[a.coeffs for a in row] for row in t.B]
    t.normalize()
    t.row_addition(1, 2, 3)
    assert [[a.coeffs for a in row] for row in t.B] == before
    assert isinstance(t.B, tuple)


# ---------------------------------------------------------------------------
# Elementary operations.


def test_row_addition_zero_coefficient_is_noop_but_logged():
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    t.row_addition(1, 2, 0)
    assert state(t) == before
    assert len(t.op_log) == 1


def test_column_addition_inverse_pair_restores():
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    t.column_addition(3, 1, 1)
    assert state(t) != before
    t.column_addition(3, 1, -1)
    assert state(t) == before
    assert t.assert_invariant()


def test_swap_twice_is_identity():
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    t.swap_rows(2, 4)
    t.swap_rows(2, 4)
    t.swap_columns(1, 3)
    t.swap_columns(1, 3)
    assert state(t) == before


def test_swap_rows_on_identity():
    t = new_triplet(grid(Z16, [[1, 0], [0, 1]]))
    t.swap_rows(1, 2)
    assert [[a.coeffs[0] for a in row] for row in t.E] == [[0, 1], [1, 0]]
    assert t.assert_invariant()


def test_dilate_row_by_one_is_noop():
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    t.dilate_row(2, 1)
    assert state(t) == before


def test_dilate_row_inverse_pair_restores():
    # 3 * 11 = 33 = 1 + 2*16, so the two dilations cancel mod 16
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    t.dilate_row(1, 3)
    assert state(t) != before
    t.dilate_row(1, 11)
    assert state(t) == before


def test_dilate_column_compensates_on_R():
    t = Triplet.from_character_matrix(5, 16)
    t.dilate_column(2, 3)
    assert t.assert_invariant()
    t.dilate_column(2, 11)
    assert t.R == [
        [t.ring.one if i == j else t.ring.zero for j in range(4)] for i in range(4)
    ]


def test_dilate_rejects_non_unit():
    t = Triplet.from_character_matrix(5, 16)
    with pytest.raises(InvalidOperationError):
        t.dilate_row(1, 2)
    with pytest.raises(InvalidOperationError):
        t.dilate_column(1, "z - 1")
    assert t.op_log == []


def test_index_validation():
    t = Triplet.from_character_matrix(5, 16)
    with pytest.raises(InvalidOperationError):
        t.row_addition(0, 1, 1)
    with pytest.raises(InvalidOperationError):
        t.row_addition(1, 5, 1)
    with pytest.raises(InvalidOperationError):
        t.row_addition(2, 2, 1)
    with pytest.raises(InvalidOperationError):
        t.column_addition(1, 1, 1)
    with pytest.raises(InvalidOperationError):
        t.swap_columns(1, 9)
    with pytest.raises(InvalidOperationError):
        t.apply_op("transpose")


def test_ops_preserve_invariant_one_by_one():
    t = Triplet.from_character_matrix(5, 16)
    t.row_addition(3, 2, 1)
    assert t.assert_invariant()
    t.column_addition(3, 1, "z")
    assert t.assert_invariant()
    t.swap_rows(1, 4)
    assert t.assert_invariant()
    t.swap_columns(2, 3)
    assert t.assert_invariant()
    t.dilate_row(2, 3)
    assert t.assert_invariant()
    t.dilate_column(4, "z")
    assert t.assert_invariant()


# ---------------------------------------------------------------------------
# Composite operations.


def test_pivot_identity_full_rank():
    for k in (1, 2, 3):
        t = new_triplet(grid(Z16, [[int(i == j) for j in range(k)] for i in range(k)]))
        assert t.pivot() == k


def test_pivot_skips_non_units():
    ring = RingDescriptor(1, 4)
    t = new_triplet(grid(ring, [[2]]))
    before = state(t)
    assert t.pivot() == 0
    assert state(t) == before


def test_pivot_character_matrix_progresses():
    t = Triplet.from_character_matrix(5, 16)
    assert t.pivot() >= 1
    assert t.assert_invariant()


def test_migrate_moves_zero_row_down():
    ring = RingDescriptor(1, 4)
    t = new_triplet(grid(ring, [[0, 0], [1, 1]]))
    t.migrate_zeros()
    assert [[a.coeffs[0] for a in row] for row in t.E] == [[1, 1], [0, 0]]
    assert t.assert_invariant()


def test_migrate_is_stable_on_nonzero_rows():
    ring = RingDescriptor(1, 5)
    t = new_triplet(grid(ring, [[0, 1], [0, 0], [0, 2], [0, 0], [0, 3]]))
    t.migrate_zeros()
    col = [row[0].coeffs[0] for row in t.E]
    assert col == [1, 2, 3, 0, 0]
    assert t.assert_invariant()


def test_migrate_single_zero_matrix():
    ring = RingDescriptor(1, 2)
    t = new_triplet(grid(ring, [[0]]))
    t.migrate_zeros()
    assert t.report().guaranteed_kernel == 1


def test_normalize_identity():
    t = new_triplet(grid(Z16, [[int(i == j) for j in range(3)] for i in range(3)]))
    rep = t.normalize()
    assert rep == ReductionReport(3, 0, 0, 0, False)
    assert t.op_log == []


def test_normalize_small_character_matrix_kernel_column():
    t = Triplet.from_character_matrix(3, 2)
    rep = t.normalize()
    assert rep.pseudo_rank == 1
    assert rep.guaranteed_kernel == 1
    # the zero column of E certifies R's column as a kernel vector of B
    w = [row[1] for row in t.R]
    assert [a.coeffs[0] for a in w] == [1, 1]
    assert all(a.is_zero() for a in mat_vec_oracle(t.B, w))


def test_zero_columns_certify_kernel_vectors_across_pairs():
    for N in range(2, 9):
        for M in (2, 3, 4, 6):
            t = Triplet.from_character_matrix(N, M)
            t.normalize()
            for j in range(t.n):
                if all(t.E[i][j].is_zero() for i in range(t.m)):
                    w = [row[j] for row in t.R]
                    image = mat_vec_oracle(t.B, w)
                    assert all(a.is_zero() for a in image), (N, M, j)


def test_normalize_leaves_no_unit_outside_identity():
    for N, M in ((5, 16), (7, 15), (9, 6), (12, 8)):
        t = Triplet.from_character_matrix(N, M)
        rep = t.normalize()
        assert not rep.q_has_unit, (N, M)
        assert rep.pseudo_rank + rep.q_cols + rep.guaranteed_kernel == t.n


def test_report_is_pure():
    t = Triplet.from_character_matrix(5, 16)
    t.normalize()
    log_len = len(t.op_log)
    first = t.report()
    second = t.report()
    assert first == second
    assert len(t.op_log) == log_len


# ---------------------------------------------------------------------------
# Invariant checking and determinants.


def test_invariant_detects_corruption():
    t = Triplet.from_character_matrix(5, 16)
    t.normalize()
    assert t.assert_invariant()
    t.E[1][1] = t.E[1][1] + t.ring.one
    assert not t.assert_invariant()


def test_random_op_sequences_keep_invariant_and_unit_determinants():
    rng = random.Random(20260822)
    units = [1, 3, 5, 7, 9, 11, 13, 15, "z", "z^3", "2*z + 1"]
    for trial in range(6):
        t = Triplet.from_character_matrix(5, 16)
        for _ in range(25):
            kind = rng.choice(("row_add", "col_add", "swap_rows", "swap_cols", "dilate_row", "dilate_col"))
            if kind in ("row_add", "swap_rows"):
                i, j = rng.sample(range(1, t.m + 1), 2)
            else:
                i, j = rng.sample(range(1, t.n + 1), 2)
            if kind.endswith("_add"):
                t.apply_op(kind, [i, j, rng.randrange(-8, 8)])
            elif kind.startswith("swap"):
                t.apply_op(kind, [i, j])
            else:
                t.apply_op(kind, [i, rng.choice(units)])
        assert t.assert_invariant(), trial
        assert t.ring.is_unit(det_oracle(t.L)), trial
        assert t.ring.is_unit(det_oracle(t.R)), trial


# ---------------------------------------------------------------------------
# Kernel checks.


def test_check_kernel_zero_vector():
    t = Triplet.from_character_matrix(5, 16)
    ok, w = t.check_kernel_vector([0, 0, 0, 0])
    assert ok
    assert all(a.is_zero() for a in w)


def test_check_kernel_wrong_length():
    t = Triplet.from_character_matrix(5, 16)
    with pytest.raises(ValueError):
        t.check_kernel_vector([0, 0])


def test_check_kernel_failure_returns_residual():
    t = Triplet.from_character_matrix(5, 16)
    t.normalize()
    ok, res = t.check_kernel_vector([1, 0, 0, 0])
    assert not ok
    assert len(res) == t.m
    assert any(not a.is_zero() for a in res)


def test_kernel_hit_implies_source_kernel_and_congruence():
    t = Triplet.from_character_matrix(3, 2)
    t.normalize()
    ok, w = t.check_kernel_vector([0, 1])
    assert ok
    assert all(a.is_zero() for a in mat_vec_oracle(t.B, w))
    assert verify_congruence(3, 2, w).matrix_rows


# ---------------------------------------------------------------------------
# Undo.


def test_undo_restores_single_op():
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    for kind, args in (
        ("row_add", [2, 3, 5]),
        ("col_add", [1, 4, "z"]),
        ("swap_rows", [1, 3]),
        ("swap_cols", [2, 4]),
        ("dilate_row", [2, 7]),
        ("dilate_col", [3, "z"]),
    ):
        t.apply_op(kind, args)
        t.undo()
        assert state(t) == before, kind
        assert t.op_log == []


def test_undo_on_fresh_triplet_fails():
    t = Triplet.from_character_matrix(5, 16)
    with pytest.raises(NothingToUndoError):
        t.undo()


def test_twenty_ops_then_twenty_undos():
    rng = random.Random(7)
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    for _ in range(20):
        i, j = rng.sample(range(1, 5), 2)
        t.row_addition(i, j, rng.randrange(1, 16))
    assert len(t.op_log) == 20
    for _ in range(20):
        t.undo()
    assert state(t) == before
    assert t.op_log == []


def test_undo_unwinds_normalize_steps():
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    t.normalize()
    while t.op_log:
        t.undo()
    assert state(t) == before


# ---------------------------------------------------------------------------
# Serialization and replay.


def test_snapshot_shape():
    t = Triplet.from_character_matrix(5, 16)
    t.normalize()
    snap = t.snapshot()
    assert set(snap) == {"m", "n", "ring", "L", "E", "R", "report", "log", "unit_flags"}
    assert snap["m"] == 4 and snap["n"] == 4
    assert snap["ring"] == {"e": 4, "d": 2, "M": 16, "min_poly": [1, 0, 1]}
    assert all(op["kind"] in ELEMENTARY_KINDS for op in snap["log"])
    assert snap["report"]["pseudo_rank"] == 1
    flags = snap["unit_flags"]
    assert flags[0][0] is True and flags[3] == [False] * 4


def test_log_replay_reproduces_state():
    rng = random.Random(99)
    t = Triplet.from_character_matrix(5, 16)
    t.normalize()
    for _ in range(10):
        i, j = rng.sample(range(1, 5), 2)
        t.apply_op(rng.choice(("row_add", "col_add")), [i, j, rng.randrange(-5, 6)])
    snap = t.snapshot()
    replayed = Triplet.from_character_matrix(5, 16)
    for op in snap["log"]:
        replayed.apply_op(op["kind"], op["args"])
    assert state(replayed) == state(t)
    assert replayed.snapshot() == snap


def test_apply_op_undo_kind():
    t = Triplet.from_character_matrix(5, 16)
    before = state(t)
    t.apply_op("row_add", [1, 2, 3])
    t.apply_op("undo")
    assert state(t) == before


# ---------------------------------------------------------------------------
# The guided (5, 16) session.  The five steps below are the manual moves a
# human operator applies after normalize; the three column additions then
# aim specific columns at the kernel.  All matrices frozen from a verified
# run (kernel outputs re-checked against verify_congruence at freeze time).

FIVE_GUIDED_OPS = (
    ("row_add", (3, 2, 1)),
    ("row_add", (3, 1, -1)),
    ("col_add", (3, 1, 1)),
    ("row_add", (1, 2, -2)),
    ("row_add", (1, 3, 1)),
)

THREE_AIMING_OPS = (
    ("col_add", (2, 3, -1)),
    ("col_add", (4, 3, -1)),
    ("col_add", (2, 4, 1)),
)


def session_triplet(extra=()):
    t = Triplet.from_character_matrix(5, 16)
    t.normalize()
    for kind, args in FIVE_GUIDED_OPS + tuple(extra):
        t.apply_op(kind, list(args))
        assert t.assert_invariant()
    return t


def test_normalize_5_16_frozen_state():
    t = Triplet.from_character_matrix(5, 16)
    rep = t.normalize()
    assert rep == ReductionReport(1, 0, 2, 3, False)
    assert len(t.op_log) == 8
    assert [shown(row, balanced=False) for row in t.E] == [
        ["1", "0", "0", "0"],
        ["0", "z + 15", "14", "15*z + 15"],
        ["0", "15*z + 15", "14", "z + 15"],
        ["0", "0", "0", "0"],
    ]
    assert [shown(row, balanced=False) for row in t.R] == [
        ["1", "15", "15", "15"],
        ["0", "1", "0", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "0", "1"],
    ]


def test_five_guided_ops_frozen_state():
    t = session_triplet()
    assert len(t.op_log) == 13
    assert [shown(row, balanced=False) for row in t.E] == [
        ["0", "14*z", "0", "2*z"],
        ["14", "z + 15", "14", "15*z + 15"],
        ["11", "14", "12", "14"],
        ["0", "0", "0", "0"],
    ]
    assert [shown(row, balanced=False) for row in t.R] == [
        ["0", "15", "15", "15"],
        ["0", "1", "0", "0"],
        ["1", "0", "1", "0"],
        ["0", "0", "0", "1"],
    ]
    rep = t.report()
    assert rep.pseudo_rank == 0 and rep.q_has_unit


def test_five_guided_ops_admit_the_three_congruences():
    t = session_triplet()
    expected = [
        ([0, 8, 0, 8], ["0", "8", "0", "8"]),
        ([0, -4, 4, -4], ["4", "-4", "4", "-4"]),
        ([0, "4*z+4", 0, "4*z-4"], ["8*z", "4*z + 4", "0", "4*z - 4"]),
    ]
    for coeffs, display in expected:
        ok, w = t.check_kernel_vector(coeffs)
        assert ok, coeffs
        assert shown(w) == display
        assert verify_congruence(5, 16, w).full_period


def test_complete_session_accepts_the_recorded_check_inputs():
    t = session_triplet(extra=THREE_AIMING_OPS)
    expected = [
        ([0, 0, 0, 8], ["0", "8", "0", "8"]),
        ([0, 0, 4, 0], ["4", "-4", "4", "-4"]),
        ([0, 8, 0, "4*z-4"], ["8*z", "4*z + 4", "0", "4*z - 4"]),
    ]
    for coeffs, display in expected:
        ok, w = t.check_kernel_vector(coeffs)
        assert ok, coeffs
        assert shown(w) == display
        assert verify_congruence(5, 16, w).full_period
