"""Field-independent echelonization against plain-elimination oracles."""

import json
import random

import pytest

from qtp.errors import CannotCertify, ClosureViolation, NotFullRank, ShapeError
from qtp.fimatrix import (ElementaryOp, FiMatrix, apply_elementary_op, fi_add,
                          fi_corank, fi_echelonize, fi_full_rank_check,
                          fi_mul, rank_diagnostic)

from oracles import rank_gf, rank_q, replay_ops


def test_fi_add_examples():
    assert fi_add(FiMatrix([[1]]), FiMatrix([[-1]])) == FiMatrix([[0]])
    with pytest.raises(ClosureViolation):
        fi_add(FiMatrix([[1]]), FiMatrix([[1]]))
    empty = FiMatrix([], ncols=3)
    assert fi_add(empty, empty).shape == (0, 3)
    with pytest.raises(ShapeError):
        fi_add(FiMatrix([[1]]), FiMatrix([[1, 0]]))


def test_fi_mul_examples():
    assert fi_mul(FiMatrix([[1, -1]]), FiMatrix([[1], [1]])) == FiMatrix([[0]])
    with pytest.raises(ClosureViolation):
        fi_mul(FiMatrix([[1, 1]]), FiMatrix([[1], [1]]))
    rng = random.Random(3)
    for _ in range(20):
        rows = [[rng.choice((-1, 0, 1)) for _ in range(4)] for _ in range(3)]
        a = FiMatrix(rows)
        assert fi_mul(FiMatrix.identity(3), a) == a


def test_fi_mul_intermediate_sums_may_overflow():
    # 1*1 + 1*1 - 1*1 = 1: partial sums reach 2 but the entry is stored
    a = FiMatrix([[1, 1, 1]])
    b = FiMatrix([[1], [1], [-1]])
    assert fi_mul(a, b) == FiMatrix([[1]])


def test_echelonize_simple():
    cert = fi_echelonize(FiMatrix([[1, 0], [1, 1]]))
    assert cert.rank == 2
    assert [op.kind for op in cert.ops] == ["add_row"]
    assert cert.final == FiMatrix([[1, 0], [0, 1]])


def test_echelonize_counterexample_refuses_with_diagnostic():
    with pytest.raises(CannotCertify) as err:
        fi_echelonize(FiMatrix([[1, -1], [1, 1]]))
    diag = err.value.diagnostic
    assert diag["rank_mod"][2] == 1
    assert diag["rank_rational"] == 2
    assert diag["field_dependent"]
    assert not err.value.budget_exhausted


def test_echelonize_identity_and_empty():
    cert = fi_echelonize(FiMatrix.identity(4))
    assert cert.rank == 4 and cert.ops == ()
    cert = fi_echelonize(FiMatrix([], ncols=5))
    assert cert.rank == 0
    cert = fi_echelonize(FiMatrix.zeros(3, 3))
    assert cert.rank == 0


def test_echelonize_needs_backtracking():
    # pivoting on row 0 overflows while clearing row 2; the search must
    # backtrack and promote row 1 to the pivot position instead
    m = FiMatrix([[1, 1], [1, 0], [1, -1]])
    cert = fi_echelonize(m)
    assert cert.rank == rank_q(m.rows, m.ncols) == 2
    assert cert.ops[0].kind == "swap_rows"


def test_budget_exhaustion_flag():
    m = FiMatrix([[1, -1], [1, 1]])
    with pytest.raises(CannotCertify) as err:
        fi_echelonize(m, budget=0)
    assert err.value.budget_exhausted


def test_backtrack_env_override(monkeypatch):
    monkeypatch.setenv("QTP_BACKTRACK_LIMIT", "0")
    with pytest.raises(CannotCertify) as err:
        fi_echelonize(FiMatrix([[1, 0], [1, 1]]))
    assert err.value.budget_exhausted


def test_corank():
    assert fi_corank(FiMatrix([[1, -1]])) == 1
    assert fi_corank(FiMatrix.zeros(2, 2)) == 2
    assert fi_corank(FiMatrix.identity(3)) == 0


def test_full_rank_checks():
    assert fi_full_rank_check(FiMatrix([[1]]), "column").rank == 1
    # 1 x 0 empty matrix has full column rank vacuously
    assert fi_full_rank_check(FiMatrix([[]], ncols=0), "column").rank == 0
    assert fi_full_rank_check(FiMatrix([[1], [1]]), "column").rank == 1
    with pytest.raises(NotFullRank):
        fi_full_rank_check(FiMatrix([[1, 1], [0, 0]]), "column")
    assert fi_full_rank_check(FiMatrix([[1, 0]]), "row").rank == 1
    with pytest.raises(NotFullRank):
        fi_full_rank_check(FiMatrix.zeros(1, 2), "row")


def _random_matrix(rng, max_dim=8):
    nrows = rng.randrange(1, max_dim + 1)
    ncols = rng.randrange(1, max_dim + 1)
    density = rng.choice((0.2, 0.35, 0.5))
    signed = rng.random() < 0.5
    rows = []
    for _ in range(nrows):
        row = []
        for _ in range(ncols):
            if rng.random() < density:
                row.append(rng.choice((-1, 1)) if signed else 1)
            else:
                row.append(0)
        rows.append(row)
    return FiMatrix(rows)


def test_certified_rank_is_field_portable():
    rng = random.Random(42)
    certified = 0
    attempts = 0
    while certified < 60 and attempts < 2000:
        attempts += 1
        m = _random_matrix(rng)
        try:
            cert = fi_echelonize(m)
        except CannotCertify:
            continue
        certified += 1
        for p in (2, 3, 5):
            assert rank_gf(m.rows, m.ncols, p) == cert.rank
        assert rank_q(m.rows, m.ncols) == cert.rank
    assert certified == 60


def test_replay_soundness():
    rng = random.Random(43)
    done = 0
    while done < 30:
        m = _random_matrix(rng, max_dim=6)
        try:
            cert = fi_echelonize(m)
        except CannotCertify:
            continue
        done += 1
        ops = [{"kind": o.kind, "i": o.i, "j": o.j, "c": o.c} for o in cert.ops]
        over_z = replay_ops(m.rows, ops)
        assert [list(r) for r in cert.final.rows] == over_z
        over_gf2 = replay_ops(m.rows, ops, reduce=lambda x: x % 2)
        assert over_gf2 == [[x % 2 for x in r] for r in cert.final.rows]


def test_mul_commutes_with_reduction():
    rng = random.Random(44)
    for _ in range(40):
        a = _random_matrix(rng, max_dim=4)
        b_rows = [[rng.choice((-1, 0, 1)) for _ in range(3)]
                  for _ in range(a.ncols)]
        b = FiMatrix(b_rows, ncols=3)
        try:
            prod = fi_mul(a, b)
        except ClosureViolation:
            continue
        for p in (2, 3, 5):
            integer = [[sum(a.rows[i][k] * b.rows[k][j]
                            for k in range(a.ncols)) % p
                        for j in range(3)] for i in range(a.nrows)]
            assert integer == [[x % p for x in r] for r in prod.rows]


def test_determinism_byte_identical():
    rng = random.Random(45)
    for _ in range(10):
        m = _random_matrix(rng, max_dim=6)
        try:
            c1 = fi_echelonize(m)
            c2 = fi_echelonize(m)
        except CannotCertify:
            continue
        s1 = json.dumps([(o.kind, o.i, o.j, o.c, o.result_hash)
                         for o in c1.ops])
        s2 = json.dumps([(o.kind, o.i, o.j, o.c, o.result_hash)
                         for o in c2.ops])
        assert s1 == s2 and c1.final == c2.final


def test_snapshot_hashes_chain():
    m = FiMatrix([[1, 0, 1], [1, 1, 0], [0, 1, 0]])
    cert = fi_echelonize(m)
    state = [list(r) for r in m.rows]
    for op in cert.ops:
        apply_elementary_op(state, op)
        assert FiMatrix(state).content_hash() == op.result_hash


def test_rank_diagnostic_reports_all_fields():
    diag = rank_diagnostic(FiMatrix([[1, -1], [1, 1]]))
    assert diag["rank_mod"] == {2: 1, 3: 2, 5: 2}
    assert diag["rank_rational"] == 2
