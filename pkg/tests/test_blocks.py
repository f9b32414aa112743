"""Block algebra: entry relations, refinement, instantiation homomorphism."""

import random

import pytest

from qtp.blocks import (BlockEntry, E, I, ZERO, BlockMatrix, BlockOp,
                        block_entry_mul, bm_add, bm_equal_fi, bm_from_symbols,
                        bm_full_rank_check, bm_mul, bm_refine, bm_shift,
                        bm_sub, bm_zero, instantiate, ones_count_sym)
from qtp.errors import (CannotCertify, ClosureViolation, NotFullRank,
                        PartitionMismatch, ShapeError)
from qtp.fimatrix import FiMatrix
from qtp.symbolic import DimExpr, PolyN

N = DimExpr(1, 0)
N1 = DimExpr(1, 1)
ONE = DimExpr(0, 1)


def test_entry_relations():
    assert block_entry_mul(E, E) == I
    assert block_entry_mul(I, -E) == -E
    assert block_entry_mul(ZERO, E) == ZERO
    assert block_entry_mul(-E, -E) == I
    assert (I + E).is_storable() is False
    assert str(I + E) == "1I+1E"


def test_entry_relation_instantiated():
    for n in range(1, 9):
        e = FiMatrix.anti_identity(n)
        prod = [[sum(e.rows[i][k] * e.rows[k][j] for k in range(n))
                 for j in range(n)] for i in range(n)]
        assert prod == [list(r) for r in FiMatrix.identity(n).rows]


def test_bm_mul_examples():
    a = bm_from_symbols([N], [N, N], [["I", "Z"]])
    b = bm_from_symbols([N, N], [N], [["I"], ["Z"]])
    assert bm_mul(a, b).grid[0][0] == I
    a = bm_from_symbols([N], [N, N], [["I", "E"]])
    b = bm_from_symbols([N, N], [N], [["E"], ["-I"]])
    assert bm_mul(a, b).grid[0][0] == ZERO
    a = bm_from_symbols([N], [N, N], [["I", "I"]])
    b = bm_from_symbols([N, N], [N], [["I"], ["I"]])
    with pytest.raises(ClosureViolation):
        bm_mul(a, b)


def test_bm_equal_examples():
    em = bm_from_symbols([N], [N], [["E"]])
    im = bm_from_symbols([N], [N], [["I"]])
    assert bm_equal_fi(em, em)
    assert bm_equal_fi(bm_mul(em, em), im)
    assert not bm_equal_fi(im, bm_from_symbols([N], [N], [["-I"]]))


def test_instantiate_examples():
    em = bm_from_symbols([N], [N], [["E"]])
    assert instantiate(em, 3).rows == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    i1 = bm_from_symbols([N1], [N1], [["I"]])
    assert instantiate(i1, 0).rows == ((1,),)
    z = bm_from_symbols([N], [ONE], [["Z"]])
    assert instantiate(z, 0).shape == (0, 1)
    with pytest.raises(ShapeError):
        instantiate(bm_from_symbols([DimExpr(1, -1)], [DimExpr(1, -1)],
                                    [["I"]], n0=1), 0)


def test_nonsquare_symbol_rejected():
    with pytest.raises(ShapeError):
        bm_from_symbols([N], [N1], [["I"]])


def test_ones_count():
    m = bm_from_symbols([N, ONE], [N], [["I"], ["Z"]])
    assert ones_count_sym(m) == PolyN(0, 1, 0)
    zero = bm_zero([N], [N])
    assert ones_count_sym(zero) == PolyN()
    with pytest.raises(ClosureViolation):
        ones_count_sym(bm_from_symbols([N], [N], [["-I"]]))


def test_refine_splits_identity_and_antidiagonal():
    im = bm_from_symbols([N1], [N1], [["I"]])
    r = bm_refine(im, row_cuts=[ONE])
    assert r.row_part == (ONE, N) and r.col_part == (ONE, N)
    assert r.grid[0][0] == I and r.grid[1][1] == I
    assert r.grid[0][1] == ZERO and r.grid[1][0] == ZERO
    em = bm_from_symbols([N], [N], [["E"]], n0=1)
    r = bm_refine(em, row_cuts=[ONE], n0=1)
    assert r.row_part == (ONE, DimExpr(1, -1))
    assert r.col_part == (DimExpr(1, -1), ONE)
    assert r.grid[0][1] == E and r.grid[1][0] == E


def test_refine_crossing_cuts_rejected():
    im = bm_from_symbols([DimExpr(1, 2)], [DimExpr(1, 2)], [["I"]])
    with pytest.raises(PartitionMismatch):
        # the cuts n and 2 cross at n = 2 when starting from n0 = 0
        bm_refine(im, row_cuts=[N, DimExpr(0, 2)], n0=0)


def test_mul_auto_refines_shifted_identities():
    # the middle space partitioned (n,1) on one side and (1,n) on the other
    f = bm_from_symbols([N1], [N1], [["I"]])
    top = bm_from_symbols([N, ONE], [N], [["I"], ["Z"]])
    bottom = bm_from_symbols([ONE, N], [N], [["Z"], ["I"]])
    assert bm_equal_fi(bm_mul(f, top), top)
    assert bm_equal_fi(bm_mul(f, bottom), bottom)


def test_add_and_sub():
    a = bm_from_symbols([N], [N], [["I"]])
    b = bm_from_symbols([N], [N], [["-I"]])
    assert bm_add(a, b).grid[0][0] == ZERO
    assert bm_sub(a, a).grid[0][0] == ZERO
    with pytest.raises(ClosureViolation):
        bm_add(a, a)


def test_shift():
    m = bm_from_symbols([N1], [N1], [["I"]])
    s = bm_shift(m, 1)
    assert s.row_part == (N,)
    assert s.n0 == 1


def test_full_rank_certificates():
    tall = bm_from_symbols([N, ONE], [N], [["I"], ["Z"]])
    cert = bm_full_rank_check(tall, "column")
    assert cert.ops == ()
    mixed = bm_from_symbols([N, N], [N], [["E"], ["I"]])
    cert = bm_full_rank_check(mixed, "column")
    assert len(cert.ops) == 1 and cert.ops[0].kind == "add_row"
    assert cert.final.grid[1][0] == ZERO
    wide = bm_from_symbols([N], [N, N], [["I", "I"]])
    with pytest.raises(CannotCertify):
        bm_full_rank_check(wide, "column")
    assert bm_full_rank_check(wide, "row").transposed
    with pytest.raises(NotFullRank):
        bm_full_rank_check(bm_zero([N], [N]), "column")


def test_full_rank_instantiates(subtests=None):
    rng = random.Random(5)
    mats = [
        bm_from_symbols([N, ONE, N], [N, N], [["I", "Z"], ["Z", "Z"], ["Z", "E"]]),
        bm_from_symbols([ONE, N, N], [N, N], [["Z", "Z"], ["E", "Z"], ["E", "I"]]),
    ]
    from oracles import rank_q
    for m in mats:
        bm_full_rank_check(m, "column")
        for n in range(m.n0, m.n0 + 6):
            inst = instantiate(m, n)
            assert rank_q(inst.rows, inst.ncols) == inst.ncols


def _random_block_matrix(rng, row_part, col_part, density=0.5,
                         invertible_only=False):
    grid = []
    for rp in row_part:
        row = []
        for cp in col_part:
            if rp == cp and rng.random() < density:
                row.append(rng.choice([I, -I, E, -E]))
            else:
                row.append(ZERO)
        grid.append(row)
    return BlockMatrix(row_part, col_part, grid, n0=1)


def _structured_pair(rng):
    """Pairs whose blocks sit at most once per row/column: products stay legal."""
    parts = [N, N1, ONE, DimExpr(1, -1), DimExpr(0, 2)]
    mid = tuple(rng.choice(parts) for _ in range(rng.randrange(1, 4)))
    rows = tuple(rng.choice(parts) for _ in range(rng.randrange(1, 4)))
    cols = tuple(rng.choice(parts) for _ in range(rng.randrange(1, 4)))

    def one_per_line(rp, cp):
        grid = [[ZERO] * len(cp) for _ in rp]
        used_cols = set()
        for i, r in enumerate(rp):
            js = [j for j, c in enumerate(cp) if c == r and j not in used_cols]
            if js and rng.random() < 0.8:
                j = rng.choice(js)
                used_cols.add(j)
                grid[i][j] = rng.choice([I, -I, E, -E])
        return BlockMatrix(rp, cp, grid, n0=1)

    return one_per_line(rows, mid), one_per_line(mid, cols)


def test_instantiation_homomorphism_random():
    rng = random.Random(11)
    products = 0
    while products < 40:
        a, b = _structured_pair(rng)
        try:
            ab = bm_mul(a, b)
        except ClosureViolation:
            continue
        products += 1
        for n in range(1, 7):
            ia, ib = instantiate(a, n), instantiate(b, n)
            integer = [[sum(ia.rows[i][k] * ib.rows[k][j]
                            for k in range(ia.ncols))
                        for j in range(ib.ncols)] for i in range(ia.nrows)]
            assert integer == [list(r) for r in instantiate(ab, n).rows]


def test_equality_respects_instantiation():
    rng = random.Random(12)
    checked = 0
    while checked < 30:
        a, b = _structured_pair(rng)
        if a.block_shape != b.block_shape or a.row_part != b.row_part \
                or a.col_part != b.col_part:
            continue
        checked += 1
        same = bm_equal_fi(a, b)
        for n in range(1, 6):
            inst_same = instantiate(a, n) == instantiate(b, n)
            if same:
                assert inst_same
    # and a positive cross-partition case
    x1 = bm_from_symbols([N, ONE], [N, ONE], [["I", "Z"], ["Z", "I"]])
    x2 = bm_from_symbols([N1], [N1], [["I"]])
    assert bm_equal_fi(x1, x2)
    for n in range(0, 5):
        assert instantiate(x1, n) == instantiate(x2, n)
