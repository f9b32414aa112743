"""Symbolic block matrices of variable size over the alphabet {Zero, +-I, +-E}.

A block matrix carries a row partition and a column partition (lists of
affine size expressions) and a grid of entries.  Stored entries are a zero
block, a signed identity block or a signed secondary-diagonal block; the
latter two may only sit at grid cells whose row and column sizes agree as
expressions.  E squares to I over every field, so the entry algebra is
Z[E]/(E^2-1): entries are kept as integer pairs (ci, ce) meaning ci*I + ce*E.

Two matrices rarely arrive with identical partitions: a morphism component
meets differently partitioned arrow matrices of the same space.  Products,
sums and equality therefore refine both operands to a common partition
first.  Refinement splits I diagonally and E anti-diagonally, propagating
induced cuts to the opposite axis until stable; cut positions are affine
expressions ordered from the matrix's base parameter onward, and genuinely
crossing cuts are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (CannotCertify, ClosureViolation, NotFullRank,
                     PartitionMismatch, QtpError, ShapeError)
from .fimatrix import FiMatrix, backtrack_limit
from .symbolic import DimExpr, PolyN

_REFINE_ROUNDS = 200


@dataclass(frozen=True)
class BlockEntry:
    """Formal integer combination ci*I + ce*E of the two invertible symbols."""

    ci: int = 0
    ce: int = 0

    def __add__(self, other):
        return BlockEntry(self.ci + other.ci, self.ce + other.ce)

    def __sub__(self, other):
        return BlockEntry(self.ci - other.ci, self.ce - other.ce)

    def __neg__(self):
        return BlockEntry(-self.ci, -self.ce)

    def __mul__(self, other):
        # E*E = I in every field
        return BlockEntry(self.ci * other.ci + self.ce * other.ce,
                          self.ci * other.ce + self.ce * other.ci)

    def is_zero(self):
        return self.ci == 0 and self.ce == 0

    def is_storable(self):
        return (self.ci, self.ce) in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1))

    def is_invertible_symbol(self):
        return (self.ci, self.ce) in ((1, 0), (-1, 0), (0, 1), (0, -1))

    def inverse(self):
        """Inverse of a signed symbol; I and E are involutions up to sign."""
        if not self.is_invertible_symbol():
            raise QtpError("entry %s is not an invertible symbol" % self)
        return self

    def transpose(self):
        return self  # I and E are symmetric

    def symbol(self):
        if self.is_zero():
            return "Z"
        if self.ci:
            return "I" if self.ci == 1 else "-I" if self.ci == -1 else "%dI" % self.ci
        return "E" if self.ce == 1 else "-E" if self.ce == -1 else "%dE" % self.ce

    def __str__(self):
        if self.is_storable():
            return self.symbol()
        parts = []
        if self.ci:
            parts.append("%dI" % self.ci)
        if self.ce:
            parts.append("%+dE" % self.ce)
        return "".join(parts) or "Z"


ZERO = BlockEntry(0, 0)
I = BlockEntry(1, 0)
E = BlockEntry(0, 1)

_SYMBOLS = {"Z": ZERO, "I": I, "-I": -I, "E": E, "-E": -E}


def entry_from_symbol(sym):
    if sym not in _SYMBOLS:
        raise QtpError("unknown block symbol %r" % (sym,))
    return _SYMBOLS[sym]


def block_entry_mul(x, y):
    """Product in the entry algebra; exported for direct use and tests."""
    return x * y


class BlockMatrix:
    """Immutable grid of block entries with affine partitions.

    ``n0`` is the first parameter value at which every size expression is
    non-negative; operations use the larger n0 of their operands.
    """

    __slots__ = ("row_part", "col_part", "grid", "n0")

    def __init__(self, row_part, col_part, grid, n0=None):
        row_part = tuple(DimExpr.coerce(p) for p in row_part)
        col_part = tuple(DimExpr.coerce(p) for p in col_part)
        grid = tuple(tuple(cell for cell in row) for row in grid)
        if len(grid) != len(row_part):
            raise ShapeError("grid has %d block rows, partition %d"
                             % (len(grid), len(row_part)))
        for row in grid:
            if len(row) != len(col_part):
                raise ShapeError("grid row width disagrees with column partition")
        intrinsic = 0
        for p in row_part + col_part:
            if p.a < 0:
                raise ShapeError("size expression %s has negative slope" % p)
            if p.b < 0:
                if p.a == 0:
                    raise ShapeError("constant size %s is negative" % p)
                # smallest n with a*n + b >= 0
                need = (-p.b + p.a - 1) // p.a
                intrinsic = max(intrinsic, need)
        if n0 is None:
            n0 = intrinsic
        elif n0 < intrinsic:
            raise ShapeError("n0=%d but sizes become negative before %d"
                             % (n0, intrinsic))
        for i, row in enumerate(grid):
            for j, cell in enumerate(row):
                if not isinstance(cell, BlockEntry):
                    raise ShapeError("grid cell (%d,%d) is not a BlockEntry" % (i, j))
                if not cell.is_storable():
                    raise ClosureViolation(
                        "entry %s at block (%d,%d) is not a single signed symbol"
                        % (cell, i, j), cell=(i, j), value=str(cell))
                if not cell.is_zero() and row_part[i] != col_part[j]:
                    raise ShapeError(
                        "symbol %s at non-square cell (%d,%d): %s x %s"
                        % (cell, i, j, row_part[i], col_part[j]))
        object.__setattr__(self, "row_part", row_part)
        object.__setattr__(self, "col_part", col_part)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "n0", n0)

    def __setattr__(self, name, value):
        raise AttributeError("BlockMatrix is immutable")

    @property
    def block_shape(self):
        return (len(self.row_part), len(self.col_part))

    def total_rows(self):
        out = DimExpr(0, 0)
        for p in self.row_part:
            out = out + p
        return out

    def total_cols(self):
        out = DimExpr(0, 0)
        for p in self.col_part:
            out = out + p
        return out

    def with_n0(self, n0):
        if n0 == self.n0:
            return self
        return BlockMatrix(self.row_part, self.col_part, self.grid, n0=max(n0, 0))

    def transpose(self):
        grid = [[self.grid[i][j].transpose() for i in range(len(self.row_part))]
                for j in range(len(self.col_part))]
        return BlockMatrix(self.col_part, self.row_part, grid, n0=self.n0)

    def __eq__(self, other):
        return (isinstance(other, BlockMatrix)
                and self.row_part == other.row_part
                and self.col_part == other.col_part
                and self.grid == other.grid)

    def __hash__(self):
        return hash((self.row_part, self.col_part, self.grid))

    def __repr__(self):
        return "BlockMatrix(%s x %s)" % (
            ",".join(str(p) for p in self.row_part),
            ",".join(str(p) for p in self.col_part))

    def describe(self):
        return "[" + "; ".join(
            " ".join(str(c) for c in row) for row in self.grid) + "]"


def bm_from_symbols(row_part, col_part, rows, n0=None):
    grid = [[entry_from_symbol(s) for s in row] for row in rows]
    return BlockMatrix(row_part, col_part, grid, n0=n0)


def bm_zero(row_part, col_part, n0=None):
    grid = [[ZERO] * len(col_part) for _ in row_part]
    return BlockMatrix(row_part, col_part, grid, n0=n0)


def bm_shift(a, c):
    """Substitute n -> n - c in every size expression."""
    row = [p.shift(c) for p in a.row_part]
    col = [p.shift(c) for p in a.col_part]
    return BlockMatrix(row, col, a.grid, n0=max(a.n0 + c, 0))


def bm_neg(a):
    grid = [[-cell for cell in row] for row in a.grid]
    return BlockMatrix(a.row_part, a.col_part, grid, n0=a.n0)


# ---------------------------------------------------------------------------
# partitions and refinement

def _prefix(parts):
    out = [DimExpr(0, 0)]
    for p in parts:
        out.append(out[-1] + p)
    return out


def _leq(e1, e2, n0):
    d = e2 - e1
    return d.a >= 0 and d.eval(n0) >= 0


def _sort_cuts(cuts, n0):
    """Sort affine cut positions; reject pairs with no uniform order."""
    items = []
    for c in cuts:
        if not any(c == x for x in items):
            items.append(c)
    order = []
    for c in items:
        placed = False
        for k, existing in enumerate(order):
            le = _leq(c, existing, n0)
            ge = _leq(existing, c, n0)
            if le and not ge:
                order.insert(k, c)
                placed = True
                break
            if not le and not ge:
                raise PartitionMismatch(
                    "cut positions %s and %s cross on [%d, oo)"
                    % (c, existing, n0))
        if not placed:
            order.append(c)
    return order


def _segment_pieces(parts, cuts, n0):
    """Split a partition at the given absolute cut positions.

    Returns (pieces, owner) where pieces is the refined partition and
    owner[k] = (original segment index, relative start, relative end).
    """
    prefix = _prefix(parts)
    total = prefix[-1]
    inner = []
    for c in cuts:
        if any(c == p for p in prefix):
            continue
        if not (_leq(DimExpr(0, 0), c, n0) and _leq(c, total, n0)):
            raise PartitionMismatch("cut %s outside [0, %s] on [%d, oo)"
                                    % (c, total, n0))
        inner.append(c)
    positions = _sort_cuts(list(prefix) + inner, n0)
    # group refined boundaries by original segment
    pieces = []
    owner = []
    for seg in range(len(parts)):
        lo, hi = prefix[seg], prefix[seg + 1]
        bounds = [lo]
        for c in positions:
            if any(c == b for b in bounds) or c == hi:
                continue
            if _leq(lo, c, n0) and _leq(c, hi, n0):
                bounds.append(c)
        bounds.append(hi)
        bounds = _sort_cuts(bounds, n0)
        for k in range(len(bounds) - 1):
            pieces.append(bounds[k + 1] - bounds[k])
            owner.append((seg, bounds[k] - lo, bounds[k + 1] - lo))
    return pieces, owner


def _refine_once(bm, row_cuts, col_cuts, n0):
    """One refinement round; returns (matrix, induced row cuts, induced col cuts)."""
    row_pieces, row_owner = _segment_pieces(bm.row_part, row_cuts, n0)
    col_pieces, col_owner = _segment_pieces(bm.col_part, col_cuts, n0)
    row_prefix = _prefix(bm.row_part)
    col_prefix = _prefix(bm.col_part)
    new_rows = []
    new_cols = []
    grid = [[ZERO] * len(col_pieces) for _ in row_pieces]
    for ri, (rseg, rlo, rhi) in enumerate(row_owner):
        for ci, (cseg, clo, chi) in enumerate(col_owner):
            cell = bm.grid[rseg][cseg]
            if cell.is_zero():
                continue
            size = bm.row_part[rseg]  # == col_part[cseg]
            if cell.ci:
                # identity couples equal relative ranges
                if rlo == clo and rhi == chi:
                    grid[ri][ci] = cell
                elif _ranges_overlap(rlo, rhi, clo, chi, n0):
                    # ranges overlap without matching: need more cuts
                    new_cols.append(col_prefix[cseg] + rlo)
                    new_cols.append(col_prefix[cseg] + rhi)
                    new_rows.append(row_prefix[rseg] + clo)
                    new_rows.append(row_prefix[rseg] + chi)
            else:
                # E couples range [a,b) with the reflected range [L-b, L-a)
                refl_lo, refl_hi = size - rhi, size - rlo
                if refl_lo == clo and refl_hi == chi:
                    grid[ri][ci] = cell
                elif _ranges_overlap(refl_lo, refl_hi, clo, chi, n0):
                    new_cols.append(col_prefix[cseg] + refl_lo)
                    new_cols.append(col_prefix[cseg] + refl_hi)
                    new_rows.append(row_prefix[rseg] + (size - chi))
                    new_rows.append(row_prefix[rseg] + (size - clo))
    if new_rows or new_cols:
        return None, new_rows, new_cols
    return BlockMatrix(row_pieces, col_pieces, grid, n0=n0), [], []


def _ranges_overlap(lo1, hi1, lo2, hi2, n0):
    """Affine intervals overlap somewhere on [n0, oo) (conservative)."""
    # they do NOT overlap when hi1 <= lo2 or hi2 <= lo1 uniformly
    if _leq(hi1, lo2, n0) or _leq(hi2, lo1, n0):
        return False
    return True


def bm_refine(bm, row_cuts=(), col_cuts=(), n0=None):
    """Refine a block matrix so the given absolute cuts become boundaries.

    Splits of I and E blocks induce cuts on the opposite axis; the process
    iterates until stable and rejects non-stabilizing inputs.
    """
    n0 = bm.n0 if n0 is None else max(n0, bm.n0)
    rows = list(row_cuts)
    cols = list(col_cuts)
    for _ in range(_REFINE_ROUNDS):
        out, more_rows, more_cols = _refine_once(bm, rows, cols, n0)
        if out is not None:
            return out
        rows.extend(more_rows)
        cols.extend(more_cols)
    raise PartitionMismatch("block refinement does not stabilize")


def _inner_cuts(parts):
    prefix = _prefix(parts)
    return prefix[1:-1]


def _align_axis(a, b, a_axis, b_axis):
    """Refine a and b until a's a_axis partition equals b's b_axis partition."""
    n0 = max(a.n0, b.n0)
    geta = (lambda m: m.col_part) if a_axis == "col" else (lambda m: m.row_part)
    getb = (lambda m: m.row_part) if b_axis == "row" else (lambda m: m.col_part)
    tot_a, tot_b = _prefix(geta(a))[-1], _prefix(getb(b))[-1]
    if tot_a != tot_b:
        raise PartitionMismatch("total sizes differ: %s vs %s" % (tot_a, tot_b))
    for _ in range(_REFINE_ROUNDS):
        cuts = _inner_cuts(geta(a)) + _inner_cuts(getb(b))
        if a_axis == "col":
            a2 = bm_refine(a, col_cuts=cuts, n0=n0)
        else:
            a2 = bm_refine(a, row_cuts=cuts, n0=n0)
        if b_axis == "row":
            b2 = bm_refine(b, row_cuts=cuts, n0=n0)
        else:
            b2 = bm_refine(b, col_cuts=cuts, n0=n0)
        if geta(a2) == getb(b2):
            return a2, b2
        a, b = a2, b2
    raise PartitionMismatch("could not align partitions")


def bm_mul(a, b):
    """Block product; operands are refined to a common middle partition."""
    if a.col_part != b.row_part:
        a, b = _align_axis(a, b, "col", "row")
    n0 = max(a.n0, b.n0)
    nr, nm = len(a.row_part), len(a.col_part)
    nc = len(b.col_part)
    grid = []
    for i in range(nr):
        row = []
        for j in range(nc):
            acc = ZERO
            for k in range(nm):
                x, y = a.grid[i][k], b.grid[k][j]
                if x.is_zero() or y.is_zero():
                    continue
                acc = acc + x * y
            if not acc.is_storable():
                raise ClosureViolation(
                    "product entry %s at block (%d,%d) is not a single symbol"
                    % (acc, i, j), cell=(i, j), value=str(acc))
            row.append(acc)
        grid.append(row)
    return BlockMatrix(a.row_part, b.col_part, grid, n0=n0)


def _align_both(a, b):
    """Refine a and b until both their row and column partitions agree."""
    if _prefix(a.row_part)[-1] != _prefix(b.row_part)[-1] \
            or _prefix(a.col_part)[-1] != _prefix(b.col_part)[-1]:
        raise PartitionMismatch("matrix families have different total sizes")
    n0 = max(a.n0, b.n0)
    for _ in range(_REFINE_ROUNDS):
        row_cuts = _inner_cuts(a.row_part) + _inner_cuts(b.row_part)
        col_cuts = _inner_cuts(a.col_part) + _inner_cuts(b.col_part)
        a2 = bm_refine(a, row_cuts=row_cuts, col_cuts=col_cuts, n0=n0)
        b2 = bm_refine(b, row_cuts=row_cuts, col_cuts=col_cuts, n0=n0)
        if a2.row_part == b2.row_part and a2.col_part == b2.col_part:
            return a2, b2
        a, b = a2, b2
    raise PartitionMismatch("could not align partitions")


def bm_add(a, b):
    if a.row_part != b.row_part or a.col_part != b.col_part:
        a, b = _align_both(a, b)
    grid = []
    for i in range(len(a.row_part)):
        row = []
        for j in range(len(a.col_part)):
            acc = a.grid[i][j] + b.grid[i][j]
            if not acc.is_storable():
                raise ClosureViolation(
                    "sum entry %s at block (%d,%d) is not a single symbol"
                    % (acc, i, j), cell=(i, j), value=str(acc))
            row.append(acc)
        grid.append(row)
    return BlockMatrix(a.row_part, a.col_part, grid, n0=max(a.n0, b.n0))


def bm_sub(a, b):
    return bm_add(a, bm_neg(b))


def bm_equal_fi(a, b):
    """True when a - b reduces to zero over the integers.

    Integer-zero difference is necessary and sufficient for equality over
    every field.  The transient difference is not subject to the storage
    alphabet, so e.g. I vs -I compares cleanly (and unequal).
    """
    if a.row_part != b.row_part or a.col_part != b.col_part:
        a, b = _align_both(a, b)
    for i in range(len(a.row_part)):
        for j in range(len(a.col_part)):
            if not (a.grid[i][j] - b.grid[i][j]).is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# instantiation and counting

def instantiate(a, n):
    """Evaluate the family at a concrete parameter; returns a FiMatrix."""
    if n < a.n0:
        raise ShapeError("n=%d below the family's base parameter %d" % (n, a.n0))
    rsizes = [p.eval(n) for p in a.row_part]
    csizes = [p.eval(n) for p in a.col_part]
    for s in rsizes + csizes:
        if s < 0:
            raise ShapeError("negative evaluated size %d at n=%d" % (s, n))
    nrows, ncols = sum(rsizes), sum(csizes)
    rows = [[0] * ncols for _ in range(nrows)]
    r0 = 0
    for i, rs in enumerate(rsizes):
        c0 = 0
        for j, cs in enumerate(csizes):
            cell = a.grid[i][j]
            if not cell.is_zero():
                sign = cell.ci or cell.ce
                for k in range(rs):
                    col = k if cell.ci else rs - 1 - k
                    rows[r0 + k][c0 + col] = sign
            c0 += cs
        r0 += rs
    return FiMatrix(rows, ncols=ncols)


def ones_count_sym(a):
    """Total number of 1-entries of the instantiated family, as a PolyN.

    Representation matrices are 0/1, so negative-signed blocks are
    rejected here.
    """
    total = PolyN()
    for i, row in enumerate(a.grid):
        for j, cell in enumerate(row):
            if cell.is_zero():
                continue
            if cell.ci < 0 or cell.ce < 0:
                raise ClosureViolation(
                    "negative block %s at (%d,%d): 0/1 matrices only"
                    % (cell, i, j), cell=(i, j))
            total = total + a.row_part[i].to_poly()
    return total


# ---------------------------------------------------------------------------
# symbolic full-rank certificates

@dataclass(frozen=True)
class BlockOp:
    """A logged block-level elementary operation.

    add_row: row[i] += coeff * row[j]; add_col: col[i] += col[j] * coeff.
    Coefficients are signed symbols, invertible over every field.
    """

    kind: str
    i: int
    j: int
    coeff: BlockEntry = ZERO

    def describe(self):
        sym = "r" if self.kind == "add_row" else "c"
        if self.kind.startswith("swap"):
            return "%s%d <-> %s%d" % (sym, self.i + 1, sym, self.j + 1)
        return "%s%d <- %s%d + (%s)*%s%d" % (sym, self.i + 1, sym, self.i + 1,
                                             self.coeff, sym, self.j + 1)


@dataclass(frozen=True)
class BlockRankCertificate:
    """Witness that a block family has full column (or row) rank for all n.

    The op log turns the matrix into one where every non-vacuous block
    column (resp. row) holds a pivot +-I/+-E whose block row and column are
    otherwise zero; pivots are invertible over every field, so the rank
    claim holds for every n >= n0 and every field.
    """

    side: str
    ops: tuple
    final: BlockMatrix
    transposed: bool = False


def _clear_with_pivot(grid, piv_i, piv_j, ops):
    """Eliminate the pivot's block column (row ops), then its row (col ops).

    Column clearing can fail the storage alphabet, in which case None is
    returned; row clearing afterwards is always safe because the pivot's
    column is already zero elsewhere.
    """
    pivot = grid[piv_i][piv_j]
    inv = pivot.inverse()
    ncols = len(grid[0])
    for i2 in range(len(grid)):
        if i2 == piv_i or grid[i2][piv_j].is_zero():
            continue
        coeff = -(grid[i2][piv_j] * inv)
        new_row = []
        for k in range(ncols):
            acc = grid[i2][k] + coeff * grid[piv_i][k]
            if not acc.is_storable():
                return None
            new_row.append(acc)
        grid[i2] = new_row
        ops.append(BlockOp("add_row", i2, piv_i, coeff))
    for k in range(ncols):
        if k == piv_j or grid[piv_i][k].is_zero():
            continue
        coeff = -(inv * grid[piv_i][k])
        # only the pivot row changes: every other entry of column piv_j is zero
        grid[piv_i][k] = grid[piv_i][k] + grid[piv_i][piv_j] * coeff
        ops.append(BlockOp("add_col", k, piv_j, coeff))
    return grid


def bm_full_rank_check(a, side, budget=None):
    """Certify full column/row rank of the family for all n >= n0, all fields.

    Searches for a pivot in every non-vacuous block column (column side):
    backtracking over pivot choices with the same budget discipline as the
    scalar echelonization.  The row side runs on the transpose.
    """
    if side == "row":
        cert = bm_full_rank_check(a.transpose(), "column", budget=budget)
        return BlockRankCertificate(side="row", ops=cert.ops, final=cert.final,
                                    transposed=True)
    if side != "column":
        raise ValueError("side must be 'column' or 'row'")
    limit = backtrack_limit(budget)
    state = {"nodes": 0}
    columns = [j for j, p in enumerate(a.col_part) if not p.is_zero()]
    for j in columns:
        if all(a.grid[i][j].is_zero() for i in range(len(a.row_part))):
            raise NotFullRank(
                "block column %d of size %s is zero" % (j, a.col_part[j]))

    def rec(grid, cols_left, used_rows, ops):
        if not cols_left:
            return grid, ops
        j = cols_left[0]
        candidates = [i for i in range(len(grid))
                      if i not in used_rows and grid[i][j].is_invertible_symbol()]
        for i in candidates:
            state["nodes"] += 1
            if state["nodes"] > limit:
                raise CannotCertify(
                    "block rank search budget exhausted (limit %d)" % limit,
                    budget_exhausted=True)
            trial = [list(row) for row in grid]
            trial_ops = list(ops)
            cleared = _clear_with_pivot(trial, i, j, trial_ops)
            if cleared is None:
                continue
            got = rec(cleared, cols_left[1:], used_rows | {i}, trial_ops)
            if got is not None:
                return got
        return None

    start = [list(row) for row in a.grid]
    result = rec(start, columns, frozenset(), [])
    if result is None:
        raise CannotCertify(
            "no admissible block pivot sequence certifies full column rank")
    grid, ops = result
    final = BlockMatrix(a.row_part, a.col_part,
                        [tuple(r) for r in grid], n0=a.n0)
    return BlockRankCertificate(side="column", ops=tuple(ops), final=final)
