"""Exact matrices over {-1, 0, 1} with field-independent echelonization.

The point of this module is that every operation it certifies transports
verbatim through any ring morphism from the integers into a field: entries
stay in {-1, 0, 1}, row/column multipliers are +-1 and pivots are +-1, so
an echelon form computed here has the same shape, pivots and rank over
every field.  Results are packaged as replayable certificates.

Echelonization searches for an admissible operation sequence with bounded
backtracking over pivot-row choices; when the search fails the function
refuses (CannotCertify) instead of falling back to field-specific
elimination.  The refusal carries a diagnostic with plain-elimination
ranks over GF(2), GF(3), GF(5) and the rationals.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import CannotCertify, ClosureViolation, NotFullRank, ShapeError

DEFAULT_BACKTRACK_LIMIT = 10_000
BACKTRACK_ENV_VAR = "QTP_BACKTRACK_LIMIT"

DIAGNOSTIC_PRIMES = (2, 3, 5)


def backtrack_limit(override=None):
    if override is not None:
        return int(override)
    env = os.environ.get(BACKTRACK_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_BACKTRACK_LIMIT


class FiMatrix:
    """Immutable dense matrix with entries restricted to {-1, 0, 1}.

    Zero-dimension matrices (0 x m and m x 0) are first-class; they occur
    as morphism components at vertices with zero-dimensional spaces.
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols=None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if rows:
            widths = {len(r) for r in rows}
            if len(widths) != 1:
                raise ShapeError("ragged rows in matrix literal")
            width = widths.pop()
            if ncols is not None and ncols != width:
                raise ShapeError("ncols=%d disagrees with row width %d" % (ncols, width))
            ncols = width
        else:
            ncols = 0 if ncols is None else int(ncols)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                if x not in (-1, 0, 1):
                    raise ClosureViolation(
                        "entry %d at (%d,%d) outside {-1,0,1}" % (x, i, j),
                        cell=(i, j), value=x)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("FiMatrix is immutable")

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entry(self, i, j):
        return self.rows[i][j]

    def transpose(self):
        return FiMatrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            ncols=self.nrows)

    @staticmethod
    def zeros(nrows, ncols):
        return FiMatrix([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @staticmethod
    def identity(n):
        return FiMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                        ncols=n)

    @staticmethod
    def anti_identity(n):
        """Ones on the secondary diagonal, zeros elsewhere."""
        return FiMatrix(
            [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)],
            ncols=n)

    def is_zero(self):
        return all(x == 0 for r in self.rows for x in r)

    def __eq__(self, other):
        return (isinstance(other, FiMatrix)
                and self.ncols == other.ncols and self.rows == other.rows)

    def __hash__(self):
        return hash((self.ncols, self.rows))

    def __repr__(self):
        return "FiMatrix(%dx%d)" % (self.nrows, self.ncols)

    def content_hash(self):
        return _hash_rows(self.rows, self.ncols)


def _hash_rows(rows, ncols):
    payload = ("%d;%d;" % (len(rows), ncols)
               + ";".join(",".join(str(x) for x in r) for r in rows))
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def fi_add(a, b):
    """Entrywise integer sum, rejected when it leaves {-1,0,1}."""
    if a.shape != b.shape:
        raise ShapeError("shape mismatch %s vs %s" % (a.shape, b.shape))
    out = []
    for i in range(a.nrows):
        row = []
        for j in range(a.ncols):
            v = a.rows[i][j] + b.rows[i][j]
            if v not in (-1, 0, 1):
                raise ClosureViolation(
                    "sum entry %d at (%d,%d) outside {-1,0,1}" % (v, i, j),
                    cell=(i, j), value=v)
            row.append(v)
        out.append(row)
    return FiMatrix(out, ncols=a.ncols)


def fi_mul(a, b):
    """Integer matrix product whose final entries must lie in {-1,0,1}.

    Partial sums may leave the range: only the stored result matters,
    because the integer product maps through any ring morphism.
    """
    if a.ncols != b.nrows:
        raise ShapeError("inner dimensions %d vs %d" % (a.ncols, b.nrows))
    out = []
    for i in range(a.nrows):
        row = []
        for j in range(b.ncols):
            v = sum(a.rows[i][k] * b.rows[k][j] for k in range(a.ncols))
            if v not in (-1, 0, 1):
                raise ClosureViolation(
                    "product entry %d at (%d,%d) outside {-1,0,1}" % (v, i, j),
                    cell=(i, j), value=v)
            row.append(v)
        out.append(row)
    return FiMatrix(out, ncols=b.ncols)


@dataclass(frozen=True)
class ElementaryOp:
    """One logged elementary operation with the hash of its result.

    kind is one of "swap_rows", "swap_cols", "add_row", "add_col"; the add
    forms mean row[i] += c * row[j] (resp. col[i] += c * col[j]) with
    c in {-1, +1}.
    """

    kind: str
    i: int
    j: int
    c: int = 0
    result_hash: str = ""

    def describe(self):
        if self.kind == "swap_rows":
            return "r%d <-> r%d" % (self.i + 1, self.j + 1)
        if self.kind == "swap_cols":
            return "c%d <-> c%d" % (self.i + 1, self.j + 1)
        sym = "r" if self.kind == "add_row" else "c"
        sign = "+" if self.c > 0 else "-"
        return "%s%d <- %s%d %s %s%d" % (sym, self.i + 1, sym, self.i + 1,
                                         sign, sym, self.j + 1)


def apply_elementary_op(rows, op):
    """Apply one op to a mutable list-of-lists of integers (any ring)."""
    if op.kind == "swap_rows":
        rows[op.i], rows[op.j] = rows[op.j], rows[op.i]
    elif op.kind == "swap_cols":
        for r in rows:
            r[op.i], r[op.j] = r[op.j], r[op.i]
    elif op.kind == "add_row":
        src = rows[op.j]
        dst = rows[op.i]
        for k in range(len(dst)):
            dst[k] = dst[k] + op.c * src[k]
    elif op.kind == "add_col":
        for r in rows:
            r[op.i] = r[op.i] + op.c * r[op.j]
    else:
        raise ValueError("unknown op kind %r" % (op.kind,))


@dataclass(frozen=True)
class RankCertificate:
    """A replayable witness that the input has the stated rank in every field.

    Replaying ``ops`` over the integers starting from the input reproduces
    ``final``, whose pivots are all +-1.  ``transposed`` marks certificates
    computed on the transposed input (rank is unchanged; the replayer must
    transpose first).
    """

    input_hash: str
    rank: int
    ops: tuple
    final: FiMatrix
    transposed: bool = False


def _plain_rank_mod_p(rows, ncols, p):
    m = [[x % p for x in r] for r in rows]
    rank = 0
    col = 0
    nrows = len(m)
    while rank < nrows and col < ncols:
        piv = next((r for r in range(rank, nrows) if m[r][col] % p), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p) if p > 2 else m[rank][col]
        for r in range(rank + 1, nrows):
            if m[r][col] % p:
                f = (m[r][col] * inv) % p
                for k in range(col, ncols):
                    m[r][k] = (m[r][k] - f * m[rank][k]) % p
        rank += 1
        col += 1
    return rank


def _plain_rank_rational(rows, ncols):
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    col = 0
    nrows = len(m)
    while rank < nrows and col < ncols:
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, nrows):
            if m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                for k in range(col, ncols):
                    m[r][k] -= f * m[rank][k]
        rank += 1
        col += 1
    return rank


def rank_diagnostic(a):
    """Plain-elimination ranks over several fields (diagnostic only).

    Never used for certification; reported alongside refusals so users can
    see whether the ranks genuinely differ between fields.
    """
    ranks = {p: _plain_rank_mod_p(a.rows, a.ncols, p) for p in DIAGNOSTIC_PRIMES}
    rq = _plain_rank_rational(a.rows, a.ncols)
    dependent = any(r != rq for r in ranks.values())
    return {"rank_rational": rq,
            "rank_mod": ranks,
            "field_dependent": dependent}


def _format_diagnostic(diag):
    mods = ", ".join("rank %d over GF(%d)" % (r, p)
                     for p, r in sorted(diag["rank_mod"].items()))
    return "rank %d over Q, %s" % (diag["rank_rational"], mods)


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, limit):
        self.remaining = limit

    def spend(self):
        self.remaining -= 1
        return self.remaining >= 0


def _echelon(rows, ncols, budget):
    """Depth-first search over pivot-row choices.

    Greedy left-to-right column scan; a pivot candidate fails when some
    elimination below it would push an entry outside {-1,0,1}, in which
    case the next candidate row is tried.  Returns (final rows, ops) on
    success and None on a dead end or an exhausted budget.
    """

    def rec(state, r, c):
        nrows = len(state)
        while True:
            if r >= nrows or c >= ncols:
                return state, []
            candidates = [k for k in range(r, nrows) if state[k][c] != 0]
            if not candidates:
                c += 1
                continue
            break
        for k in candidates:
            if not budget.spend():
                return None
            trial = [list(row) for row in state]
            trial_ops = []
            if k != r:
                op = ElementaryOp("swap_rows", r, k)
                apply_elementary_op(trial, op)
                trial_ops.append(ElementaryOp("swap_rows", r, k,
                                              result_hash=_hash_rows(trial, ncols)))
            pivot = trial[r][c]
            ok = True
            for i in range(r + 1, nrows):
                if trial[i][c] == 0:
                    continue
                mult = -trial[i][c] * pivot
                op = ElementaryOp("add_row", i, r, mult)
                apply_elementary_op(trial, op)
                if any(x not in (-1, 0, 1) for x in trial[i]):
                    ok = False
                    break
                trial_ops.append(ElementaryOp("add_row", i, r, mult,
                                              result_hash=_hash_rows(trial, ncols)))
            if not ok:
                continue
            deeper = rec(trial, r + 1, c + 1)
            if deeper is not None:
                final, tail_ops = deeper
                return final, trial_ops + tail_ops
            if budget.remaining < 0:
                return None
        return None

    return rec(rows, 0, 0)


def fi_echelonize(a, budget=None):
    """Bring ``a`` to row echelon form using only field-portable operations.

    Deterministic for a given input.  Raises CannotCertify (with a
    finite-field diagnostic) when no admissible sequence is found within
    the backtracking budget.
    """
    limit = backtrack_limit(budget)
    counter = _Budget(limit)
    start = [list(r) for r in a.rows]
    result = _echelon(start, a.ncols, counter)
    if result is None:
        diag = rank_diagnostic(a)
        exhausted = counter.remaining < 0
        msg = ("echelonization budget exhausted (limit %d); " % limit
               if exhausted else "no admissible elimination sequence; ")
        raise CannotCertify(msg + _format_diagnostic(diag),
                            diagnostic=diag, budget_exhausted=exhausted)
    final_rows, ops = result
    final = FiMatrix(final_rows, ncols=a.ncols)
    rank = sum(1 for r in final.rows if any(x != 0 for x in r))
    return RankCertificate(input_hash=a.content_hash(), rank=rank,
                           ops=tuple(ops), final=final)


def fi_corank(a, budget=None):
    """Dimension of the solution space of a x = 0: cols - certified rank."""
    return a.ncols - fi_echelonize(a, budget=budget).rank


def fi_full_rank_check(a, side, budget=None):
    """Certify full column rank (side="column") or full row rank (side="row").

    The rank of a matrix equals the rank of its transpose over every field,
    so a refusal on the matrix itself triggers a second attempt on the
    transpose before giving up; such certificates are flagged transposed.
    """
    if side not in ("column", "row"):
        raise ValueError("side must be 'column' or 'row'")
    want = a.ncols if side == "column" else a.nrows
    try:
        cert = fi_echelonize(a, budget=budget)
    except CannotCertify as primary:
        try:
            tcert = fi_echelonize(a.transpose(), budget=budget)
        except CannotCertify:
            raise primary from None
        cert = RankCertificate(input_hash=a.content_hash(), rank=tcert.rank,
                               ops=tcert.ops, final=tcert.final, transposed=True)
    if cert.rank != want:
        raise NotFullRank(
            "certified rank %d, full %s rank needs %d" % (cert.rank, side, want),
            certificate=cert)
    return cert
