"""Proof traces: step recording, canonical JSON, and LaTeX emission.

Every verification routine logs its work as Steps on a TraceRecorder; the
engine assembles recorders into ProofTraces in a fixed obligation order, so
emitted documents are byte-identical however the obligations were
scheduled.  Two renderings: a LaTeX document for human checking, one
operation per displayed line, and a canonical JSON trace for mechanical
replay.

Snapshot policy: the input and final matrix of every elimination are stored
in full; intermediate snapshots are stored in full up to a size cap and as
SHA-256 hashes always, so a replayer can verify each step without
recomputation strategy choices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .blocks import BlockEntry, BlockMatrix, BlockOp
from .fimatrix import ElementaryOp, FiMatrix, RankCertificate, apply_elementary_op
from .symbolic import DimExpr

SNAPSHOT_ENTRY_CAP = 2500


@dataclass(frozen=True)
class Step:
    kind: str
    caption: str
    payload: tuple = ()   # tuple of (key, value) pairs, already serializable


def _fi_to_json(m):
    return {"kind": "fi", "rows": m.nrows, "cols": m.ncols,
            "entries": [list(r) for r in m.rows]}


def _dimexpr_to_json(e):
    return [e.a, e.b]


def _entry_to_json(cell, rows, cols):
    if cell.is_zero():
        sym, sign = "Z", 1
    elif cell.ci:
        sym, sign = "I", cell.ci
    else:
        sym, sign = "E", cell.ce
    return {"sym": sym, "sign": sign,
            "rows": _dimexpr_to_json(rows), "cols": _dimexpr_to_json(cols)}


def _bm_to_json(m):
    grid = []
    for i, row in enumerate(m.grid):
        grid.append([_entry_to_json(cell, m.row_part[i], m.col_part[j])
                     for j, cell in enumerate(row)])
    return {"kind": "block", "n0": m.n0,
            "rowpart": [_dimexpr_to_json(p) for p in m.row_part],
            "colpart": [_dimexpr_to_json(p) for p in m.col_part],
            "grid": grid}


def matrix_to_json(m):
    if isinstance(m, FiMatrix):
        return _fi_to_json(m)
    if isinstance(m, BlockMatrix):
        return _bm_to_json(m)
    raise TypeError("not a matrix: %r" % (m,))


def _fi_op_to_json(op):
    return {"kind": op.kind, "i": op.i, "j": op.j, "c": op.c,
            "result_sha256": op.result_hash}


def _block_coeff_to_json(cell):
    if cell.ci:
        return {"sym": "I", "sign": cell.ci}
    return {"sym": "E", "sign": cell.ce}


def _block_op_to_json(op):
    return {"kind": op.kind, "i": op.i, "j": op.j,
            "coeff": _block_coeff_to_json(op.coeff)}


class TraceRecorder:
    """Collects steps during one verification obligation."""

    def __init__(self):
        self.steps = []

    def note(self, caption):
        self.steps.append(Step("note", caption))

    def fi_matrix(self, caption, m):
        self.steps.append(Step("matrix", caption,
                               (("matrix", matrix_to_json(m)),)))

    def fi_certificate(self, caption, start, cert):
        """Expand a rank certificate into per-operation steps with snapshots."""
        self.note(caption)
        shown = start.transpose() if cert.transposed else start
        if cert.transposed:
            self.note("operating on the transpose (rank is unchanged)")
        self.fi_matrix("initial matrix", shown)
        state = [list(r) for r in shown.rows]
        for op in cert.ops:
            apply_elementary_op(state, op)
            payload = [("op", _fi_op_to_json(op))]
            if len(state) * shown.ncols <= SNAPSHOT_ENTRY_CAP:
                payload.append(("after", {"kind": "fi", "rows": len(state),
                                          "cols": shown.ncols,
                                          "entries": [list(r) for r in state]}))
            self.steps.append(Step("fi_op", op.describe(), tuple(payload)))
        self.fi_matrix("echelon form", cert.final)
        self.steps.append(Step("rank", "certified rank %d" % cert.rank,
                               (("rank", cert.rank),
                                ("transposed", cert.transposed))))

    def block_certificate(self, caption, start, cert):
        self.note(caption)
        shown = start.transpose() if cert.transposed else start
        if cert.transposed:
            self.note("operating on the transpose")
        self.fi_matrix("initial block matrix", shown)
        state = [list(r) for r in shown.grid]
        for op in cert.ops:
            apply_block_op(state, op)
            after = BlockMatrix(shown.row_part, shown.col_part,
                                [tuple(r) for r in state], n0=shown.n0)
            self.steps.append(Step("block_op", op.describe(),
                                   (("op", _block_op_to_json(op)),
                                    ("after", _bm_to_json(after)))))
        self.fi_matrix("pivoted block form", cert.final)
        self.steps.append(Step("rank", "certified full %s rank" % cert.side,
                               (("side", cert.side),
                                ("transposed", cert.transposed))))

    def rank_step(self, caption, m, cert):
        if isinstance(cert, RankCertificate):
            self.fi_certificate(caption, m, cert)
        else:
            self.block_certificate(caption, m, cert)

    def commute_step(self, caption, lhs, rhs, same):
        self.steps.append(Step("commute", caption,
                               (("lhs", matrix_to_json(lhs)),
                                ("rhs", matrix_to_json(rhs)),
                                ("equal", bool(same)))))

    def compose_step(self, caption, m, ok):
        self.steps.append(Step("compose", caption,
                               (("product", matrix_to_json(m)),
                                ("zero", bool(ok)))))


def apply_block_op(grid, op):
    """Apply one block-level op to a mutable grid of BlockEntry."""
    if op.kind == "add_row":
        grid[op.i] = [grid[op.i][k] + op.coeff * grid[op.j][k]
                      for k in range(len(grid[op.i]))]
    elif op.kind == "add_col":
        for r in range(len(grid)):
            grid[r] = list(grid[r])
            grid[r][op.i] = grid[r][op.i] + grid[r][op.j] * op.coeff
    elif op.kind == "swap_rows":
        grid[op.i], grid[op.j] = grid[op.j], grid[op.i]
    else:
        raise ValueError("unknown block op %r" % (op.kind,))


@dataclass
class ObligationTrace:
    name: str
    status: str          # "certified", "failed", "refused"
    steps: list
    message: str = ""


@dataclass
class ProofTrace:
    proof_id: str
    target: str
    method: int
    status: str
    obligations: list = field(default_factory=list)


@dataclass
class RunTrace:
    tool_version: str
    input_sha256: str
    proofs: list = field(default_factory=list)


def _step_to_json(step):
    data = {"kind": step.kind, "caption": step.caption}
    for key, value in step.payload:
        data[key] = value
    return data


def run_trace_to_json(run):
    return {
        "format": "qtp-trace",
        "version": 1,
        "tool_version": run.tool_version,
        "input_sha256": run.input_sha256,
        "proofs": [
            {
                "id": p.proof_id,
                "target": p.target,
                "method": p.method,
                "status": p.status,
                "obligations": [
                    {"name": ob.name, "status": ob.status,
                     "message": ob.message,
                     "steps": [_step_to_json(s) for s in ob.steps]}
                    for ob in p.obligations
                ],
            }
            for p in run.proofs
        ],
    }


def emit_json(run):
    """Canonical JSON: sorted keys, compact separators, ASCII only."""
    return json.dumps(run_trace_to_json(run), sort_keys=True,
                      separators=(",", ":"), ensure_ascii=True) + "\n"


# ---------------------------------------------------------------------------
# LaTeX

def _tex_escape(text):
    out = []
    table = {"&": r"\&", "%": r"\%", "$": r"\$", "#": r"\#", "_": r"\_",
             "{": r"\{", "}": r"\}", "~": r"\textasciitilde{}",
             "^": r"\textasciicircum{}", "\\": r"\textbackslash{}",
             "<": r"$<$", ">": r"$>$"}
    for ch in text:
        out.append(table.get(ch, ch))
    return "".join(out)


def _dimexpr_tex(e):
    return str(e).replace("n", "n")


def _fi_tex(m):
    if m.nrows == 0 or m.ncols == 0:
        return r"\mathsf{empty}_{%d\times %d}" % (m.nrows, m.ncols)
    if m.ncols > 24 or m.nrows > 40:
        return r"\mathsf{matrix}_{%d\times %d}" % (m.nrows, m.ncols)
    body = r" \\ ".join(" & ".join(str(x) for x in row) for row in m.rows)
    env = "pmatrix" if m.ncols <= 12 else "smallmatrix"
    if env == "pmatrix":
        return r"\begin{pmatrix}%s\end{pmatrix}" % body
    return r"\left(\begin{smallmatrix}%s\end{smallmatrix}\right)" % body


def _entry_tex(cell, size):
    if cell.is_zero():
        return "0"
    if cell.ci:
        core = r"I_{%s}" % _dimexpr_tex(size)
        return core if cell.ci > 0 else "-" + core
    core = r"E_{%s}" % _dimexpr_tex(size)
    return core if cell.ce > 0 else "-" + core


def _bm_tex(m):
    if not m.row_part or not m.col_part:
        return r"\mathsf{empty}"
    rows = []
    for i, row in enumerate(m.grid):
        cells = []
        for j, cell in enumerate(row):
            cells.append(_entry_tex(cell, m.row_part[i]))
        rows.append(" & ".join(cells))
    return r"\begin{pmatrix}%s\end{pmatrix}" % r" \\ ".join(rows)


def _matrix_tex(data):
    """Render a JSON matrix payload back to TeX."""
    if data["kind"] == "fi":
        m = FiMatrix(data["entries"], ncols=data["cols"])
        return _fi_tex(m)
    grid = []
    for i, row in enumerate(data["grid"]):
        cells = []
        for cell in row:
            sign = cell["sign"]
            if cell["sym"] == "Z":
                cells.append(BlockEntry(0, 0))
            elif cell["sym"] == "I":
                cells.append(BlockEntry(sign, 0))
            else:
                cells.append(BlockEntry(0, sign))
        grid.append(cells)
    m = BlockMatrix([DimExpr(*p) for p in data["rowpart"]],
                    [DimExpr(*p) for p in data["colpart"]],
                    grid, n0=data["n0"])
    return _bm_tex(m)


def _step_tex(step):
    payload = dict(step.payload)
    caption = _tex_escape(step.caption)
    if step.kind == "note":
        return caption + "\n"
    if step.kind == "matrix":
        return "%s:\n\\[ %s \\]\n" % (caption, _matrix_tex(payload["matrix"]))
    if step.kind in ("fi_op", "block_op"):
        lines = ["operation $%s$" % _tex_escape_math(step.caption)]
        if "after" in payload:
            lines.append("\\[ \\leadsto %s \\]" % _matrix_tex(payload["after"]))
        else:
            lines.append("(result hash %s)" %
                         payload["op"].get("result_sha256", "")[:16])
        return "\n".join(lines) + "\n"
    if step.kind == "rank":
        return caption + ".\n"
    if step.kind == "commute":
        verdict = "equal" if payload["equal"] else "NOT equal"
        return ("%s:\n\\[ %s \\quad\\text{vs}\\quad %s \\]\nboth sides are %s.\n"
                % (caption, _matrix_tex(payload["lhs"]),
                   _matrix_tex(payload["rhs"]), verdict))
    if step.kind == "compose":
        verdict = "zero" if payload["zero"] else "NOT zero"
        return ("%s:\n\\[ %s \\]\nthe composite is %s.\n"
                % (caption, _matrix_tex(payload["product"]), verdict))
    return caption + "\n"


def _tex_escape_math(text):
    return (text.replace("<->", r"\leftrightarrow ")
            .replace("<-", r"\leftarrow "))


LATEX_HEADER = r"""\documentclass[11pt]{article}
\usepackage{amsmath}
\usepackage[margin=2.5cm]{geometry}
\setcounter{secnumdepth}{0}
\begin{document}
"""


def emit_latex(run):
    """Self-contained LaTeX document showing every logged step."""
    out = [LATEX_HEADER]
    out.append("\\title{Certification record}\n")
    out.append("\\date{}\n\\maketitle\n")
    out.append("\\noindent tool version %s; input hash \\texttt{%s}\n"
               % (_tex_escape(run.tool_version), run.input_sha256[:16]))
    for proof in run.proofs:
        out.append("\\section{Proof %s: formula %s (method %d) --- %s}\n"
                   % (_tex_escape(proof.proof_id), _tex_escape(proof.target),
                      proof.method, _tex_escape(proof.status)))
        for ob in proof.obligations:
            out.append("\\subsection{%s [%s]}\n"
                       % (_tex_escape(ob.name), _tex_escape(ob.status)))
            if ob.message:
                out.append(_tex_escape(ob.message) + "\n")
            for step in ob.steps:
                out.append(_step_tex(step))
                out.append("\n")
    out.append("\\end{document}\n")
    return "".join(out)
