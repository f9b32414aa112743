"""Parser and serializer for the proof-input document format (.qtp).

Line-oriented, UTF-8, with ``#`` comments.  A document declares quivers,
formulas (families of representations, one block matrix per arrow),
morphism families between formula references, and proofs.  Grammar:

    document   := (quiver | formula | morphism | proof)*
    quiver     := "quiver" ID "{" ("vertex" ID)+ ("arrow" ID ":" ID "->" ID)+ "}"
    dimexpr    := INT | [INT] "n" [("+" | "-") INT]
    formula    := "formula" ID "on" ID ["param" "n" ">=" INT] "{" matrix+ "}"
    matrix     := "matrix" ID body
    body       := "rows" "(" dimexpr ("," dimexpr)* ")"
                  "cols" "(" dimexpr ("," dimexpr)* ")"
                  "{" ("block" INT INT "=" ("Z"|"I"|"-I"|"E"|"-E"))* "}"
    morphism   := "morphism" ID ":" REF "->" REF "{" ("map" ID body)+ "}"
    REF        := ID ["@" ("n" ["-" INT] | INT)]
                  ["permuted" "(" ID "->" ID ("," ID "->" ID)* ")"]
    proof      := "proof" ID "for" ID "{" method "}"
    method     := "method1" "at" "n" "=" INT
                | "method3" "pair" SES "pair" SES
                | "method2" "base" INT ("," INT)* "pair" SES "pair" SES
    SES        := "(" "sub" REF "quot" REF "f" ID "g" ID ")"

Grid cells not listed in a body default to the zero block.  Comments are
dropped by the serializer; apart from that, parse(serialize(parse(t)))
equals parse(t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .blocks import BlockMatrix, entry_from_symbol
from .errors import ParseError, QtpError, SemanticError, ShapeError
from .quiver import Quiver
from .representation import (MorphismFamily, QuiverAutomorphism,
                             Representation, permute_representation,
                             shift_representation)
from .symbolic import DimExpr

_SYMBOL_NAMES = ("Z", "I", "-I", "E", "-E")
_KEYWORDS = {"quiver", "vertex", "arrow", "formula", "on", "param", "matrix",
             "rows", "cols", "block", "morphism", "map", "proof", "for",
             "method1", "method2", "method3", "at", "base", "pair", "sub",
             "quot", "f", "g", "permuted", "n"}


# ---------------------------------------------------------------------------
# tokens

@dataclass(frozen=True)
class Token:
    kind: str        # "ident", "int", "punct", "eof"
    text: str
    line: int
    col: int


_PUNCT2 = ("->", ">=")
_PUNCT1 = "{}(),:@=+-"


def tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    size = len(text)
    while i < size:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < size and text[i] != "\n":
                i += 1
            continue
        two = text[i:i + 2]
        if two in _PUNCT2:
            tokens.append(Token("punct", two, line, col))
            i += 2
            col += 2
            continue
        if ch.isdigit():
            j = i
            while j < size and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < size and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT1:
            tokens.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError("unexpected character %r" % ch, line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# document model

@dataclass(frozen=True)
class Ref:
    """A reference to a formula, optionally shifted and/or permuted.

    ``shift`` counts backwards: shift=c means the family at parameter n-c;
    ``absolute`` pins a concrete parameter instead.  Exactly one of the two
    may be set; both None means the family at parameter n.
    """

    formula: str
    shift: int = 0
    absolute: object = None
    perm: tuple = ()

    def key(self):
        return (self.formula, self.shift, self.absolute, self.perm)

    def __str__(self):
        out = self.formula
        if self.absolute is not None:
            out += "@%d" % self.absolute
        elif self.shift:
            out += "@n-%d" % self.shift
        if self.perm:
            out += " permuted(%s)" % ", ".join(
                "%s -> %s" % p for p in self.perm)
        return out


@dataclass
class MatrixDecl:
    name: str
    row_part: tuple
    col_part: tuple
    blocks: dict
    line: int
    col: int

    def to_block_matrix(self):
        grid = [[entry_from_symbol(self.blocks.get((i, j), "Z"))
                 for j in range(len(self.col_part))]
                for i in range(len(self.row_part))]
        return BlockMatrix(self.row_part, self.col_part, grid)


@dataclass
class FormulaDecl:
    name: str
    quiver: str
    n0: int
    matrices: dict
    line: int
    col: int
    representation: Representation = None


@dataclass
class MorphismDecl:
    name: str
    source: Ref
    target: Ref
    maps: dict
    line: int
    col: int


@dataclass
class SesDecl:
    sub: Ref
    quot: Ref
    f: str
    g: str


@dataclass
class ProofDecl:
    name: str
    target: str
    method: int
    at_n: object = None
    bases: tuple = ()
    pairs: tuple = ()
    line: int = 0
    col: int = 0


@dataclass
class Document:
    quivers: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    proofs: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    def quiver_of(self, formula_name):
        return self.quivers[self.formulas[formula_name].quiver]


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect(self, kind, text=None):
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            self.fail("expected %r, found %r" % (want, tok.text or tok.kind))
        return self.next()

    def expect_keyword(self, word):
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            self.fail("expected %r, found %r" % (word, tok.text or tok.kind))
        return self.next()

    def at_keyword(self, word):
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def ident(self, what="identifier"):
        tok = self.peek()
        if tok.kind != "ident":
            self.fail("expected %s, found %r" % (what, tok.text or tok.kind))
        return self.next().text

    def integer(self):
        tok = self.peek()
        if tok.kind != "int":
            self.fail("expected integer, found %r" % (tok.text or tok.kind))
        return int(self.next().text)

    # grammar rules ---------------------------------------------------------

    def document(self):
        doc = Document()
        while self.peek().kind != "eof":
            tok = self.peek()
            if self.at_keyword("quiver"):
                q = self.quiver()
                self._declare(doc.quivers, q.name, tok, "quiver")
                doc.quivers[q.name] = q
                doc.order.append(("quiver", q.name))
            elif self.at_keyword("formula"):
                f = self.formula(doc)
                self._declare(doc.formulas, f.name, tok, "formula")
                doc.formulas[f.name] = f
                doc.order.append(("formula", f.name))
            elif self.at_keyword("morphism"):
                m = self.morphism(doc)
                self._declare(doc.morphisms, m.name, tok, "morphism")
                doc.morphisms[m.name] = m
                doc.order.append(("morphism", m.name))
            elif self.at_keyword("proof"):
                p = self.proof(doc)
                self._declare(doc.proofs, p.name, tok, "proof")
                doc.proofs[p.name] = p
                doc.order.append(("proof", p.name))
            else:
                self.fail("expected quiver, formula, morphism or proof")
        return doc

    def _declare(self, table, name, tok, what):
        if name in table:
            raise ParseError("duplicate %s %r" % (what, name), tok.line, tok.col)

    def quiver(self):
        self.expect_keyword("quiver")
        tok = self.peek()
        name = self.ident("quiver id")
        self.expect("punct", "{")
        vertices = []
        arrows = []
        while self.at_keyword("vertex"):
            self.next()
            vertices.append(self.ident("vertex id"))
        while self.at_keyword("arrow"):
            self.next()
            aid = self.ident("arrow id")
            self.expect("punct", ":")
            src = self.ident("source vertex")
            self.expect("punct", "->")
            dst = self.ident("target vertex")
            arrows.append((aid, src, dst))
        self.expect("punct", "}")
        try:
            return Quiver(vertices, arrows, name=name)
        except QtpError as e:
            raise SemanticError(str(e), entity=name, line=tok.line, col=tok.col)

    def dimexpr(self):
        tok = self.peek()
        if tok.kind == "int":
            value = self.integer()
            if self.at_keyword("n"):
                self.next()
                return DimExpr(value, self._dim_tail())
            return DimExpr(0, value)
        if self.at_keyword("n"):
            self.next()
            return DimExpr(1, self._dim_tail())
        self.fail("expected size expression")

    def _dim_tail(self):
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("+", "-"):
            sign = 1 if self.next().text == "+" else -1
            return sign * self.integer()
        return 0

    def _dim_list(self):
        self.expect("punct", "(")
        out = [self.dimexpr()]
        while self.peek().kind == "punct" and self.peek().text == ",":
            self.next()
            out.append(self.dimexpr())
        self.expect("punct", ")")
        return tuple(out)

    def matrix_body(self, name):
        tok = self.peek()
        self.expect_keyword("rows")
        rows = self._dim_list()
        self.expect_keyword("cols")
        cols = self._dim_list()
        self.expect("punct", "{")
        blocks = {}
        while self.at_keyword("block"):
            btok = self.next()
            i = self.integer()
            j = self.integer()
            self.expect("punct", "=")
            sym = self._symbol()
            if i >= len(rows) or j >= len(cols):
                raise ParseError("block (%d,%d) outside the %dx%d grid"
                                 % (i, j, len(rows), len(cols)),
                                 btok.line, btok.col)
            if (i, j) in blocks:
                raise ParseError("block (%d,%d) assigned twice" % (i, j),
                                 btok.line, btok.col)
            blocks[(i, j)] = sym
        self.expect("punct", "}")
        decl = MatrixDecl(name, rows, cols, blocks, tok.line, tok.col)
        try:
            decl.to_block_matrix()
        except QtpError as e:
            raise SemanticError(str(e), entity=name, line=tok.line, col=tok.col)
        return decl

    def _symbol(self):
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "-":
            self.next()
            inner = self.ident("block symbol")
            sym = "-" + inner
        else:
            sym = self.ident("block symbol")
        if sym not in _SYMBOL_NAMES:
            self.fail("unknown block symbol %r" % sym, tok)
        return sym

    def formula(self, doc):
        self.expect_keyword("formula")
        tok = self.peek()
        name = self.ident("formula id")
        self.expect_keyword("on")
        qname = self.ident("quiver id")
        if qname not in doc.quivers:
            raise SemanticError("unknown quiver %r" % qname, entity=name,
                                line=tok.line, col=tok.col)
        quiver = doc.quivers[qname]
        n0 = 0
        if self.at_keyword("param"):
            self.next()
            self.expect_keyword("n")
            self.expect("punct", ">=")
            n0 = self.integer()
        self.expect("punct", "{")
        matrices = {}
        while self.at_keyword("matrix"):
            self.next()
            mtok = self.peek()
            mid = self.ident("arrow id")
            if mid not in quiver.arrow_index:
                raise SemanticError("matrix for unknown arrow %r" % mid,
                                    entity=name, line=mtok.line, col=mtok.col)
            if mid in matrices:
                raise SemanticError("matrix for arrow %r given twice" % mid,
                                    entity=name, line=mtok.line, col=mtok.col)
            matrices[mid] = self.matrix_body(mid)
        self.expect("punct", "}")
        decl = FormulaDecl(name, qname, n0, matrices, tok.line, tok.col)
        try:
            maps = {a: d.to_block_matrix() for a, d in matrices.items()}
            decl.representation = Representation(quiver, maps, name=name, n0=n0)
        except QtpError as e:
            raise SemanticError(str(e), entity=name, line=tok.line, col=tok.col)
        return decl

    def ref(self, doc):
        tok = self.peek()
        name = self.ident("formula id")
        if name not in doc.formulas:
            raise SemanticError("unknown formula %r" % name,
                                line=tok.line, col=tok.col)
        shift = 0
        absolute = None
        if self.peek().kind == "punct" and self.peek().text == "@":
            self.next()
            if self.at_keyword("n"):
                self.next()
                if self.peek().kind == "punct" and self.peek().text == "-":
                    self.next()
                    shift = self.integer()
            else:
                absolute = self.integer()
        perm = ()
        if self.at_keyword("permuted"):
            self.next()
            self.expect("punct", "(")
            pairs = []
            while True:
                src = self.ident("id")
                self.expect("punct", "->")
                dst = self.ident("id")
                pairs.append((src, dst))
                if self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    continue
                break
            self.expect("punct", ")")
            perm = tuple(pairs)
            quiver = doc.quiver_of(name)
            try:
                QuiverAutomorphism.from_pairs(quiver, perm)
            except QtpError as e:
                raise SemanticError(str(e), line=tok.line, col=tok.col)
        return Ref(name, shift=shift, absolute=absolute, perm=perm)

    def morphism(self, doc):
        self.expect_keyword("morphism")
        tok = self.peek()
        name = self.ident("morphism id")
        self.expect("punct", ":")
        source = self.ref(doc)
        self.expect("punct", "->")
        target = self.ref(doc)
        src_q = doc.formulas[source.formula].quiver
        tgt_q = doc.formulas[target.formula].quiver
        if src_q != tgt_q:
            raise SemanticError("morphism between formulas on different "
                                "quivers", entity=name, line=tok.line,
                                col=tok.col)
        quiver = doc.quivers[src_q]
        self.expect("punct", "{")
        maps = {}
        while self.at_keyword("map"):
            self.next()
            vtok = self.peek()
            vid = self.ident("vertex id")
            if vid not in quiver.vertex_index:
                raise SemanticError("map for unknown vertex %r" % vid,
                                    entity=name, line=vtok.line, col=vtok.col)
            if vid in maps:
                raise SemanticError("map for vertex %r given twice" % vid,
                                    entity=name, line=vtok.line, col=vtok.col)
            maps[vid] = self.matrix_body(vid)
        self.expect("punct", "}")
        decl = MorphismDecl(name, source, target, maps, tok.line, tok.col)
        try:
            materialize_morphism(doc, decl)
        except QtpError as e:
            raise SemanticError(str(e), entity=name, line=tok.line, col=tok.col)
        return decl

    def ses(self, doc):
        self.expect("punct", "(")
        self.expect_keyword("sub")
        sub = self.ref(doc)
        self.expect_keyword("quot")
        quot = self.ref(doc)
        self.expect_keyword("f")
        f = self.ident("morphism id")
        self.expect_keyword("g")
        g = self.ident("morphism id")
        self.expect("punct", ")")
        return SesDecl(sub=sub, quot=quot, f=f, g=g)

    def proof(self, doc):
        self.expect_keyword("proof")
        tok = self.peek()
        name = self.ident("proof id")
        self.expect_keyword("for")
        ftok = self.peek()
        target = self.ident("formula id")
        if target not in doc.formulas:
            raise SemanticError("unknown formula %r" % target, entity=name,
                                line=ftok.line, col=ftok.col)
        self.expect("punct", "{")
        decl = None
        if self.at_keyword("method1"):
            self.next()
            self.expect_keyword("at")
            self.expect_keyword("n")
            self.expect("punct", "=")
            at_n = self.integer()
            decl = ProofDecl(name, target, 1, at_n=at_n,
                             line=tok.line, col=tok.col)
        elif self.at_keyword("method3"):
            self.next()
            pairs = []
            for _ in range(2):
                self.expect_keyword("pair")
                pairs.append(self.ses(doc))
            decl = ProofDecl(name, target, 3, pairs=tuple(pairs),
                             line=tok.line, col=tok.col)
        elif self.at_keyword("method2"):
            self.next()
            self.expect_keyword("base")
            bases = [self.integer()]
            while self.peek().kind == "punct" and self.peek().text == ",":
                self.next()
                bases.append(self.integer())
            pairs = []
            for _ in range(2):
                self.expect_keyword("pair")
                pairs.append(self.ses(doc))
            decl = ProofDecl(name, target, 2, bases=tuple(sorted(set(bases))),
                             pairs=tuple(pairs), line=tok.line, col=tok.col)
        else:
            self.fail("expected method1, method2 or method3")
        self.expect("punct", "}")
        self._check_proof(doc, decl)
        return decl

    def _check_proof(self, doc, decl):
        target_ref_key = Ref(decl.target).key()
        for k, ses in enumerate(decl.pairs):
            for mid in (ses.f, ses.g):
                if mid not in doc.morphisms:
                    raise SemanticError("unknown morphism %r" % mid,
                                        entity=decl.name,
                                        line=decl.line, col=decl.col)
            f = doc.morphisms[ses.f]
            g = doc.morphisms[ses.g]
            if f.source.key() != ses.sub.key() or f.target.key() != target_ref_key:
                raise SemanticError(
                    "morphism %s does not map the declared sub to the target"
                    % ses.f, entity=decl.name, line=decl.line, col=decl.col)
            if g.source.key() != target_ref_key or g.target.key() != ses.quot.key():
                raise SemanticError(
                    "morphism %s does not map the target to the declared "
                    "quotient" % ses.g, entity=decl.name,
                    line=decl.line, col=decl.col)


def parse_document(text):
    """Parse a .qtp document; raises ParseError/SemanticError with location."""
    return _Parser(text).document()


# ---------------------------------------------------------------------------
# materialization of references

def materialize_ref(doc, ref):
    """Representation named by a reference: permute, then shift.

    Permutation relabels along a quiver automorphism; a shift substitutes
    n -> n - c; an absolute reference instantiates at a fixed parameter.
    """
    from .representation import instantiate_formula
    rep = doc.formulas[ref.formula].representation
    if ref.perm:
        sigma = QuiverAutomorphism.from_pairs(rep.quiver, ref.perm)
        rep = permute_representation(rep, sigma)
    if ref.absolute is not None:
        return instantiate_formula(rep, ref.absolute)
    if ref.shift:
        rep = shift_representation(rep, ref.shift)
    return rep


def materialize_morphism(doc, decl):
    """MorphismFamily for a declared morphism (validates shapes and signs)."""
    source = materialize_ref(doc, decl.source)
    target = materialize_ref(doc, decl.target)
    maps = {v: d.to_block_matrix() for v, d in decl.maps.items()}
    return MorphismFamily(source, target, maps, name=decl.name)


# ---------------------------------------------------------------------------
# serializer

def _dimexpr_src(e):
    if e.a == 0:
        return str(e.b)
    head = "n" if e.a == 1 else "%d n" % e.a
    if e.b == 0:
        return head
    return "%s %s %d" % (head, "+" if e.b > 0 else "-", abs(e.b))


def _body_src(decl, indent):
    pad = " " * indent
    out = ["%srows (%s) cols (%s) {" % (
        pad,
        ", ".join(_dimexpr_src(p) for p in decl.row_part),
        ", ".join(_dimexpr_src(p) for p in decl.col_part))]
    for (i, j) in sorted(decl.blocks):
        sym = decl.blocks[(i, j)]
        if sym == "Z":
            continue
        out.append("%s  block %d %d = %s" % (pad, i, j, sym))
    out.append(pad + "}")
    return "\n".join(out)


def _ref_src(ref):
    out = ref.formula
    if ref.absolute is not None:
        out += " @ %d" % ref.absolute
    elif ref.shift:
        out += " @ n - %d" % ref.shift
    if ref.perm:
        out += " permuted(%s)" % ", ".join("%s -> %s" % p for p in ref.perm)
    return out


def serialize_document(doc):
    """Canonical pretty-printer; comments are not preserved."""
    out = []
    for kind, name in doc.order:
        if kind == "quiver":
            q = doc.quivers[name]
            out.append("quiver %s {" % name)
            for v in q.vertices:
                out.append("  vertex %s" % v)
            for a, s, t in q.arrows:
                out.append("  arrow %s : %s -> %s" % (a, s, t))
            out.append("}")
        elif kind == "formula":
            f = doc.formulas[name]
            head = "formula %s on %s" % (name, f.quiver)
            if f.n0:
                head += " param n >= %d" % f.n0
            out.append(head + " {")
            for a in sorted(f.matrices):
                out.append("  matrix %s" % a)
                out.append(_body_src(f.matrices[a], 2))
            out.append("}")
        elif kind == "morphism":
            m = doc.morphisms[name]
            out.append("morphism %s : %s -> %s {" % (
                name, _ref_src(m.source), _ref_src(m.target)))
            for v in sorted(m.maps):
                out.append("  map %s" % v)
                out.append(_body_src(m.maps[v], 2))
            out.append("}")
        elif kind == "proof":
            p = doc.proofs[name]
            out.append("proof %s for %s {" % (name, p.target))
            if p.method == 1:
                out.append("  method1 at n = %d" % p.at_n)
            else:
                head = "  method%d" % p.method
                if p.method == 2:
                    head += " base " + ", ".join(str(b) for b in p.bases)
                out.append(head)
                for ses in p.pairs:
                    out.append("  pair (sub %s quot %s f %s g %s)" % (
                        _ref_src(ses.sub), _ref_src(ses.quot), ses.f, ses.g))
            out.append("}")
        out.append("")
    return "\n".join(out)
