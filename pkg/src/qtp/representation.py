"""Quiver representations (concrete or symbolic families) and morphisms.

A representation assigns a 0/1 matrix (or a non-negative block family) to
every arrow; vertex dimensions are derived from the matrix shapes and must
agree wherever a vertex is touched by several arrows.  Morphism families
assign a {-1,0,1} matrix per vertex.

Includes the tree bookkeeping: counting ones against length-1 and building
the coefficient quiver of a concrete representation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocks import BlockMatrix, bm_shift, instantiate, ones_count_sym
from .errors import SemanticError, ShapeError
from .fimatrix import FiMatrix
from .quiver import Quiver
from .symbolic import DimExpr, PolyN


class Representation:
    """A representation of ``quiver``: one matrix per arrow.

    ``maps`` is a dict arrow id -> FiMatrix (concrete, entries 0/1) or
    BlockMatrix (symbolic, non-negative blocks).  Matrix shape convention:
    the matrix of an arrow a: s -> t has dim(t) rows and dim(s) columns.
    """

    def __init__(self, quiver: Quiver, maps, name="", n0=None):
        self.quiver = quiver
        self.name = name
        self.maps = dict(maps)
        missing = [a for a, _, _ in quiver.arrows if a not in self.maps]
        if missing:
            raise SemanticError("missing matrices for arrows: %s"
                                % ", ".join(missing), entity=name)
        extra = [a for a in self.maps if a not in quiver.arrow_index]
        if extra:
            raise SemanticError("matrices for unknown arrows: %s"
                                % ", ".join(extra), entity=name)
        kinds = {isinstance(m, BlockMatrix) for m in self.maps.values()}
        if len(kinds) > 1:
            raise SemanticError("mixed concrete and symbolic matrices",
                                entity=name)
        self.symbolic = kinds == {True}
        if self.symbolic:
            base = max(m.n0 for m in self.maps.values())
            self.n0 = base if n0 is None else max(n0, base)
        else:
            self.n0 = 0
        self._check_signs()
        self.dims = self._derive_dims()

    def _check_signs(self):
        for a, m in self.maps.items():
            if isinstance(m, FiMatrix):
                if any(x < 0 for row in m.rows for x in row):
                    raise SemanticError(
                        "matrix of arrow %s has negative entries; "
                        "representations are 0/1" % a, entity=self.name)
            else:
                for row in m.grid:
                    for cell in row:
                        if cell.ci < 0 or cell.ce < 0:
                            raise SemanticError(
                                "matrix of arrow %s has negative blocks; "
                                "representations are 0/1" % a, entity=self.name)

    def _derive_dims(self):
        dims = {}

        def meet(vertex, size):
            if vertex in dims:
                if dims[vertex] != size:
                    raise SemanticError(
                        "vertex %s has inconsistent dimensions %s vs %s"
                        % (vertex, dims[vertex], size), entity=self.name)
            else:
                dims[vertex] = size
        for a, s, t in self.quiver.arrows:
            m = self.maps[a]
            if isinstance(m, FiMatrix):
                meet(t, m.nrows)
                meet(s, m.ncols)
            else:
                meet(t, m.total_rows())
                meet(s, m.total_cols())
        for v in self.quiver.vertices:
            if v not in dims:
                dims[v] = DimExpr(0, 0) if self.symbolic else 0
        return tuple(dims[v] for v in self.quiver.vertices)

    def dim_at(self, vertex):
        return self.dims[self.quiver.vertex_index[vertex]]

    def concrete_dims(self, n=None):
        if not self.symbolic:
            return self.dims
        return tuple(e.eval(n) for e in self.dims)


@dataclass(frozen=True)
class QuiverAutomorphism:
    """A symmetry of the quiver: compatible vertex and arrow bijections."""

    quiver: Quiver
    vertex_map: dict
    arrow_map: dict

    @staticmethod
    def from_pairs(quiver, pairs):
        """Build an automorphism from (from -> to) id pairs.

        Ids may name vertices or arrows; unspecified vertices are fixed,
        and unspecified arrows are matched between parallel classes in
        declaration order.
        """
        vmap = {}
        amap = {}
        for src, dst in pairs:
            if src in quiver.vertex_index:
                if dst not in quiver.vertex_index:
                    raise SemanticError("permutation maps vertex %s to "
                                        "non-vertex %s" % (src, dst))
                vmap[src] = dst
            elif src in quiver.arrow_index:
                if dst not in quiver.arrow_index:
                    raise SemanticError("permutation maps arrow %s to "
                                        "non-arrow %s" % (src, dst))
                amap[src] = dst
            else:
                raise SemanticError("permutation references unknown id %s" % src)
        for v in quiver.vertices:
            vmap.setdefault(v, v)
        if sorted(vmap.values()) != sorted(quiver.vertices):
            raise SemanticError("vertex permutation is not a bijection")
        # complete the arrow map: group arrows by (source, target) pairs
        by_pair = {}
        for a, s, t in quiver.arrows:
            by_pair.setdefault((s, t), []).append(a)
        for a, s, t in quiver.arrows:
            if a in amap:
                continue
            image_pair = (vmap[s], vmap[t])
            targets = by_pair.get(image_pair, [])
            taken = set(amap.values())
            free = [x for x in targets if x not in taken]
            if not free:
                raise SemanticError(
                    "vertex permutation does not extend to arrows at %s->%s"
                    % (s, t))
            amap[a] = free[0]
        if sorted(amap.values()) != sorted(a for a, _, _ in quiver.arrows):
            raise SemanticError("arrow permutation is not a bijection")
        auto = QuiverAutomorphism(quiver, vmap, amap)
        auto.validate()
        return auto

    def validate(self):
        arrows = {a: (s, t) for a, s, t in self.quiver.arrows}
        for a, (s, t) in arrows.items():
            img = arrows[self.arrow_map[a]]
            if img != (self.vertex_map[s], self.vertex_map[t]):
                raise SemanticError(
                    "permutation is not a quiver automorphism: arrow %s" % a)

    def compose(self, other):
        """self after other: (self*other)(x) = self(other(x))."""
        vmap = {v: self.vertex_map[other.vertex_map[v]]
                for v in self.quiver.vertices}
        amap = {a: self.arrow_map[other.arrow_map[a]]
                for a, _, _ in self.quiver.arrows}
        return QuiverAutomorphism(self.quiver, vmap, amap)

    def is_identity(self):
        return (all(v == w for v, w in self.vertex_map.items())
                and all(a == b for a, b in self.arrow_map.items()))


def permute_representation(rep, sigma):
    """Transport a representation along an automorphism.

    The new representation places at arrow a the matrix the old one had at
    sigma(a), and at vertex i the dimension of sigma(i).
    """
    if sigma.quiver is not rep.quiver and sigma.quiver.arrows != rep.quiver.arrows:
        raise SemanticError("automorphism belongs to a different quiver")
    maps = {a: rep.maps[sigma.arrow_map[a]] for a, _, _ in rep.quiver.arrows}
    name = rep.name + "~" if rep.name else ""
    return Representation(rep.quiver, maps, name=name,
                          n0=rep.n0 if rep.symbolic else None)


def shift_representation(rep, c):
    """Substitute n -> n - c in a symbolic representation."""
    if not rep.symbolic:
        raise SemanticError("cannot shift a concrete representation")
    maps = {a: bm_shift(m, c) for a, m in rep.maps.items()}
    return Representation(rep.quiver, maps, name=rep.name, n0=rep.n0 + c)


def instantiate_formula(rep, n):
    """Evaluate a symbolic representation at a concrete parameter."""
    if not rep.symbolic:
        raise SemanticError("representation is already concrete")
    if n < rep.n0:
        raise ShapeError("n=%d below base parameter %d" % (n, rep.n0))
    maps = {a: instantiate(m, n) for a, m in rep.maps.items()}
    return Representation(rep.quiver, maps,
                          name="%s@%d" % (rep.name, n) if rep.name else "")


def dim_and_length(rep):
    """The dimension vector and the length (sum of dimensions) as a PolyN."""
    total = PolyN()
    for d in rep.dims:
        total = total + PolyN.coerce(d)
    return rep.dims, total


def ones_count(rep):
    """Total number of 1-entries over all arrow matrices, as a PolyN."""
    total = PolyN()
    for m in rep.maps.values():
        if isinstance(m, FiMatrix):
            total = total + PolyN.const(
                sum(1 for row in m.rows for x in row if x == 1))
        else:
            total = total + ones_count_sym(m)
    return total


def check_tree_count(rep):
    """True when the number of ones equals length - 1 (as polynomials)."""
    _, length = dim_and_length(rep)
    return ones_count(rep) == length - PolyN.const(1)


def coefficient_quiver(rep):
    """Vertices (vertex id, basis index); edges at the 1-entries.

    Concrete representations only.
    """
    if rep.symbolic:
        raise SemanticError("coefficient quiver needs a concrete representation")
    nodes = []
    for v, d in zip(rep.quiver.vertices, rep.dims):
        nodes.extend((v, k) for k in range(d))
    edges = []
    for a, s, t in rep.quiver.arrows:
        m = rep.maps[a]
        for i in range(m.nrows):
            for j in range(m.ncols):
                if m.rows[i][j]:
                    edges.append(((s, j), (t, i), a))
    return nodes, edges


def coefficient_quiver_is_tree(rep):
    """Connected with exactly length-1 edges (undirected)."""
    nodes, edges = coefficient_quiver(rep)
    if not nodes:
        return False
    if len(edges) != len(nodes) - 1:
        return False
    index = {node: k for k, node in enumerate(nodes)}
    parent = list(range(len(nodes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    components = len(nodes)
    for u, v, _ in edges:
        ru, rv = find(index[u]), find(index[v])
        if ru != rv:
            parent[ru] = rv
            components -= 1
    return components == 1


class MorphismFamily:
    """A family of vertex-indexed matrices between two representations.

    Entries lie in {-1, 0, 1}; shapes must match target/source dimensions:
    the matrix at vertex i maps source_i -> target_i, so it has
    dim(target, i) rows and dim(source, i) columns.
    """

    def __init__(self, source: Representation, target: Representation,
                 maps, name=""):
        self.source = source
        self.target = target
        self.name = name
        self.maps = dict(maps)
        q = source.quiver
        if target.quiver is not q and target.quiver.arrows != q.arrows:
            raise SemanticError("morphism between different quivers",
                                entity=name)
        self.symbolic = any(isinstance(m, BlockMatrix)
                            for m in self.maps.values())
        for v in q.vertices:
            if v not in self.maps:
                self.maps[v] = self._zero_map(v)
        self._check_shapes()

    def _zero_map(self, v):
        rows = self.target.dim_at(v)
        cols = self.source.dim_at(v)
        if isinstance(rows, DimExpr) or isinstance(cols, DimExpr):
            from .blocks import bm_zero
            return bm_zero([DimExpr.coerce(rows)], [DimExpr.coerce(cols)])
        return FiMatrix.zeros(rows, cols)

    def _check_shapes(self):
        for v in self.source.quiver.vertices:
            m = self.maps[v]
            want_rows = self.target.dim_at(v)
            want_cols = self.source.dim_at(v)
            if isinstance(m, FiMatrix):
                have = (m.nrows, m.ncols)
                want = (want_rows, want_cols)
            else:
                have = (m.total_rows(), m.total_cols())
                want = (DimExpr.coerce(want_rows), DimExpr.coerce(want_cols))
            if have != want:
                raise SemanticError(
                    "map at vertex %s has shape %s, expected %s"
                    % (v, have, want), entity=self.name)

    def map_at(self, v):
        return self.maps[v]
