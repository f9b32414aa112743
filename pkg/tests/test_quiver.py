"""Root-system arithmetic against hand-evaluated and brute-force values."""

import random

import pytest

from qtp.errors import Ext1HypothesisNotMet, NotARoot, NotTame
from qtp.quiver import (ClassifiedDim, PREINJECTIVE, PREPROJECTIVE, REGULAR,
                        Quiver, ar_path_exists, cartan_matrix, classify_dim,
                        classify_dim_sym, coxeter_apply, coxeter_matrix,
                        euler_form, euler_form_poly, ext1_dim_via_euler,
                        is_exceptional_root, knit_component, locate_orbit,
                        mat_inverse_unimodular, mat_mul, mat_vec,
                        preinj_dim, preproj_dim, radical_delta,
                        schofield_pair_check, tits_form)
from qtp.symbolic import DimExpr


def kronecker():
    return Quiver(["1", "2"], [("a", "1", "2"), ("b", "1", "2")])


def a2():
    return Quiver(["1", "2"], [("a", "1", "2")])


def d4_subspace():
    return Quiver(["c", "a1", "a2", "a3", "a4"],
                  [("r%d" % k, "a%d" % k, "c") for k in (1, 2, 3, 4)])


def test_euler_form_kronecker_hand_values():
    q = kronecker()
    # by hand: sum x_i y_i - two arrow terms x_1 y_2
    assert euler_form(q, (1, 1), (0, 1)) == 1 - 2 == -1
    assert euler_form(q, (1, 1), (1, 1)) == 0        # delta in the radical
    assert tits_form(q, (1, 2)) == 1 + 4 - 2 * 2 == 1
    assert tits_form(q, (2, 2)) == 0


def test_unit_vectors_have_tits_one():
    for q in (kronecker(), a2(), d4_subspace()):
        for i in range(q.n):
            e = tuple(1 if k == i else 0 for k in range(q.n))
            assert tits_form(q, e) == 1


def test_d4_radical_vector():
    q = d4_subspace()
    assert tits_form(q, (2, 1, 1, 1, 1)) == 4 + 4 - 8 == 0
    assert radical_delta(q) == (2, 1, 1, 1, 1)


def test_cartan_matrix_examples():
    assert cartan_matrix(a2()) == [[1, 0], [1, 1]]
    assert cartan_matrix(kronecker()) == [[1, 0], [2, 1]]
    q = Quiver(["x", "y"], [])
    assert cartan_matrix(q) == [[1, 0], [0, 1]]


def test_cartan_cycle_detection():
    with pytest.raises(Exception):
        Quiver(["1", "2"], [("a", "1", "2"), ("b", "2", "1")])


def test_coxeter_matrix_examples():
    assert coxeter_matrix(kronecker()) == [[3, -2], [2, -1]]
    assert coxeter_matrix(a2()) == [[0, -1], [1, -1]]
    assert coxeter_apply(kronecker(), (1, 1)) == (1, 1)


def test_coxeter_adjoint_identity_random():
    rng = random.Random(7)
    for q in (kronecker(), a2(), d4_subspace()):
        for _ in range(100):
            a = tuple(rng.randrange(-4, 5) for _ in range(q.n))
            b = tuple(rng.randrange(-4, 5) for _ in range(q.n))
            assert euler_form(q, a, b) == -euler_form(q, b, coxeter_apply(q, a))


def test_cartan_inverse_identity_random():
    rng = random.Random(8)
    for q in (kronecker(), d4_subspace()):
        c = cartan_matrix(q)
        cinv = mat_inverse_unimodular(c)
        cinv_t = [list(col) for col in zip(*cinv)]
        for _ in range(50):
            x = tuple(rng.randrange(-3, 4) for _ in range(q.n))
            y = tuple(rng.randrange(-3, 4) for _ in range(q.n))
            via_matrix = sum(xi * e for xi, e in zip(x, mat_vec(cinv_t, y)))
            assert euler_form(q, x, y) == via_matrix


def test_euler_bilinearity_random():
    rng = random.Random(9)
    q = d4_subspace()
    for _ in range(50):
        x1 = tuple(rng.randrange(-3, 4) for _ in range(q.n))
        x2 = tuple(rng.randrange(-3, 4) for _ in range(q.n))
        y = tuple(rng.randrange(-3, 4) for _ in range(q.n))
        both = tuple(a + b for a, b in zip(x1, x2))
        assert euler_form(q, both, y) == euler_form(q, x1, y) + euler_form(q, x2, y)


def test_radical_delta_kronecker_and_errors():
    assert radical_delta(kronecker()) == (1, 1)
    with pytest.raises(NotTame):
        radical_delta(a2())


def test_radical_delta_fixed_by_coxeter_all_orientations():
    # flip arms of the four-subspace quiver one by one
    for flip in range(5):
        arrows = []
        for k in (1, 2, 3, 4):
            if k < flip:
                arrows.append(("r%d" % k, "c", "a%d" % k))
            else:
                arrows.append(("r%d" % k, "a%d" % k, "c"))
        q = Quiver(["c", "a1", "a2", "a3", "a4"], arrows)
        delta = radical_delta(q)
        assert delta == (2, 1, 1, 1, 1)
        assert tits_form(q, delta) == 0
        assert coxeter_apply(q, delta) == delta


def test_classification_by_defect():
    q = kronecker()
    assert classify_dim(q, (0, 1)) == ClassifiedDim((0, 1), PREPROJECTIVE, -1)
    assert classify_dim(q, (1, 0)) == ClassifiedDim((1, 0), PREINJECTIVE, 1)
    assert classify_dim(q, (1, 1)) == ClassifiedDim((1, 1), REGULAR, 0)
    with pytest.raises(NotARoot):
        classify_dim(q, (1, 3))  # Tits form 4: not a root


def test_defect_additivity():
    rng = random.Random(10)
    q = d4_subspace()
    delta = radical_delta(q)
    for _ in range(50):
        x = tuple(rng.randrange(0, 4) for _ in range(q.n))
        y = tuple(rng.randrange(0, 4) for _ in range(q.n))
        s = tuple(a + b for a, b in zip(x, y))
        assert euler_form(q, delta, s) == \
            euler_form(q, delta, x) + euler_form(q, delta, y)


def test_exceptional_roots():
    q = kronecker()
    assert is_exceptional_root(q, (1, 2))
    assert not is_exceptional_root(q, (1, 1))   # imaginary root
    assert is_exceptional_root(q, (2, 3))
    assert not is_exceptional_root(q, (2, 2))
    # regular exceptional on the four-subspace quiver: below delta
    d4 = d4_subspace()
    assert is_exceptional_root(d4, (1, 1, 1, 0, 0))
    assert not is_exceptional_root(d4, (2, 1, 1, 1, 1))
    # regular root above delta is not exceptional
    assert tits_form(d4, (3, 2, 2, 1, 1)) == 1
    assert not is_exceptional_root(d4, (3, 2, 2, 1, 1))


def test_preprojective_dims():
    q = kronecker()
    assert preproj_dim(q, 0, "1") == (1, 2)
    assert preproj_dim(q, 1, "2") == (2, 3)
    for i, col in enumerate([(1, 2), (0, 1)]):
        assert preproj_dim(q, 0, q.vertices[i]) == col
    assert preinj_dim(q, 0, "1") == (1, 0)
    assert preinj_dim(q, 1, "1") == (3, 2)


def test_knitting_matches_coxeter_powers():
    for q in (kronecker(), d4_subspace()):
        comp = knit_component(q, PREPROJECTIVE, 10)
        for (s, v), av in comp.vertices.items():
            assert av.dim == preproj_dim(q, s, v), (s, v)
        comp = knit_component(q, PREINJECTIVE, 10)
        for (s, v), av in comp.vertices.items():
            assert av.dim == preinj_dim(q, s, v), (s, v)


def test_knitting_finite_type_ends():
    # the component of a representation-finite quiver stops; knitting past
    # its end is rejected rather than producing nonsense
    with pytest.raises(Exception):
        knit_component(a2(), PREPROJECTIVE, 6)


def test_knitting_kronecker_structure():
    q = kronecker()
    comp = knit_component(q, PREPROJECTIVE, 1)
    assert ((0, "1"), 2) in comp.successors((0, "2"))
    assert ((1, "2"), 2) in comp.successors((0, "1"))
    # mesh additivity gave (2,3) for the first translate
    assert comp.vertices[(1, "2")].dim == (2, 3)
    zero = knit_component(q, PREPROJECTIVE, 0)
    assert sorted(zero.vertices) == [(0, "1"), (0, "2")]


def test_ar_paths():
    q = kronecker()
    comp = knit_component(q, PREPROJECTIVE, 2)
    assert ar_path_exists(comp, (0, "2"), (1, "2"))
    assert not ar_path_exists(comp, (1, "2"), (0, "2"))
    assert ar_path_exists(comp, (1, "1"), (1, "1"))


def test_locate_orbit():
    q = kronecker()
    assert locate_orbit(q, classify_dim(q, (2, 3))) == (1, "2")
    assert locate_orbit(q, classify_dim(q, (1, 0))) == (0, "1")
    assert locate_orbit(q, classify_dim(q, (3, 2))) == (1, "1")


def test_ext1_via_euler_cases():
    q = kronecker()
    x = classify_dim(q, (2, 3))
    y = classify_dim(q, (0, 1))
    assert ext1_dim_via_euler(q, x, y) == -euler_form(q, (2, 3), (0, 1)) == 1
    # preinjective X with preprojective Y is not covered
    with pytest.raises(Ext1HypothesisNotMet):
        ext1_dim_via_euler(q, classify_dim(q, (1, 0)), classify_dim(q, (0, 1)))
    # no path backwards
    with pytest.raises(Ext1HypothesisNotMet):
        ext1_dim_via_euler(q, classify_dim(q, (0, 1)), classify_dim(q, (2, 3)))


def test_ext1_regular_preprojective_matches_brute_force():
    # deferred to test_verifier (needs concrete modules); here the value
    # contract: regular X over preprojective Y computes -<x, y>
    q = d4_subspace()
    x = classify_dim(q, (1, 1, 1, 0, 0))
    y = classify_dim(q, (1, 0, 0, 1, 0))   # P(0, a3): preprojective
    assert x.kind == REGULAR and y.kind == PREPROJECTIVE
    assert ext1_dim_via_euler(q, x, y) == -euler_form(q, x.dim, y.dim)


def test_schofield_pair_check_examples():
    q2 = a2()
    assert schofield_pair_check(q2, (1, 0), (0, 1), (1, 1)).ok
    rev = schofield_pair_check(q2, (0, 1), (1, 0), (1, 1))
    assert not rev.ok and rev.failures
    k = kronecker()
    bad = schofield_pair_check(k, (1, 0), (0, 1), (1, 1))
    assert not bad.ok
    assert any("z" in f for f in bad.failures)


def test_schofield_pair_check_literal_order():
    q2 = a2()
    # with the literal reading the opposite order passes
    assert schofield_pair_check(q2, (0, 1), (1, 0), (1, 1), order="literal").ok
    assert not schofield_pair_check(q2, (1, 0), (0, 1), (1, 1),
                                    order="literal").ok


def test_symbolic_euler_and_classification():
    q = d4_subspace()
    n = DimExpr(1, 0)
    f_dims = [DimExpr(2, 1), DimExpr(1, 1), n, n, n]
    reg = [DimExpr(0, 1), DimExpr(0, 1), DimExpr(0, 1), DimExpr(0, 0),
           DimExpr(0, 0)]
    val = euler_form_poly(q, reg, f_dims)
    assert val.is_const() and val.c0 == 0
    c = classify_dim_sym(q, f_dims, 0)
    assert c.kind == PREPROJECTIVE
    r = classify_dim_sym(q, reg, 0)
    assert r.kind == REGULAR
    pair = schofield_pair_check(q, reg,
                                [DimExpr(2, 0), n, DimExpr(1, -1), n, n],
                                f_dims, n0=1)
    assert pair.ok, pair.failures
