import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csaforge.algcore import (AlgebraError, AlgebraHom, MatrixUnits, build_sc_algebra, center,
                              centralizer, csa_test, field_as_algebra, hom_from_generators,
                              matrix_algebra, split_off_matrix_factor, subalgebra, tensor,
                              algebra_from_lines)
from csaforge.exactfield import GF, field_from_descriptor
from csaforge.symbols import quaternion, symbol_algebra

from oracle import RefField, ref_csa_rank

# quaternion [1,1)_2 over F_2 on 1, u, v, w = uv, worked out by hand
Q11 = {
    (0, 0): [(0, 1)], (0, 1): [(1, 1)], (0, 2): [(2, 1)], (0, 3): [(3, 1)],
    (1, 0): [(1, 1)], (1, 1): [(0, 1), (1, 1)], (1, 2): [(3, 1)], (1, 3): [(2, 1), (3, 1)],
    (2, 0): [(2, 1)], (2, 1): [(2, 1), (3, 1)], (2, 2): [(0, 1)], (2, 3): [(0, 1), (1, 1)],
    (3, 0): [(3, 1)], (3, 1): [(2, 1)], (3, 2): [(1, 1)], (3, 3): [(0, 1)],
}


def table_of(A):
    return [[{k: (1 if c is None else c.code) for k, c in A.basis_product(i, j)}
             for j in range(A.dim)] for i in range(A.dim)]


def test_matrix_unit_table_accepted():
    F = GF(2)
    M = matrix_algebra(F, 2)
    dense = [[[M.structure_constant(i, j, k) for k in range(4)] for j in range(4)]
             for i in range(4)]
    A = build_sc_algebra(F, 4, dense, [1, 0, 0, 1])
    assert A.dim == 4 and csa_test(A).passed


def test_quaternion_table_by_hand():
    F = GF(2)
    A = build_sc_algebra(F, 4, Q11, [1, 0, 0, 0], labels=["1", "u", "v", "w"])
    S = symbol_algebra(2, F.one, F.one)
    assert table_of(A) == table_of(S)
    w = A.basis(3)
    assert w * w == A.one()  # w^2 = ab


def test_corrupted_table_rejected():
    F = GF(2)
    bad = dict(Q11)
    bad[(3, 3)] = []  # w^2 = a + b = 0 instead of ab
    with pytest.raises(AlgebraError):
        build_sc_algebra(F, 4, bad, [1, 0, 0, 0], labels=["1", "u", "v", "w"])


def test_wrong_unit_rejected():
    with pytest.raises(AlgebraError):
        build_sc_algebra(GF(2), 4, Q11, [0, 1, 0, 0])


def test_tensor_products():
    F = GF(2, 2)
    M = matrix_algebra(F, 2)
    MM = tensor(M, M)
    assert MM.dim == 16
    assert csa_test(MM).passed
    A = quaternion(F.gen, F.one, F)
    AK = tensor(A, field_as_algebra(F))
    assert AK.dim == 4
    assert table_of(AK) == table_of(A)
    QQ = tensor(quaternion(F.gen, F.gen, F), quaternion(F.one, F.gen, F))
    assert QQ.dim == 16 and csa_test(QQ).passed


def test_csa_test_agrees_with_reference_rank():
    F = GF(2, 2)
    ref = RefField(2, F.modulus)
    for a in F.elements():
        for b in F.nonzero_elements():
            A = quaternion(a, b, F)
            assert csa_test(A).passed
            assert ref_csa_rank(table_of(A), 4, ref) == 16


def test_field_extension_is_not_central():
    F2 = GF(2)
    # F_4 = F_2[w] with w^2 = w + 1, as a 2-dimensional F_2-algebra
    table = {(0, 0): [(0, 1)], (0, 1): [(1, 1)], (1, 0): [(1, 1)], (1, 1): [(0, 1), (1, 1)]}
    A = build_sc_algebra(F2, 2, table, [1, 0])
    rep = csa_test(A)
    assert not rep.passed and rep.kernel is not None
    assert ref_csa_rank(table_of(A), 2, RefField(2, (0, 1))) < 4
    assert center(A)[0].dim == 2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_matrix_algebras_are_csa(n):
    assert csa_test(matrix_algebra(GF(3), n)).passed


def test_function_field_symbol_is_csa():
    K = field_from_descriptor("F4(t)")
    w = K.lift(GF(2, 2).gen)
    A = quaternion(w, K.var(0), K)
    rep = csa_test(A)
    assert rep.passed


def test_centers():
    F = GF(2, 3)
    assert center(matrix_algebra(F, 2))[0].dim == 1
    for p, q in [(2, 3), (3, 1)]:
        G = GF(p, q)
        A = symbol_algebra(p, G.gen, G.one)
        C, inc = center(A)
        assert C.dim == 1
        assert inc(C.one()) == A.one()


def test_centralizer_of_matrix_factor():
    F = GF(2, 2)
    Cq = quaternion(F.gen, F.one, F)
    M = matrix_algebra(F, 2)
    A = tensor(M, Cq)
    gens = [A.embed_factor(0, M.basis(i)) for i in range(4)]
    C, inc = centralizer(A, gens)
    assert C.dim == 4
    images = [A.embed_factor(1, Cq.basis(i)) for i in range(4)]
    S, _ = subalgebra(A, images)
    for x in images:
        assert all(x * g == g * x for g in gens)
    assert S.dim == C.dim


def test_homomorphisms():
    F = GF(2, 2)
    A = quaternion(F.gen, F.one, F)
    ident = hom_from_generators(A, A, {"u": A.basis(1), "v": A.basis(2)})
    assert ident.is_identity() and ident.is_bijective()
    with pytest.raises(AlgebraError):
        hom_from_generators(A, A, {"u": A.basis(2), "v": A.basis(2)})
    inv = ident.inverse()
    assert inv.compose(ident).is_identity()


def test_split_off_matrix_factor_m2():
    F = GF(3)
    M = matrix_algebra(F, 2)
    units, C, iso = split_off_matrix_factor(M, M.basis(0))
    assert C.dim == 1
    assert units.verify()
    assert iso.is_bijective()
    for i in range(4):
        # E_ij (x) 1 goes to the basis element E_ij
        assert iso(iso.source.basis(i)) == M.basis(i)


def test_split_off_matrix_factor_m4():
    F = GF(2, 2)
    M2 = matrix_algebra(F, 2)
    A = tensor(M2, M2)
    e = A.embed_factor(0, M2.basis(0))  # diag(1, 1, 0, 0) in block form
    units, C, iso = split_off_matrix_factor(A, e)
    assert C.dim == 4 and csa_test(C).passed
    iso.verify()
    assert iso.is_bijective()
    with pytest.raises(AlgebraError):
        split_off_matrix_factor(A, A.one())


def test_matrix_units_detect_bad_units():
    M = matrix_algebra(GF(2), 2)
    E = [M.basis(i) for i in range(4)]
    assert MatrixUnits(*E).verify()
    assert not MatrixUnits(E[0], E[2], E[1], E[3]).verify()


def test_algebra_text_round_trip():
    F = GF(2, 4)
    A = quaternion(F.gen, F.gen ** 3, F)
    B = algebra_from_lines(A.to_lines(), F)
    assert table_of(A) == table_of(B)


def test_bad_hom_detected():
    F = GF(2)
    M = matrix_algebra(F, 2)
    cols = [M.basis(i).coords for i in (0, 2, 1, 3)]  # transpose is an anti-homomorphism
    h = AlgebraHom(M, M, cols)
    with pytest.raises(AlgebraError):
        h.verify()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 15), min_size=12, max_size=12))
def test_quaternion_ring_laws(codes):
    F = GF(2, 4)
    A = quaternion(F.element(3), F.element(7), F)
    x, y, z = (A.element([F.element(c) for c in codes[i:i + 4]]) for i in (0, 4, 8))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert A.one() * x == x == x * A.one()
    L = np.array(A.left_matrix(x), dtype=object)
    assert [sum((L[r][c] * y.coords[c] for c in range(4)), F.zero) for r in range(4)] \
        == (x * y).coords
