import pytest
import sympy

from csaforge.brauercalc import (BrauerWord, RewriteStep, StepError, apply_step, comeeed_witness,
                                 kill_split_terms, normalize_word, rowen_replay,
                                 verify_transcript, witness_inv, witness_mul, witness_shift,
                                 RowenChainData)
from csaforge.exactfield import GF, as_adjoin, field_from_descriptor
from csaforge.symbols import NormWitness, norm_witness_search

from corruption import check_corruptions


def test_normalize_word():
    F = GF(2, 2)
    a, b, c, d = F.gen, F.one, F.gen + F.one, F.gen
    assert len(normalize_word(BrauerWord(F, [(a, b), (a, b)]))) == 0
    assert len(normalize_word(BrauerWord(F, []))) == 0
    w = normalize_word(BrauerWord(F, [(a, b), (c, d), (a, b)]))
    assert w.same_as(BrauerWord(F, [(c, d)]))


def test_norm_kill_square():
    F = GF(2, 3)
    for a in F.elements():
        for b in F.nonzero_elements():
            W = BrauerWord(F, [(a, b * b)])
            out = apply_step(W, RewriteStep("NormKill", [a, b * b, b, F.zero]))
            assert len(out) == 0


def test_bilinear_split_and_merge_are_inverse():
    F = GF(2, 3)
    a, b, c = F.gen, F.gen ** 2, F.gen ** 5
    W = BrauerWord(F, [(a, b * c)])
    split = apply_step(W, RewriteStep("BilinearSplit", [a, b, c, b * c], "split"))
    assert split.same_as(BrauerWord(F, [(a, b), (a, c)]))
    back = apply_step(split, RewriteStep("BilinearSplit", [a, b, c, b * c], "merge"))
    assert back.same_as(W)


def test_step_witness_failures():
    F = GF(2, 2)
    a, b = F.gen, F.one
    W = BrauerWord(F, [(a, b)])
    with pytest.raises(StepError):
        apply_step(W, RewriteStep("NormKill", [a, b, F.gen, F.zero]))
    with pytest.raises(StepError):
        apply_step(W, RewriteStep("BilinearSplit", [a, b, b, F.gen], "split"))
    with pytest.raises(StepError):
        apply_step(W, RewriteStep("NormKill", [F.one, b, F.one, F.zero]))  # term not present


def test_chain_swap_over_f4():
    F = GF(2, 2)
    for b in F.elements():
        for d in F.elements():
            for n in F.nonzero_elements():
                w = norm_witness_search(b + d, n, F)
                W = BrauerWord(F, [(b, n)])
                out = apply_step(W, RewriteStep("ChainSwap", [b, d, n, w.x, w.y]))
                assert out.same_as(BrauerWord(F, [(d, n)]))


def test_as_shift_step():
    F = GF(2, 2)
    a, s = F.gen, F.gen
    W = BrauerWord(F, [(a, F.one)])
    out = apply_step(W, RewriteStep("ASShift", [a, F.one, s, a + s * s + s]))
    assert out.same_as(BrauerWord(F, [(a + s * s + s, F.one)]))
    with pytest.raises(StepError):
        apply_step(W, RewriteStep("ASShift", [a, F.one, s, a]))


def test_comeeed_f4_example():
    F2 = GF(2)
    T = as_adjoin(F2, F2.one)
    alpha = T.gen
    w = comeeed_witness(F2, 1, 0, 1, 1, 0, 1, T=T)
    assert w.x == alpha + 1 and not w.y
    assert w.b == alpha
    assert (alpha + 1) * (alpha + 1) == alpha


def test_comeeed_rejects_v_plus_y_zero():
    F = GF(2, 2)
    # x = y = 1, v = 1: hypothesis with u solving u^2 + u + b = 1 + 1 + a
    a = F.gen
    for b in F.elements():
        for u in F.elements():
            if u * u + u + b == a:
                with pytest.raises(ValueError):
                    comeeed_witness(F, a, F.one, F.one, u, F.one, b)
                return
    pytest.fail("no test data found")


def test_comeeed_identity_sympy_oracle():
    """(x+ya+u)^2 + (x+ya+u)v + bv^2 - (x+ya)(v+y) reduces to the hypothesis difference."""
    a, b, x, y, u, v, al = sympy.symbols("a b x y u v alpha")
    lhs = (x + y * al + u) ** 2 + (x + y * al + u) * v + b * v ** 2
    rhs = (x + y * al) * (v + y)
    gens = (a, b, x, y, u, v, al)
    # reduce modulo alpha^2 + alpha + a (alpha^2 -> alpha + a in characteristic 2)
    red = sympy.rem(sympy.expand(lhs - rhs), al ** 2 + al + a, al)
    hyp = (x ** 2 + x * y + a * y ** 2) - (u ** 2 + u * v + b * v ** 2)
    assert sympy.Poly(sympy.expand(red - hyp), *gens, modulus=2).is_zero
    # so the identity is not unconditional: the residual is nonzero
    assert not sympy.Poly(red, *gens, modulus=2).is_zero


def test_comeeed_identity_under_hypothesis():
    K = field_from_descriptor("F2(a,x,y,u,v)")
    a, x, y, u, v = (K.var(i) for i in range(5))
    b = (x * x + x * y + a * y * y + u * u + u * v) / (v * v)
    T = as_adjoin(K, a)
    w = comeeed_witness(K, a, x, y, u, v, b, T=T)
    X = T.lift(x) + T.gen * y + u
    assert X * X + X * v + T.lift(b) * v * v == (T.lift(x) + T.gen * y) * (v + y)
    assert w.verify()


def test_witness_mul_of_squares():
    F = GF(2, 3)
    for x1 in F.nonzero_elements():
        x2 = F.gen
        w = witness_mul(NormWitness(F.gen, x1 * x1, x1, F.zero),
                        NormWitness(F.gen, x2 * x2, x2, F.zero))
        assert (w.x, w.y) == (x1 * x2, F.zero)


def test_witness_shift_symbolic():
    K = field_from_descriptor("F2(X,Y,b,d)")
    X, Y, b, d = (K.var(i) for i in range(4))
    S = as_adjoin(K, b, name="beta")
    w = NormWitness(b + d, X * X + X * Y + (b + d) * Y * Y, X, Y)
    s = witness_shift(w, S.gen, d)
    assert s.verify()
    assert s.x == S.lift(X) + S.gen * Y


def test_witness_inv():
    F2 = GF(2)
    T = as_adjoin(F2, F2.one)
    a = T.gen  # a in the tower F_4
    w = NormWitness(a, a, T.one, T.one)
    inv = witness_inv(w)
    assert inv.b == a.inverse() and inv.verify()


def test_two_torsion_f4():
    F = GF(2, 2)
    for a in F.elements():
        for b in F.nonzero_elements():
            W = BrauerWord(F, [(a, b), (a, b)])
            W = apply_step(W, RewriteStep("BilinearSplit", [a, b, b, b * b], "merge"))
            W = apply_step(W, RewriteStep("NormKill", [a, b * b, b, F.zero]))
            assert len(W) == 0


def _f8_chain_data():
    """Chain data with all witnesses found by exhaustive search over F_8."""
    F = GF(2, 3)
    g = F.gen
    vals = dict(a=g, b=g ** 3, c=g ** 5, d=g ** 6, e=g ** 2, w=g, x=g ** 4, y=g + 1, z=g ** 2)
    data = RowenChainData(F, *(vals[k] for k in "abcde"), vals["w"], vals["x"], vals["y"],
                          vals["z"], F.zero, F.zero, F.zero, F.zero)
    w1 = norm_witness_search(data.b + data.d, data.norm_s(), F)
    w2 = norm_witness_search(data.c + data.d, data.norm_t(), F)
    w3 = norm_witness_search(data.d, data.norm_s() * data.norm_t(), F)
    return RowenChainData(F, *(vals[k] for k in "abcde"), vals["w"], vals["x"], vals["y"],
                          vals["z"], w1.y, w2.y, w3.x, w3.y, uprime=w1.x, vprime=w2.x)


def test_rowen_replay_split_case():
    data = _f8_chain_data()
    assert data.uprime and data.vprime and data.m_out and data.k and data.l
    word, tr = rowen_replay(data)
    assert word.same_as(data.final_word())
    assert verify_transcript(tr.to_text()).ok
    # everything splits over a finite field
    assert len(kill_split_terms(word)) == 0


def test_transcript_rejects_every_corrupted_step():
    data = _f8_chain_data()
    word, tr = rowen_replay(data)
    assert "STEP" in tr.to_text()
    rejected, still_valid = check_corruptions(tr.to_text(), data.K, verify_transcript)
    assert rejected >= still_valid


def test_replay_aborts_on_bad_witness():
    data = _f8_chain_data()
    data.m = data.m + data.K.one
    with pytest.raises(StepError) as info:
        rowen_replay(data)
    assert info.value.index is not None


def test_empty_transcript_verifies():
    assert verify_transcript("csa-forge/1\n").ok
    assert not verify_transcript("nonsense\n").ok
