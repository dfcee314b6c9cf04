import numpy as np
import pytest

from decomp import f2poly
from decomp.core import FamilySpec, make_family
from decomp.f2poly import AnfPolynomial, Anf2kPolynomial, PolyError


def test_anf_examples():
    assert f2poly.anf_from_tt([1, 1]).monomials == {0}
    assert f2poly.anf_from_tt([0, 0, 0, 1]).monomials == {0b11}
    assert f2poly.anf_from_tt([0, 1, 1, 1]).monomials == {0b01, 0b10, 0b11}
    with pytest.raises(PolyError):
        f2poly.anf_from_tt([0, 1, 1])


def test_eval_examples():
    one = AnfPolynomial(2, {0})
    assert all(one(w) == 1 for w in range(4))
    assert AnfPolynomial(2, {3})(3) == 1
    orp = f2poly.anf_from_tt([0, 1, 1, 1])
    assert orp(0b10) == 1 and orp(0) == 0


def test_degree_split_examples():
    P = AnfPolynomial(3, {0, 7})
    low, high = f2poly.degree_split(P, 2)
    assert low.monomials == {0} and high.monomials == {7}
    assert f2poly.degree_split(P, 3) == (P, AnfPolynomial(3, frozenset()))
    low, high = f2poly.degree_split(f2poly.anf_from_tt([0, 1, 1, 1]), 1)
    assert low.monomials == {1, 2} and high.monomials == {3}


def test_xor_substitute_examples():
    assert f2poly.xor_substitute(AnfPolynomial(1, {1})).monomials == {(1, 0), (0, 1)}
    assert f2poly.xor_substitute(AnfPolynomial(2, {3})).monomials == {(3, 0), (2, 1), (1, 2), (0, 3)}


def test_xor_substitute_evaluates_at_xor():
    rng = np.random.default_rng(1)
    for k in range(1, 6):
        P = f2poly.anf_from_tt(rng.integers(0, 2, 1 << k))
        Q = f2poly.xor_substitute(P)
        for x in range(1 << k):
            for z in range(1 << k):
                assert Q(x, z) == P(x ^ z)


def test_xz_split_examples():
    xlow, zlow = f2poly.xz_degree_split(Anf2kPolynomial(1, {(1, 0)}), 1)
    assert xlow.monomials == {(1, 0)} and not zlow.monomials
    xlow, zlow = f2poly.xz_degree_split(Anf2kPolynomial(3, {(0b110, 0)}), 1)
    assert zlow.monomials == {(0b110, 0)}
    with pytest.raises(PolyError):
        f2poly.xz_degree_split(Anf2kPolynomial(4, {(0b0011, 0b1100)}), 1)


def test_xz_split_never_fires_k6():
    rng = np.random.default_rng(6)
    d, f = f2poly.thresholds(6)
    for _ in range(100):
        low, _ = f2poly.degree_split(f2poly.anf_from_tt(rng.integers(0, 2, 64)), d)
        f2poly.xz_degree_split(f2poly.xor_substitute(low), f)


def test_protocol_and_example():
    out = f2poly.run_protocol(2, [0, 0, 0, 1], 0b01, 0b11)
    assert out["output"] == out["expected"] == 0


def test_protocol_k4_exhaustive():
    rng = np.random.default_rng(4)
    for _ in range(50):
        y = tuple(rng.integers(0, 2, 16).tolist())
        for x in range(16):
            A = f2poly.protocol_alice(x, y, 4)
            for z in range(16):
                assert f2poly.protocol_referee(A, f2poly.protocol_bob(z, y, 4), 4) == y[x ^ z]


def test_message_sizes():
    assert f2poly.message_size(3) == (8, 7)
    assert f2poly.message_size(6) == (35, 28)


def test_referee_accepts_bit_strings():
    y = "0110100110010110"
    A, B = f2poly.protocol_alice(5, y, 4), f2poly.protocol_bob(9, y, 4)
    assert f2poly.protocol_referee(A.bits, B.bits, 4) == int(y[5 ^ 9])
    with pytest.raises(PolyError):
        f2poly.protocol_referee(A.bits[:-1], B.bits, 4)


def test_embedding_zero_matrix():
    T = make_family(FamilySpec("indexing", k=1))
    T2 = make_family(FamilySpec("xor-indexing", k=2))
    for x in range(2):
        for z in range(2):
            x2, y2, z2 = f2poly.embed_indexing(1, x, [0, 0, 0, 0], z)
            assert not any(y2)
            assert T(x, 0, z) == T2(x2, 0, z2) == 0


def test_polynomial_json():
    P = AnfPolynomial(3, {0, 5, 6})
    assert AnfPolynomial.from_json(P.to_json()) == P
    with pytest.raises(PolyError):
        AnfPolynomial.from_json({"k": 3, "monomials": [1, 1]})
    with pytest.raises(PolyError):
        AnfPolynomial(2, {4})


def test_message_ratio_at_30_below_linear():
    a, b = f2poly.message_size(30)
    assert np.log2(a + b) / 30 < 0.95
