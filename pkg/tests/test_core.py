from fractions import Fraction

import numpy as np
import pytest

from decomp import formats
from decomp.core import (DecompositionCertificate, FamilySpec, ShapeError, TernaryFunction, agreement,
                         certificate_from_lists, evaluate, first_counterexample, from_callable,
                         make_family, random_predicate, trivial_certificate, verify_certificate)


def xor111():
    return make_family(FamilySpec("xor", p=1, q=1, r=1))


def test_xor_table_is_parity():
    assert xor111().bitstring() == "01101001"
    assert evaluate(xor111(), 1, 1, 0) == 0


def test_equality_table():
    T = make_family(FamilySpec("equality", p=1, q=0, r=1))
    assert T.bitstring() == "1001"


def test_constant_zero():
    T = make_family(FamilySpec("constant", p=2, q=1, r=2, value=0))
    assert not T.values.any()
    with pytest.raises(ShapeError):
        make_family(FamilySpec("constant", p=1, q=1, r=1, value=2))


def test_indexing_with_and_table():
    T = make_family(FamilySpec("indexing", k=1))
    assert T.shape == (1, 4, 1)
    # y(x, z) = x AND z, y stored row-major as the string y00 y01 y10 y11
    assert T(1, "0001", 1) == 1
    assert T(1, "0001", 0) == 0
    assert T(0, "1000", 0) == 1


def test_xor_and_add_indexing():
    Tx = make_family(FamilySpec("xor-indexing", k=2))
    Ta = make_family(FamilySpec("add-indexing", k=2))
    assert Tx.shape == Ta.shape == (2, 4, 2)
    assert Tx(0b01, "0010", 0b11) == 1  # 01 xor 11 = 10
    assert Ta(0b11, "0100", 0b10) == 1  # 3 + 2 = 1 mod 4


def test_argument_forms_agree():
    T = random_predicate(2, 3, 2, seed=4)
    assert T(2, 5, 1) == T("10", "101", "01") == T((1, 0), (1, 0, 1), (0, 1))


@pytest.mark.parametrize("args", [(4, 0, 0), ("1", "00", "0"), ("10", "0", "2"), ((1, 1), (0,), (0,))])
def test_bad_arguments(args):
    with pytest.raises(ShapeError):
        evaluate(xor111(), *args)


def test_size_ceiling():
    with pytest.raises(ShapeError):
        make_family(FamilySpec("xor", p=10, q=11, r=10))
    with pytest.raises(ShapeError):
        TernaryFunction(1, 1, 1, 1, np.zeros(7))


def test_random_is_deterministic():
    a = random_predicate(1, 1, 1, seed=0)
    assert a == random_predicate(1, 1, 1, seed=0)
    assert a.values.flags.writeable is False


def test_parity_certificate():
    T = xor111()
    a = [(x ^ y) for x in (0, 1) for y in (0, 1)]
    b = [z for y in (0, 1) for z in (0, 1)]
    D = certificate_from_lists(1, 1, a, b, [0, 1, 1, 0])
    assert verify_certificate(T, D)
    assert agreement(T, D) == 1


def test_constant_messages_fail_on_xor():
    T = xor111()
    for t in (0, 1):
        D = certificate_from_lists(0, 0, [0] * 4, [0] * 4, [t])
        assert not verify_certificate(T, D)
        assert agreement(T, D) == Fraction(1, 2)
    assert first_counterexample(T, certificate_from_lists(0, 0, [0] * 4, [0] * 4, [0])) == (0, 0, 1)


def test_equality_agreement_with_constant():
    T = make_family(FamilySpec("equality", p=1, q=0, r=1))
    D = certificate_from_lists(0, 0, [0, 0], [0, 0], [0])
    assert agreement(T, D) == Fraction(1, 2)


def test_trivial_certificate_on_random_predicates():
    for seed in range(100):
        T = random_predicate(2, 3, 2, seed)
        D = trivial_certificate(T)
        assert (D.u, D.v) == (5, 2) and verify_certificate(T, D)


def test_agreement_one_iff_verified_exhaustive():
    # every predicate at (1,1,1) against every (u,v)=(1,1) certificate with a = x, b = z
    a = [x for x in (0, 1) for _ in (0, 1)]
    b = [z for _ in (0, 1) for z in (0, 1)]
    for index in range(256):
        T = from_callable(1, 1, 1, 1, lambda x, y, z: (index >> ((x * 2 + y) * 2 + z)) & 1)
        for tcode in range(16):
            D = certificate_from_lists(1, 1, a, b, [(tcode >> i) & 1 for i in range(4)])
            assert (agreement(T, D) == 1) == verify_certificate(T, D)


def test_certificate_shape_errors():
    with pytest.raises(ShapeError):
        certificate_from_lists(1, 0, [0, 2], [0], [0, 0])
    with pytest.raises(ShapeError):
        certificate_from_lists(1, 1, [0], [0], [0, 0])
    D = certificate_from_lists(0, 0, [0] * 2, [0] * 2, [0])
    with pytest.raises(ShapeError):
        verify_certificate(xor111(), D)


def test_mirror_swaps_x_and_z():
    T = random_predicate(1, 2, 3, seed=9)
    M = T.mirror()
    assert M.shape == (3, 2, 1)
    for x in range(2):
        for y in range(4):
            for z in range(8):
                assert T(x, y, z) == M(z, y, x)


def test_json_round_trip(tmp_path):
    T = random_predicate(2, 1, 2, seed=3)
    path = tmp_path / "f.json"
    formats.save(path, formats.function_to_json(T))
    assert formats.load_function(path) == T
    D = trivial_certificate(T)
    formats.save(tmp_path / "c.json", formats.certificate_to_json(D))
    assert formats.load_certificate(tmp_path / "c.json") == D


def test_malformed_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": 1, "q": 1, "r": 1, "table": "0101"}')
    with pytest.raises(formats.FormatError):
        formats.load_function(bad)
    bad.write_text("[1, 2]")
    with pytest.raises(formats.FormatError):
        formats.load_function(bad)


def test_multi_bit_outputs():
    T = from_callable(1, 0, 1, 3, lambda x, y, z: 4 * x + z)
    assert T.bitstring() == "000001100101"
    assert T.values.dtype == np.uint8
    assert verify_certificate(T, trivial_certificate(T))
