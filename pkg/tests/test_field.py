import random

import pytest
from hypothesis import given, strategies as st

from zkai.errors import DivisionByZero, MalformedEncoding
from zkai.field import P, FieldElement, fp_ops, from_hex, to_hex


def egcd_inverse(a, p):
    # independent extended-Euclid oracle
    old_r, r = a, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    assert old_r == 1
    return old_s % p


elements = st.integers(min_value=0, max_value=P - 1).map(FieldElement)


def test_wraparound():
    assert fp_ops(FieldElement(P - 1), FieldElement(1), "add") == FieldElement(0)


def test_inverse_of_one():
    assert fp_ops(FieldElement(1), None, "inv") == FieldElement(1)


def test_inverse_matches_extended_euclid(rng):
    for _ in range(100):
        a = rng.randrange(1, P)
        got = fp_ops(FieldElement(a), None, "inv")
        assert got.value == egcd_inverse(a, P)
        assert (FieldElement(a) * got).value == 1


def test_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        FieldElement(0).inverse()
    with pytest.raises(ZeroDivisionError):
        fp_ops(FieldElement(0), None, "inv")


def test_sub_neg():
    assert fp_ops(FieldElement(3), FieldElement(5), "sub") == FieldElement(P - 2)
    assert fp_ops(FieldElement(3), None, "neg") == FieldElement(P - 3)
    assert FieldElement(P - 3).signed() == -3


def test_unknown_op():
    with pytest.raises(ValueError):
        fp_ops(FieldElement(1), FieldElement(1), "pow")


def test_field_axioms_randomized():
    r = random.Random(7)
    for _ in range(1000):
        a, b, c = (FieldElement(r.randrange(P)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + (-a) == FieldElement(0)
        if a.value:
            assert a * a.inverse() == FieldElement(1)


@given(elements, elements)
def test_commutativity(a, b):
    assert a + b == b + a
    assert a * b == b * a


@given(elements)
def test_hex_roundtrip(a):
    h = a.to_hex()
    assert len(h) == 64
    assert FieldElement.from_hex(h) == a


def test_hex_is_big_endian_fixed_width():
    assert to_hex(1) == "0" * 63 + "1"
    assert to_hex(P - 1).startswith("30644e72")


@pytest.mark.parametrize("bad", ["0" * 63, "0" * 65, "A" + "0" * 63, "g" * 64, to_hex(P)])
def test_hex_rejects(bad):
    with pytest.raises(MalformedEncoding):
        from_hex(bad)


def test_small_modulus():
    a = FieldElement(5, 7)
    assert (a * a).value == 4
    assert a.inverse().value == 3
    with pytest.raises(ValueError):
        a + FieldElement(1)
