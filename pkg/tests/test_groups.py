import pytest

from zkai.errors import EngineMismatch
from zkai.field import P, FieldElement
from zkai.groups import (G1, G2, GroupElement, generator, group_exp, identity,
                         multi_exp, pairing, target_identity)

g1 = generator(G1)
g2 = generator(G2)


def test_exp_by_zero_is_identity():
    assert group_exp(g1, FieldElement(0)) == identity(G1)


def test_exponent_law():
    assert group_exp(group_exp(g1, 2), 3) == group_exp(g1, 6)


def test_nested_exp_matches_field_product(rng):
    for _ in range(50):
        k1, k2 = rng.randrange(P), rng.randrange(P)
        assert group_exp(group_exp(g1, k1), k2) == group_exp(g1, (FieldElement(k1) * k2).value)


def test_pairing_identity():
    assert pairing(identity(G1), group_exp(g2, 12345)) == target_identity()


def test_pairing_bilinear_small():
    assert pairing(2 * g1, 3 * g2).exponent == 6


def test_pairing_randomized_field_oracle(rng):
    for _ in range(50):
        a, b, c = (rng.randrange(P) for _ in range(3))
        e = pairing(a * g1, b * g2) * pairing(c * g1, 1 * g2)
        assert e.exponent == (a * b + c) % P


def test_pairing_rejects_wrong_groups():
    with pytest.raises(EngineMismatch):
        pairing(g2, g1)
    with pytest.raises(EngineMismatch):
        pairing(g1, GroupElement("other", G2, 1))


def test_cross_group_add_rejected():
    with pytest.raises(EngineMismatch):
        g1 + g2


def test_multi_exp():
    assert multi_exp([g1, 5 * g1], [3, 2]) == 13 * g1
    with pytest.raises(EngineMismatch):
        multi_exp([g1, g2], [1, 1])
