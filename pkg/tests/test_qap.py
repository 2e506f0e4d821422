import random

from helpers import random_instance
from oracles import pointwise_oracle

from zkai.circuit import R1CSSystem, check_r1cs
from zkai.field import P
from zkai.poly import poly_divmod
from zkai.snark import divides, p_poly, quotient, r1cs_to_qap
from zkai.snark.qap import witness_polys

# x * y = z with wires [1, x, y, z]
MUL = R1CSSystem(1, 3, (({1: 1}, {2: 1}, {3: 1}),))


def test_single_mul_divisible():
    qap = r1cs_to_qap(MUL)
    assert qap.m == 1
    assert poly_divmod(p_poly(qap, (1, 3, 4, 12)), qap.t)[1].is_zero()


def test_single_mul_corrupted():
    qap = r1cs_to_qap(MUL)
    assert not poly_divmod(p_poly(qap, (1, 3, 4, 13)), qap.t)[1].is_zero()


def test_degrees_and_target_roots():
    r = random.Random(0)
    sys, qap, _ = random_instance(r, 5)
    assert qap.m == sys.num_constraints == 6
    assert all(p.degree < qap.m for p in qap.v + qap.w + qap.y)
    assert all(qap.t(j) == 0 for j in qap.domain)


def test_columns_interpolate_constraint_rows():
    r = random.Random(1)
    sys, qap, _ = random_instance(r, 3)
    for j, (a, b, c) in enumerate(sys.constraints, start=1):
        for i in range(sys.num_wires):
            assert qap.v[i](j) == a.get(i, 0) % P
            assert qap.w[i](j) == b.get(i, 0) % P
            assert qap.y[i](j) == c.get(i, 0) % P


def test_n3_honest_witnesses_always_divide():
    r = random.Random(2)
    for _ in range(100):
        sys, qap, z = random_instance(r, 3)
        h, rem = quotient(qap, z)
        assert rem.is_zero()
        assert pointwise_oracle(sys, z.assignment)
        V, W, Y = witness_polys(qap, z)
        assert all((V(j) * W(j) - Y(j)) % P == 0 for j in qap.domain)
        assert h * qap.t == p_poly(qap, z)


def test_divisibility_iff_r1cs_both_directions():
    r = random.Random(3)
    for _ in range(200):
        n = r.randint(1, 8)
        sys, qap, z = random_instance(r, n)
        if r.random() < 0.5:
            wire = r.randrange(sys.num_wires)
            z = z.perturbed(wire, r.randrange(1, P))
        assert divides(qap, z) == check_r1cs(sys, z) == pointwise_oracle(sys, z.assignment)


def test_small_field_exhaustive_agreement():
    # every assignment of a 2-constraint system over values 0..4
    sys = R1CSSystem(2, 3, (({1: 1}, {2: 1}, {3: 1}), ({3: 1, 4: 1}, {0: 1}, {1: 1})))
    qap = r1cs_to_qap(sys)
    hits = 0
    for x in range(5):
        for a in range(5):
            for b in range(5):
                for c in range(5):
                    z = (1, x, a, b, c)
                    ok = divides(qap, z)
                    assert ok == check_r1cs(sys, z) == pointwise_oracle(sys, z)
                    hits += ok
    assert hits > 0
