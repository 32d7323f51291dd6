import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadprime import ideal_arith
from quadprime.errors import CapacityError, RejectedInput
from quadprime.field_core import AlgebraicInt, FieldElement, make_field
from quadprime.ideal_arith import (
    FracIdeal,
    IdealHNF,
    class_group,
    decompose_in_class_group,
    divides,
    divisors,
    euler_phi,
    factor_ideal,
    ideal_conj,
    ideal_from_gens,
    ideal_gcd,
    ideal_mul,
    ideal_pow,
    ideals_of_norm_upto,
    is_principal,
    is_principal_with_generator,
    moebius,
    primes_above,
    primes_in_norm_range,
    principal,
    unit_ideal,
)

FIELDS = [-1, -2, -3, -5, -6, -23, 2, 3, 5, 10, 13]


def brute_ideals(F, X):
    """All HNF triples (a, b, c) with c | a, c | b, 0 <= b < a closed under eta."""
    out = []
    for c in range(1, X + 1):
        for a in range(c, X // c + 1, c):
            for b in range(0, a, c):
                # eta*a and eta*(b + c eta) = c n + (b + c t) eta must lie in the module
                I = IdealHNF(a, b, c, F)
                if I.contains(AlgebraicInt(0, a, F)) and I.contains(AlgebraicInt(c * F.n, b + c * F.t, F)):
                    out.append(I)
    return sorted(out, key=lambda I: I.key)


def _contained(small, big):
    return all(big.contains(z) for z in small.basis())


def brute_primes(F, X):
    ideals = brute_ideals(F, X)
    return [P for P in ideals if P.norm > 1 and not any(
        1 < J.norm < P.norm and _contained(P, J) for J in ideals)]


@pytest.mark.parametrize("d", [-1, 2, -5, -3, 5, -23, 10])
def test_ideals_of_norm_upto_matches_brute_force(d):
    F = make_field(d)
    assert ideals_of_norm_upto(F, 300) == brute_ideals(F, 300)


@pytest.mark.parametrize("d", [-1, 2, -5, 3, -7])
def test_prime_stream_matches_brute_force(d):
    F = make_field(d)
    got = [P.ideal for P in primes_in_norm_range(F, 1, 400)]
    assert got == brute_primes(F, 400)


def test_prime_stream_examples(Qi):
    got = list(primes_in_norm_range(Qi, 9, 26))
    assert [P.norm for P in got] == [13, 13, 17, 17]
    assert len(list(primes_in_norm_range(Qi, 1, 25))) == 8
    assert list(primes_in_norm_range(Qi, 10, 10)) == []


def test_prime_stream_capacity(Qi):
    with pytest.raises(CapacityError):
        list(primes_in_norm_range(Qi, 2, ideal_arith.SIEVE_CAPACITY * 10))


def test_ideal_from_gens_examples(Qi, Q2):
    assert ideal_from_gens([AlgebraicInt(2, 1, Qi)]).norm == 5
    I = ideal_from_gens([AlgebraicInt(2, 0, Qi), AlgebraicInt(1, 1, Qi)])
    assert I == principal(AlgebraicInt(1, 1, Qi)) and I.norm == 2
    assert ideal_from_gens([AlgebraicInt(1, 0, Q2)]) == unit_ideal(Q2)
    with pytest.raises(RejectedInput):
        ideal_from_gens([AlgebraicInt(0, 0, Qi)])


def test_mul_gcd_examples(Qi):
    six, four, two = (principal(AlgebraicInt(k, 0, Qi)) for k in (6, 4, 2))
    assert ideal_gcd(six, four) == two
    assert ideal_mul(principal(AlgebraicInt(1, 1, Qi)), principal(AlgebraicInt(1, -1, Qi))) == two
    assert ideal_gcd(six, unit_ideal(Qi)) == unit_ideal(Qi)


def test_factor_examples(Qi):
    f5 = factor_ideal(principal(AlgebraicInt(5, 0, Qi)))
    assert [(P.norm, P.kind, e) for P, e in f5] == [(5, "split", 1), (5, "split", 1)]
    f3 = factor_ideal(principal(AlgebraicInt(3, 0, Qi)))
    assert [(P.norm, P.kind, e) for P, e in f3] == [(9, "inert", 1)]
    f2 = factor_ideal(principal(AlgebraicInt(2, 0, Qi)))
    assert [(P.norm, P.kind, e) for P, e in f2] == [(2, "ramified", 2)]


def test_factor_capacity(Qi, monkeypatch):
    monkeypatch.setattr(ideal_arith, "FACTOR_BOUND", 100)
    with pytest.raises(CapacityError):
        factor_ideal(principal(AlgebraicInt(11, 0, Qi)))


def test_mobius_phi_examples(Qi):
    one = unit_ideal(Qi)
    assert moebius(one) == 1 and euler_phi(one) == 1
    assert moebius(principal(AlgebraicInt(2, 0, Qi))) == 0
    assert euler_phi(principal(AlgebraicInt(1, 1, Qi))) == 1
    q = principal(AlgebraicInt(3, 1, Qi))
    assert sum(Fraction(moebius(d), d.norm) for d in divisors(q)) == Fraction(euler_phi(q), q.norm)


def _kronecker_kind(D, p):
    if D % p == 0:
        return "ramified"
    if p == 2:
        return "split" if D % 8 == 1 else "inert"
    return "split" if pow(D % p, (p - 1) // 2, p) == 1 else "inert"


@pytest.mark.parametrize("d", FIELDS)
def test_prime_kinds_follow_discriminant(d):
    F = make_field(d)
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        Ps = primes_above(F, p)
        kind = _kronecker_kind(F.discriminant, p)
        assert all(P.kind == kind for P in Ps)
        assert all(P.norm == p ** P.residue_degree for P in Ps)
        prod = unit_ideal(F)
        for P in Ps:
            prod = ideal_mul(prod, P.ideal)
        if kind == "ramified":
            prod = ideal_mul(prod, prod)
        assert prod == principal(AlgebraicInt(p, 0, F))


def _random_ideal(F, rng, X):
    return rng.choice(ideals_of_norm_upto(F, X))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(0, 10**6))
def test_norm_multiplicative_and_gcd(d, seed):
    F = make_field(d)
    rng = random.Random(seed)
    x, y = _random_ideal(F, rng, 200), _random_ideal(F, rng, 200)
    xy = ideal_mul(x, y)
    assert xy.norm == x.norm * y.norm
    assert xy == ideal_mul(y, x)
    g = ideal_gcd(x, y)
    assert divides(g, x) and divides(g, y)
    for c in divisors(x):
        if divides(c, y):
            assert divides(c, g)


def test_norm_multiplicative_bulk():
    rng = random.Random(7)
    for d in (-1, 2, -5, 5):
        F = make_field(d)
        ideals = ideals_of_norm_upto(F, 2000)
        for _ in range(2500):
            x, y = rng.choice(ideals), rng.choice(ideals)
            assert ideal_mul(x, y).norm == x.norm * y.norm


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(0, 10**6))
def test_factor_roundtrip(d, seed):
    F = make_field(d)
    x = _random_ideal(F, random.Random(seed), 3000)
    prod = unit_ideal(F)
    for P, e in factor_ideal(x):
        prod = ideal_mul(prod, ideal_pow(P.ideal, e))
    assert prod == x
    keys = [P.key for P, _ in factor_ideal(x)]
    assert keys == sorted(keys)


@pytest.mark.parametrize("d", [-1, -5])
def test_mobius_sum_and_relation(d):
    F = make_field(d)
    for a in ideals_of_norm_upto(F, 2000):
        divs = divisors(a)
        assert sum(moebius(t) for t in divs) == (1 if a.norm == 1 else 0)
        assert sum(Fraction(moebius(t), t.norm) for t in divs) == Fraction(euler_phi(a), a.norm)


def test_phi_lower_bound_spot_check():
    rng = random.Random(3)
    for d in (-1, 2, -5):
        F = make_field(d)
        for P in primes_in_norm_range(F, 10**5, 10**5 + 2000):
            q = ideal_mul(P.ideal, _random_ideal(F, rng, 10))
            if q.norm <= 10**6:
                assert euler_phi(q) >= q.norm ** 0.7


def test_principality_examples(Qm5, Qi):
    P2 = primes_above(Qm5, 2)[0].ideal
    assert P2 == ideal_from_gens([AlgebraicInt(2, 0, Qm5), AlgebraicInt(1, 1, Qm5)])
    assert is_principal_with_generator(P2) is None
    g = is_principal_with_generator(ideal_from_gens([AlgebraicInt(2, 1, Qi)]))
    assert g is not None and principal(g) == principal(AlgebraicInt(2, 1, Qi))
    assert is_principal_with_generator(unit_ideal(Qi)) == AlgebraicInt(1, 0, Qi)


@pytest.mark.parametrize("d, h", [(-1, 1), (-2, 1), (-3, 1), (-5, 2), (-6, 2), (-14, 4), (-23, 3),
                                  (-21, 4), (-30, 4), (2, 1), (5, 1), (10, 2), (15, 2), (79, 3), (-65, 8)])
def test_class_numbers(d, h):
    cg = class_group(make_field(d))
    assert cg.order == h
    assert math.prod(cg.structure) == h
    for g, m in zip(cg.generators, cg.structure):
        assert is_principal(ideal_pow(g, m))


def test_class_group_structure():
    assert class_group(make_field(-21)).structure in ((2, 2),)
    assert class_group(make_field(-14)).structure == (4,)
    assert class_group(make_field(-65)).structure in ((4, 2), (2, 4))


def test_decompose_examples(Qm5):
    cg = class_group(Qm5)
    P2 = primes_above(Qm5, 2)[0].ideal
    j, gen = decompose_in_class_group(P2, cg)
    assert j == (1,)
    assert principal_of(gen) == FracIdeal.of(ideal_mul(P2, ideal_conj(cg.generators[0]))) / FracIdeal.of(
        principal(AlgebraicInt(cg.generators[0].norm, 0, Qm5)))
    j, _ = decompose_in_class_group(principal(AlgebraicInt(3, 1, Qm5)), cg)
    assert j == (0,)
    P3 = primes_above(Qm5, 3)[0].ideal
    j, gen = decompose_in_class_group(ideal_mul(P2, P3), cg)
    assert j == (0,) and principal_of(gen) == FracIdeal.of(ideal_mul(P2, P3))
    assert gen.num.norm() != 1


def principal_of(z: FieldElement) -> FracIdeal:
    return FracIdeal.of(principal(z.num)) / FracIdeal.of(principal(AlgebraicInt(z.den, 0, z.num.field)))


@pytest.mark.parametrize("d", [-5, -23, -14, 10, -21])
def test_decompose_roundtrip(d):
    F = make_field(d)
    cg = class_group(F)
    for x in ideals_of_norm_upto(F, 150):
        j, gen = decompose_in_class_group(x, cg)
        assert all(0 <= e < m for e, m in zip(j, cg.structure))
        rebuilt = principal_of(gen)
        for g, e in zip(cg.generators, j):
            rebuilt = rebuilt * FracIdeal.of(ideal_pow(g, e))
        assert rebuilt == FracIdeal.of(x)
