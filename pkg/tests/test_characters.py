import cmath
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadprime.characters import (
    characters_mod,
    chi_infinity,
    class_group_character,
    conductor,
    dirichlet_eval,
    enumerate_characters,
    exact_turn_sum_is_zero,
    hecke_eval,
    inflate,
    infinity_type_for,
    make_hecke,
    mult_congruent,
    prime_values,
    residue_unit_group,
)
from quadprime.field_core import AlgebraicInt, FieldElement, imaginary_units, make_field
from quadprime.ideal_arith import (
    ideal_gcd,
    ideal_mul,
    ideals_of_norm_upto,
    prime_table,
    primes_above,
    principal,
    unit_ideal,
)
from quadprime.suites import (
    homomorphism_suite,
    orthogonality_suite,
    unit_sum_vanishing_suite,
    unit_triviality_suite,
)


def E(x, y, F):
    return AlgebraicInt(x, y, F)


def brute_phi(f):
    F = f.field
    one = unit_ideal(F)
    return sum(1 for y in range(f.c) for x in range(f.a)
               if ideal_gcd(principal(E(x, y, F)) if (x or y) else f, f) == one)


def test_residue_group_examples(Qi):
    G = residue_unit_group(principal(E(1, 1, Qi)))
    assert G.order == 1 and list(G.orders) in ([], [1])
    G = residue_unit_group(principal(E(3, 0, Qi)))
    assert sorted(G.orders) == [8]
    G = residue_unit_group(principal(E(2, 1, Qi)))
    assert list(G.orders) == [4]
    # i generates (O/(2+i))^*
    i = E(0, 1, Qi)
    keys = {G.key(i * i * i * i), G.key(i), G.key(i * i), G.key(i * i * i)}
    assert len(keys) == 4
    assert G.key(i) == G.key(E(3, 0, Qi))


@pytest.mark.parametrize("d, gen, orders", [
    (-1, (4, 0), [4, 2]),
    (-1, (6, 0), [8, 2]),
    (-1, (12, 0), [8, 4, 2]),
    (2, (3, 0), [8]),
    (2, (4, 0), None),
    (-5, (6, 0), None),
    (5, (10, 0), None),
])
def test_residue_group_order_vs_brute(d, gen, orders):
    F = make_field(d)
    f = principal(E(*gen, F))
    G = residue_unit_group(f)
    assert G.order == math.prod(G.orders) == brute_phi(f)
    if orders is not None:
        assert sorted(G.orders, reverse=True) == orders


@pytest.mark.parametrize("d", [-1, 2, -5, 5, -3])
def test_residue_group_orders_small(d):
    F = make_field(d)
    for f in ideals_of_norm_upto(F, 60):
        G = residue_unit_group(f)
        assert G.order == brute_phi(f)
        for g, o in zip(G.generators, G.orders):
            # claimed orders are exact
            assert G.key(_pow(g, o)) == G.key(E(1, 0, F))
            for p in _prime_factors(o):
                assert G.key(_pow(g, o // p)) != G.key(E(1, 0, F))


def _pow(z, e):
    out = E(1, 0, z.field)
    for _ in range(e):
        out = out * z
    return out


def _prime_factors(n):
    return [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]


def test_mult_congruent_examples(Qi):
    f = principal(E(2, 1, Qi))
    third = FieldElement(E(1, 0, Qi), 3)
    assert mult_congruent(third, third, f)
    hits = [y for y in range(5) if mult_congruent(third, E(y, 0, Qi), f)]
    assert hits == [2]
    assert mult_congruent(E(7, 3, Qi), E(5, 2, Qi), f)


def test_dirichlet_eval_examples(Qi):
    f = principal(E(2, 1, Qi))
    G = residue_unit_group(f)
    chis = characters_mod(f)
    principal_chi = next(c for c in chis if c.is_principal())
    assert dirichlet_eval(principal_chi, E(7, 0, Qi)) == 1
    assert dirichlet_eval(chis[1], E(2, 1, Qi) * E(3, 0, Qi)) == 0
    chi = next(c for c in chis if c.turn(E(0, 1, Qi)) == Fraction(1, 4))
    v = dirichlet_eval(chi, FieldElement(E(1, 0, Qi), 3))
    assert abs(v - dirichlet_eval(chi, E(2, 0, Qi))) < mpmath.mpf(2) ** -150
    # 2 = i^{-1} * (something) mod 5: 2 == 3^3 == i^3 so chi(2) = e(3/4)
    assert chi.turn(E(2, 0, Qi)) == Fraction(3, 4)
    assert G.order == 4


def test_infinity_type_examples(Qi, Q2):
    chi0 = characters_mod(unit_ideal(Q2))[0]
    inf = infinity_type_for(chi0, Q2, 0)
    assert inf.u1 == inf.u2 == 0 and inf.v(Q2) == 0
    inf = infinity_type_for(chi0, Q2, 1)
    assert abs(inf.v(Q2) - mpmath.pi / mpmath.log(1 + mpmath.sqrt(2))) < mpmath.mpf(2) ** -150
    f = principal(E(2, 1, Qi))
    chi = next(c for c in characters_mod(f) if c.turn(E(0, 1, Qi)) == Fraction(1, 2))
    assert infinity_type_for(chi, Qi).u == 2
    assert infinity_type_for(characters_mod(f)[0], Qi).u == 0


def test_enumerate_examples(Qi, Qm5):
    hs = list(enumerate_characters(unit_ideal(Qi)))
    assert len(hs) == 1 and hs[0].is_principal()
    assert len(list(enumerate_characters(principal(E(3, 0, Qi))))) == 8
    assert len(list(enumerate_characters(unit_ideal(Qm5), class_extensions=True))) == 2


def test_class_character_on_prime_over_2(Qm5):
    psi = class_group_character(Qm5, [Fraction(1, 2)])
    P2 = primes_above(Qm5, 2)[0].ideal
    assert abs(hecke_eval(psi, P2) + 1) < mpmath.mpf(2) ** -100
    P3a, P3b = (P.ideal for P in primes_above(Qm5, 3))
    assert abs(hecke_eval(psi, P3a) + 1) < mpmath.mpf(2) ** -100
    assert abs(hecke_eval(psi, principal(E(3, 0, Qm5))) - 1) < mpmath.mpf(2) ** -100
    assert abs(hecke_eval(psi, ideal_mul(P2, P3a)) - 1) < mpmath.mpf(2) ** -100


def test_conductor_examples(Qi):
    f = principal(E(2, 1, Qi))
    big = ideal_mul(f, principal(E(3, 0, Qi)))
    for chi in characters_mod(f):
        expect = unit_ideal(Qi) if chi.is_principal() else f
        assert conductor(chi) == expect
        assert conductor(inflate(chi, big)) == expect
    assert conductor(characters_mod(big)[0]) == unit_ideal(Qi)


@pytest.mark.parametrize("d", [-1, 2, -5])
def test_conductor_recovers_base(d):
    F = make_field(d)
    base = [f for f in ideals_of_norm_upto(F, 15) if f.norm > 1]
    for f in base:
        big = ideal_mul(f, principal(E(2, 0, F)))
        for chi in characters_mod(f):
            c = conductor(chi)
            assert conductor(inflate(chi, big)) == c


def test_hecke_h1_matches_dirichlet_times_infinity(Q2):
    f = principal(E(3, 0, Q2))
    tab = prime_table(Q2, 1, 200, with_generators=True)
    for chi in characters_mod(f)[:4]:
        h = make_hecke(chi, n=1)
        vals = prime_values(h, tab)
        for i in range(len(tab)):
            g = tab.generator(i)
            ref = dirichlet_eval(chi, g) * chi_infinity(h.infinity, g, Q2)
            assert abs(complex(hecke_eval(h, tab.prime(i).ideal)) - complex(ref)) < 1e-12
            assert abs(vals[i] - complex(ref)) < 1e-9


@pytest.mark.parametrize("d", [-1, 2, -5, 5, -3])
def test_exact_suites_pass(d):
    F = make_field(d)
    for suite in (orthogonality_suite(F, 40), homomorphism_suite(F, 25),
                  unit_sum_vanishing_suite(F, 30), unit_triviality_suite(F, 20)):
        assert suite.passed, suite.failures[:3]
        assert suite.checked > 0 or (F.is_real and suite.name == "unit_sum_vanishing")


def test_orthogonality_up_to_2000(Qi):
    # a spread of moduli with norm up to 2000
    rng = random.Random(5)
    ideals = [f for f in ideals_of_norm_upto(Qi, 2000) if f.norm > 1000]
    for f in rng.sample(ideals, 6):
        G = residue_unit_group(f)
        chis = characters_mod(f)
        for u in rng.sample(G.units(), 5):
            s = [c.turn(u) for c in chis]
            if G.key(u) == G.key(E(1, 0, Qi)):
                assert all(t == 0 for t in s)
            else:
                assert exact_turn_sum_is_zero(s)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 59), st.sampled_from([1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60])),
                min_size=0, max_size=9))
def test_exact_turn_sum_vs_numeric(pairs):
    turns = [Fraction(a, m) for a, m in pairs]
    total = sum(cmath.exp(2j * math.pi * t) for t in turns)
    assert exact_turn_sum_is_zero(turns) == (abs(total) < 1e-9)


@pytest.mark.parametrize("d", [-1, -3, 2, -5])
def test_generator_independence_and_multiplicativity(d):
    F = make_field(d)
    rng = random.Random(11)
    f = next(f for f in ideals_of_norm_upto(F, 20) if f.norm >= 7)
    units = imaginary_units(F) if not F.is_real else [E(-1, 0, F), F.fundamental_unit, -F.fundamental_unit]
    for chi in characters_mod(f)[:5]:
        h = make_hecke(chi, n=1 if F.is_real else 0)
        for _ in range(6):
            a = E(rng.randint(-30, 30), rng.randint(-30, 30), F)
            b = E(rng.randint(-30, 30), rng.randint(-30, 30), F)
            if a.is_zero() or b.is_zero():
                continue
            ha, hb = h(principal(a)), h(principal(b))
            for u in units:
                assert abs(h(principal(u * a)) - ha) < 1e-40
                assert abs(h.principal_value(u * a) - ha) < 1e-40
            assert abs(h(principal(a * b)) - ha * hb) < 1e-40
            for v in (ha, hb):
                assert v == 0 or abs(abs(v) - 1) < 1e-40


def test_hecke_multiplicative_class_extensions(Qm5):
    rng = random.Random(2)
    f = principal(E(3, 0, Qm5))
    ideals = [x for x in ideals_of_norm_upto(Qm5, 80)]
    for h in list(enumerate_characters(f, class_extensions=True))[:6]:
        for _ in range(8):
            x, y = rng.choice(ideals), rng.choice(ideals)
            assert abs(h(ideal_mul(x, y)) - h(x) * h(y)) < 1e-40
