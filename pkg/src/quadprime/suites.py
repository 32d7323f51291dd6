"""Exact invariant suites shared by `quadprime verify` and the test-suite.

Each suite returns a SuiteResult; `passed` is decided with exact arithmetic
(integers, Fractions, cyclotomic reduction), never with a float tolerance.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import (
    _turn,
    characters_mod,
    exact_turn_sum_is_zero,
    infinity_type_for,
    make_hecke,
    residue_unit_group,
)
from .errors import RejectedInput
from .field_core import (
    AlgebraicInt,
    FieldDescriptor,
    associate_canonical,
    canonical_generator,
    embed_float,
    imaginary_units,
    in_unit_window,
    sigma_sign,
    unit_power,
)
from .ideal_arith import (
    divisors,
    euler_phi,
    ideals_of_norm_upto,
    moebius,
    principal,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked,
                "failures": [str(f) for f in self.failures[:10]]}


def _result(name, checked, failures) -> SuiteResult:
    return SuiteResult(name, not failures, checked, failures)


def _moduli(F: FieldDescriptor, max_norm: int):
    return ideals_of_norm_upto(F, max_norm)


def orthogonality_suite(F: FieldDescriptor, max_norm: int = 60) -> SuiteResult:
    """Sum over characters: phi(f) at x == 1, else exactly 0. Sum over units: 0 for chi != 1."""
    checked, failures = 0, []
    for f in _moduli(F, max_norm):
        G = residue_unit_group(f)
        chars = characters_mod(f)
        one = G.key(AlgebraicInt(1, 0, F))
        units = G.units()
        if len(chars) != G.order:
            failures.append((f.key, "character count"))
        for u in units:
            turns = [chi.turn(u) for chi in chars]
            if G.key(u) == one:
                ok = all(t == 0 for t in turns)
            else:
                ok = exact_turn_sum_is_zero(turns)
            checked += 1
            if not ok:
                failures.append((f.key, str(u)))
        for chi in chars:
            if chi.is_principal():
                continue
            checked += 1
            if not exact_turn_sum_is_zero([chi.turn(u) for u in units]):
                failures.append((f.key, chi.exponents))
    return _result("orthogonality", checked, failures)


def homomorphism_suite(F: FieldDescriptor, max_norm: int = 40, seed: int = 0) -> SuiteResult:
    """chi(xy) = chi(x) chi(y) with the product reduced independently of the dlog table."""
    rng = random.Random(seed)
    checked, failures = 0, []
    for f in _moduli(F, max_norm):
        G = residue_unit_group(f)
        units = G.units()
        for chi in characters_mod(f):
            for _ in range(4):
                x, y = rng.choice(units), rng.choice(units)
                checked += 1
                if chi.turn(x * y) != _turn(chi.turn(x) + chi.turn(y)):
                    failures.append((f.key, chi.exponents, str(x), str(y)))
    return _result("homomorphism", checked, failures)


def mobius_suite(F: FieldDescriptor, max_norm: int = 10**4) -> SuiteResult:
    """sum_{d | a} mu(d) is 1 for a = (1) and 0 otherwise."""
    checked, failures = 0, []
    for a in ideals_of_norm_upto(F, max_norm):
        s = sum(moebius(d) for d in divisors(a))
        checked += 1
        if s != (1 if a.norm == 1 else 0):
            failures.append(a.key)
    return _result("mobius", checked, failures)


def relation_suite(F: FieldDescriptor, max_norm: int = 10**4, brute_norm: int = 300) -> SuiteResult:
    """sum_{d | q} mu(d)/N(d) = phi(q)/N(q); phi cross-checked by counting units for small q."""
    checked, failures = 0, []
    for q in ideals_of_norm_upto(F, max_norm):
        lhs = sum(Fraction(moebius(d), d.norm) for d in divisors(q))
        phi = euler_phi(q)
        checked += 1
        if lhs != Fraction(phi, q.norm):
            failures.append(q.key)
        if q.norm <= brute_norm:
            checked += 1
            if residue_unit_group(q).order != phi:
                failures.append((q.key, "phi"))
    return _result("relation", checked, failures)


def _random_element(F: FieldDescriptor, rng: random.Random, bound: int) -> AlgebraicInt:
    while True:
        z = AlgebraicInt(rng.randint(-bound, bound), rng.randint(-bound, bound), F)
        if not z.is_zero():
            return z


def canonical_uniqueness_suite(F: FieldDescriptor, samples: int = 1000, seed: int = 0, bound: int = 10**4) -> SuiteResult:
    """Real: among +-eps^n a0 (|n| <= 5 beyond the window estimate) exactly +-a lie in the unit window.
    Imaginary: exactly one of the w associates is the normalized one."""
    rng = random.Random(seed)
    checked, failures = 0, []
    for _ in range(samples):
        a0 = _random_element(F, rng, bound)
        checked += 1
        if F.is_real:
            a = canonical_generator(a0)
            s1, s2 = embed_float(a0)
            R = 5 + math.ceil(abs(math.log(abs(s2 / s1))) / (2 * math.log(F.eps_float)))
            inside = [s * unit_power(F, n) * a0 for n in range(-R, R + 1) for s in (1, -1)]
            inside = [b for b in inside if in_unit_window(b)]
            ok = sorted(map(str, inside)) == sorted([str(a), str(-a)]) and sigma_sign(a, 1) > 0
            ok = ok and principal(a) == principal(a0)
        else:
            canon = associate_canonical(a0)
            ok = all(associate_canonical(u * a0) == canon for u in imaginary_units(F))
            ok = ok and canon in [u * a0 for u in imaginary_units(F)]
        if not ok:
            failures.append(str(a0))
    return _result("canonical_uniqueness", checked, failures)


def unit_sum_vanishing_suite(F: FieldDescriptor, max_norm: int = 50, seed: int = 0) -> SuiteResult:
    """Imaginary fields: if chi(u) != 1 for some unit u then sum_u chi(u p) = 0."""
    if F.is_real:
        return SuiteResult("unit_sum_vanishing", True, 0)
    rng = random.Random(seed)
    units = imaginary_units(F)
    checked, failures = 0, []
    for f in _moduli(F, max_norm):
        G = residue_unit_group(f)
        reps = G.units()
        for chi in characters_mod(f):
            tu = [chi.turn(u) for u in units]
            if all(t == 0 for t in tu):
                continue
            for p in rng.sample(reps, min(3, len(reps))):
                checked += 1
                if not exact_turn_sum_is_zero([chi.turn(u * p) for u in units]):
                    failures.append((f.key, chi.exponents, str(p)))
    return _result("unit_sum_vanishing", checked, failures)


def unit_infinity_turn(h, u: AlgebraicInt) -> Fraction:
    """Exact turn of the archimedean factor at a unit."""
    F = u.field
    inf = h.infinity
    if not F.is_real:
        xi = AlgebraicInt(-1, 0, F) if F.w == 2 else AlgebraicInt(0, 1, F)
        z = AlgebraicInt(1, 0, F)
        for k in range(F.w):
            if z == u:
                # arg(u) = 2 pi k / w for xi = e(1/w); w = 2 uses xi = -1 = e(1/2)
                return _turn(Fraction(inf.u * k, F.w))
            z = z * xi
        raise RejectedInput("not a unit")
    sign = 1 if sigma_sign(u, 1) > 0 else -1
    v = u * sign
    for m in range(-64, 65):
        if unit_power(F, m) == v:
            break
    else:
        raise RejectedInput("unit exponent out of range")
    t = Fraction(0)
    if inf.u1 and sigma_sign(u, 1) < 0:
        t += Fraction(1, 2)
    if inf.u2 and sigma_sign(u, 2) < 0:
        t += Fraction(1, 2)
    # log|s1(eps^m)/s2(eps^m)| = 2 m log eps, so v * that / 2 pi = m (n + gamma)
    return _turn(t + m * (inf.n + inf.gamma))


def unit_triviality_suite(F: FieldDescriptor, max_norm: int = 40, ns=(0, 1, 2)) -> SuiteResult:
    """chi(u) chi_inf(u) = 1 exactly on units: the value on (alpha) does not depend on the generator."""
    if F.is_real:
        eps = F.fundamental_unit
        units = [AlgebraicInt(-1, 0, F), eps, -eps, eps * eps]
    else:
        units = imaginary_units(F)
    checked, failures = 0, []
    for f in _moduli(F, max_norm):
        for chi in characters_mod(f):
            for n in ns:
                inf = infinity_type_for(chi, F, n)
                h = _Shim(inf)
                for u in units:
                    checked += 1
                    if _turn(chi.turn(u) + unit_infinity_turn(h, u)) != 0:
                        failures.append((f.key, chi.exponents, n, str(u)))
    return _result("unit_triviality", checked, failures)


@dataclass
class _Shim:
    infinity: object


def hecke_generator_check(F: FieldDescriptor, modulus: AlgebraicInt, count: int = 20, prec: int = 96) -> SuiteResult:
    """Numeric cross-check: h((alpha)) agrees with h's value through every associate of alpha."""
    import mpmath

    f = principal(modulus)
    units = imaginary_units(F) if not F.is_real else [AlgebraicInt(1, 0, F), AlgebraicInt(-1, 0, F), F.fundamental_unit]
    checked, failures = 0, []
    G = residue_unit_group(f)
    reps = [u for u in G.units() if not u.is_zero()][:count]
    tol = mpmath.mpf(2) ** (-(prec - 16))
    for chi in characters_mod(f)[:8]:
        h = make_hecke(chi, prec=prec)
        for a in reps:
            ref = h(principal(a), prec)
            for u in units:
                checked += 1
                if abs(h.principal_value(u * a, prec) - ref) > tol:
                    failures.append((chi.exponents, str(a), str(u)))
    return _result("hecke_generator", checked, failures)


def exact_suites(F: FieldDescriptor, scale: str = "full") -> list[SuiteResult]:
    small = scale != "full"
    return [
        orthogonality_suite(F, 30 if small else 60),
        homomorphism_suite(F, 20 if small else 40),
        mobius_suite(F, 500 if small else 10**4),
        relation_suite(F, 500 if small else 10**4),
        canonical_uniqueness_suite(F, 200 if small else 1000),
        unit_sum_vanishing_suite(F, 30 if small else 50),
        unit_triviality_suite(F, 20 if small else 40),
    ]
