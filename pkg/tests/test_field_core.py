import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadprime.errors import RejectedInput, UnsupportedSignature
from quadprime.field_core import (
    AlgebraicInt,
    FieldElement,
    canonical_generator,
    embed,
    embed_interval,
    fundamental_unit,
    imaginary_units,
    in_unit_window,
    lattice_distance,
    make_field,
    norm_abs,
    unit_power,
)

coords = st.integers(min_value=-10**6, max_value=10**6)
FIELDS = [-1, -2, -3, -5, -7, -23, 2, 3, 5, 6, 13, 21]


def brute_unit(d):
    """Smallest unit > 1 by increasing height over the integral basis."""
    half = d % 4 == 1
    r = math.sqrt(d)
    best = None
    for h in range(1, 400):
        for x in range(-h, h + 1):
            for y in (h, -h) if abs(x) != h else range(-h, h + 1):
                if half:
                    N = x * x + x * y - y * y * (d - 1) // 4
                    v = x + y * (1 + r) / 2
                else:
                    N = x * x - d * y * y
                    v = x + y * r
                if abs(N) == 1 and v > 1 + 1e-9 and (best is None or v < best[0] - 1e-9):
                    best = (v, x, y)
        if best is not None and h > 2 * (abs(best[1]) + abs(best[2])) + 2:
            break
    return best[1], best[2]


def test_imaginary_descriptors():
    F = make_field(-1)
    assert (F.eta_kind, F.w, F.discriminant) == ("sqrt", 4, -4)
    assert F.im_eta == 1
    G = make_field(-3)
    assert (G.eta_kind, G.w, G.discriminant) == ("half", 6, -3)
    assert abs(G.im_eta - mpmath.sqrt(3) / 2) < mpmath.mpf(2) ** -180
    assert make_field(-5).w == 2 and make_field(-5).eta_kind == "sqrt"
    assert make_field(-7).eta_kind == "half"


@pytest.mark.parametrize("d", [0, 1, 4, 12, -4, -8, 18])
def test_rejects_bad_d(d):
    with pytest.raises(RejectedInput):
        make_field(d)


@pytest.mark.parametrize("d, unit", [(2, (1, 1)), (3, (2, 1)), (5, (0, 1)), (6, (5, 2)), (13, (1, 1)), (7, (8, 3))])
def test_fundamental_unit_frozen(d, unit):
    F = make_field(d)
    assert F.unit_xy == unit


@pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 21, 29, 33])
def test_fundamental_unit_matches_brute_force(d):
    F = make_field(d)
    eps = fundamental_unit(F)
    assert abs(eps.norm()) == 1
    assert embed(eps).v1 > 1
    assert (eps.x, eps.y) == brute_unit(d)


def test_fundamental_unit_imaginary_rejected():
    with pytest.raises(UnsupportedSignature):
        fundamental_unit(make_field(-1))


def test_embed_examples():
    Q2, Qi, Q5 = make_field(2), make_field(-1), make_field(5)
    e = embed(AlgebraicInt(1, 1, Q2))
    assert abs(e.v1 - (1 + mpmath.sqrt(2))) < mpmath.mpf(2) ** -185
    assert abs(e.v2 - (1 - mpmath.sqrt(2))) < mpmath.mpf(2) ** -185
    e = embed(AlgebraicInt(3, 2, Qi))
    assert (e.v1, e.v2) == (3, 2)
    e = embed(AlgebraicInt(0, 1, Q5))
    assert abs(e.v1 - (1 + mpmath.sqrt(5)) / 2) < mpmath.mpf(2) ** -185


def test_embed_precision_consistency():
    F = make_field(7)
    a = FieldElement(AlgebraicInt(123456789, -987654, F), 17)
    lo, hi = embed(a, 64), embed(a, 256)
    for x, y in ((lo.v1, hi.v1), (lo.v2, hi.v2)):
        assert abs(x - y) <= abs(y) * mpmath.mpf(2) ** -63


def test_embed_interval_contains_point():
    F = make_field(13)
    a = AlgebraicInt(-41, 77, F)
    i1, i2 = embed_interval(a, 80)
    e = embed(a, 300)
    assert i1.a <= e.v1 <= i1.b and i2.a <= e.v2 <= i2.b


def test_norm_abs_examples():
    Q2, Qi = make_field(2), make_field(-1)
    assert norm_abs(AlgebraicInt(1, 1, Q2)) == 1
    assert norm_abs(AlgebraicInt(1, 1, Qi)) == 2
    assert norm_abs(AlgebraicInt(-1, 2, Q2)) == 7


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(FIELDS), coords, coords, coords, coords)
def test_norm_multiplicative(d, a, b, c, e):
    F = make_field(d)
    x, y = AlgebraicInt(a, b, F), AlgebraicInt(c, e, F)
    assert norm_abs(x * y) == norm_abs(x) * norm_abs(y)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), coords, coords)
def test_embedding_product_is_norm(d, a, b):
    F = make_field(d)
    x = AlgebraicInt(a, b, F)
    e = embed(x)
    with mpmath.workprec(200):
        val = e.v1 * e.v2 if F.is_real else e.v1**2 + e.v2**2
        target = x.norm()
        assert abs(val - target) <= max(1, abs(target)) * mpmath.mpf(2) ** -184


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), coords, coords, coords, coords, st.integers(1, 50))
def test_field_element_arithmetic(d, a, b, c, e, den):
    F = make_field(d)
    x = FieldElement(AlgebraicInt(a, b, F), den)
    y = AlgebraicInt(c, e, F)
    if y.is_zero():
        return
    q = x / FieldElement.of(y)
    assert q * FieldElement.of(y) == x
    assert (x + FieldElement.of(y)) - FieldElement.of(y) == x


def test_canonical_generator_examples():
    F = make_field(2)
    assert canonical_generator(AlgebraicInt(1, 0, F)) == AlgebraicInt(1, 0, F)
    assert canonical_generator(AlgebraicInt(3, 1, F)) == AlgebraicInt(-1, 2, F)
    assert canonical_generator(AlgebraicInt(7, 5, F)) == AlgebraicInt(1, 0, F)


def test_canonical_generator_rejects():
    with pytest.raises(RejectedInput):
        canonical_generator(AlgebraicInt(0, 0, make_field(2)))
    with pytest.raises(UnsupportedSignature):
        canonical_generator(AlgebraicInt(1, 1, make_field(-1)))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([2, 3, 5, 6, 7, 13, 21]), coords, coords)
def test_canonical_generator_window(d, a, b):
    F = make_field(d)
    a0 = AlgebraicInt(a, b, F)
    if a0.is_zero():
        return
    g = canonical_generator(a0)
    assert in_unit_window(g)
    assert canonical_generator(g) == g
    assert abs(g.norm()) == abs(a0.norm())
    e = embed(g)
    assert e.v1 > 0
    with mpmath.workprec(200):
        eps = embed(F.fundamental_unit).v1
        root = mpmath.sqrt(abs(g.norm()))
        slack = 1 + mpmath.mpf(2) ** -150
        for v in (abs(e.v1), abs(e.v2)):
            assert root / mpmath.sqrt(eps) / slack <= v <= mpmath.sqrt(eps) * root * slack


def test_unit_power_inverse():
    F = make_field(5)
    for m in range(-6, 7):
        assert unit_power(F, m) * unit_power(F, -m) == AlgebraicInt(1, 0, F)


@pytest.mark.parametrize("d", [-1, -2, -3, -7])
def test_imaginary_units(d):
    F = make_field(d)
    us = imaginary_units(F)
    assert len(us) == F.w == len(set(us))
    assert all(u.norm() == 1 for u in us)


def _brute_distance(z, F, R=4):
    best = None
    im = F.im_eta
    y0 = int(mpmath.nint(z.v2 / im))
    x0 = int(mpmath.nint(z.v1))
    for x in range(x0 - R - abs(y0), x0 + R + abs(y0) + 1):
        for y in range(y0 - R, y0 + R + 1):
            p = embed(AlgebraicInt(x, y, F))
            dist = mpmath.hypot(z.v1 - p.v1, z.v2 - p.v2)
            best = dist if best is None or dist < best else best
    return best


def test_lattice_distance_examples():
    Qi = make_field(-1)
    z = embed(FieldElement(AlgebraicInt(1, 1, Qi), 2))
    assert abs(lattice_distance(z, Qi) - mpmath.sqrt(2) / 2) < mpmath.mpf(2) ** -180
    assert lattice_distance(embed(AlgebraicInt(3, 2, Qi)), Qi) == 0
    with pytest.raises(UnsupportedSignature):
        lattice_distance(embed(AlgebraicInt(1, 0, make_field(2))), make_field(2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([-1, -2, -3, -5, -7, -23]), st.integers(-40, 40), st.integers(-40, 40), st.integers(1, 17))
def test_lattice_distance_vs_brute_force(d, a, b, den):
    F = make_field(d)
    z = embed(FieldElement(AlgebraicInt(a, b, F), den))
    assert abs(lattice_distance(z, F) - _brute_distance(z, F)) < mpmath.mpf(2) ** -150


def test_lattice_distance_hexagonal_point():
    F = make_field(-3)
    with mpmath.workprec(200):
        z = type(embed(AlgebraicInt(0, 0, F)))(mpmath.mpf(1) / 2, mpmath.sqrt(3) / 4, 192)
        assert abs(lattice_distance(z, F) - _brute_distance(z, F)) < mpmath.mpf(2) ** -150


def test_field_participates_in_equality():
    assert AlgebraicInt(1, 1, make_field(2)) != AlgebraicInt(1, 1, make_field(3))
