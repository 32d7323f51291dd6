import math

import mpmath
import pytest

from quadprime.approx_engine import (
    Convergent,
    SearchParams,
    approximation_error,
    dirichlet_approx,
    distinct_mod_q,
    exponent_profile,
    prime_denominator_search,
    prime_set_list,
    residue_set,
    search_params,
    sharpened_subsequence,
)
from quadprime.errors import ExactHitError, RejectedInput, UnsupportedSignature
from quadprime.field_core import AlgebraicInt, embed, in_unit_window, make_field
from quadprime.ideal_arith import ideal_gcd, principal, primes_in_norm_range, unit_ideal
from quadprime.targets import ApproxTarget

A = AlgebraicInt
IMAG = ApproxTarget.imaginary("sqrt(2)+sqrt(3)*i")
REAL = ApproxTarget.real("sqrt(3)", "sqrt(3)")


def brute_front_imag(F, alpha, Qmax):
    """(N(q), error) front from scanning every q with N(q) <= Qmax."""
    best_by_norm = {}
    R = int(math.isqrt(Qmax)) + 2
    for x in range(-R - R, R + R + 1):
        for y in range(-R - 2, R + 3):
            q = A(x, y, F)
            n = q.norm()
            if not 0 < n <= Qmax:
                continue
            z = complex(embed(q).v1, embed(q).v2) * alpha
            err = min(abs(z - complex(embed(A(u, v, F)).v1, embed(A(u, v, F)).v2))
                      for u in range(math.floor(z.real) - 3, math.floor(z.real) + 4)
                      for v in range(math.floor(z.imag / float(F.im_eta)) - 2, math.floor(z.imag / float(F.im_eta)) + 3)
                      ) / abs(complex(embed(q).v1, embed(q).v2))
            best_by_norm[n] = min(err, best_by_norm.get(n, math.inf))
    front, cur = [], math.inf
    for n in sorted(best_by_norm):
        if best_by_norm[n] < cur * (1 - 1e-9):
            cur = best_by_norm[n]
            front.append((n, cur))
    return front


def brute_front_real(F, x1, x2, Qmax):
    r = math.sqrt(F.d)
    best_by_norm = {}
    for x in range(-60, 61):
        for y in range(-40, 41):
            q = A(x, y, F)
            n = abs(q.norm())
            if not 0 < n <= Qmax or not in_unit_window(q):
                continue
            s1, s2 = x + y * r, x - y * r
            T1, T2 = s1 * x1, s2 * x2
            v0 = (T1 - T2) / (2 * r)
            u0 = T1 - v0 * r
            err = min(max(abs(T1 - (u + v * r)) / abs(s1), abs(T2 - (u - v * r)) / abs(s2))
                      for u in range(math.floor(u0) - 4, math.floor(u0) + 5)
                      for v in range(math.floor(v0) - 4, math.floor(v0) + 5))
            best_by_norm[n] = min(err, best_by_norm.get(n, math.inf))
    front, cur = [], math.inf
    for n in sorted(best_by_norm):
        if best_by_norm[n] < cur * (1 - 1e-9):
            cur = best_by_norm[n]
            front.append((n, cur))
    return front


def _assert_front_matches(convs, front):
    # several denominators of one norm may each improve the error; compare per-norm minima
    errs = [float(c.error) for c in convs]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    best = {}
    for c in convs:
        best[c.norm_q] = min(float(c.error), best.get(c.norm_q, math.inf))
    got = sorted(best.items())
    assert [n for n, _ in got] == [n for n, _ in front]
    for (_, e1), (_, e2) in zip(got, front):
        assert abs(e1 - e2) <= 1e-9 * e2


def test_dirichlet_front_imaginary_vs_exhaustive(Qi):
    convs = dirichlet_approx(IMAG, Qi, 400)
    _assert_front_matches(convs, brute_front_imag(Qi, complex(IMAG.floats()), 400))
    C_star = max(c.C_achieved for c in convs)
    for c in convs:
        assert approximation_error(IMAG, c.a, c.q, 384) <= C_star / c.norm_q
        assert abs(c.C_achieved - c.error * c.norm_q) < mpmath.mpf(2) ** -150


def test_dirichlet_front_other_imaginary_fields():
    for d, expr in ((-3, "pi + e*i"), (-5, "sqrt(7) - i/3")):
        F = make_field(d)
        t = ApproxTarget.imaginary(expr)
        _assert_front_matches(dirichlet_approx(t, F, 300), brute_front_imag(F, complex(t.floats()), 300))


def test_dirichlet_front_real_vs_exhaustive(Q2):
    convs = dirichlet_approx(REAL, Q2, 400)
    x1, x2 = REAL.floats()
    _assert_front_matches(convs, brute_front_real(Q2, x1, x2, 400))
    for c in convs:
        assert in_unit_window(c.q)


def test_dirichlet_rejections(Qi, Q2):
    with pytest.raises(UnsupportedSignature):
        dirichlet_approx(REAL, Qi, 100)
    with pytest.raises(UnsupportedSignature):
        dirichlet_approx(IMAG, Q2, 100)
    with pytest.raises(RejectedInput):
        dirichlet_approx(IMAG, Qi, 0)


def test_synthetic_near_rational_target(Qi):
    t = ApproxTarget.imaginary("(3+2*i)/(5+i) + 10^-12", 192)
    convs = dirichlet_approx(t, Qi, 200)
    c = next(c for c in convs if c.norm_q == 26)
    assert principal(c.q) == principal(A(5, 1, Qi))
    assert abs(c.error - mpmath.mpf(10) ** -12) < mpmath.mpf(10) ** -20
    assert abs(c.C_achieved / 26 - mpmath.mpf(10) ** -12) < mpmath.mpf(10) ** -20


def test_exact_target_aborts(Qi):
    t = ApproxTarget.imaginary("(3+2*i)/(5+i)")
    with pytest.raises(ExactHitError) as info:
        dirichlet_approx(t, Qi, 100)
    assert info.value.q is not None
    with pytest.raises(ExactHitError):
        prime_denominator_search(t, Qi, 0.05, 10**4)


def _fake_conv(F, a, q, err):
    Q = principal(q)
    D = ideal_gcd(principal(a), Q)
    from quadprime.ideal_arith import ideal_div
    return Convergent(a, q, mpmath.mpf(err), mpmath.mpf(err) * abs(q.norm()), D, ideal_div(Q, D))


def test_sharpened_subsequence():
    Qi = make_field(-1)
    cs = [_fake_conv(Qi, A(1, 0, Qi), A(n, 0, Qi), 0.1) for n in (2, 3, 3, 5)]
    out = sharpened_subsequence(cs)
    assert [c.norm_q for c in out] == [4, 9, 25] and out[1] is cs[1]
    assert sharpened_subsequence(cs[:2]) == cs[:2]
    F = make_field(-5)
    # a and q sharing the nonprincipal prime over 2: D nontrivial
    cs = [_fake_conv(F, A(1, 1, F), A(2, 0, F), 0.1), _fake_conv(F, A(1, 0, F), A(3, 0, F), 0.1),
          _fake_conv(F, A(1, 1, F), A(1, 1, F), 0.1), _fake_conv(F, A(3, 1, F), A(4, 0, F), 0.1)]
    assert cs[0].D != unit_ideal(F)
    norms = [c.norm_q_reduced for c in sharpened_subsequence(cs)]
    assert norms == sorted(set(norms))


def _brute_k(F, q, R2, strict=False):
    out = []
    for x in range(-5, 6):
        for y in range(-5, 6):
            k = A(x, y, F)
            n = k.norm()
            if 0 < n and (n < R2 if strict else n <= R2) and ideal_gcd(principal(k), principal(q)) == unit_ideal(F):
                out.append(k)
    return sorted(out, key=lambda k: (k.x, k.y))


def test_residue_set_q3(Qi):
    conv = _fake_conv(Qi, A(1, 0, Qi), A(3, 0, Qi), 1e-3)
    at2 = residue_set(conv, SearchParams(0.05, 10, 1, delta=1, radius=2.0), Qi)
    assert len(at2) == 12 and at2 == _brute_k(Qi, A(3, 0, Qi), 4)
    below = residue_set(conv, SearchParams(0.05, 10, 1, delta=1, radius=1.999), Qi)
    assert len(below) == 8 and below == _brute_k(Qi, A(3, 0, Qi), 4, strict=True)
    assert residue_set(conv, SearchParams(0.05, 10, 1, delta=1, radius=0.9), Qi) == []
    assert distinct_mod_q(below, conv)


def test_residue_set_real_window(Q2):
    convs = sharpened_subsequence(dirichlet_approx(REAL, Q2, 3000))
    nonempty = 0
    for conv in convs:
        params = search_params(conv, Q2, 0.05)
        ks = residue_set(conv, params, Q2)
        nonempty += bool(ks)
        assert distinct_mod_q(ks, conv)
        _check_real_window(conv, params, ks)
    assert nonempty


def _check_real_window(conv, params, ks):
    for k in ks:
        e = embed(k)
        assert abs(e.v1) <= params.Y0 and abs(e.v2) <= params.Y0
        assert in_unit_window(k)
        assert ideal_gcd(principal(k), principal(conv.q)) == conv.D


def test_search_params_relations(Qi, Q2):
    conv = dirichlet_approx(IMAG, Qi, 2000)[-1]
    p = search_params(conv, Qi, 0.05)
    assert math.isclose(p.delta, p.N ** (-1 / 3 + 0.05))
    assert math.isclose(2 * p.C * p.N / conv.norm_q_reduced, p.delta / 2, rel_tol=1e-9)
    assert p.window == (p.N ** 2, 4 * p.N ** 2)
    conv = dirichlet_approx(REAL, Q2, 2000)[-1]
    p = search_params(conv, Q2, 0.05)
    assert math.isclose(p.N, conv.norm_q_reduced ** (1 / (2 / 3 - 0.05)))
    assert p.window == (p.N, 2 * p.N) and math.isclose(p.W, math.sqrt(p.N))
    with pytest.raises(RejectedInput):
        search_params(conv, Q2, 0.5)


def test_prime_set_examples(Qi, Qm5):
    conv = _fake_conv(Qi, A(1, 0, Qi), A(7, 0, Qi), 1e-3)
    params = SearchParams(0.05, 3, 1, delta=1, window=(9, 36), radius=1)
    got = prime_set_list(conv, params, Qi)
    assert sorted(P.norm for P, _ in got) == [13, 13, 17, 17, 29, 29]
    for P, g in got:
        assert principal(g) == P.ideal
    ideals = [P.ideal for P, _ in got]
    assert len(set(ideals)) == len(ideals)
    conv = _fake_conv(Qm5, A(1, 0, Qm5), A(7, 0, Qm5), 1e-3)
    got = prime_set_list(conv, SearchParams(0.05, 1, 1, delta=1, window=(1, 200), radius=1), Qm5)
    assert all(P.norm != 2 for P, _ in got)
    expected = [P for P in primes_in_norm_range(Qm5, 1, 200) if P.norm != 49]
    from quadprime.ideal_arith import is_principal
    assert sorted(P.key for P, _ in got) == sorted(P.key for P in expected if is_principal(P.ideal))
    assert prime_set_list(conv, SearchParams(0.05, 1, 1, delta=1, window=(10, 10), radius=1), Qm5) == []


def _check_hits(hits, target, eps):
    for h in hits:
        err = approximation_error(target, h.b, h.p, 384)
        assert err <= mpmath.mpf(h.prime_norm) ** (mpmath.mpf(eps) - mpmath.mpf(2) / 3)
        assert err <= h.error * (1 + mpmath.mpf(2) ** -100)
        # congruence: (a p - k) / q integral
        assert h.ideal == principal(h.p)


@pytest.mark.parametrize("d, target", [(-1, IMAG), (2, REAL), (-5, ApproxTarget.imaginary("pi+e*i"))])
def test_search_small_budget(d, target):
    F = make_field(d)
    hits, diag = prime_denominator_search(target, F, 0.05, 10**5)
    assert hits
    _check_hits(hits, target, 0.05)
    keys = [(h.prime_norm, h.ideal.key) for h in hits]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert all(r.get("k_distinct_mod_q", True) for r in diag["runs"])
    if d == -5:
        from quadprime.ideal_arith import is_principal
        assert all(is_principal(h.ideal) for h in hits)


def test_search_workers_identical(Qi):
    h1, d1 = prime_denominator_search(IMAG, Qi, 0.05, 10**5, workers=1)
    h2, d2 = prime_denominator_search(IMAG, Qi, 0.05, 10**5, workers=3)
    assert [x.as_dict() for x in h1] == [x.as_dict() for x in h2]
    assert d1 == d2


class _H:
    def __init__(self, n, q):
        self.prime_norm, self.quality = n, q
        self.p = self.b = "x"
        self.error = 0.0

        class _I:
            key = (n,)
        self.ideal = _I()


def test_exponent_profile():
    one = exponent_profile([_H(13, 0.7)])
    assert one["min"] == one["median"] == one["max"] == 0.7
    two = exponent_profile([_H(13, 0.64), _H(17, 0.70)])
    assert math.isclose(two["median"], 0.67)
    prof = exponent_profile([_H(n, q) for n, q in ((5, 0.9), (13, 0.7), (29, 0.8), (101, 0.66))])
    cm = prof["cumulative_min"]
    assert all(a >= b for a, b in zip(cm, cm[1:]))
    assert prof["by_decade"] == {"1e0": 1, "1e1": 2, "1e2": 1}
    with pytest.raises(RejectedInput):
        exponent_profile([])
