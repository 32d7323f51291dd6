import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadprime.errors import RejectedInput
from quadprime.targets import ApproxTarget, evaluate, parse


def value(expr, prec=200):
    with mpmath.workprec(prec):
        re, im = evaluate(parse(expr), mpmath.mp)
        return mpmath.mpc(re, im)


@pytest.mark.parametrize("expr, ref", [
    ("sqrt(2)+sqrt(3)*i", lambda: mpmath.sqrt(2) + 1j * mpmath.sqrt(3)),
    ("sqrt(2)+sqrt(3)i", lambda: mpmath.sqrt(2) + 1j * mpmath.sqrt(3)),
    ("pi + e*i", lambda: mpmath.pi + 1j * mpmath.e),
    ("π·2", lambda: 2 * mpmath.pi),
    ("(3+2*i)/(5+i)", lambda: mpmath.mpc(3, 2) / mpmath.mpc(5, 1)),
    ("2^-3", lambda: mpmath.mpf(1) / 8),
    ("-sqrt(-3)", lambda: -1j * mpmath.sqrt(3)),
    ("10**2 - 1/3", lambda: 100 - mpmath.mpf(1) / 3),
])
def test_expressions(expr, ref):
    with mpmath.workprec(200):
        assert abs(value(expr) - ref()) < mpmath.mpf(2) ** -190


@pytest.mark.parametrize("bad", ["", "sqrt(2", "2^pi", "x+1", "sqrt(i)", "3 $ 4"])
def test_rejects(bad):
    with pytest.raises(RejectedInput):
        ApproxTarget.imaginary(bad).value()


def test_real_pair_and_interval():
    t = ApproxTarget.parse("sqrt(3), sqrt(3)", "real")
    x1, x2 = t.value(128)
    assert x1 == x2
    i1, _ = t.interval(128)
    assert i1.a <= mpmath.sqrt(3) <= i1.b and i1.delta < mpmath.mpf(2) ** -120
    with pytest.raises(RejectedInput):
        ApproxTarget.parse("sqrt(3)", "real")
    with pytest.raises(RejectedInput):
        ApproxTarget.real("i", "1")


@settings(max_examples=100, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(1, 10**6), st.integers(0, 50))
def test_rational_sqrt_interval_encloses(a, b, s):
    expr = f"({a})/{b} + sqrt({s})*i"
    t = ApproxTarget.imaginary(expr)
    re, im = t.interval(96)
    v = t.value(256)
    assert re.a <= v.real <= re.b and im.a <= v.imag <= im.b
