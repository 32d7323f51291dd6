import pytest

from quadprime.field_core import make_field


@pytest.fixture(scope="session")
def Qi():
    return make_field(-1)


@pytest.fixture(scope="session")
def Q2():
    return make_field(2)


@pytest.fixture(scope="session")
def Qm5():
    return make_field(-5)


@pytest.fixture(scope="session")
def Q5():
    return make_field(5)


@pytest.fixture(autouse=True)
def _mp_precision():
    # reference values in tests are computed at 256 bits
    import mpmath

    with mpmath.workprec(256):
        yield
