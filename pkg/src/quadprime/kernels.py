"""Backend selection for the hot loops: compiled extension if importable, else pure Python.

Set QUADPRIME_PURE_PYTHON=1 to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

python_backend = _pykernels
compiled_backend = None
if not os.environ.get("QUADPRIME_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

SPLIT, INERT, RAMIFIED = _pykernels.SPLIT, _pykernels.INERT, _pykernels.RAMIFIED

# int64 safety bound for the compiled generator search (see _ckernels.gen_one)
COMPILED_SAFE_SCALE = 5 * 10**8


def primes_upto(n):
    return backend.primes_upto(n)


def prime_ideal_rows(primes, lo, hi, D, t, n):
    return backend.prime_ideal_rows(primes, lo, hi, D, t, n)


def generators(a, b, c, t, n, real, w, eta1, eta2, log_eps, eps):
    impl = backend
    if len(a) and impl is not python_backend:
        scale = int(max(a)) * int(max(c)) * max(eps, 1.0)
        if scale > COMPILED_SAFE_SCALE:
            impl = python_backend
    return impl.generators(a, b, c, t, n, real, w, eta1, eta2, log_eps, eps)


def ideal_coefficients(X, primes, kinds, s1, s2):
    return backend.ideal_coefficients(X, primes, kinds, s1, s2)
