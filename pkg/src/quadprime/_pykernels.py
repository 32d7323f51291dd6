"""Pure-Python versions of the hot loops. Same signatures as the compiled module."""
from __future__ import annotations

import math

import numpy as np

SPLIT, INERT, RAMIFIED = 0, 1, 2


def primes_upto(n):
    """All rational primes <= n as an int64 array."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return np.flatnonzero(np.frombuffer(bytes(sieve), dtype=np.uint8)).astype(np.int64)


def _legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _sqrt_mod(a, p):
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def prime_ideal_rows(primes, lo, hi, D, t, n):
    """Rows (norm, p, a, b, c, kind) for prime ideals with lo < norm <= hi, unsorted.

    The ideal with HNF (a, b + c*eta) is (p, eta - r) for a root r of
    X^2 - tX - n mod p when p splits or ramifies, and (p) when p is inert.
    """
    rows = []
    for p in primes.tolist():
        if p <= lo and not (lo < p * p <= hi):
            continue
        if p == 2:
            k = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
        else:
            k = _legendre(D, p)
        if k == -1:
            q = p * p
            if lo < q <= hi:
                rows.append((q, p, p, 0, p, INERT))
            continue
        if not (lo < p <= hi):
            continue
        if p == 2:
            roots = [r for r in (0, 1) if (r * r - t * r - n) % 2 == 0]
        else:
            s = _sqrt_mod(D, p)
            inv2 = (p + 1) // 2
            roots = sorted({(t + s) * inv2 % p, (t - s) * inv2 % p})
        kind = SPLIT if k == 1 else RAMIFIED
        bs = sorted({(-r) % p for r in roots})
        for b in bs:
            rows.append((p, p, p, b, 1, kind))
    return rows


def _reduce(v1x, v1y, v2x, v2y, A, B, C):
    q1 = A * v1x * v1x + B * v1x * v1y + C * v1y * v1y
    q2 = A * v2x * v2x + B * v2x * v2y + C * v2y * v2y
    while True:
        if q2 < q1:
            v1x, v1y, v2x, v2y, q1, q2 = v2x, v2y, v1x, v1y, q2, q1
        b2 = 2 * A * v1x * v2x + B * (v1x * v2y + v1y * v2x) + 2 * C * v1y * v2y
        mu = (b2 + q1) // (2 * q1)
        if mu:
            v2x -= mu * v1x
            v2y -= mu * v1y
            q2 = A * v2x * v2x + B * v2x * v2y + C * v2y * v2y
        if q2 >= q1:
            b2 = 2 * A * v1x * v2x + B * (v1x * v2y + v1y * v2x) + 2 * C * v1y * v2y
            return v1x, v1y, v2x, v2y, q1, q2, b2


def short_vectors(a, b, c, A, B, C, R):
    """All nonzero points of the lattice <(a,0),(b,c)> with A x^2 + B xy + C y^2 <= R."""
    v1x, v1y, v2x, v2y, q1, q2, b2 = _reduce(a, 0, b, c, A, B, C)
    delta = 4 * q1 * q2 - b2 * b2
    kmax = math.isqrt(4 * q1 * R // delta) + 1
    out = []
    for k in range(-kmax, kmax + 1):
        S = 4 * q1 * R - k * k * delta
        if S < 0:
            continue
        s = math.isqrt(S)
        lo = -((b2 * k + s) // (2 * q1))
        hi = (s - b2 * k) // (2 * q1)
        for m in range(lo, hi + 1):
            x = m * v1x + k * v2x
            y = m * v1y + k * v2y
            if (x or y) and A * x * x + B * x * y + C * y * y <= R:
                out.append((x, y))
    return out


def _gen_imag(a, b, c, N, t, n, w):
    """Canonical generator of an ideal of norm N in an imaginary field, or None."""
    for x, y in short_vectors(a, b, c, 1, t, -n, N):
        if x * x + t * x * y - n * y * y != N:
            continue
        if w == 2:
            if y > 0 or (y == 0 and x > 0):
                return x, y
        elif y >= 0 and x > 0:
            return x, y
    return None


def _gen_real(a, b, c, N, t, n, eta1, eta2, log_eps, eps):
    """Window generator with sigma_1 > 0; status 1 found, 0 none, 2 undecided in floats."""
    R = int(2.0 * eps * N * (1.0 + 1e-9)) + 1
    tie = None
    for x, y in short_vectors(a, b, c, 2, 2 * t, t * t + 2 * n, R):
        if abs(x * x + t * x * y - n * y * y) != N:
            continue
        s1 = x + y * eta1
        s2 = x + y * eta2
        if s1 <= 0:
            continue
        r = math.log(abs(s2 / s1)) / log_eps
        if abs(r - 1.0) < 1e-9 or abs(r + 1.0) < 1e-9:
            tie = (x, y)
            continue
        if -1.0 < r <= 1.0:
            return 1, x, y
    if tie is not None:
        return 2, tie[0], tie[1]
    return 0, 0, 0


def generators(a_arr, b_arr, c_arr, t, n, real, w, eta1, eta2, log_eps, eps):
    """Canonical generators for a batch of ideals; status array as in _gen_real."""
    m = len(a_arr)
    gx = np.zeros(m, dtype=np.int64)
    gy = np.zeros(m, dtype=np.int64)
    st = np.zeros(m, dtype=np.int8)
    for i in range(m):
        a, b, c = int(a_arr[i]), int(b_arr[i]), int(c_arr[i])
        N = a * c
        if real:
            s, x, y = _gen_real(a, b, c, N, t, n, eta1, eta2, log_eps, eps)
            st[i], gx[i], gy[i] = s, x, y
        else:
            g = _gen_imag(a, b, c, N, t, n, w)
            if g is not None:
                st[i], gx[i], gy[i] = 1, g[0], g[1]
    return gx, gy, st


def ideal_coefficients(X, primes, kinds, s1, s2):
    """Coefficients a(m), m <= X, of the ideal Dirichlet series for a multiplicative
    character given its values on the primes above each rational prime.

    kinds[i] is SPLIT (values s1, s2), RAMIFIED (value s1) or INERT (value s1 on (p)).
    """
    X = int(X)
    coef = np.zeros(X + 1, dtype=np.complex128)
    coef[1] = 1.0
    spf = np.zeros(X + 1, dtype=np.int64)
    index = {}
    for i, p in enumerate(primes.tolist()):
        if p > X:
            break
        index[p] = i
        sl = spf[p::p]
        sl[sl == 0] = p
    spf_l = spf.tolist()
    out = [0j] * (X + 1)
    out[1] = 1 + 0j
    for m in range(2, X + 1):
        p = spf_l[m]
        r, e = m, 0
        while r % p == 0:
            r //= p
            e += 1
        i = index[p]
        k = kinds[i]
        u = complex(s1[i])
        if k == SPLIT:
            v = complex(s2[i])
            h0, h1 = 1 + 0j, u + v
            for _ in range(e - 1):
                h0, h1 = h1, (u + v) * h1 - u * v * h0
            pe = h1
        elif k == RAMIFIED:
            pe = 1 + 0j
            for _ in range(e):
                pe = pe * u
        elif e % 2 == 0:
            pe = 1 + 0j
            for _ in range(e // 2):
                pe = pe * u
        else:
            pe = 0j
        out[m] = out[r] * pe
    coef[:] = out
    return coef
