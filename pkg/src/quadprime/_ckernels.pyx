# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops. Mirrors _pykernels function by function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, sqrt

ctypedef long long i64

cdef int SPLIT = 0
cdef int INERT = 1
cdef int RAMIFIED = 2


cdef inline i64 fdiv(i64 a, i64 b):
    # floor division for b > 0
    cdef i64 q = a / b
    if (a % b != 0) and (a < 0):
        q -= 1
    return q


cdef inline i64 fmod(i64 a, i64 b):
    cdef i64 r = a % b
    if r < 0:
        r += b
    return r


cdef inline i64 isqrt64(i64 s):
    cdef i64 r = <i64> sqrt(<double> s)
    while r * r > s:
        r -= 1
    while (r + 1) * (r + 1) <= s:
        r += 1
    return r


cdef i64 powmod(i64 b, i64 e, i64 m):
    cdef i64 r = 1
    b = fmod(b, m)
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


cdef int legendre(i64 a, i64 p):
    a = fmod(a, p)
    if a == 0:
        return 0
    return 1 if powmod(a, (p - 1) / 2, p) == 1 else -1


cdef i64 sqrt_mod(i64 a, i64 p):
    cdef i64 q, s, z, m, c, t, r, i, t2, b
    a = fmod(a, p)
    if a == 0:
        return 0
    if p % 4 == 3:
        return powmod(a, (p + 1) / 4, p)
    q = p - 1
    s = 0
    while q % 2 == 0:
        q /= 2
        s += 1
    z = 2
    while powmod(z, (p - 1) / 2, p) != p - 1:
        z += 1
    m = s
    c = powmod(z, q, p)
    t = powmod(a, q, p)
    r = powmod(a, (q + 1) / 2, p)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = powmod(c, (<i64> 1) << (m - i - 1), p)
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


def primes_upto(n):
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] sieve = np.ones(n + 1, dtype=np.uint8)
    cdef i64 p, j, N = n
    sieve[0] = 0
    sieve[1] = 0
    p = 2
    while p * p <= N:
        if sieve[p]:
            j = p * p
            while j <= N:
                sieve[j] = 0
                j += p
        p += 1
    return np.flatnonzero(sieve).astype(np.int64)


def prime_ideal_rows(cnp.ndarray[i64, ndim=1] primes, lo, hi, i64 D, i64 t, i64 n):
    cdef double dlo = lo, dhi = hi
    cdef Py_ssize_t i, m = primes.shape[0], cnt = 0
    cdef i64 p, k, q, s, inv2, r1, r2, b1, b2, r
    cdef cnp.ndarray[i64, ndim=2] out = np.zeros((2 * m + 2, 6), dtype=np.int64)
    for i in range(m):
        p = primes[i]
        q = p * p
        if p <= dlo and not (dlo < q and q <= dhi):
            continue
        if p == 2:
            if D % 2 == 0:
                k = 0
            elif fmod(D, 8) == 1 or fmod(D, 8) == 7:
                k = 1
            else:
                k = -1
        else:
            k = legendre(D, p)
        if k == -1:
            if dlo < q and q <= dhi:
                out[cnt, 0] = q; out[cnt, 1] = p; out[cnt, 2] = p
                out[cnt, 3] = 0; out[cnt, 4] = p; out[cnt, 5] = INERT
                cnt += 1
            continue
        if not (dlo < p and p <= dhi):
            continue
        if p == 2:
            b1 = -1
            b2 = -1
            for r in range(2):
                if fmod(r * r - t * r - n, 2) == 0:
                    if b1 < 0:
                        b1 = fmod(-r, 2)
                    else:
                        b2 = fmod(-r, 2)
        else:
            s = sqrt_mod(D, p)
            inv2 = (p + 1) / 2
            r1 = fmod((t + s) % p * inv2, p)
            r2 = fmod((t - s) % p * inv2, p)
            b1 = fmod(-r1, p)
            b2 = fmod(-r2, p)
            if b1 == b2:
                b2 = -1
        if b2 >= 0 and b2 < b1:
            b1, b2 = b2, b1
        for r in (b1, b2):
            if r < 0:
                continue
            out[cnt, 0] = p; out[cnt, 1] = p; out[cnt, 2] = p
            out[cnt, 3] = r; out[cnt, 4] = 1
            out[cnt, 5] = SPLIT if k == 1 else RAMIFIED
            cnt += 1
    return out[:cnt]


cdef struct Reduced:
    i64 v1x, v1y, v2x, v2y, q1, q2, b2


cdef inline i64 qform(i64 x, i64 y, i64 A, i64 B, i64 C):
    return A * x * x + B * x * y + C * y * y


cdef Reduced reduce_basis(i64 v1x, i64 v1y, i64 v2x, i64 v2y, i64 A, i64 B, i64 C):
    cdef Reduced r
    cdef i64 q1 = qform(v1x, v1y, A, B, C), q2 = qform(v2x, v2y, A, B, C), b2, mu, tmp
    while True:
        if q2 < q1:
            tmp = v1x; v1x = v2x; v2x = tmp
            tmp = v1y; v1y = v2y; v2y = tmp
            tmp = q1; q1 = q2; q2 = tmp
        b2 = 2 * A * v1x * v2x + B * (v1x * v2y + v1y * v2x) + 2 * C * v1y * v2y
        mu = fdiv(b2 + q1, 2 * q1)
        if mu != 0:
            v2x -= mu * v1x
            v2y -= mu * v1y
            q2 = qform(v2x, v2y, A, B, C)
        if q2 >= q1:
            break
    r.v1x = v1x; r.v1y = v1y; r.v2x = v2x; r.v2y = v2y
    r.q1 = q1; r.q2 = q2
    r.b2 = 2 * A * v1x * v2x + B * (v1x * v2y + v1y * v2x) + 2 * C * v1y * v2y
    return r


cdef int gen_one(i64 a, i64 b, i64 c, i64 N, i64 t, i64 n, bint real, int w,
                 double eta1, double eta2, double log_eps, double eps, i64 *gx, i64 *gy):
    cdef i64 A, B, C, R, delta, kmax, k, S, s, mlo, mhi, m, x, y, nm
    cdef double s1, s2, rr
    cdef int tie = 0
    cdef i64 tx = 0, ty = 0
    cdef Reduced red
    if real:
        A = 2; B = 2 * t; C = t * t + 2 * n
        R = <i64> (2.0 * eps * N * (1.0 + 1e-9)) + 1
    else:
        A = 1; B = t; C = -n
        R = N
    red = reduce_basis(a, 0, b, c, A, B, C)
    delta = 4 * red.q1 * red.q2 - red.b2 * red.b2
    kmax = isqrt64(4 * red.q1 * R / delta) + 1
    for k in range(-kmax, kmax + 1):
        S = 4 * red.q1 * R - k * k * delta
        if S < 0:
            continue
        s = isqrt64(S)
        mlo = -fdiv(red.b2 * k + s, 2 * red.q1)
        mhi = fdiv(s - red.b2 * k, 2 * red.q1)
        for m in range(mlo, mhi + 1):
            x = m * red.v1x + k * red.v2x
            y = m * red.v1y + k * red.v2y
            if (x == 0 and y == 0) or qform(x, y, A, B, C) > R:
                continue
            nm = x * x + t * x * y - n * y * y
            if real:
                if nm != N and nm != -N:
                    continue
                s1 = x + y * eta1
                s2 = x + y * eta2
                if s1 <= 0:
                    continue
                rr = log(fabs(s2 / s1)) / log_eps
                if fabs(rr - 1.0) < 1e-9 or fabs(rr + 1.0) < 1e-9:
                    tie = 1; tx = x; ty = y
                    continue
                if rr > -1.0 and rr <= 1.0:
                    gx[0] = x; gy[0] = y
                    return 1
            else:
                if nm != N:
                    continue
                if w == 2:
                    if y > 0 or (y == 0 and x > 0):
                        gx[0] = x; gy[0] = y
                        return 1
                elif y >= 0 and x > 0:
                    gx[0] = x; gy[0] = y
                    return 1
    if tie:
        gx[0] = tx; gy[0] = ty
        return 2
    return 0


def generators(a_arr, b_arr, c_arr, i64 t, i64 n, bint real, int w,
               double eta1, double eta2, double log_eps, double eps):
    cdef cnp.ndarray[i64, ndim=1] A = np.ascontiguousarray(a_arr, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] B = np.ascontiguousarray(b_arr, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] C = np.ascontiguousarray(c_arr, dtype=np.int64)
    cdef Py_ssize_t i, m = A.shape[0]
    cdef cnp.ndarray[i64, ndim=1] gx = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] gy = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] st = np.zeros(m, dtype=np.int8)
    cdef i64 x = 0, y = 0
    cdef int s
    for i in range(m):
        x = 0
        y = 0
        s = gen_one(A[i], B[i], C[i], A[i] * C[i], t, n, real, w, eta1, eta2, log_eps, eps, &x, &y)
        st[i] = s
        gx[i] = x
        gy[i] = y
    return gx, gy, st


def ideal_coefficients(X, cnp.ndarray[i64, ndim=1] primes, kinds, s1, s2):
    cdef i64 N = X, p, r, e, j, mm
    cdef Py_ssize_t i, np_ = primes.shape[0]
    cdef cnp.ndarray[cnp.int8_t, ndim=1] K = np.ascontiguousarray(kinds, dtype=np.int8)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] U = np.ascontiguousarray(s1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] V = np.ascontiguousarray(s2, dtype=np.complex128)
    cdef cnp.ndarray[i64, ndim=1] spf = np.zeros(N + 1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] idx = np.zeros(N + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(N + 1, dtype=np.complex128)
    cdef double complex u, v, h0, h1, h2, pe
    cdef int k
    for i in range(np_):
        p = primes[i]
        if p > N:
            break
        idx[p] = i
        j = p
        while j <= N:
            if spf[j] == 0:
                spf[j] = p
            j += p
    out[1] = 1.0
    for mm in range(2, N + 1):
        p = spf[mm]
        r = mm
        e = 0
        while r % p == 0:
            r /= p
            e += 1
        i = idx[p]
        k = K[i]
        u = U[i]
        if k == SPLIT:
            v = V[i]
            h0 = 1.0
            h1 = u + v
            for j in range(e - 1):
                h2 = (u + v) * h1 - u * v * h0
                h0 = h1
                h1 = h2
            pe = h1
        elif k == RAMIFIED:
            pe = 1.0
            for j in range(e):
                pe = pe * u
        else:
            if e % 2 == 0:
                pe = 1.0
                for j in range(e / 2):
                    pe = pe * u
            else:
                pe = 0.0
        out[mm] = out[r] * pe
    return out
