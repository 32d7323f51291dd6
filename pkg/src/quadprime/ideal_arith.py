"""Ideals of O_K in Hermite normal form, factorization, prime ideals, class group.

An integral ideal is the Z-module with basis a and b + c*eta, where c | a,
c | b and 0 <= b < a; its norm is a*c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import mpmath
import numpy as np

from . import kernels
from .abelian import decompose
from .errors import CapacityError, RejectedInput
from .field_core import (
    AlgebraicInt,
    FieldDescriptor,
    FieldElement,
    associate_canonical,
    embed_float,
    in_unit_window,
    sigma_sign,
)
from .intmath import factorint, kronecker, sqrt_mod_prime

FACTOR_BOUND = 10**30
SIEVE_CAPACITY = 2 * 10**8
SEARCH_CAPACITY = 10**7


@dataclass(frozen=True)
class IdealHNF:
    a: int
    b: int
    c: int
    field: FieldDescriptor = field(repr=False)

    @property
    def norm(self) -> int:
        return self.a * self.c

    @property
    def key(self) -> tuple:
        return (self.norm, self.a, self.b, self.c)

    def basis(self) -> tuple[AlgebraicInt, AlgebraicInt]:
        F = self.field
        return AlgebraicInt(self.a, 0, F), AlgebraicInt(self.b, self.c, F)

    def contains(self, z: AlgebraicInt) -> bool:
        if z.y % self.c:
            return False
        return (z.x - (z.y // self.c) * self.b) % self.a == 0

    def reduce(self, x: int, y: int) -> tuple[int, int]:
        """Canonical representative of x + y*eta modulo the ideal."""
        q = y // self.c
        return (x - q * self.b) % self.a, y - q * self.c

    def is_unit(self) -> bool:
        return self.a == 1

    def __mul__(self, other):
        return ideal_mul(self, other)

    def __str__(self):
        return f"({self.a}, {self.b}+{self.c}*eta)"


def _hnf(vectors, F: FieldDescriptor) -> IdealHNF:
    cur = None
    xs = []
    for x, y in vectors:
        if y == 0:
            xs.append(x)
            continue
        if cur is None:
            cur = (x, y)
            continue
        u, v = cur, (x, y)
        while v[1] != 0:
            q = u[1] // v[1]
            u, v = v, (u[0] - q * v[0], u[1] - q * v[1])
        xs.append(v[0])
        cur = u
    a = 0
    for x in xs:
        a = math.gcd(a, x)
    if cur is None or a == 0:
        raise RejectedInput("generators do not span a full-rank module")
    bx, c = cur
    if c < 0:
        bx, c = -bx, -c
    return IdealHNF(a, bx % a, c, F)


def _times_eta(x: int, y: int, F: FieldDescriptor):
    return y * F.n, x + F.t * y


def ideal_from_gens(gens) -> IdealHNF:
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise RejectedInput("ideal generated by zero")
    F = gens[0].field
    vecs = []
    for g in gens:
        vecs.append((g.x, g.y))
        vecs.append(_times_eta(g.x, g.y, F))
    return _hnf(vecs, F)


def principal(z: AlgebraicInt) -> IdealHNF:
    return ideal_from_gens([z])


def unit_ideal(F: FieldDescriptor) -> IdealHNF:
    return IdealHNF(1, 0, 1, F)


def ideal_mul(x: IdealHNF, y: IdealHNF) -> IdealHNF:
    F = x.field
    prods = [u * v for u in x.basis() for v in y.basis()]
    vecs = []
    for p in prods:
        vecs.append((p.x, p.y))
        vecs.append(_times_eta(p.x, p.y, F))
    return _hnf(vecs, F)


def ideal_pow(x: IdealHNF, e: int) -> IdealHNF:
    out = unit_ideal(x.field)
    base = x
    while e:
        if e & 1:
            out = ideal_mul(out, base)
        base = ideal_mul(base, base)
        e >>= 1
    return out


def ideal_gcd(x: IdealHNF, y: IdealHNF) -> IdealHNF:
    vecs = [(v.x, v.y) for v in x.basis() + y.basis()]
    return _hnf(vecs, x.field)


def ideal_conj(x: IdealHNF) -> IdealHNF:
    F = x.field
    vecs = []
    for v in x.basis():
        w = v.conj()
        vecs.append((w.x, w.y))
        vecs.append(_times_eta(w.x, w.y, F))
    return _hnf(vecs, F)


def ideal_scale(x: IdealHNF, k: int) -> IdealHNF:
    k = abs(k)
    return IdealHNF(x.a * k, x.b * k, x.c * k, x.field)


def divides(x: IdealHNF, y: IdealHNF) -> bool:
    """x | y, i.e. y is contained in x."""
    return all(x.contains(v) for v in y.basis())


def ideal_div(x: IdealHNF, y: IdealHNF) -> IdealHNF | None:
    """x / y when y divides x, else None. Uses x * conj(y) = (x/y) * (N y)."""
    if not divides(y, x):
        return None
    z = ideal_mul(x, ideal_conj(y))
    n = y.norm
    return IdealHNF(z.a // n, z.b // n, z.c // n, x.field)


def content(x: IdealHNF) -> int:
    return math.gcd(math.gcd(x.a, x.b), x.c)


def ideal_lcm(x: IdealHNF, y: IdealHNF) -> IdealHNF:
    return ideal_div(ideal_mul(x, y), ideal_gcd(x, y))


# --- fractional ideals ------------------------------------------------------

@dataclass(frozen=True)
class FracIdeal:
    num: IdealHNF
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise RejectedInput("denominator must be positive")
        g = math.gcd(content(self.num), self.den)
        if g > 1:
            n = self.num
            object.__setattr__(self, "num", IdealHNF(n.a // g, n.b // g, n.c // g, n.field))
            object.__setattr__(self, "den", self.den // g)

    @property
    def field(self):
        return self.num.field

    @staticmethod
    def of(x) -> "FracIdeal":
        if isinstance(x, FracIdeal):
            return x
        if isinstance(x, IdealHNF):
            return FracIdeal(x, 1)
        fe = FieldElement.of(x)
        return FracIdeal(principal(fe.num), fe.den)

    def __mul__(self, other):
        o = FracIdeal.of(other)
        return FracIdeal(ideal_mul(self.num, o.num), self.den * o.den)

    def inverse(self) -> "FracIdeal":
        return FracIdeal(ideal_scale(ideal_conj(self.num), self.den), self.num.norm)

    def __truediv__(self, other):
        return self * FracIdeal.of(other).inverse()

    def is_integral(self) -> bool:
        return self.den == 1

    def norm(self):
        from fractions import Fraction
        return Fraction(self.num.norm, self.den * self.den)


# --- prime ideals -----------------------------------------------------------

KINDS = {kernels.SPLIT: "split", kernels.INERT: "inert", kernels.RAMIFIED: "ramified"}


@dataclass(frozen=True)
class PrimeIdeal:
    ideal: IdealHNF
    p: int
    kind: str

    @property
    def residue_degree(self) -> int:
        return 2 if self.kind == "inert" else 1

    @property
    def norm(self) -> int:
        return self.ideal.norm

    @property
    def key(self):
        return self.ideal.key

    def __str__(self):
        return str(self.ideal)


def _roots_mod_p(F: FieldDescriptor, p: int) -> list[int]:
    """Roots of X^2 - tX - n modulo p."""
    t, n = F.t, F.n
    if p == 2:
        return [r for r in (0, 1) if (r * r - t * r - n) % 2 == 0]
    s = sqrt_mod_prime(F.discriminant, p)
    inv2 = (p + 1) // 2
    return sorted({(t + s) * inv2 % p, (t - s) * inv2 % p})


@lru_cache(maxsize=65536)
def primes_above(F: FieldDescriptor, p: int) -> tuple[PrimeIdeal, ...]:
    k = kronecker(F.discriminant, p)
    if k == -1:
        return (PrimeIdeal(IdealHNF(p, 0, p, F), p, "inert"),)
    kind = "split" if k == 1 else "ramified"
    bs = sorted({(-r) % p for r in _roots_mod_p(F, p)})
    return tuple(PrimeIdeal(IdealHNF(p, b, 1, F), p, kind) for b in bs)


def valuation(x: IdealHNF, P: PrimeIdeal) -> int:
    e = 0
    while divides(P.ideal, x):
        x = ideal_div(x, P.ideal)
        e += 1
    return e


def element_valuation(z: FieldElement, P: PrimeIdeal):
    """v_P of a field element; +inf for zero."""
    z = FieldElement.of(z)
    if z.is_zero():
        return math.inf
    vn = valuation(principal(z.num), P)
    vd = valuation(principal(AlgebraicInt(z.den, 0, z.field)), P) if z.den > 1 else 0
    return vn - vd


def factor_ideal(x: IdealHNF) -> list[tuple[PrimeIdeal, int]]:
    if x.norm > FACTOR_BOUND:
        raise CapacityError(f"norm {x.norm} exceeds the factorization bound")
    out = []
    if x.norm == 1:
        return out
    for p in sorted(factorint(x.norm)):
        for P in primes_above(x.field, p):
            e = valuation(x, P)
            if e:
                out.append((P, e))
    out.sort(key=lambda pe: pe[0].key)
    return out


def moebius(x: IdealHNF) -> int:
    fac = factor_ideal(x)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def euler_phi(x: IdealHNF) -> int:
    out = 1
    for P, e in factor_ideal(x):
        out *= P.norm ** (e - 1) * (P.norm - 1)
    return out


def divisors(x: IdealHNF) -> list[IdealHNF]:
    ds = [unit_ideal(x.field)]
    for P, e in factor_ideal(x):
        powers = [unit_ideal(x.field)]
        for _ in range(e):
            powers.append(ideal_mul(powers[-1], P.ideal))
        ds = [ideal_mul(d, q) for d in ds for q in powers]
    return sorted(ds, key=lambda d: d.key)


def ideals_of_norm_upto(F: FieldDescriptor, X: int) -> list[IdealHNF]:
    """All integral ideals with norm <= X, sorted by (norm, HNF).

    Built multiplicatively from the prime ideals of norm <= X.
    """
    X = int(X)
    if X < 1:
        return []
    tab = prime_table(F, 0, X)
    primes = [(int(tab.norm[i]), IdealHNF(int(tab.a[i]), int(tab.b[i]), int(tab.c[i]), F)) for i in range(len(tab))]
    out = []

    def walk(start: int, I: IdealHNF):
        out.append(I)
        for j in range(start, len(primes)):
            Np, P = primes[j]
            if I.norm * Np > X:
                break
            J = ideal_mul(I, P)
            while True:
                walk(j + 1, J)
                if J.norm * Np > X:
                    break
                J = ideal_mul(J, P)

    walk(0, unit_ideal(F))
    out.sort(key=lambda I: I.key)
    return out


# --- prime tables -----------------------------------------------------------

@lru_cache(maxsize=8)
def _rational_primes(n: int) -> np.ndarray:
    return kernels.primes_upto(n)


def rational_primes(n: int) -> np.ndarray:
    # cache on a rounded-up bound so chunked calls share one sieve
    m = 1 << max(10, int(n - 1).bit_length())
    pr = _rational_primes(m)
    return pr[: np.searchsorted(pr, n, side="right")]


@dataclass
class PrimeTable:
    """Prime ideals with lo < norm <= hi as parallel arrays, sorted by (norm, a, b, c)."""

    field: FieldDescriptor
    lo: int
    hi: int
    norm: np.ndarray
    p: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    kind: np.ndarray
    gx: np.ndarray | None = None
    gy: np.ndarray | None = None
    principal: np.ndarray | None = None

    def __len__(self):
        return len(self.norm)

    def prime(self, i: int) -> PrimeIdeal:
        F = self.field
        return PrimeIdeal(
            IdealHNF(int(self.a[i]), int(self.b[i]), int(self.c[i]), F),
            int(self.p[i]),
            KINDS[int(self.kind[i])],
        )

    def generator(self, i: int) -> AlgebraicInt | None:
        if self.principal is None or not self.principal[i]:
            return None
        return AlgebraicInt(int(self.gx[i]), int(self.gy[i]), self.field)

    def __iter__(self) -> Iterator[PrimeIdeal]:
        for i in range(len(self)):
            yield self.prime(i)


def _build_table(F: FieldDescriptor, lo: int, hi: int, with_generators: bool) -> PrimeTable:
    pr = rational_primes(hi)
    rows = kernels.prime_ideal_rows(pr, lo, hi, F.discriminant, F.t, F.n)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, 6)
    order = np.lexsort((rows[:, 4], rows[:, 3], rows[:, 2], rows[:, 0]))
    rows = rows[order]
    tab = PrimeTable(F, lo, hi, *(np.ascontiguousarray(rows[:, j]) for j in range(6)))
    if with_generators:
        attach_generators(tab)
    return tab


def generator_params(F: FieldDescriptor):
    if F.is_real:
        eps = F.eps_float
        r = math.sqrt(F.d)
        e1, e2 = ((1 + r) / 2, (1 - r) / 2) if F.eta_kind == "half" else (r, -r)
        return True, 0, e1, e2, math.log(eps), eps
    return False, F.w, 0.0, 0.0, 0.0, 0.0


def attach_generators(tab: PrimeTable) -> None:
    F = tab.field
    real, w, e1, e2, le, eps = generator_params(F)
    gx, gy, st = kernels.generators(tab.a, tab.b, tab.c, F.t, F.n, real, w, e1, e2, le, eps)
    for i in np.flatnonzero(st == 2):
        g = canonical_from_any(AlgebraicInt(int(gx[i]), int(gy[i]), F))
        gx[i], gy[i], st[i] = g.x, g.y, 1
    tab.gx, tab.gy, tab.principal = gx, gy, st.astype(bool)


def canonical_from_any(g: AlgebraicInt) -> AlgebraicInt:
    from .field_core import canonical_generator
    if g.field.is_real:
        return canonical_generator(g)
    return associate_canonical(g)


def _chunk_bounds(lo: int, hi: int, chunks: int) -> list[tuple[int, int]]:
    if chunks <= 1 or hi - lo < 4 * chunks:
        return [(lo, hi)]
    step = (hi - lo) // chunks
    cuts = [lo + i * step for i in range(chunks)] + [hi]
    return list(zip(cuts[:-1], cuts[1:]))


def _table_worker(args):
    d, lo, hi, with_generators = args
    from .field_core import make_field
    return _build_table(make_field(d), lo, hi, with_generators)


def prime_table(F: FieldDescriptor, lo, hi, with_generators: bool = False, workers: int = 1) -> PrimeTable:
    """Prime ideals with lo < N <= hi. Chunks of the norm range are built
    independently (optionally in worker processes) and concatenated in order."""
    lo, hi = int(math.floor(lo)), int(math.floor(hi))
    if hi > SIEVE_CAPACITY:
        raise CapacityError(f"norm bound {hi} exceeds sieve capacity {SIEVE_CAPACITY}")
    lo = max(lo, 0)
    if hi <= lo:
        e = np.zeros(0, dtype=np.int64)
        tab = PrimeTable(F, lo, hi, e, e, e, e, e, e)
        if with_generators:
            tab.gx, tab.gy, tab.principal = e, e, np.zeros(0, dtype=bool)
        return tab
    bounds = _chunk_bounds(lo, hi, workers)
    if len(bounds) == 1:
        return _build_table(F, lo, hi, with_generators)
    from .parallel import pmap
    parts = pmap(_table_worker, [(F.d, l, h, with_generators) for l, h in bounds], workers)
    return concat_tables(F, lo, hi, parts)


def concat_tables(F, lo, hi, parts) -> PrimeTable:
    cat = lambda name: np.concatenate([getattr(t, name) for t in parts])
    tab = PrimeTable(F, lo, hi, cat("norm"), cat("p"), cat("a"), cat("b"), cat("c"), cat("kind"))
    if parts[0].gx is not None:
        tab.gx, tab.gy, tab.principal = cat("gx"), cat("gy"), cat("principal")
    return tab


def primes_in_norm_range(F: FieldDescriptor, lo, hi) -> Iterator[PrimeIdeal]:
    if hi > SIEVE_CAPACITY:
        raise CapacityError(f"norm bound {hi} exceeds sieve capacity {SIEVE_CAPACITY}")
    yield from prime_table(F, lo, hi)


# --- principality -----------------------------------------------------------

def _short_vectors_checked(x: IdealHNF, A, B, C, R):
    from ._pykernels import _reduce
    v1x, v1y, v2x, v2y, q1, q2, b2 = _reduce(x.a, 0, x.b, x.c, A, B, C)
    delta = 4 * q1 * q2 - b2 * b2
    estimate = 2 * math.pi * R / math.sqrt(delta) + 2 * math.isqrt(4 * q1 * R // delta) + 3
    if estimate > SEARCH_CAPACITY:
        raise CapacityError(f"principality search needs ~{estimate:.3g} lattice points")
    from ._pykernels import short_vectors
    return short_vectors(x.a, x.b, x.c, A, B, C, R)


def is_principal_with_generator(x: IdealHNF) -> AlgebraicInt | None:
    F = x.field
    N = x.norm
    if N == 1:
        return AlgebraicInt(1, 0, F)
    if not F.is_real:
        for vx, vy in _short_vectors_checked(x, 1, F.t, -F.n, N):
            g = AlgebraicInt(vx, vy, F)
            if g.norm() == N:
                return associate_canonical(g)
        return None
    with mpmath.workprec(64):
        eps = mpmath.mpf(F.eps_float)
        R = int(mpmath.floor(2 * eps * N * (1 + mpmath.mpf(2) ** -40))) + 1
    for vx, vy in _short_vectors_checked(x, 2, 2 * F.t, F.t * F.t + 2 * F.n, R):
        g = AlgebraicInt(vx, vy, F)
        if abs(g.norm()) == N and sigma_sign(g, 1) > 0 and in_unit_window(g):
            return g
    return None


def is_principal(x: IdealHNF) -> bool:
    return is_principal_with_generator(x) is not None


def _short_element(x: IdealHNF) -> AlgebraicInt:
    from ._pykernels import _reduce
    F = x.field
    if F.is_real:
        A, B, C = 2, 2 * F.t, F.t * F.t + 2 * F.n
    else:
        A, B, C = 1, F.t, -F.n
    v1x, v1y, *_ = _reduce(x.a, 0, x.b, x.c, A, B, C)
    return AlgebraicInt(v1x, v1y, F)


def reduce_ideal(x: IdealHNF) -> tuple[IdealHNF, FieldElement]:
    """(y, lam) with y = lam * x integral, in the same class, of small norm."""
    beta = _short_element(ideal_conj(x))
    lam = FieldElement(beta, x.norm)
    y = ideal_div(ideal_mul(principal(beta), x), principal(AlgebraicInt(x.norm, 0, x.field)))
    return y, lam


def same_class(x: IdealHNF, y: IdealHNF) -> bool:
    z, _ = reduce_ideal(ideal_mul(x, ideal_conj(y)))
    return is_principal(z)


def principal_generator_any(x: IdealHNF) -> FieldElement | None:
    """A generator of a principal ideal, found after reduction to small norm."""
    z, lam = reduce_ideal(x)
    g = is_principal_with_generator(z)
    if g is None:
        return None
    return FieldElement.of(g) / lam


# --- class group ------------------------------------------------------------

def minkowski_bound(F: FieldDescriptor) -> float:
    D = abs(F.discriminant)
    if F.is_real:
        return math.sqrt(D) / 2
    return 2 / math.pi * math.sqrt(D)


@dataclass(frozen=True)
class ClassGroup:
    field: FieldDescriptor
    order: int
    generators: tuple  # designated generator ideals a_1..a_k
    structure: tuple  # cycle orders m_1..m_k
    reps: tuple  # one reduced ideal per class
    dlog: dict = field(compare=False, repr=False)  # class index -> exponent vector

    def class_index(self, x: IdealHNF) -> int:
        if self.order == 1:
            return 0
        z, _ = reduce_ideal(x)
        for i, r in enumerate(self.reps):
            if same_class(z, r):
                return i
        raise ArithmeticError("ideal class not found")

    def exponents(self, x: IdealHNF) -> tuple:
        return self.dlog[self.class_index(x)]


@lru_cache(maxsize=64)
def class_group(F: FieldDescriptor, avoid: IdealHNF | None = None) -> ClassGroup:
    """Class group from prime ideals below the Minkowski bound.

    With `avoid`, the designated generators are chosen coprime to that ideal.
    """
    bound = int(math.floor(minkowski_bound(F)))
    gens = []
    for P in prime_table(F, 1, max(bound, 1)):
        gens.append(P.ideal)
    one = unit_ideal(F)
    reps = [one]
    table = {}
    queue = [0]
    while queue:
        ci = queue.pop(0)
        for j, g in enumerate(gens):
            z, _ = reduce_ideal(ideal_mul(reps[ci], g))
            idx = next((k for k, r in enumerate(reps) if same_class(z, r)), None)
            if idx is None:
                reps.append(z)
                idx = len(reps) - 1
                queue.append(idx)
            table[(ci, j)] = idx
    h = len(reps)
    # words: path of generator indices from the identity class
    words = {0: ()}
    frontier = [0]
    while frontier:
        nxt = []
        for ci in frontier:
            for j in range(len(gens)):
                k = table[(ci, j)]
                if k not in words:
                    words[k] = words[ci] + (j,)
                    nxt.append(k)
        frontier = nxt

    def mul(u, v):
        for j in words[v]:
            u = table[(u, j)]
        return u

    basis, orders, dlog = decompose(list(range(h)), mul, 0)
    gen_ideals = [reps[b] for b in basis]
    if avoid is not None and gen_ideals:
        gen_ideals = _coprime_class_reps(F, basis, reps, avoid)
    return ClassGroup(F, h, tuple(gen_ideals), tuple(orders), tuple(reps), dlog)


def _coprime_class_reps(F, classes, reps, avoid: IdealHNF, limit: int = 10**5):
    """For each class index, a prime ideal (or product of two) in it coprime to avoid."""
    need = {c: None for c in classes}
    seen = []
    for P in prime_table(F, 1, limit):
        if divides(P.ideal, avoid):
            continue
        idx = next(k for k, r in enumerate(reps) if same_class(P.ideal, r))
        if idx in need and need[idx] is None:
            need[idx] = P.ideal
        seen.append((idx, P.ideal))
        if all(v is not None for v in need.values()):
            break
    return [need[c] for c in classes]


def decompose_in_class_group(x, cg: ClassGroup):
    """(j, alpha) with x = a_1^j_1 ... a_k^j_k * (alpha)."""
    x = FracIdeal.of(x)
    F = cg.field
    j = cg.exponents(x.num) if cg.order > 1 else ()
    if cg.order > 1:
        # exponents are relative to the designated generators; recompute their classes
        j = _exponents_wrt(cg, x.num)
    b = x.num
    scale = x.den
    for g, e in zip(cg.generators, j):
        if e:
            b = ideal_mul(b, ideal_pow(ideal_conj(g), e))
            scale *= g.norm**e
    gen = principal_generator_any(b)
    if gen is None:
        raise ArithmeticError("class decomposition failed")
    return tuple(j), gen * FieldElement(AlgebraicInt(1, 0, F), scale)


def _exponents_wrt(cg: ClassGroup, x: IdealHNF) -> tuple:
    """Exponent vector of the class of x with respect to cg.generators."""
    gvecs = [cg.dlog[cg.class_index(g)] for g in cg.generators]
    target = cg.dlog[cg.class_index(x)]
    if all(gv == tuple(1 if i == k else 0 for i in range(len(gvecs))) for k, gv in enumerate(gvecs)):
        return target
    # generators replaced by coprime representatives: solve by enumeration
    import itertools
    for j in itertools.product(*(range(m) for m in cg.structure)):
        acc = [0] * len(cg.structure)
        for jl, gv in zip(j, gvecs):
            for i, v in enumerate(gv):
                acc[i] = (acc[i] + jl * v) % cg.structure[i]
        if tuple(acc) == target:
            return j
    raise ArithmeticError("class exponents not found")
