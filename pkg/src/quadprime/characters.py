"""Residue unit groups, Dirichlet characters and Hecke characters of quadratic fields.

Finite-order values are kept as exact turns (Fractions mod 1, value e(t) =
exp(2 pi i t)); archimedean factors are evaluated with mpmath.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .abelian import decompose
from .errors import CapacityError, RejectedInput
from .field_core import (
    DEFAULT_PRECISION,
    AlgebraicInt,
    FieldDescriptor,
    FieldElement,
    embed,
    sigma_sign,
)
from .ideal_arith import (
    ClassGroup,
    FracIdeal,
    IdealHNF,
    class_group,
    decompose_in_class_group,
    divides,
    divisors,
    element_valuation,
    factor_ideal,
    ideal_gcd,
    ideal_div,
    ideal_pow,
    principal,
    principal_generator_any,
    unit_ideal,
)

RESIDUE_CAPACITY = 10**5


def _turn(q) -> Fraction:
    q = Fraction(q)
    return q - math.floor(q)


def e_turn(t, prec: int = DEFAULT_PRECISION):
    with mpmath.workprec(prec):
        return mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator)


# --- residue ring -----------------------------------------------------------

class ResidueUnitGroup:
    """(O_K / f)^* with a basis of cyclic factors and a full discrete-log table.

    Residues are encoded as integers key = x + a*y for the reduced
    representative x + y*eta (0 <= x < a, 0 <= y < c) of the HNF (a, b, c).
    """

    def __init__(self, f: IdealHNF):
        if f.norm > RESIDUE_CAPACITY:
            raise CapacityError(f"residue ring of size {f.norm} exceeds {RESIDUE_CAPACITY}")
        self.modulus = f
        self.field = f.field
        self.primes = [P for P, _ in factor_ideal(f)]
        a, c = f.a, f.c
        units = []
        for y in range(c):
            for x in range(a):
                z = AlgebraicInt(x, y, self.field)
                if not any(P.ideal.contains(z) for P in self.primes):
                    units.append(x + a * y)
        self._units = units
        basis, orders, dlog = decompose(units, self._mul, self.key(AlgebraicInt(1, 0, self.field)))
        self.generator_keys = basis
        self.generators = [self.element(k) for k in basis]
        self.orders = orders
        self.dlog_table = dlog

    @property
    def order(self) -> int:
        return len(self._units)

    def key(self, z: AlgebraicInt) -> int:
        x, y = self.modulus.reduce(z.x, z.y)
        return x + self.modulus.a * y

    def element(self, k: int) -> AlgebraicInt:
        return AlgebraicInt(k % self.modulus.a, k // self.modulus.a, self.field)

    def _mul(self, k1: int, k2: int) -> int:
        return self.key(self.element(k1) * self.element(k2))

    def units(self):
        return [self.element(k) for k in self._units]

    def dlog(self, z: AlgebraicInt) -> tuple | None:
        return self.dlog_table.get(self.key(z))

    def keys_array(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized residue keys for coordinate arrays."""
        f = self.modulus
        t = ys // f.c
        xr = (xs - t * f.b) % f.a
        return xr + f.a * (ys - t * f.c)


@lru_cache(maxsize=256)
def residue_unit_group(f: IdealHNF) -> ResidueUnitGroup:
    return ResidueUnitGroup(f)


def mult_congruent(x, y, f: IdealHNF) -> bool:
    """x == y multiplicatively mod f: v_P(x - y) >= v_P(f) for every P | f."""
    x, y = FieldElement.of(x), FieldElement.of(y)
    diff = x - y
    if diff.is_zero():
        return True  # v_P((0)) = +inf
    return all(element_valuation(diff, P) >= e for P, e in factor_ideal(f))


# --- Dirichlet characters ---------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    group: ResidueUnitGroup = field(compare=False, repr=False)
    exponents: tuple

    @property
    def modulus(self) -> IdealHNF:
        return self.group.modulus

    @property
    def field(self):
        return self.group.field

    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def turn_of_vector(self, vec) -> Fraction:
        return _turn(sum(Fraction(e * v, o) for e, v, o in zip(self.exponents, vec, self.group.orders)))

    def turn(self, z: AlgebraicInt) -> Fraction | None:
        """Exact turn of chi at an integral element, None if not a unit mod f."""
        vec = self.group.dlog(z)
        return None if vec is None else self.turn_of_vector(vec)

    def turn_at(self, x) -> Fraction | None:
        """Turn of the extension to K: None off K(f)."""
        x = FieldElement.of(x)
        if x.is_zero():
            return None
        if x.den == 1:
            return self.turn(x.num)
        if any(element_valuation(x, P) != 0 for P in self.group.primes):
            return None
        s = _clearing_multiplier(x, self.group)
        n = (x * s).num  # integral and coprime to f
        return _turn(self.turn(n) - self.turn(s))

    def order(self) -> int:
        return math.lcm(*(o // math.gcd(o, e) for e, o in zip(self.exponents, self.group.orders))) if self.exponents else 1

    def table(self) -> tuple[np.ndarray, int]:
        """(numerators mod M, M) indexed by residue key; -1 marks non-units."""
        M = math.lcm(*self.group.orders) if self.group.orders else 1
        arr = np.full(self.modulus.norm, -1, dtype=np.int64)
        for k, vec in self.group.dlog_table.items():
            t = self.turn_of_vector(vec)
            arr[k] = t.numerator * (M // t.denominator)
        return arr, M


def _clearing_multiplier(x: FieldElement, G: ResidueUnitGroup) -> AlgebraicInt:
    """s in O_K coprime to f with s*x integral."""
    F = x.field
    if not any(P.ideal.contains(AlgebraicInt(x.den, 0, F)) for P in G.primes):
        return AlgebraicInt(x.den, 0, F)
    J = ideal_div(principal(AlgebraicInt(x.den, 0, F)), ideal_gcd(principal(x.num), principal(AlgebraicInt(x.den, 0, F))))
    # J is coprime to f because v_P(x) = 0; a small element of J avoiding every P | f exists by CRT
    r = 1
    while True:
        for i in range(-r, r + 1):
            for j in range(-r, r + 1):
                if max(abs(i), abs(j)) != r:
                    continue
                s = AlgebraicInt(i * J.a + j * J.b, j * J.c, F)
                if not s.is_zero() and not any(P.ideal.contains(s) for P in G.primes):
                    return s
        r += 1


def dirichlet_eval(chi: DirichletCharacter, x, prec: int = DEFAULT_PRECISION):
    t = chi.turn_at(x)
    if t is None:
        return mpmath.mpc(0)
    return e_turn(t, prec)


def characters_mod(f: IdealHNF) -> list[DirichletCharacter]:
    G = residue_unit_group(f)
    return [DirichletCharacter(G, tuple(e)) for e in itertools.product(*(range(o) for o in G.orders))]


def character_from_turns(G: ResidueUnitGroup, turns) -> DirichletCharacter:
    """Character with prescribed turns on the group's generators."""
    exps = []
    for t, o in zip(turns, G.orders):
        e = _turn(t) * o
        if e.denominator != 1:
            raise RejectedInput("turn incompatible with generator order")
        exps.append(int(e))
    return DirichletCharacter(G, tuple(exps))


def inflate(chi: DirichletCharacter, f_big: IdealHNF) -> DirichletCharacter:
    """The character mod f_big (a multiple of the modulus) induced by chi."""
    if not divides(chi.modulus, f_big):
        raise RejectedInput("target modulus is not a multiple")
    G = residue_unit_group(f_big)
    return character_from_turns(G, [chi.turn(g) for g in G.generators])


def conductor(chi: DirichletCharacter) -> IdealHNF:
    G = chi.group
    one = AlgebraicInt(1, 0, chi.field)
    units = G.units()
    for d in divisors(chi.modulus):
        if all(chi.turn(u) == 0 for u in units if d.contains(u - one)):
            return d
    return chi.modulus


# --- infinity types ---------------------------------------------------------

@dataclass(frozen=True)
class InfinityType:
    signature: str
    u: int = 0  # imaginary
    u1: int = 0  # real
    u2: int = 0
    n: int = 0
    gamma: Fraction = Fraction(0)

    def v(self, F: FieldDescriptor, prec: int = DEFAULT_PRECISION):
        """pi (n + gamma) / log eps; zero in the imaginary case."""
        if self.signature != "real":
            return mpmath.mpf(0)
        with mpmath.workprec(prec + 16):
            g = mpmath.mpf(self.gamma.numerator) / self.gamma.denominator
            return mpmath.pi * (self.n + g) / F.log_eps_at(prec + 16)

    def v_float(self, F: FieldDescriptor) -> float:
        if self.signature != "real":
            return 0.0
        return math.pi * (self.n + float(self.gamma)) / float(F.log_eps)


def _unit_generator_imag(F: FieldDescriptor) -> AlgebraicInt:
    return AlgebraicInt(-1, 0, F) if F.w == 2 else AlgebraicInt(0, 1, F)


def infinity_type_for(chi: DirichletCharacter, F: FieldDescriptor | None = None, n: int = 0) -> InfinityType:
    F = F or chi.field
    if not F.is_real:
        t = chi.turn(_unit_generator_imag(F))
        # chi(xi) = e(t) = xi^(-k) with xi = e(1/w)
        k = int(-t * F.w) % F.w
        return InfinityType("imaginary", u=k + F.w * n)
    theta = chi.turn(F.fundamental_unit)
    if theta > Fraction(1, 2):
        theta -= 1
    u1 = 0 if chi.turn(AlgebraicInt(-1, 0, F)) == 0 else 1
    return InfinityType("real", u1=u1, u2=0, n=n, gamma=-theta)


def chi_infinity(inf: InfinityType, a, F: FieldDescriptor, prec: int = DEFAULT_PRECISION):
    """The archimedean factor at a nonzero element."""
    a = FieldElement.of(a)
    num = a.num
    with mpmath.workprec(prec + 16):
        ev = embed(num, prec + 16)
        if inf.signature == "imaginary":
            if inf.u == 0:
                out = mpmath.mpc(1)
            else:
                out = mpmath.expj(inf.u * mpmath.atan2(ev.v2, ev.v1))
        else:
            s = 1
            if inf.u1 and sigma_sign(num, 1) < 0:
                s = -s
            if inf.u2 and sigma_sign(num, 2) < 0:
                s = -s
            lr = mpmath.log(abs(ev.v1)) - mpmath.log(abs(ev.v2))
            out = s * mpmath.expj(inf.v(F, prec) * lr)
    with mpmath.workprec(prec):
        return +out


# --- Hecke characters -------------------------------------------------------

@dataclass(frozen=True)
class HeckeCharacter:
    chi: DirichletCharacter
    infinity: InfinityType
    class_turns: tuple = ()  # psi on the designated generators, as turns
    cg: ClassGroup | None = field(default=None, compare=False, repr=False)
    roots: tuple = field(default=(), compare=False, repr=False)  # fixed m_l-th roots
    root_gens: tuple = field(default=(), compare=False, repr=False)  # generators of a_l^m_l

    @property
    def field(self):
        return self.chi.field

    @property
    def modulus(self):
        return self.chi.modulus

    def is_principal(self) -> bool:
        return (
            self.chi.is_principal()
            and self.infinity.u == 0
            and self.infinity.n == 0
            and self.infinity.gamma == 0
            and self.infinity.u1 == 0
            and all(t == 0 for t in self.class_turns)
        )

    def principal_value(self, alpha, prec: int = DEFAULT_PRECISION):
        """chi(alpha) chi_inf(alpha); zero off K(f)."""
        t = self.chi.turn_at(alpha)
        if t is None:
            return mpmath.mpc(0)
        with mpmath.workprec(prec + 16):
            out = e_turn(t, prec + 16) * chi_infinity(self.infinity, alpha, self.field, prec + 16)
        with mpmath.workprec(prec):
            return +out

    def __call__(self, x, prec: int = DEFAULT_PRECISION):
        return hecke_eval(self, x, prec)


def make_hecke(chi: DirichletCharacter, class_turns=None, n: int = 0, prec: int = DEFAULT_PRECISION) -> HeckeCharacter:
    """Hecke character belonging to chi; class_turns selects the class-group extension."""
    F = chi.field
    inf = infinity_type_for(chi, F, n)
    cg = class_group(F, chi.modulus if chi.modulus.norm > 1 else None)
    if cg.order == 1:
        return HeckeCharacter(chi, inf, (), cg)
    turns = tuple(_turn(t) for t in (class_turns or [0] * len(cg.structure)))
    if len(turns) != len(cg.structure) or any((t * m).denominator != 1 for t, m in zip(turns, cg.structure)):
        raise RejectedInput("class character turns must match the class group structure")
    base = HeckeCharacter(chi, inf, turns, cg)
    roots, gens = [], []
    for g, m in zip(cg.generators, cg.structure):
        alpha = principal_generator_any(ideal_pow(g, m))
        z = base.principal_value(alpha, prec + 32)
        with mpmath.workprec(prec + 32):
            arg = mpmath.arg(z)
            if arg < 0:
                arg += 2 * mpmath.pi
            roots.append(mpmath.expj(arg / m))
        gens.append(alpha)
    return HeckeCharacter(chi, inf, turns, cg, tuple(roots), tuple(gens))


def class_group_character(F: FieldDescriptor, turns) -> HeckeCharacter:
    """A character of the class group as a Hecke character mod (1)."""
    chi = characters_mod(unit_ideal(F))[0]
    return make_hecke(chi, turns)


def hecke_eval(h: HeckeCharacter, x, prec: int = DEFAULT_PRECISION):
    if isinstance(x, (AlgebraicInt, FieldElement)):
        x = FracIdeal.of(x)
    x = FracIdeal.of(x)
    F = h.field
    for P in h.chi.group.primes:
        if not _coprime_at(x, P):
            return mpmath.mpc(0)
    if h.cg is None or h.cg.order == 1:
        alpha = principal_generator_any(x.num)
        if alpha is None:
            raise ArithmeticError("ideal expected to be principal")
        alpha = alpha * FieldElement(AlgebraicInt(1, 0, F), x.den)
        return h.principal_value(alpha, prec)
    j, alpha = decompose_in_class_group(x, h.cg)
    with mpmath.workprec(prec + 16):
        out = h.principal_value(alpha, prec + 16)
        t = _turn(sum(Fraction(jl) * tl for jl, tl in zip(j, h.class_turns)))
        out *= e_turn(t, prec + 16)
        for jl, r in zip(j, h.roots):
            out *= r**jl
    with mpmath.workprec(prec):
        return +out


def _coprime_at(x: FracIdeal, P) -> bool:
    from .ideal_arith import valuation
    vd = valuation(principal(AlgebraicInt(x.den, 0, x.field)), P) if x.den > 1 else 0
    return valuation(x.num, P) == vd


def enumerate_characters(f: IdealHNF, F: FieldDescriptor | None = None, class_extensions: bool = False, n: int = 0):
    """All Hecke characters belonging to Dirichlet characters mod f.

    With class_extensions, every one of the h_K extensions is produced.
    """
    F = F or f.field
    for chi in characters_mod(f):
        if not class_extensions:
            yield make_hecke(chi, n=n)
            continue
        cg = class_group(F, f if f.norm > 1 else None)
        for c in itertools.product(*(range(m) for m in cg.structure)):
            yield make_hecke(chi, [Fraction(cl, m) for cl, m in zip(c, cg.structure)], n=n)


# --- vectorized values on prime tables --------------------------------------

def prime_values(h: HeckeCharacter, tab) -> np.ndarray:
    """Complex values of h on every prime ideal of a PrimeTable (zero off I(f))."""
    from .ideal_arith import attach_generators, ideal_conj, ideal_mul, generator_params
    from . import kernels

    F = h.field
    m = len(tab)
    out = np.zeros(m, dtype=np.complex128)
    if m == 0:
        return out
    if tab.gx is None:
        attach_generators(tab)
    f = h.modulus
    coprime = np.ones(m, dtype=bool)
    for P in h.chi.group.primes:
        coprime &= ~((tab.a == P.ideal.a) & (tab.b == P.ideal.b) & (tab.c == P.ideal.c))
    gx, gy = tab.gx.copy(), tab.gy.copy()
    cls = np.full(m, -1, dtype=np.int64)
    cls[tab.principal] = 0
    classes = [()]
    extra_norm = [1]
    if h.cg is not None and h.cg.order > 1:
        classes = list(itertools.product(*(range(mm) for mm in h.cg.structure)))
        real, w, e1, e2, le, eps = generator_params(F)
        for ci, j in enumerate(classes):
            if ci == 0:
                extra_norm = [1]
                continue
            B = unit_ideal(F)
            for g, jl in zip(h.cg.generators, j):
                B = ideal_mul(B, ideal_pow(ideal_conj(g), jl))
            extra_norm.append(B.norm)
            idx = np.flatnonzero(cls < 0)
            if len(idx) == 0:
                continue
            prods = [ideal_mul(IdealHNF(int(tab.a[i]), int(tab.b[i]), int(tab.c[i]), F), B) for i in idx]
            pa = np.array([p.a for p in prods], dtype=np.int64)
            pb = np.array([p.b for p in prods], dtype=np.int64)
            pc = np.array([p.c for p in prods], dtype=np.int64)
            bx, by, st = kernels.generators(pa, pb, pc, F.t, F.n, real, w, e1, e2, le, eps)
            hit = st > 0
            gx[idx[hit]] = bx[hit]
            gy[idx[hit]] = by[hit]
            cls[idx[hit]] = ci
    if np.any(cls < 0):
        raise ArithmeticError("class of a prime ideal not found")
    # finite part: exact numerators mod M on generator residues
    table, M = h.chi.table()
    G = h.chi.group
    keys = G.keys_array(gx, gy)
    num = table[keys]
    good = coprime & (num >= 0)
    turns = num.astype(np.float64) / M
    # class part and correction for the rational scale N_j
    for ci, j in enumerate(classes):
        if ci == 0:
            continue
        sel = cls == ci
        t = _turn(sum(Fraction(jl) * tl for jl, tl in zip(j, h.class_turns)))
        tn = h.chi.turn(AlgebraicInt(extra_norm[ci], 0, F))
        if tn is None:
            raise ArithmeticError("class representative not coprime to the modulus")
        turns[sel] += float(_turn(t - tn))
    vals = np.exp(2j * np.pi * turns)
    for ci, j in enumerate(classes):
        if ci == 0:
            continue
        r = complex(1)
        for jl, root in zip(j, h.roots):
            r *= complex(root) ** jl
        vals[cls == ci] *= r
    vals *= infinity_values(h.infinity, F, gx, gy)
    out[good] = vals[good]
    return out


def infinity_values(inf: InfinityType, F: FieldDescriptor, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    x = gx.astype(np.float64)
    y = gy.astype(np.float64)
    if inf.signature == "imaginary":
        if inf.u == 0:
            return np.ones(len(gx), dtype=np.complex128)
        re = x + y * (F.t / 2.0)
        im = y * float(F.im_eta)
        return np.exp(1j * inf.u * np.arctan2(im, re))
    r = math.sqrt(F.d)
    e1, e2 = ((1 + r) / 2, (1 - r) / 2) if F.eta_kind == "half" else (r, -r)
    s1 = x + y * e1
    s2 = x + y * e2
    sign = np.ones(len(gx))
    if inf.u1:
        sign *= np.sign(s1)
    if inf.u2:
        sign *= np.sign(s2)
    v = inf.v_float(F)
    return sign * np.exp(1j * v * (np.log(np.abs(s1)) - np.log(np.abs(s2))))


def rational_prime_values(h: HeckeCharacter, X: int, tab=None):
    """(primes, kinds, s1, s2) for all rational p <= X, as consumed by ideal_coefficients."""
    from .ideal_arith import prime_table, rational_primes, primes_above
    from . import kernels

    F = h.field
    if tab is None:
        tab = prime_table(F, 1, X, with_generators=True)
    vals = prime_values(h, tab)
    pr = rational_primes(X)
    pos = {int(p): i for i, p in enumerate(pr.tolist())}
    kinds = np.full(len(pr), kernels.INERT, dtype=np.int8)
    s1 = np.zeros(len(pr), dtype=np.complex128)
    s2 = np.zeros(len(pr), dtype=np.complex128)
    seen = np.zeros(len(pr), dtype=np.int8)
    for i in range(len(tab)):
        j = pos[int(tab.p[i])]
        kinds[j] = int(tab.kind[i])
        if seen[j] == 0:
            s1[j] = vals[i]
        else:
            s2[j] = vals[i]
        seen[j] += 1
    for j in np.flatnonzero(seen == 0):
        p = int(pr[j])
        kinds[j] = kernels.INERT  # only inert primes have norm p^2 > X
    return pr, kinds, s1, s2


def exact_turn_sum_is_zero(turns) -> bool:
    """Decide sum_j e(t_j) == 0 exactly for rational turns t_j.

    Works in Z[x]/Phi_M(x): the sum vanishes iff the polynomial sum x^(M t_j)
    is divisible by the M-th cyclotomic polynomial.
    """
    turns = [_turn(t) for t in turns]
    if not turns:
        return True
    M = math.lcm(*(t.denominator for t in turns))
    coeffs = [0] * M
    for t in turns:
        coeffs[int(t * M)] += 1
    return _mod_cyclotomic(coeffs, M) == [0] * len(_mod_cyclotomic([0] * M, M))


@lru_cache(maxsize=None)
def cyclotomic(M: int) -> tuple:
    """Integer coefficients (low degree first) of Phi_M."""
    # x^M - 1 = prod_{d | M} Phi_d
    num = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            num = _poly_div_exact(num, list(cyclotomic(d)))
    return tuple(num)


def _poly_div_exact(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = a[i + len(b) - 1] // b[-1]
        out[i] = q
        for j, bj in enumerate(b):
            a[i + j] -= q * bj
    assert all(v == 0 for v in a[: len(b) - 1])
    return out


def _mod_cyclotomic(coeffs, M):
    phi = cyclotomic(M)
    deg = len(phi) - 1
    a = list(coeffs) + [0] * max(0, deg - len(coeffs))
    for i in range(len(a) - 1, deg - 1, -1):
        q = a[i]  # Phi is monic
        if q:
            for j, pj in enumerate(phi):
                a[i - deg + j] -= q * pj
    return a[:deg]
