"""Quadratic fields K = Q(sqrt d): exact arithmetic in O_K = Z[eta], embeddings, units.

Elements of O_K are pairs (x, y) meaning x + y*eta, where eta = sqrt(d) when
d = 2, 3 (mod 4) and eta = (1 + sqrt(d))/2 when d = 1 (mod 4). In both cases
eta^2 = t*eta + n with (t, n) = (0, d) or (1, (d - 1)/4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from .errors import RejectedInput, UnsupportedSignature
from .intmath import is_squarefree

DEFAULT_PRECISION = 192
UNIT_SCAN_LIMIT = 10**5


@dataclass(frozen=True)
class FieldDescriptor:
    d: int
    eta_kind: str  # "sqrt" or "half"
    discriminant: int
    signature: str  # "imaginary" or "real"
    w: int | None = None
    unit_xy: tuple[int, int] | None = None

    @property
    def t(self) -> int:
        return 1 if self.eta_kind == "half" else 0

    @property
    def n(self) -> int:
        return (self.d - 1) // 4 if self.eta_kind == "half" else self.d

    @property
    def is_real(self) -> bool:
        return self.signature == "real"

    def elem(self, x: int, y: int = 0) -> "AlgebraicInt":
        return AlgebraicInt(x, y, self)

    @property
    def fundamental_unit(self) -> "AlgebraicInt":
        if not self.is_real:
            raise UnsupportedSignature("imaginary fields have no fundamental unit")
        return AlgebraicInt(*self.unit_xy, self)

    @property
    def log_eps(self):
        return self.log_eps_at(DEFAULT_PRECISION)

    def log_eps_at(self, prec: int):
        with mpmath.workprec(prec + 10):
            v = mpmath.log(embed(self.fundamental_unit, prec + 10).v1)
        with mpmath.workprec(prec):
            return +v

    @property
    def eps_float(self) -> float:
        return float(embed(self.fundamental_unit, 64).v1)

    @property
    def im_eta(self):
        return self.im_eta_at(DEFAULT_PRECISION)

    def im_eta_at(self, prec: int):
        if self.is_real:
            raise UnsupportedSignature("im_eta is defined for imaginary fields")
        with mpmath.workprec(prec):
            r = mpmath.sqrt(-self.d)
            return r / 2 if self.eta_kind == "half" else r

    def eta_label(self) -> str:
        return f"(1+sqrt({self.d}))/2" if self.eta_kind == "half" else f"sqrt({self.d})"

    def describe(self) -> dict:
        out = {
            "d": self.d,
            "eta": self.eta_label(),
            "discriminant": self.discriminant,
            "signature": self.signature,
            "w": self.w or 2,
        }
        if self.is_real:
            out["fundamental_unit"] = str(self.fundamental_unit)
            out["log_eps"] = float(self.log_eps)
        else:
            out["im_eta"] = float(self.im_eta)
        return out

    def __repr__(self):
        return f"Q(sqrt({self.d}))"


@dataclass(frozen=True)
class AlgebraicInt:
    x: int
    y: int
    field: FieldDescriptor = field(repr=False)

    def _coerce(self, other):
        if isinstance(other, AlgebraicInt):
            return other
        if isinstance(other, int):
            return AlgebraicInt(other, 0, self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicInt(self.x + o.x, self.y + o.y, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicInt(self.x - o.x, self.y - o.y, self.field)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AlgebraicInt(-self.x, -self.y, self.field)

    def __mul__(self, other):
        if isinstance(other, int):
            return AlgebraicInt(self.x * other, self.y * other, self.field)
        if not isinstance(other, AlgebraicInt):
            return NotImplemented
        F = self.field
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        yy = y1 * y2
        return AlgebraicInt(x1 * x2 + F.n * yy, x1 * y2 + x2 * y1 + F.t * yy, F)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of an algebraic integer")
        out, base = AlgebraicInt(1, 0, self.field), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conj(self) -> "AlgebraicInt":
        return AlgebraicInt(self.x + self.field.t * self.y, -self.y, self.field)

    def norm(self) -> int:
        """Signed field norm N_{K/Q}."""
        F = self.field
        return self.x * self.x + F.t * self.x * self.y - F.n * self.y * self.y

    def trace(self) -> int:
        return 2 * self.x + self.field.t * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def divexact(self, other: "AlgebraicInt") -> "AlgebraicInt | None":
        """self / other if it lies in O_K, else None."""
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero element")
        num = self * other.conj()
        if num.x % n or num.y % n:
            return None
        return AlgebraicInt(num.x // n, num.y // n, self.field)

    def __str__(self):
        return f"{self.x}{'+' if self.y >= 0 else '-'}{abs(self.y)}*eta"

    def __repr__(self):
        return f"AlgebraicInt({self.x}, {self.y}, {self.field!r})"


@dataclass(frozen=True)
class FieldElement:
    num: AlgebraicInt
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise RejectedInput("denominator must be positive")
        g = math.gcd(math.gcd(self.num.x, self.num.y), self.den)
        if g > 1:
            object.__setattr__(self, "num", AlgebraicInt(self.num.x // g, self.num.y // g, self.num.field))
            object.__setattr__(self, "den", self.den // g)

    @property
    def field(self):
        return self.num.field

    @staticmethod
    def of(a) -> "FieldElement":
        if isinstance(a, FieldElement):
            return a
        return FieldElement(a, 1)

    def __add__(self, other):
        o = FieldElement.of(other)
        return FieldElement(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, other):
        o = FieldElement.of(other)
        return FieldElement(self.num * o.den - o.num * self.den, self.den * o.den)

    def __neg__(self):
        return FieldElement(-self.num, self.den)

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldElement(self.num * other, self.den)
        o = FieldElement.of(other)
        return FieldElement(self.num * o.num, self.den * o.den)

    def inverse(self) -> "FieldElement":
        n = self.num.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        num = self.num.conj() * self.den
        if n < 0:
            num, n = -num, -n
        return FieldElement(num, n)

    def __truediv__(self, other):
        return self * FieldElement.of(other).inverse()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_integral(self) -> bool:
        return self.den == 1

    def norm(self):
        from fractions import Fraction
        return Fraction(self.num.norm(), self.den * self.den)

    def __str__(self):
        return str(self.num) if self.den == 1 else f"({self.num})/{self.den}"


@dataclass(frozen=True)
class EmbeddingValue:
    v1: mpmath.mpf
    v2: mpmath.mpf
    precision_bits: int


def _eta_values(F: FieldDescriptor):
    """(eta1, eta2) real embeddings, or (Re eta, Im eta), at the current mp precision."""
    r = mpmath.sqrt(abs(F.d))
    if F.is_real:
        if F.eta_kind == "half":
            return (1 + r) / 2, (1 - r) / 2
        return r, -r
    if F.eta_kind == "half":
        return mpmath.mpf(1) / 2, r / 2
    return mpmath.mpf(0), r


def embed(a, precision_bits: int = DEFAULT_PRECISION) -> EmbeddingValue:
    """sigma_1, sigma_2 images (real) or (Re, Im) of the complex embedding."""
    fe = FieldElement.of(a)
    F = fe.field
    with mpmath.workprec(precision_bits + 24):
        e1, e2 = _eta_values(F)
        x, y, den = fe.num.x, fe.num.y, fe.den
        if F.is_real:
            v1, v2 = (x + y * e1) / den, (x + y * e2) / den
        else:
            v1, v2 = (x + y * e1) / den, (y * e2) / den
    with mpmath.workprec(precision_bits):
        return EmbeddingValue(+v1, +v2, precision_bits)


def embed_interval(a, precision_bits: int = DEFAULT_PRECISION):
    """Rigorous interval enclosures of the two embedding components."""
    fe = FieldElement.of(a)
    F = fe.field
    iv = mpmath.iv
    old = iv.prec
    iv.prec = precision_bits
    try:
        r = iv.sqrt(abs(F.d))
        x, y, den = iv.mpf(fe.num.x), iv.mpf(fe.num.y), iv.mpf(fe.den)
        if F.is_real:
            if F.eta_kind == "half":
                e1, e2 = (1 + r) / 2, (1 - r) / 2
            else:
                e1, e2 = r, -r
            return (x + y * e1) / den, (x + y * e2) / den
        if F.eta_kind == "half":
            return (x + y / 2) / den, (y * r / 2) / den
        return x / den, (y * r) / den
    finally:
        iv.prec = old


def embed_float(a) -> tuple[float, float]:
    e = embed(a, 64)
    return float(e.v1), float(e.v2)


def norm_abs(a: AlgebraicInt) -> int:
    return abs(a.norm())


# --- exact sign of real embeddings -------------------------------------------

def _sign_a_plus_b_sqrt(A: int, B: int, d: int) -> int:
    """Sign of A + B*sqrt(d) for d > 0."""
    if A >= 0 and B >= 0:
        return 1 if (A or B) else 0
    if A <= 0 and B <= 0:
        return -1
    lhs, rhs = A * A, B * B * d
    if A > 0:
        return (lhs > rhs) - (lhs < rhs)
    return (rhs > lhs) - (rhs < lhs)


def sigma_sign(a: AlgebraicInt, i: int) -> int:
    """Exact sign of sigma_i(a), i in {1, 2}, for a real field."""
    F = a.field
    s = 1 if i == 1 else -1
    if F.eta_kind == "half":
        return _sign_a_plus_b_sqrt(2 * a.x + a.y, s * a.y, F.d)
    return _sign_a_plus_b_sqrt(a.x, s * a.y, F.d)


def in_unit_window(a: AlgebraicInt) -> bool:
    """Exact test of eps^-1 |s1(a)| < |s2(a)| <= eps |s1(a)|."""
    if a.is_zero():
        return False
    eps = a.field.fundamental_unit
    ab = a.conj()
    upper = sigma_sign(eps * a * (eps * a) - ab * ab, 1) >= 0
    lower = sigma_sign(eps * ab * (eps * ab) - a * a, 1) > 0
    return upper and lower


# --- fundamental unit --------------------------------------------------------

def _unit_by_scan(d: int, half: bool, limit: int):
    """Smallest y > 0 giving a unit; returns (x, y) in the eta basis or None."""
    if half:
        for v in range(1, limit + 1):
            for s in (-4, 4):
                u2 = d * v * v + s
                u = math.isqrt(u2) if u2 >= 0 else -1
                if u >= 0 and u * u == u2 and (u - v) % 2 == 0:
                    return (u - v) // 2, v
        return None
    for y in range(1, limit + 1):
        for s in (-1, 1):
            x2 = d * y * y + s
            x = math.isqrt(x2) if x2 >= 0 else -1
            if x >= 0 and x * x == x2:
                return x, y
    return None


def _unit_by_cf(d: int, half: bool):
    """First convergent p/q of eta with N(p - q*eta) = +-1 gives eps = |conj(p - q*eta)|."""
    t, n = (1, (d - 1) // 4) if half else (0, d)
    P, Q = (1, 2) if half else (0, 1)
    r = math.isqrt(d)
    p0, p1, q0, q1 = 1, 0, 0, 1
    while True:
        a = (P + r) // Q
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        x, y = p0, -q0
        if abs(x * x + t * x * y - n * y * y) == 1:
            # conj(x + y eta) = (x + t y) - y eta; make it > 1
            ux, uy = x + t * y, -y
            if uy < 0:
                ux, uy = -ux, -uy
            return ux, uy
        P = a * Q - P
        Q = (d - P * P) // Q


def fundamental_unit_coords(d: int, half: bool) -> tuple[int, int]:
    found = _unit_by_scan(d, half, UNIT_SCAN_LIMIT)
    if found is None:
        found = _unit_by_cf(d, half)
    return found


@lru_cache(maxsize=None)
def make_field(d: int) -> FieldDescriptor:
    if not isinstance(d, int) or d in (0, 1) or not is_squarefree(d):
        raise RejectedInput(f"d = {d} is not a squarefree integer other than 0, 1")
    half = d % 4 == 1
    disc = d if half else 4 * d
    if d < 0:
        w = 4 if d == -1 else 6 if d == -3 else 2
        return FieldDescriptor(d, "half" if half else "sqrt", disc, "imaginary", w, None)
    unit = fundamental_unit_coords(d, half)
    return FieldDescriptor(d, "half" if half else "sqrt", disc, "real", None, unit)


def fundamental_unit(F: FieldDescriptor) -> AlgebraicInt:
    return F.fundamental_unit


def unit_power(F: FieldDescriptor, m: int) -> AlgebraicInt:
    """eps^m for any integer m (eps^-1 = N(eps) * conj(eps))."""
    eps = F.fundamental_unit
    if m < 0:
        eps = eps.conj() * eps.norm()
        m = -m
    return eps**m


def canonical_generator(a0: AlgebraicInt, F: FieldDescriptor | None = None) -> AlgebraicInt:
    """The generator of (a0) in the unit window with sigma_1 > 0 (real fields)."""
    F = F or a0.field
    if not F.is_real:
        raise UnsupportedSignature("canonical_generator needs a real field")
    if a0.is_zero():
        raise RejectedInput("zero has no canonical generator")
    e = embed(a0, 64 + 8 * len(str(abs(a0.x) + abs(a0.y))))
    with mpmath.workprec(e.precision_bits):
        nu = (mpmath.log(abs(e.v2)) - mpmath.log(abs(e.v1))) / (2 * F.log_eps_at(e.precision_bits))
        m0 = int(mpmath.ceil(nu - mpmath.mpf(1) / 2))
    for m in (m0, m0 - 1, m0 + 1):
        a = unit_power(F, m) * a0
        if in_unit_window(a):
            return a if sigma_sign(a, 1) > 0 else -a
    raise ArithmeticError("window search failed")  # unreachable for exact arithmetic


def associate_canonical(a: AlgebraicInt) -> AlgebraicInt:
    """Imaginary fields: the associate with argument in [0, 2pi/w)."""
    F = a.field
    if a.is_zero():
        raise RejectedInput("zero has no canonical associate")
    units = imaginary_units(F)
    for u in units:
        b = u * a
        if F.w == 2:
            if b.y > 0 or (b.y == 0 and b.x > 0):
                return b
        elif b.y >= 0 and b.x > 0:
            return b
    raise ArithmeticError("no canonical associate")


@lru_cache(maxsize=None)
def imaginary_units(F: FieldDescriptor) -> tuple:
    """All units xi^j, j = 0..w-1, for xi = exp(2 pi i / w)."""
    if F.w == 2:
        return (AlgebraicInt(1, 0, F), AlgebraicInt(-1, 0, F))
    xi = AlgebraicInt(0, 1, F)  # i, or (1+sqrt(-3))/2 = exp(i pi/3)
    out, cur = [], AlgebraicInt(1, 0, F)
    for _ in range(F.w):
        out.append(cur)
        cur = cur * xi
    return tuple(out)


def lattice_distance(z: EmbeddingValue, F: FieldDescriptor):
    """min |z - a| over a in O_K for a complex point z = v1 + i v2."""
    if F.is_real:
        raise UnsupportedSignature("lattice distance is for imaginary fields")
    with mpmath.workprec(z.precision_bits + 16):
        re_eta, im_eta = _eta_values(F)
        v = z.v2 / im_eta
        u = z.v1 - v * re_eta
        best = None
        for m in (int(mpmath.floor(u)), int(mpmath.floor(u)) + 1):
            for k in (int(mpmath.floor(v)), int(mpmath.floor(v)) + 1):
                dist = mpmath.hypot(z.v1 - m - k * re_eta, z.v2 - k * im_eta)
                if best is None or dist < best:
                    best = dist
    with mpmath.workprec(z.precision_bits):
        return +best
