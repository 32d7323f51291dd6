"""Finite-X checks of the analytic estimates: prime ideal counts, Hecke sums over
primes and ideals, Fourier coefficients of e(theta Z), and Z(p) spacing."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import kernels
from .characters import HeckeCharacter, prime_values, rational_prime_values
from .errors import RejectedInput
from .field_core import FieldDescriptor
from .ideal_arith import prime_table

PRIME_SUM_CONSTANT = 3.0
FOURIER_CONSTANT = 10.0


@dataclass
class SeriesReport:
    grid: list
    values: list  # complex partial sums
    reference: list
    envelope: list
    ratio: list  # |value - main term| / envelope
    fitted_exponent: float | None
    fit_residual: float | None
    label: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def sup_ratio(self) -> float:
        return max(self.ratio) if self.ratio else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["X", "re", "im", "reference", "ratio"])
        for X, v, r, q in zip(self.grid, self.values, self.reference, self.ratio):
            w.writerow([X, _g(v.real), _g(v.imag), _g(r), _g(q)])
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "grid": list(self.grid),
            "re": [v.real for v in self.values],
            "im": [v.imag for v in self.values],
            "reference": list(self.reference),
            "envelope": list(self.envelope),
            "ratio": list(self.ratio),
            "sup_ratio": self.sup_ratio,
            "fitted_exponent": self.fitted_exponent,
            "fit_residual": self.fit_residual,
            **self.extras,
        }


def _g(x: float) -> str:
    return format(float(x), ".17g")


def default_grid(lo: int = 10**3, hi: int = 10**6) -> list[int]:
    """Geometric grid with ratio 2 from lo, closed off with hi."""
    out, x = [], int(lo)
    while x < hi:
        out.append(x)
        x *= 2
    if hi >= lo:
        out.append(int(hi))
    return out


def _check_grid(grid) -> list[int]:
    g = [int(x) for x in grid]
    if any(b <= a for a, b in zip(g, g[1:])):
        raise RejectedInput("grid must be strictly increasing")
    if g and g[0] < 1:
        raise RejectedInput("grid values must be positive")
    return g


def log_integral(X: float) -> float:
    """Li(X) = integral from 2 to X of dt / log t."""
    if X <= 2:
        return 0.0
    val, _ = integrate.quad(lambda t: 1.0 / math.log(t), 2.0, float(X), epsrel=1e-12, epsabs=0.0, limit=500)
    return val


def fit_loglog(grid, values):
    """OLS of log|value| against log X. Returns (slope, rms residual, zeros dropped)."""
    xs, ys, dropped = [], [], 0
    for X, v in zip(grid, values):
        a = abs(v)
        if a == 0:
            dropped += 1
            continue
        xs.append(math.log(X))
        ys.append(math.log(a))
    if len(xs) < 3:
        raise RejectedInput("exponent fit needs at least 3 nonzero values")
    A = np.vstack([np.asarray(xs), np.ones(len(xs))]).T
    coef, *_ = np.linalg.lstsq(A, np.asarray(ys), rcond=None)
    res = np.asarray(ys) - A @ coef
    return float(coef[0]), float(math.sqrt(float(np.mean(res**2)))), dropped


def exponent_fit(series: SeriesReport):
    """(slope, residual) of the log-log fit of |values| against X."""
    slope, resid, _ = fit_loglog(series.grid, series.values)
    return slope, resid


def _safe_fit(grid, values):
    try:
        slope, resid, dropped = fit_loglog(grid, values)
    except RejectedInput:
        return None, None, None
    return slope, resid, dropped


def prime_count_series(F: FieldDescriptor, grid, workers: int = 1) -> SeriesReport:
    grid = _check_grid(grid)
    if not grid:
        return SeriesReport([], [], [], [], [], None, None, "prime_count")
    tab = prime_table(F, 0, grid[-1], workers=workers)
    counts = np.searchsorted(tab.norm, np.asarray(grid), side="right")
    vals = [complex(int(c)) for c in counts]
    li = [log_integral(X) for X in grid]
    env = [math.sqrt(X) * math.log(X) if X > 1 else 1.0 for X in grid]
    diff = [v.real - r for v, r in zip(vals, li)]
    ratio = [abs(d) / e for d, e in zip(diff, env)]
    slope, resid, dropped = _safe_fit(grid, diff)
    rep = SeriesReport(grid, vals, li, env, ratio, slope, resid, "prime_count")
    rep.extras["fit_target"] = "count - Li"
    if dropped is not None:
        rep.extras["zeros_dropped"] = dropped
    return rep


def _char_table(h: HeckeCharacter, X: int, workers: int):
    return prime_table(h.field, 0, X, with_generators=True, workers=workers)


def prime_char_sum_series(h: HeckeCharacter, grid, workers: int = 1, tab=None) -> SeriesReport:
    """Partial sums of h over prime ideals, summed in ascending (norm, HNF) order."""
    grid = _check_grid(grid)
    if not grid:
        return SeriesReport([], [], [], [], [], None, None, "prime_char_sum")
    if tab is None:
        tab = _char_table(h, grid[-1], workers)
    vals = prime_values(h, tab)
    csum = np.cumsum(vals)
    pos = np.searchsorted(tab.norm, np.asarray(grid), side="right")
    sums = [complex(csum[i - 1]) if i > 0 else 0j for i in pos]
    Nf = h.modulus.norm
    env = [math.sqrt(X) * math.log(X * Nf) if X * Nf > 1 else 1.0 for X in grid]
    ratio = [abs(s) / e for s, e in zip(sums, env)]
    slope, resid, dropped = _safe_fit(grid, sums)
    rep = SeriesReport(grid, sums, env, env, ratio, slope, resid, "prime_char_sum")
    rep.extras["modulus_norm"] = Nf
    if dropped is not None:
        rep.extras["zeros_dropped"] = dropped
    return rep


def ideal_coefficient_array(h: HeckeCharacter, X: int, workers: int = 1) -> np.ndarray:
    """a(m) = sum of h over integral ideals of norm m, for m <= X (index m)."""
    tab = _char_table(h, X, workers)
    pr, kinds, s1, s2 = rational_prime_values(h, X, tab)
    return kernels.ideal_coefficients(X, pr, kinds, s1, s2)


def ideal_char_sum_series(h: HeckeCharacter, grid, workers: int = 1) -> SeriesReport:
    """Partial sums of h over integral ideals of norm <= X.

    For the principal character the slope of sum against X is fitted (the
    ideal density A_K) and reported in extras.
    """
    grid = _check_grid(grid)
    if not grid:
        return SeriesReport([], [], [], [], [], None, None, "ideal_char_sum")
    coef = ideal_coefficient_array(h, grid[-1], workers)
    csum = np.cumsum(coef)
    sums = [complex(csum[X]) for X in grid]
    principal = h.is_principal()
    extras = {"modulus_norm": h.modulus.norm, "principal": principal}
    if principal:
        xs = np.asarray(grid, dtype=np.float64)
        ys = np.asarray([s.real for s in sums])
        A = np.vstack([xs, np.ones(len(xs))]).T
        (ak, b0), *_ = np.linalg.lstsq(A, ys, rcond=None)
        extras["A_K"] = float(ak)
        extras["intercept"] = float(b0)
        ref = [float(ak) * X for X in grid]
        resid_vals = [s.real - r for s, r in zip(sums, ref)]
    else:
        ref = [0.0] * len(grid)
        resid_vals = sums
    env = [float(X) ** (1 / 3) for X in grid]
    ratio = [abs(v) / e for v, e in zip(resid_vals, env)]
    slope, resid, dropped = _safe_fit(grid, sums)
    if dropped is not None:
        extras["zeros_dropped"] = dropped
    return SeriesReport(grid, sums, ref, env, ratio, slope, resid, "ideal_char_sum", extras)


# --- Fourier truncation -------------------------------------------------------

def fourier_coeffs(theta, W) -> list[tuple[int, float]]:
    """a_n = e(-n/2) sin(pi theta) / (pi (theta - n)) for |n| <= W, with a_0 = 1 when theta = 0."""
    theta = float(theta)
    if not -0.5 < theta <= 0.5:
        raise RejectedInput("theta must lie in (-1/2, 1/2]")
    M = int(math.floor(W))
    s = math.sin(math.pi * theta)
    out = []
    for n in range(-M, M + 1):
        if theta == 0:
            out.append((n, 1.0 if n == 0 else 0.0))
            continue
        sign = -1.0 if n % 2 else 1.0  # e(-n/2)
        out.append((n, sign * s / (math.pi * (theta - n))))
    return out


def uniform_z_grid(points: int = 4096) -> np.ndarray:
    return -0.5 + np.arange(points, dtype=np.float64) / points


def _dist_to_int(x: np.ndarray) -> np.ndarray:
    return np.abs(x - np.round(x))


def fourier_envelope(W, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    d = _dist_to_int(z - 0.5)
    with np.errstate(divide="ignore"):
        arm = np.where(d > 0, 1.0 / (W * np.where(d > 0, d, 1.0)), np.inf)
    return np.minimum(math.log(W), arm)


@dataclass
class FourierCheck:
    theta: float
    W: float
    z_grid: list
    max_error: float
    envelope_constant: float

    def as_dict(self) -> dict:
        return {"theta": self.theta, "W": self.W, "points": len(self.z_grid),
                "max_error": self.max_error, "envelope_constant": self.envelope_constant}


def fourier_errors(theta, W, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    coeffs = fourier_coeffs(theta, W)
    ns = np.array([n for n, _ in coeffs], dtype=np.float64)
    an = np.array([a for _, a in coeffs], dtype=np.float64)
    approx = np.exp(2j * np.pi * np.outer(z, ns)) @ an
    return np.abs(np.exp(2j * np.pi * float(theta) * z) - approx)


def fourier_error_check(theta, W, z_grid=None) -> FourierCheck:
    if W < 2:
        raise RejectedInput("W must be at least 2")
    z = uniform_z_grid() if z_grid is None else np.asarray(z_grid, dtype=np.float64)
    err = fourier_errors(theta, W, z)
    env = fourier_envelope(W, z)
    const = float(np.max(err / env)) if len(z) else 0.0
    return FourierCheck(float(theta), float(W), z.tolist(), float(err.max()) if len(z) else 0.0, const)


# --- Z(p) spacing (real fields) --------------------------------------------

def _sigmas(F: FieldDescriptor, x: np.ndarray, y: np.ndarray):
    r = math.sqrt(F.d)
    e1, e2 = ((1 + r) / 2, (1 - r) / 2) if F.eta_kind == "half" else (r, -r)
    xf, yf = x.astype(np.float64), y.astype(np.float64)
    return xf + yf * e1, xf + yf * e2


def z_values(F: FieldDescriptor, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Z(p) = log|s1/s2| / (2 log eps)."""
    s1, s2 = _sigmas(F, x, y)
    return (np.log(np.abs(s1)) - np.log(np.abs(s2))) / (2 * float(F.log_eps))


def _min_gap(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    return float(np.min(np.diff(np.sort(z))))


def _ratios_distinct(x: np.ndarray, y: np.ndarray) -> bool:
    """Exact: no two generators are rational multiples of each other."""
    seen = set()
    for a, b in zip(x.tolist(), y.tolist()):
        key = (0, 1) if a == 0 else (Fraction(b, a).numerator, Fraction(b, a).denominator)
        if key in seen:
            return False
        seen.add(key)
    return True


def z_spacing_check(F: FieldDescriptor, N, workers: int = 1) -> dict:
    if not F.is_real:
        raise RejectedInput("Z(p) spacing needs a real quadratic field")
    N = int(N)
    tab = prime_table(F, N, 2 * N, with_generators=True, workers=workers)
    sel = tab.principal
    gx, gy, kind = tab.gx[sel], tab.gy[sel], tab.kind[sel]
    z = z_values(F, gx, gy)
    s1, s2 = _sigmas(F, gx, gy)
    rational = gy == 0
    plus = (~rational) & (np.sign(s1) == np.sign(s2))
    minus = (~rational) & (np.sign(s1) != np.sign(s2))
    eps = F.eps_float
    le = float(F.log_eps)
    c1 = math.log(eps * eps) / (eps * eps - 1)
    floor = c1 * math.sqrt(F.d) / (8 * N * eps * le)
    W = math.sqrt(N)
    terms = fourier_envelope(W, z) if len(z) else np.zeros(0)
    return {
        "N": N,
        "count": int(len(z)),
        "count_zero": int(rational.sum()),
        "count_plus": int(plus.sum()),
        "count_minus": int(minus.sum()),
        "z_min": float(z.min()) if len(z) else None,
        "z_max": float(z.max()) if len(z) else None,
        "z_in_range": bool(np.all((z >= -0.5) & (z < 0.5))),
        "inert_z_zero": bool(np.all(z[kind == kernels.INERT] == 0)),
        "m_plus": _min_gap(z[plus]),
        "m_minus": _min_gap(z[minus]),
        "c1": c1,
        "gap_floor": floor,
        "plus_distinct": _ratios_distinct(gx[plus], gy[plus]),
        "minus_distinct": _ratios_distinct(gx[minus], gy[minus]),
        "W": W,
        "error_sum": float(terms.sum()),
        "error_bound": math.log(W) + N * math.log(N) / W,
    }
