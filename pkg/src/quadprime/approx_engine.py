"""Dirichlet approximation in quadratic fields and the prime-denominator search.

Pipeline for one target:
  1. dirichlet_approx: best approximations a/q with N(q) <= Qmax.
  2. sharpened_subsequence: keep convergents whose reduced modulus
     q_red = (q) / gcd((a), (q)) has strictly increasing norm.
  3. per convergent: choose N, the residue set of admissible k and the
     principal primes p in the norm window, keep p with p*a == k (mod q),
     recover b = (a*p - k)/q and certify the error with interval arithmetic.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import CapacityError, ExactHitError, RejectedInput, UnsupportedSignature
from .field_core import (
    AlgebraicInt,
    FieldDescriptor,
    in_unit_window,
    sigma_sign,
)
from .ideal_arith import (
    IdealHNF,
    divides,
    ideal_div,
    ideal_gcd,
    principal,
    prime_table,
)
from .targets import ApproxTarget

DEFAULT_EPSILON = 0.05
DEFAULT_BUDGET = 10**7
ENUM_CAPACITY = 2 * 10**7
RESIDUE_SET_CAPACITY = 10**6
CERTIFY_RETRIES = 3


@dataclass(frozen=True)
class Convergent:
    a: AlgebraicInt
    q: AlgebraicInt
    error: mpmath.mpf
    C_achieved: mpmath.mpf  # N(q) * error
    D: IdealHNF
    q_reduced: IdealHNF

    @property
    def norm_q(self) -> int:
        return abs(self.q.norm())

    @property
    def norm_q_reduced(self) -> int:
        return self.q_reduced.norm


@dataclass(frozen=True)
class SearchParams:
    epsilon: float
    N: float
    C: float
    delta: float | None = None  # imaginary
    Delta: float | None = None  # real
    Y0: float | None = None  # real
    W: float | None = None  # real Fourier cutoff, N^(1/2)
    window: tuple = (0, 0)  # prime norms in (lo, hi]
    radius: float | None = None  # imaginary |k| bound

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class PrimeApproxHit:
    p: AlgebraicInt
    b: AlgebraicInt
    prime_norm: int
    error: mpmath.mpf  # certified upper bound
    quality: float
    k: AlgebraicInt
    q: AlgebraicInt
    ideal: IdealHNF

    def as_dict(self) -> dict:
        return {
            "p": str(self.p),
            "b": str(self.b),
            "prime_norm": self.prime_norm,
            "prime_ideal": [self.ideal.a, self.ideal.b, self.ideal.c],
            "error": float(self.error),
            "quality": self.quality,
            "k": str(self.k),
            "q": str(self.q),
        }


# --- Dirichlet approximation ------------------------------------------------

def _imag_denominators(F: FieldDescriptor, Qmax: int):
    """Canonical associates x + y*eta with 0 < N <= Qmax, as int64 arrays."""
    im = float(F.im_eta)
    ymax = int(math.sqrt(Qmax) / im) + 1
    xs, ys = [], []
    for y in range(0, ymax + 1):
        # N = (x + t y / 2)^2 + (y im)^2
        rest = Qmax - (y * im) ** 2
        if rest < 0:
            break
        r = math.sqrt(rest)
        c = -F.t * y / 2
        lo, hi = math.floor(c - r) - 1, math.ceil(c + r) + 1
        x = np.arange(lo, hi + 1, dtype=np.int64)
        xs.append(x)
        ys.append(np.full(len(x), y, dtype=np.int64))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    nrm = x * x + F.t * x * y - F.n * y * y
    keep = (nrm > 0) & (nrm <= Qmax)
    if F.w == 2:
        keep &= (y > 0) | ((y == 0) & (x > 0))
    else:
        keep &= (y >= 0) & (x > 0)
    return x[keep], y[keep], nrm[keep]


def _real_embeddings_float(F: FieldDescriptor):
    r = math.sqrt(F.d)
    return ((1 + r) / 2, (1 - r) / 2) if F.eta_kind == "half" else (r, -r)


def _real_denominators(F: FieldDescriptor, Qmax: int):
    """Window generators (sigma_1 > 0) with 0 < |N| <= Qmax, as int64 arrays."""
    e1, e2 = _real_embeddings_float(F)
    eps = F.eps_float
    B = math.sqrt(eps * Qmax) * (1 + 1e-9) + 1
    ymax = int(2 * B / (e1 - e2)) + 1
    xs, ys = [], []
    for y in range(-ymax, ymax + 1):
        lo = max(-B - y * e1, -B - y * e2)
        hi = min(B - y * e1, B - y * e2)
        if hi < lo:
            continue
        x = np.arange(math.floor(lo), math.ceil(hi) + 1, dtype=np.int64)
        xs.append(x)
        ys.append(np.full(len(x), y, dtype=np.int64))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    nrm = np.abs(x * x + F.t * x * y - F.n * y * y)
    s1 = x + y * e1
    s2 = x + y * e2
    keep = (nrm > 0) & (nrm <= Qmax) & (s1 > 0)
    ratio = np.abs(s2) / np.where(s1 > 0, s1, 1.0)
    inside = (ratio > 1 / eps) & (ratio <= eps)
    near = np.abs(np.log(np.where(ratio > 0, ratio, 1.0)) / math.log(eps)) > 1 - 1e-9
    keep_idx = np.flatnonzero(keep & (inside | near))
    out = []
    for i in keep_idx:
        if near[i]:
            if not in_unit_window(AlgebraicInt(int(x[i]), int(y[i]), F)):
                continue
        out.append(i)
    out = np.array(out, dtype=np.int64)
    return x[out], y[out], nrm[out]


def _best_numerators_imag(F, alpha: complex, qx, qy):
    im = float(F.im_eta)
    re_eta = F.t / 2
    qc = qx + qy * (re_eta + 1j * im)
    z = qc * alpha
    v = z.imag / im
    u = z.real - v * re_eta
    fu, fv = np.floor(u), np.floor(v)
    best_err = np.full(len(qx), np.inf)
    ax = np.zeros(len(qx), dtype=np.int64)
    ay = np.zeros(len(qx), dtype=np.int64)
    for du in (0, 1):
        for dv in (0, 1):
            cu, cv = fu + du, fv + dv
            d = np.abs(z - (cu + cv * (re_eta + 1j * im)))
            better = d < best_err
            best_err = np.where(better, d, best_err)
            ax = np.where(better, cu.astype(np.int64), ax)
            ay = np.where(better, cv.astype(np.int64), ay)
    return ax, ay, best_err / np.abs(qc)


def _best_numerators_real(F, x1: float, x2: float, qx, qy):
    e1, e2 = _real_embeddings_float(F)
    s1 = qx + qy * e1
    s2 = qx + qy * e2
    T1, T2 = s1 * x1, s2 * x2
    v = (T1 - T2) / (e1 - e2)
    u = T1 - v * e1
    fu, fv = np.floor(u), np.floor(v)
    best_err = np.full(len(qx), np.inf)
    ax = np.zeros(len(qx), dtype=np.int64)
    ay = np.zeros(len(qx), dtype=np.int64)
    for du in range(-2, 4):
        for dv in range(-2, 4):
            cu, cv = fu + du, fv + dv
            err = np.maximum(
                np.abs(T1 - (cu + cv * e1)) / np.abs(s1),
                np.abs(T2 - (cu + cv * e2)) / np.abs(s2),
            )
            better = err < best_err
            best_err = np.where(better, err, best_err)
            ax = np.where(better, cu.astype(np.int64), ax)
            ay = np.where(better, cv.astype(np.int64), ay)
    return ax, ay, best_err


def approximation_error(target: ApproxTarget, a: AlgebraicInt, q: AlgebraicInt, prec: int | None = None):
    """|alpha - a/q| (imaginary) or max_i |x_i - s_i(a)/s_i(q)| (real), in mpmath."""
    prec = prec or target.precision_bits
    F = q.field
    with mpmath.workprec(prec + 20):
        from .field_core import _eta_values
        e1, e2 = _eta_values(F)
        if target.signature == "imaginary":
            alpha = target.value(prec + 20)
            qc = mpmath.mpc(q.x + q.y * e1, q.y * e2)
            ac = mpmath.mpc(a.x + a.y * e1, a.y * e2)
            out = abs(alpha - ac / qc)
        else:
            x1, x2 = target.value(prec + 20)
            out = max(
                abs(x1 - (a.x + a.y * e1) / (q.x + q.y * e1)),
                abs(x2 - (a.x + a.y * e2) / (q.x + q.y * e2)),
            )
    with mpmath.workprec(prec):
        return +out


def _check_signature(target: ApproxTarget, F: FieldDescriptor):
    if (target.signature == "real") != F.is_real:
        raise UnsupportedSignature(f"{target.signature} target does not match field {F.d}")


def dirichlet_approx(target: ApproxTarget, F: FieldDescriptor, Qmax: int) -> list[Convergent]:
    """Best approximations a/q with N(q) <= Qmax, sorted by N(q).

    Denominators run over associate classes (canonical representatives); an
    entry is kept when its error is strictly below every earlier one, i.e. the
    Pareto front of (N(q), error). C_achieved = N(q) * error stays bounded
    along this front by Dirichlet's theorem.
    """
    _check_signature(target, F)
    Qmax = int(Qmax)
    if Qmax < 1:
        raise RejectedInput("Qmax must be positive")
    est = Qmax * (4 if not F.is_real else 4 * F.eps_float) / max(float(F.im_eta) if not F.is_real else math.sqrt(F.d), 0.5)
    if est > ENUM_CAPACITY:
        raise CapacityError(f"Qmax = {Qmax} needs ~{est:.3g} denominators")
    if F.is_real:
        qx, qy, nq = _real_denominators(F, Qmax)
        x1, x2 = target.floats()
        ax, ay, err = _best_numerators_real(F, x1, x2, qx, qy)
    else:
        qx, qy, nq = _imag_denominators(F, Qmax)
        ax, ay, err = _best_numerators_imag(F, target.floats(), qx, qy)
    order = np.lexsort((qy, qx, nq))
    # Float screen with slack for the running minimum, then exact refinement.
    score = err
    cand = []
    best = math.inf
    for i in order:
        s = score[i]
        if s < best * (1 + 1e-6) + 1e-300:
            cand.append(i)
            best = min(best, s)
    exact_floor = mpmath.mpf(2) ** (-(target.precision_bits // 2))
    out = []
    best = None
    for i in cand:
        q = AlgebraicInt(int(qx[i]), int(qy[i]), F)
        a = AlgebraicInt(int(ax[i]), int(ay[i]), F)
        e = approximation_error(target, a, q)
        if e < exact_floor:
            raise ExactHitError(f"target is within {mpmath.nstr(e, 5)} of {a}/{q}", a, q)
        if best is not None and e >= best:
            continue
        best = e
        out.append(_make_convergent(a, q, e))
    return out


def _make_convergent(a: AlgebraicInt, q: AlgebraicInt, e) -> Convergent:
    Q = principal(q)
    D = Q if a.is_zero() else ideal_gcd(principal(a), Q)
    qr = ideal_div(Q, D)
    with mpmath.workprec(mpmath.mp.prec + 20):
        C = e * abs(q.norm())
    return Convergent(a, q, e, C, D, qr)


def sharpened_subsequence(convs) -> list[Convergent]:
    out, last = [], 0
    for c in convs:
        if c.norm_q_reduced > last:
            out.append(c)
            last = c.norm_q_reduced
    return out


# --- search parameters and residue sets --------------------------------------

def search_params(conv: Convergent, F: FieldDescriptor, epsilon: float) -> SearchParams:
    """N and the derived quantities for one convergent.

    C is the achieved constant relative to the reduced modulus:
    |target - a/q| = C / N(q_red).
    """
    if not (0 < epsilon <= 0.1):
        raise RejectedInput("epsilon must lie in (0, 1/10]")
    nqr = conv.norm_q_reduced
    C = float(conv.error) * nqr
    if not F.is_real:
        # N(q_red) = 4 C N^(4/3 - eps)  <=>  2 C N / N(q_red) = delta / 2
        N = (nqr / (4 * C)) ** (1 / (4 / 3 - epsilon))
        delta = N ** (-1 / 3 + epsilon)
        radius = math.sqrt(conv.norm_q) * delta / 2
        return SearchParams(epsilon, N, C, delta=delta, window=(N * N, 4 * N * N), radius=radius)
    N = nqr ** (1 / (2 / 3 - epsilon))
    Delta = C / nqr
    eps = F.eps_float
    Y0 = eps**-2 * math.sqrt(N * conv.norm_q) * Delta
    return SearchParams(epsilon, N, C, Delta=Delta, Y0=Y0, W=math.sqrt(N), window=(N, 2 * N))


def _coprimality_ok(k: AlgebraicInt, conv: Convergent) -> bool:
    return ideal_gcd(principal(k), principal(conv.q)) == conv.D


def residue_set(conv: Convergent, params: SearchParams, F: FieldDescriptor) -> list[AlgebraicInt]:
    """Admissible k: |k| bounded as in the parameters and gcd((k), (q)) = D."""
    from ._pykernels import short_vectors

    out = []
    if not F.is_real:
        R2 = params.radius**2
        bound = math.floor(R2 * (1 + 1e-12))
        if bound < 1:
            return []
        if bound / float(F.im_eta) * math.pi > RESIDUE_SET_CAPACITY:
            raise CapacityError("residue set too large")
        pts = short_vectors(1, 0, 1, 1, F.t, -F.n, bound)
        for x, y in sorted(pts):
            k = AlgebraicInt(x, y, F)
            if k.norm() <= R2 and _coprimality_ok(k, conv):
                out.append(k)
        return out
    Y0 = params.Y0
    if Y0 <= 0:
        return []
    e1, e2 = _real_embeddings_float(F)
    ymax = int(2 * Y0 / (e1 - e2)) + 1
    with mpmath.workprec(80):
        from .field_core import _eta_values
        m1, m2 = _eta_values(F)
        Ymp = mpmath.mpf(Y0)
        for y in range(-ymax, ymax + 1):
            lo = max(-Y0 - y * e1, -Y0 - y * e2)
            hi = min(Y0 - y * e1, Y0 - y * e2)
            for x in range(math.floor(lo) - 1, math.ceil(hi) + 2):
                k = AlgebraicInt(x, y, F)
                if k.is_zero():
                    continue
                if abs(x + y * m1) > Ymp or abs(x + y * m2) > Ymp:
                    continue
                if in_unit_window(k) and _coprimality_ok(k, conv):
                    out.append(k)
    return out


def residue_key_arrays(Q: IdealHNF, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    t = ys // Q.c
    xr = (xs - t * Q.b) % Q.a
    return xr + Q.a * (ys - t * Q.c)


def distinct_mod_q(ks, conv: Convergent) -> bool:
    """k1 == k2 (mod q) implies k1 = k2 over the residue set."""
    Q = principal(conv.q)
    keys = [Q.reduce(k.x, k.y) for k in ks]
    return len(set(keys)) == len(keys)


def prime_set(conv: Convergent, params: SearchParams, F: FieldDescriptor, table=None, workers: int = 1):
    """Principal primes with norm in the window, not dividing q_red, with generators.

    Returns parallel arrays (index into the table, gx, gy, norm) and the table.
    """
    lo, hi = params.window
    if table is None:
        table = prime_table(F, lo, hi, with_generators=True, workers=workers)
    i0 = int(np.searchsorted(table.norm, math.floor(lo), side="right"))
    i1 = int(np.searchsorted(table.norm, math.floor(hi), side="right"))
    idx = np.arange(i0, i1)
    idx = idx[table.principal[i0:i1]]
    nqr = conv.norm_q_reduced
    bad = idx[(nqr % table.norm[idx]) == 0]
    drop = set()
    for i in bad.tolist():
        P = IdealHNF(int(table.a[i]), int(table.b[i]), int(table.c[i]), F)
        if divides(P, conv.q_reduced):
            drop.add(i)
    if drop:
        idx = np.array([i for i in idx.tolist() if i not in drop], dtype=np.int64)
    return idx, table


def prime_set_list(conv, params, F, table=None):
    idx, tab = prime_set(conv, params, F, table)
    return [(tab.prime(int(i)), tab.generator(int(i))) for i in idx]


# --- certification ----------------------------------------------------------

def certify(target: ApproxTarget, p: AlgebraicInt, b: AlgebraicInt, epsilon: float, prec: int):
    """(verdict, err_upper, err_lower) with verdict True / False / None (undecided).

    The error of b/p and the threshold N(p)^(-2/3+eps) are both enclosed in
    intervals; True means err_upper <= threshold_lower.
    """
    F = p.field
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec
    try:
        Np = p.norm()
        num = b * p.conj()  # b/p = num / N(p)
        r = iv.sqrt(abs(F.discriminant))
        if target.signature == "imaginary":
            are, aim = target.interval(prec)
            re = (iv.mpf(num.x) + iv.mpf(num.y) * F.t / 2) / Np
            im = iv.mpf(num.y) * r / 2 / Np
            err = iv.sqrt((are - re) ** 2 + (aim - im) ** 2)
        else:
            x1, x2 = target.interval(prec)
            s1 = (iv.mpf(num.x) + iv.mpf(num.y) * (F.t + r) / 2) / Np
            s2 = (iv.mpf(num.x) + iv.mpf(num.y) * (F.t - r) / 2) / Np
            d1, d2 = abs(x1 - s1), abs(x2 - s2)
            err = iv.mpf([max(d1.a, d2.a), max(d1.b, d2.b)])
        expo = iv.mpf(epsilon) - iv.mpf(2) / 3
        thr = iv.exp(expo * iv.log(iv.mpf(abs(Np))))
        if err.b <= thr.a:
            verdict = True
        elif err.a > thr.b:
            verdict = False
        else:
            verdict = None
        return verdict, mpmath.mpf(err.b), mpmath.mpf(err.a)
    finally:
        iv.prec = old


def certify_with_retry(target, p, b, epsilon, prec):
    for _ in range(CERTIFY_RETRIES + 1):
        verdict, hi, lo = certify(target, p, b, epsilon, prec)
        if verdict is not None:
            return verdict, hi, lo
        prec *= 2
    return False, hi, lo


# --- the search ---------------------------------------------------------------

def default_qmax(F: FieldDescriptor, epsilon: float, budget: int) -> int:
    if not F.is_real:
        N = math.sqrt(budget) / 2
        C_cap = max(1.0, math.sqrt(abs(F.discriminant)) / 2)
        return int(4 * C_cap * N ** (4 / 3 - epsilon)) + 1
    from .ideal_arith import class_group
    h = class_group(F).order
    return int((budget / 2) ** (2 / 3 - epsilon) * h) + 1


def _mul_arrays(F, px, py, a: AlgebraicInt):
    x = px * a.x + F.n * py * a.y
    y = px * a.y + py * a.x + F.t * py * a.y
    return x, y


def prime_denominator_search(
    target: ApproxTarget,
    F: FieldDescriptor,
    epsilon: float = DEFAULT_EPSILON,
    budget: int = DEFAULT_BUDGET,
    Qmax: int | None = None,
    workers: int = 1,
    max_hits: int | None = 1000,
    max_convergents: int | None = None,
):
    """Prime elements p with |target - b/p| <= N(p)^(-2/3+eps), certified.

    Returns (hits, diagnostics). Hits are deduplicated by prime ideal and
    sorted by (norm, HNF).
    """
    _check_signature(target, F)
    if not (0 < epsilon <= 0.1):
        raise RejectedInput("epsilon must lie in (0, 1/10]")
    Qmax = Qmax or default_qmax(F, epsilon, budget)
    convs = dirichlet_approx(target, F, Qmax)
    sharp = sharpened_subsequence(convs)
    diag = {
        "Qmax": Qmax,
        "budget": budget,
        "epsilon": epsilon,
        "norm_window": "(N^2, 4N^2] on N(p), N bounds |p|" if not F.is_real else "(N, 2N] on N(p)",
        "convergents": len(convs),
        "sharpened": len(sharp),
        "C_star": float(max((c.C_achieved for c in convs), default=0)),
        "runs": [],
    }
    plans = []
    for ci, conv in enumerate(sharp):
        params = search_params(conv, F, epsilon)
        run = {"q": str(conv.q), "a": str(conv.a), "norm_q": conv.norm_q,
               "norm_q_reduced": conv.norm_q_reduced, **params.as_dict()}
        if params.window[1] > budget:
            run["skipped"] = "window beyond budget"
            diag["runs"].append(run)
            continue
        if params.window[1] < 2:
            run["skipped"] = "empty window"
            diag["runs"].append(run)
            continue
        plans.append((conv, params, run))
    if max_convergents is not None:
        # keep the largest admissible moduli
        for _, _, run in plans[: max(0, len(plans) - max_convergents)]:
            run["skipped"] = "convergent limit"
            diag["runs"].append(run)
        plans = plans[max(0, len(plans) - max_convergents):]
    table = None
    if plans:
        top = max(math.floor(p[1].window[1]) for p in plans)
        table = prime_table(F, 0, top, with_generators=True, workers=workers)
    found = {}
    prec = target.precision_bits
    for conv, params, run in plans:
        ks = residue_set(conv, params, F)
        Q = principal(conv.q)
        kmap = {}
        for k in ks:
            kmap.setdefault(Q.reduce(k.x, k.y), k)
        run["k_count"] = len(ks)
        run["k_distinct_mod_q"] = len(kmap) == len(ks)
        idx, _ = prime_set(conv, params, F, table)
        run["p_count"] = int(len(idx))
        if not ks or len(idx) == 0:
            run["candidates"] = 0
            run["certified"] = 0
            diag["runs"].append(run)
            continue
        px, py = table.gx[idx], table.gy[idx]
        x, y = _mul_arrays(F, px, py, conv.a)
        keys = residue_key_arrays(Q, x, y)
        kkeys = np.array([kx + Q.a * ky for kx, ky in kmap.keys()], dtype=np.int64)
        hit_idx = np.flatnonzero(np.isin(keys, kkeys))
        run["candidates"] = int(len(hit_idx))
        certified = 0
        for j in hit_idx.tolist():
            i = int(idx[j])
            p = AlgebraicInt(int(px[j]), int(py[j]), F)
            kk = int(keys[j])
            k = kmap[(kk % Q.a, kk // Q.a)]
            b = (conv.a * p - k).divexact(conv.q)
            if b is None:
                raise ArithmeticError("congruence test inconsistent with exact division")
            ok, hi, lo = certify_with_retry(target, p, b, epsilon, prec)
            if not ok:
                continue
            certified += 1
            Np = abs(p.norm())
            with mpmath.workprec(64):
                quality = float(-mpmath.log(hi) / mpmath.log(Np))
            hit = PrimeApproxHit(p, b, Np, hi, quality, k, conv.q,
                                 IdealHNF(int(table.a[i]), int(table.b[i]), int(table.c[i]), F))
            prev = found.get(hit.ideal)
            if prev is None or hit.error < prev.error:
                found[hit.ideal] = hit
        run["certified"] = certified
        diag["runs"].append(run)
    hits = sorted(found.values(), key=lambda h: (h.prime_norm, h.ideal.key))
    diag["hits_total"] = len(hits)
    if max_hits is not None and len(hits) > max_hits:
        hits = hits[:max_hits]
        diag["hits_truncated_to"] = max_hits
    diag["largest_N"] = max((r.get("N", 0) for r in diag["runs"] if "skipped" not in r), default=0)
    diag["runs"].sort(key=lambda r: r["norm_q_reduced"])
    return hits, diag


def exponent_profile(hits) -> dict:
    if not hits:
        raise RejectedInput("exponent profile of an empty hit list")
    hits = sorted(hits, key=lambda h: (h.prime_norm, h.ideal.key))
    qs = [h.quality for h in hits]
    decades = {}
    for h in hits:
        dec = int(math.floor(math.log10(h.prime_norm)))
        decades[dec] = decades.get(dec, 0) + 1
    cum, rows, m = [], [], math.inf
    for h in hits:
        m = min(m, h.quality)
        cum.append(m)
        rows.append({"prime_norm": h.prime_norm, "p": str(h.p), "b": str(h.b),
                     "error": float(h.error), "quality": h.quality})
    return {
        "count": len(hits),
        "min": min(qs),
        "median": statistics.median(qs),
        "max": max(qs),
        "by_decade": {f"1e{k}": v for k, v in sorted(decades.items())},
        "cumulative_min": cum,
        "rows": rows,
    }
