"""Command-line driver.

    quadprime <command> [options]

Options may also come from a flat `key = value` file given with --config;
flags on the command line win. Results go to stdout as one JSON document,
series and hit tables to --output as CSV.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import QuadPrimeError, UsageError
from .field_core import AlgebraicInt, FieldDescriptor, make_field
from .intmath import is_squarefree
from .parallel import default_workers
from .report import emit_json, header

COMMANDS = ("field-info", "factor", "class-group", "chars", "approx", "prime-approx", "charsum", "verify")
EXIT_OK, EXIT_ERROR, EXIT_EMPTY = 0, 1, 2


@dataclass
class RunConfig:
    command: str = ""
    field_d: int | None = None
    precision_bits: int = 192
    epsilon: float = 0.05
    workers: int | None = None
    budget: int = 10**7
    qmax: int | None = None
    factor_bound: int = 10**30
    max_hits: int = 1000
    output: str | None = None
    alpha: str | None = None
    element: str | None = None
    ideal: str | None = None
    modulus: str = "1"
    char: int = 0
    n: int = 0
    class_turns: str | None = None
    kind: str = "prime"
    grid_lo: int = 1000
    grid_hi: int = 10**6
    scale: str = "quick"

    def public(self) -> dict:
        """Config as embedded in reports; the worker count does not affect results."""
        d = dataclasses.asdict(self)
        d.pop("workers")
        d.pop("command")
        return d


# config-file key / flag name -> RunConfig field
_KEYS = {
    "field": "field_d",
    "precision": "precision_bits",
    "epsilon": "epsilon",
    "workers": "workers",
    "budget": "budget",
    "qmax": "qmax",
    "factor_bound": "factor_bound",
    "max_hits": "max_hits",
    "output": "output",
    "alpha": "alpha",
    "element": "element",
    "ideal": "ideal",
    "modulus": "modulus",
    "char": "char",
    "n": "n",
    "class_turns": "class_turns",
    "kind": "kind",
    "grid_lo": "grid_lo",
    "grid_hi": "grid_hi",
    "scale": "scale",
}


def _int(text: str) -> int:
    text = str(text).strip().replace("_", "")
    m = re.fullmatch(r"([+-]?\d+)(?:e(\d+))?", text)
    if m:
        return int(m.group(1)) * 10 ** int(m.group(2) or 0)
    m = re.fullmatch(r"(\d+)\^(\d+)", text)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    raise UsageError(f"not an integer: {text!r}")


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


_CONVERT = {
    "field_d": _int, "precision_bits": _int, "epsilon": _float, "workers": _int, "budget": _int,
    "qmax": _int, "factor_bound": _int, "max_hits": _int, "char": _int, "n": _int,
    "grid_lo": _int, "grid_hi": _int,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quadprime", description="Prime-denominator approximation in quadratic fields.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--field", dest="field", help="squarefree d of Q(sqrt(d))")
    p.add_argument("--precision", help="working precision in bits (default 192)")
    p.add_argument("--epsilon", help="exponent slack, 0 < eps <= 0.1 (default 0.05)")
    p.add_argument("--workers", help="worker processes (default: available cores)")
    p.add_argument("--budget", help="largest prime norm sieved (default 1e7)")
    p.add_argument("--qmax", help="largest denominator norm for Dirichlet approximation")
    p.add_argument("--factor-bound", dest="factor_bound", help="largest norm factored")
    p.add_argument("--max-hits", dest="max_hits", help="cap on reported hits")
    p.add_argument("--output", help="CSV output path")
    p.add_argument("--alpha", help="target: complex expression, or 'x1, x2' for real fields")
    p.add_argument("--element", help="algebraic integer x+y*eta")
    p.add_argument("--ideal", help="ideal in HNF as a,b,c")
    p.add_argument("--modulus", help="modulus generator x+y*eta (default 1)")
    p.add_argument("--char", help="index into the character list")
    p.add_argument("--n", help="power of the unit-angle character (infinity shift)")
    p.add_argument("--class-turns", dest="class_turns", help="class-group turns, e.g. 1/2")
    p.add_argument("--kind", help="charsum series: count | prime | ideal")
    p.add_argument("--grid-lo", dest="grid_lo")
    p.add_argument("--grid-hi", dest="grid_hi")
    p.add_argument("--scale", help="verify: quick | full")
    return p


def read_config_file(path: str) -> dict:
    out = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = val.strip("\"'")
    return out


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    raw = read_config_file(ns.config) if ns.config else {}
    for key in _KEYS:
        v = getattr(ns, key, None)
        if v is not None:
            raw[key] = v
    cfg = RunConfig(command=ns.command)
    for key, val in raw.items():
        name = _KEYS[key]
        conv = _CONVERT.get(name, str)
        setattr(cfg, name, conv(val))
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.field_d is None:
        raise UsageError("--field is required")
    if cfg.field_d in (0, 1) or not is_squarefree(cfg.field_d):
        raise UsageError(f"d = {cfg.field_d} is not a squarefree integer other than 0, 1")
    if not 0 < cfg.epsilon <= 0.1:
        raise UsageError("epsilon must lie in (0, 0.1]")
    if cfg.precision_bits < 53:
        raise UsageError("precision must be at least 53 bits")
    if cfg.workers is not None and cfg.workers < 1:
        raise UsageError("workers must be positive")
    if cfg.kind not in ("count", "prime", "ideal"):
        raise UsageError("kind must be count, prime or ideal")
    if cfg.scale not in ("quick", "full"):
        raise UsageError("scale must be quick or full")
    if cfg.command in ("approx", "prime-approx") and not cfg.alpha:
        raise UsageError(f"{cfg.command} needs --alpha")
    if cfg.grid_lo < 1 or cfg.grid_hi < cfg.grid_lo:
        raise UsageError("need 1 <= grid-lo <= grid-hi")


# --- parsing of algebraic inputs ---------------------------------------------

_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*(\*?\s*eta)?\s*")


def parse_element(text: str, F: FieldDescriptor) -> AlgebraicInt:
    """'x+y*eta' style input: integers, 'eta', '3*eta', '2-eta', ..."""
    s = text.replace(" ", "")
    if not s:
        raise UsageError("empty element")
    x = y = 0
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise UsageError(f"cannot parse element {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if pos > 0 and not m.group(1):
            raise UsageError(f"cannot parse element {text!r}")
        coef = int(m.group(2)) if m.group(2) else 1
        if m.group(3):
            y += sign * coef
        else:
            x += sign * coef
        pos = m.end()
    return AlgebraicInt(x, y, F)


def parse_ideal(text: str, F: FieldDescriptor):
    from .ideal_arith import IdealHNF, ideal_from_gens

    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise UsageError("ideal is given as a,b,c (HNF)")
    a, b, c = (_int(p) for p in parts)
    if a <= 0 or c <= 0 or not 0 <= b < a:
        raise UsageError("HNF needs a, c > 0 and 0 <= b < a")
    # the ideal generated by the two basis vectors is the triple itself iff it is an ideal
    I = ideal_from_gens([AlgebraicInt(a, 0, F), AlgebraicInt(b, c, F)])
    if (I.a, I.b, I.c) != (a, b, c):
        raise UsageError(f"({a}, {b}, {c}) is not an ideal in HNF")
    return IdealHNF(a, b, c, F)


def _turns(text: str | None):
    if not text:
        return None
    return [Fraction(t.strip()) for t in text.split(",")]


# --- commands -------------------------------------------------------------------

def cmd_field_info(cfg, F):
    from .ideal_arith import class_group, minkowski_bound

    cg = class_group(F)
    return {"class_number": cg.order, "class_group_structure": list(cg.structure),
            "minkowski_bound": minkowski_bound(F)}, EXIT_OK


def _prime_rows(fac):
    from .ideal_arith import is_principal_with_generator

    rows = []
    for P, e in fac:
        g = is_principal_with_generator(P.ideal)
        rows.append({"ideal": P.ideal, "p": P.p, "kind": P.kind, "norm": P.norm, "exponent": e,
                     "generator": g})
    return rows


def cmd_factor(cfg, F):
    from . import ideal_arith as ia

    ia_bound = ia.FACTOR_BOUND
    ia.FACTOR_BOUND = cfg.factor_bound
    try:
        if cfg.ideal:
            I = parse_ideal(cfg.ideal, F)
            src = {"ideal": I}
        elif cfg.element:
            z = parse_element(cfg.element, F)
            if z.is_zero():
                raise UsageError("cannot factor zero")
            I = ia.principal(z)
            src = {"element": z, "ideal": I}
        else:
            raise UsageError("factor needs --element or --ideal")
        fac = ia.factor_ideal(I)
        return {**src, "norm": I.norm, "factors": _prime_rows(fac), "moebius": ia.moebius(I),
                "phi": ia.euler_phi(I)}, EXIT_OK
    finally:
        ia.FACTOR_BOUND = ia_bound


def cmd_class_group(cfg, F):
    from .ideal_arith import class_group

    cg = class_group(F)
    return {"order": cg.order, "structure": list(cg.structure), "generators": list(cg.generators),
            "representatives": list(cg.reps)}, EXIT_OK


def _modulus(cfg, F):
    from .ideal_arith import principal

    z = parse_element(cfg.modulus, F)
    if z.is_zero():
        raise UsageError("modulus must be nonzero")
    return principal(z)


def _character(cfg, F):
    from .characters import characters_mod, make_hecke

    f = _modulus(cfg, F)
    chars = characters_mod(f)
    if not 0 <= cfg.char < len(chars):
        raise UsageError(f"--char must be in [0, {len(chars)})")
    return make_hecke(chars[cfg.char], _turns(cfg.class_turns), n=cfg.n)


def _infinity_dict(inf):
    if inf.signature == "imaginary":
        return {"u": inf.u}
    return {"u1": inf.u1, "u2": inf.u2, "n": inf.n, "gamma": inf.gamma}


def cmd_chars(cfg, F):
    from .characters import characters_mod, conductor, infinity_type_for, residue_unit_group

    f = _modulus(cfg, F)
    G = residue_unit_group(f)
    rows = []
    for i, chi in enumerate(characters_mod(f)):
        if i >= 512:
            break
        rows.append({"index": i, "exponents": list(chi.exponents), "order": chi.order(),
                     "conductor": conductor(chi),
                     "infinity": _infinity_dict(infinity_type_for(chi, F, cfg.n))})
    return {"modulus": f, "phi": G.order, "generators": G.generators, "orders": list(G.orders),
            "count": G.order, "listed": len(rows), "characters": rows}, EXIT_OK


def _target(cfg, F):
    from .targets import ApproxTarget

    return ApproxTarget.parse(cfg.alpha, F.signature, cfg.precision_bits)


def _conv_dict(c):
    return {"a": c.a, "q": c.q, "norm_q": c.norm_q, "error": c.error, "C_achieved": c.C_achieved,
            "D": c.D, "q_reduced": c.q_reduced, "norm_q_reduced": c.norm_q_reduced}


def cmd_approx(cfg, F):
    from .approx_engine import dirichlet_approx, sharpened_subsequence

    qmax = cfg.qmax or 10**4
    convs = dirichlet_approx(_target(cfg, F), F, qmax)
    sharp = sharpened_subsequence(convs)
    return {"Qmax": qmax, "C_star": max((c.C_achieved for c in convs), default=0),
            "convergents": [_conv_dict(c) for c in convs],
            "sharpened": [_conv_dict(c) for c in sharp]}, EXIT_OK


def cmd_prime_approx(cfg, F):
    from .approx_engine import exponent_profile, prime_denominator_search

    hits, diag = prime_denominator_search(
        _target(cfg, F), F, cfg.epsilon, cfg.budget, cfg.qmax, workers=cfg.workers, max_hits=cfg.max_hits)
    out = {"hits": [h.as_dict() for h in hits], "diagnostics": diag}
    if hits:
        prof = exponent_profile(hits)
        prof.pop("rows")
        prof.pop("cumulative_min")
        out["profile"] = prof
    if cfg.output:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["prime_norm", "p", "b", "error", "quality"])
        for h in hits:
            w.writerow([h.prime_norm, str(h.p), str(h.b), format(float(h.error), ".17g"), format(h.quality, ".17g")])
        _write(cfg.output, buf.getvalue())
    return out, (EXIT_OK if hits else EXIT_EMPTY)


def cmd_charsum(cfg, F):
    from . import analysis_lab as lab
    from .errors import CapacityError

    if cfg.grid_hi > cfg.budget:
        raise CapacityError(f"grid maximum {cfg.grid_hi} exceeds the sieve bound {cfg.budget}")
    grid = lab.default_grid(cfg.grid_lo, cfg.grid_hi)
    if cfg.kind == "count":
        rep = lab.prime_count_series(F, grid, workers=cfg.workers)
        char = None
    else:
        h = _character(cfg, F)
        char = {"modulus": h.modulus, "exponents": list(h.chi.exponents), "class_turns": list(h.class_turns),
                "infinity": _infinity_dict(h.infinity), "principal": h.is_principal()}
        fn = lab.prime_char_sum_series if cfg.kind == "prime" else lab.ideal_char_sum_series
        rep = fn(h, grid, workers=cfg.workers)
    if cfg.output:
        _write(cfg.output, rep.to_csv())
    return {"kind": cfg.kind, "character": char, "series": rep.as_dict()}, EXIT_OK


def run_verify(F: FieldDescriptor, scale: str = "quick", workers: int = 1) -> dict:
    from . import analysis_lab as lab
    from .suites import exact_suites

    checks = [s.as_dict() for s in exact_suites(F, scale)]
    fourier = []
    for theta in (0.1, 0.25, 0.3, 0.49):
        for W in (4, 16, 64, 256):
            fc = lab.fourier_error_check(theta, W)
            fourier.append({**fc.as_dict(), "passed": fc.envelope_constant <= lab.FOURIER_CONSTANT})
    checks.append({"name": "fourier", "passed": all(f["passed"] for f in fourier), "checked": len(fourier),
                   "cases": fourier})
    X = 10**5 if scale == "quick" else 10**6
    pc = lab.prime_count_series(F, lab.default_grid(1000, X), workers=workers)
    checks.append({"name": "prime_count", "passed": pc.sup_ratio <= lab.PRIME_SUM_CONSTANT,
                   "checked": len(pc.grid), "sup_ratio": pc.sup_ratio})
    if F.is_real:
        z = lab.z_spacing_check(F, 10**4, workers=workers)
        ok = (z["z_in_range"] and z["inert_z_zero"] and z["plus_distinct"] and z["minus_distinct"]
              and z["m_plus"] >= z["gap_floor"] and z["m_minus"] >= z["gap_floor"])
        checks.append({"name": "z_spacing", "passed": ok, "checked": z["count"], **z})
    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def cmd_verify(cfg, F):
    out = run_verify(F, cfg.scale, cfg.workers)
    return out, (EXIT_OK if out["passed"] else EXIT_ERROR)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


_DISPATCH = {
    "field-info": cmd_field_info,
    "factor": cmd_factor,
    "class-group": cmd_class_group,
    "chars": cmd_chars,
    "approx": cmd_approx,
    "prime-approx": cmd_prime_approx,
    "charsum": cmd_charsum,
    "verify": cmd_verify,
}


def dispatch(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    F = make_field(cfg.field_d)
    if cfg.workers is None:
        cfg.workers = default_workers()
    body, status = _DISPATCH[cfg.command](cfg, F)
    doc = header(cfg.command, cfg.public(), F)
    doc["result"] = body
    doc["exit_status"] = status
    stdout.write(emit_json(doc))
    return status


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return dispatch(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (QuadPrimeError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
