"""Deterministic JSON/CSV emission."""
from __future__ import annotations

import json
import math
from fractions import Fraction

import mpmath
import numpy as np

from .field_core import AlgebraicInt, FieldDescriptor, FieldElement
from .ideal_arith import IdealHNF

SCHEMA = "quadprime/1"


def to_jsonable(obj):
    """Plain JSON types; floats stay floats, algebraic numbers become 'x+y*eta' strings."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, mpmath.mpf):
        return float(obj)
    if isinstance(obj, (complex, mpmath.mpc, np.complexfloating)):
        z = complex(obj)
        return [z.real, z.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (AlgebraicInt, FieldElement)):
        return str(obj)
    if isinstance(obj, IdealHNF):
        return [obj.a, obj.b, obj.c]
    if isinstance(obj, FieldDescriptor):
        return obj.describe()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj, out: list):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isfinite(obj):
            out.append(format(obj, ".17g"))
        else:
            out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, list):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(k, ensure_ascii=False))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    else:
        raise TypeError(type(obj).__name__)


def emit_json(result) -> str:
    """One-line JSON, insertion-ordered keys, floats with 17 significant digits."""
    out: list = []
    _encode(to_jsonable(result), out)
    return "".join(out) + "\n"


def emit_csv(series) -> str:
    return series.to_csv()


def header(command: str, config: dict, F: FieldDescriptor | None) -> dict:
    from . import __version__

    head = {"schema": SCHEMA, "version": __version__, "command": command, "config": config}
    if F is not None:
        desc = F.describe()
        desc["eta_convention"] = "x+y*eta with eta = " + F.eta_label()
        head["field"] = desc
    return head
