"""Basis of a finite abelian group given by its elements and a multiplication."""
from __future__ import annotations

from .intmath import factorint


def _power(x, e, mul, one):
    out = one
    while e:
        if e & 1:
            out = mul(out, x)
        x = mul(x, x)
        e >>= 1
    return out


def _span(table: dict, g, order: int, mul, one) -> dict:
    """Extend {elem: vector} by a new independent generator of the given order."""
    out = {}
    cur = one
    for j in range(order):
        for s, vec in table.items():
            out[mul(s, cur)] = vec + (j,)
        cur = mul(cur, g)
    return out


def _closure(sub: set, y, mul) -> set:
    out = set(sub)
    cur = y
    while cur not in sub:
        out.update(mul(s, cur) for s in sub)
        cur = mul(cur, y)
    return out


def decompose(elements, mul, one):
    """Return (basis, orders, dlog) with G = direct sum of cyclic <basis[i]>.

    Orders are prime powers (elementary divisors), grouped by prime.
    dlog maps every element to its exponent vector.
    """
    n = len(elements)
    basis, orders = [], []
    for l, a in sorted(factorint(n).items()) if n > 1 else []:
        size = l**a
        m = n // size
        gens, sub = [], {one}
        for x in elements:
            y = _power(x, m, mul, one)
            if y in sub:
                continue
            gens.append(y)
            sub = _closure(sub, y, mul)
            if len(sub) == size:
                break
        S = {one: ()}
        vec_to_elem = {(): one}
        lbasis, lorders = [], []
        while len(S) < size:
            best = None
            for g in gens:
                k, z = 0, g
                while z not in S:
                    z = _power(z, l, mul, one)
                    k += 1
                if best is None or k > best[0]:
                    best = (k, g, z)
            k, g, z = best
            pk = l**k
            v = S[z]
            corr = tuple((-(vi // pk)) % o for vi, o in zip(v, lorders))
            assert all(vi % pk == 0 for vi in v)
            g2 = mul(g, vec_to_elem[corr])
            S = _span(S, g2, pk, mul, one)
            vec_to_elem = {vec: e for e, vec in S.items()}
            lbasis.append(g2)
            lorders.append(pk)
        basis += lbasis
        orders += lorders
    dlog = {one: ()}
    for g, o in zip(basis, orders):
        dlog = _span(dlog, g, o, mul, one)
    return basis, orders, dlog
