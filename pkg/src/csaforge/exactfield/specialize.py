"""Ring maps out of function fields: field embeddings and evaluation at points.

A rational function whose denominator does not vanish at a point x0 has a
well-defined value there, and t -> x0 is a ring homomorphism from the local
ring at x0 onto the residue field.  Linear algebra over F_q(t) is certified
by pushing matrices through such a map (a nonzero minor stays nonzero only
if it was nonzero before).
"""

from __future__ import annotations

from functools import lru_cache

from .finite import FFElement, UnsupportedFieldError
from .funcfield import RationalFunction


class SpecializationError(ArithmeticError):
    """The denominator vanishes at the requested point."""


@lru_cache(maxsize=None)
def _embedding_table(small, big):
    if small.p != big.p or big.k % small.k:
        raise UnsupportedFieldError(f"{small.name} does not embed in {big.name}")
    if small.k == 1:
        return tuple(range(small.q))
    # image of g: the first root of the defining modulus, in code order
    mod = small.modulus
    root = None
    for code in range(1, big.q):
        r = FFElement(big, code)
        val = big.zero
        for c in reversed(mod):
            val = val * r + c
        if val.is_zero():
            root = r
            break
    powers = [big.one]
    for _ in range(small.k - 1):
        powers.append(powers[-1] * root)
    table = []
    for code in range(small.q):
        acc = big.zero
        for d, pw in zip(small.digits(code), powers):
            if d:
                acc = acc + pw * d
        table.append(acc.code)
    return tuple(table)


def embed(x, big):
    """Image of a finite-field element under the fixed embedding into ``big``."""
    if x.field is big:
        return x
    return FFElement(big, _embedding_table(x.field, big)[x.code])


def _eval_terms(terms, values, table, big):
    total = big.zero
    for exps, code in terms:
        t = FFElement(big, table[code])
        for v, e in zip(values, exps):
            if e:
                t = t * v ** e
        total = total + t
    return total


def specialize(x, values, big):
    """Evaluate a base or function-field scalar at ``values`` inside ``big``.

    ``values`` lists one element of ``big`` per variable.  Raises
    SpecializationError if the denominator vanishes there.
    """
    if isinstance(x, FFElement):
        return embed(x, big)
    if not isinstance(x, RationalFunction):
        raise TypeError(f"cannot specialize {type(x).__name__}")
    table = _embedding_table(x.field.base, big)
    den = _eval_terms(x.poly_terms("den"), values, table, big)
    if den.is_zero():
        raise SpecializationError(f"denominator of {x} vanishes at {values}")
    num = _eval_terms(x.poly_terms("num"), values, table, big)
    return num / den


def specialization_points(field, big, count, start=1):
    """Deterministic candidate points for ``field`` inside ``big``.

    Points are taken in code order starting at ``start``, skipping values
    that lie in the image of the base field (those are the most likely to
    hit a root of a denominator with small coefficients).
    """
    sub = set(_embedding_table(field.base, big))
    out = []
    code = start
    while len(out) < count and code < big.q:
        if code not in sub:
            vals = []
            c = code
            for i in range(field.nvars):
                vals.append(FFElement(big, (c * (2 * i + 1) + i) % big.q or 1))
            out.append(vals)
        code += 1
    return out
