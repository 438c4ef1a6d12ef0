"""Exact scalar arithmetic: finite fields, rational function fields, towers."""

from __future__ import annotations

import os
import re

from .finite import (FFElement, FiniteField, GF, PUBLISHED_MODULI, UnsupportedFieldError,
                     find_primitive_modulus)
from .funcfield import (DEFAULT_DEGREE_CAP, FunctionField, RationalFunction, ResourceError,
                        function_field, rf_normalize)
from .grammar import ParseError, format_scalar, parse_scalar
from .poly import Poly, PolyRing
from .specialize import SpecializationError, embed, specialize
from .tower import (ArtinSchreierTower, TowerElement, as_adjoin, in_wp_image, wp_map,
                    wp_preimage)

FIELD_TABLE_ENV = "CSA_FORGE_FIELD_TABLE"

_DESCRIPTOR = re.compile(r"^F(\d+)(?:\(([A-Za-z_][A-Za-z_0-9]*(?:,[A-Za-z_][A-Za-z_0-9]*)*)\))?$")


def _prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1:
                raise UnsupportedFieldError(f"{q} is not a prime power")
            return p, k
    raise UnsupportedFieldError(f"{q} is not a prime power")


def _table_moduli():
    path = os.environ.get(FIELD_TABLE_ENV)
    if not path:
        return {}
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].split()
            if line:
                p, k, *coeffs = (int(v) for v in line)
                out[(p, k)] = tuple(coeffs)
    return out


def field_from_descriptor(text, degree_cap=DEFAULT_DEGREE_CAP):
    """Parse ``F<q>`` or ``F<q>(x,y,...)`` into a field object.

    Finite fields use the published modulus for (p, k), or the entry of the
    table named by the CSA_FORGE_FIELD_TABLE environment variable.
    """
    m = _DESCRIPTOR.match(text.replace(" ", ""))
    if not m:
        raise ValueError(f"bad field descriptor {text!r}")
    p, k = _prime_power(int(m.group(1)))
    modulus = _table_moduli().get((p, k)) if k > 1 else None
    base = GF(p, k, modulus)
    if m.group(2):
        return function_field(base, m.group(2).split(","), degree_cap)
    return base


def field_of(x):
    """The ring an exact scalar lives in."""
    if isinstance(x, TowerElement):
        return x.ring
    return getattr(x, "field", None)


__all__ = [
    "ArtinSchreierTower", "DEFAULT_DEGREE_CAP", "FFElement", "FiniteField", "FunctionField", "GF",
    "PUBLISHED_MODULI", "ParseError", "Poly", "PolyRing", "RationalFunction", "ResourceError",
    "SpecializationError", "TowerElement", "UnsupportedFieldError", "as_adjoin", "embed",
    "field_from_descriptor", "field_of", "find_primitive_modulus", "format_scalar",
    "function_field", "in_wp_image", "parse_scalar", "rf_normalize", "specialize", "wp_map",
    "wp_preimage",
]
