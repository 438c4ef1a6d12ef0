"""Symbol p-algebras [a,b)_p, characteristic-2 norm witnesses and splittings."""

from __future__ import annotations

import itertools

from . import linalg
from .algcore import (AlgebraError, AlgebraHom, Presentation, StructureConstantAlgebra,
                      hom_from_generators, matrix_algebra, split_off_matrix_factor)
from .exactfield import field_of, format_scalar


class InvalidPresentation(ValueError):
    pass


class InvalidWitness(ValueError):
    pass


class IndeterminateSearch(RuntimeError):
    """A bounded search over an infinite field found nothing; this proves nothing."""


class SymbolPresentation:
    def __init__(self, p, a, b, field=None):
        field = field or field_of(b) or field_of(a)
        if field is None:
            raise InvalidPresentation("cannot infer the base field")
        self.p = p
        self.field = field
        self.a = field(a) if not hasattr(a, "inverse") else a
        self.b = field(b) if not hasattr(b, "inverse") else b
        if not self.b:
            raise InvalidPresentation("b must be nonzero")
        if getattr(field, "p", p) != p:
            raise InvalidPresentation(f"characteristic {field.p} does not match p={p}")

    def to_text(self):
        return f"[{format_scalar(self.a)},{format_scalar(self.b)})_{self.p}"

    def __repr__(self):
        return self.to_text()


def _poly_mul(f, g, field):
    out = [field.zero] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def _reduce_u(poly, p, a, field):
    """Reduce a polynomial in u modulo u^p = u + a."""
    c = list(poly)
    for k in range(len(c) - 1, p - 1, -1):
        t = c[k]
        if t:
            c[k] = field.zero
            c[k - p + 1] = c[k - p + 1] + t
            c[k - p] = c[k - p] + t * a
    return (c + [field.zero] * p)[:p]


def symbol_algebra(pres, a=None, b=None, labels=None, name=None):
    """[a,b)_p on the basis u^i v^j, stored at index j*p + i.

    For p = 2 this is the order 1, u, v, w with w = uv.  Accepts either a
    SymbolPresentation or (p, a, b).
    """
    if not isinstance(pres, SymbolPresentation):
        pres = SymbolPresentation(pres, a, b)
    p, F = pres.p, pres.field
    a, b = pres.a, pres.b
    dim = p * p
    # (u+j)^k as coefficient lists, for j, k < p
    shift_pow = {}
    for j in range(p):
        base = [F.from_int(j), F.one]
        acc = [F.one]
        for k in range(p):
            shift_pow[(j, k)] = acc
            acc = _poly_mul(acc, base, F)
    products = []
    for idx1 in range(dim):
        j1, i1 = divmod(idx1, p)
        for idx2 in range(dim):
            j2, i2 = divmod(idx2, p)
            # u^i1 v^j1 u^i2 v^j2 = u^i1 (u + j1)^i2 v^(j1 + j2)
            poly = [F.zero] * i1 + shift_pow[(j1 % p, i2)]
            coeffs = _reduce_u(poly, p, a, F)
            j = j1 + j2
            scale = None
            if j >= p:
                j -= p
                scale = b
            terms = []
            for i, c in enumerate(coeffs):
                if scale is not None:
                    c = c * scale
                if c:
                    terms.append((j * p + i, None if c.is_one() else c))
            products.append(tuple(terms))
    unit = [F.one] + [F.zero] * (dim - 1)
    if labels is None:
        if p == 2:
            labels = ["1", "u", "v", "w"]
        else:
            labels = [_mono_label(i, j) for j in range(p) for i in range(p)]
    grading = [(j % 2,) for j in range(p) for _ in range(p)] if p == 2 else None
    A = StructureConstantAlgebra(F, dim, products, unit, labels, grading,
                                 name=name or pres.to_text())
    A.symbol = pres
    words = [("u",) * i + ("v",) * j for j in range(p) for i in range(p)]
    A.presentation = Presentation(["u", "v"], words, _relations(p, a, b))
    return A


def _mono_label(i, j):
    parts = []
    if i:
        parts.append("u" if i == 1 else f"u^{i}")
    if j:
        parts.append("v" if j == 1 else f"v^{j}")
    return "*".join(parts) or "1"


def _relations(p, a, b):
    def wp(imgs, T):
        u = imgs["u"]
        return u ** p - u - T.one() * a

    def vp(imgs, T):
        return imgs["v"] ** p - T.one() * b

    def comm(imgs, T):
        u, v = imgs["u"], imgs["v"]
        return v * u - u * v - v

    return [("u^p-u=a", wp), ("v^p=b", vp), ("vu=uv+v", comm)]


def quaternion(a, b, field=None, suffix=""):
    labels = ["1", "u" + suffix, "v" + suffix, "w" + suffix]
    return symbol_algebra(SymbolPresentation(2, a, b, field), labels=labels)


# -- norm witnesses (characteristic 2) -------------------------------------------


class NormWitness:
    """(x, y) with b = x^2 + x y + a y^2, i.e. b is the norm of x + y alpha."""

    def __init__(self, a, b, x, y):
        self.a, self.b, self.x, self.y = a, b, x, y

    def value(self):
        x, y = self.x, self.y
        return x * x + x * y + self.a * y * y

    def verify(self):
        return self.value() == self.b

    def check(self):
        if not self.verify():
            raise InvalidWitness(f"witness ({format_scalar(self.x)}, {format_scalar(self.y)}) "
                                 f"does not give {format_scalar(self.b)} as a norm from "
                                 f"a={format_scalar(self.a)}")
        return self

    def to_text(self):
        return " ".join(format_scalar(t) for t in (self.a, self.b, self.x, self.y))

    def __repr__(self):
        return f"NormWitness(a={format_scalar(self.a)}, b={format_scalar(self.b)}, " \
               f"x={format_scalar(self.x)}, y={format_scalar(self.y)})"


def _candidates(field, bound):
    if linalg.is_finite(field):
        return [field.element(c) for c in range(field.q)]
    if not hasattr(field, "nvars"):
        raise IndeterminateSearch(f"no enumeration available for {field}")
    # polynomials of degree <= bound in each variable with base coefficients
    base = field.base
    monos = list(itertools.product(range(bound + 1), repeat=field.nvars))
    out = []
    for coeffs in itertools.product(range(base.q), repeat=len(monos)):
        terms = {m: c for m, c in zip(monos, coeffs) if c}
        out.append(field.from_poly_terms(terms))
        if len(out) > 4096:
            break
    return out


def norm_witness_search(a, b, field=None, bound=1):
    """Find (x, y) with b = x^2 + xy + a y^2.

    Over a finite field the search is exhaustive and always succeeds.  Over a
    function field only polynomials up to ``bound`` are tried, and failure is
    reported as IndeterminateSearch.
    """
    field = field or field_of(b) or field_of(a)
    if getattr(field, "p", 2) != 2:
        raise ValueError("norm witnesses are implemented in characteristic 2 only")
    cands = _candidates(field, bound)
    # y = 0 first: squares
    for y in cands:
        ay2 = a * y * y
        for x in cands:
            if x * x + x * y + ay2 == b:
                return NormWitness(a, b, x, y)
    if linalg.is_finite(field):
        return None
    raise IndeterminateSearch(f"no witness with degree <= {bound}")


def _scalar_in(A, x, e11):
    """Scalar c with x = c * e11 (x assumed to lie in K e11)."""
    for i, v in enumerate(e11.coords):
        if v:
            c = x.coords[i] * v.inverse()
            if e11 * c != x:
                raise AlgebraError("element is not a multiple of e11")
            return c
    raise AlgebraError("zero idempotent")


def matrix_hom_from_units(A, units):
    """The map A -> M_2(K) reading x in the matrix units: x_ij e11 = e_1i x e_j1."""
    F = A.field
    M2 = matrix_algebra(F, 2)
    e11 = units[(1, 1)]
    cols = []
    for k in range(A.dim):
        x = A.basis(k)
        col = []
        for i in (1, 2):
            for j in (1, 2):
                col.append(_scalar_in(A, units[(1, i)] * x * units[(j, 1)], e11))
        cols.append(col)
    return AlgebraHom(A, M2, cols)


def splitting_idempotent(A, w):
    """Idempotent of rank one in the quaternion algebra A from a norm witness."""
    a, b = A.symbol.a, A.symbol.b
    one, u, v = A.basis(0), A.basis(1), A.basis(2)
    if w.y:
        e = (v + one * w.x + u * w.y) * w.y.inverse()
        if e * e != e:
            raise AlgebraError("witness idempotent failed to square to itself")
        return e
    n = v + one * w.x
    if n * n != A.zero():
        raise AlgebraError("v + x is not nilpotent")
    # solve n z n = n for z, then e = n z
    F = A.field
    cols = [(n * A.basis(k) * n).coords for k in range(A.dim)]
    rows = linalg.transpose(cols)
    z = linalg.solve(rows, n.coords, F)
    if z is None:
        raise AlgebraError("n z n = n has no solution")
    e = n * A.element(z)
    if e * e != e:
        raise AlgebraError("constructed element is not idempotent")
    del a, b
    return e


def split_iso(pres, w):
    """Explicit isomorphism [a,b)_2 -> M_2(K) from a norm witness for b."""
    A = pres if isinstance(pres, StructureConstantAlgebra) else symbol_algebra(pres)
    sym = A.symbol
    if sym.p != 2:
        raise ValueError("split_iso handles quaternion algebras only")
    if w.a != sym.a or w.b != sym.b:
        raise InvalidWitness("witness slots do not match the presentation")
    w.check()
    e = splitting_idempotent(A, w)
    units, C, _ = split_off_matrix_factor(A, e)
    hom = matrix_hom_from_units(A, units)
    hom.verify()
    if not hom.is_bijective():
        raise AlgebraError("splitting map is not bijective")
    hom.units = units
    return hom


def as_shift_iso(p, a, b, s, field=None):
    """[a + s^p - s, b) -> [a, b) given by u -> u + s, v -> v."""
    field = field or field_of(s) or field_of(b) or field_of(a)
    a = field(a) if not hasattr(a, "inverse") else a
    s = field(s) if not hasattr(s, "inverse") else s
    src = symbol_algebra(SymbolPresentation(p, a + s ** p - s, b, field))
    dst = symbol_algebra(SymbolPresentation(p, a, b, field))
    u, v = dst.basis(1), dst.basis(p)
    return hom_from_generators(src, dst, {"u": u + dst.one() * s, "v": v})
