"""Rational function fields F_q(x_1, ..., x_n).

Univariate fields keep numerator and denominator as dense polynomials (flint
``nmod_poly`` over prime fields) and are always gcd-reduced with a monic
denominator, so their printed form is canonical.  Multivariate fields use the sparse ``Poly`` type; normalization
strips common monomial content, makes the denominator's leading coefficient 1
and falls back to univariate gcd when only one variable occurs.  Equality is
always decided by cross-multiplication.
"""

from __future__ import annotations

import flint

from .finite import FFElement
from .grammar import format_ff, join_terms, monomial_string, parse_scalar, wrap
from .poly import DenseUPoly, Poly, PolyRing

DEFAULT_DEGREE_CAP = 8


class ResourceError(RuntimeError):
    """Raised when an input exceeds a configured size limit."""


class _UniBridge:
    """Univariate polynomials over the base: flint nmod_poly for prime fields,
    ``DenseUPoly`` otherwise.  Both are addressed through coefficient codes."""

    def __init__(self, F):
        self.F = F
        self.prime = F.k == 1

    def poly(self, codes):
        if self.prime:
            return flint.nmod_poly([int(c) for c in codes], self.F.p)
        return DenseUPoly(self.F, codes)

    def codes(self, f):
        if self.prime:
            return [int(c) for c in f.coeffs()]
        return f.coeffs()

    def lc(self, f):
        return int(f.leading_coefficient()) if self.prime else f.leading_coefficient()

    def scale(self, f, code):
        if self.prime:
            return f * flint.nmod_poly([code], self.F.p)
        return f.scale(code)


class FunctionField:
    is_finite = False

    def __init__(self, base, names, degree_cap=DEFAULT_DEGREE_CAP):
        if not isinstance(names, (tuple, list)) or not names:
            raise ValueError("a function field needs at least one variable")
        if "g" in names:
            raise ValueError("'g' is reserved for the finite-field generator")
        self.base = base
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.degree_cap = degree_cap
        self.p = base.p
        self.characteristic = base.p
        self.univariate = self.nvars == 1
        self.bridge = _UniBridge(base)
        self.ring = PolyRing(base, self.names)
        self.name = f"{base.name}({','.join(self.names)})"
        if self.univariate:
            self._pzero = self.bridge.poly([])
            self._pone = self.bridge.poly([1])
        else:
            self._pzero = self.ring.zero()
            self._pone = self.ring.one()
        self.zero = RationalFunction(self, self._pzero, self._pone)
        self.one = RationalFunction(self, self._pone, self._pone)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return (isinstance(other, FunctionField) and other.base is self.base
                and other.names == self.names)

    def __hash__(self):
        return hash((self.base.q, self.names))

    def __reduce__(self):
        return (FunctionField, (self.base, self.names, self.degree_cap))

    def descriptor(self):
        return self.name

    # -- construction -----------------------------------------------------
    def _const_poly(self, code):
        if self.univariate:
            return self.bridge.poly([code])
        return self.ring.const(code)

    def lift(self, x):
        """Embed a base-field element."""
        return RationalFunction(self, self._const_poly(x.code), self._pone, normal=True)

    def var(self, name_or_index):
        i = name_or_index if isinstance(name_or_index, int) else self.names.index(name_or_index)
        if self.univariate:
            num = self.bridge.poly([0, 1])
        else:
            num = self.ring.var(i)
        return RationalFunction(self, num, self._pone, normal=True)

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def from_int(self, n):
        return self.lift(self.base.from_int(n))

    def parse_env(self):
        env = {name: self.var(i) for i, name in enumerate(self.names)}
        if self.base.k > 1:
            env["g"] = self.lift(self.base.gen)
        return env

    def __call__(self, x):
        if isinstance(x, RationalFunction):
            if x.field == self:
                return x
            raise TypeError(f"cannot coerce element of {x.field} into {self}")
        if isinstance(x, FFElement):
            if x.field is self.base:
                return self.lift(x)
            raise TypeError(f"cannot coerce element of {x.field} into {self}")
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, str):
            return parse_scalar(x, self)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def contains(self, x):
        return isinstance(x, RationalFunction) and x.field == self

    def from_poly_codes(self, codes, var=0):
        """Univariate polynomial sum codes[i] * x_var^i."""
        if self.univariate:
            return RationalFunction(self, self.bridge.poly(codes), self._pone, normal=True)
        terms = {}
        for i, c in enumerate(codes):
            if c:
                e = [0] * self.nvars
                e[var] = i
                terms[tuple(e)] = c
        return RationalFunction(self, Poly(self.ring, terms), self._pone, normal=True)

    def from_poly_terms(self, terms):
        """Polynomial from a dict mapping exponent tuples to base codes."""
        if self.univariate:
            deg = max((e[0] for e in terms), default=0)
            codes = [0] * (deg + 1)
            for e, c in terms.items():
                codes[e[0]] = c
            return self.from_poly_codes(codes)
        return RationalFunction(self, Poly(self.ring, dict(terms)), self._pone, normal=True)

    def random(self, rng, degree=None, nonzero=False):
        """Random polynomial of degree <= ``degree`` in each variable."""
        degree = self.degree_cap if degree is None else degree
        self.check_degree(degree)
        while True:
            if self.univariate:
                codes = [int(c) for c in rng.integers(0, self.base.q, size=degree + 1)]
                x = self.from_poly_codes(codes)
            else:
                import itertools
                terms = {}
                for e in itertools.product(range(degree + 1), repeat=self.nvars):
                    c = int(rng.integers(0, self.base.q))
                    if c:
                        terms[e] = c
                x = RationalFunction(self, Poly(self.ring, terms), self._pone, normal=True)
            if x or not nonzero:
                return x

    def check_degree(self, degree):
        if degree > self.degree_cap:
            raise ResourceError(f"degree {degree} exceeds the cap {self.degree_cap} of {self.name}")

    def check_coordinate(self, x):
        """Raise ResourceError when x exceeds the per-variable degree cap."""
        for i in range(self.nvars):
            self.check_degree(x.degree_in(i))
        return x

    # -- polynomial-level helpers ----------------------------------------
    def _normalize(self, num, den):
        if self.univariate:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                return self._pzero, self._pone
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
            lc = self.bridge.lc(den)
            if lc != 1:
                inv = self.base.inv_code(lc)
                num = self.bridge.scale(num, inv)
                den = self.bridge.scale(den, inv)
            return num, den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return self._pzero, self._pone
        m = tuple(min(a, b) for a, b in zip(num.min_exponents(), den.min_exponents()))
        if any(m):
            num = num.shift_down(m)
            den = den.shift_down(m)
        used = num.variables() | den.variables()
        if len(used) == 1:
            (i,) = used
            br = self.bridge
            fn = br.poly(num.univariate_coeffs(i))
            fd = br.poly(den.univariate_coeffs(i))
            g = fn.gcd(fd)
            if not g.is_one():
                num = self.from_poly_codes(br.codes(fn // g), i).num
                den = self.from_poly_codes(br.codes(fd // g), i).num
        F = self.base
        _, lc = den.leading()
        if lc != 1:
            inv = F.inv_code(lc)
            num = num.scale(inv)
            den = den.scale(inv)
        return num, den


class RationalFunction:
    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den, normal=False):
        self.field = field
        if not normal:
            num, den = field._normalize(num, den)
        self.num = num
        self.den = den

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.field is self.field or other.field == self.field:
                return other
            raise TypeError(f"mixed fields {self.field} and {other.field}")
        if isinstance(other, FFElement) and other.field is self.field.base:
            return self.field.lift(other)
        if isinstance(other, int):
            return self.field.from_int(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(self.field, self.num + o.num, self.den)
        return RationalFunction(self.field, self.num * o.den + o.num * self.den,
                                self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.field, -self.num, self.den, normal=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.field, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError(f"inverse of zero in {self.field}")
        return RationalFunction(self.field, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.field, self.num ** n, self.den ** n, normal=True) \
            if self.field.univariate else RationalFunction(self.field, self.num ** n, self.den ** n)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, str) else None
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        if self.field.univariate:
            return hash(self.to_text())
        return hash(self.num.is_zero())

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self == self.field.one

    # -- inspection ---------------------------------------------------------
    def degree_in(self, i):
        if self.field.univariate:
            return max(self.num.degree(), self.den.degree(), 0)
        return max(self.num.degree_in(i), self.den.degree_in(i), 0)

    def is_constant(self):
        if self.field.univariate:
            return self.num.degree() <= 0 and self.den.degree() <= 0
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        """The base-field value of a constant function."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        F = self.field.base
        if self.field.univariate:
            br = self.field.bridge
            n = br.codes(self.num)
            d = br.codes(self.den)
            num = FFElement(F, n[0] if n else 0)
            return num / FFElement(F, d[0])
        return FFElement(F, self.num.constant_code()) / FFElement(F, self.den.constant_code())

    def poly_terms(self, which):
        """Return [(exponent tuple, code)] of numerator or denominator."""
        f = self.num if which == "num" else self.den
        if self.field.univariate:
            return [((i,), c) for i, c in enumerate(self.field.bridge.codes(f)) if c]
        return list(f.terms.items())

    def _poly_text(self, which):
        F = self.field.base
        terms = []
        for e, c in sorted(self.poly_terms(which), reverse=True):
            terms.append((format_ff(FFElement(F, c)), monomial_string(self.field.names, e)))
        return join_terms(terms)

    def to_text(self):
        num = self._poly_text("num")
        if self.den == self.field._pone:
            return num
        return f"{wrap(num)}/{wrap(self._poly_text('den'))}"

    def __repr__(self):
        return self.to_text()

    __str__ = __repr__


def function_field(base, names, degree_cap=DEFAULT_DEGREE_CAP):
    if isinstance(names, str):
        names = tuple(n.strip() for n in names.split(","))
    return _function_field(base, tuple(names), degree_cap)


_FF_CACHE = {}


def _function_field(base, names, cap):
    key = (base.p, base.k, base.modulus, names, cap)
    if key not in _FF_CACHE:
        _FF_CACHE[key] = FunctionField(base, names, cap)
    return _FF_CACHE[key]


def rf_normalize(numerator, denominator):
    """Canonical representative of numerator/denominator.

    Both arguments must be elements of one function field (polynomials are
    fine); the quotient is returned in normalized form.
    """
    if not isinstance(numerator, RationalFunction) or not isinstance(denominator, RationalFunction):
        raise TypeError("rf_normalize expects function-field elements")
    if not denominator:
        raise ZeroDivisionError("zero denominator")
    return numerator / denominator

