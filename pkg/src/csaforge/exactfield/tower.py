"""Artin-Schreier towers R[alpha_1, ..., alpha_m] with alpha_i^p = alpha_i + a_i.

Each layer is a free module of rank p over the layer below, with basis
1, alpha, ..., alpha^(p-1).  A layer need not be a field: when a_i lies in
the image of the Artin-Schreier map the layer is a split ring, and inverses
are only available for elements whose norm is invertible below.
"""

from __future__ import annotations

from .finite import UnsupportedFieldError
from .grammar import join_terms, monomial_string, parse_scalar

DEFAULT_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")


def base_field_of(ring):
    while isinstance(ring, ArtinSchreierTower):
        ring = ring.parent
    return ring


class ArtinSchreierTower:
    is_finite = False

    def __init__(self, parent, a, name=None, p=None):
        self.parent = parent
        self.base = base_field_of(parent)
        self.p = p or self.base.characteristic
        if self.p != self.base.characteristic:
            raise ValueError("tower degree must equal the characteristic")
        self.characteristic = self.p
        depth = parent.depth + 1 if isinstance(parent, ArtinSchreierTower) else 1
        self.depth = depth
        self.name = name or DEFAULT_NAMES[depth - 1]
        self.a = parent_lift(parent, a)
        lower_names = parent.names if isinstance(parent, ArtinSchreierTower) else ()
        if self.name in lower_names or self.name == "g":
            raise ValueError(f"generator name {self.name!r} already in use")
        self.names = lower_names + (self.name,)
        self.rank = self.p ** depth
        pz = parent.zero
        self.zero = TowerElement(self, (pz,) * self.p)
        self.one = self.lift(parent.one)
        self.gen = TowerElement(self, (pz, parent.one) + (pz,) * (self.p - 2))

    def __repr__(self):
        return f"{self.parent!r}[{self.name}]"

    def descriptor(self):
        base = self.base.descriptor()
        layers = []
        ring = self
        while isinstance(ring, ArtinSchreierTower):
            layers.append(f"{ring.name}:{ring.a}")
            ring = ring.parent
        return base + "[" + ";".join(reversed(layers)) + "]"

    # -- coercion -----------------------------------------------------------
    def contains(self, x):
        return isinstance(x, TowerElement) and x.ring is self

    def lift(self, x):
        if isinstance(x, TowerElement) and x.ring is self:
            return x
        if isinstance(x, int):
            x = self.base.from_int(x)
        y = parent_lift(self.parent, x)
        pz = self.parent.zero
        return TowerElement(self, (y,) + (pz,) * (self.p - 1))

    def __call__(self, x):
        if isinstance(x, str):
            return parse_scalar(x, self)
        return self.lift(x)

    def from_int(self, n):
        return self.lift(self.base.from_int(n))

    def parse_env(self):
        env = {k: self.lift(v) for k, v in self.base.parse_env().items()}
        ring = self
        while isinstance(ring, ArtinSchreierTower):
            env[ring.name] = self.lift(ring.gen)
            ring = ring.parent
        return env

    def generators(self):
        """All tower generators, bottom layer first, lifted to this layer."""
        out = []
        ring = self
        while isinstance(ring, ArtinSchreierTower):
            out.append(self.lift(ring.gen))
            ring = ring.parent
        return list(reversed(out))

    def layers(self):
        out = []
        ring = self
        while isinstance(ring, ArtinSchreierTower):
            out.append(ring)
            ring = ring.parent
        return list(reversed(out))

    # -- structure ----------------------------------------------------------
    def from_coords(self, coords):
        """Build from a flat list of base scalars indexed by the monomial order.

        Index i has base-p digits (e_1, ..., e_m), with e_m (this layer) most
        significant, matching ``TowerElement.coords``.
        """
        if len(coords) != self.rank:
            raise ValueError("wrong number of coordinates")
        sub = self.rank // self.p
        parts = []
        for j in range(self.p):
            chunk = coords[j * sub:(j + 1) * sub]
            if isinstance(self.parent, ArtinSchreierTower):
                parts.append(self.parent.from_coords(chunk))
            else:
                parts.append(chunk[0])
        return TowerElement(self, tuple(parts))

    def monomials(self):
        """Exponent tuples (bottom generator first) in coordinate order."""
        out = []
        for idx in range(self.rank):
            e, t = [], idx
            for _ in range(self.depth):
                e.append(t % self.p)
                t //= self.p
            out.append(tuple(e))
        return out

    def norm(self, xi):
        """Norm to the layer below: the product of all conjugates."""
        xi = self.lift(xi)
        prod = xi
        c = xi
        for _ in range(self.p - 1):
            c = self.conj(c)
            prod = prod * c
        low = prod.lower()
        if low is None:
            raise ArithmeticError("norm did not descend; tower relation violated")
        return low

    def conj(self, xi, times=1):
        """The automorphism alpha -> alpha + times of this layer."""
        xi = self.lift(xi)
        shift = TowerElement(self, (self.parent.from_int(times), self.parent.one)
                             + (self.parent.zero,) * (self.p - 2))
        out = self.zero
        power = self.one
        for c in xi.coeffs:
            out = out + power.scale(c)
            power = power * shift
        return out

    def random(self, rng, **kw):
        coords = [self.base.random(rng, **kw) for _ in range(self.rank)]
        return self.from_coords(coords)


def parent_lift(ring, x):
    if isinstance(ring, ArtinSchreierTower):
        return ring.lift(x)
    if isinstance(x, int):
        return ring.from_int(x)
    return ring(x)


class TowerElement:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(coeffs)

    def _coerce(self, other):
        if isinstance(other, TowerElement) and other.ring is self.ring:
            return other
        try:
            return self.ring.lift(other)
        except (TypeError, ValueError):
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TowerElement(self.ring, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return TowerElement(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TowerElement(self.ring, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, c):
        """Multiply by an element of the layer below."""
        return TowerElement(self.ring, tuple(a * c for a in self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        R = self.ring
        p = R.p
        zero = R.parent.zero
        prod = [zero] * (2 * p - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if b:
                    prod[i + j] = prod[i + j] + a * b
        for k in range(2 * p - 2, p - 1, -1):
            c = prod[k]
            if c:
                prod[k] = zero
                prod[k - p + 1] = prod[k - p + 1] + c
                prod[k - p] = prod[k - p] + c * R.a
        return TowerElement(R, prod[:p])

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.ring.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self):
        """Inverse via conjugates and the norm; requires the norm to be a unit."""
        R = self.ring
        others = R.one
        c = self
        for _ in range(R.p - 1):
            c = R.conj(c)
            others = others * c
        nrm = (self * others).lower()
        if nrm is None:
            raise ArithmeticError("norm did not descend")
        if not nrm:
            raise ZeroDivisionError(f"{self} is not invertible in {R}")
        return others.scale(nrm.inverse())

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

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, str) else None
        if o is None:
            return NotImplemented
        return all(a == b for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self):
        return hash(tuple(hash(c) for c in self.coeffs))

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def is_zero(self):
        return not self

    def is_one(self):
        return self.coeffs[0].is_one() and not any(bool(c) for c in self.coeffs[1:])

    def lower(self):
        """The element of the layer below if this lies there, else None."""
        if any(bool(c) for c in self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def to_base(self):
        """Descend all the way to the base field, or None."""
        x = self
        while isinstance(x, TowerElement):
            x = x.lower()
            if x is None:
                return None
        return x

    def coords(self):
        """Flat list of base coordinates (see ``ArtinSchreierTower.from_coords``)."""
        out = []
        for c in self.coeffs:
            if isinstance(c, TowerElement):
                out.extend(c.coords())
            else:
                out.append(c)
        return out

    def to_text(self):
        R = self.ring
        from .grammar import format_scalar
        terms = []
        mons = R.monomials()
        coords = self.coords()
        # print highest monomial first, top generator most significant
        order = sorted(range(R.rank), key=lambda i: tuple(reversed(mons[i])), reverse=True)
        for i in order:
            c = coords[i]
            if c:
                terms.append((format_scalar(c), monomial_string(R.names, mons[i])))
        return join_terms(terms)

    def __repr__(self):
        return self.to_text()

    __str__ = __repr__


def as_adjoin(base, a, p=None, name=None):
    """Adjoin a root of t^p - t - a to ``base`` (a field or a tower)."""
    return ArtinSchreierTower(base, a, name=name, p=p)


def wp_map(x):
    """The Artin-Schreier map x^p - x."""
    ring = x.ring if isinstance(x, TowerElement) else x.field
    p = ring.characteristic
    return x ** p - x


def wp_matrix(F):
    """Matrix of the F_p-linear map x -> x^p - x on the basis 1, g, ..., g^(k-1).

    Column j holds the digits of wp(g^j).
    """
    cols = []
    for b in F.prime_subfield_basis():
        cols.append(F.digits(wp_map(b).code))
    return [[cols[j][i] for j in range(F.k)] for i in range(F.k)]


def wp_preimage(a, field=None):
    """Some y with y^p - y = a in a finite field, or None if there is none."""
    F = field or getattr(a, "field", None)
    if F is None or not getattr(F, "is_finite", False):
        raise UnsupportedFieldError("Artin-Schreier preimages are only decided over finite fields")
    from ..linalg import solve_mod_p
    a = F(a)
    M = wp_matrix(F)
    sol = solve_mod_p(M, F.digits(a.code), F.p)
    if sol is None:
        return None
    y = F.from_digits(sol)
    assert wp_map(y) == a
    return y


def in_wp_image(a):
    """Trace criterion: a lies in the image of wp iff its absolute trace vanishes."""
    F = a.field
    if not getattr(F, "is_finite", False):
        raise UnsupportedFieldError("trace criterion needs a finite field")
    return F.trace(a).is_zero()
