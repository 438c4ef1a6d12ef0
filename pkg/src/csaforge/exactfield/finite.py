"""Finite fields F_p[g]/(m(g)) with table-driven arithmetic.

Elements are encoded by an integer ``code``: the base-p digits of the code are
the coefficients of the residue polynomial in ``g`` (lowest degree first).  For
prime fields the code is simply the residue.  Multiplication goes through
discrete log / exponent tables, addition in odd characteristic through Zech
logarithms; both tables are also exported as numpy arrays for the compiled
linear algebra kernels.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

MAX_ORDER = 1 << 16

# Conway polynomials, coefficients lowest degree first.  These are the
# published moduli used for every certificate; anything else is found by a
# deterministic lexicographic search (see ``find_primitive_modulus``).
PUBLISHED_MODULI = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (2, 16): (1, 0, 1, 1, 0, 1) + (0,) * 10 + (1,),
}


class UnsupportedFieldError(ValueError):
    """Raised when an operation needs a field it cannot handle."""


def _is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


def _polymulmod(a, b, mod, p):
    """Multiply coefficient lists a, b modulo the monic ``mod`` over F_p."""
    k = len(mod) - 1
    out = [0] * (2 * k)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for d in range(len(out) - 1, k - 1, -1):
        c = out[d]
        if c:
            for i in range(k + 1):
                out[d - k + i] = (out[d - k + i] - c * mod[i]) % p
    return out[:k]


def _exp_cycle(p, mod):
    """Powers of g modulo ``mod`` as codes, or None if g is not primitive."""
    k = len(mod) - 1
    q = p ** k
    weights = [p ** i for i in range(k)]
    exp = [0] * (q - 1)
    cur = [1] + [0] * (k - 1)
    for i in range(q - 1):
        code = sum(c * w for c, w in zip(cur, weights))
        if i and code == 1:
            return None
        exp[i] = code
        # multiply by g: shift and reduce
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [(c - top * m) % p for c, m in zip(cur, mod[:-1])]
    if sum(c * w for c, w in zip(cur, weights)) != 1:
        return None
    return exp


_PRIMITIVE_CACHE = {}


def nth_primitive_modulus(p, k, n):
    """The n-th monic primitive polynomial of degree k over F_p (n >= 0).

    Enumeration is lexicographic in the coefficient tuple read as base-p
    digits (lowest degree first), so the n-th modulus is reproducible.
    """
    found = _PRIMITIVE_CACHE.setdefault((p, k), [])
    if len(found) > n:
        return found[n]
    start = 0 if not found else _modulus_index(p, found[-1]) + 1
    for idx in itertools.count(start):
        mod = _index_modulus(p, k, idx)
        if mod[0] == 0:
            continue
        if _exp_cycle(p, mod) is not None:
            found.append(mod)
            if len(found) > n:
                return mod


def _index_modulus(p, k, idx):
    digits = []
    for _ in range(k):
        digits.append(idx % p)
        idx //= p
    if idx:
        raise UnsupportedFieldError(f"no further primitive polynomials of degree {k}")
    return tuple(digits) + (1,)


def _modulus_index(p, mod):
    return sum(c * p ** i for i, c in enumerate(mod[:-1]))


def find_primitive_modulus(p, k):
    return nth_primitive_modulus(p, k, 0)


def GF(p, k=1, modulus=None):
    """Return the (cached) finite field of order p**k.

    Fields with the same (p, k, modulus) are the same object, so elements
    can be compared by identity of their field.
    """
    if k == 1:
        modulus = None
    elif modulus is None:
        modulus = PUBLISHED_MODULI.get((p, k)) or find_primitive_modulus(p, k)
    else:
        modulus = tuple(int(c) % p for c in modulus)
    return _gf(p, k, None if modulus is None else tuple(modulus))


@lru_cache(maxsize=None)
def _gf(p, k, modulus):
    return FiniteField(p, k, modulus)


class FiniteField:
    is_finite = True

    def __init__(self, p, k=1, modulus=None):
        if not _is_prime(p):
            raise UnsupportedFieldError(f"{p} is not prime")
        if p ** k > MAX_ORDER:
            raise UnsupportedFieldError(f"field order {p}^{k} exceeds {MAX_ORDER}")
        self.p = p
        self.k = k
        self.q = p ** k
        self.characteristic = p
        if k == 1:
            # F_p: codes are residues; the "modulus" is g - r for a primitive root r
            root = next(r for r in range(1, p) if p == 2 or _order_mod(r, p) == p - 1)
            self.modulus = ((-root) % p, 1)
            exp = [pow(root, i, p) for i in range(p - 1)]
        else:
            if modulus is None:
                modulus = PUBLISHED_MODULI.get((p, k)) or find_primitive_modulus(p, k)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            exp = _exp_cycle(p, modulus)
            if exp is None:
                raise UnsupportedFieldError(f"modulus {modulus} is not primitive")
            self.modulus = tuple(modulus)
        q = self.q
        log = [-1] * q
        for i, c in enumerate(exp):
            log[c] = i
        self._exp = exp + exp  # doubled so sums of two logs need no reduction
        self._log = log
        self._qm1 = q - 1
        self._neglog = 0 if p == 2 else (q - 1) // 2
        # Zech: 1 + g^i = g^zech[i]  (-1 when 1 + g^i = 0)
        zech = [-1] * (q - 1)
        if p != 2:
            for i, c in enumerate(exp):
                s = self._add_digits(1, c)
                zech[i] = log[s] if s else -1
        self._zech = zech
        self.np_exp = np.array(self._exp, dtype=np.int64)
        self.np_log = np.array(log, dtype=np.int64)
        self.np_zech = np.array(zech, dtype=np.int64)
        self.zero = FFElement(self, 0)
        self.one = FFElement(self, 1)
        self.gen = FFElement(self, p if k > 1 else exp[1 % (q - 1)])
        self.name = f"F{q}"

    # -- encoding helpers -------------------------------------------------
    def _add_digits(self, a, b):
        p = self.p
        if p == 2:
            return a ^ b
        out, w = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def digits(self, code):
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return out

    def from_digits(self, digits):
        code = 0
        for i, d in enumerate(digits):
            code += (int(d) % self.p) * self.p ** i
        if code >= self.q:
            raise ValueError("too many digits for this field")
        return FFElement(self, code)

    # -- raw code arithmetic ----------------------------------------------
    def add_codes(self, a, b):
        if self.p == 2:
            return a ^ b
        if not a:
            return b
        if not b:
            return a
        if self.k == 1:
            return (a + b) % self.p
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % self._qm1]
        return 0 if z < 0 else self._exp[la + z]

    def mul_codes(self, a, b):
        if not a or not b:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def neg_code(self, a):
        if not a or self.p == 2:
            return a
        return self._exp[self._log[a] + self._neglog]

    def inv_code(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero in " + self.name)
        return self._exp[(self._qm1 - self._log[a]) % self._qm1]

    # -- element construction ---------------------------------------------
    def __call__(self, x):
        if isinstance(x, FFElement):
            if x.field is self:
                return x
            raise TypeError(f"cannot coerce element of {x.field} into {self}")
        if isinstance(x, (int, np.integer)):
            return FFElement(self, int(x) % self.p)
        if isinstance(x, str):
            from .grammar import parse_scalar
            return parse_scalar(x, self)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def element(self, code):
        return FFElement(self, code)

    def elements(self):
        return [FFElement(self, c) for c in range(self.q)]

    def nonzero_elements(self):
        return [FFElement(self, c) for c in range(1, self.q)]

    def random(self, rng, nonzero=False):
        lo = 1 if nonzero else 0
        return FFElement(self, int(rng.integers(lo, self.q)))

    def frobenius_root(self, x, times=1):
        """The unique y with y**(p**times) == x (Frobenius is bijective)."""
        e = pow(self.p, (self.k - times) % self.k, self.q - 1) if self.k > 1 else 1
        return x ** e if x.code else x

    def trace(self, x):
        """Absolute trace to F_p, returned as an element of this field."""
        t, y = self.zero, x
        for _ in range(self.k):
            t = t + y
            y = y ** self.p
        return t

    def prime_subfield_basis(self):
        """Powers 1, g, ..., g^(k-1): an F_p-basis matching the code digits."""
        return [FFElement(self, self.p ** i) for i in range(self.k)]

    def descriptor(self):
        return self.name

    def parse_env(self):
        return {"g": self.gen} if self.k > 1 else {}

    def from_int(self, n):
        return FFElement(self, int(n) % self.p)

    def contains(self, x):
        return isinstance(x, FFElement) and x.field is self

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __reduce__(self):
        return (GF, (self.p, self.k, self.modulus if self.k > 1 else None))


def _order_mod(r, p):
    x, n = r % p, 1
    while x != 1:
        x = x * r % p
        n += 1
    return n


class FFElement:
    __slots__ = ("field", "code")

    def __init__(self, field, code):
        self.field = field
        self.code = code

    def _other(self, other):
        if isinstance(other, FFElement):
            if other.field is not self.field:
                raise TypeError(f"mixed fields {self.field} and {other.field}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return FFElement(self.field, self.field.add_codes(self.code, o))

    __radd__ = __add__

    def __neg__(self):
        return FFElement(self.field, self.field.neg_code(self.code))

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        F = self.field
        return FFElement(F, F.add_codes(self.code, F.neg_code(o)))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        F = self.field
        return FFElement(F, F.add_codes(o, F.neg_code(self.code)))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return FFElement(self.field, self.field.mul_codes(self.code, o))

    __rmul__ = __mul__

    def inverse(self):
        return FFElement(self.field, self.field.inv_code(self.code))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        F = self.field
        return FFElement(F, F.mul_codes(self.code, F.inv_code(o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        F = self.field
        return FFElement(F, F.mul_codes(o, F.inv_code(self.code)))

    def __pow__(self, n):
        F = self.field
        if not self.code:
            if n < 0:
                raise ZeroDivisionError("0 ** negative")
            return F.one if n == 0 else self
        e = (F._log[self.code] * n) % F._qm1
        return FFElement(F, F._exp[e])

    def __eq__(self, other):
        if isinstance(other, FFElement):
            return other.field is self.field and other.code == self.code
        if isinstance(other, (int, np.integer)):
            return self.code == int(other) % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        from .grammar import format_scalar
        return format_scalar(self)

    __str__ = __repr__

    def is_zero(self):
        return self.code == 0

    def is_one(self):
        return self.code == 1
