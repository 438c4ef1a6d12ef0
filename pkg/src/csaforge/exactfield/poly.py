"""Sparse multivariate polynomials over a finite field.

A polynomial is a dict mapping exponent tuples to nonzero field codes.  Terms
are ordered lexicographically on the exponent tuple (first variable most
significant); the leading term is the largest.
"""

from __future__ import annotations

from .grammar import format_ff, join_terms, monomial_string


class PolyRing:
    def __init__(self, field, names):
        self.field = field
        self.names = tuple(names)
        self.nvars = len(self.names)
        self._zero_exp = (0,) * self.nvars

    def __repr__(self):
        return f"{self.field.name}[{','.join(self.names)}]"

    def zero(self):
        return Poly(self, {})

    def one(self):
        return Poly(self, {self._zero_exp: 1})

    def const(self, code):
        return Poly(self, {self._zero_exp: code} if code else {})

    def var(self, i):
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        F = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = F.add_codes(out.get(e, 0), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.ring, out)

    def __neg__(self):
        F = self.ring.field
        return Poly(self.ring, {e: F.neg_code(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.ring.field
        if not self.terms or not other.terms:
            return Poly(self.ring, {})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = F.add_codes(out.get(e, 0), F.mul_codes(c1, c2))
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Poly(self.ring, out)

    def scale(self, code):
        F = self.ring.field
        if not code:
            return Poly(self.ring, {})
        return Poly(self.ring, {e: F.mul_codes(c, code) for e, c in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- inspection --------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_code(self):
        return self.terms.get(self.ring._zero_exp, 0)

    def leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=-1)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def variables(self):
        """Indices of variables that actually occur."""
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def min_exponents(self):
        if not self.terms:
            return self.ring._zero_exp
        it = iter(self.terms)
        m = list(next(it))
        for e in it:
            m = [min(a, b) for a, b in zip(m, e)]
        return tuple(m)

    def shift_down(self, exps):
        return Poly(self.ring, {tuple(a - b for a, b in zip(e, exps)): c
                                for e, c in self.terms.items()})

    def evaluate(self, values, target_mul, target_add, lift, one):
        """Evaluate at ``values`` (one per variable) in another ring.

        ``lift`` maps a coefficient code to the target ring.
        """
        total = None
        for e, c in self.terms.items():
            t = lift(c)
            for v, k in zip(values, e):
                if k:
                    t = target_mul(t, v ** k)
            total = t if total is None else target_add(total, t)
        return total if total is not None else lift(0)

    def univariate_coeffs(self, i):
        """Dense coefficient codes in variable i (requires no other variable)."""
        deg = self.degree_in(i)
        out = [0] * (deg + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return out

    def to_text(self):
        F = self.ring.field
        from .finite import FFElement
        terms = []
        for e in sorted(self.terms, reverse=True):
            coeff = format_ff(FFElement(F, self.terms[e]))
            terms.append((coeff, monomial_string(self.ring.names, e)))
        return join_terms(terms)

    def __repr__(self):
        return self.to_text()


class DenseUPoly:
    """Dense univariate polynomial over F_{p^k}, coefficients as codes.

    Mirrors the small part of the flint ``nmod_poly`` interface the function
    fields rely on, for bases that are not prime fields.
    """

    __slots__ = ("field", "c")

    def __init__(self, field, coeffs):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.field = field
        self.c = c

    def __add__(self, other):
        F = self.field
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = F.add_codes(out[i], v)
        return DenseUPoly(F, out)

    def __neg__(self):
        return DenseUPoly(self.field, [self.field.neg_code(v) for v in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.field
        if not self.c or not other.c:
            return DenseUPoly(F, [])
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        out[i + j] = F.add_codes(out[i + j], F.mul_codes(a, b))
        return DenseUPoly(F, out)

    def __pow__(self, n):
        result, base = DenseUPoly(self.field, [1]), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        return isinstance(other, DenseUPoly) and self.c == other.c

    def __hash__(self):
        return hash(tuple(self.c))

    def is_zero(self):
        return not self.c

    def is_one(self):
        return self.c == [1]

    def degree(self):
        return len(self.c) - 1

    def coeffs(self):
        return list(self.c)

    def leading_coefficient(self):
        return self.c[-1]

    def scale(self, code):
        F = self.field
        return DenseUPoly(F, [F.mul_codes(v, code) for v in self.c])

    def monic(self):
        return self.scale(self.field.inv_code(self.c[-1])) if self.c else self

    def divmod(self, other):
        F = self.field
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return DenseUPoly(F, []), self
        q = [0] * (dq + 1)
        inv = F.inv_code(other.c[-1])
        for i in range(dq, -1, -1):
            coef = F.mul_codes(r[i + len(other.c) - 1], inv)
            q[i] = coef
            if coef:
                nc = F.neg_code(coef)
                for j, b in enumerate(other.c):
                    r[i + j] = F.add_codes(r[i + j], F.mul_codes(nc, b))
        return DenseUPoly(F, q), DenseUPoly(F, r)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def gcd(self, other):
        a, b = self, other
        while b.c:
            a, b = b, a.divmod(b)[1]
        return a.monic()
