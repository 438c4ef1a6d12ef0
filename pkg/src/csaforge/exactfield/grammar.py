"""Canonical text encoding of scalars.

Grammar (whitespace is ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" ["-"] INT)?
    atom   := INT | NAME | "(" expr ")"

Integers are read modulo the characteristic.  ``g`` names the generator of a
finite field F_{p^k}; function fields add their variable names and towers add
their generator names.  Printing is canonical:

* prime-field residues print as decimal integers (``0 <= n < p``);
* F_{p^k} elements print as polynomials in ``g``, highest power first,
  e.g. ``g^2+g+1`` or ``2*g^3+1``;
* rational functions print as ``num`` or ``num/den``, with parentheses around
  a numerator or denominator that is not a single monomial;
* tower elements print as sums of ``coeff*monomial`` over the generator
  monomials, coefficients in the base grammar.

``parse_scalar(format_scalar(x), ring) == x`` holds for every element, and
``format_scalar(parse_scalar(s, ring)) == s`` for every canonical string.
"""

from __future__ import annotations

import re

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(.))")


class ParseError(ValueError):
    pass


def _tokens(text):
    out = []
    for num, name, sym in _TOKEN.findall(text):
        if num:
            out.append(("int", int(num)))
        elif name:
            out.append(("name", name))
        elif sym.strip():
            if sym not in "+-*/^()":
                raise ParseError(f"unexpected character {sym!r} in {text!r}")
            out.append(("sym", sym))
    return out


class _Parser:
    def __init__(self, text, env, from_int):
        self.toks = _tokens(text)
        self.pos = 0
        self.env = env
        self.from_int = from_int
        self.text = text

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, sym=None):
        tok = self.peek()
        if tok[0] is None or (sym is not None and tok != ("sym", sym)):
            raise ParseError(f"expected {sym or 'token'} in {self.text!r}")
        self.pos += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression")
        val = self.expr()
        if self.pos != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek() in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek() in (("sym", "*"), ("sym", "/")):
            op = self.take()[1]
            rhs = self.unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary(self):
        if self.peek() == ("sym", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            neg = False
            if self.peek() == ("sym", "-"):
                self.take()
                neg = True
            kind, n = self.take()
            if kind != "int":
                raise ParseError(f"exponent must be an integer in {self.text!r}")
            return base ** (-n if neg else n)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "int":
            return self.from_int(val)
        if kind == "name":
            if val not in self.env:
                raise ParseError(f"unknown name {val!r} in {self.text!r}")
            return self.env[val]
        if val == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


def parse_expression(text, env, from_int):
    """Evaluate ``text`` with names bound by ``env``; integers via ``from_int``."""
    return _Parser(text, env, from_int).parse()


def parse_scalar(text, ring):
    """Parse ``text`` into an element of ``ring`` (field, function field or tower)."""
    return parse_expression(str(text), ring.parse_env(), ring.from_int)


def _is_atomic(s):
    """True if s can be used as a factor without parentheses."""
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and (ch in "+/" or (ch == "-" and i > 0)):
            return False
    return True


def monomial_string(names, exps):
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def join_terms(terms):
    """Join (coeff_string, monomial_string) pairs into a sum."""
    out = []
    for coeff, mono in terms:
        if not mono:
            out.append(coeff)
        elif coeff == "1":
            out.append(mono)
        else:
            c = coeff if _is_atomic(coeff) else f"({coeff})"
            out.append(f"{c}*{mono}")
    return "+".join(out) if out else "0"


def format_ff(x):
    F = x.field
    if F.k == 1:
        return str(x.code)
    digits = F.digits(x.code)
    terms = []
    for i in range(F.k - 1, -1, -1):
        c = digits[i]
        if c:
            terms.append((str(c), monomial_string(("g",), (i,))))
    return join_terms(terms)


def format_scalar(x):
    fmt = getattr(x, "to_text", None)
    if fmt is not None:
        return fmt()
    from .finite import FFElement
    if isinstance(x, FFElement):
        return format_ff(x)
    if isinstance(x, int):
        return str(x)
    raise TypeError(f"no canonical encoding for {type(x).__name__}")


def wrap(s):
    return s if _is_atomic(s) and "*" not in s else f"({s})"
