"""Additive p-polynomials and one-parameter descent of r Artin-Schreier classes.

For an F_p-subspace V of F with basis lambda_1..lambda_r, psi_V(t) is the
product of (t - v) over V.  Classes a_1..a_r in E / wp(E) (wp(t) = t^p - t)
descend to the single parameter x = sum Theta_i(a_i), where
Theta_i o wp = psi_V(lambda_i t).  Constants k_i in F recover the classes:
c_i = k_i x is congruent to a_i modulo wp(E), with an explicit preimage.
"""

from __future__ import annotations

import itertools

from . import FORMAT_HEADER, linalg
from .exactfield import (GF, as_adjoin, field_from_descriptor, format_scalar, parse_scalar,
                         wp_map)
from .symbols import as_shift_iso


class InvalidBasis(ValueError):
    pass


class NotDivisible(ValueError):
    pass


class RecoveryError(RuntimeError):
    pass


class AdditivePolynomial:
    """psi(t) = sum c_i t^(p^i) over a field of characteristic p."""

    def __init__(self, coeffs, p, field):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and not coeffs[-1]:
            coeffs.pop()
        self.coeffs = coeffs or [field.zero]
        self.p = p
        self.field = field

    @classmethod
    def identity(cls, field):
        return cls([field.one], field.p, field)

    @classmethod
    def wp(cls, field):
        return cls([-field.one, field.one], field.p, field)

    @property
    def p_degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = None
        power = x
        for c in self.coeffs:
            term = power * c if c else None
            if term is not None:
                acc = term if acc is None else acc + term
            power = power ** self.p
        if acc is None:
            return x * self.field.zero
        return acc

    def compose(self, other):
        """(self o other)(t) = self(other(t))."""
        p = self.p
        out = [self.field.zero] * (self.p_degree + other.p_degree + 1)
        for m, a in enumerate(self.coeffs):
            if not a:
                continue
            for k, b in enumerate(other.coeffs):
                if b:
                    out[m + k] = out[m + k] + a * b ** (p ** m)
        return AdditivePolynomial(out, p, self.field)

    def scale_argument(self, lam):
        """t -> psi(lam t)."""
        return AdditivePolynomial([c * lam ** (self.p ** i) for i, c in enumerate(self.coeffs)],
                                  self.p, self.field)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero
        a = self.coeffs + [z] * (n - len(self.coeffs))
        b = other.coeffs + [z] * (n - len(other.coeffs))
        return AdditivePolynomial([x + y for x, y in zip(a, b)], self.p, self.field)

    def __eq__(self, other):
        return isinstance(other, AdditivePolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(c.code for c in self.coeffs))

    def to_text(self):
        return ";".join(format_scalar(c) for c in self.coeffs)

    @classmethod
    def from_text(cls, text, field):
        return cls([parse_scalar(t, field) for t in text.split(";")], field.p, field)

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "t" if i == 0 else f"t^{self.p ** i}"
                terms.append(mono if c.is_one() else f"({format_scalar(c)})*{mono}")
        return " + ".join(reversed(terms)) or "0"


def _fp_coords(x, field):
    """Coordinates of x over F_p in the power basis 1, g, g^2, ..."""
    if field.k == 1:
        return [x.code]
    # codes are polynomial representations with base-p digits
    out, c = [], x.code
    for _ in range(field.k):
        c, r = divmod(c, field.p)
        out.append(r)
    return out


class SubspaceBasis:
    """F_p-linearly independent lambda_1..lambda_r in a finite field F."""

    def __init__(self, lambdas, field=None):
        lambdas = list(lambdas)
        if not lambdas:
            raise InvalidBasis("empty basis")
        field = field or lambdas[0].field
        if not linalg.is_finite(field):
            raise InvalidBasis("the subspace must live in a finite field")
        self.field = field
        self.p = field.p
        self.lambdas = [field(x) if isinstance(x, (int, str)) else x for x in lambdas]
        rows = [_fp_coords(x, field) for x in self.lambdas]
        if linalg.rank([[GF(self.p)(v) for v in r] for r in rows], GF(self.p)) != len(rows):
            raise InvalidBasis("basis elements are F_p-linearly dependent")

    @property
    def r(self):
        return len(self.lambdas)

    def elements(self):
        F = self.field
        out = []
        for digits in itertools.product(range(self.p), repeat=self.r):
            v = F.zero
            for d, lam in zip(digits, self.lambdas):
                v = v + lam * d
            out.append(v)
        return out

    def to_text(self):
        return ",".join(format_scalar(x) for x in self.lambdas)

    @classmethod
    def parse(cls, text, field):
        return cls([parse_scalar(t, field) for t in text.split(",")], field)


def psi_subspace(basis):
    """psi_V(t) = prod over v in V of (t - v), checked to be additive with kernel V."""
    F, p = basis.field, basis.p
    V = basis.elements()
    poly = [F.one]
    for v in V:
        nxt = [F.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * v
        poly = nxt
    coeffs = []
    for e, c in enumerate(poly):
        k = _log_p(e, p)
        if k is None:
            if c:
                raise AssertionError(f"psi_V has a non p-power exponent {e}")
        else:
            coeffs.append(c)
    psi = AdditivePolynomial(coeffs, p, F)
    for v in V:
        if psi(v):
            raise AssertionError("psi_V does not vanish on V")
    return psi


def _log_p(e, p):
    if e < 1:
        return None
    k = 0
    while e % p == 0:
        e //= p
        k += 1
    return k if e == 1 else None


def right_divide_wp(Psi):
    """Theta with Theta o wp = Psi; needs Psi(1) = 0."""
    F, p = Psi.field, Psi.p
    c = Psi.coeffs
    K = len(c) - 1
    if K == 0:
        raise NotDivisible("a linear polynomial is not divisible by wp unless zero")
    # coefficient of t^(p^k) in Theta o wp is theta_{k-1} - theta_k
    theta = [F.zero] * K
    theta[K - 1] = c[K]
    for k in range(K - 1, 0, -1):
        theta[k - 1] = c[k] + theta[k]
    if -theta[0] != c[0]:
        raise NotDivisible(f"Psi(1) = {format_scalar(sum(c, F.zero))} is nonzero")
    Theta = AdditivePolynomial(theta, p, F)
    if Theta.compose(AdditivePolynomial.wp(F)) != Psi:
        raise AssertionError("right division by wp failed its composition check")
    return Theta


def wp_reduce(Q):
    """red(Q) in F with Q(a) - red(Q) a in wp(E) for every extension E."""
    F = Q.field
    out = F.zero
    for m, c in enumerate(Q.coeffs):
        if c:
            out = out + F.frobenius_root(c, m) if m else out + c
    return out


def wp_preimage_of_difference(Q, a):
    """s with wp(s) = Q(a) - red(Q) a, by telescoping c a^(p^m) - c^(p^-m) a."""
    F, p = Q.field, Q.p
    s = a * F.zero
    for m, c in enumerate(Q.coeffs):
        if not c or m == 0:
            continue
        for j in range(m):
            s = s + a ** (p ** (m - j - 1)) * F.frobenius_root(c, j + 1)
    return s


def recovery_constants(thetas, field):
    """k_i in F with red(k_i Theta_j) = delta_ij, solved F_p-linearly."""
    F, p = field, field.p
    Fp = GF(p)
    n = F.k
    gbasis = [F.gen ** i for i in range(n)] if n > 1 else [F.one]
    r = len(thetas)
    ks = []
    for i in range(r):
        rows, rhs = [], []
        images = [[_fp_coords(wp_reduce(AdditivePolynomial([b * c for c in th.coeffs], p, F)), F)
                   for b in gbasis] for th in thetas]
        for j in range(r):
            target = _fp_coords(F.one if i == j else F.zero, F)
            for coord in range(n):
                rows.append([Fp(images[j][col][coord]) for col in range(n)])
                rhs.append(Fp(target[coord]))
        sol = linalg.solve(rows, rhs, Fp)
        if sol is None:
            raise RecoveryError(f"no recovery constant for class {i + 1}")
        k = F.zero
        for coef, b in zip(sol, gbasis):
            k = k + b * coef.code
        ks.append(k)
    return ks


class DescentRecord:
    def __init__(self, basis, a, psi, thetas, x, ks=None, cs=None, preimages=None,
                 indeterminate=False):
        self.basis = basis
        self.a = list(a)
        self.psi = psi
        self.thetas = thetas
        self.x = x
        self.ks = ks
        self.cs = cs
        self.preimages = preimages
        self.indeterminate = indeterminate
        self.trivial = False  # every a_i already lies in F, so c_i = a_i
        self.b = None
        self.generators = None
        self.shift_isos = None

    @property
    def E(self):
        return _ring_of(self.a[0], self.basis.field)

    def to_text(self):
        E = self.E
        lines = [FORMAT_HEADER, "record dec", f"field {E.descriptor()}",
                 f"basefield {self.basis.field.descriptor()}", f"basis {self.basis.to_text()}"]
        for i, a in enumerate(self.a):
            lines.append(f"a {i + 1} {format_scalar(a)}")
        for i, th in enumerate(self.thetas):
            lines.append(f"theta {i + 1} {th.to_text()}")
        lines.append(f"x {format_scalar(self.x)}")
        for i in range(len(self.a)):
            if self.ks:
                lines.append(f"k {i + 1} {format_scalar(self.ks[i])}")
                lines.append(f"c {i + 1} {format_scalar(self.cs[i])}")
                lines.append(f"s {i + 1} {format_scalar(self.preimages[i])}")
        if self.b is not None:
            for i, b in enumerate(self.b):
                lines.append(f"b {i + 1} {format_scalar(b)}")
        if self.generators is not None:
            lines.append("generators " + ",".join(self.generators))
        if self.indeterminate:
            lines.append("status indeterminate")
        elif self.trivial:
            lines.append("status trivial")
        return "\n".join(lines) + "\n"


def _ring_of(x, default):
    return getattr(x, "field", None) or default


def _coerce(E, x):
    if getattr(x, "field", None) is E:
        return x
    if linalg.is_finite(getattr(x, "field", None) or E) and not linalg.is_finite(E):
        return E.lift(x)
    return E(x) if isinstance(x, (int, str)) else x


def descent_parameter(a, basis, E=None):
    """x = sum Theta_i(a_i) and the recovered c_i = k_i x with wp-preimages of c_i - a_i."""
    F = basis.field
    if len(a) != basis.r:
        raise ValueError(f"{len(a)} classes for a basis of size {basis.r}")
    E = E or _ring_of(a[0], F)
    a = [_coerce(E, t) for t in a]
    psi = psi_subspace(basis)
    thetas = [right_divide_wp(psi.scale_argument(lam)) for lam in basis.lambdas]
    x = a[0] * F.zero
    for th, ai in zip(thetas, a):
        x = x + th(ai)
    try:
        ks = recovery_constants(thetas, F)
    except RecoveryError:
        return DescentRecord(basis, a, psi, thetas, x, indeterminate=True)
    cs, pre = [], []
    for i, k in enumerate(ks):
        c = x * k
        s = a[0] * F.zero
        for j, (th, aj) in enumerate(zip(thetas, a)):
            Q = AdditivePolynomial([k * t for t in th.coeffs], F.p, F)
            s = s + wp_preimage_of_difference(Q, aj)
        if wp_map(s) != c - a[i]:
            raise AssertionError("wp-preimage of c_i - a_i failed")
        cs.append(c)
        pre.append(s)
    return DescentRecord(basis, a, psi, thetas, x, ks, cs, pre)


class DescentCheck:
    def __init__(self, ok, message=""):
        self.ok, self.message = ok, message

    def __bool__(self):
        return self.ok


def verify_descent(record, a=None, basis=None, E=None):
    """Oracle check over a finite field E.

    Adjoin y_i with wp(y_i) = a_i, set y = sum lambda_i y_i and require
    psi_V(y) = x exactly; then require Tr(a_i - c_i) = 0 and wp(s_i) = c_i - a_i.
    """
    a = list(a if a is not None else record.a)
    basis = basis or record.basis
    E = E or _ring_of(a[0], basis.field)
    if not linalg.is_finite(E):
        return DescentCheck(False, "verify_descent needs a finite field")
    psi = psi_subspace(basis)
    for i, (lam, th) in enumerate(zip(basis.lambdas, record.thetas)):
        if th.compose(AdditivePolynomial.wp(basis.field)) != psi.scale_argument(lam):
            return DescentCheck(False, f"Theta_{i + 1} o wp != Psi_{i + 1}")
    ring = E
    for i, ai in enumerate(a):
        ring = as_adjoin(ring, ai, name=f"y{i + 1}")
    ys = ring.generators() if hasattr(ring, "generators") else []
    y = ring.zero
    for lam, yi in zip(basis.lambdas, ys):
        y = y + yi * lam
    if psi(y) != ring.lift(record.x):
        return DescentCheck(False, "psi_V(y) != x")
    if record.cs is None:
        return DescentCheck(False, "record has no recovered classes")
    for i, (ai, ci, si) in enumerate(zip(a, record.cs, record.preimages)):
        if E.trace(ai - ci):
            return DescentCheck(False, f"a_{i + 1} - c_{i + 1} has nonzero trace")
        if wp_map(si) != ci - ai:
            return DescentCheck(False, f"s_{i + 1} is not a wp-preimage of c_{i + 1} - a_{i + 1}")
        if record.trivial:
            if ci != ai:
                return DescentCheck(False, f"trivial record but c_{i + 1} != a_{i + 1}")
        elif ci != record.x * record.ks[i]:
            return DescentCheck(False, f"c_{i + 1} is not k_{i + 1} x")
    return DescentCheck(True, "ok")


def _in_base(x, F):
    if getattr(x, "field", None) is F:
        return True
    return hasattr(x, "is_constant") and x.is_constant() and x.field.base is F


def dec_upper_witness(symbols, basis, E=None):
    """Descend the symbols [a_i, b_i) to L = F(x)(b_1..b_r), with shift isos over E."""
    F = basis.field
    a = [s[0] for s in symbols]
    b = [s[1] for s in symbols]
    E = E or next((getattr(t, "field", None) for t in a + b
                   if not linalg.is_finite(getattr(t, "field", F))), None) or F
    a = [_coerce(E, t) for t in a]
    b = [_coerce(E, t) for t in b]
    rec = descent_parameter(a, basis, E)
    if rec.indeterminate:
        return rec
    rec.b = b
    if all(_in_base(t, F) for t in a):
        # nothing to descend: L = F(b_1..b_r)
        rec.cs = list(a)
        rec.preimages = [t * F.zero for t in a]
        rec.trivial = True
        gens = []
    else:
        gens = ["x"]
    gens += [f"b{i + 1}" for i in range(len(b)) if not _in_base(b[i], F)]
    rec.generators = gens
    isos = []
    for ai, bi, si in zip(a, b, rec.preimages):
        iso = as_shift_iso(F.p, ai, bi, si, field=E)
        iso.verify()
        isos.append(iso)
    rec.shift_isos = isos
    if len(gens) > basis.r + 1:
        raise AssertionError("descent field needs more than r + 1 generators")
    return rec


def record_from_text(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ValueError(f"missing {FORMAT_HEADER} header")
    if len(lines) < 2 or lines[1] != "record dec":
        raise ValueError("not a dec record")
    kv = {}
    indexed = {}
    for ln in lines[2:]:
        parts = ln.split(None, 2)
        if parts[0] in ("a", "theta", "k", "c", "s", "b"):
            indexed.setdefault(parts[0], {})[int(parts[1])] = parts[2]
        else:
            kv[parts[0]] = ln.split(None, 1)[1] if len(parts) > 1 else ""
    E = field_from_descriptor(kv["field"])
    F = field_from_descriptor(kv.get("basefield", kv["field"]))
    basis = SubspaceBasis.parse(kv["basis"], F)

    def seq(key, ring):
        d = indexed.get(key, {})
        return [parse_scalar(d[i], ring) for i in sorted(d)] if d else None

    a = seq("a", E)
    thetas = [AdditivePolynomial.from_text(indexed["theta"][i], F)
              for i in sorted(indexed["theta"])]
    x = parse_scalar(kv["x"], E)
    ks = seq("k", F)
    rec = DescentRecord(basis, a, psi_subspace(basis), thetas, x, ks, seq("c", E), seq("s", E),
                        indeterminate=kv.get("status") == "indeterminate")
    rec.trivial = kv.get("status") == "trivial"
    rec.b = seq("b", E)
    if "generators" in kv:
        rec.generators = [g for g in kv["generators"].split(",") if g]
    return rec


def verify_record_text(text):
    try:
        rec = record_from_text(text)
    except (ValueError, KeyError) as exc:
        return DescentCheck(False, f"parse: {exc}")
    if rec.indeterminate:
        return DescentCheck(False, "record is marked indeterminate")
    E = rec.E
    if linalg.is_finite(E):
        return verify_descent(rec)
    # infinite E: witness checks only
    x = rec.a[0] * rec.basis.field.zero
    for th, ai in zip(rec.thetas, rec.a):
        x = x + th(ai)
    if x != rec.x:
        return DescentCheck(False, "x != sum Theta_i(a_i)")
    if rec.cs is None or rec.preimages is None:
        return DescentCheck(False, "record has no recovered classes")
    for i, (ai, ci, si) in enumerate(zip(rec.a, rec.cs, rec.preimages)):
        if wp_map(si) != ci - ai:
            return DescentCheck(False, f"s_{i + 1} is not a wp-preimage of c_{i + 1} - a_{i + 1}")
        if not rec.trivial and ci != rec.x * rec.ks[i]:
            return DescentCheck(False, f"c_{i + 1} is not k_{i + 1} x")
    return DescentCheck(True, "ok (witness checks; E is infinite)")
