"""The degree-8 classifying construction in characteristic 2.

Points of the 13-coordinate variety X carry the algebra

    B' = [a, e) (x) [b, x+u) (x) [c, z+v) (x) [d, pnorm)

of degree 16.  Inside B' the commutative ring S = K[alpha, beta, gamma] is
spanned by the u-generators of the first three factors, pnorm is a norm from
S(delta)/S, so [d, pnorm)_S splits and gives matrix units E_ij.  Their
centralizer B has degree 8 and B' = M_2(B).

The coordinate written p in the usual presentation of X is called ``pnorm``
here, to keep it apart from the characteristic.
"""

from __future__ import annotations

import collections
import hashlib

import numpy as np

from . import FORMAT_HEADER, linalg
from .algcore import (AlgebraElement, AlgebraHom, MatrixUnits, StructureConstantAlgebra,
                      algebra_from_lines, csa_test, matrix_algebra, tensor)
from .brauercalc import (BrauerWord, RowenChainData, comeeed_witness, witness_inv, witness_lift,
                         witness_mul, witness_shift)
from .exactfield import as_adjoin, field_from_descriptor, format_scalar, parse_scalar
from .symbols import NormWitness, quaternion

COORDINATES = ("a", "b", "c", "d", "e", "u", "v", "w", "x", "y", "z", "m", "n")
FREE_COORDINATES = ("a", "e", "u", "v", "w", "x", "y", "z", "m", "n")
DERIVED_COORDINATES = ("d", "b", "c")
Q_FACTORS = ("a", "b", "c", "d", "e", "pnorm", "N(w+x alpha)", "N(y+z alpha)", "N(g+f alpha)")


class InvalidPoint(ValueError):
    def __init__(self, condition, message=None):
        super().__init__(message or f"point violates {condition}")
        self.condition = condition


class SamplingError(RuntimeError):
    def __init__(self, message, stats):
        super().__init__(message)
        self.stats = stats


class CertificateError(RuntimeError):
    def __init__(self, stage, message):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class NormalizationError(ValueError):
    pass


# -- coordinates --------------------------------------------------------------------


class AuxValues:
    def __init__(self, f, g, r, h, l, pnorm, q, factors):  # noqa: E741
        self.f, self.g, self.r, self.h, self.l = f, g, r, h, l
        self.pnorm, self.q = pnorm, q
        self.factors = factors  # list of (name, value) whose product is q

    def as_dict(self):
        return {"f": self.f, "g": self.g, "r": self.r, "h": self.h, "l": self.l,
                "pnorm": self.pnorm, "q": self.q}


def eval_aux(pt):
    """f, g, r, h, l, pnorm and q from the coordinates (a mapping or a point)."""
    c = pt.coords if isinstance(pt, ClassifyingPoint) else pt
    a, b, cc, d, e = c["a"], c["b"], c["c"], c["d"], c["e"]
    u, v, w, x, y, z, m, n = (c[k] for k in ("u", "v", "w", "x", "y", "z", "m", "n"))
    f = x * z + w * z + x * y
    g = w * y + x * z * a
    ns = w * w + w * x + x * x * a
    nt = y * y + y * z + z * z * a
    ng = g * g + g * f + f * f * a
    r = ng + m * m + m * n
    h = ns + 1 + u + u * u * d
    l = nt + 1 + v + v * v * d  # noqa: E741
    pnorm = (u + x) * (v + z) * (n + f)
    factors = list(zip(Q_FACTORS, (a, b, cc, d, e, pnorm, ns, nt, ng)))
    q = a
    for _, val in factors[1:]:
        q = q * val
    return AuxValues(f, g, r, h, l, pnorm, q, factors)


class ClassifyingPoint:
    def __init__(self, field, coords):
        self.field = field
        self.coords = {k: coords[k] for k in COORDINATES}

    def __getattr__(self, name):
        coords = self.__dict__.get("coords")
        if coords is not None and name in coords:
            return coords[name]
        raise AttributeError(name)

    def aux(self):
        return eval_aux(self)

    def to_lines(self):
        return [f"{k} {format_scalar(self.coords[k])}" for k in COORDINATES]

    def to_text(self, extra=()):
        lines = [FORMAT_HEADER, "point rowen82", f"field {self.field.descriptor()}"]
        lines += list(extra)
        lines += self.to_lines()
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return "ClassifyingPoint(" + ", ".join(f"{k}={format_scalar(v)}"
                                               for k, v in self.coords.items()) + ")"


def validate_point(coords, field=None):
    """Check bu^2 = h, cv^2 = l, dn^2 = r, each factor of q, and u, v, n != 0."""
    if not isinstance(coords, dict):
        coords = dict(zip(COORDINATES, coords))
    missing = [k for k in COORDINATES if k not in coords]
    if missing:
        raise InvalidPoint("coordinates", f"missing coordinates {missing}")
    if field is None:
        field = _field_of(coords["a"])
    coords = {k: _coerce(field, coords[k]) for k in COORDINATES}
    aux = eval_aux(coords)
    if coords["b"] * coords["u"] ** 2 != aux.h:
        raise InvalidPoint("bu^2=h")
    if coords["c"] * coords["v"] ** 2 != aux.l:
        raise InvalidPoint("cv^2=l")
    if coords["d"] * coords["n"] ** 2 != aux.r:
        raise InvalidPoint("dn^2=r")
    for name, val in aux.factors:
        if not val:
            raise InvalidPoint("q!=0", f"q = 0: factor {name} vanishes")
    for name in ("u", "v", "n"):
        if not coords[name]:
            raise InvalidPoint(f"{name}!=0", f"chart condition {name} != 0 fails")
    return ClassifyingPoint(field, coords)


def _field_of(x):
    f = getattr(x, "field", None)
    if f is None:
        raise InvalidPoint("coordinates", "cannot infer the field")
    return f


def _coerce(field, x):
    if isinstance(x, (int, str)):
        return field(x)
    return x


class SamplerStats:
    def __init__(self):
        self.attempts = 0
        self.draws = collections.Counter()
        self.failures = collections.Counter()

    def summary(self):
        fails = ", ".join(f"{k}: {v}" for k, v in self.failures.most_common())
        return f"{self.attempts} attempts; failing factors: {fails or 'none'}"


def _draw(field, rng, degree, nonzero):
    if linalg.is_finite(field):
        return field.random(rng, nonzero=nonzero)
    x = field.random(rng, degree=degree, nonzero=nonzero)
    return field.check_coordinate(x)


def derive_coordinates(free):
    """d = r / n^2, then b = h / u^2 and c = l / v^2 from the ten free coordinates."""
    a, u, v, w, x, y, z, m, n = (free[k] for k in ("a", "u", "v", "w", "x", "y", "z", "m", "n"))
    f = x * z + w * z + x * y
    g = w * y + x * z * a
    d = (g * g + g * f + f * f * a + m * m + m * n) / (n * n)
    b = (w * w + w * x + x * x * a + 1 + u + u * u * d) / (u * u)
    c = (y * y + y * z + z * z * a + 1 + v + v * v * d) / (v * v)
    return {"d": d, "b": b, "c": c}


def sample_point(field, seed, budget=500, degree=2, stats=None):
    """Sample a point of X on the chart u, v, n != 0.

    Exactly the ten FREE_COORDINATES are drawn; d = r / n^2, then
    b = h / u^2 and c = l / v^2 are derived (h and l involve d).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    stats = stats if stats is not None else SamplerStats()
    for _ in range(budget):
        stats.attempts += 1
        free = {}
        for name in FREE_COORDINATES:
            free[name] = _draw(field, rng, degree, nonzero=name in ("u", "v", "n"))
            stats.draws[name] += 1
        coords = dict(free, **derive_coordinates(free))
        aux = eval_aux(coords)
        bad = [name for name, val in aux.factors if not val]
        if bad:
            stats.failures.update(bad)
            continue
        pt = validate_point(coords, field)
        pt.stats = stats
        return pt
    raise SamplingError(f"no point with q != 0 after {budget} attempts ({stats.summary()})", stats)


# -- the algebra B' and the ring S ---------------------------------------------------------


def s_ring(point):
    """S = K[alpha, beta, gamma] with alpha^2 + alpha = a, beta^2 + beta = b, gamma^2 + gamma = c."""
    K = point.field
    T = as_adjoin(K, point.a, name="alpha")
    S2 = as_adjoin(T, point.b, name="beta")
    return as_adjoin(S2, point.c, name="gamma")


def build_Bprime(point):
    """[a,e) (x) [b,x+u) (x) [c,z+v) (x) [d,pnorm), dim 256."""
    aux = point.aux()
    K = point.field
    slots = [(point.a, point.e), (point.b, point.x + point.u), (point.c, point.z + point.v),
             (point.d, aux.pnorm)]
    for i, (_, s) in enumerate(slots):
        if not s:
            raise InvalidPoint("q!=0", f"factor {i + 1} has a zero b-slot")
    Q = [quaternion(a, b, K, suffix=str(i + 1)) for i, (a, b) in enumerate(slots)]
    Bp = tensor(tensor(tensor(Q[0], Q[1]), Q[2]), Q[3], name="B'")
    Bp.quaternions = Q
    return Bp


def bprime_index(i1, i2, i3, i4):
    return ((i1 * 4 + i2) * 4 + i3) * 4 + i4


def s_into_bprime(Bp, s):
    """Image of s in S under alpha, beta, gamma -> u1, u2, u3."""
    F = Bp.field
    coords = [F.zero] * Bp.dim
    for idx, val in enumerate(s.coords()):
        if val:
            e1, e2, e3 = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1
            coords[bprime_index(e1, e2, e3, 0)] = val
    return AlgebraElement(Bp, coords)


_S_POSITIONS = [bprime_index(i & 1, (i >> 1) & 1, (i >> 2) & 1, 0) for i in range(8)]


def s_from_bprime(S, x):
    """Read x as an element of S, or None if x is not supported on S."""
    support = set(x.support())
    if not support <= set(_S_POSITIONS):
        return None
    return S.from_coords([x.coords[p] for p in _S_POSITIONS])


def p_norm_witness(point, S=None):
    """Witness (X, Y) over S with pnorm = X^2 + XY + d Y^2."""
    S = S or s_ring(point)
    K = point.field
    T = S.layers()[0]
    beta, gamma = S.generators()[1], S.generators()[2]
    a, b, c, d = point.a, point.b, point.c, point.d
    aux = point.aux()
    one = K.one
    # (x+u)(w+x alpha) in N_T(b+d), then in N_S(d)
    w1 = comeeed_witness(K, a, point.w, point.x, one, point.u, b + d, T=T)
    w1 = witness_shift(w1, beta, S.lift(d))
    # (z+v)(y+z alpha) in N_T(c+d), then in N_S(d)
    w2 = comeeed_witness(K, a, point.y, point.z, one, point.v, c + d, T=T)
    w2 = witness_shift(w2, gamma, S.lift(d))
    # (n+f)(g+f alpha) in N_T(d), with (w+x alpha)(y+z alpha) = g + f alpha
    alpha = T.gen
    st = (T.lift(point.w) + alpha * point.x) * (T.lift(point.y) + alpha * point.z)
    gf = T.lift(aux.g) + alpha * aux.f
    if st != gf:
        raise CertificateError("pwitness", "(w+x alpha)(y+z alpha) != g + f alpha")
    w3 = comeeed_witness(K, a, aux.g, aux.f, point.m, point.n, d, T=T)
    w3 = witness_lift(w3, S)
    prod = witness_mul(witness_mul(w1, w2), w3)
    # divide by (g + f alpha)^2, a norm with witness (g + f alpha, 0)
    gfS = S.lift(gf)
    sq = NormWitness(S.lift(d), gfS * gfS, gfS, S.zero).check()
    final = witness_mul(prod, witness_inv(sq))
    if final.b != S.lift(aux.pnorm):
        raise CertificateError("pwitness", "witness value differs from pnorm")
    return final


def matrix_units(Bp, S, witness, point):
    """Matrix units of the split [d, pnorm)_S inside B'.

    With P = X^2 + XY + dY^2 and U, V the generators of the last factor:
    E11 = 1 + U + P^-1 (dY + (X+Y) U) V,  E21 = U E11,  E12 = d^-1 E11 U,
    E22 = 1 + E11.
    """
    one = Bp.one()
    U = Bp.basis(bprime_index(0, 0, 0, 1))
    V = Bp.basis(bprime_index(0, 0, 0, 2))
    X, Y = witness.x, witness.y
    d = point.d
    Pinv = point.aux().pnorm.inverse()
    cY = s_into_bprime(Bp, Y * S.lift(d)) * Pinv
    cXY = s_into_bprime(Bp, X + Y) * Pinv
    E11 = one + U + (cY + cXY * U) * V
    E21 = U * E11
    E12 = E11 * U * d.inverse()
    E22 = one + E11
    units = MatrixUnits(E11, E12, E21, E22)
    if not units.verify():
        raise CertificateError("units", "matrix unit relations fail")
    return units


# -- the centralizer B as a crossed product ---------------------------------------------


def _sigma(S, s, mask):
    """Apply alpha_i -> alpha_i + 1 for every bit i of ``mask``."""
    c = list(s.coords())
    for bit in (1, 2, 4):
        if mask & bit:
            for idx in range(8):
                if idx & bit:
                    c[idx ^ bit] = c[idx ^ bit] + c[idx]
    return S.from_coords(c)


def _gword_normal_form(S, word, z, t):
    """Reduce g_{i1} ... g_{ik} to coeff * g^eps using g_i^2 = z_i and g_j g_i = t_ji g_i g_j."""
    coeff = S.one
    word = list(word)
    while True:
        for k in range(len(word) - 1):
            if word[k] >= word[k + 1]:
                break
        else:
            eps = 0
            for i in word:
                eps |= 1 << i
            return coeff, eps
        mask = 0
        for i in word[:k]:
            mask ^= 1 << i
        j, i = word[k], word[k + 1]
        if i == j:
            coeff = coeff * _sigma(S, z[i], mask)
            word = word[:k] + word[k + 2:]
        else:
            coeff = coeff * _sigma(S, t[(j, i)], mask)
            word = word[:k] + [i, j] + word[k + 2:]


def _letters(eps):
    return [i for i in range(3) if eps >> i & 1]


B_LABELS = []
for _eps in range(8):
    for _m in range(8):
        parts = [n for bit, n in zip((1, 2, 4), ("alpha", "beta", "gamma")) if _m & bit]
        parts += [f"g{i + 1}" for i in _letters(_eps)]
        B_LABELS.append("*".join(parts) or "1")


class CrossedProductData:
    """The generators g_i of B inside B' and their relations over S."""

    def __init__(self, Bp, S, units):
        self.Bp, self.S, self.units = Bp, S, units
        self.g, self.z, self.t = [], {}, {}
        for i in range(3):
            g, zi = self._unit_generator(i)
            self.g.append(g)
            self.z[i] = zi
        for j in range(3):
            for i in range(j):
                self.t[(j, i)] = self._solve_t(j, i)

    def _candidates(self, i):
        """phi(V_i q) for q in the last quaternion factor, phi(x) = E11 x E11 + E21 x E12.

        Each candidate is sigma_i-semilinear over S and commutes with the units.
        When S is not a field the plain choice q = 1 can be a zero divisor, so a
        fixed list of q is tried in order.
        """
        Bp, E = self.Bp, self.units
        Vi = Bp.basis(bprime_index(*[2 if k == i else 0 for k in range(3)], 0))
        Q = [Bp.basis(bprime_index(0, 0, 0, k)) for k in range(4)]
        qs = list(Q) + [Q[a] + Q[b] for a in range(4) for b in range(a + 1, 4)]
        qs += [Q[0] + Q[1] + Q[2], Q[0] + Q[1] + Q[3], Q[0] + Q[2] + Q[3], Q[1] + Q[2] + Q[3],
               Q[0] + Q[1] + Q[2] + Q[3]]
        for q in qs:
            x = Vi * q
            yield E[(1, 1)] * x * E[(1, 1)] + E[(2, 1)] * x * E[(1, 2)]

    def _is_unit(self, s):
        S = self.S
        K = self.Bp.field
        cols = []
        for m in range(8):
            c = [K.zero] * 8
            c[m] = K.one
            cols.append((s * S.from_coords(c)).coords())
        return linalg.rank(cols, K) == 8

    def _unit_generator(self, i):
        for g in self._candidates(i):
            zi = s_from_bprime(self.S, g * g)
            if zi is None:
                raise CertificateError("relations", f"g{i + 1}^2 is not in S")
            if self._is_unit(zi):
                return g, zi
        raise CertificateError("relations", f"no candidate g{i + 1} is a unit")

    def _solve_t(self, j, i):
        Bp, S = self.Bp, self.S
        lhs = self.g[j] * self.g[i]
        rhs = self.g[i] * self.g[j]
        cols = []
        for m in range(8):
            mono = [Bp.field.zero] * 8
            mono[m] = Bp.field.one
            cols.append((s_into_bprime(Bp, S.from_coords(mono)) * rhs).coords)
        rows = [[col[r] for col in cols] for r in range(Bp.dim)]
        keep = [r for r in range(Bp.dim) if any(rows[r]) or lhs.coords[r]]
        sol = linalg.solve([rows[r] for r in keep], [lhs.coords[r] for r in keep], Bp.field)
        if sol is None:
            raise CertificateError("relations", f"g{j + 1} g{i + 1} is not an S-multiple "
                                                f"of g{i + 1} g{j + 1}")
        return S.from_coords(sol)

    def check_relations(self):
        """Commutation with the units, twisted commutation with S, and the t relations."""
        Bp, S, E = self.Bp, self.S, self.units
        gens = [s_into_bprime(Bp, x) for x in S.generators()]
        for i, g in enumerate(self.g):
            for e in E.as_list():
                if g * e != e * g:
                    raise CertificateError("relations", f"g{i + 1} does not commute with units")
            for k, s in enumerate(S.generators()):
                want = s_into_bprime(Bp, _sigma(S, s, 1 << i)) * g
                if g * gens[k] != want:
                    raise CertificateError("relations", f"g{i + 1} s != sigma(s) g{i + 1}")
        for s in gens:
            for e in E.as_list():
                if s * e != e * s:
                    raise CertificateError("relations", "S does not commute with units")
        for (j, i), t in self.t.items():
            if self.g[j] * self.g[i] != s_into_bprime(Bp, t) * self.g[i] * self.g[j]:
                raise CertificateError("relations", f"t{j + 1}{i + 1} relation fails")
        return True

    def g_power(self, eps):
        x = self.Bp.one()
        for i in _letters(eps):
            x = x * self.g[i]
        return x

    def structure_constants(self):
        S = self.S
        K = self.Bp.field
        monos = []
        for m in range(8):
            c = [K.zero] * 8
            c[m] = K.one
            monos.append(S.from_coords(c))
        nf = {}
        for e1 in range(8):
            for e2 in range(8):
                nf[(e1, e2)] = _gword_normal_form(S, _letters(e1) + _letters(e2), self.z, self.t)
        twisted = {(m, e): _sigma(S, monos[m], e) for m in range(8) for e in range(8)}
        products = []
        for i in range(64):
            e1, m1 = divmod(i, 8)
            for j in range(64):
                e2, m2 = divmod(j, 8)
                coeff, eps = nf[(e1, e2)]
                s = monos[m1] * twisted[(m2, e1)] * coeff
                terms = []
                for m, val in enumerate(s.coords()):
                    if val:
                        terms.append((eps * 8 + m, None if val.is_one() else val))
                products.append(tuple(terms))
        return products

    def inclusion_columns(self):
        Bp, S, K = self.Bp, self.S, self.Bp.field
        cols = []
        for eps in range(8):
            G = self.g_power(eps)
            for m in range(8):
                c = [K.zero] * 8
                c[m] = K.one
                cols.append((s_into_bprime(Bp, S.from_coords(c)) * G).coords)
        return cols


def _v_degree(idx):
    i1, rest = divmod(idx, 64)
    i2, rest = divmod(rest, 16)
    i3 = rest // 4
    return (i1 >= 2) | ((i2 >= 2) << 1) | ((i3 >= 2) << 2)


def _iso_rank(cols, field):
    """Rank of the M_2 (x) B -> B' matrix, block by block in the (Z/2)^3 v-grading."""
    total = 0
    for eps in range(8):
        block_cols = [c for idx, c in enumerate(cols) if (idx % 64) // 8 == eps]
        rows_idx = [r for r in range(256) if _v_degree(r) == eps]
        for c in block_cols:
            if any(c[r] for r in range(256) if _v_degree(r) != eps):
                raise CertificateError("iso", "image leaves its graded block")
        block = [[c[r] for c in block_cols] for r in rows_idx]
        total += linalg.rank(block, field)
    return total


class ClassifyingCertificate:
    def __init__(self, point, Bprime, pWitness, units, B, iso, csa_Bprime, csa_B, iso_rank,
                 relations, split_check=None):
        self.point = point
        self.Bprime = Bprime
        self.pWitness = pWitness
        self.units = units
        self.B = B
        self.iso = iso
        self.csaReports = {"Bprime": csa_Bprime, "B": csa_B}
        self.iso_rank = iso_rank
        self.relations = relations
        self.split_check = split_check

    @property
    def ok(self):
        return (self.B.dim == 64 and self.csaReports["B"].passed
                and self.csaReports["Bprime"].passed and self.iso_rank == 256)

    def to_text(self):
        pt = self.point
        aux = pt.aux()
        lines = [FORMAT_HEADER, "certificate rowen82", f"field {pt.field.descriptor()}",
                 "# pnorm is the variety coordinate usually written p"]
        lines += ["point " + ln for ln in pt.to_lines()]
        lines += [f"aux {k} {format_scalar(v)}" for k, v in aux.as_dict().items()]
        lines.append(f"witness X {format_scalar(self.pWitness.x)}")
        lines.append(f"witness Y {format_scalar(self.pWitness.y)}")
        for name, val in self.relations:
            lines.append(f"relation {name} {format_scalar(val)}")
        lines += ["B " + ln for ln in self.B.to_lines()]
        lines.append("report csa-Bprime " + self.csaReports["Bprime"].to_text())
        lines.append("report csa-B " + self.csaReports["B"].to_text())
        lines.append(f"report iso rank={self.iso_rank}/256")
        body = "\n".join(lines) + "\n"
        digest = hashlib.sha256(body.encode()).hexdigest()
        return body + f"digest {digest}\n"


def build_B(point, check_split=False, seed=0):
    """Build B' and B for a valid point and verify every stage."""
    point = validate_point(point.coords, point.field)
    S = s_ring(point)
    Bp = build_Bprime(point)
    try:
        wit = p_norm_witness(point, S)
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateError("pwitness", str(exc)) from None
    if wit.x * wit.x + wit.x * wit.y + S.lift(point.d) * wit.y * wit.y != S.lift(point.aux().pnorm):
        raise CertificateError("pwitness", "pnorm != X^2 + XY + dY^2")
    units = matrix_units(Bp, S, wit, point)
    cp = CrossedProductData(Bp, S, units)
    cp.check_relations()
    K = point.field
    B = StructureConstantAlgebra(K, 64, cp.structure_constants(), [K.one] + [K.zero] * 63,
                                 B_LABELS, grading=[((e & 1), (e >> 1) & 1, (e >> 2) & 1)
                                                    for e in range(8) for _ in range(8)],
                                 name="B")
    incl = AlgebraHom(B, Bp, cp.inclusion_columns())
    _spot_check_inclusion(incl)
    M2 = matrix_algebra(K, 2)
    MB = tensor(M2, B, name="M2(B)")
    E = [units[(1, 1)], units[(1, 2)], units[(2, 1)], units[(2, 2)]]
    cols = []
    for ia in range(4):
        for ib in range(64):
            cols.append((E[ia] * incl.image_of_basis(ib)).coords)
    iso = AlgebraHom(MB, Bp, cols)
    rank = _iso_rank(cols, K)
    if rank != 256:
        raise CertificateError("iso", f"M2(B) -> B' has rank {rank}, not 256")
    rep_bp = csa_test(Bp)
    if not rep_bp.passed:
        raise CertificateError("csa-Bprime", rep_bp.to_text())
    rep_b = csa_test(B)
    if not rep_b.passed:
        raise CertificateError("csa-B", rep_b.to_text())
    relations = [(f"z{i + 1}", cp.z[i]) for i in range(3)]
    relations += [(f"t{j + 1}{i + 1}", cp.t[(j, i)]) for j in range(3) for i in range(j)]
    split = None
    if check_split and linalg.is_finite(K):
        split = rank_one_idempotent(B, seed)
    cert = ClassifyingCertificate(point, Bp, wit, units, B, iso, rep_bp, rep_b, rank,
                                  relations, split)
    cert.incl = incl
    cert.crossed = cp
    return cert


def _spot_check_inclusion(incl, count=48):
    """incl(x y) = incl(x) incl(y) on generator pairs and a deterministic sample."""
    B, Bp = incl.source, incl.target
    gens = [1, 2, 4, 8, 16, 32]
    pairs = [(i, j) for i in gens for j in gens]
    rng = np.random.default_rng(12345)
    pairs += [tuple(int(v) for v in rng.integers(0, 64, size=2)) for _ in range(count)]
    bad = incl.failing_pair(pairs)
    if bad is not None:
        raise CertificateError("inclusion", f"not multiplicative on {B.labels[bad[0]]}, "
                                            f"{B.labels[bad[1]]}")
    if incl(B.one()) != Bp.one():
        raise CertificateError("inclusion", "unit not preserved")


# -- split sanity check over finite fields ---------------------------------------------------


def _min_poly(B, a):
    """Monic minimal polynomial of a as a coefficient list (constant first)."""
    F = B.field
    powers = [B.one().coords]
    x = B.one()
    while True:
        x = x * a
        cols = powers + [x.coords]
        rows = linalg.transpose(cols)
        ker = linalg.nullspace(rows, F, ncols=len(cols))
        if ker:
            v = ker[0]
            lead = v[-1].inverse()
            return [c * lead for c in v]
        powers.append(x.coords)


def _poly_eval(coeffs, x):
    acc = coeffs[-1] * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rank_one_idempotent(B, seed=0, tries=50):
    """A rank-one idempotent of B (finite fields), from a simple eigenvalue of a random element.

    If lambda is a simple root of the minimal polynomial mu of a, and
    h = mu / (t - lambda), then h(a) / h(lambda) is the spectral projector.
    Rank one means its left multiplication has rank dim(B) / deg(B).
    """
    F = B.field
    rng = np.random.default_rng(seed)
    deg = int(round(B.dim ** 0.5))
    for _ in range(tries):
        a = B.element([F.random(rng) for _ in range(B.dim)])
        mu = _min_poly(B, a)
        if len(mu) != deg + 1:
            continue
        dmu = [c * i for i, c in enumerate(mu)][1:]
        for lam in F.elements():
            if _poly_eval(mu, lam) or not _poly_eval(dmu, lam):
                continue
            # synthetic division by (t - lambda)
            h = [F.zero] * (len(mu) - 1)
            acc = F.zero
            for i in range(len(mu) - 1, 0, -1):
                acc = acc * lam + mu[i]
                h[i - 1] = acc
            ha = B.zero()
            power = B.one()
            for c in h:
                if c:
                    ha = ha + power * c
                power = power * a
            e = ha * _poly_eval(h, lam).inverse()
            if e * e != e:
                continue
            r = linalg.rank(B.left_matrix(e), F)
            if r == B.dim // deg:
                return e
    return None


# -- from Rowen data back to a point -----------------------------------------------------------


class DecompositionData:
    """Raw Rowen outputs with the three norm equations

    w^2 + wx + x^2 a = u'^2 + u' u + u^2 (b+d)
    y^2 + yz + z^2 a = v'^2 + v' v + v^2 (c+d)
    (w^2 + wx + x^2 a)(y^2 + yz + z^2 a) = m^2 + mn + n^2 d
    """

    def __init__(self, field, a, b, c, d, e, u, v, w, x, y, z, m, n, uprime=None, vprime=None):
        conv = lambda t: _coerce(field, t)  # noqa: E731
        self.field = field
        self.vals = {k: conv(val) for k, val in zip(COORDINATES, (a, b, c, d, e, u, v, w, x, y,
                                                                   z, m, n))}
        self.vals["uprime"] = field.one if uprime is None else conv(uprime)
        self.vals["vprime"] = field.one if vprime is None else conv(vprime)

    def equations(self, vals=None):
        s = vals or self.vals
        a, b, c, d = s["a"], s["b"], s["c"], s["d"]
        ns = s["w"] ** 2 + s["w"] * s["x"] + s["x"] ** 2 * a
        nt = s["y"] ** 2 + s["y"] * s["z"] + s["z"] ** 2 * a
        up, vp = s["uprime"], s["vprime"]
        return [
            ("N(s) in N(b+d)", ns == up * up + up * s["u"] + s["u"] ** 2 * (b + d)),
            ("N(t) in N(c+d)", nt == vp * vp + vp * s["v"] + s["v"] ** 2 * (c + d)),
            ("N(st) in N(d)", ns * nt == s["m"] ** 2 + s["m"] * s["n"] + s["n"] ** 2 * d),
        ]

    def check(self, vals=None):
        for name, ok in self.equations(vals):
            if not ok:
                raise NormalizationError(f"norm equation {name} fails")


def _norm_one_multiply(xv, yv, slot, tx, ty):
    """(xv + yv alpha)(tx + ty alpha) in the quadratic extension with slot ``slot``."""
    return xv * tx + slot * yv * ty, xv * ty + tx * yv + yv * ty


def point_from_decomposition(data, log=None):
    """Normalize Rowen data (u' = v' = 1 and genericity) and emit a validated point.

    Every substitution is re-checked against the three norm equations; a
    substitution that breaks them is never used.
    """
    log = log if log is not None else []
    s = dict(data.vals)
    data.check(s)
    K = data.field
    one = K.one

    def fix_unit(prime, lin, scaled, slot_name, bslot):
        # make the u' coordinate nonzero with a norm-one multiplier, then rescale it to 1
        if not s[prime]:
            if not bslot:
                raise NormalizationError(f"{prime} = 0 and the slot {slot_name} vanishes")
            t = bslot.inverse()
            s[prime], s[lin] = _norm_one_multiply(s[prime], s[lin], bslot, one, t)
            log.append(f"{prime}: multiplied by the norm-one element 1 + alpha/({slot_name})")
            data.check(s)
        if not s[prime]:
            raise NormalizationError(f"cannot make {prime} nonzero")
        if s[prime] != one:
            inv = s[prime].inverse()
            for k in scaled:
                s[k] = s[k] * inv
            s["m"], s["n"] = s["m"] * inv, s["n"] * inv
            s[prime] = one
            log.append(f"{prime}: divided {', '.join(scaled)} (and m, n) by {prime}")
            data.check(s)

    fix_unit("uprime", "u", ("w", "x", "u"), "b+d", s["b"] + s["d"])
    fix_unit("vprime", "v", ("y", "z", "v"), "c+d", s["c"] + s["d"])

    def fix_generic(lin, other, slot_name, bslot):
        # u != x (and u != 0): u -> u + 1/(b+d) keeps 1 + u + (b+d) u^2
        if s[lin] != s[other] and s[lin]:
            return
        if not bslot:
            raise NormalizationError(f"{lin} needs adjusting but {slot_name} = 0")
        cand = s[lin] + bslot.inverse()
        trial = dict(s, **{lin: cand})
        data.check(trial)
        if cand == s[other] or not cand:
            raise NormalizationError(f"no verified substitution makes {lin} generic")
        s[lin] = cand
        log.append(f"{lin}: replaced by {lin} + 1/({slot_name})")

    fix_generic("u", "x", "b+d", s["b"] + s["d"])
    fix_generic("v", "z", "c+d", s["c"] + s["d"])

    f = s["x"] * s["z"] + s["w"] * s["z"] + s["x"] * s["y"]
    if not (s["n"] + f) or not s["n"]:
        d = s["d"]
        if not d:
            raise NormalizationError("n needs adjusting but d = 0")
        dinv = d.inverse()
        for tx, ty, label in ((one, dinv, "1 + alpha/d"), (one + dinv, dinv, "1 + 1/d + alpha/d")):
            m2, n2 = _norm_one_multiply(s["m"], s["n"], d, tx, ty)
            trial = dict(s, m=m2, n=n2)
            try:
                data.check(trial)
            except NormalizationError:
                continue
            if n2 and n2 + f:
                s["m"], s["n"] = m2, n2
                log.append(f"(m, n): multiplied by the norm-one element {label}")
                break
        else:
            raise NormalizationError("no verified substitution makes n + f and n nonzero")
    coords = {k: s[k] for k in COORDINATES}
    return validate_point(coords, K)


def decomposition_from_point(point, uprime=None, vprime=None):
    """Rowen data equivalent to ``point`` with chosen nonzero u', v' (for round trips)."""
    K = point.field
    c = dict(point.coords)
    up = K.one if uprime is None else uprime
    vp = K.one if vprime is None else vprime
    vals = {k: c[k] for k in COORDINATES}
    for k in ("w", "x", "u", "m", "n"):
        vals[k] = vals[k] * up
    for k in ("y", "z", "v", "m", "n"):
        vals[k] = vals[k] * vp
    return DecompositionData(K, *(vals[k] for k in COORDINATES), uprime=up, vprime=vp)


def chain_data_from_point(point, e=None):
    c = point.coords
    return RowenChainData(point.field, c["a"], c["b"], c["c"], c["d"], e or c["e"], c["w"],
                          c["x"], c["y"], c["z"], c["u"], c["v"], c["m"], c["n"])


def bprime_word(point):
    """{a,e} + {b,u+x} + {c,z+v} + {d,(u+x)(z+v)(n+f)}, the class of B'(point)."""
    c = point.coords
    aux = point.aux()
    return BrauerWord(point.field, [(c["a"], c["e"]), (c["b"], c["u"] + c["x"]),
                                    (c["c"], c["z"] + c["v"]), (c["d"], aux.pnorm)])


# -- point and certificate files ------------------------------------------------------------


def parse_point_text(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != FORMAT_HEADER:
        raise InvalidPoint("format", f"missing {FORMAT_HEADER} header")
    if len(lines) < 2 or lines[1] != "point rowen82":
        raise InvalidPoint("format", "not a rowen82 point file")
    field = None
    raw = {}
    for ln in lines[2:]:
        key, _, val = ln.partition(" ")
        if key == "field":
            field = field_from_descriptor(val.strip())
        elif key in COORDINATES:
            raw[key] = val.strip()
    if field is None:
        raise InvalidPoint("format", "no field line")
    return validate_point({k: parse_scalar(v, field) for k, v in raw.items()}, field)


class VerifyResult:
    def __init__(self, ok, stage="", message=""):
        self.ok, self.stage, self.message = ok, stage, message

    def __bool__(self):
        return self.ok


def verify_certificate(text):
    """Re-check a certificate: digest, point, stored witness, and a full rebuild compared line by line."""
    try:
        return _verify_certificate(text)
    except CertificateError as exc:
        return VerifyResult(False, exc.stage, str(exc))
    except (InvalidPoint, ValueError, ZeroDivisionError) as exc:
        return VerifyResult(False, "parse", str(exc))


def _verify_certificate(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        return VerifyResult(False, "format", f"missing {FORMAT_HEADER} header")
    if len(lines) < 2 or lines[1].strip() != "certificate rowen82":
        return VerifyResult(False, "format", "not a rowen82 certificate")
    if not lines[-1].startswith("digest "):
        return VerifyResult(False, "digest", "missing digest line")
    body = "\n".join(lines[:-1]) + "\n"
    if hashlib.sha256(body.encode()).hexdigest() != lines[-1].split()[1]:
        return VerifyResult(False, "digest", "digest does not match the content")
    field = field_from_descriptor(lines[2].split(None, 1)[1])
    coords = {}
    wit = {}
    for ln in lines[3:-1]:
        parts = ln.split(None, 2)
        if parts[0] == "point":
            coords[parts[1]] = parse_scalar(parts[2], field)
    point = validate_point(coords, field)
    S = s_ring(point)
    for ln in lines[3:-1]:
        parts = ln.split(None, 2)
        if parts[0] == "witness":
            wit[parts[1]] = parse_scalar(parts[2], S)
    if set(wit) != {"X", "Y"}:
        return VerifyResult(False, "pwitness", "witness lines missing")
    X, Y = wit["X"], wit["Y"]
    if X * X + X * Y + S.lift(point.d) * Y * Y != S.lift(point.aux().pnorm):
        return VerifyResult(False, "pwitness", "stored witness does not give pnorm")
    stored_B = algebra_from_lines([ln[2:] for ln in lines if ln.startswith("B ")], field)
    if stored_B.dim != 64:
        return VerifyResult(False, "B", "stored B does not have dimension 64")
    cert = build_B(point)
    fresh = cert.to_text().splitlines()
    for i, (old, new) in enumerate(zip(lines, fresh)):
        if old != new:
            return VerifyResult(False, "rebuild", f"line {i + 1} differs from the rebuilt "
                                                  f"certificate")
    if len(lines) != len(fresh):
        return VerifyResult(False, "rebuild", "line count differs from the rebuilt certificate")
    return VerifyResult(True, "ok", "certificate verified")
