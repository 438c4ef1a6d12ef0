"""Finite-dimensional associative algebras given by structure constants.

Basis products are stored sparsely: ``basis_product(i, j)`` returns a tuple of
``(k, c)`` pairs meaning e_i e_j = sum c e_k, where ``c is None`` stands for
the coefficient 1.  Tensor products keep their factors and compute basis
products on demand, which keeps 256-dimensional algebras cheap to hold.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import _gfkernels as K
from . import linalg
from .exactfield import format_scalar, parse_scalar


class AlgebraError(ValueError):
    """A table, element or map violates an algebra law."""


class NotAHomomorphism(AlgebraError):
    pass


class SplittingError(AlgebraError):
    pass


def _one_if(c):
    return None if c.is_one() else c


class StructureConstantAlgebra:
    def __init__(self, field, dim, products, unit, labels=None, grading=None, name=None):
        self.field = field
        self.dim = dim
        self._products = products
        self.unit_coords = list(unit)
        self.labels = list(labels) if labels else [f"e{i}" for i in range(dim)]
        self.grading = grading
        self.name = name or f"algebra(dim={dim})"
        self.factors = None
        self.presentation = None
        self._dense = None

    def __repr__(self):
        return f"<{self.name} over {self.field.name}, dim {self.dim}>"

    # -- basis products -----------------------------------------------------
    def basis_product(self, i, j):
        return self._products[i * self.dim + j]

    def structure_constant(self, i, j, k):
        for kk, c in self.basis_product(i, j):
            if kk == k:
                return self.field.one if c is None else c
        return self.field.zero

    # -- elements -----------------------------------------------------------
    def element(self, coords):
        coords = [self.field(c) if not _is_scalar(c) else c for c in coords]
        if len(coords) != self.dim:
            raise AlgebraError(f"expected {self.dim} coordinates, got {len(coords)}")
        return AlgebraElement(self, coords)

    def zero(self):
        return AlgebraElement(self, [self.field.zero] * self.dim)

    def one(self):
        return AlgebraElement(self, list(self.unit_coords))

    def basis(self, i):
        v = [self.field.zero] * self.dim
        v[i] = self.field.one
        return AlgebraElement(self, v)

    def basis_elements(self):
        return [self.basis(i) for i in range(self.dim)]

    def scalar(self, c):
        return self.one() * self.field(c) if not _is_scalar(c) else self.one() * c

    def mul(self, x, y):
        F = self.field
        acc = {}
        xs = [(i, a) for i, a in enumerate(x.coords) if a]
        ys = [(j, b) for j, b in enumerate(y.coords) if b]
        for i, a in xs:
            for j, b in ys:
                ab = a * b
                for k, c in self.basis_product(i, j):
                    t = ab if c is None else ab * c
                    prev = acc.get(k)
                    acc[k] = t if prev is None else prev + t
        out = [F.zero] * self.dim
        for k, v in acc.items():
            out[k] = v
        return AlgebraElement(self, out)

    def left_matrix(self, x):
        """Rows of the matrix of y -> x y."""
        cols = [self.mul(x, self.basis(j)).coords for j in range(self.dim)]
        return linalg.transpose(cols)

    def right_matrix(self, x):
        cols = [self.mul(self.basis(j), x).coords for j in range(self.dim)]
        return linalg.transpose(cols)

    # -- checks ---------------------------------------------------------------
    def check_unit(self):
        one = self.one()
        for i in range(self.dim):
            b = self.basis(i)
            if one * b != b or b * one != b:
                return i
        return None

    def check_associativity(self):
        """First basis triple (i, j, k) with (e_i e_j) e_k != e_i (e_j e_k), or None."""
        basis = self.basis_elements()
        for i in range(self.dim):
            for j in range(self.dim):
                ij = basis[i] * basis[j]
                for k in range(self.dim):
                    if ij * basis[k] != basis[i] * (basis[j] * basis[k]):
                        return (i, j, k)
        return None

    def check_grading(self):
        """True if every nonzero structure constant respects the grading."""
        if self.grading is None:
            return False
        g = self.grading
        for i in range(self.dim):
            for j in range(self.dim):
                target = tuple((a + b) % 2 for a, b in zip(g[i], g[j]))
                for k, _ in self.basis_product(i, j):
                    if tuple(g[k]) != target:
                        return False
        return True

    # -- dense code tables for the compiled kernels ----------------------------
    def sparse_arrays(self):
        """CSR arrays of left and right multiplication, over a finite field."""
        if self._dense is None:
            d = self.dim
            one = self.field.one.code
            Lptr, Lidx, Lval = [0], [], []
            for a in range(d):
                for m in range(d):
                    for y, c in self.basis_product(a, m):
                        Lidx.append(y)
                        Lval.append(one if c is None else c.code)
                    Lptr.append(len(Lidx))
            Rptr, Ridx, Rval = [0], [], []
            for b in range(d):
                for x in range(d):
                    for m, c in self.basis_product(x, b):
                        Ridx.append(m)
                        Rval.append(one if c is None else c.code)
                    Rptr.append(len(Ridx))
            arr = lambda v: np.array(v, dtype=np.int64)  # noqa: E731
            self._dense = (arr(Lptr), arr(Lidx), arr(Lval), arr(Rptr), arr(Ridx), arr(Rval))
        return self._dense

    # -- serialization ----------------------------------------------------------
    def to_lines(self):
        lines = [f"algebra {self.name}", f"dim {self.dim}", "labels " + " ".join(self.labels),
                 "unit " + vector_to_text(self.unit_coords)]
        if self.grading is not None:
            lines.append("grading " + " ".join("".join(str(v) for v in g) for g in self.grading))
        for i in range(self.dim):
            for j in range(self.dim):
                terms = self.basis_product(i, j)
                if terms:
                    body = ";".join(f"{k}:{'1' if c is None else format_scalar(c)}" for k, c in terms)
                    lines.append(f"prod {i} {j} {body}")
        return lines


def _is_scalar(c):
    return hasattr(c, "inverse")


def vector_to_text(coords):
    return ";".join(f"{i}:{format_scalar(c)}" for i, c in enumerate(coords) if c) or "-"


def vector_from_text(text, field, dim):
    out = [field.zero] * dim
    if text.strip() == "-":
        return out
    for part in text.split(";"):
        i, val = part.split(":", 1)
        out[int(i)] = parse_scalar(val, field)
    return out


def algebra_from_lines(lines, field):
    """Inverse of ``StructureConstantAlgebra.to_lines`` (no law checks)."""
    name, dim, labels, unit, grading = None, None, None, None, None
    prods = {}
    for line in lines:
        key, _, rest = line.partition(" ")
        if key == "algebra":
            name = rest
        elif key == "dim":
            dim = int(rest)
        elif key == "labels":
            labels = rest.split()
        elif key == "unit":
            unit = rest
        elif key == "grading":
            grading = [tuple(int(ch) for ch in g) for g in rest.split()]
        elif key == "prod":
            i, j, body = rest.split(" ", 2)
            terms = []
            for part in body.split(";"):
                k, val = part.split(":", 1)
                c = parse_scalar(val, field)
                terms.append((int(k), _one_if(c)))
            prods[int(i) * dim + int(j)] = tuple(terms)
    products = [prods.get(n, ()) for n in range(dim * dim)]
    return StructureConstantAlgebra(field, dim, products, vector_from_text(unit, field, dim),
                                    labels, grading, name)


class AlgebraElement:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra, coords):
        self.algebra = algebra
        self.coords = coords

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra is not self.algebra:
            raise AlgebraError("elements of different algebras")

    def __add__(self, other):
        if _is_scalar(other) or isinstance(other, int):
            other = self.algebra.one() * other
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.coords])

    def __sub__(self, other):
        if _is_scalar(other) or isinstance(other, int):
            other = self.algebra.one() * other
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return self.algebra.mul(self, other)
        if isinstance(other, int):
            other = self.algebra.field.from_int(other)
        return AlgebraElement(self.algebra, [a * other if a else a for a in self.coords])

    def __rmul__(self, other):
        if isinstance(other, int):
            other = self.algebra.field.from_int(other)
        return AlgebraElement(self.algebra, [other * a if a else a for a in self.coords])

    def __pow__(self, n):
        result, base = self.algebra.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return other.algebra is self.algebra and all(a == b for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        return hash(tuple(i for i, a in enumerate(self.coords) if a))

    def __bool__(self):
        return any(bool(a) for a in self.coords)

    def is_zero(self):
        return not self

    def support(self):
        return [i for i, a in enumerate(self.coords) if a]

    def commutes_with(self, other):
        return self * other == other * self

    def __repr__(self):
        labels = self.algebra.labels
        terms = []
        for i, a in enumerate(self.coords):
            if a:
                s = format_scalar(a)
                terms.append(labels[i] if s == "1" else f"({s})*{labels[i]}")
        return " + ".join(terms) if terms else "0"


class TensorAlgebra(StructureConstantAlgebra):
    """A (x) B with basis e_i (x) f_j at index i * dim(B) + j."""

    def __init__(self, A, B, name=None):
        if not (A.field is B.field or A.field == B.field):
            raise AlgebraError(f"base fields differ: {A.field} and {B.field}")
        dim = A.dim * B.dim
        labels = [_tensor_label(a, b) for a in A.labels for b in B.labels]
        unit = [x * y for x in A.unit_coords for y in B.unit_coords]
        grading = None
        if A.grading is not None and B.grading is not None:
            grading = [tuple(ga) + tuple(gb) for ga in A.grading for gb in B.grading]
        super().__init__(A.field, dim, None, unit, labels, grading,
                         name or f"({A.name} (x) {B.name})")
        self.factors = (A, B)
        self._memo = {}

    def basis_product(self, i, j):
        key = i * self.dim + j
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        A, B = self.factors
        db = B.dim
        ia, ib = divmod(i, db)
        ja, jb = divmod(j, db)
        out = []
        for ka, ca in A.basis_product(ia, ja):
            for kb, cb in B.basis_product(ib, jb):
                if ca is None:
                    c = cb
                elif cb is None:
                    c = ca
                else:
                    c = _one_if(ca * cb)
                out.append((ka * db + kb, c))
        out = tuple(out)
        self._memo[key] = out
        return out

    def leaf_factors(self):
        out = []
        for f in self.factors:
            out.extend(f.leaf_factors() if isinstance(f, TensorAlgebra) else [f])
        return out

    def embed_factor(self, index, x):
        """Image of an element of the index-th leaf factor, tensored with units."""
        leaves = self.leaf_factors()
        vec = [[c for c in leaf.unit_coords] for leaf in leaves]
        vec[index] = list(x.coords)
        coords = vec[0]
        for v in vec[1:]:
            coords = [a * b for a in coords for b in v]
        return AlgebraElement(self, coords)

    def to_lines(self):
        return super().to_lines()


def _tensor_label(a, b):
    if a == "1":
        return b
    if b == "1":
        return a
    return f"{a}*{b}"


def build_sc_algebra(field, dim, constants, unit, labels=None, grading=None, name=None,
                     check=True):
    """Build and verify an algebra from structure constants.

    ``constants`` is either a dense nested list c[i][j][k] or a dict mapping
    (i, j) to a list of (k, c).  Associativity is checked on all basis
    triples and the unit law on all basis elements.
    """
    if isinstance(constants, dict):
        products = []
        for i in range(dim):
            for j in range(dim):
                terms = [(k, field(c) if not _is_scalar(c) else c) for k, c in constants.get((i, j), [])]
                products.append(tuple((k, _one_if(c)) for k, c in terms if c))
    else:
        if len(constants) != dim or any(len(r) != dim or any(len(v) != dim for v in r)
                                         for r in constants):
            raise AlgebraError("structure constant tensor has the wrong shape")
        products = []
        for i in range(dim):
            for j in range(dim):
                terms = []
                for k, c in enumerate(constants[i][j]):
                    c = field(c) if not _is_scalar(c) else c
                    if c:
                        terms.append((k, _one_if(c)))
                products.append(tuple(terms))
    unit = [field(c) if not _is_scalar(c) else c for c in unit]
    if len(unit) != dim:
        raise AlgebraError("unit vector has the wrong length")
    A = StructureConstantAlgebra(field, dim, products, unit, labels, grading, name)
    if check:
        bad = A.check_unit()
        if bad is not None:
            raise AlgebraError(f"unit law fails on basis element {A.labels[bad]}")
        bad = A.check_associativity()
        if bad is not None:
            i, j, k = bad
            raise AlgebraError(f"associativity fails on basis triple ({A.labels[i]}, "
                               f"{A.labels[j]}, {A.labels[k]})")
    return A


def tensor(A, B, name=None):
    return TensorAlgebra(A, B, name)


def matrix_algebra(field, n):
    """M_n(field) with basis E_ij at index i * n + j."""
    dim = n * n
    products = []
    for a in range(dim):
        i, j = divmod(a, n)
        for b in range(dim):
            k, l = divmod(b, n)
            products.append(((i * n + l, None),) if j == k else ())
    unit = [field.one if a // n == a % n else field.zero for a in range(dim)]
    labels = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return StructureConstantAlgebra(field, dim, products, unit, labels, name=f"M{n}")


def field_as_algebra(field):
    return StructureConstantAlgebra(field, 1, [((0, None),)], [field.one], ["1"], name="K")


# -- subalgebras ------------------------------------------------------------


class CoordinateSolver:
    """Coordinates with respect to a linearly independent list of vectors."""

    def __init__(self, field, vectors):
        self.field = field
        self.n = len(vectors)
        self.vectors = vectors
        if not vectors:
            self.rows, self.inv = [], []
            return
        # pivot coordinates of the vectors give an invertible square minor
        _, prow = linalg.rref([list(v) for v in vectors], field)
        if len(prow) != self.n:
            raise AlgebraError("vectors are linearly dependent")
        self.rows = prow
        square = [[vectors[j][r] for j in range(self.n)] for r in prow]
        self.inv = linalg.inverse(square, field)

    def coords(self, v, check=True):
        rhs = [v[r] for r in self.rows]
        c = [sum((a * b for a, b in zip(row, rhs) if a and b), self.field.zero) for row in self.inv]
        if check:
            recon = [self.field.zero] * len(v)
            for ci, vec in zip(c, self.vectors):
                if ci:
                    for k, x in enumerate(vec):
                        if x:
                            recon[k] = recon[k] + ci * x
            if any(a != b for a, b in zip(recon, v)):
                return None
        return c


def subalgebra(A, elements, name=None, check=True):
    """The subalgebra with the given basis (closure is verified when check=True)."""
    F = A.field
    vecs = [e.coords for e in elements]
    solver = CoordinateSolver(F, vecs)
    n = len(vecs)
    products = []
    for i in range(n):
        for j in range(n):
            prod = elements[i] * elements[j]
            c = solver.coords(prod.coords, check=check)
            if c is None:
                raise AlgebraError("span is not closed under multiplication")
            products.append(tuple((k, _one_if(v)) for k, v in enumerate(c) if v))
    unit = solver.coords(A.one().coords, check=check)
    if unit is None:
        raise AlgebraError("span does not contain the unit")
    S = StructureConstantAlgebra(F, n, products, unit, [f"c{i}" for i in range(n)], name=name)
    inc = AlgebraHom(S, A, [list(v) for v in vecs])
    return S, inc


def centralizer(A, generators, name=None):
    """Centralizer of ``generators`` in A, with its inclusion hom."""
    F = A.field
    rows = []
    for g in generators:
        L = A.left_matrix(g)
        R = A.right_matrix(g)
        for rl, rr in zip(L, R):
            rows.append([a - b for a, b in zip(rr, rl)])
    basis = linalg.nullspace(rows, F, ncols=A.dim)
    elems = [AlgebraElement(A, v) for v in basis]
    return subalgebra(A, elems, name=name or "centralizer")


def center(A):
    return centralizer(A, A.basis_elements(), name="center")


# -- homomorphisms ------------------------------------------------------------


class AlgebraHom:
    """Linear map given by the images of the source basis (columns)."""

    def __init__(self, source, target, columns):
        self.source = source
        self.target = target
        self.columns = [list(c) for c in columns]

    def matrix(self):
        return linalg.transpose(self.columns)

    def __call__(self, x):
        F = self.target.field
        out = [F.zero] * self.target.dim
        for a, col in zip(x.coords, self.columns):
            if a:
                for k, v in enumerate(col):
                    if v:
                        out[k] = out[k] + a * v
        return AlgebraElement(self.target, out)

    def image_of_basis(self, i):
        return AlgebraElement(self.target, list(self.columns[i]))

    def maps_unit(self):
        return self(self.source.one()) == self.target.one()

    def failing_pair(self, pairs=None):
        S = self.source
        if pairs is None:
            pairs = itertools.product(range(S.dim), repeat=2)
        imgs = [self.image_of_basis(i) for i in range(S.dim)]
        for i, j in pairs:
            if self(S.basis(i) * S.basis(j)) != imgs[i] * imgs[j]:
                return (i, j)
        return None

    def verify(self):
        if not self.maps_unit():
            raise NotAHomomorphism("unit is not mapped to unit")
        bad = self.failing_pair()
        if bad is not None:
            i, j = bad
            raise NotAHomomorphism(f"not multiplicative on ({self.source.labels[i]}, "
                                   f"{self.source.labels[j]})")
        return True

    def rank(self):
        return linalg.rank(self.matrix(), self.target.field)

    def is_bijective(self):
        return self.source.dim == self.target.dim and self.rank() == self.source.dim

    def inverse(self):
        inv = linalg.inverse(self.matrix(), self.target.field)
        return AlgebraHom(self.target, self.source, linalg.transpose(inv))

    def compose(self, other):
        """self after other."""
        return AlgebraHom(other.source, self.target,
                          [self(other.image_of_basis(i)).coords for i in range(other.source.dim)])

    def is_identity(self):
        n = self.source.dim
        F = self.target.field
        return self.source.dim == self.target.dim and all(
            (v == F.one) if r == c else (not v)
            for c, col in enumerate(self.columns) for r, v in enumerate(col) if r < n)


class Presentation:
    """Generators, normal-form basis words and defining relations."""

    def __init__(self, generators, words, relations):
        self.generators = list(generators)
        self.words = [tuple(w) for w in words]
        self.relations = list(relations)  # (name, function(images) -> element that must vanish)


def hom_from_generators(source, target, images):
    """Extend generator images multiplicatively along the normal-form basis."""
    pres = source.presentation
    if pres is None:
        raise AlgebraError(f"{source.name} has no presentation")
    imgs = {g: images[g] for g in pres.generators}
    for g, x in imgs.items():
        if x.algebra is not target:
            raise AlgebraError(f"image of {g} is not in the target algebra")
    for name, rel in pres.relations:
        if rel(imgs, target):
            raise NotAHomomorphism(f"relation {name} fails for the proposed images")
    cols = []
    for w in pres.words:
        x = target.one()
        for g in w:
            x = x * imgs[g]
        cols.append(x.coords)
    hom = AlgebraHom(source, target, cols)
    hom.verify()
    return hom


class MatrixUnits:
    def __init__(self, e11, e12, e21, e22):
        self.e = {(1, 1): e11, (1, 2): e12, (2, 1): e21, (2, 2): e22}

    def __getitem__(self, ij):
        return self.e[ij]

    def as_list(self):
        return [self.e[(1, 1)], self.e[(1, 2)], self.e[(2, 1)], self.e[(2, 2)]]

    def verify(self):
        A = self.e[(1, 1)].algebra
        zero = A.zero()
        for (i, j), x in self.e.items():
            for (k, l), y in self.e.items():
                want = self.e[(i, l)] if j == k else zero
                if x * y != want:
                    return False
        return self.e[(1, 1)] + self.e[(2, 2)] == A.one()


# -- central simplicity --------------------------------------------------------


class CSAReport:
    def __init__(self, passed, method, rank, needed, kernel=None, detail=""):
        self.passed = passed
        self.method = method
        self.rank = rank
        self.needed = needed
        self.kernel = kernel
        self.detail = detail

    def __bool__(self):
        return self.passed

    def __repr__(self):
        state = "pass" if self.passed else "fail"
        return f"CSAReport({state}, method={self.method}, rank={self.rank}/{self.needed})"

    def to_text(self):
        state = "pass" if self.passed else "fail"
        return f"{state} method={self.method} rank={self.rank}/{self.needed}"


def _sandwich_rows(A, pairs, coords):
    """Generic-field matrix of x -> e_a x e_b for the (a, b) pairs, rows in coords."""
    F = A.field
    pos = {c: n for n, c in enumerate(coords)}
    rows = [[F.zero] * len(pairs) for _ in coords]
    d = A.dim
    for t, (a, b) in enumerate(pairs):
        for x in range(d):
            for m, cr in A.basis_product(x, b):
                for y, cl in A.basis_product(a, m):
                    c = cr if cl is None else (cl if cr is None else cl * cr)
                    n = pos[(y, x)]
                    rows[n][t] = rows[n][t] + (F.one if c is None else c)
    return rows


def _blocks(A):
    """Column and row groups of the sandwich map for a (Z/2)^r grading."""
    g = [tuple(v) for v in A.grading]
    degs = sorted(set(g))
    add = lambda u, v: tuple((a + b) % 2 for a, b in zip(u, v))  # noqa: E731
    blocks = []
    for delta in degs:
        pairs = [(a, b) for a in range(A.dim) for b in range(A.dim) if add(g[a], g[b]) == delta]
        coords = [(y, x) for x in range(A.dim) for y in range(A.dim) if g[y] == add(g[x], delta)]
        blocks.append((delta, pairs, coords))
    return blocks


def csa_test(A, allow_specialization=True):
    """Central simplicity via bijectivity of A (x) A^op -> End(A), a (x) b -> (x -> a x b).

    Tensor products are tested factor by factor (the map of a tensor product
    is the Kronecker product of the factors' maps up to a permutation, so the
    ranks multiply).  Graded algebras split the map into blocks by degree.
    Over function fields the rank is certified by specialization.
    """
    F = A.field
    d = A.dim
    if isinstance(A, TensorAlgebra):
        ranks, total = [], 1
        for i, leaf in enumerate(A.leaf_factors()):
            rep = csa_test(leaf, allow_specialization)
            ranks.append(rep)
            if not rep.passed:
                return CSAReport(False, "kronecker", None, d * d, rep.kernel,
                                 f"factor {i} fails: {rep.to_text()}")
            total *= rep.rank
        return CSAReport(True, "kronecker", total, d * d,
                         detail="; ".join(r.to_text() for r in ranks))
    if not linalg.is_finite(F):
        if allow_specialization:
            rep = _csa_by_specialization(A)
            if rep is not None:
                return rep
        return _csa_generic(A)
    if A.grading is not None and A.check_grading():
        return _csa_graded_finite(A)
    return _csa_finite(A, [(a, b) for a in range(d) for b in range(d)],
                       [(y, x) for x in range(d) for y in range(d)], "full")


def _csa_finite(A, pairs, coords, method):
    F = A.field
    d = A.dim
    M = _sandwich_codes(A, pairs, coords)
    r = linalg.rank_codes(F, M)
    if r == len(pairs) == len(coords):
        return CSAReport(True, method, r, d * d)
    kernel = _kernel_vector(F, M, pairs, d)
    return CSAReport(False, method, r, d * d, kernel)


def _sandwich_codes(A, pairs, coords):
    F = A.field
    d = A.dim
    row_of = np.full(d * d, -1, dtype=np.int64)
    for n, (y, x) in enumerate(coords):
        row_of[y * d + x] = n
    ca = np.array([a for a, _ in pairs], dtype=np.int64)
    cb = np.array([b for _, b in pairs], dtype=np.int64)
    M, status = K.sandwich_columns(ca, cb, *A.sparse_arrays(), row_of, len(coords), d,
                                   *linalg.tables(F))
    if status < 0:
        raise AlgebraError("grading does not match the multiplication table")
    return M


def _kernel_vector(F, M, pairs, d):
    from .exactfield import FFElement
    rows = [[FFElement(F, int(c)) for c in row] for row in M]
    ker = linalg.nullspace(rows, F, ncols=len(pairs))
    if not ker:
        return None
    v = [F.zero] * (d * d)
    for (a, b), c in zip(pairs, ker[0]):
        v[a * d + b] = c
    return v


def _csa_graded_finite(A):
    d = A.dim
    total = 0
    for delta, pairs, coords in _blocks(A):
        if len(pairs) != len(coords):
            return CSAReport(False, "graded-blocks", None, d * d,
                             detail=f"block {delta} is not square")
        rep = _csa_finite(A, pairs, coords, "graded-blocks")
        if not rep.passed:
            rep.detail = f"block {''.join(map(str, delta))} deficient"
            return rep
        total += rep.rank
    return CSAReport(True, "graded-blocks", total, d * d)


def _csa_generic(A):
    F = A.field
    d = A.dim
    pairs = [(a, b) for a in range(d) for b in range(d)]
    coords = [(y, x) for x in range(d) for y in range(d)]
    rows = _sandwich_rows(A, pairs, coords)
    r = linalg.rank(rows, F)
    if r == d * d:
        return CSAReport(True, "elimination", r, d * d)
    ker = linalg.nullspace(rows, F)
    return CSAReport(False, "elimination", r, d * d, ker[0] if ker else None)


def specialize_algebra(A, values, big):
    """The algebra obtained by evaluating every structure constant at ``values``."""
    from .exactfield.specialize import specialize
    one = big.one
    products = []
    for i in range(A.dim):
        for j in range(A.dim):
            terms = []
            for k, c in A.basis_product(i, j):
                v = one if c is None else specialize(c, values, big)
                if v:
                    terms.append((k, None if v.is_one() else v))
            products.append(tuple(terms))
    unit = [specialize(c, values, big) for c in A.unit_coords]
    return StructureConstantAlgebra(big, A.dim, products, unit, A.labels, A.grading,
                                    name=f"{A.name}@spec")


def _csa_by_specialization(A, tries=4):
    from .exactfield import GF
    from .exactfield.specialize import SpecializationError, specialization_points
    F = A.field
    base = getattr(F, "base", None)
    if base is None or not hasattr(F, "nvars"):
        return None
    big = GF(base.p, linalg._big_degree(base))
    for vals in specialization_points(F, big, tries, start=big.p + 7):
        try:
            As = specialize_algebra(A, vals, big)
        except SpecializationError:
            continue
        rep = csa_test(As)
        if rep.passed:
            rep.method = f"specialization/{rep.method}"
            rep.detail = f"at {[str(v) for v in vals]} in {big.name}"
            return rep
    return None


# -- splitting off a matrix factor ------------------------------------------------


def _peirce_basis(A, left, right):
    vecs = [(left * A.basis(i) * right).coords for i in range(A.dim)]
    R, piv = linalg.rref(vecs, A.field)
    return [AlgebraElement(A, R[i]) for i in range(len(piv))]


def _candidates(basis, field, rng_seed=0, extra=64):
    n = len(basis)
    for b in basis:
        yield b
    for i, j in itertools.combinations(range(n), 2):
        yield basis[i] + basis[j]
    if linalg.is_finite(field):
        rng = np.random.default_rng(rng_seed)
        for _ in range(extra):
            x = basis[0] * field.zero
            for b in basis:
                x = x + b * field.random(rng)
            yield x


def split_off_matrix_factor(A, e):
    """Split A = M_2(C) along the idempotent e.

    Returns (units, C, iso) where iso: M_2 (x) C -> A is E_ij (x) c -> e_ij c.
    """
    F = A.field
    one = A.one()
    if e * e != e:
        raise SplittingError("e is not idempotent")
    if not e or e == one:
        raise SplittingError("e must be a nontrivial idempotent")
    f = one - e
    P12 = _peirce_basis(A, e, f)
    P21 = _peirce_basis(A, f, e)
    if not P12 or not P21 or len(P12) != len(P21):
        raise SplittingError("e is not a rank-half idempotent")
    units = None
    for x in _candidates(P12, F):
        if not x:
            continue
        # solve x y = e and y x = f for y in the span of P21
        rows, rhs = [], []
        prods_l = [(x * y).coords for y in P21]
        prods_r = [(y * x).coords for y in P21]
        for k in range(A.dim):
            rows.append([v[k] for v in prods_l])
            rhs.append(e.coords[k])
            rows.append([v[k] for v in prods_r])
            rhs.append(f.coords[k])
        sol = linalg.solve(rows, rhs, F)
        if sol is None:
            continue
        y = A.zero()
        for c, b in zip(sol, P21):
            if c:
                y = y + b * c
        units = MatrixUnits(e, x, y, f)
        break
    if units is None or not units.verify():
        raise SplittingError("no complementary pair found: not a rank-half idempotent")
    C, inc = centralizer(A, units.as_list(), name="C")
    M2 = matrix_algebra(F, 2)
    MC = tensor(M2, C)
    cols = []
    for idx in range(MC.dim):
        ia, ic = divmod(idx, C.dim)
        i, j = divmod(ia, 2)
        cols.append((units[(i + 1, j + 1)] * inc.image_of_basis(ic)).coords)
    iso = AlgebraHom(MC, A, cols)
    if not iso.is_bijective():
        raise SplittingError("multiplication map M_2 (x) C -> A is singular")
    return units, C, iso
