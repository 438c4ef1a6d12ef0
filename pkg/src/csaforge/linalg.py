"""Exact dense linear algebra over the scalar types of ``exactfield``.

Matrices are lists of rows.  Over finite fields the work is done on integer
code arrays by the compiled kernels; over function fields and towers a plain
Gauss-Jordan elimination runs on the exact elements, choosing the pivot of
smallest size in each column to keep degrees down.
"""

from __future__ import annotations

import numpy as np

from . import _gfkernels as K
from .exactfield import FFElement, GF, RationalFunction
from .exactfield.specialize import SpecializationError, specialization_points, specialize


def is_finite(field):
    return getattr(field, "is_finite", False)


def tables(F):
    return F.p, F.np_exp, F.np_log, F.np_zech, F.q - 1


def to_codes(rows, ncols=None):
    if not rows:
        return np.zeros((0, ncols or 0), dtype=np.int64)
    return np.array([[x.code for x in row] for row in rows], dtype=np.int64)


def from_codes(F, arr):
    return [[FFElement(F, int(c)) for c in row] for row in arr]


def rref_codes(F, M):
    """In-place rref of a code matrix over the finite field F."""
    M = np.ascontiguousarray(M, dtype=np.int64)
    r, piv = K.rref_inplace(M, *tables(F))
    return M, [int(c) for c in piv[:r]]


def rank_codes(F, M):
    if M.size == 0:
        return 0
    _, piv = rref_codes(F, M.copy())
    return len(piv)


def _size(x):
    if isinstance(x, RationalFunction):
        return x.degree_in(0) if x.field.univariate else len(x.num.terms) + len(x.den.terms)
    return 0


def _generic_rref(rows, field):
    M = [list(r) for r in rows]
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        best, best_size = -1, None
        for i in range(r, nrows):
            if M[i][c]:
                s = _size(M[i][c])
                if best < 0 or s < best_size:
                    best, best_size = i, s
                    if s == 0:
                        break
        if best < 0:
            continue
        M[r], M[best] = M[best], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv if x else x for x in M[r]]
        prow = M[r]
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r and M[i][c]:
                f = M[i][c]
                row = M[i]
                for j in nz:
                    row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return M, pivots


def rref(rows, field):
    """Reduced row echelon form and pivot columns."""
    if is_finite(field):
        if not rows:
            return [], []
        M, piv = rref_codes(field, to_codes(rows))
        return from_codes(field, M), piv
    return _generic_rref(rows, field)


def rank(rows, field):
    if not rows:
        return 0
    if is_finite(field):
        return rank_codes(field, to_codes(rows))
    return len(_generic_rref(rows, field)[1])


def nullspace(rows, field, ncols=None):
    """Basis of {v : M v = 0} as a list of vectors."""
    ncols = len(rows[0]) if rows else ncols
    if not rows:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(rows, field)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for i, c in enumerate(piv):
            if R[i][f]:
                v[c] = -R[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs, field):
    """One solution x of M x = rhs, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, piv = rref(aug, field)
    if ncols in piv:
        return None
    x = [field.zero] * ncols
    for i, c in enumerate(piv):
        x[c] = R[i][ncols]
    return x


def solve_mod_p(rows, rhs, p):
    """Solve over the prime field F_p with plain integer input; None if inconsistent."""
    F = GF(p)
    sol = solve([[F(v) for v in r] for r in rows], [F(v) for v in rhs], F)
    return None if sol is None else [x.code for x in sol]


def transpose(rows):
    return [list(c) for c in zip(*rows)]


def matmul(A, B, field):
    if is_finite(field):
        C = K.matmul(to_codes(A), to_codes(B), *tables(field))
        return from_codes(field, C)
    Bt = transpose(B)
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if a]
        out.append([sum((a * col[k] for k, a in nz), field.zero) for col in Bt])
    return out


def inverse(rows, field):
    n = len(rows)
    aug = [list(r) + [field.one if i == j else field.zero for j in range(n)]
           for i, r in enumerate(rows)]
    R, piv = rref(aug, field)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


class RankCertificate:
    """Outcome of a rank computation and how it was obtained."""

    def __init__(self, rank, method, detail=""):
        self.rank = rank
        self.method = method
        self.detail = detail

    def __repr__(self):
        return f"RankCertificate(rank={self.rank}, method={self.method!r}, {self.detail})"


SPECIALIZATION_FIELD = (2, 16)


def certified_rank(rows, field, target=None, tries=4):
    """Exact rank, certified by specialization when the field is F_q(x, ...).

    Over a function field the matrix is first evaluated at deterministic
    points of a large finite extension of the base.  Evaluation is a ring map
    on the entries' local ring, so a specialized rank equal to ``target``
    (normally min(rows, cols)) proves that rank exactly.  Otherwise the exact
    elimination runs.
    """
    if not rows:
        return RankCertificate(0, "empty")
    full = min(len(rows), len(rows[0])) if target is None else target
    if isinstance(field, type(None)) or is_finite(field):
        return RankCertificate(rank(rows, field), "elimination")
    base = getattr(field, "base", None)
    if base is not None and hasattr(field, "nvars"):
        big = GF(base.p, _big_degree(base))
        for vals in specialization_points(field, big, tries, start=big.p + 7):
            try:
                spec = [[specialize(x, vals, big) for x in row] for row in rows]
            except SpecializationError:
                continue
            r = rank(spec, big)
            if r >= full:
                detail = f"at {[str(v) for v in vals]} in {big.name}"
                return RankCertificate(r, "specialization", detail)
    return RankCertificate(rank(rows, field), "elimination")


def _big_degree(base):
    # largest multiple of k with p^K <= 2^16
    k = base.k
    K_ = k
    while base.p ** (K_ + k) <= 1 << 16:
        K_ += k
    return K_
