"""Compiled Gaussian elimination over F_q on integer code matrices.

Codes and tables follow ``exactfield.finite``: multiplication through
exponent/log tables (exp doubled), addition by XOR in characteristic 2 and
by Zech logarithms otherwise.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _mul(a, b, exp, log):
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


@njit(cache=True, inline="always")
def _add(a, b, p, exp, log, zech, qm1):
    if p == 2:
        return a ^ b
    if a == 0:
        return b
    if b == 0:
        return a
    la = log[a]
    d = log[b] - la
    if d < 0:
        d += qm1
    z = zech[d]
    if z < 0:
        return 0
    return exp[la + z]


@njit(cache=True)
def rref_inplace(M, p, exp, log, zech, qm1):
    """Reduce M to reduced row echelon form; return (rank, pivot columns)."""
    rows, cols = M.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    neglog = 0 if p == 2 else qm1 // 2
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = M[r, j]
                M[r, j] = M[piv, j]
                M[piv, j] = t
        la = log[M[r, c]]
        inv = exp[(qm1 - la) % qm1]
        for j in range(c, cols):
            M[r, j] = _mul(M[r, j], inv, exp, log)
        for i in range(rows):
            if i == r:
                continue
            f = M[i, c]
            if f == 0:
                continue
            nf = f if p == 2 else exp[log[f] + neglog]
            lnf = log[nf]
            for j in range(c, cols):
                v = M[r, j]
                if v != 0:
                    M[i, j] = _add(M[i, j], exp[lnf + log[v]], p, exp, log, zech, qm1)
        pivots[r] = c
        r += 1
    return r, pivots[:r]


@njit(cache=True)
def matmul(A, B, p, exp, log, zech, qm1):
    n, m = A.shape
    k = B.shape[1]
    C = np.zeros((n, k), dtype=np.int64)
    for i in range(n):
        for l in range(m):
            a = A[i, l]
            if a == 0:
                continue
            la = log[a]
            for j in range(k):
                b = B[l, j]
                if b != 0:
                    C[i, j] = _add(C[i, j], exp[la + log[b]], p, exp, log, zech, qm1)
    return C


@njit(cache=True)
def sandwich_columns(cols_a, cols_b, Lptr, Lidx, Lval, Rptr, Ridx, Rval, row_of, nrows,
                     dim, p, exp, log, zech, qm1):
    """Matrix of the maps x -> e_a x e_b restricted to selected coordinates.

    For each column t the operator x -> e_{cols_a[t]} x e_{cols_b[t]} is
    expanded; entry (row_of[y * dim + x], t) receives the coefficient of e_y
    in e_a e_x e_b.  Pairs (x, y) with row_of == -1 must not occur (the caller
    guarantees this through a grading); they are reported by returning -1.

    Sparse products: R-lists give e_x e_b = sum over (m, c) and L-lists give
    e_a e_m = sum over (y, c), both in CSR layout indexed by (b * dim + x)
    and (a * dim + m).
    """
    ncols = cols_a.shape[0]
    out = np.zeros((nrows, ncols), dtype=np.int64)
    for t in range(ncols):
        a = cols_a[t]
        b = cols_b[t]
        for x in range(dim):
            rk = b * dim + x
            for s in range(Rptr[rk], Rptr[rk + 1]):
                m = Ridx[s]
                cr = Rval[s]
                lk = a * dim + m
                for u in range(Lptr[lk], Lptr[lk + 1]):
                    y = Lidx[u]
                    v = _mul(cr, Lval[u], exp, log)
                    row = row_of[y * dim + x]
                    if row < 0:
                        return out, -1
                    out[row, t] = _add(out[row, t], v, p, exp, log, zech, qm1)
    return out, 0
