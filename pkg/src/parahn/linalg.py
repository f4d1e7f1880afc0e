"""Echelon-form linear algebra over a finite field.

Matrices are tuples of row tuples of element codes.  rref output is the
canonical reduced row echelon form, so it doubles as a dedup key for row
spaces and flag subspaces.
"""

from __future__ import annotations

from .gf import GF


def rref(F: GF, rows):
    """Reduced row echelon form.

    Returns (rref_rows, rank, pivot_columns); zero rows are kept in place at
    the bottom so the output shape matches the input.
    """
    mat = [list(r) for r in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if mat[i][c] != 0:
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        inv = F.inv(mat[r][c])
        if inv != 1:
            mat[r] = [F.mul(x, inv) for x in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c] != 0:
                coef = mat[i][c]
                row_r = mat[r]
                mat[i] = [F.sub(x, F.mul(coef, y)) for x, y in zip(mat[i], row_r)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in mat), r, tuple(pivots)


def row_space_basis(F: GF, rows):
    """Nonzero rows of the rref: the canonical basis of the row space."""
    red, rank, _ = rref(F, rows)
    return red[:rank]


def rank(F: GF, rows) -> int:
    if not rows:
        return 0
    return rref(F, rows)[1]


def kernel_basis(F: GF, rows, ncols=None):
    """Canonical basis of the right kernel {v : rows @ v = 0}."""
    if not rows:
        return tuple(
            tuple(1 if j == i else 0 for j in range(ncols or 0)) for i in range(ncols or 0)
        )
    n = ncols if ncols is not None else len(rows[0])
    red, rk, pivots = rref(F, rows)
    piv = set(pivots)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(red[i][fc])
        basis.append(tuple(v))
    return tuple(basis)


def matmul(F: GF, a, b):
    if not a or not b:
        return ()
    n, m, k = len(a), len(b[0]), len(b)
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            acc = 0
            for l in range(k):
                x = ai[l]
                if x:
                    acc = F.add(acc, F.mul(x, b[l][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def matvec(F: GF, a, v):
    out = []
    for row in a:
        acc = 0
        for x, y in zip(row, v):
            if x and y:
                acc = F.add(acc, F.mul(x, y))
        out.append(acc)
    return tuple(out)


def identity(n: int):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def subspace_contains(F: GF, basis, vector) -> bool:
    """Is vector in the row space of basis?"""
    if all(x == 0 for x in vector):
        return True
    if not basis:
        return False
    return rank(F, tuple(basis) + (tuple(vector),)) == rank(F, basis)


def subspace_leq(F: GF, inner, outer) -> bool:
    if not inner:
        return True
    if not outer:
        return False
    r_out = rank(F, outer)
    return rank(F, tuple(outer) + tuple(inner)) == r_out


def intersect_dim(F: GF, a, b) -> int:
    """Dimension of the intersection of two row spaces."""
    ra = rank(F, a) if a else 0
    rb = rank(F, b) if b else 0
    if ra == 0 or rb == 0:
        return 0
    rsum = rank(F, tuple(a) + tuple(b))
    return ra + rb - rsum
