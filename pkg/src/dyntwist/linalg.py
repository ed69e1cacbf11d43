"""Sparse exact linear algebra over Fraction.

Matrices are lists of rows; a row is a dict {column index: Fraction}.
Reduced row echelon form with lexicographic pivot order keeps every
derived basis deterministic across runs.
"""

from __future__ import annotations

from fractions import Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)


def rref(rows, ncols):
    """Reduced row echelon form.

    Returns (reduced_rows, pivot_cols).  Pivots are chosen left to right;
    rows of the input are consumed in order, so the result is a function
    of the input alone.
    """
    rows = [dict(r) for r in rows if r]
    reduced = []
    pivots = []
    for col in range(ncols):
        pivot_row = None
        for i, r in enumerate(rows):
            if r.get(col, _F0) != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        r = rows.pop(pivot_row)
        inv = _F1 / r[col]
        r = {c: v * inv for c, v in r.items() if v != 0}
        for other in rows:
            f = other.get(col)
            if f:
                for c, v in r.items():
                    nv = other.get(c, _F0) - f * v
                    if nv == 0:
                        other.pop(c, None)
                    else:
                        other[c] = nv
        for other in reduced:
            f = other.get(col)
            if f:
                for c, v in r.items():
                    nv = other.get(c, _F0) - f * v
                    if nv == 0:
                        other.pop(c, None)
                    else:
                        other[c] = nv
        reduced.append(r)
        pivots.append(col)
        rows = [x for x in rows if x]
        if not rows:
            break
    return reduced, pivots


def kernel_basis(rows, ncols):
    """Basis of the right kernel of the matrix, as column-index dicts.

    One basis vector per free column, in increasing column order, with the
    free coordinate normalized to 1.
    """
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = {free: _F1}
        for r, p in zip(reduced, pivots):
            c = r.get(free, _F0)
            if c != 0:
                vec[p] = -c
        basis.append(vec)
    return basis


def solve(rows, rhs, ncols):
    """One solution of A x = b, or None if inconsistent.

    `rows` is the matrix, `rhs` a dict {row index: Fraction}.  The
    particular solution sets every free variable to zero (minimal support
    for the fixed pivot order).
    """
    aug = []
    for i, r in enumerate(rows):
        row = dict(r)
        b = rhs.get(i, _F0)
        if b != 0:
            row[ncols] = b
        aug.append(row)
    reduced, pivots = rref(aug, ncols + 1)
    sol = {}
    for r, p in zip(reduced, pivots):
        if p == ncols:
            return None
        b = r.get(ncols, _F0)
        if b != 0:
            sol[p] = b
    return sol


def rank(rows, ncols) -> int:
    _, pivots = rref(rows, ncols)
    return len(pivots)
