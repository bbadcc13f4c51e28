"""Exact linear algebra over the rationals.

The Betti side of a mixed Hodge structure carries exact rational data
(weight bases, framing vectors).  Operations that must stay rational --
annihilators of weight subspaces, graded complements, exact membership --
are done here with ``fractions.Fraction`` arithmetic so no float noise
leaks into the rational structure.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

RationalVector = tuple[Fraction, ...]
RationalMatrix = tuple[RationalVector, ...]


def as_fraction_vector(entries: Sequence) -> RationalVector:
    return tuple(Fraction(x) for x in entries)


def as_fraction_matrix(rows: Sequence[Sequence]) -> RationalMatrix:
    return tuple(as_fraction_vector(r) for r in rows)


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (reduced nonzero rows, pivot columns)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[RationalVector]:
    """Basis of {x : M x = 0} for the matrix with the given rows."""
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for c in free:
        v = [Fraction(0)] * ncols
        v[c] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i][c]
        basis.append(tuple(v))
    return basis


def in_span(vector: Sequence[Fraction], rows: Sequence[Sequence[Fraction]]) -> bool:
    """Exact membership of `vector` in the row span of `rows`."""
    base = rank(rows)
    return rank(list(rows) + [list(vector)]) == base


def complement_indices(inner_rows: Sequence[Sequence[Fraction]],
                       outer_rows: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of outer rows extending a basis of span(inner) to span(inner + outer).

    Used to pick rational representatives of a graded piece W_k / W_{k-1}.
    """
    acc = [list(r) for r in inner_rows]
    current = rank(acc)
    chosen = []
    for i, row in enumerate(outer_rows):
        acc.append(list(row))
        new = rank(acc)
        if new > current:
            chosen.append(i)
            current = new
        else:
            acc.pop()
    return chosen
