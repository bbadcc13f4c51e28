"""Tolerance-aware complex linear algebra.

Subspaces of C^n are held as orthonormal spanning sets produced by a
rank-revealing SVD; every dimension decision goes through a relative
tolerance against the largest singular value.  Equality of subspaces is
mutual containment, never comparison of generators.

All values are immutable and all operations are pure, so everything here
is safe to share between threads.

Scalars are numpy complex128 throughout; ``DTYPE`` below is the single
seam to swap in a wider type if a future use case needs more precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DTYPE = np.complex128

#: Default relative rank tolerance (against the largest singular value).
DEFAULT_RANK_TOL = 1e-9


class LinalgError(ValueError):
    pass


class DimensionMismatch(LinalgError):
    pass


class NotUnipotent(LinalgError):
    """Raised by nilpotent_log when U - Id is not nilpotent at tolerance."""


class NotNilpotent(LinalgError):
    """Raised by nilpotent_exp when the argument is not nilpotent at tolerance."""


def _check_finite(arr: np.ndarray) -> np.ndarray:
    if arr.size and not np.all(np.isfinite(arr)):
        raise LinalgError("non-finite entries")
    return arr


def orthonormal_columns(mat: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the column span of `mat` at relative tolerance `tol`."""
    if mat.shape[1] == 0:
        return mat
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return mat[:, :0]
    r = int(np.sum(s > tol * s[0]))
    return u[:, :r]


def nullspace_columns(mat: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of {x : mat @ x = 0} at relative tolerance `tol`."""
    m, n = mat.shape
    if n == 0:
        return np.zeros((0, 0), dtype=DTYPE)
    if m == 0:
        return np.eye(n, dtype=DTYPE)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.sum(s > tol * s[0]))
    return vh[r:, :].conj().T


@dataclass(frozen=True, eq=False)
class Subspace:
    """A complex-linear subspace of C^n given by an orthonormal basis.

    `basis` has shape (ambient_dim, dim) with orthonormal columns.
    """

    ambient_dim: int
    basis: np.ndarray
    rank_tolerance: float = DEFAULT_RANK_TOL

    @staticmethod
    def from_vectors(vectors: Iterable[Sequence[complex]] | np.ndarray,
                     ambient_dim: int | None = None,
                     tol: float = DEFAULT_RANK_TOL) -> "Subspace":
        """Build the span of the given vectors (each of length ambient_dim)."""
        rows = np.array(list(vectors), dtype=DTYPE)
        if rows.size == 0:
            if ambient_dim is None:
                raise DimensionMismatch("empty spanning set needs ambient_dim")
            return Subspace.zero(ambient_dim, tol)
        _check_finite(rows)
        n = rows.shape[1]
        if ambient_dim is not None and n != ambient_dim:
            raise DimensionMismatch(f"vectors of length {n}, ambient {ambient_dim}")
        return Subspace(n, orthonormal_columns(rows.T, tol), tol)

    @staticmethod
    def zero(ambient_dim: int, tol: float = DEFAULT_RANK_TOL) -> "Subspace":
        return Subspace(ambient_dim, np.zeros((ambient_dim, 0), dtype=DTYPE), tol)

    @staticmethod
    def full(ambient_dim: int, tol: float = DEFAULT_RANK_TOL) -> "Subspace":
        return Subspace(ambient_dim, np.eye(ambient_dim, dtype=DTYPE), tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def contains(self, vector: Sequence[complex]) -> bool:
        """Membership: residual of the orthogonal projection below tolerance."""
        v = np.asarray(vector, dtype=DTYPE)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        resid = v - self.basis @ (self.basis.conj().T @ v)
        return bool(np.linalg.norm(resid) < max(self.rank_tolerance, 1e-12) * nv)

    def containment_residual(self, other: "Subspace") -> float:
        """How far self is from being contained in `other` (0 when contained)."""
        if self.dim == 0:
            return 0.0
        resid = self.basis - other.basis @ (other.basis.conj().T @ self.basis)
        return float(np.linalg.norm(resid))

    def contains_subspace(self, other: "Subspace", tol: float | None = None) -> bool:
        t = self.rank_tolerance if tol is None else tol
        return other.containment_residual(self) < t * max(1, self.ambient_dim)

    def equals(self, other: "Subspace", tol: float | None = None) -> bool:
        return (self.dim == other.dim
                and self.contains_subspace(other, tol)
                and other.contains_subspace(self, tol))

    def intersect(self, other: "Subspace") -> "Subspace":
        """Intersection: solve A u = B w via the nullspace of [A | -B]."""
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        tol = max(self.rank_tolerance, other.rank_tolerance)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, tol)
        stacked = np.hstack([self.basis, -other.basis])
        null = nullspace_columns(stacked, tol)
        vectors = self.basis @ null[: self.dim, :]
        return Subspace(self.ambient_dim, orthonormal_columns(vectors, tol), tol)

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        tol = max(self.rank_tolerance, other.rank_tolerance)
        joined = np.hstack([self.basis, other.basis])
        return Subspace(self.ambient_dim, orthonormal_columns(joined, tol), tol)

    def annihilator(self) -> "Subspace":
        """Functionals vanishing on self, as vectors in dual coordinates.

        Complex-linear: f is in the result iff sum_i f_i v_i = 0 for all v
        in self (no conjugation).
        """
        null = nullspace_columns(self.basis.T, self.rank_tolerance)
        return Subspace(self.ambient_dim, null, self.rank_tolerance)

    def conjugate(self) -> "Subspace":
        return Subspace(self.ambient_dim, self.basis.conj(), self.rank_tolerance)

    def apply(self, operator: np.ndarray) -> "Subspace":
        """Image of self under the given matrix (must be injective on self to
        preserve dimension; rank is re-decided at tolerance)."""
        img = operator @ self.basis
        return Subspace(operator.shape[0],
                        orthonormal_columns(img, self.rank_tolerance),
                        self.rank_tolerance)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a.intersect(b)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a.sum(b)


def annihilator(s: Subspace) -> Subspace:
    return s.annihilator()


def _nilpotency_order(mat: np.ndarray, tol: float) -> int:
    """Smallest k with mat^k = 0 at tolerance, or raise if there is none."""
    n = mat.shape[0]
    scale = max(np.linalg.norm(mat), 1.0)
    power = np.eye(n, dtype=DTYPE)
    for k in range(1, n + 1):
        power = power @ mat
        if np.linalg.norm(power) <= tol * scale**k:
            return k
    raise NotNilpotent(f"matrix is not nilpotent at tolerance {tol}")


def nilpotent_exp(mat: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """exp of a nilpotent matrix by its (finite) exponential series."""
    mat = np.asarray(mat, dtype=DTYPE)
    n = mat.shape[0]
    if n == 0:
        return mat.copy()
    _nilpotency_order(mat, tol)
    out = np.eye(n, dtype=DTYPE)
    term = np.eye(n, dtype=DTYPE)
    for k in range(1, n):
        term = term @ mat / k
        out = out + term
    return out


def nilpotent_log(mat: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """log of a unipotent matrix U by the finite series in N = U - Id.

    Raises NotUnipotent when (U - Id)^n is not zero at tolerance.  The
    result is strictly lower-triangular whenever U is unipotent
    lower-triangular, since every power of N then is.
    """
    mat = np.asarray(mat, dtype=DTYPE)
    n = mat.shape[0]
    if n == 0:
        return mat.copy()
    nil = mat - np.eye(n, dtype=DTYPE)
    try:
        _nilpotency_order(nil, tol)
    except NotNilpotent as exc:
        raise NotUnipotent(str(exc)) from exc
    out = np.zeros_like(nil)
    power = np.eye(n, dtype=DTYPE)
    for k in range(1, n):
        power = power @ nil
        out = out + ((-1) ** (k + 1)) * power / k
    return out
