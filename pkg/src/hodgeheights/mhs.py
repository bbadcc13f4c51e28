"""Mixed Hodge structures in Betti coordinates.

A mixed Hodge structure (MHS) here is a rational vector space Q^n with an
increasing weight filtration W (rational bases, kept exact as Fractions)
and a decreasing Hodge filtration F on C^n (complex bases, expressed in
Betti coordinates, i.e. pulled back through the comparison isomorphism).
Working in Betti coordinates makes complex conjugation entrywise, which
is relied on everywhere downstream.

Filtrations are stored sparsely by jump index:

* W_k is the value stored at the largest jump <= k, and 0 below the
  smallest jump; the value at the largest jump must be the full space.
* F^p is the value stored at the smallest jump >= p, and 0 above the
  largest jump; the value at the smallest jump must be the full space.

Instances are immutable; all operations are pure functions returning new
structures, safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import _rational
from ._rational import RationalMatrix
from .linalg import DEFAULT_RANK_TOL, DTYPE, Subspace, nilpotent_exp


class InvalidMHS(ValueError):
    """Input fails MHS validation; carries the offending report."""

    def __init__(self, report: "ValidationReport"):
        super().__init__("invalid mixed Hodge structure:\n" + report.describe())
        self.report = report


@dataclass(frozen=True)
class Violation:
    kind: str           # "weight", "hodge", "purity", "data"
    index: int | None   # offending k or p, when there is one
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"[{v.kind}@{v.index}] {v.message}" for v in self.violations)


def _freeze_weight(filtration: Mapping[int, Sequence[Sequence]]) -> dict[int, RationalMatrix]:
    out = {}
    for k, rows in filtration.items():
        out[int(k)] = _rational.as_fraction_matrix(rows)
    return dict(sorted(out.items()))


def _freeze_hodge(filtration: Mapping[int, Sequence[Sequence[complex]]]) -> dict[int, np.ndarray]:
    out = {}
    for p, rows in filtration.items():
        arr = np.array(rows, dtype=DTYPE)
        arr.setflags(write=False)
        out[int(p)] = arr
    return dict(sorted(out.items()))


@dataclass(frozen=True, eq=False)
class MixedHodgeStructure:
    """An MHS on Q^n in Betti coordinates.

    weight_filtration maps jump k to a list of rational row vectors
    spanning W_k; hodge_filtration maps jump p to complex row vectors
    spanning F^p.  comparison_matrix optionally records the Betti -> de
    Rham change of frame for reporting.
    """

    dimension: int
    weight_filtration: dict[int, RationalMatrix]
    hodge_filtration: dict[int, np.ndarray]
    comparison_matrix: np.ndarray | None = None
    rank_tolerance: float = DEFAULT_RANK_TOL

    def __init__(self, dimension, weight_filtration, hodge_filtration,
                 comparison_matrix=None, rank_tolerance=DEFAULT_RANK_TOL):
        object.__setattr__(self, "dimension", int(dimension))
        object.__setattr__(self, "weight_filtration", _freeze_weight(weight_filtration))
        object.__setattr__(self, "hodge_filtration", _freeze_hodge(hodge_filtration))
        if comparison_matrix is not None:
            comparison_matrix = np.array(comparison_matrix, dtype=DTYPE)
            comparison_matrix.setflags(write=False)
        object.__setattr__(self, "comparison_matrix", comparison_matrix)
        object.__setattr__(self, "rank_tolerance", float(rank_tolerance))

    # -- sparse filtration queries -------------------------------------

    @property
    def weight_jumps(self) -> list[int]:
        return sorted(self.weight_filtration)

    @property
    def hodge_jumps(self) -> list[int]:
        return sorted(self.hodge_filtration)

    def weight_rows(self, k: int) -> RationalMatrix:
        """Exact rational spanning rows of W_k (empty below the lowest jump)."""
        jumps = [j for j in self.weight_jumps if j <= k]
        if not jumps:
            return ()
        return self.weight_filtration[jumps[-1]]

    def hodge_rows(self, p: int) -> np.ndarray:
        jumps = [j for j in self.hodge_jumps if j >= p]
        if not jumps:
            return np.zeros((0, self.dimension), dtype=DTYPE)
        return self.hodge_filtration[jumps[0]]

    @cached_property
    def _memo(self) -> dict:
        return {}

    def weight_subspace(self, k: int) -> Subspace:
        key = ("W", k)
        if key not in self._memo:
            rows = [[float(x) for x in row] for row in self.weight_rows(k)]
            self._memo[key] = Subspace.from_vectors(
                np.array(rows, dtype=DTYPE).reshape(len(rows), self.dimension),
                ambient_dim=self.dimension, tol=self.rank_tolerance)
        return self._memo[key]

    def hodge_subspace(self, p: int) -> Subspace:
        key = ("F", p)
        if key not in self._memo:
            self._memo[key] = Subspace.from_vectors(
                self.hodge_rows(p), ambient_dim=self.dimension,
                tol=self.rank_tolerance)
        return self._memo[key]

    # -- exact weight-graded data --------------------------------------

    def weight_rank(self, k: int) -> int:
        return _rational.rank(self.weight_rows(k))

    def graded_dimension(self, k: int) -> int:
        return self.weight_rank(k) - self.weight_rank(k - 1)

    def graded_rational_basis(self, k: int) -> RationalMatrix:
        """Rational vectors in W_k whose classes form a basis of Gr^W_k."""
        inner = self.weight_rows(k - 1)
        outer = self.weight_rows(k)
        chosen = _rational.complement_indices(inner, outer)
        return tuple(outer[i] for i in chosen)

    def weights_present(self) -> list[int]:
        return [k for k in self.weight_jumps if self.graded_dimension(k) > 0]

    def __repr__(self) -> str:  # pragma: no cover
        return (f"MixedHodgeStructure(dim={self.dimension}, "
                f"W jumps={self.weight_jumps}, F jumps={self.hodge_jumps})")


def _graded_model(h: MixedHodgeStructure, k: int) -> np.ndarray | None:
    """Real orthonormal columns modelling Gr^W_k = W_k minus W_{k-1}.

    W is rational, so the model can be taken real; conjugation on the
    graded piece is then entrywise in model coordinates.
    """
    wk = h.weight_subspace(k)
    wk1 = h.weight_subspace(k - 1)
    m = wk.dim - wk1.dim
    if m <= 0:
        return None
    proj = np.eye(h.dimension) - wk1.basis.real @ wk1.basis.real.T
    reduced = proj @ wk.basis.real
    u, s, _ = np.linalg.svd(reduced, full_matrices=False)
    return u[:, :m]


def _induced_on_graded(h: MixedHodgeStructure, sub: Subspace, k: int,
                       model: np.ndarray) -> Subspace:
    """Image of (sub cap W_k) in the graded model of Gr^W_k."""
    cut = sub.intersect(h.weight_subspace(k))
    coords = model.T @ cut.basis
    return Subspace.from_vectors(coords.T, ambient_dim=model.shape[1],
                                 tol=h.rank_tolerance)


def validate(h: MixedHodgeStructure) -> ValidationReport:
    """Check all MHS invariants; never raises.

    Weight containments and fullness are checked exactly in rational
    arithmetic; purity of the graded pieces is checked numerically.
    """
    bad: list[Violation] = []
    n = h.dimension

    if n == 0:
        return ValidationReport(())
    if not h.weight_filtration:
        bad.append(Violation("weight", None, "empty weight filtration"))
    if not h.hodge_filtration:
        bad.append(Violation("hodge", None, "empty Hodge filtration"))
    if bad:
        return ValidationReport(tuple(bad))

    for rows in h.weight_filtration.values():
        for row in rows:
            if len(row) != n:
                bad.append(Violation("data", None, "weight vector of wrong length"))
                return ValidationReport(tuple(bad))
    for arr in h.hodge_filtration.values():
        if arr.size and arr.shape[1] != n:
            bad.append(Violation("data", None, "Hodge vector of wrong length"))
            return ValidationReport(tuple(bad))
        if arr.size and not np.all(np.isfinite(arr)):
            bad.append(Violation("data", None, "non-finite Hodge entries"))
            return ValidationReport(tuple(bad))

    # W increasing (exact), top = full space
    jumps = h.weight_jumps
    for lo, hi in zip(jumps, jumps[1:]):
        lo_rows = h.weight_filtration[lo]
        hi_rank = _rational.rank(h.weight_filtration[hi])
        if _rational.rank(list(h.weight_filtration[hi]) + list(lo_rows)) != hi_rank:
            bad.append(Violation("weight", hi, f"W_{lo} not contained in W_{hi}"))
    if _rational.rank(h.weight_filtration[jumps[-1]]) != n:
        bad.append(Violation("weight", jumps[-1], "top weight subspace is not full"))

    # F decreasing (numeric), bottom = full space
    pjumps = h.hodge_jumps
    for lo, hi in zip(pjumps, pjumps[1:]):
        if not h.hodge_subspace(lo).contains_subspace(h.hodge_subspace(hi), 1e-8):
            bad.append(Violation("hodge", hi, f"F^{hi} not contained in F^{lo}"))
    if h.hodge_subspace(pjumps[0]).dim != n:
        bad.append(Violation("hodge", pjumps[0], "bottom Hodge subspace is not full"))

    if bad:
        return ValidationReport(tuple(bad))

    # graded purity: on Gr^W_k, F^p and conj(F^{k-p+1}) are complementary
    p_lo, p_hi = pjumps[0], pjumps[-1]
    for k in jumps:
        model = _graded_model(h, k)
        if model is None:
            continue
        m = model.shape[1]
        for p in range(p_lo, p_hi + 2):
            f_side = _induced_on_graded(h, h.hodge_subspace(p), k, model)
            conj_side = _induced_on_graded(
                h, h.hodge_subspace(k - p + 1).conjugate(), k, model)
            if f_side.dim + conj_side.dim != m or f_side.intersect(conj_side).dim != 0:
                bad.append(Violation(
                    "purity", k,
                    f"Gr^W_{k}: F^{p} (dim {f_side.dim}) and conj F^{k - p + 1} "
                    f"(dim {conj_side.dim}) do not split dim {m}"))

    return ValidationReport(tuple(bad))


def require_valid(h: MixedHodgeStructure) -> None:
    report = validate(h)
    if not report.ok:
        raise InvalidMHS(report)


def induced_hodge_numbers(h: MixedHodgeStructure, k: int) -> dict[int, int]:
    """h^{p, k-p} of the pure structure on Gr^W_k from the induced filtration.

    These must match the dimensions of the bigrading pieces I^{p, k-p}.
    """
    model = _graded_model(h, k)
    if model is None:
        return {}
    jumps = h.hodge_jumps
    out = {}
    for p in range(jumps[0], jumps[-1] + 1):
        here = _induced_on_graded(h, h.hodge_subspace(p), k, model).dim
        above = _induced_on_graded(h, h.hodge_subspace(p + 1), k, model).dim
        if here > above:
            out[p] = here - above
    return out


# -- constructions ------------------------------------------------------


def tate(a: int) -> MixedHodgeStructure:
    """The rank-1 pure structure Q(a): weight -2a, Hodge jump -a, period (2 pi i)^a."""
    return MixedHodgeStructure(
        1,
        {-2 * a: [[Fraction(1)]]},
        {-a: [[1.0]]},
        comparison_matrix=[[(2j * np.pi) ** a]],
    )


def dual(h: MixedHodgeStructure) -> MixedHodgeStructure:
    """Dual MHS on the dual coordinates.

    W_k(dual) = Ann(W_{-k-1}) keeps exact rational bases; F^p(dual) =
    Ann(F^{-p+1}) is numeric.  Conventions make dual(Q(a)) = Q(-a).
    """
    require_valid(h)
    n = h.dimension

    jumps = h.weight_jumps                     # k_1 < ... < k_r, value S_i at k_i
    dual_w: dict[int, list] = {}
    prev_rows: tuple = ()
    # ascending j segments: value Ann(S_{i-1}) starts at j = -k_i
    for k in jumps:
        dual_w[-k] = [list(v) for v in _rational.nullspace(prev_rows, n)]
        prev_rows = h.weight_filtration[k]

    pjumps = h.hodge_jumps                     # p_1 < ... < p_r, value T_i at p_i
    dual_f: dict[int, np.ndarray] = {}
    # segment of value Ann(T_{i+1}) tops out at q = -p_i; top segment is full
    dual_f[-pjumps[-1]] = np.eye(n, dtype=DTYPE)
    for i in range(1, len(pjumps)):
        top_key = -pjumps[i - 1]
        ann = h.hodge_subspace(pjumps[i]).annihilator()
        dual_f[top_key] = ann.basis.T.copy()

    return MixedHodgeStructure(n, dual_w, dual_f, None, h.rank_tolerance)


def twist(h: MixedHodgeStructure, p: int) -> MixedHodgeStructure:
    """Tate twist H(p): W_k -> W_{k+2p}, F^q -> F^{q+p}, Betti basis unchanged."""
    require_valid(h)
    return MixedHodgeStructure(
        h.dimension,
        {k - 2 * p: rows for k, rows in h.weight_filtration.items()},
        {q - p: arr for q, arr in h.hodge_filtration.items()},
        None,
        h.rank_tolerance,
    )


def conjugate(h: MixedHodgeStructure) -> MixedHodgeStructure:
    """Complex conjugate MHS: same rational data and W, F replaced by conj(F)."""
    require_valid(h)
    comparison = None
    if h.comparison_matrix is not None:
        comparison = h.comparison_matrix.conj()
    return MixedHodgeStructure(
        h.dimension,
        h.weight_filtration,
        {p: arr.conj() for p, arr in h.hodge_filtration.items()},
        comparison,
        h.rank_tolerance,
    )


# -- randomized Hodge--Tate structures ----------------------------------


def _split_hodge_tate(dims: Sequence[int]) -> MixedHodgeStructure:
    """Direct sum of Tate pieces: block i has weight -2i with multiplicity dims[i]."""
    n = int(sum(dims))
    offsets = np.cumsum([0] + list(dims))
    weight, hodge = {}, {}
    for i, d in enumerate(dims):
        # W_{-2i} is spanned by blocks i..end
        rows = [[Fraction(1 if c == r else 0) for c in range(n)]
                for r in range(offsets[i], n)]
        weight[-2 * i] = rows
        cols = np.eye(n, dtype=DTYPE)[: offsets[i] + d]
        hodge[-i] = cols
    return MixedHodgeStructure(n, weight, hodge)


def random_lowering(dims: Sequence[int], seed: int, scale: float = 0.8) -> np.ndarray:
    """Random element of Lambda^{-1,-1} for the split Hodge--Tate block layout.

    For a split Hodge--Tate structure the (-m,-m) Hodge components of gl
    are exactly the maps sending a weight block into a strictly lower
    block, so any block-strictly-lower matrix qualifies.  Complex-valued
    on purpose: real ones produce R-split twists.
    """
    rng = np.random.default_rng(seed)
    n = int(sum(dims))
    offsets = np.cumsum([0] + list(dims))
    lam = np.zeros((n, n), dtype=DTYPE)
    for i in range(len(dims)):
        for j in range(i):
            block = (rng.standard_normal((dims[i], dims[j]))
                     + 1j * rng.standard_normal((dims[i], dims[j]))) * scale
            lam[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = block
    return lam


def random_hodge_tate_pair(dims: Sequence[int], seed: int, scale: float = 0.8,
                           real: bool = False):
    """(split structure, lambda, twisted structure) for the given seed.

    The twisted structure is (e^lambda . F, W): a valid MHS whose graded
    piece of weight -2i is Q(i)^dims[i], generally not split over R.
    With real=True the generator is real and the result stays R-split.
    """
    split = _split_hodge_tate(dims)
    lam = random_lowering(dims, seed, scale)
    if real:
        lam = lam.real.astype(DTYPE)
    g = nilpotent_exp(lam)
    hodge = {p: (g @ arr.T).T for p, arr in split.hodge_filtration.items()}
    twisted = MixedHodgeStructure(split.dimension, split.weight_filtration, hodge)
    return split, lam, twisted


def random_hodge_tate(dims: Sequence[int], seed: int,
                      scale: float = 0.8) -> MixedHodgeStructure:
    """Random Hodge--Tate MHS with Gr^W_{-2i} = Q(i)^dims[i], deterministic per seed."""
    return random_hodge_tate_pair(dims, seed, scale)[2]
