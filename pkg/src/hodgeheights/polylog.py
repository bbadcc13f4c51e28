"""Numerical polylogarithms, single-valued variants, and the polylog MHS.

Multivaluedness is handled through explicit continuation paths: a
``PolylogContext`` carries the target z, the matrix truncation N, and an
optional polyline of waypoints.  With no path, principal branches are
used and z must avoid the cuts (-inf, 0] and [1, inf); with a path, the
branch is the one obtained by continuing log and every Li_k along the
polyline from its basepoint (which must sit in the series disk
|z| <= 1/2, where all branches agree with the principal one).

Continuation integrates d Li_k = Li_{k-1} dt/t panel by panel along the
polyline.  Within a panel the functions are analytic, so each Li_k is
represented by a Chebyshev interpolant of its predecessor's integrand
and integrated coefficient-wise; panels are kept short relative to their
distance to the singularities {0, 1} and the whole transport is repeated
at a finer resolution until two runs agree, so endpoint values are
accurate to ~1e-11 for |z| <= 4.

The polylogarithm mixed Hodge structure H(z) of rank N+1 is assembled in
Betti coordinates from the period matrix A(z) = L(z) tau(2 pi i): the
weight filtration is the standard flag spanned by e_k..e_N in weight
-2k, and the Hodge filtration F^{-k} is spanned by the first k+1 columns
of A(z)^{-1} (the de Rham flag pulled back through the comparison map).
Its splitting and both heights admit closed forms used as end-to-end
oracles for the generic pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .framed import FramedMHS
from .linalg import DTYPE, nilpotent_log
from .mhs import MixedHodgeStructure

TWO_PI_I = 2j * np.pi


class PathThroughSingularity(ValueError):
    """The continuation path (or the target itself) hits 0, 1 or a cut."""


class NonConvergent(ArithmeticError):
    """Series cutoff exceeded or quadrature refinement failed to settle."""


@dataclass(frozen=True)
class PolylogContext:
    """Evaluation point, truncation and branch data for the polylog family.

    path: optional waypoints (p0, ..., z); p0 must lie in |t| <= 1/2 off
    the cuts and the last point must be z.  Empty path means principal
    branches.  series_terms bounds the basepoint series; quadrature_step
    caps the panel length of the continuation quadrature.
    """

    z: complex
    N: int = 6
    path: tuple[complex, ...] = ()
    series_terms: int = 400
    quadrature_step: float = 0.25
    refine_tol: float = 1e-11

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "path", tuple(complex(p) for p in self.path))
        if self.N < 1:
            raise ValueError("N must be >= 1")
        # z = 0 is allowed for bare Li evaluation (all Li_k(0) = 0); log z
        # and the matrices reject it separately.
        if abs(self.z - 1.0) < 1e-12:
            raise PathThroughSingularity("z = 1 is singular")
        if self.path:
            if abs(self.path[-1] - self.z) > 1e-12:
                raise PathThroughSingularity("path must end at z")
            p0 = self.path[0]
            if abs(p0) > 0.5 or _on_cut(p0):
                raise PathThroughSingularity(
                    "path basepoint must lie in |t| <= 1/2 off the cuts")


def _on_cut(z: complex) -> bool:
    return abs(z.imag) < 1e-14 and (z.real <= 0.0 or z.real >= 1.0)


def _segment_distance(a: complex, b: complex, point: complex) -> float:
    seg = b - a
    L2 = abs(seg) ** 2
    if L2 == 0.0:
        return abs(a - point)
    t = max(0.0, min(1.0, ((point - a) * seg.conjugate()).real / L2))
    return abs(a + t * seg - point)


def _check_segment(a: complex, b: complex) -> None:
    for special in (0.0, 1.0):
        if _segment_distance(a, b, special) < 1e-8:
            raise PathThroughSingularity(
                f"segment {a} -> {b} passes through {special}")


def _series_values(z: complex, count: int, terms: int) -> list[complex]:
    """Li_1..Li_count at |z| <= 1/2 by the defining series (principal branch)."""
    if abs(z) > 0.5 + 1e-13:
        raise ValueError("series evaluation outside |z| <= 1/2")
    vals = [0j] * count
    power = 1.0 + 0j
    for n in range(1, terms + 1):
        power *= z
        if abs(power) < 1e-18 and n > 4:
            return vals
        for k in range(count):
            vals[k] += power / n ** (k + 1)
    if abs(z) > 1e-15 and abs(power) > 1e-17:
        raise NonConvergent(f"series cutoff {terms} too small at |z|={abs(z):.3f}")
    return vals


def _panel_points(a: complex, b: complex, step: float) -> list[complex]:
    """Split [a, b] so each panel is short relative to its distance to {0, 1}."""
    out = [a]

    def rec(lo: complex, hi: complex, depth: int) -> None:
        if depth > 60:
            raise NonConvergent("panel subdivision did not terminate")
        mid = (lo + hi) / 2
        dist = min(abs(mid), abs(mid - 1.0))
        if abs(hi - lo) <= min(step, 0.6 * dist):
            out.append(hi)
            return
        rec(lo, mid, depth + 1)
        rec(mid, hi, depth + 1)

    rec(a, b, 0)
    return out


@lru_cache(maxsize=8)
def _cheb_nodes(order: int):
    x = -np.cos(np.pi * np.arange(order + 1) / order)   # ascending, x[0] = -1
    vand = cheb.chebvander(x, order)
    return x, np.linalg.inv(vand)


def _transport_once(points: tuple[complex, ...], count: int, terms: int,
                    step: float, order: int) -> tuple[complex, list[complex]]:
    """Continue (log t, Li_1..Li_count) along the polyline; returns end values."""
    t0 = points[0]
    log_t = complex(np.log(t0))
    li = np.array(_series_values(t0, count, terms), dtype=DTYPE)
    for a, b in zip(points, points[1:]):
        if abs(b - a) < 1e-15:
            continue
        _check_segment(a, b)
        panels = _panel_points(a, b, step)
        for lo, hi in zip(panels, panels[1:]):
            x, fit = _cheb_nodes(order)
            half = (hi - lo) / 2
            t = (lo + hi) / 2 + half * x
            # short panels keep the ratios in the right half plane, so the
            # principal log of the ratio continues the running branch
            log_nodes = log_t + np.log(t / lo)
            li1_nodes = li[0] - np.log((1.0 - t) / (1.0 - lo))
            values = [li1_nodes]
            prev = li1_nodes
            for k in range(1, count):
                integrand = prev * half / t
                coeffs = fit @ integrand
                anti = cheb.chebint(coeffs)
                primitive = cheb.chebval(x, anti)
                vals_k = li[k] + (primitive - primitive[0])
                values.append(vals_k)
                prev = vals_k
            log_t = complex(log_nodes[-1])
            li = np.array([v[-1] for v in values], dtype=DTYPE)
    return log_t, [complex(v) for v in li]


@lru_cache(maxsize=256)
def _transport(points: tuple[complex, ...], count: int, terms: int,
               step: float, refine_tol: float) -> tuple[complex, tuple[complex, ...]]:
    """Transport with one refinement pass; fails loudly if runs disagree."""
    log1, li1 = _transport_once(points, count, terms, step, order=32)
    log2, li2 = _transport_once(points, count, terms, step / 2, order=48)
    worst = max([abs(log1 - log2)] + [abs(u - v) for u, v in zip(li1, li2)])
    if worst > refine_tol:
        log1, li1 = log2, li2
        log2, li2 = _transport_once(points, count, terms, step / 4, order=48)
        worst = max([abs(log1 - log2)] + [abs(u - v) for u, v in zip(li1, li2)])
        if worst > refine_tol:
            raise NonConvergent(f"quadrature refinement stalled at {worst:.2e}")
    return log2, tuple(li2)


def _polyline(ctx: PolylogContext) -> tuple[complex, ...] | None:
    """None when plain series evaluation suffices (|z| <= 1/2, no path)."""
    if ctx.path:
        return ctx.path
    if abs(ctx.z) <= 0.5:
        return None
    if _on_cut(ctx.z):
        raise PathThroughSingularity(
            f"z = {ctx.z} lies on a branch cut; pass an explicit path")
    base = 0.4 * ctx.z / abs(ctx.z)
    return (base, ctx.z)


def _require_log_branch(ctx: PolylogContext) -> None:
    """Quantities involving log z need z away from 0 and off the log cut
    (unless an explicit path fixes the branch)."""
    if abs(ctx.z) < 1e-12:
        raise PathThroughSingularity("log z undefined at z = 0")
    if not ctx.path and _on_cut(ctx.z):
        raise PathThroughSingularity(
            f"z = {ctx.z} lies on a branch cut; pass an explicit path")


def branch_data(ctx: PolylogContext, count: int) -> tuple[complex, list[complex]]:
    """(log z, [Li_1..Li_count]) on the branch selected by the context.

    On the default path with |z| <= 1/2 the series applies even on the
    negative real axis (only [1, inf) is a cut for the Li_k themselves);
    the returned log is -inf at z = 0 and callers needing it must guard.
    """
    count = max(count, 1)
    pts = _polyline(ctx)
    if pts is None:
        lg = complex("-inf") if abs(ctx.z) < 1e-300 else complex(np.log(ctx.z))
        return lg, _series_values(ctx.z, count, ctx.series_terms)
    log_end, vals = _transport(pts, count, ctx.series_terms,
                               ctx.quadrature_step, ctx.refine_tol)
    return log_end, list(vals)


def li(k: int, ctx: PolylogContext) -> complex:
    """Li_k(z) on the context's branch."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return branch_data(ctx, k)[1][k - 1]


def log_z(ctx: PolylogContext) -> complex:
    _require_log_branch(ctx)
    return branch_data(ctx, 1)[0]


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli numbers with b_1 = -1/2: 1, -1/2, 1/6, 0, -1/30, 0, ..."""
    if m == 0:
        return Fraction(1)
    acc = Fraction(0)
    for j in range(m):
        acc += Fraction(math.comb(m + 1, j)) * bernoulli(j)
    return -acc / (m + 1)


def sv_brown(b: int, ctx: PolylogContext) -> complex:
    """Single-valued polylogarithm
    L_b = Li_b - sum_{k=0}^{b-1} (-1)^(b-k) (log zzbar)^k / k! conj(Li_{b-k}).

    Branch-independent; L_1(z) = -log |1-z|^2.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    _require_log_branch(ctx)
    lg, vals = branch_data(ctx, b)
    lzz = 2.0 * lg.real                      # log(z zbar), real on every branch
    out = vals[b - 1]
    for k in range(b):
        out -= (-1.0) ** (b - k) * lzz ** k / math.factorial(k) * np.conj(vals[b - k - 1])
    return complex(out)


def sv_bd(b: int, ctx: PolylogContext) -> complex:
    """Bernoulli-weighted single-valued polylogarithm extending Bloch--Wigner.

    Real for odd b, purely imaginary for even b (by construction).
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    _require_log_branch(ctx)
    lg, vals = branch_data(ctx, b)
    lzz = 2.0 * lg.real
    acc = 0.0
    for k in range(b):
        weight = float(bernoulli(k)) * lzz ** k / math.factorial(k)
        part = vals[b - k - 1].real if b % 2 == 1 else vals[b - k - 1].imag
        acc += weight * part
    return complex(acc) if b % 2 == 1 else 1j * acc


# -- the polylog matrices and mixed Hodge structure ----------------------


def tau(value: complex, size: int) -> np.ndarray:
    return np.diag([complex(value) ** j for j in range(size)]).astype(DTYPE)


def shift_matrix(size: int) -> np.ndarray:
    """e_0: the subdiagonal shift with zero first column."""
    e0 = np.zeros((size, size), dtype=DTYPE)
    for k in range(2, size):
        e0[k, k - 1] = 1.0
    return e0


@dataclass(frozen=True)
class PolylogMatrices:
    """L(z), A(z) = L tau(2 pi i), B = A conj(A)^{-1} tau(-1), e_0 and ell."""

    L: np.ndarray
    A: np.ndarray
    B: np.ndarray
    e0: np.ndarray
    ell: np.ndarray


def build_matrices(ctx: PolylogContext) -> PolylogMatrices:
    _require_log_branch(ctx)
    n = ctx.N + 1
    lg, vals = branch_data(ctx, ctx.N)
    L = np.eye(n, dtype=DTYPE)
    for i in range(1, n):
        L[i, 0] = -vals[i - 1]
        for j in range(1, i + 1):
            L[i, j] = lg ** (i - j) / math.factorial(i - j)
    A = L @ tau(TWO_PI_I, n)
    B = A @ np.linalg.inv(A.conj()) @ tau(-1.0, n)
    ell = np.array([-v for v in vals], dtype=DTYPE)
    return PolylogMatrices(L, A, B, shift_matrix(n), ell)


def closed_form_betti_conjugator(ctx: PolylogContext) -> np.ndarray:
    """A conj(A)^{-1} from its block closed form
    [[1,0],[ell,Id]] e^{log(zzbar) e0} tau(-1) [[1,0],[-conj(ell),Id]];
    B(z) is this matrix times tau(-1).
    """
    n = ctx.N + 1
    m = build_matrices(ctx)
    lzz = 2.0 * log_z(ctx).real
    lower = np.eye(n, dtype=DTYPE)
    lower[1:, 0] = m.ell
    unlower = np.eye(n, dtype=DTYPE)
    unlower[1:, 0] = -m.ell.conj()
    from .linalg import nilpotent_exp
    return lower @ nilpotent_exp(lzz * m.e0) @ tau(-1.0, n) @ unlower


@lru_cache(maxsize=256)
def polylog_mhs(ctx: PolylogContext) -> MixedHodgeStructure:
    """The rank N+1 Hodge--Tate structure H(z) in Betti coordinates.

    W_{-2k} is spanned by the standard vectors e_k..e_N; F^{-k} by the
    first k+1 columns of A(z)^{-1}, which is the de Rham flag C^{[0,k]}
    pulled back through the comparison map alpha = A(z).  The bigrading
    piece I^{-k,-k} is then spanned by column k of A(z)^{-1}.
    """
    n = ctx.N + 1
    mats = build_matrices(ctx)
    a_inv = np.linalg.inv(mats.A)
    weight = {}
    for k in range(ctx.N + 1):
        weight[-2 * k] = [[Fraction(1 if c == r else 0) for c in range(n)]
                          for r in range(k, n)]
    hodge = {-k: a_inv[:, : k + 1].T.copy() for k in range(ctx.N + 1)}
    return MixedHodgeStructure(n, weight, hodge, comparison_matrix=mats.A)


def polylog_framed(ctx: PolylogContext, a: int, b: int) -> FramedMHS:
    """The (-a, -b)-framed H(z), 0 <= a < b <= N; frame classes are the
    standard basis vector at position a and covector at position b."""
    if not (0 <= a < b <= ctx.N):
        raise ValueError(f"need 0 <= a < b <= N, got a={a}, b={b}, N={ctx.N}")
    n = ctx.N + 1

    def unit(i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(1 if j == i else 0) for j in range(n))

    return FramedMHS(polylog_mhs(ctx), -a, -b, unit(a), unit(b))


def delta_closed_form(ctx: PolylogContext) -> np.ndarray:
    """delta of H(z) in closed form, expressed in Betti coordinates.

    In the de Rham frame the splitting is (i/2) log B(z); conjugating by
    the comparison matrix A(z) moves it to the Betti frame used by the
    generic solver.
    """
    mats = build_matrices(ctx)
    delta_dr = 0.5j * nilpotent_log(mats.B)
    a_inv = np.linalg.inv(mats.A)
    return a_inv @ delta_dr @ mats.A


def heights_closed_form(ctx: PolylogContext, a: int, b: int) -> tuple[float, float]:
    """Reference closed forms for (ht1, ht2) of the (-a,-b)-framed H(z).

    ht1: -Im(L_b(z)/(2 pi i)^b) for a = 0, and
         Im( ((log zzbar)/(2 pi i))^(b-a) / (b-a)! ) for b > a > 0
         (zero when b - a is even).
    ht2: D_b(z)/(i (2 pi i)^b) for a = 0; for a > 0 the reference value
         is -log(zzbar)/(2 pi) when b = a + 1 and zero otherwise.  See
         the README discussion: the pipeline (and the biextension
         identity ht2 = -ht1/2, forced here by delta^3 e_H = 0) give
         +log(zzbar)/(4 pi) for the adjacent case instead.
    """
    if not (0 <= a < b <= ctx.N):
        raise ValueError(f"need 0 <= a < b <= N, got a={a}, b={b}")
    lzz = 2.0 * log_z(ctx).real
    if a == 0:
        ht1 = float((-sv_brown(b, ctx) / TWO_PI_I ** b).imag)
        ht2 = float((sv_bd(b, ctx) / (1j * TWO_PI_I ** b)).real)
    else:
        ht1 = float((((lzz / TWO_PI_I) ** (b - a)) / math.factorial(b - a)).imag)
        ht2 = float(-lzz / (2.0 * np.pi)) if b == a + 1 else 0.0
    return ht1, ht2
