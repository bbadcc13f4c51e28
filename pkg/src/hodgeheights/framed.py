"""Framed mixed Hodge structures and the two height functionals.

An (a, b)-framing of an MHS H singles out a rational class phi in
Gr^W_{2a} of Hodge type (a, a) and a rational functional psi on
Gr^W_{2b} of type (b, b).  Lifting phi into the bigrading piece I^{a,a}
gives the frame element e_H; the analogous lift on the dual structure
gives e_Hdual in I^{-b,-b} of the dual.  The two heights are

    ht1 = Im < e_Hdual, conj(e_H) >
    ht2 = < e_Hdual, delta(e_H) >        (real by construction)

with < , > the plain contraction between dual coordinates; no hidden
2 pi i normalizations, periods live inside the vectors.  Both vanish
when the structure splits over R.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _rational, deligne, mhs as mhs_mod
from .deligne import bigrading, delta_splitting
from .linalg import DTYPE, nilpotent_exp
from .mhs import MixedHodgeStructure, require_valid

#: Tolerance for the imaginary part of quantities that must be real.
REALITY_TOL = 1e-9


class FramingTypeError(ValueError):
    """The framing class is not of pure type (a,a) on its graded piece."""


class RealityViolation(ArithmeticError):
    """A provably real pairing came out with a large imaginary part."""


@dataclass(frozen=True, eq=False)
class FramedMHS:
    """An MHS with framing integers (a, b) and rational frame data.

    phi_class: rational vector in W_{2a} representing the framing class
    modulo W_{2a-1}.  psi_class: rational covector vanishing on W_{2b-1},
    representing the graded functional (its behaviour off W_{2b} is
    irrelevant: components of weight below -2b in the dual cannot reach
    I^{-b,-b}).
    """

    mhs: MixedHodgeStructure
    a: int
    b: int
    phi_class: tuple[Fraction, ...]
    psi_class: tuple[Fraction, ...]

    def __init__(self, mhs, a, b, phi_class, psi_class):
        object.__setattr__(self, "mhs", mhs)
        object.__setattr__(self, "a", int(a))
        object.__setattr__(self, "b", int(b))
        object.__setattr__(self, "phi_class", _rational.as_fraction_vector(phi_class))
        object.__setattr__(self, "psi_class", _rational.as_fraction_vector(psi_class))

    def check(self) -> None:
        """Exact rational sanity of the frame data (type checks happen on lift)."""
        h, a, b = self.mhs, self.a, self.b
        require_valid(h)
        if len(self.phi_class) != h.dimension or len(self.psi_class) != h.dimension:
            raise FramingTypeError("frame vectors of wrong length")
        if not _rational.in_span(self.phi_class, h.weight_rows(2 * a)):
            raise FramingTypeError(f"phi_class is not in W_{2 * a}")
        if _rational.in_span(self.phi_class, h.weight_rows(2 * a - 1)):
            raise FramingTypeError(f"phi_class vanishes in Gr^W_{2 * a}")
        for row in h.weight_rows(2 * b - 1):
            if sum(f * x for f, x in zip(self.psi_class, row)) != 0:
                raise FramingTypeError(f"psi_class does not vanish on W_{2 * b - 1}")


@dataclass(frozen=True)
class FrameElements:
    e_h: np.ndarray        # in I^{a,a} of H, Betti coordinates
    e_h_dual: np.ndarray   # in I^{-b,-b} of the dual, dual coordinates


@lru_cache(maxsize=512)
def _dual(h: MixedHodgeStructure) -> MixedHodgeStructure:
    return mhs_mod.dual(h)


def _typed_lift(b: deligne.Bigrading, vector: np.ndarray, p: int, q: int,
                what: str) -> np.ndarray:
    """Project onto I^{p,q}, checking the class has no other components of
    the same weight (that is the pure-type condition on the graded piece)."""
    coords = b.inverse_basis @ vector
    scale = max(float(np.linalg.norm(coords)), 1e-30)
    lift = np.zeros_like(coords)
    for i, (pi, qi) in enumerate(b.labels):
        if (pi, qi) == (p, q):
            lift[i] = coords[i]
        elif pi + qi == p + q and abs(coords[i]) > 1e-8 * scale:
            raise FramingTypeError(
                f"{what}: graded class has a component of type ({pi},{qi}), "
                f"expected pure ({p},{q})")
    return b.basis @ lift


def frame_elements(fh: FramedMHS) -> FrameElements:
    """The lifts e_H in I^{a,a}(H) and e_Hdual in I^{-b,-b}(dual H)."""
    fh.check()
    h, a, b = fh.mhs, fh.a, fh.b
    phi = np.array([float(x) for x in fh.phi_class], dtype=DTYPE)
    psi = np.array([float(x) for x in fh.psi_class], dtype=DTYPE)
    e_h = _typed_lift(bigrading(h), phi, a, a, "phi_class")
    e_hd = _typed_lift(bigrading(_dual(h)), psi, -b, -b, "psi_class")
    return FrameElements(e_h, e_hd)


def _pair(covector: np.ndarray, vector: np.ndarray) -> complex:
    return complex(np.dot(covector, vector))


def _warn_degenerate(fh: FramedMHS) -> None:
    if fh.a == fh.b:
        warnings.warn("height of an (a,a)-framed structure is degenerate",
                      stacklevel=3)


def height1(fh: FramedMHS) -> float:
    """First height: Im < e_Hdual, conj(e_H) >."""
    _warn_degenerate(fh)
    el = frame_elements(fh)
    return float(_pair(el.e_h_dual, el.e_h.conj()).imag)


def height1_via_delta(fh: FramedMHS) -> float:
    """Same value through the splitting: Im < e_Hdual, e^{-2i delta} e_H >.

    Kept as an independent computation path; conj(e_H) equals
    e^{-2i delta}(e_H) for every framed structure.
    """
    _warn_degenerate(fh)
    el = frame_elements(fh)
    delta = delta_splitting(fh.mhs).delta
    moved = nilpotent_exp(-2j * delta) @ el.e_h
    return float(_pair(el.e_h_dual, moved).imag)


def delta_pairing(fh: FramedMHS, power: int = 1) -> complex:
    """< e_Hdual, delta^power (e_H) > (real whenever power >= 1 and b < a)."""
    el = frame_elements(fh)
    delta = delta_splitting(fh.mhs).delta
    v = el.e_h
    for _ in range(power):
        v = delta @ v
    return _pair(el.e_h_dual, v)


def height2(fh: FramedMHS, reality_tol: float = REALITY_TOL) -> float:
    """Second height: < e_Hdual, delta(e_H) >, asserted real."""
    _warn_degenerate(fh)
    value = delta_pairing(fh, 1)
    scale = max(1.0, abs(value))
    if abs(value.imag) > reality_tol * scale:
        raise RealityViolation(
            f"height2 pairing has imaginary part {value.imag:.2e}")
    return float(value.real)


def dual_framed(fh: FramedMHS) -> FramedMHS:
    """The (-b, -a)-framed dual: phi and psi swap roles.  Heights negate."""
    return FramedMHS(_dual(fh.mhs), -fh.b, -fh.a, fh.psi_class, fh.phi_class)


def twist_framed(fh: FramedMHS, p: int) -> FramedMHS:
    """The (a-p, b-p)-framed twist H(p).  Heights are unchanged."""
    return FramedMHS(mhs_mod.twist(fh.mhs, p), fh.a - p, fh.b - p,
                     fh.phi_class, fh.psi_class)


def conjugate_framed(fh: FramedMHS) -> FramedMHS:
    """The conjugate structure framed by ((-1)^a conj e_H, (-1)^b conj e_Hdual).

    Heights pick up the sign (-1)^(a-b+1).
    """
    sa, sb = (-1) ** fh.a, (-1) ** fh.b
    return FramedMHS(mhs_mod.conjugate(fh.mhs), fh.a, fh.b,
                     tuple(sa * x for x in fh.phi_class),
                     tuple(sb * x for x in fh.psi_class))


def biextension_defect(fh: FramedMHS) -> float:
    """ht2 + ht1/2: zero whenever delta^3(e_H) = 0.

    In general the defect is (2/3) < e_Hdual, delta^3 e_H > plus
    corrections from delta^5 and beyond; the sign of the 2/3 coefficient
    here follows from expanding e^{-2i delta} term by term (the odd-order
    pairings are real, so ht1 = -2<d> + (4/3)<d^3> - (4/15)<d^5> + ...).
    """
    return height2(fh) + 0.5 * height1(fh)


@dataclass(frozen=True)
class MorphismReport:
    rational_structure_preserved: bool
    weight_preserved: bool
    hodge_preserved: bool
    phi_compatible: bool
    psi_compatible: bool
    m1: int
    m2: int
    heights_source: tuple[float, float]
    heights_target: tuple[float, float]

    @property
    def is_framed_morphism(self) -> bool:
        return all([self.rational_structure_preserved, self.weight_preserved,
                    self.hodge_preserved, self.phi_compatible,
                    self.psi_compatible])

    @property
    def height_invariance_error(self) -> float:
        """max_i | m1 Ht_i(source) - m2 Ht_i(target) |."""
        return max(abs(self.m1 * s - self.m2 * t)
                   for s, t in zip(self.heights_source, self.heights_target))


def framed_morphism_check(f: np.ndarray, source: FramedMHS, target: FramedMHS,
                          m1: int = 1, m2: int = 1,
                          tol: float = 1e-8) -> MorphismReport:
    """Verify f: source -> target is a framed morphism (up to scales m1, m2).

    A morphism of the underlying structures must respect the rational
    Betti structure (real matrix; a complex map preserving W and F does
    not move the bigradings functorially), W and F.  Frame compatibility
    means phi'-class = m1 * f(phi) and psi = m2 * psi' o f on the graded
    level.  For a genuine (scaled) framed morphism
    m1 * Ht_i(source) = m2 * Ht_i(target).
    """
    f = np.asarray(f, dtype=DTYPE)
    hs, ht = source.mhs, target.mhs
    require_valid(hs)
    require_valid(ht)

    real_ok = bool(np.linalg.norm(f.imag) < tol * max(1.0, np.linalg.norm(f)))
    w_ok = all(
        hs.weight_subspace(k).apply(f).containment_residual(ht.weight_subspace(k))
        < tol for k in hs.weight_jumps)
    f_ok = all(
        hs.hodge_subspace(p).apply(f).containment_residual(ht.hodge_subspace(p))
        < tol for p in hs.hodge_jumps)

    phi_s = np.array([float(x) for x in source.phi_class])
    phi_t = np.array([float(x) for x in target.phi_class])
    diff = m1 * (f @ phi_s) - phi_t
    # equality of graded classes: the difference drops into W_{2a-1}
    phi_ok = bool(ht.weight_subspace(2 * target.a - 1).contains(diff)
                  or np.linalg.norm(diff) < tol)

    psi_s = np.array([float(x) for x in source.psi_class])
    psi_t = np.array([float(x) for x in target.psi_class])
    pulled = m2 * (f.T @ psi_t) - psi_s
    # psi agreement only matters on W_{2b} of the source
    w2b = hs.weight_subspace(2 * source.b)
    psi_ok = bool(np.linalg.norm(pulled @ w2b.basis) < tol * max(1.0, np.linalg.norm(psi_t)))

    return MorphismReport(
        real_ok, w_ok, f_ok, phi_ok, psi_ok, m1, m2,
        (height1(source), height2(source)),
        (height1(target), height2(target)),
    )
