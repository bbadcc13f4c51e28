import math
from fractions import Fraction

import numpy as np
import pytest

from hodgeheights.framed import (FramedMHS, FramingTypeError,
                                 biextension_defect, conjugate_framed,
                                 delta_pairing, dual_framed, frame_elements,
                                 framed_morphism_check, height1,
                                 height1_via_delta, height2, twist_framed)
from hodgeheights.linalg import nilpotent_exp
from hodgeheights.mhs import (MixedHodgeStructure, random_hodge_tate,
                              random_hodge_tate_pair)

from conftest import random_framing


def unit(i, n):
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


class TestFrameElements:
    def test_split_structure_lift_is_the_class_itself(self):
        h = random_hodge_tate([1, 1, 1], seed=0, scale=0.0)
        fh = FramedMHS(h, 0, -2, unit(0, 3), unit(2, 3))
        el = frame_elements(fh)
        assert np.allclose(el.e_h, [1, 0, 0], atol=1e-12)
        assert np.allclose(el.e_h_dual, [0, 0, 1], atol=1e-12)

    def test_polylog_frame_elements(self, polylog_ctx_factory):
        from hodgeheights.polylog import build_matrices, polylog_framed
        ctx = polylog_ctx_factory(0.3 + 0.2j, 4)
        mats = build_matrices(ctx)
        a_inv = np.linalg.inv(mats.A)
        two_pi_i = 2j * np.pi
        for (a, b) in [(0, 2), (1, 3), (2, 4)]:
            el = frame_elements(polylog_framed(ctx, a, b))
            assert np.linalg.norm(el.e_h - two_pi_i ** a * a_inv[:, a]) < 1e-9
            assert np.linalg.norm(el.e_h_dual - mats.A[b, :] / two_pi_i ** b) < 1e-9

    def test_dual_framing_swaps_elements(self):
        h = random_hodge_tate([1, 1, 1], seed=12)
        fh = random_framing(h, np.random.default_rng(0))
        el = frame_elements(fh)
        el_dual = frame_elements(dual_framed(fh))
        assert np.allclose(el_dual.e_h, el.e_h_dual, atol=1e-10)
        assert np.allclose(el_dual.e_h_dual, el.e_h, atol=1e-10)

    def test_off_type_class_rejected(self):
        # pure weight 0 with Hodge types (1,-1) and (-1,1): no rational class
        # in Gr^W_0 has pure type (0,0), so any framing attempt must fail
        h = MixedHodgeStructure(
            2,
            {0: [[1, 0], [0, 1]]},
            {-1: np.eye(2, dtype=complex), 1: np.array([[1.0, 1j]])},
        )
        fh = FramedMHS(h, 0, 0, unit(0, 2), unit(1, 2))
        with pytest.raises(FramingTypeError):
            frame_elements(fh)

    def test_class_outside_weight_rejected(self):
        h = random_hodge_tate([1, 1], seed=1)
        bad = FramedMHS(h, -1, -1, unit(0, 2), unit(1, 2))  # e_0 not in W_{-2}
        with pytest.raises(FramingTypeError):
            frame_elements(bad)


class TestHeights:
    def test_r_split_heights_vanish(self):
        _, _, h = random_hodge_tate_pair([1, 1, 1], seed=5, real=True)
        fh = random_framing(h, np.random.default_rng(3))
        assert abs(height1(fh)) < 1e-12
        assert abs(height2(fh)) < 1e-12

    def test_two_height1_paths_agree(self):
        rng = np.random.default_rng(7)
        for seed in range(20):
            h = random_hodge_tate([1, 1, 1, 1], seed=seed)
            fh = random_framing(h, rng)
            assert abs(height1(fh) - height1_via_delta(fh)) < 1e-9

    def test_conjugate_lift_identity(self):
        # conj(e_H) = e^{-2i delta}(e_H) as vectors
        from hodgeheights.deligne import delta_splitting
        rng = np.random.default_rng(1)
        for seed in range(10):
            h = random_hodge_tate([1, 2, 1], seed=seed)
            fh = random_framing(h, rng)
            el = frame_elements(fh)
            delta = delta_splitting(h).delta
            moved = nilpotent_exp(-2j * delta) @ el.e_h
            assert np.linalg.norm(el.e_h.conj() - moved) < 1e-8

    def test_duality_antisymmetry(self):
        rng = np.random.default_rng(2)
        for seed in range(10):
            h = random_hodge_tate([1, 1, 2], seed=seed)
            fh = random_framing(h, rng)
            fd = dual_framed(fh)
            assert abs(height1(fd) + height1(fh)) < 1e-9
            assert abs(height2(fd) + height2(fh)) < 1e-9

    def test_double_dual_restores(self):
        h = random_hodge_tate([1, 1, 1], seed=3)
        fh = random_framing(h, np.random.default_rng(11))
        fdd = dual_framed(dual_framed(fh))
        assert abs(height1(fdd) - height1(fh)) < 1e-9
        assert abs(height2(fdd) - height2(fh)) < 1e-9

    def test_twist_invariance(self):
        rng = np.random.default_rng(4)
        h = random_hodge_tate([2, 1, 1], seed=10)
        fh = random_framing(h, rng)
        for p in (-2, -1, 0, 1, 2):
            ft = twist_framed(fh, p)
            assert ft.a == fh.a - p and ft.b == fh.b - p
            assert abs(height1(ft) - height1(fh)) < 1e-9
            assert abs(height2(ft) - height2(fh)) < 1e-9

    def test_conjugation_sign_law(self):
        rng = np.random.default_rng(9)
        for seed in range(10):
            h = random_hodge_tate([1, 1, 1, 1], seed=seed)
            fh = random_framing(h, rng,
                                b_level=int(rng.integers(1, 4)))
            sign = (-1) ** (fh.a - fh.b + 1)
            fc = conjugate_framed(fh)
            assert abs(height1(fc) - sign * height1(fh)) < 1e-9
            assert abs(height2(fc) - sign * height2(fh)) < 1e-9

    def test_polylog_dual_and_twist_spot_values(self, polylog_ctx_factory):
        from hodgeheights.polylog import polylog_framed
        ctx = polylog_ctx_factory(0.3 + 0.2j, 4)
        fh = polylog_framed(ctx, 1, 3)
        ht = (height1(fh), height2(fh))
        fd = dual_framed(fh)
        assert abs(height1(fd) + ht[0]) < 1e-9
        assert abs(height2(fd) + ht[1]) < 1e-9
        sign = (-1) ** (fh.a - fh.b + 1)
        fc = conjugate_framed(fh)
        assert abs(height1(fc) - sign * ht[0]) < 1e-9
        assert abs(height2(fc) - sign * ht[1]) < 1e-9
        for p in (-2, -1, 1, 2):
            ft = twist_framed(fh, p)
            assert abs(height1(ft) - ht[0]) < 1e-9
            assert abs(height2(ft) - ht[1]) < 1e-9
            # frame elements are the old ones tensored by a Tate generator,
            # which is invisible in coordinates
            el, elt = frame_elements(fh), frame_elements(ft)
            assert np.allclose(el.e_h, elt.e_h, atol=1e-10)
            assert np.allclose(el.e_h_dual, elt.e_h_dual, atol=1e-10)

    def test_reality_of_delta_power_pairings(self):
        rng = np.random.default_rng(14)
        for seed in range(10):
            h = random_hodge_tate([1, 1, 1, 1], seed=seed)
            fh = random_framing(h, rng)
            for r in (1, 2, 3):
                assert abs(delta_pairing(fh, r).imag) < 1e-9

    def test_degenerate_equal_framing_warns(self):
        h = random_hodge_tate([2, 1], seed=2)
        fh = FramedMHS(h, 0, 0, unit(0, 3), unit(1, 3))
        with pytest.warns(UserWarning):
            height1(fh)


class TestBiextensionRelation:
    def test_defect_vanishes_on_short_structures(self):
        # 2 and 3 graded steps force delta^3(e_H) = 0
        rng = np.random.default_rng(21)
        for steps in (2, 3):
            for seed in range(8):
                dims = [int(rng.integers(1, 3)) for _ in range(steps)]
                h = random_hodge_tate(dims, seed=seed, scale=1.2)
                fh = random_framing(h, rng)
                assert np.linalg.norm(_delta_power_vector(fh, 3)) < 1e-12
                assert abs(biextension_defect(fh)) < 1e-9

    def test_polylog_shallow_framing(self, polylog_ctx_factory):
        from hodgeheights.polylog import polylog_framed
        fh = polylog_framed(polylog_ctx_factory(0.3, 2), 0, 2)
        assert abs(biextension_defect(fh)) < 1e-9

    def test_four_step_defect_is_two_thirds_delta_cubed(self):
        # the sign is plus: ht1 = -2<d> + (4/3)<d^3>, so
        # ht2 + ht1/2 = (2/3) <e_dual, delta^3 e>
        rng = np.random.default_rng(33)
        found_nonzero = False
        for seed in range(12):
            h = random_hodge_tate([1, 1, 1, 1], seed=seed)
            fh = random_framing(h, rng, a_level=0, b_level=3)
            cubed = delta_pairing(fh, 3)
            defect = biextension_defect(fh)
            assert abs(defect - (2.0 / 3.0) * cubed.real) < 1e-9
            assert abs(abs(defect) - (2.0 / 3.0) * abs(cubed)) < 1e-9
            found_nonzero |= abs(cubed) > 1e-6
        assert found_nonzero

    def test_term_by_term_expansion_oracle(self):
        # brute-force check of Im<e_dual, e^{-2i delta} e> against the
        # pairing expansion on the 4-step configuration
        h = random_hodge_tate([1, 1, 1, 1], seed=6)
        fh = random_framing(h, np.random.default_rng(17), a_level=0, b_level=3)
        pairings = [delta_pairing(fh, r) for r in range(0, 8)]
        total = sum((-2j) ** k / math.factorial(k) * pairings[k]
                    for k in range(len(pairings)))
        assert abs(height1(fh) - total.imag) < 1e-10
        # odd-order pairings are real, so the imaginary part collapses to
        # -2<d> + (4/3)<d^3> - (4/15)<d^5> ...
        expanded = (-2 * pairings[1].real + (4.0 / 3.0) * pairings[3].real
                    - (4.0 / 15.0) * pairings[5].real)
        assert abs(height1(fh) - expanded) < 1e-10


def _delta_power_vector(fh, power):
    from hodgeheights.deligne import delta_splitting
    el = frame_elements(fh)
    delta = delta_splitting(fh.mhs).delta
    return np.linalg.matrix_power(delta, power) @ el.e_h


class TestFramedMorphisms:
    def test_identity_map(self):
        h = random_hodge_tate([1, 1, 1], seed=8)
        fh = random_framing(h, np.random.default_rng(5))
        report = framed_morphism_check(np.eye(3), fh, fh)
        assert report.is_framed_morphism
        assert report.height_invariance_error < 1e-12

    def test_extra_rational_lowering_isomorphism(self):
        # a rational block-lowering exponential e^mu is an isomorphism of
        # rational structures (F, W) -> (e^mu F, W) fixing the graded
        # classes, so it is a framed morphism and heights agree
        _, _, twisted = random_hodge_tate_pair([1, 1, 1, 1], seed=13)
        rng = np.random.default_rng(3)
        fh_src = random_framing(twisted, rng)
        mu = np.zeros((4, 4))
        mu[np.tril_indices(4, -1)] = rng.integers(-4, 5, size=6) / 2.0
        g = nilpotent_exp(mu)
        target_h = MixedHodgeStructure(
            4, twisted.weight_filtration,
            {p: (g @ arr.T).T for p, arr in twisted.hodge_filtration.items()})
        fh_dst = FramedMHS(target_h, fh_src.a, fh_src.b,
                           tuple(g.real @ [float(x) for x in fh_src.phi_class]),
                           fh_src.psi_class)
        report = framed_morphism_check(g, fh_src, fh_dst)
        assert report.is_framed_morphism
        assert report.height_invariance_error < 1e-9

    def test_complex_lowering_is_not_a_rational_morphism(self):
        # a complex e^mu preserves W and F but not the Betti structure;
        # the checker must flag it (its "heights" genuinely differ)
        from hodgeheights.mhs import random_lowering
        _, _, twisted = random_hodge_tate_pair([1, 1, 1], seed=13)
        fh_src = random_framing(twisted, np.random.default_rng(4))
        mu = random_lowering([1, 1, 1], seed=99, scale=0.5)
        g = nilpotent_exp(mu)
        target_h = MixedHodgeStructure(
            3, twisted.weight_filtration,
            {p: (g @ arr.T).T for p, arr in twisted.hodge_filtration.items()})
        fh_dst = FramedMHS(target_h, fh_src.a, fh_src.b,
                           fh_src.phi_class, fh_src.psi_class)
        report = framed_morphism_check(g, fh_src, fh_dst)
        assert report.weight_preserved and report.hodge_preserved
        assert not report.rational_structure_preserved
        assert not report.is_framed_morphism

    def test_scaled_framing_correspondence(self):
        h = random_hodge_tate([1, 1, 1], seed=25)
        rng = np.random.default_rng(8)
        fh = random_framing(h, rng)
        m1, m2 = 3, 2
        scaled = FramedMHS(h, fh.a, fh.b,
                           tuple(m1 * x for x in fh.phi_class),
                           tuple(Fraction(x, m2) for x in fh.psi_class))
        report = framed_morphism_check(np.eye(3), fh, scaled, m1=m1, m2=m2)
        assert report.is_framed_morphism
        assert report.height_invariance_error < 1e-9

    def test_heights_invariant_under_rational_base_change(self):
        # a unimodular integer change of coordinates is an isomorphism of
        # framed structures; nothing downstream may depend on the weight
        # bases being standard flags
        h = random_hodge_tate([1, 1, 1, 1], seed=40)
        fh = random_framing(h, np.random.default_rng(6))
        g = np.array([[1, 0, 0, 0],
                      [2, 1, 0, 0],
                      [-1, 3, 1, 0],
                      [0, -2, 5, 1]], dtype=float)
        g_inv = np.linalg.inv(g)
        weight = {k: [[Fraction(x).limit_denominator(10**9)
                       for x in (g @ [float(v) for v in row])]
                      for row in rows]
                  for k, rows in h.weight_filtration.items()}
        hodge = {p: (g @ arr.T).T for p, arr in h.hodge_filtration.items()}
        moved = MixedHodgeStructure(4, weight, hodge)
        fh_moved = FramedMHS(
            moved, fh.a, fh.b,
            tuple(Fraction(x).limit_denominator(10**9)
                  for x in g @ [float(v) for v in fh.phi_class]),
            tuple(Fraction(x).limit_denominator(10**9)
                  for x in g_inv.T @ [float(v) for v in fh.psi_class]))
        report = framed_morphism_check(g, fh, fh_moved)
        assert report.is_framed_morphism
        assert abs(height1(fh_moved) - height1(fh)) < 1e-9
        assert abs(height2(fh_moved) - height2(fh)) < 1e-9

    def test_non_morphism_detected(self):
        h = random_hodge_tate([1, 1], seed=30)
        fh = random_framing(h, np.random.default_rng(2))
        raiser = np.array([[0, 1], [0, 0]], dtype=complex)  # raises weight
        report = framed_morphism_check(raiser, fh, fh)
        assert not report.weight_preserved
        assert not report.is_framed_morphism
