import numpy as np
import pytest

from attnmgmt.errors import KappaOutOfRange, OutOfRange
from attnmgmt.ic import order_ic, slope_cutoff
from attnmgmt.optimal3 import Regime, binary_support, prior_coordinates, solve
from attnmgmt.quadratic import QuadraticModel, expected_principal_payoff
from attnmgmt.search import binary_candidates, candidate_policy, family_arrays, verify_prop2
from attnmgmt.simplex import THREE_STATES, az_from_belief, belief_from_az

from conftest import SKEWED, UNIFORM


class TestCandidatePolicy:
    def test_a1_minus_one_is_downplaying(self):
        kappa = 0.6
        s = slope_cutoff(kappa)
        p = candidate_policy(-1.0, 0.0, kappa, UNIFORM)
        expected = [[1, 0, 0], belief_from_az((0.0, s)), [0, 0, 1]]
        np.testing.assert_allclose(p.support, expected, atol=1e-12)
        np.testing.assert_allclose(p.weights, solve(UNIFORM, kappa).policy.weights, atol=1e-12)

    def test_binary_collapse_t2_t3(self):
        # t2 = t3 leaves {t1, t3} joined by slope +s
        kappa = 1.8
        s = slope_cutoff(kappa)
        a, mu0 = prior_coordinates(SKEWED)
        a1 = -(1 - mu0 + s * a) / (1 - s)
        a2 = -((1 - s) / (1 + s)) * a1
        p = candidate_policy(a1, a2, kappa, SKEWED)
        assert len(p) == 2
        L, R, pL, pR = binary_support(SKEWED, s)
        np.testing.assert_allclose(p.support, [belief_from_az(L), belief_from_az(R)], atol=1e-12)
        np.testing.assert_allclose(p.weights, [pL, pR], atol=1e-12)

    def test_binary_collapse_t1_t2(self):
        # t1 = t2 leaves {t1, t3} joined by slope -s
        kappa = 1.8
        s = slope_cutoff(kappa)
        a, mu0 = prior_coordinates(SKEWED)
        a1 = -(1 - mu0 - s * a) / (1 + s)
        p = candidate_policy(a1, a1, kappa, SKEWED)
        assert len(p) == 2
        L, R, pL, pR = binary_support(SKEWED, -s)
        np.testing.assert_allclose(p.support, [belief_from_az(L), belief_from_az(R)], atol=1e-12)
        np.testing.assert_allclose(p.weights, [pL, pR], atol=1e-12)

    def test_negative_weight_is_infeasible(self):
        # a2 far to the right pushes t3 past the prior line and p2 below zero
        fam = family_arrays([-0.2], [0.9], slope_cutoff(1.0), 0.0, 1 / 3)
        assert not fam.feasible[0]
        assert candidate_policy(-0.2, 0.9, 1.0, UNIFORM) is None

    def test_kappa_range(self):
        for kappa in (0.5, 2.0, 3.0):
            with pytest.raises(KappaOutOfRange):
                candidate_policy(-1.0, 0.0, kappa, UNIFORM)

    def test_orientation(self):
        with pytest.raises(OutOfRange):
            candidate_policy(-1.0, 0.0, 1.0, [0.3, 0.5, 0.2])

    def test_feasible_candidates_are_plausible_and_ic(self, rng):
        kappa = 1.1
        s = slope_cutoff(kappa)
        a, mu0 = prior_coordinates(SKEWED)
        m = QuadraticModel(THREE_STATES, SKEWED, kappa)
        a1 = rng.uniform(-1, 0, 4000)
        a2 = rng.uniform(-1, 1, 4000)
        fam = family_arrays(a1, a2, s, a, mu0)
        assert fam.plausibility_failures == 0
        idx = np.flatnonzero(fam.feasible)
        assert idx.size > 20
        for i in idx[:60]:
            p = candidate_policy(a1[i], a2[i], kappa, SKEWED)
            assert p is not None
            assert order_ic(p, m).ic
            np.testing.assert_allclose(p.mean, SKEWED, atol=1e-9)


class TestBinaryCandidates:
    def test_matches_closed_form(self):
        slopes = np.array([-0.5, -0.2, 0.0, 0.3])
        B, W, ok = binary_candidates(slopes, SKEWED)
        assert ok.all()
        for st, b, w in zip(slopes, B, W):
            L, R, pL, pR = binary_support(SKEWED, st)
            np.testing.assert_allclose(b, [belief_from_az(L), belief_from_az(R)], atol=1e-12)
            np.testing.assert_allclose(w, [pL, pR], atol=1e-12)

    def test_infeasible_slope(self):
        _, _, ok = binary_candidates([-0.9], SKEWED)
        assert not ok[0]


class TestVerify:
    @pytest.mark.parametrize(
        "kappa, regime",
        [(0.6, Regime.DOWNPLAYING), (1.0, Regime.SEPARATING_EXAGGERATION), (1.8, Regime.EXAGGERATION)],
    )
    def test_uniform_examples(self, kappa, regime):
        r = verify_prop2(UNIFORM, kappa, 200, 1e-4)
        assert r.closed_form.regime is regime
        assert r.ok, r.messages
        assert r.closed_form.payoff >= r.grid_max - 1e-4
        assert r.argmax_near_closed_form
        assert r.ic_failures == 0

    def test_exaggeration_slope_sign(self):
        r = verify_prop2(UNIFORM, 1.8, 100)
        assert r.closed_form.slope_used == pytest.approx(-slope_cutoff(1.8))
        assert r.negative_slope_best

    def test_affine_rows(self):
        for prior in (UNIFORM, SKEWED):
            for kappa in (0.7, 1.2, 1.7):
                r = verify_prop2(prior, kappa, 120)
                assert r.affine_residual <= 1e-8

    def test_refinement_monotone(self):
        values = [verify_prop2(SKEWED, 1.3, n).grid_max for n in (25, 50, 100, 200)]
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))

    def test_reflected_prior(self):
        r = verify_prop2([0.3, 0.5, 0.2], 1.3, 100)
        assert r.ok, r.messages
        assert r.closed_form.reflected

    @pytest.mark.parametrize("kappa", [0.3, 0.5, 2.0, 2.6])
    def test_outside_family_range(self, kappa):
        r = verify_prop2(SKEWED, kappa)
        assert r.ok, r.messages
        assert r.argmax[0] == "policy"
        assert r.grid_max == pytest.approx(r.closed_form.payoff, abs=1e-12)

    def test_detects_wrong_closed_form(self, monkeypatch):
        from dataclasses import replace

        import attnmgmt.search as search_mod

        real = search_mod.solve
        # understate the closed-form payoff; the grid must notice
        monkeypatch.setattr(search_mod, "solve", lambda prior, kappa: replace(real(prior, kappa), payoff=real(prior, kappa).payoff - 1e-3))
        r = search_mod.verify_prop2(UNIFORM, 1.8, 60)
        assert not r.ok
        assert r.gap > 1e-6
