import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attnmgmt.errors import BoundaryPrior, InvalidModel, NonPositiveKappa
from attnmgmt.policy import full_disclosure, no_information, validate_policy
from attnmgmt.quadratic import (
    Convexity,
    GeneralParams,
    QuadraticModel,
    agent_value,
    attention_cost,
    choice_distance,
    curvature,
    expected_principal_payoff,
    optimal_action,
    payoff_decomposition,
    principal_value,
    psychological_distance,
    segment_convexity,
    to_general,
)
from attnmgmt.simplex import THREE_STATES, belief_from_az

from conftest import SKEWED, UNIFORM

D_MINUS, D_ZERO, D_PLUS = np.eye(3)
HALF = belief_from_az((0.5, 0.5))  # (0, 1/2, 1/2)


def model(kappa=1.0, prior=UNIFORM):
    return QuadraticModel(THREE_STATES, prior, kappa)


class TestModelValidation:
    def test_boundary_prior(self):
        with pytest.raises(BoundaryPrior):
            model(prior=[0.0, 0.5, 0.5])

    @pytest.mark.parametrize("kappa", [0.0, -1.0, float("nan")])
    def test_kappa(self, kappa):
        with pytest.raises(NonPositiveKappa):
            model(kappa)

    def test_psd_check(self):
        bad = GeneralParams(np.ones((1, 1)), -np.eye(3), np.zeros(3), np.zeros(3))
        with pytest.raises(InvalidModel):
            QuadraticModel(THREE_STATES, UNIFORM, 1.0, bad)

    def test_slightly_indefinite_is_clamped(self):
        Pi = np.eye(3)
        Pi[0, 0] = -1e-12
        params = GeneralParams(np.ones((1, 1)), Pi, np.zeros(3), np.zeros(3))
        with pytest.warns(RuntimeWarning):
            m = QuadraticModel(THREE_STATES, UNIFORM, 1.0, params)
        assert np.linalg.eigvalsh(m.general.Pi).min() >= 0.0


class TestPrimitives:
    def test_optimal_action(self):
        m = model()
        assert optimal_action(D_PLUS, m) == 1.0
        assert optimal_action(UNIFORM, m) == pytest.approx(0.0, abs=1e-15)
        assert optimal_action(SKEWED, m) == pytest.approx(0.1, abs=1e-15)

    def test_principal_value(self):
        m = model()
        for d in np.eye(3):
            assert principal_value(d, m) == 0.0
        assert principal_value(UNIFORM, m) == pytest.approx(-2 / 3, abs=1e-15)
        assert principal_value(HALF, m) == pytest.approx(-1 / 4, abs=1e-15)

    def test_attention_cost(self):
        assert attention_cost(UNIFORM, model()) == 0.0
        assert attention_cost(D_ZERO, model(1.0)) == pytest.approx(2 / 3, abs=1e-15)
        nu = np.array([0.1, 0.3, 0.6])
        assert attention_cost(nu, model(2.0)) == pytest.approx(2 * attention_cost(nu, model(1.0)), abs=1e-15)

    def test_agent_value(self):
        assert agent_value(UNIFORM, model()) == pytest.approx(principal_value(UNIFORM, model()))
        assert agent_value(D_PLUS, model(1.0)) == pytest.approx(-2 / 3, abs=1e-15)
        assert agent_value(D_ZERO, model(0.5)) == pytest.approx(-1 / 3, abs=1e-15)

    def test_choice_distance(self):
        m = model()
        assert choice_distance(HALF, HALF, m) == 0.0
        assert choice_distance(D_MINUS, D_PLUS, m) == 2.0
        assert choice_distance(D_ZERO, HALF, m) == pytest.approx(0.5, abs=1e-15)

    def test_psychological_distance(self):
        assert psychological_distance(HALF, HALF, model()) == 0.0
        assert psychological_distance(D_MINUS, D_ZERO, model(1.0)) == pytest.approx(math.sqrt(2), abs=1e-15)
        assert psychological_distance(D_MINUS, D_PLUS, model(0.5)) == pytest.approx(1.0, abs=1e-15)

    def test_batched_inputs(self, rng):
        nus = rng.dirichlet(np.ones(3), size=(4, 5))
        m = model(0.7)
        assert principal_value(nus, m).shape == (4, 5)
        np.testing.assert_allclose(agent_value(nus, m)[2, 3], agent_value(nus[2, 3], m))


class TestConvexity:
    def test_examples(self):
        assert segment_convexity(D_MINUS, D_PLUS, model(1.0)) is Convexity.CONVEX  # boundary: 2 = 2
        assert segment_convexity(D_MINUS, D_ZERO, model(1.0)) is Convexity.STRICTLY_CONCAVE
        assert segment_convexity(D_MINUS, D_ZERO, model(0.5)) is Convexity.CONVEX  # 1 = 1

    def test_curvature_finite_difference(self, rng):
        m = model(0.8)
        h = 1e-4
        for _ in range(20):
            nu, nup = rng.dirichlet(np.ones(3), size=2)
            f = lambda t: agent_value(nu + t * (nup - nu), m)
            for t0 in (0.2, 0.5, 0.8):
                fd = (f(t0 + h) - 2 * f(t0) + f(t0 - h)) / h**2
                assert fd == pytest.approx(curvature(nu, nup, m), abs=1e-7)


class TestPolicyPayoffs:
    def test_examples(self):
        m = model()
        assert expected_principal_payoff(full_disclosure(m), m) == 0.0
        assert expected_principal_payoff(no_information(m), m) == pytest.approx(-2 / 3, abs=1e-15)
        p = validate_policy([D_MINUS, HALF], [1 / 3, 2 / 3], m)
        assert expected_principal_payoff(p, m) == pytest.approx(-1 / 6, abs=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_total_variance_decomposition(self, seed):
        from conftest import random_policy_parts

        S, w, mu = random_policy_parts(np.random.default_rng(seed))
        m = model(1.0, mu)
        direct, decomposed = payoff_decomposition(S, w, m)
        assert direct == pytest.approx(decomposed, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3).filter(lambda x: sum(x) > 1e-3))
    def test_principal_value_nonpositive(self, raw):
        nu = np.array(raw) / sum(raw)
        v = principal_value(nu, model())
        assert v <= 1e-15
        if nu.max() < 1.0 - 1e-9:
            assert v < 0.0


class TestGeneralReduction:
    def test_main_model_equals_general_form(self, rng):
        for _ in range(50):
            mu = rng.dirichlet(np.ones(3)) * 0.9 + 0.1 / 3
            m = model(rng.uniform(0.1, 3.0), mu)
            g = to_general(m)
            nu, nup = rng.dirichlet(np.ones(3), size=2)
            for fn in (principal_value, attention_cost, agent_value):
                assert fn(nu, g) == pytest.approx(fn(nu, m), abs=1e-12)
            assert choice_distance(nu, nup, g) == pytest.approx(choice_distance(nu, nup, m), abs=1e-12)
            assert psychological_distance(nu, nup, g) == pytest.approx(psychological_distance(nu, nup, m), abs=1e-12)

    def test_vector_states(self):
        states = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        params = GeneralParams(np.diag([1.0, 2.0]), 0.5 * np.eye(3), np.array([0.1, 0.0, -0.1]), np.array([0.0, 0.2, 0.0]))
        m = QuadraticModel(states, UNIFORM, 1.0, params)
        nu = np.array([0.2, 0.5, 0.3])
        np.testing.assert_allclose(optimal_action(nu, m), [0.5, 0.3])
        # E[gamma] - E[(a - theta)' Gamma (a - theta)] by hand
        a = np.array([0.5, 0.3])
        loss = sum(nu[k] * (a - states[k]) @ params.Gamma @ (a - states[k]) for k in range(3))
        assert principal_value(nu, m) == pytest.approx(nu @ params.gamma - loss, abs=1e-14)
        d = nu - UNIFORM
        assert attention_cost(nu, m) == pytest.approx(nu @ params.pi_vec + 0.5 * d @ d, abs=1e-14)
        # curvature identity holds in the general model too
        nup = np.array([0.6, 0.1, 0.3])
        f = lambda t: agent_value(nu + t * (nup - nu), m)
        h = 1e-4
        fd = (f(0.5 + h) - 2 * f(0.5) + f(0.5 - h)) / h**2
        assert fd == pytest.approx(curvature(nu, nup, m), abs=1e-7)
