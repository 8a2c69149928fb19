"""Quadratic payoffs and attention costs.

Main model: states are reals, the agent's material loss is ``(a - theta)^2``
and attention costs ``kappa * ||nu - mu||^2`` at posterior ``nu``.

General model: states are vectors in R^J, the payoff is
``gamma_theta - (a - theta)' Gamma (a - theta)`` and the cost is
``nu' pi + (nu - mu)' Pi (nu - mu)``. The main model is the special case
``J=1, Gamma=1, Pi=kappa*I, gamma=pi=0``; :func:`to_general` builds it.

All belief arguments may carry leading batch axes (shape ``(..., K)``).
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BoundaryPrior, InvalidModel, NonPositiveKappa
from .simplex import as_belief, state_space

PSD_FLOOR = -1e-10
CONVEXITY_SLACK = 1e-12
DECOMPOSITION_TOL = 1e-9


def _psd(name: str, M) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise InvalidModel(f"{name} must be square, got {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12):
        raise InvalidModel(f"{name} must be symmetric")
    M = (M + M.T) / 2.0
    w, Q = np.linalg.eigh(M)
    if w.min() < PSD_FLOOR:
        raise InvalidModel(f"{name} is not positive semidefinite (min eigenvalue {w.min():.3g})")
    if w.min() < 0.0:
        warnings.warn(f"{name} slightly indefinite ({w.min():.3g}); clamping to PSD", RuntimeWarning)
        M = (Q * np.clip(w, 0.0, None)) @ Q.T
    return M


@dataclass(frozen=True, eq=False)
class GeneralParams:
    Gamma: np.ndarray
    Pi: np.ndarray
    gamma: np.ndarray
    pi_vec: np.ndarray


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """States, full-support prior and cost parameters.

    ``kappa`` drives the main model and is ignored when ``general`` is set
    (it is kept for labelling).
    """

    states: np.ndarray
    prior: np.ndarray
    kappa: float = 1.0
    general: Optional[GeneralParams] = None

    def __post_init__(self):
        states = state_space(self.states)
        K = states.shape[0]
        prior = as_belief(self.prior, size=K)
        if np.any(prior <= 0.0):
            raise BoundaryPrior(f"prior must have full support, got {prior.tolist()}")
        kappa = float(self.kappa)
        if not kappa > 0.0:
            raise NonPositiveKappa(f"kappa must be positive, got {self.kappa!r}")
        general = self.general
        if general is None:
            if states.ndim != 1:
                raise InvalidModel("vector-valued states need general-model parameters")
        else:
            J = 1 if states.ndim == 1 else states.shape[1]
            Gamma = _psd("Gamma", general.Gamma)
            Pi = _psd("Pi", general.Pi)
            gamma = np.asarray(general.gamma, dtype=float).reshape(-1)
            pi_vec = np.asarray(general.pi_vec, dtype=float).reshape(-1)
            if Gamma.shape != (J, J) or Pi.shape != (K, K):
                raise InvalidModel(f"need Gamma {J}x{J} and Pi {K}x{K}, got {Gamma.shape}, {Pi.shape}")
            if gamma.shape != (K,) or pi_vec.shape != (K,):
                raise InvalidModel("gamma and pi_vec must have one entry per state")
            general = GeneralParams(Gamma, Pi, gamma, pi_vec)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "general", general)

    @property
    def n_states(self) -> int:
        return self.states.shape[0]

    @property
    def scalar_actions(self) -> bool:
        return self.states.ndim == 1

    def with_kappa(self, kappa: float) -> "QuadraticModel":
        return QuadraticModel(self.states, self.prior, kappa, self.general)


def to_general(m: QuadraticModel) -> QuadraticModel:
    """The main model written in general-model form (J=1)."""
    if m.general is not None:
        return m
    K = m.n_states
    params = GeneralParams(
        Gamma=np.ones((1, 1)),
        Pi=m.kappa * np.eye(K),
        gamma=np.zeros(K),
        pi_vec=np.zeros(K),
    )
    return QuadraticModel(m.states, m.prior, m.kappa, params)


def _state_matrix(m: QuadraticModel) -> np.ndarray:
    return m.states[:, None] if m.states.ndim == 1 else m.states


def optimal_action(nu, m: QuadraticModel):
    """The agent's best action, which is the posterior mean of the state."""
    nu = np.asarray(nu, dtype=float)
    return nu @ m.states


def principal_value(nu, m: QuadraticModel):
    """Expected material payoff when the agent best-responds to ``nu``.

    Main model: ``-Var_nu(theta)``. General model:
    ``E_nu[gamma(theta) - (a* - theta)' Gamma (a* - theta)]``.
    """
    nu = np.asarray(nu, dtype=float)
    if m.general is None:
        th = m.states
        mean = nu @ th
        return -(nu @ (th * th) - mean * mean)
    S = _state_matrix(m)
    a = nu @ S
    diff = a[..., None, :] - S
    loss = np.einsum("...kj,jl,...kl->...k", diff, m.general.Gamma, diff)
    return nu @ m.general.gamma - np.sum(nu * loss, axis=-1)


def attention_cost(nu, m: QuadraticModel):
    nu = np.asarray(nu, dtype=float)
    d = nu - m.prior
    if m.general is None:
        return m.kappa * np.sum(d * d, axis=-1)
    return nu @ m.general.pi_vec + np.einsum("...i,ij,...j->...", d, m.general.Pi, d)


def agent_value(nu, m: QuadraticModel):
    return principal_value(nu, m) - attention_cost(nu, m)


def choice_distance(nu, nup, m: QuadraticModel):
    da = optimal_action(np.asarray(nup, dtype=float), m) - optimal_action(np.asarray(nu, dtype=float), m)
    if m.general is None:
        return np.abs(da)
    da = np.asarray(da)
    if m.states.ndim == 1:
        da = da[..., None]
    return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", da, m.general.Gamma, da), 0.0))


def psychological_distance(nu, nup, m: QuadraticModel):
    d = np.asarray(nup, dtype=float) - np.asarray(nu, dtype=float)
    if m.general is None:
        return np.sqrt(m.kappa) * np.linalg.norm(d, axis=-1)
    return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", d, m.general.Pi, d), 0.0))


class Convexity(enum.Enum):
    CONVEX = "Convex"
    STRICTLY_CONCAVE = "StrictlyConcave"


def segment_convexity(nu, nup, m: QuadraticModel) -> Convexity:
    """Shape of the agent's value on the segment between two beliefs.

    Ties go to CONVEX: the characterization uses a weak inequality.
    """
    if np.array_equal(np.asarray(nu, dtype=float), np.asarray(nup, dtype=float)):
        raise ValueError("segment endpoints must differ")
    if choice_distance(nu, nup, m) >= psychological_distance(nu, nup, m) - CONVEXITY_SLACK:
        return Convexity.CONVEX
    return Convexity.STRICTLY_CONCAVE


def curvature(nu, nup, m: QuadraticModel):
    """Second derivative of ``t -> agent_value(nu + t (nup - nu))``."""
    return 2.0 * (choice_distance(nu, nup, m) ** 2 - psychological_distance(nu, nup, m) ** 2)


def payoff_decomposition(support, weights, m: QuadraticModel) -> tuple[float, float]:
    """``(sum_i w_i U_P(nu_i), Var_p[a*] - Var_mu[theta])`` for a main model.

    The two agree by the law of total variance; the second form uses the
    policy's own mean action rather than the prior's.
    """
    support = np.asarray(support, dtype=float)
    weights = np.asarray(weights, dtype=float)
    direct = float(weights @ principal_value(support, m))
    a = optimal_action(support, m)
    a_mean = weights @ a
    var_actions = weights @ (a - a_mean) ** 2
    th = m.states
    var_prior = m.prior @ th**2 - (m.prior @ th) ** 2
    return direct, float(var_actions - var_prior)


def expected_principal_payoff(p, m: QuadraticModel) -> float:
    """Principal's expected payoff under full attention to policy ``p``."""
    if m.general is not None:
        return float(p.weights @ principal_value(p.support, m))
    direct, decomposed = payoff_decomposition(p.support, p.weights, m)
    if abs(direct - decomposed) > DECOMPOSITION_TOL:
        raise AssertionError(f"total-variance identity broken: {direct!r} vs {decomposed!r}")
    return direct


def expected_agent_value(p, m: QuadraticModel) -> float:
    return float(p.weights @ agent_value(p.support, m))


def prior_variance(m: QuadraticModel) -> float:
    th = m.states
    return float(m.prior @ th**2 - (m.prior @ th) ** 2)
