"""Finite-support information policies.

A policy is a list of distinct posterior beliefs with positive weights whose
weighted mean equals the prior. Nonredundant policies (affinely independent
support) are the ones that matter: their garblings are exactly the
Bayes-plausible distributions supported on the convex hull of the support.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguousDirection,
    DuplicateBelief,
    EpsilonTooLarge,
    NonPositiveWeight,
    NotBayesPlausible,
    NotInterior,
    RedundantPolicy,
)
from .quadratic import QuadraticModel, optimal_action
from .simplex import affinely_independent, as_belief, barycentric, is_interior

WEIGHT_SUM_TOL = 1e-12
PLAUSIBILITY_TOL = 1e-9
DISTINCT_TOL = 1e-10
ACTION_TIE_TOL = 1e-12
DIRECTION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class InformationPolicy:
    support: np.ndarray  # (N, K), one belief per row
    weights: np.ndarray  # (N,)
    residual: float = 0.0  # max-norm Bayes-plausibility residual at validation
    ties: tuple = field(default=())  # adjacent index pairs with equal actions, set by sort_by_action

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def mean(self) -> np.ndarray:
        return self.weights @ self.support

    @property
    def nonredundant(self) -> bool:
        return affinely_independent(self.support)


def validate_policy(support, weights, model: QuadraticModel) -> InformationPolicy:
    """Check a candidate policy against the model's prior."""
    rows = [as_belief(b, size=model.n_states) for b in support]
    if not rows:
        raise ValueError("policy support is empty")
    S = np.vstack(rows)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != S.shape[0]:
        raise ValueError(f"{S.shape[0]} beliefs but {w.shape[0]} weights")
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise NonPositiveWeight(f"weights must be positive, got {w.tolist()}")
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        # accept rounding from formulas, reject anything visibly off
        if abs(w.sum() - 1.0) > PLAUSIBILITY_TOL:
            raise NotBayesPlausible(f"weights sum to {w.sum()!r}")
        w = w / w.sum()
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            if np.max(np.abs(S[i] - S[j])) <= DISTINCT_TOL:
                raise DuplicateBelief(f"support beliefs {i} and {j} coincide")
    residual = float(np.max(np.abs(w @ S - model.prior)))
    if residual > PLAUSIBILITY_TOL:
        raise NotBayesPlausible(f"mean belief misses the prior by {residual:.3g}")
    return InformationPolicy(S, w, residual)


def no_information(model: QuadraticModel) -> InformationPolicy:
    return validate_policy([model.prior], [1.0], model)


def full_disclosure(model: QuadraticModel) -> InformationPolicy:
    return validate_policy(np.eye(model.n_states), model.prior, model)


def sort_by_action(p: InformationPolicy, model: QuadraticModel) -> InformationPolicy:
    """Reorder the support by induced action (stable).

    Adjacent pairs whose actions coincide are recorded in ``ties``.
    """
    a = np.asarray(optimal_action(p.support, model), dtype=float)
    if a.ndim != 1:
        raise ValueError("sorting by action needs scalar actions")
    order = np.argsort(a, kind="stable")
    a_sorted = a[order]
    ties = tuple(
        (n, n + 1) for n in range(len(order) - 1) if abs(a_sorted[n + 1] - a_sorted[n]) <= ACTION_TIE_TOL
    )
    return InformationPolicy(p.support[order], p.weights[order], p.residual, ties)


def direction(p: InformationPolicy, model: QuadraticModel) -> np.ndarray:
    """Unit steps between consecutive beliefs, ordered by action.

    Returns an ``(N-1, K)`` array.
    """
    if len(p) < 2:
        raise ValueError("direction needs at least two support points")
    if not p.nonredundant:
        raise RedundantPolicy("direction is defined for nonredundant policies")
    q = sort_by_action(p, model)
    if q.ties:
        raise AmbiguousDirection(f"equal induced actions at sorted positions {q.ties}")
    steps = np.diff(q.support, axis=0)
    return steps / np.linalg.norm(steps, axis=1, keepdims=True)


def is_garbling_feasible(q: InformationPolicy, p: InformationPolicy) -> bool:
    """Whether ``q`` is a garbling of the nonredundant policy ``p``."""
    if not p.nonredundant:
        raise RedundantPolicy("garbling test requires an affinely independent support for p")
    if np.max(np.abs(q.mean - p.mean)) > PLAUSIBILITY_TOL:
        return False
    return all(barycentric(nu, p.support) is not None for nu in q.support)


def spread_along_direction(p: InformationPolicy, index: int, eps: float, model: QuadraticModel) -> InformationPolicy:
    """Push an extreme support belief outward along its incident step.

    The belief at sorted position ``index`` (first or last by action) moves
    to ``nbr + (1 + eps) (nu - nbr)`` where ``nbr`` is its neighbour; the old
    belief's mass is split between the stretched belief and the neighbour.
    The result is a mean-preserving spread of ``p`` with the same direction.
    """
    if not p.nonredundant:
        raise RedundantPolicy("spread needs a nonredundant policy")
    if len(p) < 2:
        raise ValueError("spread needs at least two support points")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    q = sort_by_action(p, model)
    if q.ties:
        raise AmbiguousDirection(f"equal induced actions at sorted positions {q.ties}")
    n = len(q)
    index = index % n
    if index not in (0, n - 1):
        raise ValueError(f"index {index} is not an extreme support point (0 or {n - 1})")
    nbr = 1 if index == 0 else n - 2
    nu, nu_nbr = q.support[index], q.support[nbr]
    if not is_interior(nu):
        raise NotInterior(f"support belief {index} lies on the simplex boundary")
    stretched = nu_nbr + (1.0 + eps) * (nu - nu_nbr)
    if np.any(stretched < 0.0):
        raise EpsilonTooLarge(f"eps={eps} pushes the belief outside the simplex")
    support = q.support.copy()
    weights = q.weights.copy()
    support[index] = stretched
    moved = weights[index]
    weights[index] = moved / (1.0 + eps)
    weights[nbr] += moved * eps / (1.0 + eps)
    return validate_policy(support, weights, model)
