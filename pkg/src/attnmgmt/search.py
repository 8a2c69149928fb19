"""Numerical verification of the closed-form three-state solution.

For ``1/2 < kappa < 2`` every candidate optimum can be written as a
critical-slope tuple ``t(a1, a2)``: a belief ``t1`` on edge L, a belief
``t2`` reached from ``t1`` with slope ``s = s*(kappa)``, and a belief ``t3``
on edge R reached from ``t2`` with slope ``-s``. The search scores every
Bayes-plausible tuple on an ``(a1, a2)`` grid, plus every binary policy on
L and R whose slope lies in the IC range, and compares the best score with
:func:`attnmgmt.optimal3.solve`.

Candidates are built from their own parametrization (the weight formulas
for ``t(a1, a2)``, and line intersections plus a barycentric solve for the
binary slopes); scores come from :func:`principal_value`, not from the
closed-form payoff expressions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import KappaOutOfRange, OutOfRange
from .ic import adjacent_pairs_ic, order_ic, slope_cutoff
from .optimal3 import OptimalOutcome, Regime, mirror, prior_coordinates, separating_a1, solve
from .policy import InformationPolicy, full_disclosure, no_information, validate_policy
from .quadratic import QuadraticModel, expected_principal_payoff, principal_value
from .simplex import THREE_STATES, as_belief, barycentric, belief_from_az

EDGE_SLACK = 1e-12
WEIGHT_FLOOR = 1e-12
COLLAPSE_TOL = 1e-12
PLAUSIBILITY_TOL = 1e-9


def _az_to_belief(a, z):
    """Vectorized (a, z) -> belief, no validation."""
    return np.stack([(1 - z - a) / 2, z, (1 - z + a) / 2], axis=-1)


def _in_b(a, z):
    return (z >= -EDGE_SLACK) & (z <= 1 + EDGE_SLACK) & (np.abs(a) <= 1 - z + EDGE_SLACK)


@dataclass(frozen=True)
class FamilyArrays:
    a: np.ndarray  # (N, 3) actions of t1, t2, t3
    z: np.ndarray  # (N, 3)
    weights: np.ndarray  # (N, 3)
    feasible: np.ndarray  # (N,)
    plausibility_failures: int  # feasible-looking tuples whose weights miss the prior


def family_arrays(a1, a2, s: float, a_mu: float, mu0: float) -> FamilyArrays:
    """Critical-slope tuples ``t(a1, a2)`` and their Bayes-plausible weights."""
    a1 = np.asarray(a1, dtype=float).reshape(-1)
    a2 = np.asarray(a2, dtype=float).reshape(-1)
    k = 2 * s / (1 - s)
    z1 = 1 + a1
    z2 = 1 + (1 - s) * a1 + s * a2
    a3 = -a1 - k * a2
    z3 = 1 + a1 + k * a2
    A = np.stack([a1, a2, a3], axis=1)
    Z = np.stack([z1, z2, z3], axis=1)
    feasible = _in_b(A, Z).all(axis=1)
    feasible &= (a1 <= 0 + EDGE_SLACK) & (a1 <= a2 + EDGE_SLACK) & (a2 <= a3 + EDGE_SLACK)

    W = np.zeros_like(A)
    c12 = np.abs(a2 - a1) <= COLLAPSE_TOL
    c23 = np.abs(a3 - a2) <= COLLAPSE_TOL
    generic = ~(c12 | c23)
    with np.errstate(divide="ignore", invalid="ignore"):
        den = a1 * (1 - s) + a2 * (1 + s)
        p2 = (a1 * (a1 + 1 - mu0) * (1 - s) + a2 * (2 * a1 + 1 - mu0 - a_mu) * s) / (-s * (a2 - a1) * den)
        p3 = (1 - s) * (s * a_mu + (1 - s) * a1 + (1 - mu0)) / (-2 * s * den)
        W[:, 1] = np.where(generic, p2, 0.0)
        W[:, 2] = np.where(generic, p3, 0.0)
        W[:, 0] = np.where(generic, 1 - p2 - p3, 0.0)
        # collapsed tuples are binary: t1 with t3 (t1 = t2) or t1 with t2 (t2 = t3)
        for mask, other in ((c12 & ~c23, 2), (c23 & ~c12, 1)):
            w1 = (A[:, other] - a_mu) / (A[:, other] - a1)
            W[:, 0] = np.where(mask, w1, W[:, 0])
            W[:, other] = np.where(mask, 1 - w1, W[:, other])
    feasible &= ~(c12 & c23)
    feasible &= np.all(np.isfinite(W), axis=1) & np.all(W >= -WEIGHT_FLOOR, axis=1)
    W = np.where(feasible[:, None], np.clip(W, 0.0, None), 0.0)
    mean_a = np.sum(W * A, axis=1)
    mean_z = np.sum(W * Z, axis=1)
    miss = feasible & ((np.abs(mean_a - a_mu) > PLAUSIBILITY_TOL) | (np.abs(mean_z - mu0) > PLAUSIBILITY_TOL))
    failures = int(np.sum(miss & generic))
    feasible &= ~miss
    return FamilyArrays(A, Z, W, feasible, failures)


def _require_kappa(kappa: float) -> float:
    if not 0.5 < kappa < 2.0:
        raise KappaOutOfRange(f"the critical-slope family needs 1/2 < kappa < 2, got {kappa}")
    return slope_cutoff(kappa)


def _require_oriented(prior) -> np.ndarray:
    mu = as_belief(prior, size=3)
    if prior_coordinates(mu)[0] < 0:
        raise OutOfRange("candidate family is parametrized for a_mu >= 0; mirror the prior first")
    return mu


def _policy_from_points(beliefs, weights, model) -> InformationPolicy:
    keep = weights > WEIGHT_FLOOR
    pts, w = beliefs[keep], weights[keep]
    merged_pts, merged_w = [], []
    for b, x in zip(pts, w):
        for i, q in enumerate(merged_pts):
            if np.max(np.abs(q - b)) <= 1e-10:
                merged_w[i] += x
                break
        else:
            merged_pts.append(b)
            merged_w.append(x)
    return validate_policy(merged_pts, merged_w, model)


def candidate_policy(a1: float, a2: float, kappa: float, prior) -> Optional[InformationPolicy]:
    """Policy of the critical-slope tuple ``t(a1, a2)``, or None when infeasible."""
    s = _require_kappa(kappa)
    mu = _require_oriented(prior)
    a_mu, mu0 = prior_coordinates(mu)
    fam = family_arrays([a1], [a2], s, a_mu, mu0)
    if not fam.feasible[0]:
        return None
    beliefs = _az_to_belief(fam.a[0], fam.z[0])
    return _policy_from_points(np.clip(beliefs, 0.0, None), fam.weights[0], QuadraticModel(THREE_STATES, mu, kappa))


def binary_candidates(slopes, prior) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Binary L/R policies through the prior with the given slopes.

    Each support point is the intersection of the line through ``(a_mu, mu0)``
    with edge L (``z = 1 + a``) or edge R (``z = 1 - a``), found by a 2x2
    solve; weights come from a barycentric solve. Returns beliefs
    ``(N, 2, 3)``, weights ``(N, 2)`` and a feasibility mask.
    """
    a_mu, mu0 = prior_coordinates(prior)
    mu = np.asarray(prior, dtype=float)
    slopes = np.asarray(slopes, dtype=float).reshape(-1)
    beliefs = np.zeros((len(slopes), 2, 3))
    weights = np.zeros((len(slopes), 2))
    feasible = np.zeros(len(slopes), dtype=bool)
    for n, st in enumerate(slopes):
        pts = []
        for edge_sign in (1.0, -1.0):  # L: z - a = 1, R: z + a = 1
            M = np.array([[-edge_sign, 1.0], [-st, 1.0]])
            rhs = np.array([1.0, mu0 - st * a_mu])
            if abs(np.linalg.det(M)) < 1e-14:
                break
            a, z = np.linalg.solve(M, rhs)
            if not _in_b(a, z):
                break
            pts.append(_az_to_belief(a, min(max(z, 0.0), 1.0)))
        if len(pts) < 2 or np.max(np.abs(pts[0] - pts[1])) <= 1e-10:
            continue
        lam = barycentric(mu, pts)
        if lam is None or np.any(lam <= WEIGHT_FLOOR):
            continue
        beliefs[n] = np.clip(pts, 0.0, None)
        weights[n] = lam
        feasible[n] = True
    return beliefs, weights, feasible


def _score(beliefs, weights, model) -> np.ndarray:
    return np.sum(weights * principal_value(beliefs, model), axis=-1)


def _affine_residual(a1_col, a2_col, payoff) -> float:
    worst = 0.0
    for v in np.unique(a1_col):
        row = a1_col == v
        if np.count_nonzero(row) < 3:
            continue
        x, y = a2_col[row], payoff[row]
        X = np.column_stack([np.ones_like(x), x])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        worst = max(worst, float(np.max(np.abs(X @ coef - y))))
    return worst


@dataclass
class Prop2Report:
    prior: np.ndarray
    kappa: float
    closed_form: OptimalOutcome
    grid_max: float
    argmax: tuple  # ("family", a1, a2) or ("binary", slope) or ("policy", name)
    n_candidates: int
    n_feasible: int
    ic_failures: int
    plausibility_failures: int
    closed_form_params: list
    argmax_near_closed_form: bool
    negative_slope_best: Optional[bool]
    affine_residual: Optional[float]
    tol: float
    messages: list = field(default_factory=list)

    @property
    def gap(self) -> float:
        """Grid max minus the closed-form payoff (should be <= tol)."""
        return self.grid_max - self.closed_form.payoff

    @property
    def ok(self) -> bool:
        return not self.messages


def closed_form_parameters(outcome: OptimalOutcome) -> list:
    """Where the closed-form optimum sits in the search coordinates (a_mu >= 0 orientation)."""
    mu = outcome.prior if prior_coordinates(outcome.prior)[0] >= 0 else mirror(outcome.prior)
    a_mu, mu0 = prior_coordinates(mu)
    s = outcome.s_star
    if outcome.regime is Regime.DOWNPLAYING:
        return [("family", -1.0, 0.0)]
    if outcome.regime is Regime.SEPARATING_EXAGGERATION:
        a1 = separating_a1(mu0, a_mu)
        return [("family", a1, -(1 - s) / (2 * s) * (1 + a1)), ("binary", -mu0 / (1 - a_mu))]
    if outcome.regime is Regime.EXAGGERATION:
        a1 = -(1 - mu0 - s * a_mu) / (1 + s)
        return [("family", a1, a1), ("binary", -s)]
    return []


def _grid(lo: float, hi: float, n: int, extra=()) -> np.ndarray:
    # lo + (hi - lo) * i / n keeps coarse grids nested in refined ones
    pts = lo + (hi - lo) * (np.arange(n + 1) / n)
    return np.unique(np.concatenate([pts, np.asarray(extra, dtype=float)]))


def verify_prop2(prior, kappa: float, grid_density: int = 200, tol: float = 1e-6) -> Prop2Report:
    """Grid search over IC candidates against the closed-form optimum."""
    mu_in = as_belief(prior, size=3)
    outcome = solve(mu_in, kappa)
    flip = prior_coordinates(mu_in)[0] < 0
    mu = mirror(mu_in) if flip else mu_in
    model = QuadraticModel(THREE_STATES, mu, kappa)
    a_mu, mu0 = prior_coordinates(mu)
    params = closed_form_parameters(outcome)
    messages = []

    if not 0.5 < kappa < 2.0:
        # outside the critical-slope range only full, none and the orthogonal policy compete
        named = {"no_information": no_information(model)}
        if kappa <= 2.0:
            named["orthogonal"] = validate_policy(
                [belief_from_az((mu0 - 1, mu0)), belief_from_az((1 - mu0, mu0))],
                [(1 - mu0 - a_mu) / (2 * (1 - mu0)), (1 - mu0 + a_mu) / (2 * (1 - mu0))],
                model,
            )
        named["full_disclosure"] = full_disclosure(model)
        scores, ic_failures = {}, 0
        for name, pol in named.items():
            if order_ic(pol, model).ic:
                scores[name] = expected_principal_payoff(pol, model)
            else:
                ic_failures += 1
        best = max(scores, key=scores.get)
        report = Prop2Report(
            mu_in, kappa, outcome, scores[best], ("policy", best), len(named), len(scores),
            0, 0, params, True, None, None, tol,
        )
        if report.gap > tol:
            messages.append(f"candidate {best} beats the closed form by {report.gap:.3g}")
        report.messages = messages
        return report

    s = slope_cutoff(kappa)
    fam_params = [p for p in params if p[0] == "family"]
    bin_params = [p for p in params if p[0] == "binary"]
    a1_grid = _grid(-1.0, 0.0, grid_density, [p[1] for p in fam_params])
    a2_grid = _grid(-1.0, 1.0, grid_density, [p[2] for p in fam_params])
    A1, A2 = np.meshgrid(a1_grid, a2_grid, indexing="ij")
    A1, A2 = A1.ravel(), A2.ravel()
    fam = family_arrays(A1, A2, s, a_mu, mu0)
    f_beliefs = np.clip(_az_to_belief(fam.a, fam.z), 0.0, None)
    f_ok = fam.feasible
    f_ic = adjacent_pairs_ic(f_beliefs[f_ok], fam.weights[f_ok] > WEIGHT_FLOOR, model)
    f_scores = np.full(len(A1), -np.inf)
    f_scores[np.flatnonzero(f_ok)[f_ic]] = _score(f_beliefs[f_ok][f_ic], fam.weights[f_ok][f_ic], model)

    bound_neg = min(s, mu0 / (1 - a_mu))
    bound_pos = min(s, mu0 / (1 + a_mu))
    slope_grid = _grid(-bound_neg, bound_pos, grid_density, [p[1] for p in bin_params])
    b_beliefs, b_weights, b_ok = binary_candidates(slope_grid, mu)
    b_ic = adjacent_pairs_ic(b_beliefs[b_ok], b_weights[b_ok] > WEIGHT_FLOOR, model)
    b_scores = np.full(len(slope_grid), -np.inf)
    b_scores[np.flatnonzero(b_ok)[b_ic]] = _score(b_beliefs[b_ok][b_ic], b_weights[b_ok][b_ic], model)

    ic_failures = int(np.count_nonzero(~f_ic) + np.count_nonzero(~b_ic))
    grid_max = float(max(f_scores.max(), b_scores.max()))
    if f_scores.max() >= b_scores.max():
        i = int(np.argmax(f_scores))
        argmax = ("family", float(A1[i]), float(A2[i]))
    else:
        i = int(np.argmax(b_scores))
        argmax = ("binary", float(slope_grid[i]))

    h1, h2, hs = 1.0 / grid_density, 2.0 / grid_density, (bound_neg + bound_pos) / grid_density
    near = False
    top_f = np.flatnonzero(f_scores >= grid_max - tol)
    top_b = np.flatnonzero(b_scores >= grid_max - tol)
    for p in fam_params:
        near |= bool(np.any((np.abs(A1[top_f] - p[1]) <= h1 + 1e-12) & (np.abs(A2[top_f] - p[2]) <= h2 + 1e-12)))
    for p in bin_params:
        near |= bool(np.any(np.abs(slope_grid[top_b] - p[1]) <= hs + 1e-12))

    neg, pos = b_scores[slope_grid < 0], b_scores[slope_grid > 0]
    negative_best = None
    if neg.size and pos.size and np.isfinite(pos.max()):
        negative_best = bool(neg.max() >= pos.max() - tol)

    residual = _affine_residual(A1[f_ok][f_ic], A2[f_ok][f_ic], f_scores[f_ok][f_ic])

    report = Prop2Report(
        mu_in, kappa, outcome, grid_max, argmax, len(A1) + len(slope_grid),
        int(np.count_nonzero(f_ok) + np.count_nonzero(b_ok)), ic_failures, fam.plausibility_failures,
        params, near or not params, negative_best, residual, tol,
    )
    if report.gap > tol:
        messages.append(f"grid candidate {argmax} beats the closed form by {report.gap:.3g}")
    if abs(report.gap) > tol:
        messages.append(f"closed-form payoff {outcome.payoff:.12g} differs from grid max {grid_max:.12g}")
    if ic_failures:
        messages.append(f"{ic_failures} feasible candidates failed order-IC")
    if fam.plausibility_failures:
        messages.append(f"{fam.plausibility_failures} tuples had weights that miss the prior")
    if not report.argmax_near_closed_form:
        messages.append(f"no grid maximizer within one cell of the closed-form parameters {params}")
    if negative_best is False:
        messages.append("a positive-slope binary policy beats every negative-slope one")
    report.messages = messages
    return report
