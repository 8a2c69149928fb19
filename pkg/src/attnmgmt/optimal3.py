"""Closed-form optimal attention outcomes for states (-1, 0, 1).

Five regimes, by attention cost kappa against four prior-dependent cutoffs
``k1 = 1/2 < k2 < k3 < k4 = 2``:

=========================  ===================  =================================
kappa                      regime               policy
=========================  ===================  =================================
(0, k1]                    FullRevelation       Diracs at every state
(k1, k2]                   Downplaying          {d_-1, nu(0, s*), d_1}
[k2, k3]                   SeparatingExaggeration  binary, one belief is d_1
(k3, k4]                   Exaggeration         binary on the two upper edges
(k4, inf)                  NoDisclosure         the prior
=========================  ===================  =================================

Formulas assume ``a_mu >= 0``; priors with ``a_mu < 0`` are mirrored
(swap states -1 and 1), solved and mirrored back. Payoffs are the
principal's expected payoff ``E_p[U_P]``, on the same scale as
:func:`attnmgmt.quadratic.expected_principal_payoff`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import BoundaryPrior, InfeasibleSlope, NonPositiveKappa, OutOfRange, OutOfRegime, WeightOutOfRange
from .ic import slope_cutoff
from .policy import InformationPolicy, full_disclosure, no_information, validate_policy
from .quadratic import QuadraticModel, expected_principal_payoff
from .simplex import THREE_STATES, as_belief, belief_from_az

PAYOFF_TOL = 1e-10
DEGENERATE_RTOL = 1e-12


class Regime(str, enum.Enum):
    FULL_REVELATION = "FullRevelation"
    DOWNPLAYING = "Downplaying"
    SEPARATING_EXAGGERATION = "SeparatingExaggeration"
    EXAGGERATION = "Exaggeration"
    NO_DISCLOSURE = "NoDisclosure"


@dataclass(frozen=True)
class Thresholds:
    k1: float
    k2: float
    k3: float
    k4: float

    def as_tuple(self) -> tuple:
        return (self.k1, self.k2, self.k3, self.k4)


@dataclass(frozen=True, eq=False)
class OptimalOutcome:
    regime: Regime
    policy: InformationPolicy
    signal: dict
    payoff: float
    kappa: float
    prior: np.ndarray
    s_star: Optional[float] = None
    slope_used: Optional[float] = None
    degenerate: bool = False
    reflected: bool = False
    thresholds: Optional[Thresholds] = field(default=None, repr=False)


def _prior(prior) -> np.ndarray:
    mu = as_belief(prior, size=3)
    if np.any(mu <= 0.0):
        raise BoundaryPrior(f"prior must be interior (full support), got {mu.tolist()}")
    return mu


def _kappa(kappa) -> float:
    kappa = float(kappa)
    if not kappa > 0.0:
        raise NonPositiveKappa(f"kappa must be positive, got {kappa!r}")
    return kappa


def prior_coordinates(prior) -> tuple[float, float]:
    """``(a_mu, mu_0)``: the prior's mean state and mass on state 0."""
    mu = np.asarray(prior, dtype=float)
    return float(mu[2] - mu[0]), float(mu[1])


def prior_variance(prior) -> float:
    mu = np.asarray(prior, dtype=float)
    return float(mu @ THREE_STATES**2 - (mu @ THREE_STATES) ** 2)


def mirror(b) -> np.ndarray:
    """Swap the roles of states -1 and 1 (last axis)."""
    return np.asarray(b)[..., ::-1].copy()


def thresholds(prior) -> Thresholds:
    mu = _prior(prior)
    a, mu0 = prior_coordinates(mu)
    r = 1.0 - abs(a)
    k2 = 2.0 / (0.75 * ((r + mu0) / r) ** 2 + 1.0)
    k3 = 2.0 / (3.0 * (mu0 / r) ** 2 + 1.0)
    return Thresholds(0.5, k2, k3, 2.0)


def _model(mu: np.ndarray, kappa: float) -> QuadraticModel:
    return QuadraticModel(THREE_STATES, mu, kappa)


def binary_support(prior, s_tilde: float) -> tuple[tuple, tuple, float, float]:
    """Binary policy on edges L and R along the line of slope ``s_tilde`` through the prior.

    Returns ``((a1, z1), (a2, z2), p_L, p_R)`` from the closed forms.
    """
    a, mu0 = prior_coordinates(prior)
    s = float(s_tilde)
    left = (-(1 - mu0 + s * a) / (1 - s), (mu0 - s * (1 + a)) / (1 - s))
    right = ((1 - mu0 + s * a) / (1 + s), (mu0 + s * (1 - a)) / (1 + s))
    p_left = (1 - s) / 2 * (1 - mu0 - a) / (1 - mu0 + s * a)
    p_right = (1 + s) / 2 * (1 - mu0 + a) / (1 - mu0 + s * a)
    return left, right, p_left, p_right


def binary_payoff(prior, s_tilde: float) -> float:
    """Principal payoff of the L/R binary policy with slope ``s_tilde``."""
    mu = _prior(prior)
    a, mu0 = prior_coordinates(mu)
    s = float(s_tilde)
    lo, hi = -mu0 / (1 - a), mu0 / (1 + a)
    if not (lo - 1e-12 <= s <= hi + 1e-12) or s * s >= 1.0:
        raise InfeasibleSlope(f"slope {s} outside the feasible range [{lo:.6g}, {hi:.6g}]")
    return ((1 - mu0) ** 2 - a * a) / (1 - s * s) - prior_variance(mu)


def separating_a1(mu0: float, a: float) -> float:
    """Action of the L-belief of the separating binary policy (slope ``-mu0/(1-a)``).

    This is where the critical-slope ternary family puts zero weight on its
    middle belief and becomes binary.
    """
    return -(1 - mu0 - a) / (1 + mu0 - a)


def ternary_payoff(prior, kappa: float, a1: float) -> float:
    """Principal payoff of the critical-slope ternary policy containing d_1, indexed by its L-belief action ``a1``."""
    mu = _prior(prior)
    kappa = _kappa(kappa)
    if not 0.5 < kappa < 2.0:
        raise OutOfRange(f"kappa={kappa} outside (1/2, 2)")
    a, mu0 = prior_coordinates(mu)
    a = abs(a)
    s = slope_cutoff(kappa)
    a1_max = separating_a1(mu0, a)
    if not -1.0 - 1e-12 <= a1 <= a1_max + 1e-12:
        raise OutOfRange(f"a1={a1} outside [-1, {a1_max:.6g}]")
    bracket = a1 * (1 - a + mu0 - 2 * s * (1 - a)) + 1 - mu0 - a + 2 * s * a
    return -a * a + bracket / (2 * s) - prior_variance(mu)


def _check_signal(signal: dict) -> dict:
    for name, value in signal.items():
        if value is not None and not -1e-12 <= value <= 1 + 1e-12:
            raise WeightOutOfRange(f"signal probability {name}={value} outside [0, 1]")
    return {k: (None if v is None else float(min(max(v, 0.0), 1.0))) for k, v in signal.items()}


def _finish(outcome: OptimalOutcome) -> OptimalOutcome:
    direct = expected_principal_payoff(outcome.policy, _model(outcome.prior, outcome.kappa))
    if abs(direct - outcome.payoff) > PAYOFF_TOL:
        raise AssertionError(f"closed-form payoff {outcome.payoff!r} disagrees with direct evaluation {direct!r}")
    return outcome


def _mirror_outcome(out: OptimalOutcome, prior: np.ndarray) -> OptimalOutcome:
    # mirroring keeps a validated policy valid; validating again would renormalize
    # its rows and break exact symmetry by an ulp
    q = out.policy
    policy = InformationPolicy(mirror(q.support), q.weights.copy(), q.residual)
    sig = out.signal
    if "pi" in sig:
        signal = {"pi": None if sig["pi"] is None else 1.0 - sig["pi"]}
    else:
        signal = {"pi_minus1": sig["pi_plus1"], "pi_plus1": sig["pi_minus1"]}
    slope = None if out.slope_used is None else -out.slope_used if "pi" in sig else out.slope_used
    return replace(out, policy=policy, signal=signal, prior=prior, reflected=True, slope_used=slope)


def _is_k2(kappa: float, th: Thresholds) -> bool:
    return abs(kappa - th.k2) <= DEGENERATE_RTOL * th.k2


def _downplaying(mu: np.ndarray, kappa: float, th: Thresholds) -> OptimalOutcome:
    a, mu0 = prior_coordinates(mu)
    s = slope_cutoff(kappa)
    p_mid = mu0 / s
    p_minus, p_plus = (1 - p_mid - a) / 2, (1 - p_mid + a) / 2
    for w in (p_mid, p_minus, p_plus):
        if not 0.0 <= w <= 1.0:
            raise WeightOutOfRange(f"downplaying weight {w} outside [0, 1]; regime or threshold bug")
    signal = _check_signal(
        {"pi_minus1": (p_mid - mu0) / (2 * mu[0]), "pi_plus1": (p_mid - mu0) / (2 * mu[2])}
    )
    support = np.array([[1.0, 0.0, 0.0], belief_from_az((0.0, s)), [0.0, 0.0, 1.0]])
    policy = validate_policy(support, [p_minus, p_mid, p_plus], _model(mu, kappa))
    payoff = ternary_payoff(mu, kappa, -1.0)
    return OptimalOutcome(
        Regime.DOWNPLAYING, policy, signal, payoff, kappa, mu,
        s_star=s, slope_used=s, degenerate=_is_k2(kappa, th), thresholds=th,
    )


def _exaggeration(mu: np.ndarray, kappa: float, th: Thresholds) -> OptimalOutcome:
    a, mu0 = prior_coordinates(mu)
    s = slope_cutoff(kappa)
    edge = mu0 / (1 - a)
    separating = s >= edge
    s_tilde = -min(s, edge)
    left, right, p_left, p_right = binary_support(mu, s_tilde)
    if separating:
        right = (1.0, 0.0)  # the closed form lands on d_1 up to rounding
    if not (0.0 <= p_left <= 1.0 and 0.0 <= p_right <= 1.0):
        raise WeightOutOfRange(f"exaggeration weights ({p_left}, {p_right}) outside [0, 1]")
    # pi: probability that state 0 is reported as -1
    pi = 1.0 if separating else p_left * left[1] / mu0
    signal = _check_signal({"pi": pi})
    support = np.array([belief_from_az(left), belief_from_az(right)])
    policy = validate_policy(support, [p_left, p_right], _model(mu, kappa))
    regime = Regime.SEPARATING_EXAGGERATION if separating else Regime.EXAGGERATION
    return OptimalOutcome(
        regime, policy, signal, binary_payoff(mu, s_tilde), kappa, mu,
        s_star=s, slope_used=s_tilde, degenerate=_is_k2(kappa, th), thresholds=th,
    )


def _oriented(prior, kappa):
    mu = _prior(prior)
    kappa = _kappa(kappa)
    a, _ = prior_coordinates(mu)
    return mu, kappa, a < 0.0


def downplaying_policy(prior, kappa: float) -> OptimalOutcome:
    """Ternary policy that keeps the agent exactly indifferent on both steps."""
    mu, kappa, flip = _oriented(prior, kappa)
    th = thresholds(mu)
    if not th.k1 < kappa <= th.k2 * (1 + DEGENERATE_RTOL):
        raise OutOfRegime(f"downplaying is optimal on ({th.k1}, {th.k2:.6g}], got kappa={kappa}")
    if flip:
        return _finish(_mirror_outcome(_downplaying(mirror(mu), kappa, th), mu))
    return _finish(_downplaying(mu, kappa, th))


def exaggeration_policy(prior, kappa: float) -> OptimalOutcome:
    """Binary policy on edges L and R (separating on [k2, k3], binding on (k3, k4])."""
    mu, kappa, flip = _oriented(prior, kappa)
    th = thresholds(mu)
    if not th.k2 * (1 - DEGENERATE_RTOL) <= kappa <= th.k4:
        raise OutOfRegime(f"exaggeration is optimal on [{th.k2:.6g}, {th.k4}], got kappa={kappa}")
    if flip:
        return _finish(_mirror_outcome(_exaggeration(mirror(mu), kappa, th), mu))
    return _finish(_exaggeration(mu, kappa, th))


def solve(prior, kappa: float) -> OptimalOutcome:
    """Principal-optimal attention outcome for the three-state model."""
    mu, kappa, _ = _oriented(prior, kappa)
    th = thresholds(mu)
    model = _model(mu, kappa)
    s_star = slope_cutoff(kappa)
    if kappa <= th.k1:
        policy = full_disclosure(model)
        return _finish(OptimalOutcome(
            Regime.FULL_REVELATION, policy, {"pi_minus1": 0.0, "pi_plus1": 0.0}, 0.0, kappa, mu,
            s_star=s_star, thresholds=th,
        ))
    if kappa <= th.k2 or _is_k2(kappa, th):
        return downplaying_policy(mu, kappa)
    if kappa <= th.k4:
        return exaggeration_policy(mu, kappa)
    policy = no_information(model)
    return _finish(OptimalOutcome(
        Regime.NO_DISCLOSURE, policy, {"pi_minus1": 1.0, "pi_plus1": 1.0}, -prior_variance(mu), kappa, mu,
        s_star=s_star, thresholds=th,
    ))
