"""Incentive compatibility of nonredundant policies.

A nonredundant policy is IC exactly when, for every pair of support beliefs,
the choice distance weakly exceeds the psychological distance. With scalar
actions it is enough to check pairs that are adjacent in action order; in
the three-state model that check reads ``|dz/da| <= s*(kappa)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NonPositiveKappa, RedundantPolicy
from .policy import InformationPolicy, sort_by_action
from .quadratic import QuadraticModel, choice_distance, optimal_action, psychological_distance, to_general
from .simplex import az_from_belief, is_three_state

IC_SLACK = 1e-12


@dataclass(frozen=True)
class Violation:
    i: int
    j: int
    choice: float
    psych: float
    reason: str = "concave segment"


@dataclass(frozen=True)
class PairMargin:
    i: int
    j: int
    choice: float
    psych: float

    @property
    def margin(self) -> float:
        return self.choice - self.psych


@dataclass(frozen=True)
class ICReport:
    ic: bool
    violations: list = field(default_factory=list)
    margins: list = field(default_factory=list)  # PairMargin per checked pair
    slope_form: Optional[list] = None  # (|dz/da|, s*) per adjacent pair, three-state only

    @property
    def min_margin(self) -> float:
        return min((pm.margin for pm in self.margins), default=math.inf)


def slope_cutoff(kappa: float) -> Optional[float]:
    """Largest IC slope ``|dz/da|`` in the three-state model, None above kappa=2."""
    if not kappa > 0.0:
        raise NonPositiveKappa(f"kappa must be positive, got {kappa!r}")
    if kappa > 2.0:
        return None
    return math.sqrt((2.0 - kappa) / (3.0 * kappa))


def _require_nonredundant(p: InformationPolicy) -> None:
    if not p.nonredundant:
        raise RedundantPolicy("IC characterization applies to nonredundant policies only")


def order_ic(p: InformationPolicy, m: QuadraticModel) -> ICReport:
    """Check adjacent pairs in action order (scalar actions)."""
    _require_nonredundant(p)
    q = sort_by_action(p, m)
    tied = set(q.ties)
    margins, violations = [], []
    for n in range(len(q) - 1):
        nu, nup = q.support[n], q.support[n + 1]
        c = float(choice_distance(nu, nup, m))
        d = float(psychological_distance(nu, nup, m))
        margins.append(PairMargin(n, n + 1, c, d))
        if (n, n + 1) in tied:
            violations.append(Violation(n, n + 1, c, d, "equal actions: pooling is strictly profitable"))
        elif c < d - IC_SLACK:
            violations.append(Violation(n, n + 1, c, d))
    slope_form = None
    if m.general is None and is_three_state(m.states):
        slope_form = []
        s_star = slope_cutoff(m.kappa)
        for n in range(len(q) - 1):
            a0, z0 = az_from_belief(q.support[n])
            a1, z1 = az_from_belief(q.support[n + 1])
            da = a1 - a0
            slope = math.inf if da == 0.0 else abs((z1 - z0) / da)
            slope_form.append((slope, s_star))
    return ICReport(not violations, violations, margins, slope_form)


def slope_ic(p: InformationPolicy, m: QuadraticModel) -> bool:
    """Three-state slope test, written independently of the distance form."""
    s_star = slope_cutoff(m.kappa)
    q = sort_by_action(p, m)
    if len(q) == 1:
        return True
    if s_star is None or q.ties:
        return False
    for n in range(len(q) - 1):
        a0, z0 = az_from_belief(q.support[n])
        a1, z1 = az_from_belief(q.support[n + 1])
        if abs(z1 - z0) > s_star * abs(a1 - a0) + 1e-12:
            return False
    return True


def pairwise_ic_general(p: InformationPolicy, m: QuadraticModel) -> ICReport:
    """Check every unordered support pair (general quadratic model).

    A main-model instance is first mapped to its general form. With J=1 the
    adjacent-pair verdict is computed too and must coincide.
    """
    _require_nonredundant(p)
    g = to_general(m)
    S = p.support
    margins, violations = [], []
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            c = float(choice_distance(S[i], S[j], g))
            d = float(psychological_distance(S[i], S[j], g))
            margins.append(PairMargin(i, j, c, d))
            if c < d - IC_SLACK:
                violations.append(Violation(i, j, c, d))
    report = ICReport(not violations, violations, margins)
    if g.states.ndim == 1 and len(p) > 1:
        adjacent = _adjacent_general(p, g)
        if adjacent != report.ic:
            raise AssertionError("adjacent-pair and all-pair IC verdicts disagree")
    return report


def _adjacent_general(p: InformationPolicy, g: QuadraticModel) -> bool:
    a = np.asarray(optimal_action(p.support, g))
    order = np.argsort(a, kind="stable")
    S = p.support[order]
    for n in range(len(S) - 1):
        if choice_distance(S[n], S[n + 1], g) < psychological_distance(S[n], S[n + 1], g) - IC_SLACK:
            return False
    return True


def adjacent_pairs_ic(support, active, m: QuadraticModel) -> np.ndarray:
    """Batch adjacent-pair IC test.

    ``support`` has shape ``(N, P, K)`` with each candidate's beliefs already
    sorted by action; ``active`` (``(N, P)`` bool) marks the beliefs that
    carry positive weight. Inactive beliefs are skipped, so adjacency is
    taken among active ones. Returns a boolean verdict per candidate.
    """
    support = np.asarray(support, dtype=float)
    active = np.asarray(active, dtype=bool)
    N, P, _ = support.shape
    ok = np.ones(N, dtype=bool)
    last = np.full(N, -1)
    rows = np.arange(N)
    for j in range(P):
        here = active[:, j]
        check = here & (last >= 0)
        if check.any():
            prev = support[rows[check], last[check]]
            cur = support[check, j]
            c = choice_distance(prev, cur, m)
            d = psychological_distance(prev, cur, m)
            ok[check] &= c >= d - IC_SLACK
        last = np.where(here, j, last)
    return ok
