"""Brute-force garbling oracle.

For a nonredundant policy ``p`` every garbling is a Bayes-plausible
distribution on ``co(supp p)``. The oracle discretizes that hull by a
barycentric lattice of resolution ``grid`` (plus the conditional mean of
every support pair, so pairwise pooling is always available) and solves

    max  sum_g x_g U_A(nu_g)   s.t.  sum_g x_g lambda_g = w(p),  x >= 0

where ``lambda_g`` are the lattice barycentric coordinates and ``w(p)`` the
policy weights. Because the support is affinely independent this is the
same as requiring ``sum_g x_g nu_g = mu``, and ``sum_g x_g = 1`` follows.
Full attention (``x`` on the vertices) is always feasible, so the best value
never falls below the full-attention value.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import RedundantPolicy
from .lp import solve_lp
from .policy import InformationPolicy, validate_policy
from .quadratic import QuadraticModel, agent_value, expected_agent_value

DEFAULT_GRID = 60
SUPPORT_FLOOR = 1e-12


class Verdict(enum.Enum):
    IC = "IC"
    NOT_IC = "NotIC"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class OracleReport:
    best_value: float
    full_attention_value: float
    gap: float
    verdict: Verdict
    best_garbling: InformationPolicy
    grid_resolution: int
    tol: float
    refined_gap: Optional[float] = None  # gap at twice the resolution, when refinement ran


def default_tol(full_attention_value: float) -> float:
    return 1e-6 * (1.0 + abs(full_attention_value))


@lru_cache(maxsize=32)
def lattice(n: int, grid: int) -> np.ndarray:
    """All points of the simplex in R^n whose coordinates are multiples of 1/grid."""
    if n < 1 or grid < 1:
        raise ValueError("need n >= 1 and grid >= 1")
    rows = []
    for bars in itertools.combinations(range(grid + n - 1), n - 1):
        edges = (-1,) + bars + (grid + n - 1,)
        rows.append([edges[k + 1] - edges[k] - 1 for k in range(n)])
    pts = np.array(rows, dtype=float) / grid
    pts.setflags(write=False)
    return pts


def _pooling_points(w: np.ndarray) -> np.ndarray:
    n = len(w)
    pts = []
    for i, j in itertools.combinations(range(n), 2):
        lam = np.zeros(n)
        lam[i], lam[j] = w[i], w[j]
        pts.append(lam / lam.sum())
    return np.array(pts).reshape(-1, n)


def _columns(p: InformationPolicy, grid: int) -> np.ndarray:
    n = len(p)
    lam = np.vstack([lattice(n, grid), _pooling_points(p.weights)])
    # drop injected points that already sit on the lattice
    _, idx = np.unique(np.round(lam, 12), axis=0, return_index=True)
    return lam[np.sort(idx)]


def best_garbling_lp(p: InformationPolicy, m: QuadraticModel, grid: int = DEFAULT_GRID, tol: Optional[float] = None) -> OracleReport:
    """Agent's best garbling of ``p`` over the lattice, with a single-grid verdict."""
    if not p.nonredundant:
        raise RedundantPolicy("the hull characterization of garblings needs a nonredundant policy")
    if grid < 1:
        raise ValueError("grid must be a positive integer")
    full = expected_agent_value(p, m)
    if tol is None:
        tol = default_tol(full)
    lam = _columns(p, grid)
    beliefs = lam @ p.support
    values = agent_value(beliefs, m)
    res = solve_lp(values, lam.T, p.weights)
    keep = res.x > SUPPORT_FLOOR
    garbling = validate_policy(beliefs[keep], res.x[keep] / res.x[keep].sum(), m)
    best = res.value
    gap = best - full
    verdict = Verdict.NOT_IC if gap > tol else Verdict.IC
    return OracleReport(best, full, gap, verdict, garbling, grid, tol)


def check_with_oracle(p: InformationPolicy, m: QuadraticModel, grid: int = DEFAULT_GRID, tol: Optional[float] = None) -> OracleReport:
    """Oracle verdict with a grid-doubling refinement check.

    A gap above ``tol`` exhibits a strictly better garbling: NotIC. Otherwise
    the lattice is doubled (the coarse lattice nests in the fine one); if the
    gap moves by more than ``tol`` the coarse verdict depended on the
    discretization and the answer is Inconclusive, else IC.
    """
    coarse = best_garbling_lp(p, m, grid, tol)
    if coarse.verdict is Verdict.NOT_IC:
        return coarse
    fine = best_garbling_lp(p, m, 2 * grid, coarse.tol)
    verdict = Verdict.INCONCLUSIVE if abs(fine.gap - coarse.gap) > coarse.tol else Verdict.IC
    return OracleReport(
        coarse.best_value,
        coarse.full_attention_value,
        coarse.gap,
        verdict,
        fine.best_garbling if verdict is Verdict.INCONCLUSIVE else coarse.best_garbling,
        grid,
        coarse.tol,
        refined_gap=fine.gap,
    )


def ic_via_oracle(p: InformationPolicy, m: QuadraticModel, grid: int = DEFAULT_GRID, tol: Optional[float] = None) -> Verdict:
    return check_with_oracle(p, m, grid, tol).verdict
