"""Dense two-phase simplex for small equality-form LPs.

Solves ``max c @ x  s.t.  A @ x = b,  x >= 0`` with ``b >= 0``. Intended for
a handful of rows and a few thousand columns. Entering columns follow
Dantzig's rule (lowest index on ties); after a run of degenerate pivots the
solver switches to Bland's rule, which cannot cycle. Both rules are
deterministic, so repeated solves return the same basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleLP

PIVOT_TOL = 1e-11
DEGENERATE_RUN = 20


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    basis: np.ndarray
    iterations: int


class Unbounded(ArithmeticError):
    pass


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _run(T: np.ndarray, basis: np.ndarray, n_cols: int, max_iter: int) -> int:
    """Pivot until optimal. The last row holds reduced costs (negative = improving)."""
    m = T.shape[0] - 1
    degenerate = 0
    for it in range(max_iter):
        reduced = T[-1, :n_cols]
        improving = np.flatnonzero(reduced < -PIVOT_TOL)
        if improving.size == 0:
            return it
        if degenerate >= DEGENERATE_RUN:
            col = int(improving[0])
        else:
            col = int(improving[np.argmin(reduced[improving])])
        column = T[:m, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            raise Unbounded(f"column {col} is an unbounded ray")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(ties[np.argmin(basis[ties])])
        degenerate = degenerate + 1 if best <= PIVOT_TOL else 0
        _pivot(T, row, col)
        basis[row] = col
    raise RuntimeError(f"simplex did not converge in {max_iter} iterations")


def solve_lp(c, A, b, max_iter: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")

    # phase 1: artificial basis, maximize -sum(artificials)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(n, n + m)
    it1 = _run(T, basis, n + m, max_iter)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if T[-1, -1] < -1e-9 * scale:
        raise InfeasibleLP(f"phase 1 ended with infeasibility {-T[-1, -1]:.3g}")

    # drive zero-level artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] < n:
            keep.append(r)
            continue
        candidates = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
        if candidates.size:
            col = int(candidates[0])
            _pivot(T, r, col)
            basis[r] = col
            keep.append(r)
    T = np.vstack([T[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = basis[keep]

    # phase 2
    cb = c[basis]
    T[-1, :n] = cb @ T[:-1, :n] - c
    T[-1, -1] = cb @ T[:-1, -1]
    it2 = _run(T, basis, n, max_iter)

    x = np.zeros(n)
    x[basis] = T[:-1, -1]
    x = np.clip(x, 0.0, None)
    return LPResult(x, float(c @ x), basis.copy(), it1 + it2)
