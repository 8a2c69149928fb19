"""Belief-vector geometry on a finite state set.

Beliefs are dense probability vectors in state order. For the three-state
model with states (-1, 0, 1) a belief is also addressed by its ``(a, z)``
chart: ``a`` is the induced action (the mean state) and ``z`` the probability
of state 0.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import math

import numpy as np

from .errors import DegenerateVertices, InvalidModel, OutOfSimplex, WrongStateSpace

# Sums off by less than this are renormalized, larger deviations are errors.
NORMALIZE_TOL = 1e-9
# Entries this far below zero are treated as rounding and clipped.
NEG_TOL = 1e-12
AZ_SLACK = 1e-12
BARYCENTRIC_RESIDUAL = 1e-9
RANK_RTOL = 1e-10

THREE_STATES = np.array([-1.0, 0.0, 1.0])


def state_space(states) -> np.ndarray:
    """Validate a state set and return it as a float array.

    Scalar states (shape ``(K,)``) must be strictly increasing; vector states
    (shape ``(K, J)``) must be pairwise distinct.
    """
    arr = np.asarray(states, dtype=float)
    if arr.ndim not in (1, 2) or arr.shape[0] < 2:
        raise InvalidModel(f"need at least two states, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidModel("states must be finite")
    if arr.ndim == 1:
        if np.any(np.diff(arr) <= 0):
            raise InvalidModel("scalar states must be strictly increasing")
    else:
        for i in range(len(arr)):
            for j in range(i + 1, len(arr)):
                if np.array_equal(arr[i], arr[j]):
                    raise InvalidModel(f"states {i} and {j} coincide")
    return arr


def is_three_state(states) -> bool:
    arr = np.asarray(states, dtype=float)
    return arr.shape == (3,) and np.array_equal(arr, THREE_STATES)


def as_belief(probs, size: int | None = None) -> np.ndarray:
    """Return ``probs`` as a validated belief vector.

    Raises OutOfSimplex for negative entries, non-finite entries or a total
    mass further than 1e-9 from one. Small deviations are renormalized.
    """
    b = np.array(probs, dtype=float)
    if b.ndim != 1 or b.size == 0:
        raise OutOfSimplex(f"belief must be a nonempty vector, got shape {b.shape}")
    if size is not None and b.size != size:
        raise OutOfSimplex(f"belief has {b.size} entries, state space has {size}")
    if not np.all(np.isfinite(b)):
        raise OutOfSimplex("belief has non-finite entries")
    if np.any(b < -NEG_TOL):
        raise OutOfSimplex(f"belief has negative entries: {b}")
    b = np.clip(b, 0.0, None)
    # fsum is exactly rounded, so the total does not depend on entry order
    total = math.fsum(b)
    if abs(total - 1.0) > NORMALIZE_TOL:
        raise OutOfSimplex(f"belief sums to {total!r}, not 1")
    return b if total == 1.0 else b / total


def dirac(index: int, size: int) -> np.ndarray:
    b = np.zeros(size)
    b[index] = 1.0
    return b


def is_interior(b) -> bool:
    """True when every state has strictly positive probability."""
    return bool(np.all(np.asarray(b) > NEG_TOL))


class AZPoint(NamedTuple):
    a: float
    z: float


def in_b(a: float, z: float, slack: float = AZ_SLACK) -> bool:
    """Membership in the (a, z) image of the three-state simplex."""
    return (-slack <= z <= 1.0 + slack) and abs(a) <= 1.0 - z + slack


def _require_three_states(states) -> None:
    if states is not None and not is_three_state(states):
        raise WrongStateSpace(f"(a, z) chart needs states (-1, 0, 1), got {np.asarray(states).tolist()}")


def belief_from_az(point, states=None) -> np.ndarray:
    """Belief ``(nu_-1, nu_0, nu_1)`` at chart coordinates ``(a, z)``."""
    _require_three_states(states)
    a, z = float(point[0]), float(point[1])
    if not in_b(a, z):
        raise OutOfSimplex(f"(a={a}, z={z}) lies outside the belief triangle")
    z = min(max(z, 0.0), 1.0)
    b = np.array([(1.0 - z - a) / 2.0, z, (1.0 - z + a) / 2.0])
    return np.clip(b, 0.0, None)


def az_from_belief(b, states=None) -> AZPoint:
    _require_three_states(states)
    b = np.asarray(b, dtype=float)
    if b.shape != (3,):
        raise WrongStateSpace(f"(a, z) chart needs three-state beliefs, got shape {b.shape}")
    return AZPoint(float(b[2] - b[0]), float(b[1]))


def affinely_independent(beliefs: Sequence) -> bool:
    """Rank test on the difference vectors ``v_i - v_1``.

    Singular values below 1e-10 times the largest one count as zero.
    """
    V = np.atleast_2d(np.asarray(beliefs, dtype=float))
    if V.shape[0] == 0:
        raise ValueError("need at least one belief")
    if V.shape[0] == 1:
        return True
    D = V[1:] - V[0]
    if D.shape[0] > D.shape[1]:
        return False
    sv = np.linalg.svd(D, compute_uv=False)
    if sv[0] == 0.0:
        return False
    return bool(np.all(sv > RANK_RTOL * sv[0]))


def barycentric(b, vertices: Sequence) -> np.ndarray | None:
    """Barycentric weights of ``b`` with respect to ``vertices``.

    Returns None when ``b`` is outside the convex hull of the vertices (or
    off their affine span). Raises DegenerateVertices when the vertices are
    not affinely independent.
    """
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    b = np.asarray(b, dtype=float)
    if not 1 <= V.shape[0] <= V.shape[1]:
        raise DegenerateVertices(f"{V.shape[0]} vertices in dimension {V.shape[1]}")
    if not affinely_independent(V):
        raise DegenerateVertices("vertices are not affinely independent")
    A = np.vstack([V.T, np.ones(V.shape[0])])
    rhs = np.append(b, 1.0)
    lam, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    if np.max(np.abs(A @ lam - rhs)) > BARYCENTRIC_RESIDUAL:
        return None
    if np.any(lam < -BARYCENTRIC_RESIDUAL):
        return None
    lam = np.clip(lam, 0.0, None)
    return lam / lam.sum()
