"""Closed-form expected macro-models.

These are exact maps, used both as oracles for the agent simulation and as
noise-free ground truth for model identification.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abm import AdaptionMatrix

SIMPLEX_TOL = 1e-9


def _check_simplex(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < -SIMPLEX_TOL) or abs(x.sum() - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"state {x.tolist()} is not on the probability simplex")
    return x


def expected_step_complete(x, alpha: AdaptionMatrix) -> np.ndarray:
    """Expected next opinion percentages on a complete network.

    ``x'_a = x_a + sum_b (alpha[b, a] - alpha[a, b]) x_b x_a``.
    """
    x = _check_simplex(x)
    a = alpha.alpha
    if x.size != a.shape[0]:
        raise ValueError("state and alpha dimensions differ")
    flow = (a.T - a) @ x
    return x + flow * x


@dataclass(frozen=True)
class ReducedCoefficients:
    """Two-coordinate form of the M=3 complete-network map.

    ``x1' = lin1 x1 + sq1 x1^2 + cross1 x1 x2``
    ``x2' = lin2 x2 + sq2 x2^2 + cross2 x1 x2``

    with the shorthands ``a = a31 - a13``, ``b = a21 - a12 - a31 + a13``,
    ``c = a32 - a23``, ``d = a12 - a21 - a32 + a23``.
    """

    a: float
    b: float
    c: float
    d: float

    @property
    def row1(self) -> tuple[float, float, float]:
        """Coefficients of (x1, x1^2, x1 x2)."""
        return 1.0 + self.a, -self.a, self.b

    @property
    def row2(self) -> tuple[float, float, float]:
        """Coefficients of (x2, x2^2, x1 x2)."""
        return 1.0 + self.c, -self.c, self.d

    def opinion_matrix(self) -> np.ndarray:
        """2 x 5 matrix on the basis (x1, x2, x1^2, x2^2, x1 x2)."""
        l1, s1, c1 = self.row1
        l2, s2, c2 = self.row2
        return np.array([[l1, 0.0, s1, 0.0, c1],
                         [0.0, l2, 0.0, s2, c2]])

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        l1, s1, c1 = self.row1
        l2, s2, c2 = self.row2
        return (l1 * x1 + s1 * x1 * x1 + c1 * x1 * x2,
                l2 * x2 + s2 * x2 * x2 + c2 * x1 * x2)


def reduce_m3(alpha: AdaptionMatrix) -> ReducedCoefficients:
    """Eliminate ``x3 = 1 - x1 - x2`` from the M=3 complete-network map."""
    if alpha.m_opinions != 3:
        raise NotImplementedError("the two-coordinate reduction needs exactly 3 opinions")
    al = alpha.alpha
    a12, a13 = al[0, 1], al[0, 2]
    a21, a23 = al[1, 0], al[1, 2]
    a31, a32 = al[2, 0], al[2, 1]
    return ReducedCoefficients(
        a=a31 - a13,
        b=a21 - a12 - a31 + a13,
        c=a32 - a23,
        d=a12 - a21 - a32 + a23,
    )


def expected_step_two_cluster(x1, x2, alpha: AdaptionMatrix):
    """Advance two uncoupled, internally complete clusters by one step.

    Cluster states may be given as full 3-vectors or as their first two
    coordinates. Returns ``(x1', x2', mean)`` in the same representation.
    """
    red = reduce_m3(alpha)
    out = []
    for x in (x1, x2):
        x = np.asarray(x, dtype=float)
        full = x.size == 3
        if full:
            _check_simplex(x)
        elif x.size != 2:
            raise ValueError("cluster state must have 2 or 3 components")
        elif np.any(x < -SIMPLEX_TOL) or x.sum() > 1 + SIMPLEX_TOL:
            raise ValueError(f"state {x.tolist()} is not on the probability simplex")
        y1, y2 = red(x[0], x[1])
        out.append(np.array([y1, y2, 1.0 - y1 - y2]) if full else np.array([y1, y2]))
    return out[0], out[1], 0.5 * (out[0] + out[1])


def two_cluster_trajectory(x1_0, x2_0, alpha: AdaptionMatrix, T: int):
    """Deterministic uncoupled two-cluster evolution over ``T`` steps.

    Returns ``(c1, c2, mean)``, each a (T+1, 2) array of the first two
    percentages.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    red = reduce_m3(alpha)
    c = np.empty((2, T + 1, 2))
    c[0, 0] = np.asarray(x1_0, dtype=float)[:2]
    c[1, 0] = np.asarray(x2_0, dtype=float)[:2]
    for t in range(T):
        y1, y2 = red(c[:, t, 0], c[:, t, 1])
        c[:, t + 1, 0] = y1
        c[:, t + 1, 1] = y2
    return c[0], c[1], 0.5 * (c[0] + c[1])


def complete_trajectory(x0, alpha: AdaptionMatrix, T: int) -> np.ndarray:
    """Iterate :func:`expected_step_complete` ``T`` times; (T+1, M) array."""
    out = [np.asarray(x0, dtype=float)]
    for _ in range(T):
        out.append(expected_step_complete(out[-1], alpha))
    return np.array(out)


def linear_two_cluster_ar2(lambda1: float, lambda2: float) -> tuple[float, float]:
    """AR(2) coefficients for the mean of two scalar linear clusters.

    If ``x_t = (lambda1**t A + lambda2**t B) / 2`` then
    ``x_{t+1} = c1 x_t + c2 x_{t-1}`` with ``c1 = lambda1 + lambda2`` and
    ``c2 = -lambda1 lambda2`` (roots of the characteristic polynomial).
    """
    return lambda1 + lambda2, -lambda1 * lambda2
