"""Cyclic coordinate-descent LASSO with exact soft-thresholding.

Objective (per output row)::

    ||y - w^T A||_2^2 + penalty * ||w||_1,   penalty = lam * n

with ``A`` the (v, n) feature matrix. The ``lam * n`` scaling makes ``lam``
act on the mean squared error, so the same ``lam`` is comparable across data
sizes. Sweeps run on the Gram form ``G = A A^T``, ``c = A y``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MAX_SWEEPS = 100_000
TOL = 1e-12


class LassoConvergenceError(RuntimeError):
    """Coordinate descent hit the sweep limit; ``last_iterate`` holds w."""

    def __init__(self, msg, last_iterate, n_sweeps, last_change):
        super().__init__(msg)
        self.last_iterate = last_iterate
        self.n_sweeps = n_sweeps
        self.last_change = last_change


def soft_threshold(z, t):
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


@njit(cache=True)
def _cd_sweeps(G, c, w, half_pen, max_sweeps, tol):
    v = w.shape[0]
    change = np.inf
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        change = 0.0
        for j in range(v):
            gjj = G[j, j]
            old = w[j]
            if gjj <= 0.0:
                new = 0.0
            else:
                z = c[j]
                for k in range(v):
                    if k != j:
                        z -= G[j, k] * w[k]
                if z > half_pen:
                    new = (z - half_pen) / gjj
                elif z < -half_pen:
                    new = (z + half_pen) / gjj
                else:
                    new = 0.0
            w[j] = new
            d = abs(new - old)
            if d > change:
                change = d
        if change < tol:
            break
    return sweeps, change


def lasso_objective(A, y, w, lam):
    r = np.asarray(y) - np.asarray(w) @ np.asarray(A)
    n = np.asarray(y).size
    return float(r @ r + lam * n * np.abs(w).sum())


def _validate(A, y, lam):
    A = np.ascontiguousarray(A, dtype=float)
    y = np.ascontiguousarray(y, dtype=float).ravel()
    if A.ndim != 2 or A.shape[1] != y.size:
        raise ValueError(f"feature matrix {A.shape} does not match {y.size} targets")
    if y.size < 1:
        raise ValueError("need at least one sample")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite entries in LASSO input")
    if not np.isfinite(lam) or lam < 0:
        raise ValueError("lambda must be a finite non-negative number")
    return A, y


def lasso_solve(A, y, lam: float, w0=None, max_sweeps: int = MAX_SWEEPS,
                tol: float = TOL, return_info: bool = False):
    """Minimise ``||y - w^T A||^2 + lam*n*||w||_1`` by cyclic coordinate descent.

    Parameters
    ----------
    A : (v, n) array
        Features, one row per dictionary term.
    y : (n,) array
    lam : float
        Mean-squared-error scaled sparsity weight.
    w0 : (v,) array, optional
        Warm start.

    Returns
    -------
    w : (v,) array, or ``(w, info)`` with sweep count and final change.

    Raises
    ------
    LassoConvergenceError
        If the largest coefficient change is still ``>= tol`` after
        ``max_sweeps`` sweeps.
    """
    A, y = _validate(A, y, lam)
    G = A @ A.T
    c = A @ y
    w = np.zeros(A.shape[0]) if w0 is None else np.array(w0, dtype=float)
    sweeps, change = _cd_sweeps(G, c, w, 0.5 * lam * y.size, max_sweeps, tol)
    if change >= tol:
        raise LassoConvergenceError(
            f"coordinate descent did not converge in {sweeps} sweeps "
            f"(last change {change:.3e})", w, sweeps, change)
    if return_info:
        return w, {"sweeps": int(sweeps), "last_change": float(change)}
    return w


def lasso_path_trace(A, y, lam: float, n_sweeps: int):
    """Run ``n_sweeps`` single sweeps, returning the objective after each.

    The first entry is the objective at ``w = 0``.
    """
    A, y = _validate(A, y, lam)
    G = A @ A.T
    c = A @ y
    w = np.zeros(A.shape[0])
    objs = [lasso_objective(A, y, w, lam)]
    for _ in range(n_sweeps):
        _cd_sweeps(G, c, w, 0.5 * lam * y.size, 1, 0.0)
        objs.append(lasso_objective(A, y, w, lam))
    return w, np.array(objs)
