"""Extended Hénon benchmark with an exactly known memory expansion.

The system is

    x_{t+1} = 1 - a x_t^2 + y_t
    y_{t+1} = b x_t + c y_t

Eliminating ``y`` gives ``x_{t+1} = 1 - a x_t^2 + sum_{j>=1} b c^(j-1) x_{t-j}``,
so only ``x`` is observed and all memory coefficients are known in closed form.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import sinar
from .sinar import DivergenceError
from .validation import relative_error

ESCAPE_RADIUS = 1e6


class HenonDivergenceError(RuntimeError):
    """The orbit left ``|x| <= 1e6``; ``step`` is the first offending index."""

    def __init__(self, msg, step):
        super().__init__(msg)
        self.step = step


@dataclass(frozen=True)
class HenonParams:
    a: float = 1.3
    b: float = 0.3
    c: float = 0.3
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.a, self.b, self.c, self.x0, self.y0])):
            raise ValueError("Hénon parameters must be finite")


def simulate_henon(params: HenonParams, T: int) -> tuple:
    """``(x, y)`` series of length ``T + 1`` starting at ``(x0, y0)``."""
    if T < 0:
        raise ValueError("T must be non-negative")
    a, b, c = params.a, params.b, params.c
    x = np.empty(T + 1)
    y = np.empty(T + 1)
    x[0], y[0] = params.x0, params.y0
    for t in range(T):
        x[t + 1] = 1.0 - a * x[t] * x[t] + y[t]
        y[t + 1] = b * x[t] + c * y[t]
        if not abs(x[t + 1]) <= ESCAPE_RADIUS:
            raise HenonDivergenceError(f"orbit escaped |x| > {ESCAPE_RADIUS:g} at step {t + 1}",
                                       t + 1)
    return x, y


def exact_memory_coefficients(params: HenonParams, p: int) -> np.ndarray:
    """Truncated memory expansion in Hénon-dictionary order.

    Returns ``[1, -a, 0, b, b c, ..., b c^(p-2)]``, matching the features
    ``[1, x_t^2, x_t, x_{t-1}, ..., x_{t-p+1}]``.
    """
    if p < 2:
        raise ValueError("the memory expansion needs p >= 2")
    mem = params.b * params.c ** np.arange(p - 1, dtype=float)
    return np.concatenate([[1.0, -params.a, 0.0], mem])


def exact_model(params: HenonParams, p: int) -> sinar.NarModel:
    """The truncated expansion wrapped as an ``NarModel``."""
    xi = exact_memory_coefficients(params, p)[None, :]
    return sinar.NarModel(sinar.henon_dictionary(p), xi, 0.0,
                          metadata={"source": "exact expansion"})


def delay_embed(series, p: int) -> np.ndarray:
    """Points ``(x_t, x_{t-1}, ..., x_{t-p+1})`` for ``t = p-1 .. T``; shape (T-p+2, p)."""
    s = np.asarray(series, dtype=float).ravel()
    if p < 1:
        raise ValueError("embedding depth must be >= 1")
    if s.size < p:
        raise ValueError(f"series of length {s.size} is too short for depth {p}")
    n = s.size - p + 1
    return np.column_stack([s[p - 1 - k:p - 1 - k + n] for k in range(p)])


def _as_cloud(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.shape[0] == 0:
        raise ValueError("point cloud is empty")
    if not np.all(np.isfinite(A)):
        raise ValueError("point cloud has non-finite coordinates")
    return A


def _directed_brute(A, B, chunk=1024):
    worst = 0.0
    for i in range(0, A.shape[0], chunk):
        d = A[i:i + chunk, None, :] - B[None, :, :]
        worst = max(worst, float(np.sqrt((d * d).sum(axis=2)).min(axis=1).max()))
    return worst


def hausdorff_distance(A, B, method: str = "brute") -> float:
    """Symmetric Hausdorff distance between two point clouds.

    ``method="brute"`` checks every pair; ``method="kdtree"`` uses nearest
    neighbour queries and returns the same value.
    """
    A, B = _as_cloud(A), _as_cloud(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError("point clouds have different dimensions")
    if method == "brute":
        return max(_directed_brute(A, B), _directed_brute(B, A))
    if method == "kdtree":
        dab = cKDTree(B).query(A, k=1)[0].max()
        dba = cKDTree(A).query(B, k=1)[0].max()
        return float(max(dab, dba))
    raise ValueError(f"unknown method {method!r}")


def save_attractor_csv(points, path) -> None:
    """2-D embedding as ``x_t,x_tminus1`` rows."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("attractor export needs a 2-D embedding")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x_t", "x_tminus1"])
        for a, b in pts:
            w.writerow([f"{a:.17g}", f"{b:.17g}"])


@dataclass
class HenonCell:
    p: int
    coefficient_error: float
    validation_error: float
    hausdorff: float
    model: sinar.NarModel


def henon_recovery_experiment(params: HenonParams, p_values, lam: float = 0.0,
                              T_total: int = 1000, T_train: int = 920,
                              burn_in: int = 1000, attractor_train: int = 1000,
                              attractor_steps: int = 3000, method: str = "stlsq",
                              hausdorff_method: str = "kdtree") -> list:
    """Fit the Hénon dictionary for each ``p`` and score it three ways.

    * ``coefficient_error``: max deviation from the truncated exact expansion.
    * ``validation_error``: relative error of a rollout over the
      ``T_total - T_train`` steps after training, seeded by the last ``p``
      training values.
    * ``hausdorff``: distance between 2-D embeddings of an ``attractor_steps``
      rollout (model fitted on ``attractor_train`` values) and the true
      continuation.

    ``T_total`` and the attractor window are counted after ``burn_in``.
    Diverging rollouts score ``inf``.
    """
    if not 0 < T_train < T_total:
        raise ValueError("need 0 < T_train < T_total")
    horizon = max(T_total, attractor_train + attractor_steps)
    x, _ = simulate_henon(params, burn_in + horizon - 1)
    x = x[burn_in:]
    train, valid = x[:T_train], x[T_train:T_total]
    att_train, att_truth = x[:attractor_train], x[attractor_train:attractor_train + attractor_steps]
    truth_cloud = delay_embed(att_truth, 2)
    cells = []
    for p in p_values:
        d = sinar.henon_dictionary(p)
        model = sinar.fit(sinar.build_hankel([train], p), d, lam, method=method)
        exact = (exact_memory_coefficients(params, p) if p >= 2
                 else np.array([1.0, -params.a, 0.0]))
        coef_err = float(np.max(np.abs(model.xi[0] - exact)))
        try:
            rec = sinar.rollout(model, train[-p:], valid.size)[:, 0]
            val_err = relative_error(valid, rec)
        except DivergenceError:
            val_err = np.inf
        att_model = (model if attractor_train == T_train else
                     sinar.fit(sinar.build_hankel([att_train], p), d, lam, method=method))
        try:
            traj = sinar.rollout(att_model, att_train[-p:], attractor_steps)[:, 0]
            haus = hausdorff_distance(truth_cloud, delay_embed(traj, 2), hausdorff_method)
        except DivergenceError:
            haus = np.inf
        cells.append(HenonCell(p, coef_err, val_err, haus, model))
    return cells
