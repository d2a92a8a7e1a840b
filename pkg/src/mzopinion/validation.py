"""Block-wise reconstruction errors and memory-depth sweeps.

A validation trajectory is cut into consecutive blocks of length ``l``
starting at index 0; the trailing partial block is dropped. Block ``j >= 1``
is predicted by rolling the model forward ``l`` steps from the last ``p``
states of block ``j - 1``. Block 0 only ever serves as seed material.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import sinar
from .sinar import DivergenceError, NarModel


def relative_error(truth, approx) -> float:
    """Frobenius ``||truth - approx|| / ||truth||``."""
    truth = np.asarray(truth, dtype=float)
    return float(np.linalg.norm(truth - approx) / np.linalg.norm(truth))


def block_partition(length: int, block_len: int) -> list:
    """Start indices of the complete blocks of a trajectory."""
    return list(range(0, length - block_len + 1, block_len))


def block_errors(model: NarModel, trajectory, block_len: int) -> np.ndarray:
    """Relative error of each reconstructed block ``j >= 1``.

    Divergent reconstructions score ``inf``. A block whose data is exactly
    zero (e.g. consensus on the omitted last opinion) has no relative error
    and scores ``nan``.
    """
    x = sinar._as_traj(trajectory)
    p = model.p
    if block_len < p:
        raise ValueError(f"block length {block_len} is shorter than memory depth {p}")
    starts = block_partition(x.shape[0], block_len)
    if len(starts) < 2:
        raise ValueError(f"trajectory of length {x.shape[0]} holds fewer than two "
                         f"blocks of length {block_len}")
    errs = []
    for s in starts[1:]:
        block = x[s:s + block_len]
        if not np.any(block):
            errs.append(np.nan)
            continue
        try:
            rec = sinar.rollout(model, x[s - p:s], block_len)
        except DivergenceError:
            errs.append(np.inf)
            continue
        errs.append(relative_error(block, rec))
    return np.array(errs)


def one_step_predictions(model: NarModel, trajectory) -> tuple:
    """Targets and one-step predictions from true histories, both (n, m)."""
    x = sinar._as_traj(trajectory)
    if x.shape[0] < model.p + 1:
        raise ValueError(f"trajectory of length {x.shape[0]} is too short for p={model.p}")
    data = sinar.build_hankel([x], model.p)
    pred = model.xi @ model.dictionary.evaluate(data.Xtilde)
    return data.Xprime.T, pred.T


def one_step_error(model: NarModel, trajectory) -> float:
    """Relative Frobenius error of all one-step predictions (no feedback)."""
    truth, pred = one_step_predictions(model, trajectory)
    return relative_error(truth, pred)


def simplex_violations(states, tol: float = 1e-12) -> int:
    """Number of states whose partial percentages leave the simplex."""
    s = np.asarray(states, dtype=float)
    bad = np.any(s < -tol, axis=1) | (s.sum(axis=1) > 1 + tol)
    return int(bad.sum())


@dataclass
class SweepCell:
    p: int
    lam: float
    mean_block_error: float
    mean_one_step_error: float
    n_blocks: int
    n_diverged: int
    model: NarModel = field(repr=False)
    block_errors: np.ndarray = field(repr=False, default=None)


@dataclass
class SweepResult:
    cells: list

    def get(self, p: int, lam: float) -> SweepCell:
        for c in self.cells:
            if c.p == p and c.lam == lam:
                return c
        raise KeyError((p, lam))

    def curve(self, lam: float, which: str = "block") -> tuple:
        """``(p_values, errors)`` for one lambda."""
        cells = sorted((c for c in self.cells if c.lam == lam), key=lambda c: c.p)
        key = "mean_block_error" if which == "block" else "mean_one_step_error"
        return (np.array([c.p for c in cells]),
                np.array([getattr(c, key) for c in cells]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p", "lambda", "mean_block_error", "mean_one_step_error",
                        "n_blocks", "n_diverged"])
            for c in self.cells:
                w.writerow([c.p, repr(c.lam), repr(c.mean_block_error),
                            repr(c.mean_one_step_error), c.n_blocks, c.n_diverged])


def split_realisations(trajectories, n_train: int) -> tuple:
    """First ``n_train`` realisations train, the rest validate."""
    if not 0 < n_train < len(trajectories):
        raise ValueError(f"cannot train on {n_train} of {len(trajectories)} realisations")
    return list(trajectories[:n_train]), list(trajectories[n_train:])


def memory_sweep(train, validate, dict_builder, p_values, lambdas, block_len: int,
                 method: str = "stlsq") -> SweepResult:
    """Fit on the pooled training data and score each (p, lambda) on validation data.

    Blocks without a defined relative error (all-zero data) are left out of
    the mean and of ``n_blocks``; diverged blocks count as ``inf``.
    """
    p_values = list(p_values)
    lambdas = list(lambdas)
    if not p_values or not lambdas:
        raise ValueError("need at least one memory depth and one lambda")
    if any(b <= a for a, b in zip(p_values, p_values[1:])):
        raise ValueError("memory depths must be strictly increasing")
    cells = []
    for p in p_values:
        data = sinar.build_hankel(train, p)
        dictionary = dict_builder(p)
        for lam in lambdas:
            model = sinar.fit(data, dictionary, lam, method=method)
            errs = np.concatenate([block_errors(model, v, block_len) for v in validate])
            errs = errs[~np.isnan(errs)]
            one = [one_step_error(model, v) for v in validate]
            cells.append(SweepCell(
                p=p, lam=float(lam),
                mean_block_error=float(np.mean(errs)),
                mean_one_step_error=float(np.mean(one)),
                n_blocks=int(errs.size),
                n_diverged=int(np.isinf(errs).sum()),
                model=model,
                block_errors=errs,
            ))
    return SweepResult(cells)
