"""Ready-made experiment configurations and runners.

A configuration is a plain dict so it can round-trip through JSON config
files and manifests unchanged.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from . import macrodynamics, sinar, validation
from .abm import DEFAULT_ALPHA, AdaptionMatrix, simulate
from .network import make_clustered, make_complete

BASE = {
    "network": {"kind": "complete", "n_agents": 5000},
    "alpha": DEFAULT_ALPHA.alpha.tolist(),
    "x0": [0.45, 0.1, 0.45],
    "T": 300,
    "r": 20,
    "train": 12,
    "p_values": list(range(1, 11)),
    "lambdas": [0.0, 0.05],
    "block_len": 40,
    "seed": 0,
    "method": "stlsq",
}

CASES = {
    "complete": {},
    "two-cluster": {
        "network": {"kind": "clustered", "n_agents": 5000, "n_clusters": 2, "p_between": 1e-4},
        "x0": [[0.8, 0.1, 0.1], [0.1, 0.1, 0.8]],
        "T": 500,
        "block_len": 20,
    },
    "five-cluster": {
        "network": {"kind": "clustered", "n_agents": 5000, "n_clusters": 5, "p_between": 1e-4},
        "x0": [[0.8, 0.1, 0.1], [0.1, 0.1, 0.8], [0.1, 0.8, 0.1],
               [0.3, 0.4, 0.3], [0.5, 0.3, 0.2]],
        "T": 500,
        "block_len": 40,
        "p_values": [1, 2, 5, 10, 15, 20],
    },
}


def case_config(name: str, **overrides) -> dict:
    """Full config for a named case, with top-level keys overridden."""
    if name not in CASES:
        raise ValueError(f"unknown case {name!r}; choose from {sorted(CASES)}")
    cfg = copy.deepcopy(BASE)
    cfg.update(copy.deepcopy(CASES[name]))
    cfg.update(overrides)
    return cfg


def build_network(spec: dict, seed: int = 0):
    kind = spec.get("kind", "complete")
    if kind == "complete":
        return make_complete(int(spec["n_agents"]))
    if kind == "clustered":
        return make_clustered(int(spec["n_agents"]), int(spec["n_clusters"]),
                              float(spec["p_between"]), rng_seed=seed)
    raise ValueError(f"unknown network kind {kind!r}")


def simulate_config(cfg: dict, keep_micro: bool = False):
    """Network plus simulated ensemble for a config."""
    net = build_network(cfg["network"], cfg["seed"])
    alpha = AdaptionMatrix(np.asarray(cfg["alpha"], dtype=float))
    res = simulate(net, alpha, cfg["x0"], int(cfg["T"]), int(cfg["r"]),
                   rng_seed=int(cfg["seed"]), keep_micro=keep_micro)
    return net, alpha, res


def reduced_observable(macro):
    """Drop the last percentage, which is fixed by the others."""
    return [np.asarray(x)[:, :-1] for x in macro]


def run_sweep(cfg: dict, macro=None) -> validation.SweepResult:
    """Simulate (unless ``macro`` is given), split and sweep memory depths."""
    if macro is None:
        macro = simulate_config(cfg)[2].macro
    obs = reduced_observable(macro)
    train, valid = validation.split_realisations(obs, int(cfg["train"]))
    m = obs[0].shape[1]
    if m == 2:
        builder = sinar.opinion_dictionary
    else:
        def builder(p):
            return sinar.polynomial_dictionary(m, p, degree=2)
    return validation.memory_sweep(train, valid, builder, cfg["p_values"], cfg["lambdas"],
                                   int(cfg["block_len"]), method=cfg.get("method", "stlsq"))


# ----------------------------------------------------- uncoupled two clusters

UNCOUPLED_INITS = {
    "symmetric": ((0.8, 0.1), (0.1, 0.8)),
    "nonsymmetric": ((0.7, 0.2), (0.1, 0.8)),
}


@dataclass
class UncoupledResult:
    variant: str
    p: int
    model: sinar.NarModel
    one_step_error: float
    rollout_error: float
    trajectory: np.ndarray
    prediction: np.ndarray | None


def uncoupled_experiment(variant: str = "symmetric", p: int = 2, T: int = 900,
                         n_train: int = 500, lam: float = 0.0,
                         alpha: AdaptionMatrix = DEFAULT_ALPHA) -> UncoupledResult:
    """Fit the network mean of two uncoupled complete clusters.

    The deterministic trajectory has ``T + 1`` states; the model is fitted
    on states ``0..n_train`` and rolled out over the remaining ``T - n_train``
    steps from the last ``p`` training states. The one-step error is taken
    over the whole trajectory. A diverging rollout gives ``inf``.
    """
    if variant not in UNCOUPLED_INITS:
        raise ValueError(f"unknown variant {variant!r}")
    if T < 1:
        raise ValueError("T must be at least 1")
    if not p <= n_train < T:
        raise ValueError("need p <= n_train < T")
    c1, c2 = UNCOUPLED_INITS[variant]
    _, _, mean = macrodynamics.two_cluster_trajectory(c1, c2, alpha, T)
    train = mean[:n_train + 1]
    model = sinar.fit(sinar.build_hankel([train], p),
                      sinar.opinion_dictionary(p), lam)
    one = validation.one_step_error(model, mean)
    try:
        pred = sinar.rollout(model, train[-p:], T - n_train)
        roll = validation.relative_error(mean[n_train + 1:], pred)
    except sinar.DivergenceError:
        pred, roll = None, np.inf
    return UncoupledResult(variant, p, model, one, roll, mean, pred)


def linear_two_cluster_check(lambda1: float, lambda2: float, A: float = 1.0,
                             B: float = 2.0, T: int = 50) -> dict:
    """Simulate two scalar linear clusters and test the AR(2) recurrence on their mean."""
    if T < 2:
        raise ValueError("T must be at least 2")
    t = np.arange(T + 1)
    x1 = A * np.cumprod(np.r_[1.0, np.full(T, lambda1)])
    x2 = B * np.cumprod(np.r_[1.0, np.full(T, lambda2)])
    mean = 0.5 * (x1 + x2)
    c1, c2 = macrodynamics.linear_two_cluster_ar2(lambda1, lambda2)
    resid = mean[2:] - (c1 * mean[1:-1] + c2 * mean[:-2])
    return {"c1": c1, "c2": c2, "t": t, "mean": mean,
            "max_abs_residual": float(np.max(np.abs(resid)))}
