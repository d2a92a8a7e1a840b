"""Stochastic opinion-change microdynamics and the percentage observable.

Opinions are 1-based labels ``1..M`` at the public surface, matching the
adaption matrix indices ``alpha[m' - 1, m'' - 1]``. Every time step draws
``N`` neighbour uniforms followed by ``N`` adoption uniforms from the
realisation's generator before any agent moves, so the noise sequence is
independent of the state and each (realisation, step, agent) owns a fixed
slot of the stream.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Network

INIT_STREAM = 1
REALISATION_STREAM = 0


@dataclass(frozen=True)
class AdaptionMatrix:
    """Adoption probabilities; ``alpha[a, b]`` is P(opinion a+1 adopts b+1)."""

    alpha: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("alpha must be a square matrix")
        if np.any(a < 0) or np.any(a > 1) or not np.all(np.isfinite(a)):
            raise ValueError("alpha entries must lie in [0, 1]")
        np.fill_diagonal(a, 0.0)
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def m_opinions(self) -> int:
        return self.alpha.shape[0]


DEFAULT_ALPHA = AdaptionMatrix(np.array([
    [0.0, 0.165, 0.03],
    [0.03, 0.0, 0.165],
    [0.165, 0.03, 0.0],
]))


def realisation_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based generator for realisation ``index``."""
    ss = np.random.SeedSequence(seed, spawn_key=(REALISATION_STREAM, index))
    return np.random.Generator(np.random.Philox(ss))


def _check_state(state, net: Network, m: int) -> np.ndarray:
    x = np.asarray(state)
    if x.ndim != 1 or x.size != net.n_agents:
        raise ValueError(f"state has {x.size} agents, network has {net.n_agents}")
    if x.size and (x.min() < 1 or x.max() > m):
        raise ValueError(f"opinion labels must lie in 1..{m}")
    return x


def draw_neighbors(net: Network, u: np.ndarray) -> np.ndarray:
    """Map uniforms ``u`` in [0, 1) to one uniformly chosen neighbour per agent."""
    deg = net.degree
    r = np.minimum((u * deg).astype(np.int64), deg - 1)
    inside = r < net.block_size
    j = net.block_start + r
    if net.extra_idx.size:
        pos = net.extra_ptr[:-1] + (r - net.block_size)
        pos = np.where(inside, 0, pos)
        j = np.where(inside, j, net.extra_idx[pos])
    return j


def step(state, net: Network, alpha: AdaptionMatrix, rng: np.random.Generator) -> np.ndarray:
    """One synchronous update of every agent."""
    x = _check_state(state, net, alpha.m_opinions)
    n = net.n_agents
    u_nb = rng.random(n)
    u_adopt = rng.random(n)
    j = draw_neighbors(net, u_nb)
    other = x[j]
    adopt = u_adopt < alpha.alpha[x - 1, other - 1]
    return np.where(adopt, other, x)


def transition_probability(state, net: Network, alpha: AdaptionMatrix,
                           agent: int, target_opinion: int) -> float:
    """P[agent holds ``target_opinion`` after one step | current state]."""
    m = alpha.m_opinions
    x = _check_state(state, net, m)
    if not 1 <= target_opinion <= m:
        raise IndexError(f"opinion {target_opinion} outside 1..{m}")
    nb = net.neighbors(agent)
    counts = np.bincount(x[nb] - 1, minlength=m) / nb.size
    own = x[agent] - 1
    p_change = alpha.alpha[own] * counts
    p_change[own] = 0.0
    if target_opinion - 1 == own:
        return float(1.0 - p_change.sum())
    return float(p_change[target_opinion - 1])


def observe(state, m_opinions: int) -> np.ndarray:
    """Opinion percentages of a micro state (or a stack of states along axis 0)."""
    x = np.asarray(state)
    n = x.shape[-1]
    if x.ndim == 1:
        return np.bincount(x - 1, minlength=m_opinions)[:m_opinions] / n
    return np.stack([np.bincount(row - 1, minlength=m_opinions)[:m_opinions] / n
                     for row in x])


def counts_from_percentages(percentages, n: int) -> np.ndarray:
    """Integer counts summing to ``n``: rounded, with the largest share fixing the total."""
    p = _check_percentages(percentages)
    counts = np.rint(p * n).astype(np.int64)
    counts[np.argmax(p)] += n - counts.sum()
    if np.any(counts < 0):
        raise ValueError("cannot realise these percentages with non-negative counts")
    return counts


def _check_percentages(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"percentages {p.tolist()} must be non-negative and sum to 1")
    return p


def initial_state(net: Network, m_opinions: int, x0_spec, rng_seed: int = 0) -> np.ndarray:
    """Realise an initial micro state.

    ``x0_spec`` may be
      * an integer array of length N (explicit micro state),
      * a length-M vector of global percentages: exact counts, opinions laid
        out in contiguous agent ranges (opinion 1 first),
      * a (k, M) array of per-cluster distributions: agents of cluster c draw
        their opinion i.i.d. from row c.
    """
    spec = np.asarray(x0_spec)
    n = net.n_agents
    if spec.ndim == 1 and spec.size == n and np.issubdtype(spec.dtype, np.integer):
        return _check_state(spec, net, m_opinions).copy()
    if spec.ndim == 1:
        if spec.size != m_opinions:
            raise ValueError(f"expected {m_opinions} percentages, got {spec.size}")
        counts = counts_from_percentages(spec, n)
        return np.repeat(np.arange(1, m_opinions + 1), counts)
    if spec.ndim == 2:
        if net.cluster_of is None:
            raise ValueError("per-cluster initial distributions need a clustered network")
        k = int(net.cluster_of.max()) + 1
        if spec.shape != (k, m_opinions):
            raise ValueError(f"expected a ({k}, {m_opinions}) array of distributions")
        for row in spec:
            _check_percentages(row)
        ss = np.random.SeedSequence(rng_seed, spawn_key=(INIT_STREAM,))
        rng = np.random.Generator(np.random.Philox(ss))
        cdf = np.cumsum(spec, axis=1)
        u = rng.random(n)
        own = cdf[net.cluster_of]
        x = 1 + (u[:, None] >= own[:, :-1]).sum(axis=1)
        return x.astype(np.int64)
    raise ValueError("unrecognised initial-condition specification")


@dataclass
class SimulationResult:
    macro: list  # list of (T+1, M) arrays
    micro: list | None  # list of (T+1, N) int8 arrays, if kept
    x0: np.ndarray


def simulate_realisation(x0, net: Network, alpha: AdaptionMatrix, T: int,
                         rng: np.random.Generator, keep_micro: bool = False):
    m = alpha.m_opinions
    x = np.asarray(x0, dtype=np.int64)
    macro = np.empty((T + 1, m))
    macro[0] = observe(x, m)
    micro = np.empty((T + 1, net.n_agents), dtype=np.int8) if keep_micro else None
    if keep_micro:
        micro[0] = x
    for t in range(T):
        x = step(x, net, alpha, rng)
        macro[t + 1] = observe(x, m)
        if keep_micro:
            micro[t + 1] = x
    return macro, micro


def simulate(net: Network, alpha: AdaptionMatrix, x0_spec, T: int,
             n_realisations: int, rng_seed: int = 0,
             keep_micro: bool = False) -> SimulationResult:
    """Independent realisations from one shared initial state.

    Realisation ``r`` uses :func:`realisation_rng` ``(rng_seed, r)`` and is
    therefore reproducible on its own.
    """
    if T < 0 or n_realisations < 0:
        raise ValueError("T and n_realisations must be non-negative")
    x0 = initial_state(net, alpha.m_opinions, x0_spec, rng_seed)
    macro = []
    micro = [] if keep_micro else None
    for r in range(n_realisations):
        mac, mic = simulate_realisation(x0, net, alpha, T, realisation_rng(rng_seed, r),
                                        keep_micro)
        macro.append(mac)
        if keep_micro:
            micro.append(mic)
    return SimulationResult(macro=macro, micro=micro, x0=x0)
