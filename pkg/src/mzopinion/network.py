"""Agent interaction networks.

A network is stored as a partition of the agents into contiguous, internally
complete blocks plus a sparse list of extra (cross-block) neighbours per agent
in CSR form. Complete and clustered networks then cost O(N + #inter-cluster
edges) memory, and a single-agent block with extras covers arbitrary graphs
loaded from edge lists. Agents are 0-based internally; edge-list files are
1-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected network with self-loops on every agent.

    Attributes
    ----------
    n_agents : int
    block_start, block_size : (N,) int arrays
        Each agent is fully connected to ``block_start[i] .. block_start[i] +
        block_size[i] - 1`` (itself included).
    extra_ptr, extra_idx : CSR arrays
        Sorted neighbours of agent i outside its block are
        ``extra_idx[extra_ptr[i]:extra_ptr[i+1]]``.
    cluster_of : (N,) int array or None
    """

    n_agents: int
    block_start: np.ndarray
    block_size: np.ndarray
    extra_ptr: np.ndarray
    extra_idx: np.ndarray
    cluster_of: np.ndarray | None = None

    @property
    def degree(self) -> np.ndarray:
        return self.block_size + np.diff(self.extra_ptr)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbour indices of agent ``i`` (including ``i``)."""
        if not 0 <= i < self.n_agents:
            raise IndexError(f"agent index {i} out of range")
        block = np.arange(self.block_start[i], self.block_start[i] + self.block_size[i])
        extra = self.extra_idx[self.extra_ptr[i]:self.extra_ptr[i + 1]]
        return np.union1d(block, extra)

    @property
    def n_extra_edges(self) -> int:
        """Number of undirected edges not inside a block."""
        return int(self.extra_idx.size // 2)

    def to_dense(self) -> np.ndarray:
        """Boolean N x N adjacency matrix (diagonal set). Intended for small N."""
        n = self.n_agents
        adj = np.zeros((n, n), dtype=bool)
        for s, b in set(zip(self.block_start.tolist(), self.block_size.tolist())):
            adj[s:s + b, s:s + b] = True
        rows = np.repeat(np.arange(n), np.diff(self.extra_ptr))
        adj[rows, self.extra_idx] = True
        return adj

    def edges(self) -> np.ndarray:
        """All undirected edges ``(i, j)`` with ``i < j``, lexicographically sorted."""
        out = []
        for i in range(self.n_agents):
            nb = self.neighbors(i)
            nb = nb[nb > i]
            out.append(np.column_stack([np.full(nb.size, i), nb]))
        if not out:
            return np.empty((0, 2), dtype=np.int64)
        return np.concatenate(out).astype(np.int64)

    def same_as(self, other: "Network") -> bool:
        """Element-wise identical adjacency (ignores the storage layout)."""
        if self.n_agents != other.n_agents:
            return False
        if not np.array_equal(self.degree, other.degree):
            return False
        return all(np.array_equal(self.neighbors(i), other.neighbors(i))
                   for i in range(self.n_agents))


def _empty_extras(n: int):
    return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)


def make_complete(n_agents: int) -> Network:
    """Complete network on ``n_agents`` agents."""
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    ptr, idx = _empty_extras(n_agents)
    return Network(
        n_agents=n_agents,
        block_start=np.zeros(n_agents, dtype=np.int64),
        block_size=np.full(n_agents, n_agents, dtype=np.int64),
        extra_ptr=ptr,
        extra_idx=idx,
    )


def _csr_from_pairs(n: int, i: np.ndarray, j: np.ndarray):
    """Symmetric CSR neighbour lists from undirected pairs (i, j)."""
    rows = np.concatenate([i, j])
    cols = np.concatenate([j, i])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, rows + 1, 1)
    return np.cumsum(ptr), cols.astype(np.int64)


def make_clustered(n_agents: int, n_clusters: int, p_between: float,
                   rng_seed: int = 0, chunk_rows: int = 512) -> Network:
    """Equally sized complete clusters with random inter-cluster edges.

    Cluster ``c`` holds the contiguous agents ``c*N/k .. (c+1)*N/k - 1``. Each
    cross-cluster pair ``i < j`` is linked iff one uniform draw is below
    ``p_between``; pairs are visited in row-major order (``i`` ascending, then
    ``j`` ascending) so a seed fixes the network bit for bit.
    """
    if n_agents < 1 or n_clusters < 1:
        raise ValueError("n_agents and n_clusters must be >= 1")
    if n_agents % n_clusters:
        raise ValueError(f"{n_clusters} clusters do not divide {n_agents} agents")
    if not 0.0 <= p_between <= 1.0:
        raise ValueError("p_between must lie in [0, 1]")
    size = n_agents // n_clusters
    cluster_of = np.arange(n_agents) // size
    rng = np.random.Generator(np.random.Philox(rng_seed))

    pi, pj = [], []
    for c in range(n_clusters - 1):
        col0 = (c + 1) * size
        ncols = n_agents - col0
        for r0 in range(c * size, (c + 1) * size, chunk_rows):
            r1 = min(r0 + chunk_rows, (c + 1) * size)
            hit = rng.random((r1 - r0, ncols)) < p_between
            ii, jj = np.nonzero(hit)
            pi.append(ii + r0)
            pj.append(jj + col0)
    if pi:
        i = np.concatenate(pi).astype(np.int64)
        j = np.concatenate(pj).astype(np.int64)
    else:
        i = j = np.zeros(0, dtype=np.int64)
    ptr, idx = _csr_from_pairs(n_agents, i, j)
    return Network(
        n_agents=n_agents,
        block_start=cluster_of * size,
        block_size=np.full(n_agents, size, dtype=np.int64),
        extra_ptr=ptr,
        extra_idx=idx,
        cluster_of=cluster_of,
    )


def from_edges(n_agents: int, edges, cluster_of=None) -> Network:
    """Network from undirected 0-based edges; self-loops are added implicitly."""
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n_agents):
        raise ValueError("edge endpoint out of range")
    e = e[e[:, 0] != e[:, 1]]
    e = np.sort(e, axis=1)
    e = np.unique(e, axis=0)
    ptr, idx = _csr_from_pairs(n_agents, e[:, 0], e[:, 1])
    return Network(
        n_agents=n_agents,
        block_start=np.arange(n_agents, dtype=np.int64),
        block_size=np.ones(n_agents, dtype=np.int64),
        extra_ptr=ptr,
        extra_idx=idx,
        cluster_of=None if cluster_of is None else np.asarray(cluster_of),
    )


def save_edge_list(net: Network, path) -> None:
    """Write ``i j`` lines (1-based, ``i < j``, self-loops omitted)."""
    e = net.edges() + 1
    with open(path, "w") as fh:
        fh.write(f"# n_agents {net.n_agents}\n")
        for i, j in e:
            fh.write(f"{i} {j}\n")


def load_edge_list(path, n_agents: int | None = None) -> Network:
    """Read an edge list written by :func:`save_edge_list`.

    ``n_agents`` defaults to the ``# n_agents`` header, else the largest index.
    """
    header_n = None
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n_agents":
                header_n = int(parts[1])
            continue
        a, b = line.split()
        pairs.append((int(a) - 1, int(b) - 1))
    n = n_agents or header_n or (max(max(p) for p in pairs) + 1 if pairs else 0)
    return from_edges(n, pairs)
