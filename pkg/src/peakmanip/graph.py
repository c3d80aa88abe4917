"""Directed probabilistic social networks.

A :class:`SocialNetwork` stores its edges as parallel ``src``/``dst``/``prob``
arrays sorted by ``(src, dst)``; node ids ``0..n-1`` double as voter ids.
Generators build the topology with every probability set to 1; the
``assign_*`` helpers then draw activation probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DataError, ParseError


@dataclass(frozen=True, eq=False)
class SocialNetwork:
    n: int
    src: np.ndarray
    dst: np.ndarray
    prob: np.ndarray
    coords: np.ndarray | None = field(default=None)

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64).ravel()
        dst = np.asarray(self.dst, dtype=np.int64).ravel()
        prob = np.asarray(self.prob, dtype=float).ravel()
        if not src.size == dst.size == prob.size:
            raise DataError("src, dst and prob must have equal length")
        if src.size:
            if min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= self.n:
                raise DataError("edge endpoint outside 0..n-1")
            if np.any(src == dst):
                raise DataError("self-loops are not allowed")
            if np.any((prob < 0) | (prob > 1)) or np.isnan(prob).any():
                raise DataError("edge probabilities must lie in [0, 1]")
        order = np.lexsort((dst, src))
        src, dst, prob = src[order], dst[order], prob[order]
        if src.size > 1 and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
            raise DataError("duplicate edge")
        for name, arr in (("src", src), ("dst", dst), ("prob", prob)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_edges(cls, n, edges, prob=1.0, coords=None):
        """Build from ``(u, v)`` pairs; ``prob`` is a scalar or per-edge sequence."""
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        prob = np.broadcast_to(np.asarray(prob, dtype=float), (len(edges),))
        return cls(n, edges[:, 0], edges[:, 1], prob, coords)

    @property
    def n_edges(self):
        return int(self.src.size)

    @cached_property
    def indptr(self):
        return np.searchsorted(self.src, np.arange(self.n + 1))

    @cached_property
    def out_degree(self):
        return np.diff(self.indptr)

    @cached_property
    def adjacency(self):
        """Per node, the list of ``(neighbor, probability, edge index)`` triples."""
        adj = [[] for _ in range(self.n)]
        for e, (u, v, p) in enumerate(zip(self.src.tolist(), self.dst.tolist(), self.prob.tolist())):
            adj[u].append((v, p, e))
        return adj

    @cached_property
    def successors(self):
        return [[v for v, _, _ in row] for row in self.adjacency]

    def edge_prob(self, u, v):
        lo, hi = self.indptr[u], self.indptr[u + 1]
        k = lo + np.searchsorted(self.dst[lo:hi], v)
        if k < hi and self.dst[k] == v:
            return float(self.prob[k])
        raise KeyError((u, v))

    def with_probabilities(self, prob):
        return SocialNetwork(self.n, self.src, self.dst, prob, self.coords)

    def edges(self):
        return list(zip(self.src.tolist(), self.dst.tolist(), self.prob.tolist()))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def gen_watts_strogatz_spatial(
    n, rng, radius=0.13, weak_ties_k=2, exponent_q=2.0, density=20.0, directed_weak_ties=False
):
    """Spatial small world: uniform nodes in a square of side ``sqrt(n/density)``.

    Every pair within ``radius`` gets mutual strong ties. Each node then draws
    ``weak_ties_k`` targets among its non-neighbours with probability
    proportional to ``distance**-exponent_q``; a repeated draw is dropped.
    Weak ties are mutual like every other tie of the model unless
    ``directed_weak_ties`` is set.
    """
    if n < 2:
        raise ConfigurationError("need at least two nodes")
    side = np.sqrt(n / density)
    coords = rng.uniform(0.0, side, (n, 2))
    pairs = cKDTree(coords).query_pairs(radius, output_type="ndarray")
    strong = np.concatenate([pairs, pairs[:, ::-1]]) if len(pairs) else np.empty((0, 2), np.int64)

    strong_adj = sparse.csr_matrix(
        (np.ones(len(strong)), (strong[:, 0], strong[:, 1])), shape=(n, n)
    )
    weak = []
    chunk = max(1, min(n, 2_000_000 // n))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(n, start + chunk))
        diff = coords[rows, None, :] - coords[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        with np.errstate(divide="ignore"):
            w = dist ** (-exponent_q)
        w[np.arange(rows.size), rows] = 0.0
        w[strong_adj[rows].nonzero()] = 0.0
        w[~np.isfinite(w)] = 0.0
        cdf = np.cumsum(w, axis=1)
        total = cdf[:, -1]
        draws = rng.random((rows.size, weak_ties_k)) * total[:, None]
        for i, u in enumerate(rows):
            if total[i] <= 0:
                continue
            targets = np.searchsorted(cdf[i], draws[i], side="right")
            for v in dict.fromkeys(targets.tolist()):
                weak.append((u, v))
    weak = np.asarray(weak, dtype=np.int64).reshape(-1, 2)
    if not directed_weak_ties:
        weak = np.concatenate([weak, weak[:, ::-1]])
    edges = np.unique(np.concatenate([strong, weak]), axis=0)
    return SocialNetwork(n, edges[:, 0], edges[:, 1], np.ones(len(edges)), coords)


def gen_preferential_attachment(n, p_pref, rng):
    """Growing tree: each new node links (mutually) to one earlier node.

    With probability ``p_pref`` the partner is drawn proportionally to degree,
    otherwise uniformly among existing nodes.
    """
    if n < 2:
        raise ConfigurationError("need at least two nodes")
    if not 0.0 <= p_pref <= 1.0:
        raise ConfigurationError("p_pref must lie in [0, 1]")
    endpoints = [0, 1]  # node listed once per incident edge
    edges = [(0, 1)]
    for t in range(2, n):
        if rng.random() < p_pref:
            u = endpoints[rng.integers(len(endpoints))]
        else:
            u = int(rng.integers(t))
        edges.append((u, t))
        endpoints += [u, t]
    edges = np.asarray(edges, dtype=np.int64)
    both = np.concatenate([edges, edges[:, ::-1]])
    return SocialNetwork(n, both[:, 0], both[:, 1], np.ones(len(both)))


def assign_uniform_random_probabilities(net, rng):
    return net.with_probabilities(rng.random(net.n_edges))


def assign_edge_probabilities_by_community(net, partition, rng, intra_range=(0.6, 1.0), inter_range=(0.0, 0.4)):
    """Uniform probabilities from ``intra_range`` inside a community, else ``inter_range``.

    Each directed edge gets its own draw.
    """
    labels = partition.labels if isinstance(partition, Partition) else np.asarray(partition)
    if labels.size != net.n:
        raise DataError(f"partition covers {labels.size} nodes, network has {net.n}")
    same = labels[net.src] == labels[net.dst]
    lo = np.where(same, intra_range[0], inter_range[0])
    hi = np.where(same, intra_range[1], inter_range[1])
    return net.with_probabilities(rng.uniform(lo, hi))


# ---------------------------------------------------------------------------
# Partitions and file I/O
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Partition:
    labels: np.ndarray

    @property
    def n_communities(self):
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def sizes(self):
        return np.bincount(self.labels, minlength=self.n_communities)

    def members(self, community):
        return np.flatnonzero(self.labels == community)


def _read_rows(path):
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if text:
                yield lineno, text.split(), line
            elif line.lstrip().startswith("#"):
                yield lineno, None, line


def _int(tok, path, lineno):
    try:
        val = int(tok)
    except ValueError:
        raise ParseError(f"bad node id {tok!r}", path, lineno) from None
    if val < 0:
        raise ParseError(f"negative node id {val}", path, lineno)
    return val


def load_edge_list(path, n=None, directed=None):
    """Read ``u v [p]`` lines.

    Undirected files (the default) yield both directed edges per line. A
    ``# directed`` header switches to one edge per line and ``# nodes N``
    fixes the node count. Without a count, ``n`` is one past the largest id;
    with one, larger ids are rejected.
    """
    rows = []
    header_directed = False
    for lineno, toks, raw in _read_rows(path):
        if toks is None:
            words = raw.strip("# \t\n").split()
            if words[:1] == ["directed"]:
                header_directed = True
            elif words[:1] == ["nodes"] and len(words) == 2 and n is None:
                n = _int(words[1], path, lineno)
            continue
        if len(toks) not in (2, 3):
            raise ParseError("expected 'u v [p]'", path, lineno)
        u, v = _int(toks[0], path, lineno), _int(toks[1], path, lineno)
        p = 1.0
        if len(toks) == 3:
            try:
                p = float(toks[2])
            except ValueError:
                raise ParseError(f"bad probability {toks[2]!r}", path, lineno) from None
            if not 0.0 <= p <= 1.0:
                raise ParseError(f"probability {p} outside [0, 1]", path, lineno)
        if u == v:
            raise ParseError("self-loop", path, lineno)
        rows.append((lineno, u, v, p))
    if directed is None:
        directed = header_directed
    if n is None:
        n = 1 + max((max(u, v) for _, u, v, _ in rows), default=-1)
    seen = {}
    for lineno, u, v, p in rows:
        if u >= n or v >= n:
            raise ParseError(f"node id {max(u, v)} outside 0..{n - 1}", path, lineno)
        seen.setdefault((u, v), p)
        if not directed:
            seen.setdefault((v, u), p)
    edges = np.asarray(list(seen), dtype=np.int64).reshape(-1, 2)
    return SocialNetwork(n, edges[:, 0], edges[:, 1], list(seen.values()))


def save_edge_list(net, path):
    """Write every directed edge with its probability; reload with :func:`load_edge_list`."""
    with open(path, "w") as fh:
        fh.write(f"# nodes {net.n}\n# directed\n")
        for u, v, p in net.edges():
            fh.write(f"{u} {v} {p!r}\n")


def load_partition(path, n=None):
    """Read ``node community`` lines; labels are renumbered densely in sorted order."""
    assigned = {}
    for lineno, toks, _ in _read_rows(path):
        if toks is None:
            continue
        if len(toks) != 2:
            raise ParseError("expected 'node community'", path, lineno)
        node = _int(toks[0], path, lineno)
        if n is not None and node >= n:
            raise ParseError(f"node id {node} outside 0..{n - 1}", path, lineno)
        if node in assigned:
            raise ParseError(f"node {node} listed twice", path, lineno)
        assigned[node] = toks[1]
    size = n if n is not None else 1 + max(assigned, default=-1)
    missing = [v for v in range(size) if v not in assigned]
    if missing:
        raise DataError(f"{Path(path)}: partition misses {len(missing)} nodes (first: {missing[0]})")
    raw = [assigned[v] for v in range(size)]
    keys = sorted(set(raw), key=lambda s: (0, int(s)) if s.lstrip("-").isdigit() else (1, s))
    dense = {k: i for i, k in enumerate(keys)}
    return Partition(np.array([dense[k] for k in raw], dtype=np.int64))


def save_partition(partition, path):
    with open(path, "w") as fh:
        for node, label in enumerate(partition.labels.tolist()):
            fh.write(f"{node} {label}\n")
