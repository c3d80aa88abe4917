"""Independent Cascade spreading and its live-graph counterpart.

``simulate_ic`` runs the cascade step by step. The live-graph helpers give an
exact route to the same distribution: keep each edge independently with its
probability and take forward reachability from the seeds. On small graphs
:class:`LiveGraphTable` enumerates all ``2**|E|`` live graphs and evaluates
expectations exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError

MAX_ENUMERATED_EDGES = 20


@dataclass(frozen=True)
class ActivationResult:
    activated: frozenset
    rounds: int
    edges_tested: int


def simulate_ic(net, seeds, rng):
    """One Independent Cascade run from ``seeds``.

    Every newly active node gets a single chance to activate each inactive
    out-neighbour. The frontier is processed in increasing node id so a fixed
    seed reproduces the run exactly.
    """
    adj = net.adjacency
    coins = rng.random(net.n_edges).tolist()
    active = bytearray(net.n)
    frontier = sorted(set(int(s) for s in seeds))
    for s in frontier:
        active[s] = 1
    activated = list(frontier)
    rounds = tested = 0
    while frontier:
        fresh = []
        for u in frontier:
            for v, p, e in adj[u]:
                if not active[v]:
                    tested += 1
                    if coins[e] < p:
                        active[v] = 1
                        fresh.append(v)
        if not fresh:
            break
        rounds += 1
        activated += fresh
        frontier = sorted(fresh)
    return ActivationResult(frozenset(activated), rounds, tested)


@dataclass(frozen=True, eq=False)
class LiveGraph:
    """Realised subgraph: ``kept[e]`` says whether edge ``e`` of ``net`` survived."""

    net: object
    kept: np.ndarray

    def edges(self):
        idx = np.flatnonzero(self.kept)
        return list(zip(self.net.src[idx].tolist(), self.net.dst[idx].tolist()))


def sample_live_graph(net, rng):
    return LiveGraph(net, rng.random(net.n_edges) < net.prob)


def reachable(live, seeds):
    """Nodes reachable from ``seeds`` along kept edges (seeds included)."""
    adj = live.net.adjacency
    kept = live.kept
    seen = set(int(s) for s in seeds)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for v, _, e in adj[u]:
            if kept[e] and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _all_masks(n_edges):
    codes = np.arange(2**n_edges, dtype=np.int64)
    return (codes[:, None] >> np.arange(n_edges)) & 1 == 1


def _mask_probabilities(net, masks):
    p = net.prob
    return np.prod(np.where(masks, p, 1.0 - p), axis=1)


def enumerate_live_graphs(net, max_edges=MAX_ENUMERATED_EDGES):
    """All live graphs of ``net`` with their probabilities."""
    if net.n_edges > max_edges:
        raise CapabilityError(f"{net.n_edges} edges exceed the enumeration limit of {max_edges}")
    masks = _all_masks(net.n_edges)
    probs = _mask_probabilities(net, masks)
    return [(LiveGraph(net, m), float(q)) for m, q in zip(masks, probs)]


class LiveGraphTable:
    """Exhaustive live-graph table with per-node reachability bitmasks.

    ``reach[g, v]`` is the bitmask of nodes reachable from ``v`` in live graph
    ``g``; the reach of a seed set is the OR over its members.
    """

    def __init__(self, net, max_edges=MAX_ENUMERATED_EDGES):
        if net.n_edges > max_edges:
            raise CapabilityError(f"{net.n_edges} edges exceed the enumeration limit of {max_edges}")
        if net.n > 62:
            raise CapabilityError("bitmask reachability supports at most 62 nodes")
        self.net = net
        self.masks = _all_masks(net.n_edges)
        self.probs = _mask_probabilities(net, self.masks)
        reach = np.tile(np.left_shift(1, np.arange(net.n, dtype=np.int64)), (len(self.masks), 1))
        src, dst = net.src.tolist(), net.dst.tolist()
        changed = True
        while changed:
            changed = False
            for e, (u, v) in enumerate(zip(src, dst)):
                grown = reach[:, u] | np.where(self.masks[:, e], reach[:, v], 0)
                if np.any(grown != reach[:, u]):
                    reach[:, u] = grown
                    changed = True
        self.reach = reach
        self._bits = np.left_shift(1, np.arange(net.n, dtype=np.int64))

    def __len__(self):
        return len(self.probs)

    def reach_masks(self, seeds):
        out = np.zeros(len(self.probs), dtype=np.int64)
        for s in seeds:
            out |= self.reach[:, int(s)]
        return out

    def members(self, mask):
        return [v for v in range(self.net.n) if mask >> v & 1]

    def distribution(self, seeds):
        """Map from reachable set (frozenset) to its exact probability."""
        out = {}
        for mask, q in zip(self.reach_masks(seeds).tolist(), self.probs.tolist()):
            out.setdefault(mask, []).append(q)
        return {frozenset(self.members(m)): math.fsum(qs) for m, qs in out.items()}

    def expectation(self, seeds, value_of):
        """Exact ``E[value_of(reached set)]``; ``value_of`` takes a node-id list."""
        masks = self.reach_masks(seeds)
        uniq, inverse = np.unique(masks, return_inverse=True)
        values = np.array([value_of(self.members(int(m))) for m in uniq], dtype=float)
        return math.fsum((self.probs * values[inverse]).tolist())

    def weighted_reach(self, seeds, weights):
        """Exact expected total weight of reached nodes."""
        masks = self.reach_masks(seeds)
        hit = (masks[:, None] & self._bits) != 0
        return math.fsum((self.probs * (hit @ np.asarray(weights, dtype=float))).tolist())
