"""Fast seed-selection heuristics.

Two scores are computed per node ``v`` over a bounded out-neighbourhood
``N(v)``:

* structural ``s_G(v) = sum_{u in N(v)} 1 / hops(v, u)``;
* political ``s_P(v) = sum_{u in N(v) + {v}, F[d(u)] = 1} w(v, u) / d(u)``,
  where ``d`` measures how far voter ``u`` is from the target, ``F`` filters
  out useless voters and ``w(v, u)`` is the activation probability of the
  best shortest path from ``v`` to ``u`` (``w(v, v) = 1``).

Scores are either compared lexicographically or merged after dividing each
by its standard deviation. The PageRank family shares each node's rank among
its out-neighbours in proportion to the merged score of the receiver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ConfigurationError
from .greedy import manipulable_set
from .model import apply_influence, predicted_votes

DEGENERATE_GAIN = 1e-12


@dataclass(frozen=True)
class NeighborhoodSpec:
    max_hops: int = 1
    max_size: int | None = None

    def __post_init__(self):
        if self.max_hops < 1:
            raise ConfigurationError("max_hops must be at least 1")
        if self.max_size is not None and self.max_size < 1:
            raise ConfigurationError("max_size must be at least 1")


@dataclass(frozen=True)
class ScoreCombiner:
    """``"lex_gp"`` orders by (s_G, s_P), ``"lex_pg"`` by (s_P, s_G), ``"merge"``
    by ``alpha * s_P/std + (1 - alpha) * s_G/std``."""

    mode: str
    alpha: float = 0.5

    def __post_init__(self):
        if self.mode not in ("lex_gp", "lex_pg", "merge"):
            raise ConfigurationError(f"unknown combiner {self.mode!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("alpha must lie in [0, 1]")


# ---------------------------------------------------------------------------
# Neighbourhoods and scores
# ---------------------------------------------------------------------------


def neighborhood(net, v, spec):
    """BFS layers from ``v``: ``{u: (hops, best path probability)}`` without ``v``.

    Among shortest paths the one with the largest probability product is used.
    With ``max_size`` the BFS stops once that many nodes are collected, nodes
    of a layer taken in increasing id.
    """
    adj = net.adjacency
    found = {}
    layer = {v: 1.0}
    seen = {v}
    for hop in range(1, spec.max_hops + 1):
        nxt = {}
        for u in sorted(layer):
            wu = layer[u]
            for x, p, _ in adj[u]:
                if x in seen:
                    continue
                if wu * p > nxt.get(x, -1.0):
                    nxt[x] = wu * p
        if not nxt:
            break
        for x in sorted(nxt):
            if spec.max_size is not None and len(found) >= spec.max_size:
                return found
            found[x] = (hop, nxt[x])
        seen.update(nxt)
        layer = nxt
    return found


def structural_score(net, v, spec):
    return math.fsum(1.0 / hops for hops, _ in neighborhood(net, v, spec).values())


def political_distance(electorate, delta, variant="standard", predicted=None, mset=None):
    """Per-voter distance from the target as the manipulator estimates it.

    ``standard``: 0 for predicted target supporters, else the true distance.
    ``manip_eq1``: 1 on the manipulable set, 0 for supporters, inf otherwise.
    ``manip_star``: like ``manip_eq1`` but other voters get
    ``dist / (dist - dist_after_message)``, inf when the message does not
    bring them closer.
    """
    target = electorate.target
    if predicted is None:
        predicted = predicted_votes(electorate)
    x_target = electorate.candidates[target]
    dist = np.abs(electorate.voters - x_target)
    supporters = predicted == target
    if variant == "standard":
        return np.where(supporters, 0.0, dist)
    if mset is None:
        mset = manipulable_set(electorate, delta)
    out = np.full(electorate.n_voters, np.inf)
    if variant == "manip_star":
        after = np.abs(apply_influence(electorate.voters, x_target, delta) - x_target)
        gain = dist - after
        ok = gain > DEGENERATE_GAIN
        out[ok] = dist[ok] / gain[ok]
    elif variant != "manip_eq1":
        raise ConfigurationError(f"unknown distance variant {variant!r}")
    out[mset.members] = 1.0
    out[supporters] = 0.0
    return out


def filter_passes(d, kind="positive"):
    d = np.asarray(d, dtype=float)
    if kind == "positive":
        return d > 0
    if kind == "eq1":
        return d == 1
    raise ConfigurationError(f"unknown filter {kind!r}")


def political_score(net, v, spec, distance, passes):
    """``s_P(v)`` given per-voter distances and the filter mask."""
    terms = []
    if passes[v]:
        terms.append(1.0 / _checked(distance[v]))
    for u, (_, w) in neighborhood(net, v, spec).items():
        if passes[u]:
            terms.append(w / _checked(distance[u]))
    return math.fsum(terms)


def _checked(d):
    assert d > 0, "filter let through a zero political distance"
    return d


def node_scores(net, spec, distance, passes):
    """``(s_G, s_P)`` arrays over all nodes in one sweep."""
    s_g = np.zeros(net.n)
    s_p = np.zeros(net.n)
    inv = np.where(passes, 1.0 / np.where(passes, distance, 1.0), 0.0)
    if spec.max_hops == 1 and spec.max_size is None:
        # one pass over the edge list
        s_g[:] = net.out_degree
        np.add.at(s_p, net.src, net.prob * inv[net.dst])
        return s_g, s_p + inv
    for v in range(net.n):
        nb = neighborhood(net, v, spec)
        s_g[v] = math.fsum(1.0 / h for h, _ in nb.values())
        s_p[v] = math.fsum([inv[v]] + [w * inv[u] for u, (_, w) in nb.items()])
    return s_g, s_p


def standardize(scores):
    """Divide by the population standard deviation; a constant score maps to zeros."""
    scores = np.asarray(scores, dtype=float)
    sd = scores.std()
    if sd == 0:
        return np.zeros_like(scores)
    return scores / sd


def merged_score(s_g, s_p, alpha):
    return alpha * standardize(s_p) + (1 - alpha) * standardize(s_g)


def combine_and_rank(s_g, s_p, combiner):
    """Node ids from best to worst; ties by increasing id."""
    ids = np.arange(len(s_g))
    if combiner.mode == "lex_gp":
        keys = (ids, -np.asarray(s_p), -np.asarray(s_g))
    elif combiner.mode == "lex_pg":
        keys = (ids, -np.asarray(s_g), -np.asarray(s_p))
    else:
        keys = (ids, -merged_score(s_g, s_p, combiner.alpha))
    return [int(v) for v in np.lexsort(keys)]


# ---------------------------------------------------------------------------
# Weighted PageRank
# ---------------------------------------------------------------------------


def edge_shares(net, z, use_probability=False):
    """Fraction of the rank of ``src[e]`` pushed along edge ``e``.

    The share of ``v`` in the rank of ``u`` is proportional to ``z[v]``
    (times ``p(u, v)`` when ``use_probability``). A node whose neighbours all
    weigh zero shares uniformly.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ConfigurationError("PageRank weights must be non-negative")
    w = z[net.dst] * (net.prob if use_probability else 1.0)
    row_sum = np.bincount(net.src, weights=w, minlength=net.n)
    w = np.where(row_sum[net.src] > 0, w, 1.0)
    row_sum = np.bincount(net.src, weights=w, minlength=net.n)
    return w / row_sum[net.src] if net.n_edges else w


def weighted_transition(net, z, use_probability=False):
    """Row-stochastic matrix of :func:`edge_shares`; dangling rows stay empty."""
    data = edge_shares(net, z, use_probability)
    return sparse.csr_matrix((data, (net.src, net.dst)), shape=(net.n, net.n))


def weighted_pagerank(net, z, damping=0.85, tol=1e-10, max_iter=200, use_probability=False):
    """Power iteration; returns the rank vector (sums to 1).

    Each sweep pushes every node's rank along its out-edges. Rank of dangling
    nodes and the teleport share ``1 - damping`` are spread uniformly. Stops
    when the L1 change drops below ``tol``.
    """
    if not 0.0 <= damping < 1.0:
        raise ConfigurationError("damping must lie in [0, 1)")
    if tol <= 0:
        raise ConfigurationError("tol must be positive")
    n = net.n
    # column u of the transposed matrix holds the shares pushed by u
    push = sparse.csr_matrix((edge_shares(net, z, use_probability), (net.dst, net.src)), shape=(n, n))
    dangling = (net.out_degree == 0).astype(float)
    r = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = push @ r
        nxt *= damping
        nxt += (damping * (r @ dangling) + 1.0 - damping) / n
        delta = np.abs(nxt - r).sum()
        r = nxt
        if delta < tol:
            break
    return r


# ---------------------------------------------------------------------------
# Named catalogue
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeuristicConfig:
    hops: int
    combiner: ScoreCombiner
    distance: str = "standard"
    filter: str = "positive"
    pagerank: bool = False


CATALOG = {
    "SPoutdeg": HeuristicConfig(1, ScoreCombiner("lex_gp")),
    "SPoutdeg_rev": HeuristicConfig(1, ScoreCombiner("lex_pg")),
    "SPoutdeg_merge0.5": HeuristicConfig(1, ScoreCombiner("merge", 0.5)),
    "SPneig2": HeuristicConfig(2, ScoreCombiner("lex_gp")),
    "SPneig2_rev": HeuristicConfig(2, ScoreCombiner("lex_pg")),
    "SPneig2_merge0.5": HeuristicConfig(2, ScoreCombiner("merge", 0.5)),
    "SPpagerank1.0_pos": HeuristicConfig(1, ScoreCombiner("merge", 1.0), pagerank=True),
    "SPpagerank0.5_pos": HeuristicConfig(1, ScoreCombiner("merge", 0.5), pagerank=True),
    "SPpagerank1.0_hop2_pos": HeuristicConfig(2, ScoreCombiner("merge", 1.0), pagerank=True),
    "SPpagerank1.0_manip_eq1": HeuristicConfig(
        1, ScoreCombiner("merge", 1.0), distance="manip_eq1", filter="eq1", pagerank=True
    ),
    "SPpagerank1.0_manip*_pos": HeuristicConfig(
        1, ScoreCombiner("merge", 1.0), distance="manip_star", pagerank=True
    ),
}

ALIASES = {"SPpagerank1.0_manipstar_pos": "SPpagerank1.0_manip*_pos"}


def resolve_name(name):
    name = ALIASES.get(name, name)
    if name not in CATALOG:
        raise ConfigurationError(f"unknown heuristic {name!r}; known: {', '.join(CATALOG)}")
    return name


def heuristic_ranking(name, scenario, damping=0.85, use_probability=False):
    """All node ids ordered best first under the named heuristic."""
    cfg = CATALOG[resolve_name(name)]
    electorate, net = scenario.electorate, scenario.network
    spec = NeighborhoodSpec(cfg.hops)
    distance = political_distance(electorate, scenario.delta, cfg.distance)
    passes = filter_passes(distance, cfg.filter)
    s_g, s_p = node_scores(net, spec, distance, passes)
    if not cfg.pagerank:
        return combine_and_rank(s_g, s_p, cfg.combiner)
    z = merged_score(s_g, s_p, cfg.combiner.alpha)
    # negative standardised scores cannot occur (scores are non-negative)
    rank = weighted_pagerank(net, z, damping=damping, use_probability=use_probability)
    return [int(v) for v in np.lexsort((np.arange(net.n), -rank))]


def run_named_heuristic(name, scenario, budget, **kwargs):
    """Top ``budget`` nodes under the named heuristic."""
    if budget < 1:
        raise ConfigurationError("budget must be at least 1")
    return heuristic_ranking(name, scenario, **kwargs)[:budget]
