import statistics

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peakmanip.errors import ConfigurationError
from peakmanip.graph import SocialNetwork, assign_uniform_random_probabilities, gen_watts_strogatz_spatial
from peakmanip.heuristics import (
    CATALOG,
    NeighborhoodSpec,
    ScoreCombiner,
    combine_and_rank,
    filter_passes,
    heuristic_ranking,
    neighborhood,
    node_scores,
    political_distance,
    political_score,
    resolve_name,
    run_named_heuristic,
    standardize,
    structural_score,
    weighted_pagerank,
)
from peakmanip.model import Electorate, GaussianNoise, ZeroNoise, random_electorate
from peakmanip.scenario import Scenario

from conftest import tiny_network

ONE_HOP = NeighborhoodSpec(1)
TWO_HOPS = NeighborhoodSpec(2)


def line_electorate(cands, voters, target):
    cands = np.asarray(cands, dtype=float)
    return Electorate(cands, voters, np.broadcast_to(cands, (len(voters), len(cands))), target)


def ws_scenario(seed, n=20, delta=0.3, noise=ZeroNoise()):
    rng = np.random.default_rng(seed)
    net = assign_uniform_random_probabilities(gen_watts_strogatz_spatial(n, rng), rng)
    return Scenario(random_electorate(n, 5, noise, rng), net, delta)


# -- structural and political scores ----------------------------------------------


def test_structural_examples():
    net = SocialNetwork.from_edges(6, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)])
    assert structural_score(net, 5, ONE_HOP) == 0
    assert structural_score(net, 0, ONE_HOP) == 4
    path = SocialNetwork.from_edges(3, [(0, 1), (1, 2)])
    assert structural_score(path, 0, TWO_HOPS) == 1.5


def test_structural_score_is_out_degree_at_one_hop(rng):
    for _ in range(30):
        net = tiny_network(rng)
        assert [structural_score(net, v, ONE_HOP) for v in range(net.n)] == net.out_degree.tolist()


def naive_best_paths(edges, v, hops):
    """Walk every path of length <= hops; keep shortest, then most probable."""
    best = {}
    paths = [(v, 1.0, (v,))]
    for h in range(1, hops + 1):
        nxt = []
        for node, w, seen in paths:
            for a, b, p in edges:
                if a == node and b not in seen:
                    nxt.append((b, w * p, seen + (b,)))
        for b, w, _ in nxt:
            if b == v:
                continue
            if b not in best or (best[b][0] == h and w > best[b][1]):
                best[b] = (h, w)
        paths = nxt
    return best


def test_political_fixture_by_path_walking():
    # v=0 backs the target; a=1 at distance 0.5, b=2 at distance 0.2
    e = line_electorate([0.0, -0.9], [0.05, 0.5, 0.2], 0)
    e = Electorate(e.candidates, e.voters, e.views, 0, votes=[0, 1, 1])
    net = SocialNetwork.from_edges(3, [(0, 1), (0, 2)], prob=[0.8, 0.5])
    d = political_distance(e, 0.3, predicted=np.array([0, 1, 1]))
    assert d.tolist() == pytest.approx([0.0, 0.5, 0.2])
    ok = filter_passes(d)
    got = political_score(net, 0, ONE_HOP, d, ok)
    oracle = sum(w / d[u] for u, (_, w) in naive_best_paths(net.edges(), 0, 1).items() if ok[u])
    assert got == pytest.approx(4.1) and oracle == pytest.approx(4.1)


def test_political_single_edge():
    net = SocialNetwork.from_edges(2, [(0, 1)], prob=0.5)
    d = np.array([0.0, 0.25])
    assert political_score(net, 0, ONE_HOP, d, filter_passes(d)) == 2.0


def test_political_score_is_zero_when_everyone_backs_the_target():
    e = line_electorate([0.0, 0.9], [0.1, -0.2, 0.3], 0)
    net = SocialNetwork.from_edges(3, [(0, 1), (0, 2), (1, 2)], prob=0.7)
    d = political_distance(e, 0.3)
    assert all(political_score(net, v, ONE_HOP, d, filter_passes(d)) == 0 for v in range(3))


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_neighbourhood_matches_path_walking(seed, hops):
    rng = np.random.default_rng(seed)
    net = tiny_network(rng, max_edges=14)
    for v in range(net.n):
        got = neighborhood(net, v, NeighborhoodSpec(hops))
        want = naive_best_paths(net.edges(), v, hops)
        assert got.keys() == want.keys()
        for u in got:
            assert got[u][0] == want[u][0]
            assert got[u][1] == pytest.approx(want[u][1])


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["standard", "manip_eq1", "manip_star"]))
def test_vectorised_scores_match_per_node(seed, variant):
    sc = ws_scenario(seed % 1000, n=25, noise=GaussianNoise(0, 0.08))
    d = political_distance(sc.electorate, sc.delta, variant)
    ok = filter_passes(d, "eq1" if variant == "manip_eq1" else "positive")
    for spec in (ONE_HOP, TWO_HOPS):
        s_g, s_p = node_scores(sc.network, spec, d, ok)
        assert s_g.tolist() == pytest.approx([structural_score(sc.network, v, spec) for v in range(25)])
        assert s_p.tolist() == pytest.approx([political_score(sc.network, v, spec, d, ok) for v in range(25)])


def test_neighbourhood_size_cap():
    net = SocialNetwork.from_edges(5, [(0, 3), (0, 1), (1, 2), (1, 4)])
    assert list(neighborhood(net, 0, NeighborhoodSpec(2, max_size=3))) == [1, 3, 2]


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        NeighborhoodSpec(0)
    with pytest.raises(ConfigurationError):
        ScoreCombiner("merge", 1.5)
    with pytest.raises(ConfigurationError):
        ScoreCombiner("sum")


# -- distances --------------------------------------------------------------------


def test_manip_star_distances():
    # target 0 at 0.0, rival at 0.9; voter 2 sits on the target yet votes elsewhere
    cands = np.array([0.0, 0.9])
    views = np.array([[0.0, 0.9], [0.0, 0.9], [0.8, 0.0]])
    e = Electorate(cands, [0.4, 0.8, 0.0], views, 0)
    pred = np.array([0, 1, 1])
    d = political_distance(e, 0.3, "manip_star", predicted=pred)
    assert d[0] == 0.0
    assert d[1] == pytest.approx(0.8 / 0.3)
    assert d[2] == np.inf
    d1 = political_distance(e, 0.3, "manip_eq1", predicted=pred)
    assert d1.tolist() == [0.0, np.inf, np.inf]


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_manip_star_is_at_least_one_off_the_manipulable_set(seed, delta):
    rng = np.random.default_rng(seed)
    e = random_electorate(30, 4, GaussianNoise(0, 0.08), rng)
    d = political_distance(e, delta, "manip_star")
    finite = np.isfinite(d) & (d > 0)
    assert np.all(d[finite] >= 1 - 1e-12)


def test_unknown_distance_and_filter():
    e = line_electorate([0.0, 0.5], [0.1], 0)
    with pytest.raises(ConfigurationError):
        political_distance(e, 0.3, "euclid")
    with pytest.raises(ConfigurationError):
        filter_passes([1.0], "odd")


# -- ranking ----------------------------------------------------------------------


def test_lex_pg_falls_back_on_structure():
    s_g = np.array([1.0, 3.0, 2.0, 3.0])
    assert combine_and_rank(s_g, np.ones(4), ScoreCombiner("lex_pg")) == [1, 3, 2, 0]


def test_merge_with_zero_alpha_is_structure_only():
    s_g = np.array([0.5, 4.0, 2.0, 4.0, 1.0])
    s_p = np.array([9.0, 0.0, 1.0, 2.0, 7.0])
    assert combine_and_rank(s_g, s_p, ScoreCombiner("merge", 0.0)) == [1, 3, 2, 4, 0]


def test_even_merge_against_hand_standardisation():
    s_g = [3.0, 1.0, 2.0, 2.0]
    s_p = [0.5, 4.0, 1.0, 0.0]
    sd_g, sd_p = statistics.pstdev(s_g), statistics.pstdev(s_p)
    merged = [0.5 * p / sd_p + 0.5 * g / sd_g for g, p in zip(s_g, s_p)]
    want = sorted(range(4), key=lambda v: (-merged[v], v))
    assert combine_and_rank(np.array(s_g), np.array(s_p), ScoreCombiner("merge", 0.5)) == want


def test_constant_score_standardises_to_zero():
    assert standardize([2.0, 2.0, 2.0]).tolist() == [0.0, 0.0, 0.0]


# -- weighted PageRank --------------------------------------------------------------


def test_cycle_with_uniform_weights_is_uniform():
    n = 7
    net = SocialNetwork.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    assert weighted_pagerank(net, np.ones(n)) == pytest.approx(np.full(n, 1 / n), abs=1e-12)


def test_zero_damping_is_pure_teleport(rng):
    net = tiny_network(rng)
    assert weighted_pagerank(net, rng.random(net.n), damping=0.0).tolist() == [1 / net.n] * net.n


def test_three_node_linear_solve():
    # node 0 splits its rank 2:1 between nodes 1 and 2, both of which return to 0
    net = SocialNetwork.from_edges(3, [(0, 1), (0, 2), (1, 0), (2, 0)])
    z = np.array([0.0, 2.0, 1.0])
    mpmath.mp.dps = 20
    s = mpmath.mpf("0.85")
    P = mpmath.matrix([[0, mpmath.mpf(2) / 3, mpmath.mpf(1) / 3], [1, 0, 0], [1, 0, 0]])
    A = mpmath.eye(3) - s * P.T
    b = mpmath.matrix([(1 - s) / 3] * 3)
    exact = [float(x) for x in mpmath.lu_solve(A, b)]
    assert weighted_pagerank(net, z).tolist() == pytest.approx(exact, abs=1e-8)


def test_dangling_rank_is_spread():
    net = SocialNetwork.from_edges(3, [(0, 1), (1, 2)])
    r = weighted_pagerank(net, np.ones(3))
    # explicit solve: node 2 leaks its rank uniformly
    s = 0.85
    P = np.array([[0, 1, 0], [0, 0, 1], [1 / 3, 1 / 3, 1 / 3]])
    exact = np.linalg.solve(np.eye(3) - s * P.T, np.full(3, (1 - s) / 3))
    assert r == pytest.approx(exact, abs=1e-9)


def test_probability_weighted_shares():
    net = SocialNetwork.from_edges(3, [(0, 1), (0, 2), (1, 0), (2, 0)], prob=[0.2, 0.8, 1.0, 1.0])
    plain = weighted_pagerank(net, np.ones(3))
    weighted = weighted_pagerank(net, np.ones(3), use_probability=True)
    assert plain[1] == pytest.approx(plain[2])
    assert weighted[2] > weighted[1]


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_pagerank_sums_to_one_and_ignores_scale(seed, scale):
    rng = np.random.default_rng(seed)
    net = tiny_network(rng)
    z = rng.random(net.n) * (rng.random(net.n) < 0.7)
    r = weighted_pagerank(net, z)
    assert r.min() >= 0 and abs(r.sum() - 1) < 1e-8
    assert weighted_pagerank(net, z * scale) == pytest.approx(r, abs=1e-10)


def test_pagerank_validation(rng):
    net = tiny_network(rng)
    with pytest.raises(ConfigurationError):
        weighted_pagerank(net, np.ones(net.n), damping=1.0)
    with pytest.raises(ConfigurationError):
        weighted_pagerank(net, -np.ones(net.n))


# -- catalogue ----------------------------------------------------------------------


def test_catalogue_names():
    assert len(CATALOG) == 11
    assert resolve_name("SPpagerank1.0_manipstar_pos") == "SPpagerank1.0_manip*_pos"
    with pytest.raises(ConfigurationError):
        resolve_name("SPmagic")


def test_outdeg_is_lexicographic():
    sc = ws_scenario(3)
    d = political_distance(sc.electorate, sc.delta)
    s_g, s_p = node_scores(sc.network, ONE_HOP, d, filter_passes(d))
    want = sorted(range(20), key=lambda v: (-s_g[v], -s_p[v], v))[:4]
    assert run_named_heuristic("SPoutdeg", sc, 4) == want


def test_empty_manipulable_set_falls_back_to_plain_pagerank():
    # every voter sits far from the target, out of reach of one message
    rng = np.random.default_rng(5)
    net = assign_uniform_random_probabilities(gen_watts_strogatz_spatial(20, rng), rng)
    e = line_electorate([-1.0, 1.0], rng.uniform(-1, -0.5, 20), 1)
    sc = Scenario(e, net, 0.1)
    plain = weighted_pagerank(net, np.ones(20))
    want = sorted(range(20), key=lambda v: (-plain[v], v))[:3]
    assert run_named_heuristic("SPpagerank1.0_manip_eq1", sc, 3) == want


def test_named_heuristics_are_deterministic():
    sc = ws_scenario(8, noise=GaussianNoise(0, 0.08))
    for name in CATALOG:
        first = run_named_heuristic(name, sc, 2)
        assert len(first) == 2
        assert all(run_named_heuristic(name, sc, 2) == first for _ in range(100 if name == "SPpagerank1.0_pos" else 3))


def test_ranking_is_a_permutation():
    sc = ws_scenario(9)
    for name in CATALOG:
        assert sorted(heuristic_ranking(name, sc)) == list(range(20))


def test_budget_must_be_positive():
    with pytest.raises(ConfigurationError):
        run_named_heuristic("SPoutdeg", ws_scenario(1), 0)


class CountingAdjacency(list):
    touched = 0

    def __getitem__(self, u):
        row = super().__getitem__(u)
        CountingAdjacency.touched += len(row)
        return row


class CountingNet:
    def __init__(self, net):
        self.n = net.n
        self.adjacency = CountingAdjacency(net.adjacency)


def test_one_hop_scoring_touches_each_edge_once():
    for n in (50, 200, 800):
        sc = ws_scenario(n, n=n)
        d = political_distance(sc.electorate, sc.delta)
        ok = filter_passes(d)
        counted = CountingNet(sc.network)
        CountingAdjacency.touched = 0
        for v in range(n):
            structural_score(counted, v, ONE_HOP)
            political_score(counted, v, ONE_HOP, d, ok)
        assert CountingAdjacency.touched <= 2 * (n + sc.network.n_edges)
