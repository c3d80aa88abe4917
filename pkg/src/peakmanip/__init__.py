"""Election manipulation through information diffusion on social networks."""

from .campaign import CampaignConfig, RoundReport, budget_for, run_campaign, run_round
from .diffusion import LiveGraphTable, enumerate_live_graphs, reachable, sample_live_graph, simulate_ic
from .errors import CapabilityError, ConfigurationError, DataError, ManipError, ParseError
from .estimation import estimate_dmov, estimate_sigma_w, sims_for_dmov, sims_for_sigma
from .graph import (
    Partition,
    SocialNetwork,
    assign_edge_probabilities_by_community,
    assign_uniform_random_probabilities,
    gen_preferential_attachment,
    gen_watts_strogatz_spatial,
    load_edge_list,
    load_partition,
)
from .greedy import brute_force_optimal, greedy_apx, greedy_seed_selection, manipulable_set, x_of_s
from .heuristics import CATALOG, run_named_heuristic, weighted_pagerank
from .model import Electorate, apply_influence, margin_of_victory, parse_noise, random_electorate
from .scenario import Scenario

__version__ = "0.1.0"
