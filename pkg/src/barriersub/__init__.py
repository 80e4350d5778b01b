"""Barrier-function local search for monotone submodular maximization
under a k-matchoid and several knapsack constraints."""

from .barrier import barrier_greedy, barrier_greedy_pp, barrier_heuristic
from .baselines import density_greedy, fast_threshold, greedy
from .constraints import (
    FreeMatroid,
    KnapsackSet,
    MatchoidConstraint,
    PartitionMatroid,
    UniformMatroid,
    exchange_candidate,
    normalize,
)
from .core import CountingOracle, ModularObjective, RunReport, SubmodularOracle
from .instance import ProblemInstance
from .objectives import (
    ConcaveOverModularObjective,
    FacilityLocationObjective,
    LogDetObjective,
    VertexCoverObjective,
)
from .verify import brute_force_opt, random_instance

__version__ = "0.1.0"
