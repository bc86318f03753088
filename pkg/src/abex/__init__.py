"""Adaptive-binning exploration for contextual pricing.

A policy that learns a price surface over a covariate space by adaptively
refining a dyadic partition and exploring a shrinking price grid per bin,
plus baseline policies, simulation environments and a regret harness.
"""

from .baselines import (ClairvoyantPolicy, GreedyIlsPolicy, StaticUcbPolicy,
                        solve_normal_equations)
from .environments import (BoundaryPricingModel, LowerBoundModel,
                           NearestCenterPricingModel, PiecewiseRectangles,
                           StationaryUniform, WeightedPricingModel)
from .harness import (EpisodeTrace, RunConfig, cumulative_regret_series,
                      fit_loglog_slope, run_episode, run_sweep)
from .kernels import compiled_available, using_compiled
from .partition import (Bin, DecisionSet, PartitionTree, empirical_argmax,
                        make_decision_set, split_bin)
from .policy import AbePolicy, DecisionToken
from .schedule import Schedule, build_schedule

__version__ = "0.1.0"
