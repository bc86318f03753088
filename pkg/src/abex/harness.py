"""Episode execution, regret accounting, multi-replication sweeps and
log-log slope fits.

Seeding contract: the stream for replicate r of a run with master seed s is
numpy's PCG64 seeded by SeedSequence(s, spawn_key=(r,)); inside an episode
that sequence is spawned into (covariate, reward, policy) child streams.
SeedSequence spawning guarantees non-overlapping streams, and the whole
scheme depends only on (s, r), never on execution order.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .baselines import ClairvoyantPolicy, GreedyIlsPolicy, StaticUcbPolicy
from .environments import (BoundaryPricingModel, LowerBoundModel,
                           NearestCenterPricingModel, PiecewiseRectangles,
                           StationaryUniform, WeightedPricingModel)
from .policy import AbePolicy
from .schedule import build_schedule

SCENARIOS = ("1", "2", "3", "4", "5", "6", "lower_bound")
POLICIES = ("abe", "clairvoyant", "static_ucb", "greedy_ils")

RNG_NAME = "numpy PCG64, SeedSequence(master_seed, spawn_key=(replicate,))"


@dataclass
class RunConfig:
    scenario: str = "1"
    policy: str = "abe"
    T_list: tuple = (10_000, 30_000, 100_000, 300_000, 1_000_000)
    d: int = 2
    seed: int = 42
    replications: int = 5
    sigma: float = 0.125
    m2: float = 0.5
    c_delta: float = 1.0
    n_checkpoints: int = 20
    lb_m: int = 4
    ucb_c: float = 2.0
    workers: int = 1
    out: str = "results.csv"
    surface_out: str = ""
    surface_resolution: int = 50

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if list(self.T_list) != sorted(set(self.T_list)):
            raise ValueError("T values must be strictly increasing")
        if any(T < 100 for T in self.T_list):
            raise ValueError("every T must be at least 100")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.scenario != "lower_bound" and self.d != 2:
            raise ValueError("pricing scenarios are defined for d = 2")
        return self


@dataclass
class EpisodeTrace:
    checkpoints: np.ndarray     # period indices, last one equals T
    cum_regret: np.ndarray      # cumulative regret at each checkpoint
    runtime: float
    policy_state: object = None  # trained policy (kept for surface export)


def checkpoint_grid(T, n_checkpoints=20):
    """Geometrically spaced checkpoint periods, always ending at T."""
    pts = np.unique(np.round(np.geomspace(10, T, n_checkpoints)).astype(np.int64))
    pts = pts[(pts >= 1) & (pts <= T)]
    if pts[-1] != T:
        pts = np.append(pts, T)
    return pts


def episode_seed(master_seed, replicate):
    return np.random.SeedSequence(master_seed, spawn_key=(replicate,))


def make_model(cfg, rng_model):
    scenario = cfg.scenario
    if scenario in ("1", "2", "5", "6"):
        return WeightedPricingModel()
    if scenario == "3":
        return NearestCenterPricingModel()
    if scenario == "4":
        return BoundaryPricingModel()
    # Hard-instance cells: bits drawn once per episode from a dedicated stream.
    w = rng_model.integers(0, 2, size=cfg.lb_m ** cfg.d)
    return LowerBoundModel(cfg.lb_m, w, d=cfg.d)


def make_process(cfg, T):
    if cfg.scenario == "2":
        return PiecewiseRectangles(T)
    return StationaryUniform(cfg.d)


def make_policy(cfg, T, rng_policy):
    if cfg.policy == "abe":
        return AbePolicy(build_schedule(T, cfg.d, cfg.sigma, cfg.m2, cfg.c_delta))
    if cfg.policy == "static_ucb":
        return StaticUcbPolicy(T, cfg.d, cfg.ucb_c)
    if cfg.policy == "greedy_ils":
        return GreedyIlsPolicy(cfg.d, rng_policy)
    return None  # clairvoyant needs the model; built in run_episode


def run_episode(cfg, T, replicate, keep_state=False):
    """Run one seeded episode and return its checkpointed regret trace.

    Regret accumulates the exact mean gap f*(X_t) - f(X_t, pi_t), never the
    sampled rewards; the policy sees only covariates and sampled outcomes.
    """
    start = time.perf_counter()
    ss = episode_seed(cfg.seed, replicate)
    ss_x, ss_z, ss_policy, ss_model = ss.spawn(4)
    rng_x = np.random.default_rng(ss_x)
    rng_z = np.random.default_rng(ss_z)
    rng_policy = np.random.default_rng(ss_policy)
    rng_model = np.random.default_rng(ss_model)

    model = make_model(cfg, rng_model)
    process = make_process(cfg, T)
    checkpoints = checkpoint_grid(T, cfg.n_checkpoints)

    X = process.generate(T, rng_x)
    if model.draw_kind == "uniform":
        draws = rng_z.random(T)
    else:
        draws = rng_z.standard_normal(T)

    if cfg.policy == "abe":
        schedule = build_schedule(T, cfg.d, cfg.sigma, cfg.m2, cfg.c_delta)
        cum, policy = kernels.run_abe_episode(schedule, model, X, draws,
                                              checkpoints,
                                              keep_state=keep_state)
        return EpisodeTrace(checkpoints, cum, time.perf_counter() - start,
                            policy if keep_state else None)

    if cfg.policy == "clairvoyant":
        policy = ClairvoyantPolicy(model)
    else:
        policy = make_policy(cfg, T, rng_policy)

    cum = np.empty(len(checkpoints))
    regret = 0.0
    ci = 0
    wants_demand = policy.observes == "demand"
    for t in range(T):
        x = X[t]
        price, token = policy.decide(x)
        if wants_demand:
            outcome = model.outcome_given_draw(x, price, draws[t])
            policy.update(token, (x, price, outcome))
        else:
            policy.update(token, model.reward_given_draw(x, price, draws[t]))
        regret += model.clairvoyant_value(x) - model.mean_reward(x, price)
        if ci < len(checkpoints) and t + 1 == checkpoints[ci]:
            cum[ci] = regret
            ci += 1
    return EpisodeTrace(checkpoints, cum, time.perf_counter() - start,
                        policy if keep_state else None)


def cumulative_regret_series(trace):
    """Checkpointed (t, cumulative regret) pairs for one episode."""
    return list(zip(trace.checkpoints.tolist(), trace.cum_regret.tolist()))


def fit_loglog_slope(points):
    """OLS of ln(regret) on ln(T); returns (slope, intercept, max residual)."""
    points = list(points)
    if len(points) < 3:
        raise ValueError("need at least 3 points for a slope fit")
    T_vals = np.array([p[0] for p in points], dtype=np.float64)
    r_vals = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(r_vals <= 0):
        raise ValueError("regret values must be strictly positive")
    A = np.vstack([np.log(T_vals), np.ones(len(points))]).T
    coef, *_ = np.linalg.lstsq(A, np.log(r_vals), rcond=None)
    resid = np.log(r_vals) - A @ coef
    return float(coef[0]), float(coef[1]), float(np.max(np.abs(resid)))


def _episode_job(args):
    cfg, T, replicate = args
    trace = run_episode(cfg, T, replicate)
    return (T, replicate), trace


@dataclass
class SweepResult:
    rows: list                 # OutputRow tuples, sorted
    mean_final: dict           # T -> mean cumulative regret at T
    slope: object              # float, or a string explaining its absence
    wall_time: float


def run_sweep(cfg):
    """Run every (T, replicate) episode of the config and aggregate.

    Episodes are independent; with cfg.workers > 1 they run in a process
    pool.  Results are keyed and sorted, so the output is identical for any
    worker count.
    """
    cfg.validate()
    start = time.perf_counter()
    jobs = [(cfg, T, r) for T in cfg.T_list for r in range(cfg.replications)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = dict(pool.map(_episode_job, jobs))
    else:
        results = dict(map(_episode_job, jobs))

    rows = []
    finals = {T: [] for T in cfg.T_list}
    for T in cfg.T_list:
        for r in range(cfg.replications):
            trace = results[(T, r)]
            finals[T].append(trace.cum_regret[-1])
            for t, regret in cumulative_regret_series(trace):
                rows.append((cfg.scenario, cfg.policy, T, cfg.d, cfg.seed,
                             r, t, regret))
    rows.sort(key=lambda row: (row[0], row[1], row[2], row[5], row[6]))
    mean_final = {T: float(np.mean(vals)) for T, vals in finals.items()}

    points = [(T, m) for T, m in mean_final.items() if m > 0]
    if len(points) < 3:
        slope = "insufficient points"
        if all(m == 0 for m in mean_final.values()):
            slope = "undefined (zero regret)"
    else:
        slope = fit_loglog_slope(points)[0]
    return SweepResult(rows, mean_final, slope, time.perf_counter() - start)
