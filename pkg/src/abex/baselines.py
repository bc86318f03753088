"""Comparison policies: clairvoyant oracle, static-grid discretized UCB, and
greedy iterated least squares on a (possibly misspecified) linear demand
model."""

import math

import numpy as np


def solve_normal_equations(gram, moment, ridge=0.0):
    """Solve (gram + ridge*I) beta = moment for a small dense system."""
    gram = np.asarray(gram, dtype=np.float64)
    moment = np.asarray(moment, dtype=np.float64)
    if not (np.all(np.isfinite(gram)) and np.all(np.isfinite(moment))):
        raise ValueError("non-finite entries in normal equations")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    a = gram + ridge * np.eye(gram.shape[0])
    try:
        return np.linalg.solve(a, moment)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"normal-equation solve failed: {exc}")


class ClairvoyantPolicy:
    """Benchmark that knows the model and plays the optimal price."""

    observes = "reward"

    def __init__(self, model):
        self.model = model

    def decide(self, x):
        return self.model.clairvoyant_price(x), None

    def update(self, token, observation):
        pass


class StaticUcbPolicy:
    """Pre-binned covariate grid with an independent UCB1 learner per cell.

    The grid has ceil(T^(1/(d+4))) bins per dimension and each cell holds
    ceil(ln(T) * T^(1/(d+4))) equally spaced arms on [0, 1] (endpoints
    included), matching the resolution the adaptive policy reaches at its
    maximal level.
    """

    observes = "reward"

    def __init__(self, T, d, ucb_c=2.0):
        self.d = d
        self.bins_per_dim = int(math.ceil(T ** (1.0 / (d + 4))))
        self.arm_count = int(math.ceil(math.log(T) * T ** (1.0 / (d + 4))))
        self.ucb_c = ucb_c
        n_cells = self.bins_per_dim ** d
        self.counts = np.zeros((n_cells, self.arm_count), dtype=np.int64)
        self.means = np.zeros((n_cells, self.arm_count), dtype=np.float64)
        self.pulls = np.zeros(n_cells, dtype=np.int64)
        self.arms = np.linspace(0.0, 1.0, self.arm_count)

    def cell_index(self, x):
        m = self.bins_per_dim
        idx = 0
        for xi in x:
            idx = idx * m + min(int(xi * m), m - 1)
        return idx

    def decide(self, x):
        cell = self.cell_index(x)
        counts = self.counts[cell]
        unpulled = np.flatnonzero(counts == 0)
        if unpulled.size:
            arm = int(unpulled[0])
        else:
            bonus = np.sqrt(self.ucb_c * math.log(self.pulls[cell]) / counts)
            arm = int(np.argmax(self.means[cell] + bonus))
        return self.arms[arm], (cell, arm)

    def update(self, token, reward):
        cell, arm = token
        c = self.counts[cell, arm]
        self.means[cell, arm] = (c * self.means[cell, arm] + reward) / (c + 1)
        self.counts[cell, arm] = c + 1
        self.pulls[cell] += 1


class GreedyIlsPolicy:
    """Greedy iterated least squares on demand(x, p) = a - b*p + c . x.

    Observes the purchase indicator, refits the linear model every period by
    ridge-stabilized normal equations, and prices myopically at the fitted
    model's optimum.  The first `warmup` prices are uniform random; a failed
    solve falls back to a random price for that period.
    """

    observes = "demand"

    def __init__(self, d, rng, warmup=10, ridge=1e-8):
        self.d = d
        self.rng = rng
        self.warmup = warmup
        self.ridge = ridge
        k = d + 2  # regressors (1, p, x_1 .. x_d)
        self.gram = np.zeros((k, k))
        self.moment = np.zeros(k)
        self.n_obs = 0
        self.solve_failures = 0

    def decide(self, x):
        if self.n_obs < self.warmup:
            return float(self.rng.random()), None
        try:
            beta = solve_normal_equations(self.gram, self.moment, self.ridge)
        except np.linalg.LinAlgError:
            self.solve_failures += 1
            return float(self.rng.random()), None
        a, b = beta[0], -beta[1]
        intercept = a + float(np.dot(beta[2:], x))
        if b <= 0:
            return 1.0, None  # fitted revenue increasing in price
        return float(np.clip(intercept / (2.0 * b), 0.0, 1.0)), None

    def update_observation(self, x, p, outcome):
        z = np.concatenate(([1.0, p], x))
        self.gram += np.outer(z, z)
        self.moment += z * outcome
        self.n_obs += 1

    def update(self, token, observation):
        x, p, outcome = observation
        self.update_observation(x, p, outcome)
