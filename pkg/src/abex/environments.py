"""Reward models and covariate processes for the pricing experiments.

The pricing models share three community centers at (0.2, 0.2), (0.2, 0.8)
and (0.8, 0.2) with per-center linear demand curves; a customer's purchase
probability blends the centers by the reciprocal of the l1 distance to each
(or copies the closest one, or uses degenerate center curves, depending on
the model).  The localized quadratic model is a hard instance built from a
bit-vector over an M x ... x M grid of cells.
"""

import math

import numpy as np

CENTERS = ((0.2, 0.2), (0.2, 0.8), (0.8, 0.2))
# Demand at center i is 1 - COEF[i] * p.
CENTER_COEF = (1.0, 2.0, 0.5)


def _l1_distances(x):
    return [abs(x[0] - c[0]) + abs(x[1] - c[1]) for c in CENTERS]


def _weights(dists):
    """Reciprocal-distance weights; None signals x sits on center i exactly."""
    for i, di in enumerate(dists):
        if di == 0.0:
            return i
    inv = [1.0 / di for di in dists]
    s = inv[0] + inv[1] + inv[2]
    return [v / s for v in inv]


def _unit_clip(v):
    # numpy min/max so that a vector of prices broadcasts through; on scalar
    # inputs the values are bit-identical to the builtins.
    return np.minimum(1.0, np.maximum(0.0, v))


def weighted_demand(x, p):
    """Purchase probability as the reciprocal-l1-distance blend of centers."""
    w = _weights(_l1_distances(x))
    if isinstance(w, int):
        return _unit_clip(1.0 - CENTER_COEF[w] * p)
    c = w[0] * CENTER_COEF[0] + w[1] * CENTER_COEF[1] + w[2] * CENTER_COEF[2]
    return _unit_clip(1.0 - c * p)


def nearest_center_demand(x, p):
    """Purchase probability copied from the l1-closest center.

    Ties go to center 1, then center 2 (center 1 wins non-strict comparisons,
    center 3 only wins strict ones).
    """
    d1, d2, d3 = _l1_distances(x)
    if d1 <= d2 and d1 <= d3:
        coef = CENTER_COEF[0]
    elif d2 < d1 and d2 <= d3:
        coef = CENTER_COEF[1]
    else:
        coef = CENTER_COEF[2]
    return _unit_clip(1.0 - coef * p)


def boundary_demand(x, p):
    """Blend of degenerate center curves (1-p, 0.5, 0); the maximizer of the
    induced revenue can sit on the price boundary."""
    w = _weights(_l1_distances(x))
    if isinstance(w, int):
        val = (1.0 - p, 0.5, 0.0)[w]
    else:
        val = w[0] * (1.0 - p) + w[1] * 0.5
    return _unit_clip(val)


class RewardModel:
    """Common interface: mean reward, clairvoyant oracle, reward sampling.

    `draw_kind` names the primitive random draw one reward sample consumes
    ("uniform" for Bernoulli purchase outcomes, "normal" for additive noise),
    so episode runners can pre-generate draw arrays.
    """

    draw_kind = "uniform"

    def mean_reward(self, x, p):
        raise NotImplementedError

    def clairvoyant_price(self, x):
        raise NotImplementedError

    def clairvoyant_value(self, x):
        raise NotImplementedError

    def reward_given_draw(self, x, p, u):
        raise NotImplementedError

    def sample_reward(self, x, p, rng):
        if self.draw_kind == "uniform":
            return self.reward_given_draw(x, p, rng.random())
        return self.reward_given_draw(x, p, rng.standard_normal())


class PricingModel(RewardModel):
    """Revenue p * demand(x, p) with Bernoulli purchase outcomes in {0, p}."""

    def demand(self, x, p):
        raise NotImplementedError

    def mean_reward(self, x, p):
        return p * self.demand(x, p)

    def reward_given_draw(self, x, p, u):
        return p if u < self.demand(x, p) else 0.0

    def outcome_given_draw(self, x, p, u):
        """The realized purchase indicator behind reward_given_draw."""
        return 1.0 if u < self.demand(x, p) else 0.0


class WeightedPricingModel(PricingModel):
    kind = "weighted"

    def demand(self, x, p):
        return weighted_demand(x, p)

    def _coef(self, x):
        w = _weights(_l1_distances(x))
        if isinstance(w, int):
            return CENTER_COEF[w]
        return w[0] * CENTER_COEF[0] + w[1] * CENTER_COEF[1] + w[2] * CENTER_COEF[2]

    def clairvoyant_price(self, x):
        # Revenue is p(1 - c p) with c >= 1/2, so the interior stationary
        # point 1/(2c) never exceeds 1.
        return min(1.0, 1.0 / (2.0 * self._coef(x)))

    def clairvoyant_value(self, x):
        # Evaluated through mean_reward so that the clairvoyant policy's
        # per-period regret is exactly zero in floating point.
        return self.mean_reward(x, self.clairvoyant_price(x))


class NearestCenterPricingModel(PricingModel):
    kind = "nearest_center"

    # Per-region (price, value) maximizers of p * max(1 - coef*p, 0) on [0,1].
    _OPT = {1.0: (0.5, 0.25), 2.0: (0.25, 0.125), 0.5: (1.0, 0.5)}

    def demand(self, x, p):
        return nearest_center_demand(x, p)

    def _region_coef(self, x):
        d1, d2, d3 = _l1_distances(x)
        if d1 <= d2 and d1 <= d3:
            return CENTER_COEF[0]
        if d2 < d1 and d2 <= d3:
            return CENTER_COEF[1]
        return CENTER_COEF[2]

    def clairvoyant_price(self, x):
        return self._OPT[self._region_coef(x)][0]

    def clairvoyant_value(self, x):
        return self._OPT[self._region_coef(x)][1]


class BoundaryPricingModel(PricingModel):
    kind = "boundary"

    def demand(self, x, p):
        return boundary_demand(x, p)

    def _ab(self, x):
        """Revenue is a*p - b*p^2 on [0,1] with a = w1 + 0.5 w2, b = w1."""
        w = _weights(_l1_distances(x))
        if isinstance(w, int):
            return ((1.0, 1.0), (0.5, 0.0), (0.0, 0.0))[w]
        return w[0] + 0.5 * w[1], w[0]

    def clairvoyant_price(self, x):
        a, b = self._ab(x)
        if b <= 0.0:
            return 1.0  # revenue nondecreasing in p
        return min(1.0, a / (2.0 * b))

    def clairvoyant_value(self, x):
        return self.mean_reward(x, self.clairvoyant_price(x))


def dist_to_boundary(x, lower, upper):
    """Euclidean distance from x to the boundary of the box [lower, upper]."""
    return min(min(xi - lo, hi - xi) for xi, lo, hi in zip(x, lower, upper))


def lb_cell_index(x, m, d):
    """Mixed-radix cell index of x on the m-per-dimension grid."""
    j = 0
    for i in range(d):
        j = j * m + min(int(x[i] * m), m - 1)
    return j


def lb_mean_reward(w, m, x, p):
    """Localized quadratic reward: -p^2, plus 2p * distance to the cell
    boundary when the cell's bit is set."""
    d = len(x)
    j = lb_cell_index(x, m, d)
    if not w[j]:
        return -p * p
    lower = [min(int(x[i] * m), m - 1) / m for i in range(d)]
    upper = [lo + 1.0 / m for lo in lower]
    return -p * p + 2.0 * p * dist_to_boundary(x, lower, upper)


class LowerBoundModel(RewardModel):
    """Hard-instance model: per-cell flat or tent-shaped optimal price, with
    additive standard normal reward noise."""

    kind = "lower_bound"
    draw_kind = "normal"

    def __init__(self, m, w, d=2):
        w = np.asarray(w, dtype=np.int64)
        if w.shape != (m ** d,):
            raise ValueError(f"w must have length {m ** d}, got {w.shape}")
        self.m = m
        self.w = w
        self.d = d

    def mean_reward(self, x, p):
        return lb_mean_reward(self.w, self.m, x, p)

    def _peak(self, x):
        """Optimal price at x: 0 on flat cells, else the boundary distance."""
        j = lb_cell_index(x, self.m, self.d)
        if not self.w[j]:
            return 0.0
        lower = [min(int(x[i] * self.m), self.m - 1) / self.m for i in range(self.d)]
        upper = [lo + 1.0 / self.m for lo in lower]
        return dist_to_boundary(x, lower, upper)

    def clairvoyant_price(self, x):
        return self._peak(x)

    def clairvoyant_value(self, x):
        g = self._peak(x)
        return g * g

    def reward_given_draw(self, x, p, eps):
        return self.mean_reward(x, p) + eps


class StationaryUniform:
    """I.i.d. uniform covariates on [0,1)^d."""

    kind = "stationary_uniform"

    def __init__(self, d):
        self.d = d

    def generate(self, T, rng):
        return rng.random((T, self.d))


class PiecewiseRectangles:
    """Covariates drawn uniformly from a random rectangle that is redrawn
    every T/10 periods (d = 2)."""

    kind = "piecewise_rectangles"

    def __init__(self, T, epochs=10):
        self.d = 2
        self.T = T
        self.epoch_len = max(1, T // epochs)
        self.redraws = 0

    def _draw_rectangle(self, rng):
        while True:
            a1, a2, b1, b2 = rng.random(4)
            lo = (min(a1, a2), min(b1, b2))
            hi = (max(a1, a2), max(b1, b2))
            if hi[0] > lo[0] and hi[1] > lo[1]:
                return np.array(lo), np.array(hi)
            self.redraws += 1  # degenerate rectangle; probability zero

    def generate(self, T, rng):
        out = np.empty((T, 2))
        t = 0
        while t < T:
            lo, hi = self._draw_rectangle(rng)
            n = min(self.epoch_len, T - t)
            out[t:t + n] = lo + rng.random((n, 2)) * (hi - lo)
            t += n
        return out


_PRICING_MODELS = {
    "weighted": WeightedPricingModel,
    "nearest_center": NearestCenterPricingModel,
    "boundary": BoundaryPricingModel,
}


def grid_search_price(model, x, n_points=100001):
    """Brute-force maximizer of the mean reward over a dense price grid.

    Independent check for the closed-form clairvoyant oracles; O(n_points)
    per covariate, so test-scale only.
    """
    grid = np.linspace(0.0, 1.0, n_points)
    vals = np.asarray(model.mean_reward(x, grid), dtype=np.float64)
    j = int(np.argmax(vals))
    return float(grid[j]), float(vals[j])
