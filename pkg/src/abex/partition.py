"""Dyadic partition of the covariate space and per-bin decision sets.

Bins are half-open hyper-rectangles [lower_i, upper_i) with edge length
2^-level in every dimension, so bounds are exact in binary floating point.
"""

import itertools

import numpy as np


class DecisionSet:
    """An equally spaced grid of candidate decisions with running statistics.

    Grid point j is p_l + j*step for j = 0..grid_count-1.  `counts` and
    `means` track the number of explorations and the running-average reward
    per grid point.
    """

    __slots__ = ("p_l", "p_u", "grid_count", "step", "counts", "means")

    def __init__(self, p_l, p_u, grid_count):
        if grid_count < 2:
            raise ValueError("decision set needs at least 2 grid points")
        if not 0.0 <= p_l <= p_u <= 1.0:
            raise ValueError(f"invalid interval [{p_l}, {p_u}]")
        self.p_l = p_l
        self.p_u = p_u
        self.grid_count = grid_count
        self.step = (p_u - p_l) / (grid_count - 1)
        self.counts = np.zeros(grid_count, dtype=np.int64)
        self.means = np.zeros(grid_count, dtype=np.float64)

    def point(self, j):
        return self.p_l + j * self.step

    def record(self, j, reward):
        """Fold one observed reward into grid point j's running mean."""
        c = self.counts[j]
        self.means[j] = (c * self.means[j] + reward) / (c + 1)
        self.counts[j] = c + 1


def make_decision_set(p_star, delta_next, grid_count):
    """Build a child decision set centered on p_star, clipped to [0, 1].

    The interval is [p_star - delta_next/2, p_star + delta_next/2] cut off at
    the domain boundaries; the grid always spans the clipped interval.
    """
    if not 0.0 <= p_star <= 1.0:
        raise ValueError(f"p_star outside [0, 1]: {p_star}")
    if delta_next <= 0:
        raise ValueError(f"delta_next must be positive, got {delta_next}")
    p_l = max(0.0, p_star - delta_next / 2.0)
    p_u = min(1.0, p_star + delta_next / 2.0)
    return DecisionSet(p_l, p_u, grid_count)


def empirical_argmax(ds):
    """Smallest grid index with the highest running mean, and its price."""
    j = int(np.argmax(ds.means))  # np.argmax returns the first maximizer
    return j, ds.point(j)


class Bin:
    """A dyadic bin: bounds, level, visit counter and decision payload.

    A bin below the maximal level carries a DecisionSet; a maximal-level bin
    carries a single fixed price (the midpoint of the interval it was created
    with).  `children` is None until the bin splits.
    """

    __slots__ = ("lower", "upper", "level", "visits", "decisions",
                 "fixed_price", "children")

    def __init__(self, lower, upper, level, decisions=None, fixed_price=None):
        self.lower = np.asarray(lower, dtype=np.float64)
        self.upper = np.asarray(upper, dtype=np.float64)
        self.level = level
        self.visits = 0
        self.decisions = decisions
        self.fixed_price = fixed_price
        self.children = None

    @property
    def is_leaf(self):
        return self.children is None

    def contains(self, x):
        return bool(np.all((self.lower <= x) & (x < self.upper)))

    def volume(self):
        return float(np.prod(self.upper - self.lower))


def split_bin(b):
    """Bisect a bin in every dimension, producing its 2^d children.

    Children are returned in the order of their binary index i in {0,1}^d
    (first dimension most significant); child i takes the lower half of
    dimension j when i_j = 0 and the upper half when i_j = 1.  Payloads are
    not assigned here; the caller decides what each child inherits.
    """
    if b.children is not None:
        raise ValueError("bin is already split")
    d = len(b.lower)
    mid = (b.lower + b.upper) / 2.0
    children = []
    for bits in itertools.product((0, 1), repeat=d):
        bits = np.asarray(bits)
        lo = np.where(bits == 0, b.lower, mid)
        hi = np.where(bits == 0, mid, b.upper)
        children.append(Bin(lo, hi, b.level + 1))
    b.children = children
    return children


class PartitionTree:
    """The tree of all bins; the childless bins form the current partition."""

    def __init__(self, d):
        self.d = d
        self.root = Bin(np.zeros(d), np.ones(d), 0)

    def locate(self, x):
        """Descend to the unique leaf containing x (half-open convention)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.d,) or np.any(x < 0.0) or np.any(x >= 1.0):
            raise ValueError(f"covariate outside [0,1)^{self.d}: {x}")
        node = self.root
        while node.children is not None:
            mid = (node.lower + node.upper) / 2.0
            idx = 0
            for xi, mi in zip(x, mid):
                idx = (idx << 1) | (xi >= mi)
            node = node.children[idx]
        return node

    def leaves(self):
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.children is None:
                out.append(node)
            else:
                stack.extend(node.children)
        return out
