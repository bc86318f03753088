"""Parameter schedule for the adaptive-binning policy.

All quantities are derived from the horizon T, the covariate dimension d and
the two environment constants sigma (sub-Gaussian noise scale) and m2 (lower
curvature of the conditional reward at its maximizer).  Natural logarithms
throughout.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Schedule:
    """Derived per-level parameters for one run.

    Attributes:
        T: horizon length (periods).
        d: covariate dimension.
        sigma: sub-Gaussian noise parameter.
        m2: curvature constant of the conditional reward.
        c_delta: multiplier on the decision-interval widths (1.0 = standard).
        K: maximal bin level; level-K bins never split.
        delta: interval widths, one per level 0..K (price units, pre-clipping).
        n: split thresholds, one per level 0..K-1 (covariate counts).
        N: grid-point counts, one per level 0..K (all equal to ceil(ln T)).
    """

    T: int
    d: int
    sigma: float
    m2: float
    c_delta: float
    K: int
    delta: tuple
    n: tuple
    N: tuple


def build_schedule(T, d, sigma, m2, c_delta=1.0):
    """Compute the full parameter schedule for a horizon of T periods.

    K = floor(ln T / ((d+4) ln 2)), N_k = ceil(ln T),
    delta_k = c_delta * 2^-k * ln T, and
    n_k = max(0, ceil(2^(4k+18) sigma / (m2^2 ln(T)^3)
                      * (ln T + ln ln T - (d+2) k ln 2))).
    """
    if T < 100:
        raise ValueError(f"horizon T must be at least 100, got {T}")
    if d < 1:
        raise ValueError(f"dimension d must be at least 1, got {d}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if m2 <= 0:
        raise ValueError(f"m2 must be positive, got {m2}")
    if c_delta <= 0:
        raise ValueError(f"c_delta must be positive, got {c_delta}")

    log_t = math.log(T)
    K = int(math.floor(log_t / ((d + 4) * math.log(2))))
    grid_count = int(math.ceil(log_t))
    delta = tuple(c_delta * 2.0 ** (-k) * log_t for k in range(K + 1))

    # 2^(4k+18) in float to avoid huge-integer blowup; n_k capped at T since a
    # bin can never see more than T covariates anyway.
    scale = sigma / (m2 ** 2 * log_t ** 3)
    n = []
    for k in range(K):
        raw = 2.0 ** (4 * k + 18) * scale * (
            log_t + math.log(log_t) - (d + 2) * k * math.log(2)
        )
        n_k = max(0, int(math.ceil(raw)))
        n.append(min(n_k, T))

    return Schedule(
        T=T, d=d, sigma=sigma, m2=m2, c_delta=c_delta,
        K=K, delta=delta, n=tuple(n), N=tuple(grid_count for _ in range(K + 1)),
    )
