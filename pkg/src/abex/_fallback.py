"""Pure-Python twin of the compiled episode kernel."""

import numpy as np

from .policy import AbePolicy


def run_abe_episode(schedule, model, X, draws, checkpoints, keep_state=False):
    """Run the adaptive-binning policy over pre-drawn covariates and reward
    draws, accumulating exact-mean regret at the checkpoint periods."""
    T = len(X)
    policy = AbePolicy(schedule)
    cum = np.empty(len(checkpoints))
    regret = 0.0
    ci = 0
    for t in range(T):
        x = X[t]
        price, token = policy.decide(x)
        z = model.reward_given_draw(x, price, draws[t])
        policy.update(token, z)
        regret += model.clairvoyant_value(x) - model.mean_reward(x, price)
        if ci < len(checkpoints) and t + 1 == checkpoints[ci]:
            cum[ci] = regret
            ci += 1
    return cum, (policy if keep_state else None)
