"""The adaptive binning-and-exploration policy.

Each period the policy locates the partition leaf containing the covariate,
explores its decision grid round-robin, and splits the bin (inheriting the
empirically best price into each child's decision set) once the leaf has seen
its level's quota of covariates.  Maximal-level bins apply a single fixed
price forever.
"""

from .partition import (DecisionSet, PartitionTree, empirical_argmax,
                        make_decision_set, split_bin)


class DecisionToken:
    """Identifies the (bin, grid point) whose statistics the next update
    mutates; `j` is None for a fixed-price (maximal-level) decision."""

    __slots__ = ("bin", "j", "spent")

    def __init__(self, bin_, j):
        self.bin = bin_
        self.j = j
        self.spent = False

    @property
    def fixed(self):
        return self.j is None


class AbePolicy:
    """Stateful policy driven by a Schedule; strict decide/update alternation."""

    observes = "reward"

    def __init__(self, schedule):
        self.schedule = schedule
        self.tree = PartitionTree(schedule.d)
        if schedule.K == 0:
            # Degenerate horizon: the root is already maximal-level.
            self.tree.root.fixed_price = 0.5
        else:
            # The root decision set always spans the full price interval.
            self.tree.root.decisions = DecisionSet(0.0, 1.0, schedule.N[0])
        self._pending = None

    def decide(self, x):
        """Return (price, token) for covariate x, splitting bins as needed."""
        if self._pending is not None:
            raise RuntimeError("decide called with an unconsumed token")
        sched = self.schedule
        node = self.tree.locate(x)
        while True:
            node.visits += 1
            k = node.level
            if k == sched.K:
                token = DecisionToken(node, None)
                self._pending = token
                return node.fixed_price, token
            if node.visits < sched.n[k]:
                j = (node.visits - 1) % sched.N[k]
                token = DecisionToken(node, j)
                self._pending = token
                return node.decisions.point(j), token
            # Quota reached: split, hand the parent's empirical argmax down to
            # every child, then re-run the decision on the child holding x.
            # With n_k = 0 this cascades through several levels at once.
            _, p_star = empirical_argmax(node.decisions)
            children = split_bin(node)
            for child in children:
                if child.level == sched.K:
                    ds = make_decision_set(p_star, sched.delta[child.level],
                                           sched.N[child.level])
                    child.fixed_price = (ds.p_l + ds.p_u) / 2.0
                else:
                    child.decisions = make_decision_set(
                        p_star, sched.delta[child.level], sched.N[child.level])
            node.decisions = None  # statistics retired with the parent
            node = next(c for c in children if c.contains(x))

    def update(self, token, reward):
        """Record the observed reward for the decision the token identifies."""
        if token is not self._pending or token.spent:
            raise RuntimeError("update called with a stale or duplicate token")
        token.spent = True
        self._pending = None
        if token.fixed:
            return
        token.bin.decisions.record(token.j, reward)

    def greedy_price(self, x):
        """Exploration-free readout: the empirically best price at x."""
        node = self.tree.locate(x)
        if node.level == self.schedule.K:
            return node.fixed_price
        _, price = empirical_argmax(node.decisions)
        return price


def policy_from_state(schedule, state):
    """Rebuild an AbePolicy from the flat arrays the compiled kernel returns.

    `state` maps node fields to arrays indexed by node id; children of node i
    occupy ids first_child[i] .. first_child[i] + 2^d - 1 in binary-code
    order, matching split_bin's ordering.
    """
    policy = AbePolicy(schedule)
    tree = policy.tree
    first_child = state["first_child"]
    n_children = 2 ** schedule.d

    def fill(node, i):
        node.visits = int(state["visits"][i])
        if node.level == schedule.K:
            node.fixed_price = (state["p_l"][i] + state["p_u"][i]) / 2.0
            node.decisions = None
        elif first_child[i] < 0:
            ds = DecisionSet(state["p_l"][i], state["p_u"][i], schedule.N[node.level])
            ds.counts[:] = state["counts"][i]
            ds.means[:] = state["means"][i]
            node.decisions = ds
        if first_child[i] >= 0:
            node.decisions = None
            for offset, child in enumerate(split_bin(node)):
                fill(child, first_child[i] + offset)

    import sys
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10000))
    try:
        fill(tree.root, 0)
    finally:
        sys.setrecursionlimit(old_limit)
    return policy
