import numpy as np
import pytest

from abex.policy import AbePolicy
from abex.schedule import Schedule, build_schedule


def toy_schedule(d=2, K=2, n=(3, 5), N=3, delta=(1.0, 0.5, 0.25)):
    """Hand-built schedule for behavioral tests."""
    return Schedule(T=1000, d=d, sigma=0.1, m2=0.5, c_delta=1.0,
                    K=K, delta=tuple(delta), n=tuple(n),
                    N=tuple(N for _ in range(K + 1)))


class TestDecide:
    def test_first_covariate_reference_run(self):
        policy = AbePolicy(build_schedule(10**6, 2, 0.125, 0.5))
        price, token = policy.decide((0.3, 0.7))
        assert price == 0.0  # grid point 0 of the root's [0,1] grid
        assert token.j == 0

    def test_round_robin_modulo(self):
        policy = AbePolicy(toy_schedule(n=(10, 10), N=3))
        prices = []
        for t in range(5):
            price, token = policy.decide((0.1, 0.1))
            prices.append(price)
            policy.update(token, 0.0)
        # 5th arrival: j = 4 mod 3 = 1 -> middle grid point of [0,1]
        assert prices == [0.0, 0.5, 1.0, 0.0, 0.5]

    def test_zero_threshold_cascades_immediately(self):
        policy = AbePolicy(toy_schedule(K=2, n=(0, 4)))
        price, token = policy.decide((0.8, 0.1))
        root = policy.tree.root
        assert root.children is not None
        leaf = token.bin
        assert leaf.level == 1
        assert leaf.contains(np.array([0.8, 0.1]))
        assert price == leaf.decisions.point(0)

    def test_split_exactly_on_threshold_arrival(self):
        policy = AbePolicy(toy_schedule(K=2, n=(3, 99)))
        for _ in range(2):
            _, token = policy.decide((0.6, 0.6))
            policy.update(token, 0.3)
            assert policy.tree.root.children is None
        # third arrival triggers the split; the decision comes from the child
        _, token = policy.decide((0.6, 0.6))
        policy.update(token, 0.3)
        assert policy.tree.root.children is not None
        assert token.bin.level == 1

    def test_max_level_fixed_price(self):
        policy = AbePolicy(toy_schedule(K=1, n=(0,), delta=(1.0, 0.5)))
        price, token = policy.decide((0.2, 0.2))
        assert token.fixed
        leaf = token.bin
        assert leaf.level == 1
        # inherited argmax is grid point 0 of [0,1] (all-zero means) -> 0.0;
        # the child interval is [0, 0.25], so the fixed price is its midpoint
        assert price == leaf.fixed_price == 0.125
        policy.update(token, 123.0)  # no statistics to mutate
        assert leaf.visits == 1


class TestUpdate:
    def test_first_sample(self):
        policy = AbePolicy(toy_schedule(n=(10, 10)))
        _, token = policy.decide((0.1, 0.1))
        policy.update(token, 0.7)
        ds = token.bin.decisions
        assert ds.means[token.j] == 0.7
        assert ds.counts[token.j] == 1

    def test_running_mean_recurrence(self):
        policy = AbePolicy(toy_schedule(N=2, n=(10, 10)))
        for reward in (0.5, 0.5, 0.2):
            _, token = policy.decide((0.1, 0.1))
            if token.j == 1:
                policy.update(token, 0.0)  # park the other grid point
                _, token = policy.decide((0.1, 0.1))
            policy.update(token, reward)
        ds = policy.tree.root.decisions
        assert ds.means[0] == pytest.approx(0.4)
        assert ds.counts[0] == 3

    def test_stale_token_rejected(self):
        policy = AbePolicy(toy_schedule(n=(10, 10)))
        _, token = policy.decide((0.1, 0.1))
        policy.update(token, 0.2)
        with pytest.raises(RuntimeError):
            policy.update(token, 0.2)

    def test_decide_requires_update_between(self):
        policy = AbePolicy(toy_schedule(n=(10, 10)))
        policy.decide((0.1, 0.1))
        with pytest.raises(RuntimeError):
            policy.decide((0.1, 0.1))


def run_random_episode(policy, T, seed=0, reward=lambda rng: rng.random()):
    rng = np.random.default_rng(seed)
    prices = []
    for _ in range(T):
        x = rng.random(policy.schedule.d)
        price, token = policy.decide(x)
        policy.update(token, reward(rng))
        prices.append(price)
    return prices


class TestInvariants:
    def test_partition_stays_valid(self):
        policy = AbePolicy(toy_schedule(K=3, n=(2, 3, 4),
                                        delta=(1.0, 0.5, 0.25, 0.125)))
        run_random_episode(policy, 500)
        leaves = policy.tree.leaves()
        assert sum(b.volume() for b in leaves) == 1.0
        rng = np.random.default_rng(1)
        for x in rng.random((2000, 2)):
            assert policy.tree.locate(x).contains(x)

    def test_level_bound(self):
        policy = AbePolicy(toy_schedule(K=2, n=(0, 0)))
        run_random_episode(policy, 300)
        assert all(b.level <= 2 for b in policy.tree.leaves())
        # every leaf is maximal-level and fixed-price now
        assert all(b.fixed_price is not None for b in policy.tree.leaves())

    def test_round_robin_balance(self):
        policy = AbePolicy(toy_schedule(K=2, n=(40, 60), N=7))
        run_random_episode(policy, 800)
        for leaf in policy.tree.leaves():
            if leaf.decisions is not None:
                counts = leaf.decisions.counts
                assert counts.max() - counts.min() <= 1

    def test_child_interval_inherits_argmax(self):
        sched = toy_schedule(K=2, n=(5, 50), N=3, delta=(1.0, 0.5, 0.25))
        policy = AbePolicy(sched)
        # feed rewards that favor the middle grid point of the root
        for _ in range(5):
            _, token = policy.decide((0.4, 0.4))
            policy.update(token, 1.0 if token.j == 1 else 0.0)
        root = policy.tree.root
        assert root.children is not None
        for child in root.children:
            ds = child.decisions
            assert ds.p_u - ds.p_l <= sched.delta[1] + 1e-15
            assert ds.p_l == pytest.approx(0.5 - sched.delta[1] / 2)
            assert ds.p_u == pytest.approx(0.5 + sched.delta[1] / 2)

    def test_prices_stay_in_unit_interval(self):
        policy = AbePolicy(toy_schedule(K=3, n=(1, 2, 3),
                                        delta=(1.0, 0.5, 0.25, 0.125)))
        prices = run_random_episode(policy, 600, seed=5)
        assert all(0.0 <= p <= 1.0 for p in prices)

    def test_determinism(self):
        runs = []
        for _ in range(2):
            policy = AbePolicy(toy_schedule(K=2, n=(4, 9)))
            runs.append(run_random_episode(policy, 400, seed=11))
        assert runs[0] == runs[1]

    def test_greedy_readout(self):
        policy = AbePolicy(toy_schedule(n=(10, 10), N=3))
        for reward in (0.1, 0.9, 0.2):
            _, token = policy.decide((0.3, 0.3))
            policy.update(token, reward)
        # grid point 1 (price 0.5) has the best mean
        assert policy.greedy_price((0.9, 0.9)) == 0.5
