import numpy as np
import pytest

from abex.environments import (BoundaryPricingModel, LowerBoundModel,
                               NearestCenterPricingModel, PiecewiseRectangles,
                               StationaryUniform, WeightedPricingModel,
                               boundary_demand, dist_to_boundary,
                               grid_search_price, lb_mean_reward,
                               nearest_center_demand, weighted_demand)

ALL_MODELS = [WeightedPricingModel(), NearestCenterPricingModel(),
              BoundaryPricingModel()]


class TestDemands:
    def test_weighted_zero_price(self):
        assert weighted_demand((0.5, 0.5), 0.0) == 1.0

    def test_weighted_equidistant_point(self):
        # all three l1 distances are 0.6, so the weights are equal
        assert weighted_demand((0.5, 0.5), 0.3) == pytest.approx(0.65)

    def test_weighted_at_center(self):
        # on a center, the blend degenerates to that center's demand
        assert weighted_demand((0.2, 0.2), 0.4) == pytest.approx(0.6)

    def test_nearest_center_regions(self):
        assert nearest_center_demand((0.21, 0.19), 0.5) == pytest.approx(0.5)
        assert nearest_center_demand((0.21, 0.79), 0.4) == pytest.approx(0.2)

    def test_nearest_center_tie_priority(self):
        # equidistant from centers 1 and 2: center 1 wins the tie
        assert nearest_center_demand((0.2, 0.5), 0.4) == pytest.approx(0.6)

    def test_boundary_symmetric_point(self):
        assert boundary_demand((0.5, 0.5), 1.0) == pytest.approx(1.0 / 6.0)

    def test_demand_in_unit_interval(self):
        rng = np.random.default_rng(3)
        for model in ALL_MODELS:
            for x, p in zip(rng.random((500, 2)), rng.random(500)):
                assert 0.0 <= model.demand(x, p) <= 1.0


class TestSampling:
    def test_degenerate_bernoulli(self):
        model = WeightedPricingModel()
        x = (0.5, 0.5)
        # demand 1 at p=0 -> reward always p = 0
        assert all(model.sample_reward(x, 0.0, np.random.default_rng(s)) == 0.0
                   for s in range(5))
        # near-zero demand at high price for the center-2 region
        assert nearest_center_demand((0.2, 0.8), 0.5) == 0.0
        m3 = NearestCenterPricingModel()
        assert all(m3.sample_reward((0.2, 0.8), 0.5,
                                    np.random.default_rng(s)) == 0.0
                   for s in range(5))

    def test_bernoulli_rate(self):
        model = WeightedPricingModel()
        x, p = (0.5, 0.5), 0.3  # demand 0.65
        rng = np.random.default_rng(42)
        draws = rng.random(10**5)
        freq = np.mean([model.reward_given_draw(x, p, u) / p for u in draws])
        assert freq == pytest.approx(0.65, abs=0.01)

    def test_lower_bound_noise_is_additive(self):
        model = LowerBoundModel(2, [1, 0, 0, 1])
        x, p = (0.25, 0.25), 0.1
        rng = np.random.default_rng(0)
        samples = np.array([model.sample_reward(x, p, rng)
                            for _ in range(20000)])
        assert samples.mean() == pytest.approx(model.mean_reward(x, p),
                                               abs=0.02)
        assert samples.std() == pytest.approx(1.0, abs=0.02)


class TestClairvoyant:
    def test_weighted_equidistant(self):
        model = WeightedPricingModel()
        assert model.clairvoyant_price((0.5, 0.5)) == pytest.approx(3 / 7)

    def test_nearest_center_regions(self):
        model = NearestCenterPricingModel()
        assert model.clairvoyant_price((0.21, 0.19)) == 0.5
        assert model.clairvoyant_value((0.21, 0.19)) == 0.25
        assert model.clairvoyant_price((0.79, 0.21)) == 1.0

    def test_lower_bound_cell(self):
        model = LowerBoundModel(2, [1, 0, 0, 0])
        x = (0.25, 0.25)
        assert model.clairvoyant_price(x) == 0.25
        assert model.clairvoyant_value(x) == 0.0625

    @pytest.mark.parametrize("model", ALL_MODELS +
                             [LowerBoundModel(2, [1, 0, 1, 1]),
                              LowerBoundModel(4, list(range(16)) and
                                              [1, 0] * 8)])
    def test_dominance(self, model):
        rng = np.random.default_rng(9)
        for x, p in zip(rng.random((2000, 2)), rng.random(2000)):
            assert model.clairvoyant_value(x) >= model.mean_reward(x, p) - 1e-12

    @pytest.mark.parametrize("model", ALL_MODELS +
                             [LowerBoundModel(2, [1, 1, 0, 1])])
    def test_oracle_agrees_with_grid_search(self, model):
        rng = np.random.default_rng(11)
        step = 1.0 / 10000
        for x in rng.random((100, 2)):
            p_grid, v_grid = grid_search_price(model, x, n_points=10001)
            assert model.clairvoyant_value(x) >= v_grid - 1e-12
            if not isinstance(model, NearestCenterPricingModel):
                assert abs(model.clairvoyant_price(x) - p_grid) <= step + 1e-12


class TestLowerBoundClass:
    def test_flat_cell_reward(self):
        assert lb_mean_reward([0, 1, 1, 1], 2, (0.25, 0.25), 0.3) == \
            pytest.approx(-0.09)

    def test_center_distance(self):
        assert dist_to_boundary((0.25, 0.25), (0.0, 0.0), (0.5, 0.5)) == 0.25
        assert lb_mean_reward([1, 0, 0, 0], 2, (0.25, 0.25), 0.25) == \
            pytest.approx(0.0625)

    def test_off_center_reward(self):
        # dist = min(0.1, 0.4, 0.3, 0.2) = 0.1
        assert lb_mean_reward([1, 0, 0, 0], 2, (0.1, 0.3), 0.1) == \
            pytest.approx(0.01)

    @pytest.mark.parametrize("m", [2, 4])
    def test_lipschitz_constant_four(self, m):
        rng = np.random.default_rng(m)
        w = rng.integers(0, 2, size=m * m)
        model = LowerBoundModel(m, w)
        X = rng.random((10**4, 2, 2))
        P = rng.random((10**4, 2))
        for (x1, x2), (p1, p2) in zip(X, P):
            gap = abs(model.mean_reward(x1, p1) - model.mean_reward(x2, p2))
            bound = 4.0 * (abs(p1 - p2) + np.linalg.norm(x1 - x2))
            assert gap <= bound + 1e-12

    @pytest.mark.parametrize("m", [2, 4])
    def test_singleton_quadratic_identity(self, m):
        rng = np.random.default_rng(10 + m)
        w = rng.integers(0, 2, size=m * m)
        model = LowerBoundModel(m, w)
        for x, p in zip(rng.random((10**4, 2)), rng.random(10**4)):
            gap = model.clairvoyant_value(x) - model.mean_reward(x, p)
            expected = (p - model.clairvoyant_price(x)) ** 2
            assert gap == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_rejects_wrong_bit_vector_length(self):
        with pytest.raises(ValueError):
            LowerBoundModel(3, [0, 1])


class TestCovariateProcesses:
    def test_uniform_mean(self):
        X = StationaryUniform(2).generate(10**5, np.random.default_rng(1))
        assert np.all((X >= 0) & (X < 1))
        assert np.allclose(X.mean(axis=0), 0.5, atol=0.005)

    def test_rectangles_contain_draws(self):
        proc = PiecewiseRectangles(T=1000)
        rng = np.random.default_rng(2)
        lo, hi = proc._draw_rectangle(rng)
        X = lo + rng.random((500, 2)) * (hi - lo)
        assert np.all((X >= lo) & (X <= hi))

    def test_epoch_redraw(self):
        proc = PiecewiseRectangles(T=1000)
        X = proc.generate(1000, np.random.default_rng(3))
        assert X.shape == (1000, 2)
        # different epochs occupy different rectangles with probability 1
        first, second = X[:100], X[100:200]
        assert not np.isclose(first[:, 0].min(), second[:, 0].min(), atol=1e-6)
        # per-epoch draws stay inside their epoch's bounding box boundaries
        for e in range(10):
            epoch = X[e * 100:(e + 1) * 100]
            assert np.ptp(epoch[:, 0]) <= 1.0
            assert np.all((epoch >= 0) & (epoch < 1))
