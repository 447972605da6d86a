import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from costsel.criteria import (
    AdaptedBCR,
    BenefitCostRatio,
    CostVector,
    PlainGain,
    WeightedSum,
    criterion_from_name,
    epsilon_floor,
    log_rescale,
    score,
)
from costsel.errors import NonPositiveCost

gains = st.floats(-1e6, 1e6, allow_nan=False)
costs = st.floats(1e-6, 1e6, allow_nan=False)
params = st.floats(0, 5, allow_nan=False)


class TestScore:
    def test_bcr(self):
        assert score(BenefitCostRatio(), 0.2, 10) == pytest.approx(0.02)

    def test_adapted_bcr_square_root(self):
        assert score(AdaptedBCR(0.5), 0.2, 100) == pytest.approx(0.02)

    @pytest.mark.parametrize(
        "criterion", [PlainGain(), BenefitCostRatio(), AdaptedBCR(0.7), WeightedSum(0.0)]
    )
    def test_zero_gain_scores_zero(self, criterion):
        assert score(criterion, 0.0, 3.0) == 0.0

    def test_weighted_sum(self):
        assert score(WeightedSum(0.5), 1.0, 3.0) == pytest.approx(-0.5)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_cost(self, bad):
        with pytest.raises(NonPositiveCost):
            score(BenefitCostRatio(), 0.1, bad)

    def test_vectorized(self):
        out = score(BenefitCostRatio(), np.array([0.2, 0.1]), np.array([100.0, 1.0]))
        np.testing.assert_allclose(out, [0.002, 0.1])

    @pytest.mark.parametrize("bad", [-0.1, math.nan, math.inf])
    def test_negative_parameters_rejected(self, bad):
        with pytest.raises(ValueError):
            AdaptedBCR(bad)
        with pytest.raises(ValueError):
            WeightedSum(bad)


@given(gains, costs)
def test_degenerate_parameters_are_bit_identical(g, c):
    plain = score(PlainGain(), g, c)
    assert score(AdaptedBCR(0.0), g, c) == plain
    assert score(WeightedSum(0.0), g, c) == plain
    assert score(AdaptedBCR(1.0), g, c) == score(BenefitCostRatio(), g, c)


@given(st.lists(gains, min_size=1, max_size=8), costs)
def test_degenerate_parameters_vectorized(gs, c):
    g = np.array(gs)
    cv = np.full(len(gs), c)
    assert score(AdaptedBCR(0.0), g, cv).tobytes() == g.tobytes()
    assert score(AdaptedBCR(1.0), g, cv).tobytes() == score(BenefitCostRatio(), g, cv).tobytes()


@given(gains, costs, params)
def test_ratio_family_keeps_gain_sign(g, c, gamma):
    for crit in (BenefitCostRatio(), AdaptedBCR(gamma)):
        assert np.sign(score(crit, g, c)) == np.sign(g) or (g != 0 and score(crit, g, c) == 0)


@given(st.lists(gains, min_size=1, max_size=10, unique=True), costs)
def test_equal_costs_do_not_change_argmax(gs, c):
    g = np.array(gs)
    ratio = score(BenefitCostRatio(), g, np.full(len(g), c))
    assume(len(set(ratio.tolist())) == len(ratio))  # rounding can merge neighbours
    assert np.argmax(ratio) == np.argmax(g)


@given(st.lists(gains, min_size=2, max_size=6), st.lists(costs, min_size=6, max_size=6),
       st.integers(0, 5), st.floats(1.001, 1e3))
def test_scaling_one_cost(gs, cs, k, t):
    k = k % len(gs)
    g = np.array(gs)
    c = np.array(cs[: len(gs)])
    assume(abs(g[k]) > 1e-3)
    before = score(BenefitCostRatio(), g, c)
    c2 = c.copy()
    c2[k] *= t
    after = score(BenefitCostRatio(), g, c2)
    others = np.arange(len(g)) != k
    np.testing.assert_array_equal(after[others], before[others])
    if g[k] > 0:
        assert after[k] < before[k]
    else:
        assert after[k] > before[k]


class TestCostVector:
    def test_rejects_zero(self):
        with pytest.raises(NonPositiveCost):
            CostVector([1.0, 0.0])

    def test_readonly(self):
        cv = CostVector([1.0, 2.0])
        with pytest.raises(ValueError):
            cv.costs[0] = 5.0
        assert len(cv) == 2 and cv[1] == 2.0


class TestEpsilonFloor:
    def test_cost_free_features(self):
        np.testing.assert_array_equal(epsilon_floor([0, 1, 5], 0.01).costs, [0.01, 1, 5])

    def test_identity_above_floor(self):
        np.testing.assert_array_equal(epsilon_floor([0.5, 2, 3], 0.1).costs, [0.5, 2, 3])

    def test_uniform_floor(self):
        np.testing.assert_array_equal(epsilon_floor([1e-9, 1e-9], 0.5).costs, [0.5, 0.5])

    def test_epsilon_positive(self):
        with pytest.raises(ValueError):
            epsilon_floor([1.0], 0.0)


class TestLogRescale:
    def test_equal_costs_fixed_point(self):
        np.testing.assert_array_equal(log_rescale(CostVector([1, 1, 1])).costs, [1, 1, 1])

    def test_exact_logs(self):
        np.testing.assert_allclose(log_rescale(CostVector([1, math.e, math.e**2])).costs, [1, 2, 3], rtol=1e-15)

    def test_thousandfold_spread(self):
        out = log_rescale(CostVector([2, 2000])).costs
        assert out[0] == 1.0
        assert out[1] == pytest.approx(7.907755278982137, rel=1e-14)

    def test_rejects_zero(self):
        with pytest.raises(NonPositiveCost):
            log_rescale(np.array([0.0, 1.0]))

    @given(st.lists(costs, min_size=1, max_size=10))
    def test_order_and_minimum(self, cs):
        c = np.array(cs)
        out = log_rescale(CostVector(c)).costs
        assert out.min() == 1.0
        assert out[np.argmin(c)] == 1.0
        order = np.argsort(c, kind="stable")
        assert np.all(np.diff(out[order]) >= 0)


@pytest.mark.parametrize(
    "name,kwargs,expected",
    [
        ("plain", {}, PlainGain()),
        ("BCR", {}, BenefitCostRatio()),
        ("adapted_bcr", {"gamma": 0.5}, AdaptedBCR(0.5)),
        ("weighted-sum", {"lam": 2.0}, WeightedSum(2.0)),
    ],
)
def test_criterion_from_name(name, kwargs, expected):
    assert criterion_from_name(name, **kwargs) == expected


def test_criterion_from_name_errors():
    with pytest.raises(ValueError):
        criterion_from_name("aic")
    with pytest.raises(ValueError):
        criterion_from_name("adapted-bcr")
    with pytest.raises(ValueError):
        criterion_from_name("weighted-sum")
