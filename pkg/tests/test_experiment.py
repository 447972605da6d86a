import numpy as np
import pytest

from costsel import experiment
from costsel.criteria import BenefitCostRatio
from costsel.errors import ReplicateError, SingularDesign
from costsel.experiment import (
    Outcome,
    ReplicateResult,
    SettingFailure,
    classify,
    paper_grid,
    run_grid,
    run_replicate,
    run_setting,
    simulate_gains,
)
from costsel.selection import select_step
from costsel.simgen import SimConfig, data_key, draw_replicate, relevant_cost_vector


def cfg(**kw):
    kw.setdefault("p_rel", 1)
    kw.setdefault("p_noise", 1)
    kw.setdefault("beta", 0.0)
    kw.setdefault("master_seed", 42)
    return SimConfig(**kw)


class TestClassify:
    @pytest.mark.parametrize(
        "rel,noise,theta,expected",
        [
            (0.2, 0.1, 1.0, Outcome.RELEVANT),
            (0.2, 0.1, 10.0, Outcome.NOISE),
            (0.2, -0.1, 1000.0, Outcome.RELEVANT),
            (-0.2, -0.1, 1.0, Outcome.NONE),
            (0.0, 0.0, 1.0, Outcome.NONE),
            (0.1, 0.1, 1.0, Outcome.RELEVANT),  # tie goes to the lower index
            (-0.1, 0.05, 1.0, Outcome.NOISE),
            (0.3, np.nan, 1e12, Outcome.RELEVANT),
            (-0.3, np.nan, 1.0, Outcome.NONE),
        ],
    )
    def test_cases(self, rel, noise, theta, expected):
        assert classify(rel, noise, theta) == expected

    def test_vectorized(self):
        out = classify([0.2, 0.2, -1.0], [0.1, 0.3, -1.0], 1.0)
        np.testing.assert_array_equal(out, [Outcome.RELEVANT, Outcome.NOISE, Outcome.NONE])


class TestRunReplicate:
    def test_strong_signal_is_found(self):
        c = cfg(beta=1.0, replicates=200)
        outcomes = [run_replicate(c, replicate_id=r).outcome for r in range(200)]
        assert outcomes.count(Outcome.RELEVANT) >= 198

    def test_deterministic(self):
        c = cfg(p_noise=5, beta=0.2)
        assert run_replicate(c, 3, 11) == run_replicate(c, 3, 11)

    def test_theta_limit(self):
        c = cfg(p_noise=5, beta=0.5, theta=1e12)
        for r in range(50):
            res = run_replicate(c, replicate_id=r)
            expected = Outcome.NOISE if res.delta_noise > 0 else Outcome.NONE
            if res.delta_noise <= 0 and res.delta_rel > 0:
                expected = Outcome.RELEVANT  # relevant still beats "nothing"
            assert res.outcome == expected

    def test_no_noise_features(self):
        res = run_replicate(cfg(p_noise=0, beta=0.5), replicate_id=0)
        assert np.isnan(res.delta_noise)
        assert res.outcome in (Outcome.RELEVANT, Outcome.NONE)

    @pytest.mark.parametrize("theta", [1.0, 10.0, 1000.0])
    def test_agrees_with_select_step_under_theta_costs(self, theta):
        c = cfg(p_rel=2, p_noise=4, beta=0.15, theta=theta)
        sid = data_key(c)
        costs = relevant_cost_vector(c)
        for r in range(25):
            res = run_replicate(c, sid, r)
            train, test = draw_replicate(c, sid, r)
            step = select_step(train, test, [], range(c.p), costs, BenefitCostRatio())
            assert res.delta_rel == pytest.approx(step.gains[: c.p_rel].max(), abs=1e-12)
            assert res.delta_noise == pytest.approx(step.gains[c.p_rel:].max(), abs=1e-12)
            if step.selected is None:
                assert res.outcome == Outcome.NONE
            elif step.selected < c.p_rel:
                assert res.outcome == Outcome.RELEVANT
            else:
                assert res.outcome == Outcome.NOISE

    def test_numerical_failure_is_wrapped(self, monkeypatch):
        def boom(train, test):
            raise SingularDesign("constant column")

        monkeypatch.setattr(experiment, "single_feature_gains", boom)
        with pytest.raises(ReplicateError) as info:
            run_replicate(cfg(), 5, 9)
        assert info.value.replicate_id == 9 and info.value.setting_id == 5


class TestRunSetting:
    def test_single_replicate(self, monkeypatch):
        monkeypatch.setattr(experiment, "_group_gains", lambda c, s, r: (0.3, -0.1))
        s = run_setting(cfg(replicates=1))
        assert (s.p_relevant_selected, s.p_noise_selected, s.p_none_selected) == (1.0, 0.0, 0.0)

    def test_proportions_and_samples(self):
        s = run_setting(cfg(p_noise=3, beta=0.1, replicates=300))
        assert sum(s.counts) == 300
        assert s.p_relevant_selected + s.p_noise_selected + s.p_none_selected == pytest.approx(1.0, abs=1e-15)
        assert s.rel_gain_samples.shape == s.noise_gain_samples.shape == (300,)
        for r in (0, 150, 299):
            res = run_replicate(s.setting, s.setting_id, r)
            assert (res.delta_rel, res.delta_noise) == (s.rel_gain_samples[r], s.noise_gain_samples[r])

    def test_null_case_rates(self):
        s = run_setting(cfg(beta=0.0, replicates=1000))
        assert abs(s.p_none_selected - 0.70) <= 0.05
        assert abs(s.p_relevant_selected - s.p_noise_selected) <= 0.04

    def test_raw_gains_stored_unscaled(self):
        a = run_setting(cfg(beta=0.1, theta=1.0, replicates=200))
        b = run_setting(cfg(beta=0.1, theta=1000.0, replicates=200))
        assert a.rel_gain_samples.tobytes() == b.rel_gain_samples.tobytes()
        np.testing.assert_array_equal(np.sign(a.rel_gain_samples), np.sign(b.rel_gain_samples))


class TestRunGrid:
    def test_paper_grid_size(self):
        grid = paper_grid(replicates=1)
        assert len(grid) == 51 * 4 * 4 * 3 == 2448
        assert grid[0].theta == 1.0 and grid[-1].theta == 1000.0
        assert len({(g.p_rel, g.p_noise, g.beta) for g in grid}) == 612

    def test_one_setting_equals_run_setting(self):
        c = cfg(p_noise=2, beta=0.2, replicates=50)
        [g] = run_grid([c])
        s = run_setting(c)
        assert g.counts == s.counts
        assert g.rel_gain_samples.tobytes() == s.rel_gain_samples.tobytes()

    def test_thread_count_does_not_change_results(self):
        grid = [cfg(p_noise=pn, beta=b, theta=t, replicates=40)
                for t in (1.0, 100.0) for pn in (1, 10) for b in (0.0, 0.3)]
        a = run_grid(grid, threads=1)
        b = run_grid(grid, threads=8)
        for x, y in zip(a, b):
            assert x.setting == y.setting and x.counts == y.counts
            assert x.rel_gain_samples.tobytes() == y.rel_gain_samples.tobytes()
            assert x.noise_gain_samples.tobytes() == y.noise_gain_samples.tobytes()

    def test_output_order_matches_input(self):
        grid = [cfg(beta=b, replicates=5) for b in (0.5, 0.0, 0.2)]
        assert [s.setting for s in run_grid(grid)] == grid

    def test_failure_isolated_to_its_setting(self, monkeypatch):
        real = experiment._group_gains

        def flaky(c, sid, r):
            if c.p_noise == 10 and r == 3:
                raise SingularDesign("forced")
            return real(c, sid, r)

        monkeypatch.setattr(experiment, "_group_gains", flaky)
        grid = [cfg(p_noise=1, replicates=10), cfg(p_noise=10, replicates=10),
                cfg(p_noise=10, theta=10.0, replicates=10)]
        out = run_grid(grid, threads=2)
        assert not isinstance(out[0], SettingFailure)
        for f in out[1:]:
            assert isinstance(f, SettingFailure) and f.replicate_id == 3
            assert "forced" in f.message

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            run_grid([])


@pytest.mark.parametrize("beta,p_rel,p_noise", [(0.0, 1, 1), (0.2, 2, 10), (0.4, 1, 50)])
def test_sign_mass_and_monotonicity_across_theta(beta, p_rel, p_noise):
    base = cfg(p_rel=p_rel, p_noise=p_noise, beta=beta, replicates=150)
    rel, noise = simulate_gains(base)
    outcomes = [classify(rel, noise, t) for t in (1.0, 10.0, 100.0, 1000.0)]
    for earlier, later in zip(outcomes, outcomes[1:]):
        became_relevant = (later == Outcome.RELEVANT) & (earlier != Outcome.RELEVANT)
        assert not became_relevant.any()
        # NONE only changes if the relevant group was the sole positive one, which it stays
        assert np.array_equal(earlier == Outcome.NONE, later == Outcome.NONE)


def test_no_selection_shrinks_with_more_noise():
    rates = [run_setting(cfg(p_noise=pn, beta=0.1, replicates=600)).p_none_selected for pn in (1, 10, 50)]
    assert rates[1] <= rates[0] + 0.03 and rates[2] <= rates[1] + 0.03


def test_replicate_result_fields():
    r = ReplicateResult(0.1, -0.2, Outcome.RELEVANT)
    assert r.outcome is Outcome.RELEVANT
