import numpy as np
import pytest

from stablepaths import diagnostics as dg
from stablepaths import inducing, maps, stable
from stablepaths.errors import StatisticalError, ValidationError
from stablepaths.rng import derive

from conftest import MASTER_SEED


class TestKsDistance:
    def test_samples_vs_own_ecdf_is_zero(self):
        xs = derive(MASTER_SEED, 80).random(1000)
        em = dg.EmpiricalMeasure(xs)
        assert dg.ks_distance(em, em.ecdf, cdf_left=em.ecdf_left) == 0.0

    def test_uniform_calibration(self):
        xs = derive(MASTER_SEED, 81).random(10_000)
        assert dg.ks_distance(xs, lambda x: np.clip(x, 0, 1)) < 0.02

    def test_gross_mismatch(self):
        xs = derive(MASTER_SEED, 82).random(10_000)
        shifted = lambda x: np.clip(x - 0.5, 0.0, 1.0)
        assert dg.ks_distance(xs, shifted) > 0.4

    def test_validation(self):
        with pytest.raises(ValidationError):
            dg.ks_distance(np.array([1.0]), lambda x: x)

    def test_two_sample_identical_is_zero(self):
        xs = derive(MASTER_SEED, 83).random(500)
        assert dg.two_sample_ks(xs, xs) == 0.0

    def test_two_sample_detects_shift(self):
        rng = derive(MASTER_SEED, 84)
        a = rng.random(5000)
        b = rng.random(5000) + 0.5
        assert dg.two_sample_ks(a, b) > 0.4


class TestTailExponent:
    def test_pareto_recovery(self):
        u = derive(MASTER_SEED, 85).random(200_000)
        xs = u ** (-1.0 / 1.5)
        alpha = dg.tail_exponent(xs, 1.5)
        assert abs(alpha - 1.5) / 1.5 < 0.05

    def test_geometric_is_flagged_by_divergence(self):
        """No power law: the fitted exponent grows without bound in n_min."""
        xs = derive(MASTER_SEED, 86).geometric(0.25, size=300_000).astype(float)
        fits = [dg.tail_exponent(xs, m, min_exceed=200) for m in (4.0, 10.0, 20.0)]
        assert fits[1] > fits[0] + 0.5
        assert fits[2] > fits[1] + 0.5

    def test_insufficient_tail_raises(self):
        xs = np.ones(1000) * 2.0
        with pytest.raises(StatisticalError):
            dg.tail_exponent(xs, 5.0)


class TestMetricAndReport:
    def test_metric_check(self):
        m = dg.Metric.check("x", 0.5, "<", 1.0)
        assert m.passed and m.to_json_dict()["kind"] == "<"
        assert not dg.Metric.check("x", 1.0, "<", 1.0).passed
        assert dg.Metric.check("x", 1.0, "<=", 1.0).passed
        with pytest.raises(ValidationError):
            dg.Metric.check("x", 1.0, "!!", 1.0)

    def test_report_shape(self):
        rep = dg.SuiteReport("demo", (dg.Metric.check("a", 1.0, "<=", 2.0),), {"k": 1})
        assert rep.all_pass
        d = rep.to_json_dict()
        assert d["suite"] == "demo" and d["passed"]
        csv = rep.metrics_csv()
        assert csv.splitlines()[0] == "name,value,threshold,kind,passed"


class TestMonotonicitySuite:
    def test_constant_observable_curve_identically_zero(self, spec06):
        obs = maps.ObservableSpec("const", (1.0,))
        rep = dg.monotonicity_suite(
            spec06, obs, [5, 20], 64, seed=MASTER_SEED,
            bound_members=32, bound_per_member=20,
        )
        assert rep.metadata["medians_normalized"] == [0.0, 0.0]
        assert rep.metadata["global_phistar_max"] == 0.0
        assert rep.all_pass

    def test_holder_observable_structure(self, spec06, obs_default):
        rep = dg.monotonicity_suite(
            spec06, obs_default, [20, 400], 128, seed=MASTER_SEED,
            bound_members=64, bound_per_member=50,
        )
        meta = rep.metadata
        assert meta["threshold_k"] >= 1
        assert 0.0 < meta["sign_eps"] <= 1.0
        assert meta["bound"] == pytest.approx((meta["threshold_k"] + 1) * meta["sup_abs"])
        by_name = {m.name: m for m in rep.metrics}
        assert by_name["phistar_bound_violations"].value == 0.0
        assert by_name["eta_hat"].passed

    def test_requires_nonzero_phi0(self, spec06):
        obs = maps.ObservableSpec("affine", (0.0, 1.0))
        with pytest.raises(ValidationError):
            dg.monotonicity_suite(spec06, obs, [5, 10], 8, seed=1)

    def test_deterministic(self, spec06, obs_default):
        a = dg.monotonicity_suite(spec06, obs_default, [5, 50], 64, seed=7,
                                  bound_members=16, bound_per_member=10)
        b = dg.monotonicity_suite(spec06, obs_default, [5, 50], 64, seed=7,
                                  bound_members=16, bound_per_member=10)
        assert a.to_json_dict() == b.to_json_dict()


class TestExcursionBoundSuite:
    def test_monotone_observable_reduces_to_return_term(self, spec06):
        obs = maps.ObservableSpec("const", (1.0,))
        rep = dg.excursion_bound_check(
            spec06, obs, 50, 1.0, 10, seed=MASTER_SEED,
            trend_grid=[20, 200], trend_members=32,
        )
        by_name = {m.name: m for m in rep.metrics}
        assert by_name["lower_bound_violations"].value == 0.0
        assert rep.all_pass

    def test_holder_observable_small(self, spec06, obs_default):
        rep = dg.excursion_bound_check(
            spec06, obs_default, 80, 0.5, 8, seed=MASTER_SEED,
            trend_grid=[40, 400], trend_members=32,
        )
        by_name = {m.name: m for m in rep.metrics}
        assert by_name["lower_bound_violations"].value == 0.0
        assert rep.metadata["median_margin"] > 0.0


class TestLapSllnsSuite:
    def test_small_run_passes(self, spec06):
        rep = dg.lap_sllns(
            spec06, 1.0, [500, 5000], 15, seed=MASTER_SEED,
            kac_members=200, kac_per_member=300, kac_discard=30,
        )
        assert rep.all_pass
        meta = rep.metadata
        assert len(meta["sup_error_medians"]) == 2
        assert 0.2 < meta["mu_y_hat"] < 0.5
        assert abs(meta["mu_y_hat"] * meta["mean_return"] - 1) < 0.02

    def test_deterministic(self, spec06):
        a = dg.lap_sllns(spec06, 1.0, [200, 2000], 7, seed=3,
                         kac_members=50, kac_per_member=50, kac_discard=5)
        b = dg.lap_sllns(spec06, 1.0, [200, 2000], 7, seed=3,
                         kac_members=50, kac_per_member=50, kac_discard=5)
        assert a.to_json_dict() == b.to_json_dict()


class TestWipMarginalSuite:
    def test_structure_and_laws(self, spec06, obs_default, h_half_hq):
        rep = dg.wip_marginal_suite(
            spec06, obs_default, [50, 800], 600, h_half_hq, seed=MASTER_SEED,
        )
        meta = rep.metadata
        law_full = meta["law_full"]
        law_ind = meta["law_induced"]
        # induced law inflates the scale constant by the mean return time
        assert law_ind["c"] == pytest.approx(law_full["c"] / meta["mu_y_hat"], rel=1e-12)
        assert len(meta["induced_ks"]) == 2
        assert len(meta["full_ks"]) == 2
        by_name = {m.name: m for m in rep.metrics}
        assert "induced_ks_final" in by_name
        assert meta["strong_ks"] < 0.2

    def test_identical_density_and_seed_gives_zero_two_sample_ks(self, spec06, obs_default):
        d = maps.DensitySpec("uniform")
        x0 = d.sample(derive(9, 0), size=200)
        w = inducing.birkhoff_ensemble(spec06, obs_default, x0, 100)
        assert dg.two_sample_ks(w, w) == 0.0

    def test_needs_nonzero_phi0(self, spec06, h_half_hq):
        obs = maps.ObservableSpec("affine", (0.0, 1.0))
        with pytest.raises(ValidationError):
            dg.wip_marginal_suite(spec06, obs, [10, 20], 50, h_half_hq, seed=1)

    def test_deterministic(self, spec06, obs_default, h_half_hq):
        kwargs = dict(
            seed=11, kac_members=50, kac_per_member=100, kac_discard=10,
        )
        a = dg.wip_marginal_suite(spec06, obs_default, [20, 80], 100, h_half_hq, **kwargs)
        b = dg.wip_marginal_suite(spec06, obs_default, [20, 80], 100, h_half_hq, **kwargs)
        assert a.to_json_dict() == b.to_json_dict()


class TestTopologySuite:
    def test_structure(self, spec06, obs_default, h_half_hq):
        law = stable.from_lsv_params(spec06.gamma, obs_default.phi_at_zero, h_half_hq)
        rep = dg.topology_probe(
            spec06, obs_default, [50, 500], 400, law, seed=MASTER_SEED,
            levy_step=1.0 / 256, levy_paths=400,
        )
        by_name = {m.name: m for m in rep.metrics}
        assert by_name["jump_bound_violations"].value == 0.0
        assert by_name["levy_max_jump_median_spread"].passed
        assert len(rep.metadata["sup_ks"]) == 2

    def test_levy_median_positive(self, spec06, obs_default, h_half_hq):
        law = stable.from_lsv_params(spec06.gamma, obs_default.phi_at_zero, h_half_hq)
        rep = dg.topology_probe(
            spec06, obs_default, [50, 500], 200, law, seed=MASTER_SEED,
            levy_step=1.0 / 256, levy_paths=300,
        )
        assert min(rep.metadata["levy_max_jump_medians"]) > 0.1


class TestTailSuite:
    def test_small_run(self, spec06):
        rep = dg.tail_suite(
            spec06, seed=MASTER_SEED, members=400, per_member=400, discard=40,
            rel_threshold=0.12, pareto_rel_threshold=0.06,
        )
        assert rep.metadata["excursions"] == 160_000
        by_name = {m.name: m for m in rep.metrics}
        assert by_name["alpha_rel_error"].passed
        assert by_name["pareto_control_rel_error"].passed
