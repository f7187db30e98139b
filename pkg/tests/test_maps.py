import math

import mpmath
import numpy as np
import pytest

from stablepaths import maps
from stablepaths.errors import DomainError, ValidationError
from stablepaths.rng import derive

from conftest import MASTER_SEED


class TestLsvMap:
    @pytest.mark.parametrize("gamma", [0.51, 0.6, 0.75, 0.95])
    def test_half_maps_to_one_exactly(self, gamma):
        assert maps.lsv_map(maps.MapSpec(gamma), 0.5) == 1.0

    def test_neutral_fixed_point(self, spec06):
        assert maps.lsv_map(spec06, 0.0) == 0.0

    def test_right_branch(self, spec06):
        assert maps.lsv_map(spec06, 0.75) == 0.5

    def test_domain_error(self, spec06):
        with pytest.raises(DomainError):
            maps.lsv_map(spec06, 1.5)
        with pytest.raises(DomainError):
            maps.lsv_map(spec06, -0.1)

    def test_strictly_increasing_on_both_branches(self, spec06):
        left = np.linspace(0.0, 0.5, 20001)
        vals = [maps.lsv_map(spec06, x) for x in left]
        assert np.all(np.diff(vals) > 0)
        right = np.linspace(0.5 + 1e-12, 1.0, 20001)
        vals = [maps.lsv_map(spec06, x) for x in right]
        assert np.all(np.diff(vals) > 0)

    def test_orbit_confinement_million_starts(self, spec06):
        x = derive(MASTER_SEED, 1).random(1_000_000)
        for _ in range(12):
            x = maps.step_array(spec06, x)
            assert np.all((x >= 0.0) & (x <= 1.0))

    def test_gamma_validation(self):
        with pytest.raises(ValidationError):
            maps.MapSpec(0.0)
        with pytest.raises(ValidationError):
            maps.MapSpec(1.0)
        with pytest.raises(ValidationError):
            maps.MapSpec(0.6, kind="tent")


class TestIterateOrbit:
    def test_fixed_point_at_one(self, spec06):
        assert list(maps.iterate_orbit(spec06, 1.0, 3)) == [1.0, 1.0, 1.0]

    def test_chained_branches(self, spec06):
        assert list(maps.iterate_orbit(spec06, 0.75, 3)) == [0.75, 0.5, 1.0]

    def test_empty_orbit(self, spec06):
        assert list(maps.iterate_orbit(spec06, 0.3, 0)) == []

    def test_matches_high_precision_oracle(self, spec06):
        """40-digit re-evaluation of the orbit, compared relatively."""
        mpmath.mp.dps = 40
        gamma = mpmath.mpf("0.6")
        x = mpmath.mpf("0.3")
        oracle = []
        for _ in range(10):
            oracle.append(x)
            if x <= mpmath.mpf("0.5"):
                x = x * (1 + (2 * x) ** gamma)
            else:
                x = 2 * x - 1
        mine = list(maps.iterate_orbit(spec06, 0.3, 10))
        for a, b in zip(mine, oracle):
            assert abs(a - float(b)) <= 1e-12 * max(1.0, abs(float(b)))


class TestBirkhoffSum:
    def test_constant_observable(self, spec06):
        obs = maps.ObservableSpec("const", (1.0,))
        assert maps.birkhoff_sum(spec06, obs, 0.3, 7) == 7.0

    def test_orbit_fixed_at_zero(self, spec06):
        obs = maps.ObservableSpec("affine", (0.0, 1.0))
        for n in (0, 1, 5, 50):
            assert maps.birkhoff_sum(spec06, obs, 0.0, n) == 0.0

    def test_fold_oracle(self):
        rng = derive(MASTER_SEED, 2)
        for _ in range(5):
            spec = maps.MapSpec(float(rng.uniform(0.52, 0.95)))
            obs = maps.ObservableSpec(
                "power",
                (float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)), float(rng.uniform(0.3, 1.0))),
                centering_offset=float(rng.uniform(-0.5, 0.5)),
            )
            x0 = float(rng.random())
            direct = maps.birkhoff_sum(spec, obs, x0, 100)
            fold = sum(obs.evaluate(x) for x in maps.iterate_orbit(spec, x0, 100))
            assert abs(direct - fold) <= 1e-12 * max(1.0, abs(fold))


class TestSampleInitial:
    def test_uniform_seed_determinism(self):
        d = maps.DensitySpec("uniform")
        a = maps.sample_initial(d, derive(MASTER_SEED, 3))
        b = maps.sample_initial(d, derive(MASTER_SEED, 3))
        assert a == b

    def test_polynomial_mean(self):
        d = maps.DensitySpec("polynomial", (0.0, 2.0))
        xs = d.sample(derive(MASTER_SEED, 4), size=100_000)
        assert abs(xs.mean() - 2.0 / 3.0) < 0.01

    def test_uniform_ks_calibration(self):
        d = maps.DensitySpec("uniform")
        xs = np.sort(d.sample(derive(MASTER_SEED, 5), size=100_000))
        n = xs.size
        ks = max(
            np.max(np.arange(1, n + 1) / n - xs),
            np.max(xs - np.arange(0, n) / n),
        )
        assert ks < 0.01

    def test_histogram_sampling_and_cdf(self):
        d = maps.DensitySpec("histogram", (0.0, 0.25, 1.0, 0.8, 0.2))
        xs = d.sample(derive(MASTER_SEED, 6), size=50_000)
        assert np.all((xs >= 0) & (xs <= 1))
        assert abs((xs < 0.25).mean() - 0.8) < 0.01
        assert d.cdf(0.25) == pytest.approx(0.8)

    def test_validation(self):
        with pytest.raises(ValidationError):
            maps.DensitySpec("polynomial", (1.0, 2.0))  # integrates to 2
        with pytest.raises(ValidationError):
            maps.DensitySpec("polynomial", (2.0, -4.0))  # negative on (1/2, 1]
        with pytest.raises(ValidationError):
            maps.DensitySpec("histogram", (0.0, 0.5, 0.9, 0.5, 0.5))  # last edge != 1
        with pytest.raises(ValidationError):
            maps.DensitySpec("cauchy")


class TestInvariantDensity:
    def test_masses_normalized(self, spec06):
        est = maps.estimate_invariant_density(spec06, 200_000, 64, 1000, derive(MASTER_SEED, 7))
        assert abs(est.masses.sum() - 1.0) <= 1e-12

    def test_neutral_point_concentration(self, spec06):
        est = maps.estimate_invariant_density(spec06, 2_000_000, 128, 5000, derive(MASTER_SEED, 8))
        uniform_mass = 1.0 / 128
        assert est.masses[0] > 3 * uniform_mass

    def test_seed_stability_of_h_half(self, dens_hq_pair):
        a, b = dens_hq_pair
        assert abs(a.h_half - b.h_half) / a.h_half < 0.05

    def test_quality_warning(self, spec06):
        est = maps.estimate_invariant_density(spec06, 5000, 100, 100, derive(MASTER_SEED, 9))
        assert est.quality_warning

    def test_csv_format(self, spec06):
        est = maps.estimate_invariant_density(spec06, 50_000, 16, 100, derive(MASTER_SEED, 10))
        lines = est.to_csv().strip().splitlines()
        assert lines[0] == "bin_left,bin_right,mass"
        assert len(lines) == 17


class TestPreimageSequence:
    def test_first_element(self, spec06):
        assert maps.preimage_sequence(spec06, 1).tolist() == [0.5]

    def test_defining_residual(self, spec06):
        xs = maps.preimage_sequence(spec06, 40)
        for n in range(1, 40):
            assert abs(maps.lsv_map(spec06, xs[n]) - xs[n - 1]) < 1e-12

    def test_strictly_decreasing(self, spec06):
        xs = maps.preimage_sequence(spec06, 50)
        assert np.all(np.diff(xs) < 0)
        assert xs[49] < xs[9]

    def test_k_validation(self, spec06):
        with pytest.raises(DomainError):
            maps.preimage_sequence(spec06, 0)


class TestObservableSpec:
    def test_value_at_zero_is_uncentered(self):
        obs = maps.ObservableSpec("power", (1.0, -0.9, 0.8), centering_offset=0.4)
        assert obs.value_at_zero == 1.0
        assert obs.phi_at_zero == pytest.approx(0.6)

    def test_holder_eta_recorded(self):
        assert maps.ObservableSpec("power", (0.0, 1.0, 0.7)).holder_eta == 0.7
        assert maps.ObservableSpec("affine", (0.0, 1.0)).holder_eta == 1.0

    def test_sup_abs_against_grid(self):
        rng = derive(MASTER_SEED, 11)
        for _ in range(20):
            obs = maps.ObservableSpec(
                "power",
                (float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)), float(rng.uniform(0.3, 1.0))),
                indicators=((float(rng.uniform(-1, 1)), 0.5, 1.0),),
                centering_offset=float(rng.uniform(-0.5, 0.5)),
            )
            grid = np.linspace(0, 1, 20001)
            grid_sup = np.max(np.abs(obs.evaluate(grid)))
            assert obs.sup_abs() >= grid_sup - 1e-12
            assert obs.sup_abs() <= grid_sup + 0.01

    def test_first_positive_interval(self):
        # centered phi(x) = 0.4 - 0.9 x^0.8 crosses zero at (0.4/0.9)^(1/0.8)
        obs = maps.ObservableSpec("power", (1.0, -0.9, 0.8), centering_offset=0.6)
        root = (0.4 / 0.9) ** (1 / 0.8)
        assert obs.first_positive_interval() == pytest.approx(root, abs=1e-9)

    def test_validation(self):
        with pytest.raises(ValidationError):
            maps.ObservableSpec("power", (1.0, 1.0, 1.5))
        with pytest.raises(ValidationError):
            maps.ObservableSpec("affine", (1.0,))
        with pytest.raises(ValidationError):
            maps.ObservableSpec("spline", (1.0,))
        with pytest.raises(ValidationError):
            maps.ObservableSpec("const", (1.0,), indicators=((1.0, 0.7, 0.2),))

    def test_centering_metadata_recorded(self, obs_default):
        assert obs_default.calibration["orbit_length"] == 2_000_000
        assert obs_default.calibration["burn_in"] == 10_000
