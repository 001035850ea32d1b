# tests/test_experiments.py
"""
Test suite for dimension-sweep experiments and presets.
"""

import numpy as np
import pytest

from core.constructions import build_coordinate_operator, build_dense_form, build_ksz_form
from core.norm_estimator import NormKind, NormMethod
from processing.experiment_runner import (
    KSZ_N_GRID,
    PRESETS,
    ExperimentConfig,
    ExperimentRunner,
    RatioSeries,
    Scenario,
    get_preset,
    load_experiment,
    run_ratio_experiment,
    scenario_presets,
    unit_vector_probe,
)
from processing.fitting import Verdict
from utils.exceptions import ConfigurationError, DegenerateInputError

SHORT_GRID = (2, 4, 8, 16)


class TestExperimentConfig:
    """Test experiment validation and overrides"""

    def test_grid_too_short(self):
        """Test a grid needs at least three dimensions"""
        with pytest.raises(ConfigurationError) as exc:
            ExperimentConfig(Scenario.COORDINATE_C0, 2, 2.0, 2.0, n_grid=(8,))
        assert exc.value.details['config_key'] == 'n_grid'

    def test_grid_not_increasing(self):
        """Test a grid must be strictly increasing"""
        with pytest.raises(ConfigurationError):
            ExperimentConfig(Scenario.COORDINATE_C0, 2, 2.0, 2.0, n_grid=(2, 8, 4))

    def test_seeds_sorted_and_deduplicated(self):
        """Test seeds are sorted and deduplicated"""
        experiment = ExperimentConfig(Scenario.KSZ_SCALAR, 2, 2.0, 2.0, seeds=(3, 1, 3))
        assert experiment.seeds == (1, 3)

    def test_default_norm_methods(self):
        """Test each scenario picks its default norm method"""
        assert ExperimentConfig(Scenario.KSZ_SCALAR, 2, 2.0, 2.0).norm_method is NormMethod.ASCENT
        assert ExperimentConfig(Scenario.DIAGONAL_SCALAR, 2, 4.0, 2.0).norm_method is NormMethod.ANALYTIC

    def test_no_analytic_norm_for_random_forms(self):
        """Test random forms cannot use the analytic norm"""
        with pytest.raises(ConfigurationError):
            ExperimentConfig(Scenario.KSZ_SCALAR, 2, 2.0, 2.0, norm_method='analytic')

    def test_custom_needs_factory(self):
        """Test custom scenarios need a form factory"""
        with pytest.raises(ConfigurationError):
            ExperimentConfig(Scenario.CUSTOM, 2, 2.0, 2.0)

    def test_q_below_one(self):
        """Test q below one is rejected"""
        with pytest.raises(ConfigurationError):
            ExperimentConfig(Scenario.COORDINATE_C0, 2, 2.0, 0.5)

    def test_string_overrides(self):
        """Test string overrides are parsed and None is ignored"""
        experiment = get_preset('diagonal-m2').with_overrides({'n_grid': '2,4,8', 'p': '3', 'm': None})
        assert experiment.n_grid == (2, 4, 8)
        assert experiment.p == 3.0
        assert experiment.m == 2

    def test_unknown_override(self):
        """Test unknown override keys are rejected"""
        with pytest.raises(ConfigurationError):
            get_preset('diagonal-m2').with_overrides({'colour': 'red'})

    def test_malformed_override(self):
        """Test unparseable override values are rejected"""
        with pytest.raises(ConfigurationError):
            get_preset('diagonal-m2').with_overrides({'m': 'two'})

    def test_region_check(self):
        """Test the region check on a preset and an outside point"""
        assert get_preset('ksz-m2').check_region() is None
        outside = ExperimentConfig(Scenario.DIAGONAL_SCALAR, 2, 1.0, 1.0)
        assert outside.check_region() is not None


class TestPresets:
    """Test the canned experiments"""

    def test_all_presets_present(self):
        """Test every preset is listed and inside its region"""
        presets = scenario_presets()
        assert [p.name for p in presets] == list(PRESETS)
        assert all(p.check_region() is None for p in presets)

    def test_deterministic(self):
        """Test presets are the same on every call"""
        assert scenario_presets() == scenario_presets()

    def test_unknown_preset(self):
        """Test an unknown preset name is rejected"""
        with pytest.raises(ConfigurationError):
            get_preset('nope')

    def test_config_section_then_overrides(self, tmp_config):
        """Test explicit overrides win over the config section"""
        experiment = load_experiment('diagonal-m2', tmp_config)
        assert experiment.n_grid == (2, 4, 8, 16)
        experiment = load_experiment('diagonal-m2', tmp_config, {'n_grid': [4, 8, 16]})
        assert experiment.n_grid == (4, 8, 16)

    def test_random_sign_preset_keeps_its_grid(self, tmp_config):
        """Test the configured default grid applies only to presets without a grid of their own"""
        tmp_config.set('experiments', 'n_grid', '2,4,8')
        tmp_config.set('experiments', 'seeds', '7,8')
        ksz = load_experiment('ksz-m2', tmp_config)
        assert ksz.n_grid == KSZ_N_GRID
        assert ksz.seeds == (7, 8)
        coordinate = load_experiment('coordinate-c0-m2', tmp_config)
        assert coordinate.n_grid == (2, 4, 8)
        assert coordinate.seeds == (0,)


class TestUnitVectorProbe:
    """Test the basis-vector witness quotient"""

    def test_coordinate_operator(self):
        """Test the basis witness for the coordinate operator"""
        form = build_coordinate_operator(2, 4)
        assert unit_vector_probe(form, 2, 1.0) == pytest.approx(4.0)

    def test_ksz_numerator(self):
        """Test the basis witness numerator for a random-sign form"""
        n, m, p = 6, 3, 1.5
        form = build_ksz_form(m, n, seed=2)
        assert unit_vector_probe(form, p, 1.0) == pytest.approx(n ** (m / p))

    def test_zero_norm(self):
        """Test a zero norm is rejected"""
        with pytest.raises(DegenerateInputError):
            unit_vector_probe(build_coordinate_operator(2, 3), 2, 0.0)


class TestExperimentRunner:
    """Test ratio series and fitted slopes"""

    @pytest.fixture
    def runner(self, tmp_config):
        return ExperimentRunner(tmp_config)

    def test_coordinate_m2(self, runner):
        """Test the bilinear coordinate slope is exactly one"""
        experiment = get_preset('coordinate-c0-m2').with_overrides({'n_grid': SHORT_GRID})
        outcome = runner.run_and_fit(experiment, verify=True)
        assert outcome.summary.slope == pytest.approx(1.0, abs=1e-9)
        assert outcome.report.verdict is Verdict.CONSISTENT

    def test_coordinate_m3(self, runner):
        """Test the trilinear coordinate slope is exactly 3/2"""
        outcome = runner.run_and_fit(get_preset('coordinate-c0-m3'), verify=True)
        assert outcome.summary.slope == pytest.approx(1.5, abs=1e-9)
        assert outcome.report.verdict is Verdict.CONSISTENT

    def test_diagonal_analytic(self, runner):
        """Test the diagonal slope with analytic norms"""
        outcome = runner.run_and_fit(get_preset('diagonal-m2'), verify=True)
        assert outcome.summary.slope == pytest.approx(0.25, abs=1e-9)
        assert outcome.report.verdict is Verdict.CONSISTENT
        point = outcome.series[0].points[-1]
        assert point.norm_kind is NormKind.EXACT_ANALYTIC
        assert point.weak_product == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_ascent(self, runner):
        """Test the diagonal slope with ascent norms"""
        experiment = get_preset('diagonal-m2').with_overrides({'norm_method': 'ascent'})
        outcome = runner.run_and_fit(experiment)
        assert outcome.summary.slope == pytest.approx(0.25, abs=0.05)
        assert outcome.series[0].points[0].norm_kind is NormKind.ASCENT_LOWER_ESTIMATE

    def test_workers_do_not_change_results(self, tmp_config):
        """Test threaded runs match serial runs"""
        experiment = get_preset('ksz-m2').with_overrides({'n_grid': (2, 4, 8), 'seeds': (0, 1)})
        serial = ExperimentRunner(tmp_config, workers=1).run(experiment)
        threaded = ExperimentRunner(tmp_config, workers=3).run(experiment)
        assert [s.to_dict() for s in serial] == [s.to_dict() for s in threaded]

    def test_series_round_trip(self, runner):
        """Test a series survives its dict form"""
        series = runner.run(get_preset('coordinate-c0-m2').with_overrides({'n_grid': SHORT_GRID}))
        assert RatioSeries.from_dict(series[0].to_dict()) == series[0]
        assert series[0].ns == list(SHORT_GRID)

    def test_custom_factory(self, tmp_config):
        """Test a custom form factory drives the sweep"""
        def factory(n, seed):
            return build_dense_form(np.eye(n), (2.0, 2.0), seed)

        experiment = ExperimentConfig(Scenario.CUSTOM, 2, 1.0, 2.0, n_grid=SHORT_GRID,
                                      norm_method='bruteforce', form_factory=factory)
        series = run_ratio_experiment(experiment, tmp_config)
        assert series[0].ratios == pytest.approx(list(SHORT_GRID))

    @pytest.mark.slow
    def test_ksz_median_slope(self, tmp_config):
        """Test the random-sign reproduction over five seeds up to n = 512"""
        tmp_config.set('numerics', 'ascent_restarts', '16')
        outcome = ExperimentRunner(tmp_config).run_and_fit(load_experiment('ksz-m2', tmp_config), verify=True)
        assert outcome.experiment.n_grid == KSZ_N_GRID
        assert len(outcome.fits) == 5
        assert 0.35 <= outcome.summary.slope <= 0.65
        assert outcome.report.verdict is Verdict.CONSISTENT
