# processing/experiment_runner.py
"""
Dimension-sweep experiments: build a witness operator for every n of a grid,
evaluate it on unit-basis families and record the summing quotient.
"""

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from core.bound_calculator import (
    IndexQuery,
    ScalarField,
    SpaceDescriptor,
    SpaceKind,
    Variant,
    conjugate_exponent,
    exact_index_c0,
    exact_index_scalar,
)
from core.constructions import (
    MultilinearForm,
    VectorFamily,
    build_coordinate_operator,
    build_diagonal_form,
    build_ksz_form,
    coefficient_budget,
)
from core.norm_estimator import NormEstimate, NormEstimator, NormKind, NormMethod
from core.summing import mixed_power_sum, output_norms, power_sum
from processing.fitting import ExponentFit, VerificationReport, fit_exponent, median_fit, verify_against_bounds
from utils.exceptions import (
    ConfigurationError,
    DegenerateInputError,
    InternalInconsistencyError,
    RegionError,
)
from utils.seeding import derive_seed

logger = logging.getLogger(__name__)

DEFAULT_N_GRID = (2, 4, 8, 16, 32, 64)
# Reaches the dimensions where the random-sign norm grows like 2*sqrt(n)
KSZ_N_GRID = (2, 4, 8, 16, 32, 64, 128, 256, 512)
DEFAULT_SEEDS = (0, 1, 2, 3, 4)
ANALYTIC_TOLERANCE = 1e-9
RANDOMIZED_TOLERANCE = 0.15
WEAK_NORM_TOLERANCE = 1e-12


class Scenario(str, Enum):
    KSZ_SCALAR = 'ksz_scalar'
    DIAGONAL_SCALAR = 'diagonal_scalar'
    COORDINATE_C0 = 'coordinate_c0'
    CUSTOM = 'custom'


# Region label of the exactness result each witness scenario realizes
WITNESS_REGIONS = {
    Scenario.KSZ_SCALAR: 'scalar-exact(a)',
    Scenario.DIAGONAL_SCALAR: 'scalar-exact(b)',
    Scenario.COORDINATE_C0: 'c0-exact',
}


def _default_cotype(exponent: float, config=None) -> float:
    if config is not None:
        return config.get_cotype(SpaceKind.SEQUENCE_SPACE.value, exponent)
    return math.inf if math.isinf(exponent) else max(exponent, 2.0)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    m: int
    p: float
    q: float
    n_grid: Tuple[int, ...] = DEFAULT_N_GRID
    seeds: Tuple[int, ...] = (0,)
    norm_method: Optional[NormMethod] = None
    name: Optional[str] = None
    field: ScalarField = ScalarField.REAL
    form_factory: Optional[Callable[[int, int], MultilinearForm]] = dataclasses.field(default=None, compare=False)
    tolerance: Optional[float] = None

    def __post_init__(self):
        scenario = Scenario(self.scenario)
        object.__setattr__(self, 'scenario', scenario)
        object.__setattr__(self, 'field', ScalarField(self.field))

        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise ConfigurationError(f"m must be an integer >= 1, got {self.m}", 'm')
        if not self.p > 0 or math.isinf(self.p):
            raise ConfigurationError(f"p must be positive and finite, got {self.p}", 'p')
        if not self.q >= 1 or math.isinf(self.q):
            raise ConfigurationError(f"q must lie in [1, inf), got {self.q}", 'q')

        grid = tuple(int(n) for n in self.n_grid)
        if len(grid) < 3:
            raise ConfigurationError("n_grid needs at least 3 dimensions for a slope", 'n_grid')
        if grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError(f"n_grid must be strictly increasing positive integers: {grid}", 'n_grid')
        object.__setattr__(self, 'n_grid', grid)

        seeds = tuple(sorted(set(int(s) for s in self.seeds)))
        if not seeds:
            raise ConfigurationError("At least one seed is required", 'seeds')
        object.__setattr__(self, 'seeds', seeds)

        method = self.norm_method
        if method is None:
            method = NormMethod.ASCENT if scenario in (Scenario.KSZ_SCALAR, Scenario.CUSTOM) else NormMethod.ANALYTIC
        method = NormMethod(method)
        if method is NormMethod.ANALYTIC and scenario in (Scenario.KSZ_SCALAR, Scenario.CUSTOM):
            raise ConfigurationError(f"No analytic norm for the {scenario.value} scenario", 'norm_method')
        object.__setattr__(self, 'norm_method', method)

        if scenario is Scenario.CUSTOM and self.form_factory is None:
            raise ConfigurationError("The custom scenario needs a form factory", 'form_factory')
        if self.name is None:
            object.__setattr__(self, 'name', scenario.value)

    @property
    def domain_exponent(self) -> float:
        """q*, the exponent of the witness domain l_{q*}."""
        return conjugate_exponent(self.q)

    @property
    def randomized(self) -> bool:
        return self.scenario is Scenario.KSZ_SCALAR or self.norm_method is not NormMethod.ANALYTIC

    @property
    def extremal(self) -> bool:
        """Unit-basis witnesses attain the exact index for the three built-in operators."""
        return self.scenario in WITNESS_REGIONS

    def verification_tolerance(self, config=None) -> float:
        if self.tolerance is not None:
            return self.tolerance
        if config is None:
            return RANDOMIZED_TOLERANCE if self.randomized else ANALYTIC_TOLERANCE
        key = 'randomized_tolerance' if self.randomized else 'analytic_tolerance'
        fallback = RANDOMIZED_TOLERANCE if self.randomized else ANALYTIC_TOLERANCE
        return config.getfloat('experiments', key, fallback)

    def index_query(self, config=None) -> IndexQuery:
        domain = SpaceDescriptor.dual_sequence_space(self.q, _default_cotype(self.domain_exponent, config))
        codomain = SpaceDescriptor.c0() if self.scenario is Scenario.COORDINATE_C0 else SpaceDescriptor.scalar()
        return IndexQuery(self.m, self.p, self.q, Variant.MULTILINEAR, self.field, (domain,), codomain)

    def check_region(self) -> Optional[str]:
        """None when (m, p, q) lies in the region the scenario's witness realizes, else the reason."""
        expected = WITNESS_REGIONS.get(self.scenario)
        if expected is None:
            return None
        try:
            if self.scenario is Scenario.COORDINATE_C0:
                result = exact_index_c0(self.m, self.p, self.q)
            else:
                result = exact_index_scalar(self.m, self.p, self.q)
        except RegionError as e:
            return e.message
        if result.region != expected:
            return f"(m={self.m}, p={self.p}, q={self.q}) lies in {result.region}, not {expected}"
        return None

    def with_overrides(self, overrides: Dict[str, object]) -> 'ExperimentConfig':
        """Copy with values from a config section or the command line; strings are parsed."""
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            try:
                changes[key] = self._parse_override(key, value)
            except ValueError as e:
                raise ConfigurationError(f"Malformed value for '{key}': {value} ({e})", key)
        try:
            return dataclasses.replace(self, **changes)
        except ValueError as e:
            raise ConfigurationError(f"Malformed experiment setting: {e}")

    @staticmethod
    def _parse_override(key, value):
        if key == 'm':
            return int(value)
        if key in ('p', 'q', 'tolerance'):
            return float(value)
        if key in ('n_grid', 'seeds'):
            if isinstance(value, str):
                value = [item for item in value.split(',') if item.strip()]
            return tuple(int(item) for item in value)
        if key in ('norm_method', 'field', 'scenario', 'name'):
            return value
        raise ConfigurationError(f"Unknown experiment setting '{key}'", key)

    def to_dict(self):
        return {
            'name': self.name,
            'scenario': self.scenario.value,
            'm': self.m,
            'p': self.p,
            'q': self.q,
            'n_grid': list(self.n_grid),
            'seeds': list(self.seeds),
            'norm_method': self.norm_method.value,
            'field': self.field.value,
        }


@dataclass(frozen=True)
class RatioPoint:
    n: int
    mixed_sum: float
    norm: float
    norm_kind: NormKind
    converged: bool
    weak_product: float
    ratio: float

    def to_dict(self):
        return {
            'n': self.n,
            'mixed_sum': self.mixed_sum,
            'norm': self.norm,
            'norm_kind': self.norm_kind.value,
            'converged': self.converged,
            'weak_product': self.weak_product,
            'ratio': self.ratio,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(int(data['n']), float(data['mixed_sum']), float(data['norm']), NormKind(data['norm_kind']),
                   bool(data['converged']), float(data['weak_product']), float(data['ratio']))


@dataclass(frozen=True)
class RatioSeries:
    scenario: str
    seed: int
    m: int
    p: float
    q: float
    points: Tuple[RatioPoint, ...]

    @property
    def ns(self) -> List[int]:
        return [point.n for point in self.points]

    @property
    def ratios(self) -> List[float]:
        return [point.ratio for point in self.points]

    def to_dict(self):
        return {
            'scenario': self.scenario,
            'seed': self.seed,
            'm': self.m,
            'p': self.p,
            'q': self.q,
            'points': [point.to_dict() for point in self.points],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(str(data['scenario']), int(data['seed']), int(data['m']), float(data['p']), float(data['q']),
                   tuple(RatioPoint.from_dict(point) for point in data['points']))


@dataclass
class ExperimentOutcome:
    experiment: ExperimentConfig
    series: List[RatioSeries]
    fits: List[ExponentFit]
    summary: ExponentFit
    report: Optional[VerificationReport] = None


def unit_vector_probe(form: MultilinearForm, p: float, norm) -> float:
    """
    (sum over basis tuples of ||T(e_{k_1}, ..., e_{k_m})||^p)^{1/p} / ||T||,
    the canonical lower-bound witness quotient.
    """
    value = norm.value if isinstance(norm, NormEstimate) else float(norm)
    if value == 0:
        raise DegenerateInputError("The form has zero norm", quantity='norm')
    families = [VectorFamily.unit_basis(form.dim, e) for e in form.domain_exponents]
    return power_sum(output_norms(form, families), p) / value


class ExperimentRunner:
    """Runs ratio experiments with numerics settings from a Config."""

    def __init__(self, config=None, workers: Optional[int] = None):
        """
        Args:
            config: Configuration object, or None for built-in defaults
            workers: Thread count for (seed, n) work items; overrides [experiments] workers
        """
        self.config = config
        self.estimator = NormEstimator(config)
        if workers is None:
            workers = config.getint('experiments', 'workers', 1) if config is not None else 1
        self.workers = max(1, int(workers))
        self.budget = config.get_max_coefficients() if config is not None else coefficient_budget()
        self.logger = logging.getLogger(__name__)

    def build_form(self, experiment: ExperimentConfig, n: int, seed: int) -> MultilinearForm:
        exponent = experiment.domain_exponent
        if experiment.scenario is Scenario.KSZ_SCALAR:
            return build_ksz_form(experiment.m, n, derive_seed(seed, n), exponent, self.budget)
        if experiment.scenario is Scenario.DIAGONAL_SCALAR:
            return build_diagonal_form(experiment.m, n, exponent)
        if experiment.scenario is Scenario.COORDINATE_C0:
            return build_coordinate_operator(experiment.m, n, exponent)
        return experiment.form_factory(n, seed)

    def run_point(self, experiment: ExperimentConfig, seed: int, n: int) -> RatioPoint:
        form = self.build_form(experiment, n, seed)
        families = [VectorFamily.unit_basis(n, exponent, dim=form.dim) for exponent in form.domain_exponents]

        weak_product = 1.0
        for slot, family in enumerate(families):
            weak = self.estimator.weak_norm(family, experiment.q, seed=derive_seed(seed, n, slot))
            if abs(weak.value - 1.0) > WEAK_NORM_TOLERANCE:
                raise InternalInconsistencyError(
                    f"Weak norm of the unit basis is {weak.value}, expected 1",
                    {'n': n, 'slot': slot, 'q': experiment.q})
            weak_product *= weak.value

        mixed_sum = mixed_power_sum(form, families, experiment.p, self.budget)
        norm = self.estimator.estimate(form, experiment.norm_method, seed=derive_seed(seed, n))
        if norm.value == 0:
            raise DegenerateInputError(f"Zero norm estimate at n={n}", quantity='norm')
        if not norm.converged:
            self.logger.warning("Norm ascent did not converge at n=%d seed=%d", n, seed)

        ratio = mixed_sum / (norm.value * weak_product)
        return RatioPoint(n, mixed_sum, norm.value, norm.kind, norm.converged, weak_product, ratio)

    def run(self, experiment: ExperimentConfig) -> List[RatioSeries]:
        warning = experiment.check_region()
        if warning:
            self.logger.warning("Scenario %s outside its witness region: %s", experiment.name, warning)

        items = [(seed, n) for seed in experiment.seeds for n in experiment.n_grid]
        self.logger.info("Running %s over %d work items with %d worker(s)", experiment.name, len(items), self.workers)

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(lambda item: self.run_point(experiment, *item), items))
        else:
            results = [self.run_point(experiment, *item) for item in items]
        points = dict(zip(items, results))

        series = [
            RatioSeries(experiment.name, seed, experiment.m, experiment.p, experiment.q,
                        tuple(points[(seed, n)] for n in experiment.n_grid))
            for seed in sorted(experiment.seeds)
        ]
        self.logger.info("Finished %s", experiment.name)
        return series

    def run_and_fit(self, experiment: ExperimentConfig, verify: bool = False) -> ExperimentOutcome:
        series = self.run(experiment)
        fits = [fit_exponent(s) for s in series]
        summary = median_fit(fits)
        report = None
        if verify:
            report = verify_against_bounds(summary, experiment.index_query(self.config),
                                           experiment.verification_tolerance(self.config), experiment.extremal)
            self.logger.info("%s: slope %.6g, verdict %s", experiment.name, summary.slope, report.verdict.value)
        return ExperimentOutcome(experiment, series, fits, summary, report)


def run_ratio_experiment(experiment: ExperimentConfig, config=None) -> List[RatioSeries]:
    return ExperimentRunner(config).run(experiment)


PRESETS = {
    'ksz-m2': dict(scenario=Scenario.KSZ_SCALAR, m=2, p=2.0, q=2.0, n_grid=KSZ_N_GRID, seeds=DEFAULT_SEEDS),
    'diagonal-m2': dict(scenario=Scenario.DIAGONAL_SCALAR, m=2, p=4.0, q=2.0),
    'coordinate-c0-m2': dict(scenario=Scenario.COORDINATE_C0, m=2, p=2.0, q=2.0),
    'coordinate-c0-m3': dict(scenario=Scenario.COORDINATE_C0, m=3, p=2.0, q=2.0),
}


def scenario_presets() -> List[ExperimentConfig]:
    """The canned reproductions, each checked against its witness region."""
    presets = []
    for name, settings in PRESETS.items():
        experiment = ExperimentConfig(name=name, **settings)
        problem = experiment.check_region()
        if problem:
            raise InternalInconsistencyError(f"Preset {name} violates its region: {problem}")
        presets.append(experiment)
    return presets


def get_preset(name: str) -> ExperimentConfig:
    for experiment in scenario_presets():
        if experiment.name == name:
            return experiment
    raise ConfigurationError(f"Unknown preset '{name}'; choose from {', '.join(PRESETS)}", 'preset')


def load_experiment(name: str, config=None, overrides: Optional[Dict[str, object]] = None) -> ExperimentConfig:
    """
    Preset defaults, then [experiments] grid and seeds, then the
    [scenario:<name>] section, then explicit overrides. The configured grid
    applies to presets without a grid of their own, configured seeds to
    randomized scenarios only.
    """
    experiment = get_preset(name)
    if config is not None:
        defaults = {}
        if 'n_grid' not in PRESETS[name]:
            defaults['n_grid'] = config.getlist('experiments', 'n_grid', int)
        if experiment.randomized:
            defaults['seeds'] = config.getlist('experiments', 'seeds', int)
        experiment = experiment.with_overrides(defaults)
        experiment = experiment.with_overrides(config.get_scenario_overrides(name))
    if overrides:
        experiment = experiment.with_overrides(overrides)
    return experiment
