# core/norm_estimator.py
"""
Norm computations for multilinear forms, vector families and polynomials.

operator_norm_ascent gives seeded lower estimates by block-coordinate ascent;
operator_norm_bruteforce is the small-instance oracle. NormEstimator bundles
both with the configured defaults.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from core.bound_calculator import conjugate_exponent
from core.constructions import (
    Codomain,
    FormKind,
    HomogeneousPolynomial,
    MultilinearForm,
    VectorFamily,
    build_dense_form,
)
from utils.exceptions import (
    InapplicableError,
    InternalInconsistencyError,
    ParameterDomainError,
    SizeError,
)
from utils.seeding import spawn_generator

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 16
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 1000
DEFAULT_RESOLUTION = 64
DEFAULT_BRUTEFORCE_BUDGET = 2 ** 20
# Relative slack for the per-step monotonicity assertion
MONOTONICITY_SLACK = 1e-9


class NormKind(str, Enum):
    EXACT_ANALYTIC = 'exact_analytic'
    ASCENT_LOWER_ESTIMATE = 'ascent_lower_estimate'
    BRUTEFORCE = 'bruteforce'


class NormMethod(str, Enum):
    ANALYTIC = 'analytic'
    ASCENT = 'ascent'
    BRUTEFORCE = 'bruteforce'


@dataclass(frozen=True)
class NormEstimate:
    value: float
    kind: NormKind
    restarts_used: int = 0
    converged: bool = True
    exact: bool = False
    resolution: Optional[int] = None
    iterations: int = 0

    def to_dict(self):
        return {
            'value': self.value,
            'kind': self.kind.value,
            'restarts_used': self.restarts_used,
            'converged': self.converged,
            'exact': self.exact,
            'resolution': self.resolution,
            'iterations': self.iterations,
        }


def _phase(c: np.ndarray) -> np.ndarray:
    """conj(c)/|c| with 1 where c vanishes, so that c * phase(c) = |c|."""
    magnitude = np.abs(c)
    phase = np.ones_like(c)
    nonzero = magnitude > 0
    phase[nonzero] = np.conj(c[nonzero]) / magnitude[nonzero]
    return phase


def dual_norm(c: np.ndarray, p: float) -> float:
    """||c||_{p*}, the norm of the functional x -> sum c_j x_j on l_p."""
    return float(np.linalg.norm(c, ord=conjugate_exponent(p)))


def dual_norming_vector(c: np.ndarray, p: float) -> np.ndarray:
    """
    A unit vector x of l_p with sum_j c_j x_j = ||c||_{p*}.

    p = 1 picks the largest coordinate, lowest index on ties; p = inf is the
    phase vector of c.
    """
    c = np.asarray(c)
    if not np.iscomplexobj(c):
        c = c.astype(float)
    if p < 1:
        raise ParameterDomainError(f"Exponent must be >= 1, got {p}", 'p', p)
    x = np.zeros_like(c)
    if math.isinf(p):
        return _phase(c)
    if p == 1:
        j = int(np.argmax(np.abs(c)))
        x[j] = _phase(c[j:j + 1])[0]
        return x
    peak = np.max(np.abs(c))
    if peak == 0:
        x[0] = 1.0
        return x
    scaled = c / peak
    p_star = conjugate_exponent(p)
    magnitudes = np.abs(scaled) ** (p_star - 1.0)
    return _phase(scaled) * magnitudes / np.linalg.norm(scaled, ord=p_star) ** (p_star - 1.0)


def _random_unit(rng: np.random.Generator, dim: int, p: float, complex_field: bool) -> np.ndarray:
    x = rng.standard_normal(dim)
    if complex_field:
        x = x + 1j * rng.standard_normal(dim)
    norm = np.linalg.norm(x, ord=p)
    if norm == 0:
        x[0] = 1.0
        return x
    return x / norm


def _ascend(form: MultilinearForm, vectors: List[np.ndarray], tol: float, max_iters: int, restart: int):
    value = abs(form.evaluate(vectors))
    for sweep in range(max_iters):
        previous = value
        for slot in range(form.order):
            c = form.partial_contraction(vectors, slot)
            vectors[slot] = dual_norming_vector(c, form.domain_exponents[slot])
            updated = dual_norm(c, form.domain_exponents[slot])
            if updated < value * (1.0 - MONOTONICITY_SLACK) - 1e-300:
                raise InternalInconsistencyError(
                    "Ascent objective decreased",
                    {'restart': restart, 'sweep': sweep, 'slot': slot, 'before': value, 'after': updated})
            value = max(value, updated)
        logger.debug("restart %d sweep %d value %.17g", restart, sweep, value)
        if sweep >= 1 and value - previous <= tol * value:
            return value, True, sweep + 1
    return value, False, max_iters


def operator_norm_ascent(form: MultilinearForm, restarts: int = DEFAULT_RESTARTS, tol: float = DEFAULT_TOL,
                         max_iters: int = DEFAULT_MAX_ITERS, seed: int = 0) -> NormEstimate:
    """
    Lower estimate of sup |T(x^(1), ..., x^(m))| over the product of unit balls.

    Each restart starts from a random point of the unit spheres and cyclically
    replaces one slot by the dual-norming vector of its partial contraction.
    """
    if not form.is_scalar_valued:
        raise InapplicableError("Ascent needs a scalar-valued form", reason="c0-valued")
    if restarts < 1 or max_iters < 1:
        raise ParameterDomainError("restarts and max_iters must be >= 1", 'restarts', restarts)

    best, best_converged, total_iterations = 0.0, True, 0
    for restart in range(restarts):
        rng = spawn_generator(seed, restart)
        vectors = [_random_unit(rng, form.dim, p, form.is_complex) for p in form.domain_exponents]
        value, converged, iterations = _ascend(form, vectors, tol, max_iters, restart)
        total_iterations += iterations
        if value > best or restart == 0:
            best, best_converged = value, converged

    if not best_converged:
        logger.warning("Norm ascent hit max_iters=%d before reaching tol=%g", max_iters, tol)
    return NormEstimate(float(best), NormKind.ASCENT_LOWER_ESTIMATE, restarts, best_converged,
                        iterations=total_iterations)


def _sphere_grid(n: int, resolution: int, p: float) -> np.ndarray:
    """Points of the unit l_p sphere in R^n from a hyperspherical angle grid (half sphere)."""
    if n == 1:
        return np.ones((1, 1))
    axes = [np.linspace(0.0, np.pi, resolution) for _ in range(n - 2)]
    axes.append(np.linspace(0.0, np.pi, resolution, endpoint=False))
    angles = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, n - 1)
    sines = np.cumprod(np.sin(angles), axis=1)
    points = np.empty((angles.shape[0], n))
    points[:, 0] = np.cos(angles[:, 0])
    points[:, 1:n - 1] = sines[:, :n - 2] * np.cos(angles[:, 1:])
    points[:, n - 1] = sines[:, -1]
    return points / np.linalg.norm(points, ord=p, axis=1)[:, None]


def _extreme_points(n: int, p: float) -> np.ndarray:
    """Extreme points of the real l_1 or l_inf ball, one of each +- pair."""
    if p == 1:
        return np.eye(n)
    patterns = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1))).reshape(-1, n - 1)
    return np.hstack([np.ones((patterns.shape[0], 1)), patterns])


def operator_norm_bruteforce(form: MultilinearForm, resolution: int = DEFAULT_RESOLUTION,
                             budget: int = DEFAULT_BRUTEFORCE_BUDGET) -> NormEstimate:
    """
    Small-instance norm oracle. Exact for m = 1, for bilinear l_2 x l_2 forms
    (largest singular value) and for real forms whose leading slots are all
    l_1 or l_inf (extreme-point enumeration). Otherwise a grid over the unit
    spheres of the leading slots at the given angular resolution.
    The last slot is always solved exactly through its dual norm.
    """
    if not form.is_scalar_valued:
        raise InapplicableError("Brute force needs a scalar-valued form", reason="c0-valued")
    exponents = form.domain_exponents
    last = exponents[-1]

    if form.order == 1:
        value = dual_norm(form.dense(), last)
        return NormEstimate(value, NormKind.BRUTEFORCE, exact=True)

    if form.order == 2 and exponents == (2.0, 2.0):
        value = float(np.linalg.norm(form.dense(), 2))
        return NormEstimate(value, NormKind.BRUTEFORCE, exact=True)

    if form.is_complex:
        raise InapplicableError("Brute force covers complex forms only in the spectral case",
                                reason="complex field")

    leading = exponents[:-1]
    n = form.dim
    vertex = [p == 1 or math.isinf(p) for p in leading]
    exact = all(vertex)
    counts = [n if p == 1 else 2 ** (n - 1) if math.isinf(p) else resolution ** (n - 1) for p in leading]
    total = math.prod(counts)
    if total > budget:
        raise SizeError(f"Brute-force search needs {total} points, budget is {budget}",
                        requested=total, budget=budget)
    grids = [_extreme_points(n, p) if is_vertex else _sphere_grid(n, resolution, p)
             for p, is_vertex in zip(leading, vertex)]

    dense = form.dense()
    best = 0.0
    for prefix in itertools.product(*grids[:-1]):
        tensor = dense
        for x in prefix:
            tensor = np.tensordot(x, tensor, axes=([0], [0]))
        functionals = grids[-1] @ tensor
        best = max(best, float(np.max(np.linalg.norm(functionals, ord=conjugate_exponent(last), axis=1))))

    return NormEstimate(best, NormKind.BRUTEFORCE, exact=exact, resolution=None if exact else resolution)


def _has_permutation_support(matrix: np.ndarray) -> bool:
    support = np.abs(matrix) > 0
    return bool(np.all(support.sum(axis=0) <= 1) and np.all(support.sum(axis=1) <= 1))


def weak_q_norm(family: VectorFamily, q: float, restarts: int = DEFAULT_RESTARTS, tol: float = DEFAULT_TOL,
                max_iters: int = DEFAULT_MAX_ITERS, seed: int = 0) -> NormEstimate:
    """
    sup over the unit ball of l_{a*} of (sum_k |phi(x_k)|^q)^{1/q}, a being the
    ambient exponent. This is the norm of the n x d matrix X as a map
    l_{a*}^d -> l_q^n.
    """
    if math.isnan(q) or q < 1 or math.isinf(q):
        raise ParameterDomainError(f"q must lie in [1, inf), got {q}", 'q', q)
    matrix = family.entries
    a = family.ambient_exponent
    a_star = conjugate_exponent(a)

    if not np.any(matrix):
        return NormEstimate(0.0, NormKind.EXACT_ANALYTIC, exact=True)
    if family.count == 1:
        return NormEstimate(float(np.linalg.norm(matrix[0], ord=a)), NormKind.EXACT_ANALYTIC, exact=True)
    if a_star == 2 and q == 2:
        return NormEstimate(float(np.linalg.norm(matrix, 2)), NormKind.EXACT_ANALYTIC, exact=True)
    if a_star == 1:
        columns = np.linalg.norm(matrix, ord=q, axis=0)
        return NormEstimate(float(np.max(columns)), NormKind.EXACT_ANALYTIC, exact=True)
    if a_star == q and _has_permutation_support(matrix):
        return NormEstimate(float(np.max(np.abs(matrix))), NormKind.EXACT_ANALYTIC, exact=True)

    # psi^T X phi with psi in the l_{q*} ball; zero padding leaves the supremum unchanged
    size = max(family.count, family.ambient_dim)
    padded = np.zeros((size, size), dtype=matrix.dtype)
    padded[:family.count, :family.ambient_dim] = matrix
    bilinear = build_dense_form(padded, (conjugate_exponent(q), a_star))
    return operator_norm_ascent(bilinear, restarts, tol, max_iters, seed)


def polynomial_norm(polynomial: HomogeneousPolynomial, restarts: int = DEFAULT_RESTARTS, tol: float = DEFAULT_TOL,
                    max_iters: int = DEFAULT_MAX_ITERS, seed: int = 0) -> NormEstimate:
    """
    sup |P(x)| over the unit ball of l_a. Analytic where known, else a seeded
    fixed-point iteration x <- dual-norming vector of A(x, ..., x, .) whose best
    visited value is a lower estimate.
    """
    analytic = polynomial.analytic_norm()
    if analytic is not None:
        return NormEstimate(analytic, NormKind.EXACT_ANALYTIC, exact=True)

    form, p = polynomial.form, polynomial.domain_exponent
    best, best_converged, total_iterations = 0.0, True, 0
    for restart in range(restarts):
        rng = spawn_generator(seed, restart)
        x = _random_unit(rng, form.dim, p, form.is_complex)
        value = float(abs(polynomial(x)))
        converged, iterations = False, max_iters
        for step in range(max_iters):
            c = form.partial_contraction([x] * form.order, 0)
            candidate = dual_norming_vector(c, p)
            updated = float(abs(polynomial(candidate)))
            x = candidate
            if abs(updated - value) <= tol * max(updated, value):
                value = max(value, updated)
                converged, iterations = True, step + 1
                break
            value = max(value, updated)
        total_iterations += iterations
        if value > best or restart == 0:
            best, best_converged = value, converged

    if not best_converged:
        logger.warning("Polynomial norm iteration did not settle within %d steps", max_iters)
    return NormEstimate(best, NormKind.ASCENT_LOWER_ESTIMATE, restarts, best_converged,
                        iterations=total_iterations)


class NormEstimator:
    """Norm computations with defaults taken from the [numerics] config section."""

    def __init__(self, config=None, seed: int = 0):
        self.seed = seed
        if config is None:
            self.restarts = DEFAULT_RESTARTS
            self.tol = DEFAULT_TOL
            self.max_iters = DEFAULT_MAX_ITERS
            self.resolution = DEFAULT_RESOLUTION
            self.budget = DEFAULT_BRUTEFORCE_BUDGET
        else:
            self.restarts = config.getint('numerics', 'ascent_restarts', DEFAULT_RESTARTS)
            self.tol = config.getfloat('numerics', 'ascent_tol', DEFAULT_TOL)
            self.max_iters = config.getint('numerics', 'ascent_max_iters', DEFAULT_MAX_ITERS)
            self.resolution = config.getint('numerics', 'bruteforce_resolution', DEFAULT_RESOLUTION)
            self.budget = config.getint('numerics', 'bruteforce_budget', DEFAULT_BRUTEFORCE_BUDGET)

    def analytic(self, form: MultilinearForm) -> NormEstimate:
        """Closed-form norms of the coordinate and diagonal operators."""
        if form.codomain is Codomain.C0_COORDINATES:
            return NormEstimate(1.0, NormKind.EXACT_ANALYTIC, exact=True)
        if form.kind is FormKind.DIAGONAL and len(set(form.domain_exponents)) == 1:
            value = HomogeneousPolynomial(form).analytic_norm()
            return NormEstimate(value, NormKind.EXACT_ANALYTIC, exact=True)
        raise InapplicableError(f"No analytic norm for {form.kind.value} forms", reason="no closed form")

    def ascent(self, form: MultilinearForm, seed: Optional[int] = None) -> NormEstimate:
        return operator_norm_ascent(form, self.restarts, self.tol, self.max_iters,
                                    self.seed if seed is None else seed)

    def bruteforce(self, form: MultilinearForm) -> NormEstimate:
        return operator_norm_bruteforce(form, self.resolution, self.budget)

    def estimate(self, form: MultilinearForm, method: NormMethod, seed: Optional[int] = None) -> NormEstimate:
        method = NormMethod(method)
        if method is NormMethod.ANALYTIC:
            return self.analytic(form)
        if form.codomain is Codomain.C0_COORDINATES:
            # ||T|| = 1 is the only available value for the c0-valued operator
            return self.analytic(form)
        if method is NormMethod.BRUTEFORCE:
            return self.bruteforce(form)
        return self.ascent(form, seed)

    def weak_norm(self, family: VectorFamily, q: float, seed: Optional[int] = None) -> NormEstimate:
        return weak_q_norm(family, q, self.restarts, self.tol, self.max_iters,
                           self.seed if seed is None else seed)

    def polynomial(self, polynomial: HomogeneousPolynomial, seed: Optional[int] = None) -> NormEstimate:
        return polynomial_norm(polynomial, self.restarts, self.tol, self.max_iters,
                               self.seed if seed is None else seed)

