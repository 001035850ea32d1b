# core/summing.py
"""
The quantities on both sides of a summing inequality: mixed power sums of
operator outputs, Rademacher cotype averages and polynomial quotients.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.constructions import (
    FormKind,
    HomogeneousPolynomial,
    MultilinearForm,
    VectorFamily,
    check_budget,
    coordinate_operator_outputs,
)
from core.norm_estimator import NormEstimate, weak_q_norm, polynomial_norm
from utils.exceptions import (
    DegenerateInputError,
    DimensionMismatchError,
    ParameterDomainError,
    SizeError,
)
from utils.seeding import spawn_generator

logger = logging.getLogger(__name__)

DEFAULT_MAX_EXACT = 20
SIGN_CHUNK = 2 ** 16


def power_sum(values: np.ndarray, p: float) -> float:
    """(sum |v|^p)^{1/p}; the max for p = inf."""
    magnitudes = np.abs(np.asarray(values)).ravel()
    if math.isinf(p):
        return float(np.max(magnitudes, initial=0.0))
    return float(np.sum(magnitudes ** p) ** (1.0 / p))


def output_norms(form: MultilinearForm, families: Sequence[VectorFamily],
                 budget: Optional[int] = None) -> np.ndarray:
    """
    ||T(x^(1)_{k_1}, ..., x^(m)_{k_m})|| for every index tuple, as an array of
    shape (n_1, ..., n_m) with n_i the count of family i.
    """
    if len(families) != form.order:
        raise DimensionMismatchError("One family per slot", expected=form.order, actual=len(families))
    check_budget(math.prod(f.count for f in families), budget, what='index tuples')

    if form.kind is FormKind.COORDINATE:
        return coordinate_operator_outputs(form.order, form.dim, families)

    for family in families:
        if family.ambient_dim != form.dim:
            raise DimensionMismatchError("Family dimension differs from the form dimension",
                                         expected=form.dim, actual=family.ambient_dim)

    if form.kind is FormKind.DIAGONAL:
        # values[k_1..k_m, i] = prod_s x^(s)_{k_s, i}, summed over i at the end
        values = families[0].entries
        for family in families[1:]:
            values = values[..., np.newaxis, :] * family.entries
        return np.abs(values.sum(axis=-1))

    values = form.coefficients
    for family in families:
        # Contract the leading remaining slot; the family index moves to the back
        values = np.tensordot(values, family.entries, axes=([0], [1]))
    return np.abs(values)


def mixed_power_sum(form: MultilinearForm, families: Sequence[VectorFamily], p: float,
                    budget: Optional[int] = None) -> float:
    """(sum over k_1..k_m of ||T(x_{k_1}, ..., x_{k_m})||^p)^{1/p}; p may be below 1."""
    if math.isnan(p) or p <= 0:
        raise ParameterDomainError(f"p must be positive, got {p}", 'p', p)
    return power_sum(output_norms(form, families, budget), p)


@dataclass(frozen=True)
class RademacherAverage:
    """Root mean square of ||sum eps_k x_k|| over sign patterns."""
    rms: float
    exact: bool
    samples: int


def rademacher_average(family: VectorFamily, samples: Optional[int] = None, seed: int = 0,
                       max_exact: int = DEFAULT_MAX_EXACT) -> RademacherAverage:
    """
    Exact average over all 2^n sign patterns, or a Monte-Carlo average over
    ``samples`` seeded patterns when ``samples`` is given.
    """
    n = family.count
    a = family.ambient_exponent
    matrix = family.entries
    total = 0.0

    if samples is None:
        if n > max_exact:
            raise SizeError(f"Exact Rademacher average over 2^{n} patterns exceeds 2^{max_exact}",
                            requested=n, budget=max_exact)
        patterns = 2 ** n
        shifts = np.arange(n)
        for start in range(0, patterns, SIGN_CHUNK):
            index = np.arange(start, min(start + SIGN_CHUNK, patterns))
            signs = 1.0 - 2.0 * ((index[:, np.newaxis] >> shifts) & 1)
            total += float(np.sum(np.linalg.norm(signs @ matrix, ord=a, axis=1) ** 2))
        return RademacherAverage(math.sqrt(total / patterns), True, patterns)

    if samples < 1:
        raise ParameterDomainError("samples must be >= 1", 'samples', samples)
    logger.warning("Monte-Carlo Rademacher average with %d samples for n=%d", samples, n)
    rng = spawn_generator(seed, n)
    for start in range(0, samples, SIGN_CHUNK):
        size = min(SIGN_CHUNK, samples - start)
        signs = rng.choice(np.array([-1.0, 1.0]), size=(size, n))
        total += float(np.sum(np.linalg.norm(signs @ matrix, ord=a, axis=1) ** 2))
    return RademacherAverage(math.sqrt(total / samples), False, samples)


def rademacher_cotype_quotient(family: VectorFamily, q: float, samples: Optional[int] = None, seed: int = 0,
                               max_exact: int = DEFAULT_MAX_EXACT) -> float:
    """(sum ||x_k||^q)^{1/q} over the RMS of ||sum eps_k x_k||, norms in the ambient l_a."""
    if math.isnan(q) or q < 1:
        raise ParameterDomainError(f"q must be >= 1, got {q}", 'q', q)
    numerator = power_sum(family.vector_norms(), q)
    average = rademacher_average(family, samples, seed, max_exact)
    if average.rms == 0:
        raise DegenerateInputError("All sign sums vanish", quantity='rademacher_rms')
    return numerator / average.rms


def pol_quotient(polynomial: HomogeneousPolynomial, family: VectorFamily, p: float, q: float,
                 m: Optional[int] = None, norm: Optional[NormEstimate] = None,
                 weak: Optional[NormEstimate] = None) -> float:
    """
    (sum |P(x_k)|^p)^{1/p} / (||(x_k)||_{w,q}^m ||P||). Without an explicit
    norm the analytic value is used when known, else a seeded lower estimate.
    """
    if math.isnan(p) or p <= 0:
        raise ParameterDomainError(f"p must be positive, got {p}", 'p', p)
    m = polynomial.degree if m is None else m
    if m != polynomial.degree:
        raise ParameterDomainError(f"Degree {m} differs from the polynomial degree {polynomial.degree}", 'm', m)
    if family.ambient_dim != polynomial.dim:
        raise DimensionMismatchError("Family dimension differs from the polynomial dimension",
                                     expected=polynomial.dim, actual=family.ambient_dim)

    weak = weak or weak_q_norm(family, q)
    if weak.value == 0:
        raise DegenerateInputError("The family has zero weak norm", quantity='weak_norm')
    norm = norm or polynomial_norm(polynomial)
    if norm.value == 0:
        raise DegenerateInputError("The polynomial vanishes identically", quantity='polynomial_norm')

    numerator = power_sum([polynomial(x) for x in family.entries], p)
    return numerator / (weak.value ** m * norm.value)
