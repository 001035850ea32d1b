# core/bound_calculator.py
"""
Closed-form bounds for the multilinear and polynomial indices of summability.

Every operation checks the hypotheses of the result it evaluates and raises a
RegionError naming the violated condition. aggregate_bounds runs every formula
that applies to an IndexQuery and keeps the best lower, upper and exact values.
"""

import logging
import math
import numbers
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from utils.exceptions import (
    InapplicableError,
    InternalInconsistencyError,
    NoExactResultError,
    NoKnownLowerError,
    ParameterDomainError,
    RegionError,
)

logger = logging.getLogger(__name__)

# Boundary comparisons and identity checks
TOLERANCE = 1e-12
# Ordering check inside aggregate_bounds; a violation is an implementation bug
CONSISTENCY_TOLERANCE = 1e-9
DEFAULT_COINCIDENCE_S = 1.0


class Variant(str, Enum):
    MULTILINEAR = 'multilinear'
    POLYNOMIAL = 'polynomial'


class ScalarField(str, Enum):
    REAL = 'real'
    COMPLEX = 'complex'


class SpaceKind(str, Enum):
    SEQUENCE_SPACE = 'sequence_space'
    SCALAR_FIELD = 'scalar_field'
    C0 = 'c0'
    ABSTRACT = 'abstract'


class Direction(str, Enum):
    LOWER = 'lower'
    UPPER = 'upper'
    EXACT = 'exact'


def conjugate_exponent(p: float) -> float:
    """p* with 1/p + 1/p* = 1; 1 and infinity are exchanged."""
    if p < 1:
        raise ParameterDomainError(f"Conjugate exponent needs p >= 1, got {p}", 'p', p)
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _leq(a: float, b: float) -> bool:
    """a <= b up to a relative tolerance; region boundaries are inclusive."""
    if math.isinf(b):
        return True
    return a <= b + TOLERANCE * max(1.0, abs(b))


def _check_degree(m) -> int:
    if isinstance(m, bool) or not isinstance(m, numbers.Integral) or m < 1:
        raise ParameterDomainError(f"Degree m must be an integer >= 1, got {m}", 'm', m)
    return int(m)


def _check_positive(value: float, name: str) -> float:
    if not isinstance(value, numbers.Real) or math.isnan(value) or value <= 0:
        raise ParameterDomainError(f"{name} must be positive, got {value}", name, value)
    return float(value)


def _check_finite_positive(value: float, name: str) -> float:
    value = _check_positive(value, name)
    if math.isinf(value):
        raise ParameterDomainError(f"{name} must be finite", name, value)
    return value


def _check_weak_exponent(q: float) -> float:
    q = _check_finite_positive(q, 'q')
    if q < 1:
        raise ParameterDomainError(f"q must be >= 1, got {q}", 'q', q)
    return q


def _check_finite_cotype(r: float, formula: str) -> float:
    if not isinstance(r, numbers.Real) or math.isnan(r) or r < 2:
        raise ParameterDomainError(f"Cotype r must be >= 2, got {r}", 'r', r)
    if math.isinf(r):
        raise RegionError("Cotype r must be finite", condition="r < inf", formula=formula)
    return float(r)


@dataclass(frozen=True)
class SpaceDescriptor:
    """A Banach space E_i or F, described by kind and cotype."""
    kind: SpaceKind
    cotype: float
    exponent: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.kind, SpaceKind):
            object.__setattr__(self, 'kind', SpaceKind(self.kind))
        if math.isnan(self.cotype) or self.cotype < 2:
            raise ParameterDomainError(f"Cotype must be >= 2 or infinite, got {self.cotype}", 'cotype', self.cotype)
        if self.kind is SpaceKind.C0 and not math.isinf(self.cotype):
            raise ParameterDomainError("c0 has no finite cotype", 'cotype', self.cotype)
        if self.kind is SpaceKind.SCALAR_FIELD and self.cotype != 2:
            raise ParameterDomainError("The scalar field has cotype 2", 'cotype', self.cotype)
        if self.kind is SpaceKind.SEQUENCE_SPACE:
            if self.exponent is None or self.exponent < 1:
                raise ParameterDomainError("Sequence spaces need an exponent in [1, inf]", 'exponent', self.exponent)

    @classmethod
    def scalar(cls):
        return cls(SpaceKind.SCALAR_FIELD, 2.0)

    @classmethod
    def c0(cls):
        return cls(SpaceKind.C0, math.inf)

    @classmethod
    def sequence(cls, exponent: float, cotype: float):
        return cls(SpaceKind.SEQUENCE_SPACE, float(cotype), float(exponent))

    @classmethod
    def abstract(cls, cotype: float):
        return cls(SpaceKind.ABSTRACT, float(cotype))

    @classmethod
    def dual_sequence_space(cls, q: float, cotype: float):
        """l_{q*}; q = 1 gives X_inf = c0."""
        exponent = conjugate_exponent(q)
        if math.isinf(exponent):
            return cls.c0()
        return cls.sequence(exponent, cotype)

    @property
    def has_finite_cotype(self) -> bool:
        return not math.isinf(self.cotype)

    def is_dual_sequence_space(self, q: float) -> bool:
        """True when this is l_{q*} (or c0 for q = 1)."""
        exponent = conjugate_exponent(q)
        if math.isinf(exponent):
            return self.kind is SpaceKind.C0 or (
                self.kind is SpaceKind.SEQUENCE_SPACE and math.isinf(self.exponent))
        return self.kind is SpaceKind.SEQUENCE_SPACE and math.isclose(self.exponent, exponent, rel_tol=1e-12)


@dataclass(frozen=True)
class IndexQuery:
    """The parameters (m, p, q) of an index question and the spaces involved."""
    m: int
    p: float
    q: float
    variant: Variant
    field: ScalarField
    domain: Tuple[SpaceDescriptor, ...]
    codomain: SpaceDescriptor

    def __post_init__(self):
        _check_degree(self.m)
        _check_finite_positive(self.p, 'p')
        _check_weak_exponent(self.q)
        object.__setattr__(self, 'variant', Variant(self.variant))
        object.__setattr__(self, 'field', ScalarField(self.field))
        domain = self.domain
        if isinstance(domain, SpaceDescriptor):
            domain = (domain,)
        domain = tuple(domain)
        if not domain:
            raise ParameterDomainError("At least one domain descriptor is required", 'domain')
        if self.variant is Variant.POLYNOMIAL and len(domain) != 1:
            raise ParameterDomainError("The polynomial index has a single domain space", 'domain', len(domain))
        if self.variant is Variant.MULTILINEAR:
            if len(domain) == 1:
                domain = domain * self.m
            elif len(domain) != self.m:
                raise ParameterDomainError(
                    f"Expected {self.m} domain descriptors, got {len(domain)}", 'domain', len(domain))
        object.__setattr__(self, 'domain', domain)

    def domain_is_dual_of_q(self) -> bool:
        return all(space.is_dual_sequence_space(self.q) for space in self.domain)


@dataclass(frozen=True)
class CoincidencePair:
    """(t, s) with L = Pi_(t,s): every operator is multiple (t, s)-summing."""
    t: float
    s: float

    def __post_init__(self):
        _check_positive(self.t, 't')
        if not isinstance(self.s, numbers.Real) or math.isnan(self.s) or self.s < 1:
            raise ParameterDomainError(f"s must be >= 1, got {self.s}", 's', self.s)


@dataclass(frozen=True)
class BoundResult:
    value: float
    direction: Direction
    region: str
    citation: str
    parameters: Dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.value < 0:
            raise InternalInconsistencyError(
                f"Negative index value {self.value} in region {self.region}", {'region': self.region})

    def to_dict(self):
        return {
            'value': self.value,
            'direction': self.direction.value,
            'region': self.region,
            'citation': self.citation,
            'parameters': dict(self.parameters),
        }


@dataclass
class AggregateBounds:
    lower: Optional[BoundResult] = None
    upper: Optional[BoundResult] = None
    exact: Optional[BoundResult] = None
    candidates: List[BoundResult] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return self.lower is None and self.upper is None and self.exact is None

    def to_dict(self):
        return {
            'lower': self.lower.to_dict() if self.lower else None,
            'upper': self.upper.to_dict() if self.upper else None,
            'exact': self.exact.to_dict() if self.exact else None,
            'candidates': [c.to_dict() for c in self.candidates],
        }


def _result(value, direction, region, citation, **parameters) -> BoundResult:
    # Rounding at region corners may leave -1e-17 where the formula is 0
    if -TOLERANCE < value < 0:
        value = 0.0
    return BoundResult(float(value), direction, region, citation, parameters)


def _select(candidates: List[Tuple[str, float]], prefer: str) -> Tuple[str, float]:
    """
    Pick the smallest (upper) or largest (lower) branch value. Branches tied
    within TOLERANCE resolve to the last listed one for upper bounds and to
    the first listed one for lower bounds.
    """
    values = [value for _, value in candidates]
    best = min(values) if prefer == 'min' else max(values)
    tied = [c for c in candidates if abs(c[1] - best) <= TOLERANCE * max(1.0, abs(best))]
    return tied[-1] if prefer == 'min' else tied[0]


def _coincidence_branches(p, q, pair, first, second, formula):
    t, s = pair.t, pair.s
    branches = []
    if _leq(p, t) and _leq(s, q):
        branches.append(('a', first + second))
    if _leq(p, t) and _leq(q, s):
        branches.append(('b', first))
    if _leq(t, p) and _leq(s, q):
        branches.append(('c', second))
    if _leq(t, p) and _leq(q, s):
        branches.append(('d', 0.0))
    if not branches:
        raise InternalInconsistencyError(f"No branch of {formula} selected", {'p': p, 'q': q})
    return _select(branches, 'min')


def mult_upper_from_coincidence(m: int, p: float, q: float, pair: CoincidencePair) -> BoundResult:
    """Upper bound for the multilinear index given L = Pi_(t,s)^mult."""
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_finite_positive(q, 'q')
    t, s = pair.t, pair.s
    branch, value = _coincidence_branches(
        p, q, pair, m / p - m / t, m / s - m / q, 'mult_upper_from_coincidence')
    return _result(value, Direction.UPPER, f"mult-coincidence({branch})",
                   "multilinear upper bound from a coincidence L = Pi_(t,s)", t=t, s=s)


def pol_upper_from_coincidence(m: int, p: float, q: float, pair: CoincidencePair) -> BoundResult:
    """Upper bound for the polynomial index given P = P_(t,s)."""
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_finite_positive(q, 'q')
    t, s = pair.t, pair.s
    branch, value = _coincidence_branches(
        p, q, pair, 1 / p - 1 / t, m / s - m / q, 'pol_upper_from_coincidence')
    return _result(value, Direction.UPPER, f"pol-coincidence({branch})",
                   "polynomial upper bound from a coincidence P = P_(t,s)", t=t, s=s)


def defant_voigt_pair() -> CoincidencePair:
    """Scalar-valued polynomials are absolutely (1,1)-summing."""
    return CoincidencePair(1.0, 1.0)


def botelho_pair(r: float) -> CoincidencePair:
    """Polynomials into a space of cotype r are absolutely (r,1)-summing."""
    return CoincidencePair(float(r), 1.0)


def cotype_coincidence_t(m: int, r: float, s: float) -> float:
    """Optimal t with L(E_1..E_m; F) = Pi_(t,s)^mult when cot(F) = r."""
    formula = 'cotype_coincidence_t'
    m = _check_degree(m)
    r = _check_finite_cotype(r, formula)
    if not (1 <= s < 2):
        raise RegionError(f"s not in [1,2): s = {s}", condition="s not in [1,2)", formula=formula)
    if s > 1 and not m < s / (r * (s - 1)):
        raise RegionError(f"m >= s/(r(s-1)) = {s / (r * (s - 1))}",
                          condition="m >= s/(r(s-1))", formula=formula)
    return s * r / (s - m * s * r + m * r)


def scalar_coincidence_s(m: int, t: float) -> float:
    """Largest s with L(E_1..E_m; K) = Pi_(t,s)^mult."""
    formula = 'scalar_coincidence_s'
    m = _check_degree(m)
    t = _check_finite_positive(t, 't')
    t_min = 2 * m / (m + 1)
    if not _leq(t_min, t):
        raise RegionError(f"t = {t} is below 2m/(m+1) = {t_min}", condition="t < 2m/(m+1)", formula=formula)
    if t <= 2:
        return 2 * m * t / (m * t + 2 * m - t)
    return m * t / (m * t + 1 - t)


def cornbd_upper(m: int, r: float, p: float, q: float, s: Optional[float] = None) -> BoundResult:
    """Multilinear upper bound for a codomain of finite cotype r."""
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_finite_positive(q, 'q')
    s = DEFAULT_COINCIDENCE_S if s is None else float(s)
    t = cotype_coincidence_t(m, r, s)
    threshold = m * r * t / (r - t + m * r * t)

    branches = []
    if _leq(p, t) and _leq(threshold, q):
        branches.append(('a', m / p + m - 1 / r - m / q - (m - 1) / t))
    if _leq(p, t) and _leq(q, threshold):
        branches.append(('b', m / p - m / t))
    if _leq(t, p) and _leq(threshold, q):
        branches.append(('c', m - 1 / r + 1 / t - m / q))
    if _leq(t, p) and _leq(q, threshold):
        branches.append(('d', 0.0))
    branch, value = _select(branches, 'min')
    return _result(value, Direction.UPPER, f"cotype-corollary({branch})",
                   "multilinear upper bound for codomains of finite cotype",
                   t=t, s=s, r=r, q_threshold=threshold)


def exact_index_scalar(m: int, p: float, q: float) -> BoundResult:
    """Exact multilinear index of (l_{q*} x ... x l_{q*}, K)."""
    formula = 'exact_index_scalar'
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_weak_exponent(q)

    if _leq(2 * m / (m + 1), p) and _leq(p, 2):
        if _leq(2 * m * p / (m * p + 2 * m - p), q) and _leq(q, 2):
            return _result(m / p + m / 2 - 0.5 - m / q, Direction.EXACT, "scalar-exact(a)",
                           "exact index for scalar forms on l_{q*}, random-sign witness")
    if 2 < p and _leq(m * p / (m * p + 1 - p), q):
        return _result(m - 1 + 1 / p - m / q, Direction.EXACT, "scalar-exact(b)",
                       "exact index for scalar forms on l_{q*}, diagonal witness")
    raise NoExactResultError(
        f"(m={m}, p={p}, q={q}) lies outside both exactness regions",
        condition="not (2m/(m+1) <= p <= 2 and 2mp/(mp+2m-p) <= q <= 2) "
                  "and not (p > 2 and q >= mp/(mp+1-p))",
        formula=formula)


def exact_index_c0(m: int, p: float, q: float) -> BoundResult:
    """Exact multilinear index of (l_{q*} x ... x l_{q*}, c0)."""
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_finite_positive(q, 'q')
    if not (1 <= q and _leq(q, 2)):
        raise RegionError(f"q = {q} is outside [1, 2]", condition="q not in [1,2]", formula='exact_index_c0')
    return _result(m / p, Direction.EXACT, "c0-exact", "exact index for c0-valued operators, coordinate witness")


def cotipon_lower(m: int, p: float, q: float, r: float) -> BoundResult:
    """Polynomial lower bound (r-p)/(pr) on the strip 2r/(mr+2) < p < r, any q >= 1."""
    formula = 'cotipon_lower'
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_weak_exponent(q)
    r = _check_finite_cotype(r, formula)
    edge = 2 * r / (m * r + 2)
    if not (edge < p < r):
        raise RegionError(f"p = {p} is outside (2r/(mr+2), r) = ({edge}, {r})",
                          condition="not 2r/(mr+2) < p < r", formula=formula)
    return _result((r - p) / (p * r), Direction.LOWER, "cotype-strip-lower",
                   "polynomial lower bound for 2r/(mr+2) < p < r", r=r)


def classify_polynomial_region(m: int, p: float, q: float, r: float) -> str:
    """
    Label of the polynomial lower-bound region containing (p, q):
    'a'..'d' for the four classical regions, 'strip' for 1 <= q <= 2 with
    2r/(mr+2) < p < r, and 'none' for p >= r.
    """
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_weak_exponent(q)
    r = _check_finite_cotype(r, 'classify_polynomial_region')
    a_edge = r * q / (m * r + q)
    b_edge = 2 * r / (m * r + 2)
    labels = []
    if _leq(q, 2):
        if _leq(p, a_edge):
            labels.append('a')
        if _leq(a_edge, p) and _leq(p, b_edge):
            labels.append('b')
    if _leq(2, q):
        if _leq(p, b_edge):
            labels.append('c')
        if b_edge < p < r:
            labels.append('d')
    if labels:
        return labels[0]
    if p >= r:
        return 'none'
    return 'strip'


def region_map(m: int, r: float, p_values, q_values) -> List[List[str]]:
    """Grid of region labels, rows indexed by q and columns by p."""
    return [[classify_polynomial_region(m, p, q, r) for p in p_values] for q in q_values]


def mps_lower(m: int, p: float, q: float, r: float) -> BoundResult:
    """
    Polynomial lower bounds for a codomain of cotype r over the four classical
    regions. The strip 1 <= q <= 2, 2r/(mr+2) < p < r is answered by cotipon_lower.
    """
    formula = 'mps_lower'
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')
    q = _check_weak_exponent(q)
    r = _check_finite_cotype(r, formula)
    a_edge = r * q / (m * r + q)
    b_edge = 2 * r / (m * r + 2)

    branches = []
    if _leq(q, 2):
        if _leq(p, a_edge):
            branches.append(('a', m / 2))
        if _leq(a_edge, p) and _leq(p, b_edge):
            branches.append(('b', (m * p + 2) / (2 * p) - (m * r + q) / (r * q)))
    if _leq(2, q):
        if _leq(p, b_edge):
            branches.append(('c', m / 2))
        if b_edge < p < r:
            branches.append(('d', (r - p) / (p * r)))

    if not branches:
        if p >= r:
            raise NoKnownLowerError(f"No lower bound is known for p = {p} >= r = {r}",
                                    condition="p >= r", formula=formula)
        logger.debug("(p=%s, q=%s) lies in the strip not covered by the classical regions", p, q)
        return cotipon_lower(m, p, q, r)

    branch, value = _select(branches, 'max')
    return _result(value, Direction.LOWER, f"polynomial-lower({branch})",
                   "polynomial lower bound for codomains of cotype r", r=r)


def even_real_lower(m: int, p: float, q: float, field: ScalarField = ScalarField.REAL) -> BoundResult:
    """Lower bound (1-p)/p for real scalar-valued polynomials of even degree."""
    formula = 'even_real_lower'
    m = _check_degree(m)
    if m % 2:
        raise InapplicableError(f"Degree m = {m} is odd", reason="m odd")
    if ScalarField(field) is not ScalarField.REAL:
        raise InapplicableError("Only real scalar fields are covered", reason="complex field")
    p = _check_finite_positive(p, 'p')
    q = _check_weak_exponent(q)
    edge = 2 / (m + 2)
    if not (edge < p < 1):
        raise RegionError(f"p = {p} is outside (2/(m+2), 1) = ({edge}, 1)",
                          condition="not 2/(m+2) < p < 1", formula=formula)
    return _result((1 - p) / p, Direction.LOWER, "even-real-lower",
                   "lower bound for real scalar polynomials of even degree")


def pol_exact_q1(m: int, p: float, r: Optional[float] = None, scalar_real_even: bool = False) -> BoundResult:
    """Exact polynomial index for q = 1."""
    formula = 'pol_exact_q1'
    m = _check_degree(m)
    p = _check_finite_positive(p, 'p')

    if scalar_real_even:
        if m % 2:
            raise NoExactResultError(f"Degree m = {m} is odd", condition="m odd", formula=formula)
        edge = 2 / (m + 2)
        if not (edge < p < 1):
            raise NoExactResultError(f"p = {p} is outside (2/(m+2), 1)",
                                     condition="not 2/(m+2) < p < 1", formula=formula)
        return _result(1 / p - 1, Direction.EXACT, "real-scalar-exact(q=1)",
                       "exact index for real scalar polynomials of even degree, q = 1")

    if r is None:
        raise ParameterDomainError("A cotype r is required unless scalar_real_even is set", 'r')
    try:
        r = _check_finite_cotype(r, formula)
    except RegionError as e:
        raise NoExactResultError(e.message, condition="r < inf", formula=formula)
    edge = 2 * r / (m * r + 2)
    if not (edge < p < r):
        raise NoExactResultError(f"p = {p} is outside (2r/(mr+2), r) = ({edge}, {r})",
                                 condition="not 2r/(mr+2) < p < r", formula=formula)
    return _result(1 / p - 1 / r, Direction.EXACT, "cotype-exact(q=1)",
                   "exact polynomial index for q = 1 and codomain cotype r", r=r)


def _attempt(bucket: List[BoundResult], fn, *args, **kwargs):
    try:
        bucket.append(fn(*args, **kwargs))
    except (RegionError, InapplicableError) as e:
        logger.debug("%s not applicable: %s", fn.__name__, e.message)


def _check_ordering(lowers, uppers, exacts):
    for exact in exacts:
        for other in exacts:
            if abs(exact.value - other.value) > CONSISTENCY_TOLERANCE:
                raise InternalInconsistencyError(
                    "Two exact values disagree", {'a': exact.to_dict(), 'b': other.to_dict()})
    for lower in lowers:
        for upper in uppers + exacts:
            if lower.value > upper.value + CONSISTENCY_TOLERANCE:
                raise InternalInconsistencyError(
                    f"Lower bound {lower.region} exceeds {upper.region}",
                    {'lower': lower.to_dict(), 'upper': upper.to_dict()})
    for exact in exacts:
        for upper in uppers:
            if exact.value > upper.value + CONSISTENCY_TOLERANCE:
                raise InternalInconsistencyError(
                    f"Exact value {exact.region} exceeds {upper.region}",
                    {'exact': exact.to_dict(), 'upper': upper.to_dict()})


def _pick(results: List[BoundResult], prefer: str) -> Optional[BoundResult]:
    if not results:
        return None
    labelled = [(str(index), result.value) for index, result in enumerate(results)]
    index, _ = _select(labelled, prefer)
    return results[int(index)]


def aggregate_bounds(query: IndexQuery, coincidence_s: Optional[float] = None) -> AggregateBounds:
    """
    Best known lower, upper and exact values for the query. Exact values also
    serve as lower and upper bounds.
    """
    m, p, q = query.m, query.p, query.q
    codomain = query.codomain
    lowers, uppers, exacts = [], [], []

    if query.variant is Variant.MULTILINEAR:
        if codomain.kind is SpaceKind.SCALAR_FIELD:
            t = max(p, 2 * m / (m + 1))
            try:
                s = scalar_coincidence_s(m, t)
                uppers.append(mult_upper_from_coincidence(m, p, q, CoincidencePair(t, s)))
            except RegionError as e:
                logger.debug("scalar coincidence not applicable: %s", e.message)
        elif codomain.has_finite_cotype:
            _attempt(uppers, cornbd_upper, m, codomain.cotype, p, q, coincidence_s)
        if query.domain_is_dual_of_q():
            if codomain.kind is SpaceKind.SCALAR_FIELD:
                _attempt(exacts, exact_index_scalar, m, p, q)
            elif codomain.kind is SpaceKind.C0:
                _attempt(exacts, exact_index_c0, m, p, q)
    else:
        if codomain.kind is SpaceKind.SCALAR_FIELD:
            uppers.append(pol_upper_from_coincidence(m, p, q, defant_voigt_pair()))
            uppers.append(pol_upper_from_coincidence(m, p, q, botelho_pair(codomain.cotype)))
            if query.field is ScalarField.REAL and m % 2 == 0:
                _attempt(lowers, even_real_lower, m, p, q, query.field)
                if q == 1:
                    _attempt(exacts, pol_exact_q1, m, p, scalar_real_even=True)
        elif codomain.has_finite_cotype:
            r = codomain.cotype
            uppers.append(pol_upper_from_coincidence(m, p, q, botelho_pair(r)))
            _attempt(lowers, mps_lower, m, p, q, r)
            if q == 1:
                _attempt(exacts, pol_exact_q1, m, p, r)

    _check_ordering(lowers, uppers, exacts)
    return AggregateBounds(
        lower=_pick(lowers + exacts, 'max'),
        upper=_pick(uppers + exacts, 'min'),
        exact=exacts[-1] if exacts else None,
        candidates=lowers + uppers + exacts,
    )
