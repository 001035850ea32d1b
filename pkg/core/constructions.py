# core/constructions.py
"""
Extremal multilinear operators, vector families and homogeneous polynomials.

Three witness operators are built here: the random-sign form A, the diagonal
form S and the c0-valued coordinate operator T. Dense forms hold their n^m
coefficient tensor; the diagonal and coordinate operators stay implicit and are
only materialized on request, within the coefficient budget.
"""

import json
import logging
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from utils.exceptions import (
    DimensionMismatchError,
    InapplicableError,
    ParameterDomainError,
    SchemaError,
    SizeError,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_COEFFICIENTS = 2 ** 24
MAX_COEFFICIENTS_ENV = 'SUMMABILITY_MAX_COEFFICIENTS'
FORM_FORMAT = 'summability-form'
FORM_FORMAT_VERSION = 1


class FormKind(str, Enum):
    DENSE = 'dense'
    DIAGONAL = 'diagonal'
    COORDINATE = 'coordinate'


class Codomain(str, Enum):
    SCALAR = 'scalar'
    C0_COORDINATES = 'c0_coordinates'


def coefficient_budget(budget: Optional[int] = None) -> int:
    """Explicit budget, else the environment override, else 2^24."""
    if budget is not None:
        return int(budget)
    override = os.environ.get(MAX_COEFFICIENTS_ENV)
    if override:
        try:
            return int(override)
        except ValueError:
            logger.warning("Ignoring malformed %s=%r", MAX_COEFFICIENTS_ENV, override)
    return DEFAULT_MAX_COEFFICIENTS


def check_budget(count: int, budget: Optional[int] = None, what: str = 'coefficients') -> None:
    limit = coefficient_budget(budget)
    if count > limit:
        raise SizeError(f"{count} {what} exceed the budget of {limit}", requested=count, budget=limit)


def _check_dimension(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ParameterDomainError(f"{name} must be an integer >= 1, got {value}", name, value)
    return int(value)


def _check_exponent(value: float, name: str = 'exponent') -> float:
    value = float(value)
    if math.isnan(value) or value < 1:
        raise ParameterDomainError(f"{name} must lie in [1, inf], got {value}", name, value)
    return value


def _encode_exponent(value: float):
    return 'inf' if math.isinf(value) else value


def _decode_exponent(value) -> float:
    return math.inf if value == 'inf' else float(value)


def ksz_alpha(p: float) -> float:
    """alpha(p) = 1/2 - 1/p for p >= 2, 0 for 1 <= p < 2."""
    p = _check_exponent(p, 'p')
    if p >= 2:
        return 0.5 - 1.0 / p
    return 0.0


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """n vectors of an ambient l_a^d space, stored as the rows of an n x d array."""
    entries: np.ndarray
    ambient_exponent: float

    def __post_init__(self):
        entries = np.array(self.entries, copy=True)
        if entries.ndim == 1:
            entries = entries.reshape(1, -1)
        if entries.ndim != 2 or entries.shape[0] == 0 or entries.shape[1] == 0:
            raise DimensionMismatchError("A family needs a nonempty n x d array", expected='n x d',
                                         actual=list(entries.shape))
        if not np.iscomplexobj(entries):
            entries = entries.astype(float)
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'ambient_exponent', _check_exponent(self.ambient_exponent, 'ambient_exponent'))

    @classmethod
    def unit_basis(cls, n: int, ambient_exponent: float, dim: Optional[int] = None, scale: float = 1.0):
        """(scale * e_k) for k = 1..n inside l_a^dim."""
        n = _check_dimension(n, 'n')
        dim = n if dim is None else _check_dimension(dim, 'dim')
        if dim < n:
            raise DimensionMismatchError("Basis families need dim >= n", expected=n, actual=dim)
        return cls(scale * np.eye(n, dim), ambient_exponent)

    @property
    def count(self) -> int:
        return self.entries.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.entries.shape[1]

    def scaled(self, factor) -> 'VectorFamily':
        return VectorFamily(self.entries * factor, self.ambient_exponent)

    def vector_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, ord=self.ambient_exponent, axis=1)


@dataclass(frozen=True, eq=False)
class MultilinearForm:
    """
    An m-linear map on (K^n)^m with an l_{p_i} exponent per slot.

    Dense forms carry an n^m coefficient array. DIAGONAL and COORDINATE forms
    are implicit; COORDINATE is the only c0-valued kind.
    """
    order: int
    dim: int
    domain_exponents: Tuple[float, ...]
    kind: FormKind = FormKind.DENSE
    coefficients: Optional[np.ndarray] = None
    codomain: Codomain = Codomain.SCALAR
    seed: Optional[int] = None

    def __post_init__(self):
        order = _check_dimension(self.order, 'order')
        dim = _check_dimension(self.dim, 'dim')
        kind = FormKind(self.kind)
        codomain = Codomain(self.codomain)
        exponents = self.domain_exponents
        if isinstance(exponents, (int, float)):
            exponents = (exponents,) * order
        exponents = tuple(_check_exponent(e, 'domain_exponent') for e in exponents)
        if len(exponents) != order:
            raise DimensionMismatchError("One domain exponent per slot", expected=order, actual=len(exponents))

        if kind is FormKind.DENSE:
            if self.coefficients is None:
                raise ParameterDomainError("Dense forms need coefficients", 'coefficients')
            coefficients = np.array(self.coefficients, copy=True)
            if coefficients.shape != (dim,) * order:
                raise DimensionMismatchError("Coefficient array must have shape n^m",
                                             expected=[dim] * order, actual=list(coefficients.shape))
            if not np.iscomplexobj(coefficients):
                coefficients = coefficients.astype(float)
            coefficients.setflags(write=False)
            object.__setattr__(self, 'coefficients', coefficients)
        elif self.coefficients is not None:
            raise ParameterDomainError(f"{kind.value} forms keep their coefficients implicit", 'coefficients')

        if (kind is FormKind.COORDINATE) != (codomain is Codomain.C0_COORDINATES):
            raise ParameterDomainError("Only the coordinate operator is c0-valued", 'codomain', codomain.value)

        object.__setattr__(self, 'order', order)
        object.__setattr__(self, 'dim', dim)
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'codomain', codomain)
        object.__setattr__(self, 'domain_exponents', exponents)

    @property
    def is_complex(self) -> bool:
        return self.coefficients is not None and np.iscomplexobj(self.coefficients)

    @property
    def is_scalar_valued(self) -> bool:
        return self.codomain is Codomain.SCALAR

    def _check_inputs(self, vectors: Sequence[np.ndarray], skip: Optional[int] = None):
        if len(vectors) != self.order:
            raise DimensionMismatchError("One input vector per slot", expected=self.order, actual=len(vectors))
        arrays = []
        for slot, vector in enumerate(vectors):
            if slot == skip:
                arrays.append(None)
                continue
            array = np.asarray(vector)
            if array.shape != (self.dim,):
                raise DimensionMismatchError(f"Slot {slot} input has the wrong dimension",
                                             expected=self.dim, actual=list(array.shape))
            arrays.append(array)
        return arrays

    def dense(self, budget: Optional[int] = None) -> np.ndarray:
        """The full coefficient tensor; implicit diagonal forms are materialized here."""
        if self.kind is FormKind.DENSE:
            return self.coefficients
        if self.kind is FormKind.COORDINATE:
            raise InapplicableError("The coordinate operator has no scalar coefficient tensor",
                                    reason="c0-valued")
        check_budget(self.dim ** self.order, budget)
        tensor = np.zeros((self.dim,) * self.order)
        index = np.arange(self.dim)
        tensor[(index,) * self.order] = 1.0
        return tensor

    def evaluate(self, vectors: Sequence[np.ndarray]):
        """Full multilinear contraction T(x^(1), ..., x^(m))."""
        if not self.is_scalar_valued:
            raise InapplicableError("Coordinate operator values live in c0; use output_norm", reason="c0-valued")
        arrays = self._check_inputs(vectors)
        if self.kind is FormKind.DIAGONAL:
            return np.sum(np.prod(np.stack(arrays), axis=0))
        result = self.coefficients
        for array in reversed(arrays):
            result = np.tensordot(result, array, axes=([result.ndim - 1], [0]))
        return result[()]

    def output_norm(self, vectors: Sequence[np.ndarray]) -> float:
        """|T(x)| for scalar forms, the c0 norm prod_i max_j |x^(i)_j| for the coordinate operator."""
        if self.is_scalar_valued:
            return float(abs(self.evaluate(vectors)))
        arrays = self._check_inputs(vectors)
        return float(np.prod([np.max(np.abs(a)) for a in arrays]))

    def partial_contraction(self, vectors: Sequence[np.ndarray], skip: int) -> np.ndarray:
        """The linear functional on slot ``skip`` obtained by fixing every other slot."""
        if not self.is_scalar_valued:
            raise InapplicableError("Partial contractions need a scalar-valued form", reason="c0-valued")
        if not 0 <= skip < self.order:
            raise ParameterDomainError(f"Slot {skip} out of range", 'skip', skip)
        arrays = self._check_inputs(vectors, skip=skip)
        if self.kind is FormKind.DIAGONAL:
            others = [a for a in arrays if a is not None]
            if not others:
                return np.ones(self.dim)
            return np.prod(np.stack(others), axis=0)
        result = self.coefficients
        # Contract from the last axis down so lower axis numbers stay valid
        for slot in reversed(range(self.order)):
            if slot == skip:
                continue
            result = np.tensordot(result, arrays[slot], axes=([slot], [0]))
        return result

    def scaled(self, factor) -> 'MultilinearForm':
        if self.kind is not FormKind.DENSE:
            return MultilinearForm(self.order, self.dim, self.domain_exponents, FormKind.DENSE,
                                   self.dense() * factor, self.codomain, self.seed)
        return MultilinearForm(self.order, self.dim, self.domain_exponents, self.kind,
                               self.coefficients * factor, self.codomain, self.seed)

    def header(self) -> dict:
        header = {
            'format': FORM_FORMAT,
            'version': FORM_FORMAT_VERSION,
            'order': self.order,
            'dim': self.dim,
            'kind': self.kind.value,
            'codomain': self.codomain.value,
            'domain_exponents': [_encode_exponent(e) for e in self.domain_exponents],
            'seed': self.seed,
        }
        if self.coefficients is not None:
            header['dtype'] = self.coefficients.dtype.newbyteorder('<').str
            header['shape'] = list(self.coefficients.shape)
        return header

    def to_bytes(self) -> bytes:
        """One JSON header line followed by the little-endian coefficient payload."""
        head = json.dumps(self.header(), sort_keys=True).encode('utf-8') + b'\n'
        if self.coefficients is None:
            return head
        dtype = self.coefficients.dtype.newbyteorder('<')
        return head + np.ascontiguousarray(self.coefficients, dtype=dtype).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> 'MultilinearForm':
        head, sep, payload = data.partition(b'\n')
        if not sep:
            raise SchemaError("Missing header line in serialized form", field='header')
        try:
            header = json.loads(head.decode('utf-8'))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise SchemaError(f"Unreadable form header: {e}", field='header')
        if header.get('format') != FORM_FORMAT:
            raise SchemaError("Not a serialized multilinear form", field='format')
        for key in ('order', 'dim', 'kind', 'codomain', 'domain_exponents'):
            if key not in header:
                raise SchemaError(f"Form header lacks '{key}'", field=key)

        coefficients = None
        if header['kind'] == FormKind.DENSE.value:
            if 'dtype' not in header or 'shape' not in header:
                raise SchemaError("Dense form header lacks dtype/shape", field='dtype')
            dtype = np.dtype(header['dtype'])
            shape = tuple(header['shape'])
            expected = int(np.prod(shape)) * dtype.itemsize
            if len(payload) != expected:
                raise SchemaError(f"Payload has {len(payload)} bytes, expected {expected}", field='payload')
            coefficients = np.frombuffer(payload, dtype=dtype).reshape(shape).astype(dtype.newbyteorder('='))
        elif payload:
            raise SchemaError("Implicit forms carry no payload", field='payload')

        return cls(
            order=header['order'],
            dim=header['dim'],
            domain_exponents=tuple(_decode_exponent(e) for e in header['domain_exponents']),
            kind=FormKind(header['kind']),
            coefficients=coefficients,
            codomain=Codomain(header['codomain']),
            seed=header.get('seed'),
        )


def build_ksz_form(m: int, n: int, seed: int, domain_exponent: float = 2.0,
                   budget: Optional[int] = None) -> MultilinearForm:
    """Random-sign form A with i.i.d. uniform +-1 coefficients."""
    m = _check_dimension(m, 'm')
    n = _check_dimension(n, 'n')
    check_budget(n ** m, budget)
    rng = np.random.default_rng(seed)
    coefficients = rng.choice(np.array([-1.0, 1.0]), size=(n,) * m)
    return MultilinearForm(m, n, (domain_exponent,) * m, FormKind.DENSE, coefficients, Codomain.SCALAR, seed)


def build_diagonal_form(m: int, n: int, domain_exponent: float = 2.0) -> MultilinearForm:
    """Diagonal form S(x^(1), ..., x^(m)) = sum_i x^(1)_i ... x^(m)_i."""
    m = _check_dimension(m, 'm')
    n = _check_dimension(n, 'n')
    return MultilinearForm(m, n, (domain_exponent,) * m, FormKind.DIAGONAL)


def build_coordinate_operator(m: int, n: int, domain_exponent: float = 2.0) -> MultilinearForm:
    """c0-valued T(x^(1), ..., x^(m)) = (x^(1)_{j_1} ... x^(m)_{j_m}); ||T|| = 1."""
    m = _check_dimension(m, 'm')
    n = _check_dimension(n, 'n')
    return MultilinearForm(m, n, (domain_exponent,) * m, FormKind.COORDINATE, codomain=Codomain.C0_COORDINATES)


def build_dense_form(coefficients, domain_exponents, seed: Optional[int] = None) -> MultilinearForm:
    coefficients = np.asarray(coefficients)
    if coefficients.ndim == 0:
        raise DimensionMismatchError("Coefficients need at least one axis", expected='order >= 1', actual=0)
    return MultilinearForm(coefficients.ndim, coefficients.shape[0], domain_exponents,
                           FormKind.DENSE, coefficients, Codomain.SCALAR, seed)


def diagonal_form_norm(m: int, n: int, domain_exponent: float) -> float:
    """
    Norm of S on (l_a^n)^m: n^{max(0, 1 - m/a)}. Attained at the uniform
    vector when m <= a and at a basis vector otherwise.
    """
    a = _check_exponent(domain_exponent)
    return float(n) ** max(0.0, 1.0 - m / a)


def coordinate_operator_outputs(m: int, n: int, families: Sequence[VectorFamily]) -> np.ndarray:
    """
    c0 output norms of T over every index tuple: entry (k_1..k_m) is
    prod_i max_{j <= n} |x^(i)_{k_i, j}|.
    """
    m = _check_dimension(m, 'm')
    n = _check_dimension(n, 'n')
    if len(families) != m:
        raise DimensionMismatchError("One family per slot", expected=m, actual=len(families))
    outputs = np.ones(())
    for family in families:
        if family.ambient_dim < n:
            raise DimensionMismatchError("Family dimension below the operator dimension",
                                         expected=n, actual=family.ambient_dim)
        maxima = np.max(np.abs(family.entries[:, :n]), axis=1)
        outputs = np.multiply.outer(outputs, maxima)
    return outputs


def evaluate_form(form: MultilinearForm, inputs: Sequence[np.ndarray]):
    return form.evaluate(inputs)


class HomogeneousPolynomial:
    """P(x) = A(x, ..., x) for a symmetric m-linear form A on l_a^n."""

    def __init__(self, form: MultilinearForm):
        if not form.is_scalar_valued:
            raise InapplicableError("Polynomials are built from scalar-valued forms", reason="c0-valued")
        if len(set(form.domain_exponents)) != 1:
            raise ParameterDomainError("A polynomial has a single domain exponent", 'domain_exponents')
        self.form = form

    @property
    def degree(self) -> int:
        return self.form.order

    @property
    def dim(self) -> int:
        return self.form.dim

    @property
    def domain_exponent(self) -> float:
        return self.form.domain_exponents[0]

    def __call__(self, x):
        return self.form.evaluate([np.asarray(x)] * self.degree)

    def analytic_norm(self) -> Optional[float]:
        """Sup-norm on the unit ball when a closed form is known."""
        if self.form.kind is FormKind.DIAGONAL:
            return diagonal_form_norm(self.degree, self.dim, self.domain_exponent)
        return None


class DiagonalPolynomial(HomogeneousPolynomial):
    """P(x) = sum_i x_i^m, the restriction of the diagonal form to the diagonal."""

    def __init__(self, m: int, n: int, domain_exponent: float = 2.0):
        super().__init__(build_diagonal_form(m, n, domain_exponent))

    def __call__(self, x):
        x = np.asarray(x)
        if x.shape != (self.dim,):
            raise DimensionMismatchError("Input has the wrong dimension", expected=self.dim, actual=list(x.shape))
        return np.sum(x ** self.degree)


def diagonal_polynomial(m: int, n: int, domain_exponent: float = 2.0) -> DiagonalPolynomial:
    return DiagonalPolynomial(m, n, domain_exponent)
