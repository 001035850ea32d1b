# tests/test_norm_estimator.py
"""
Test suite for operator, weak and polynomial norm computations.
"""

import numpy as np
import pytest

from core.constructions import (
    HomogeneousPolynomial,
    VectorFamily,
    build_coordinate_operator,
    build_dense_form,
    build_diagonal_form,
    build_ksz_form,
    diagonal_polynomial,
)
from core.norm_estimator import (
    NormEstimator,
    NormKind,
    NormMethod,
    dual_norm,
    dual_norming_vector,
    operator_norm_ascent,
    operator_norm_bruteforce,
    polynomial_norm,
    weak_q_norm,
)
from utils.exceptions import InapplicableError, ParameterDomainError, SizeError


class TestDualNorming:
    """Test the one-slot subproblem"""

    @pytest.mark.parametrize('p', [1.0, 1.5, 2.0, 3.0, np.inf])
    def test_attains_dual_norm(self, p):
        """Test the norming vector is a unit vector attaining the dual norm"""
        c = np.array([0.3, -1.2, 0.7, 2.0])
        x = dual_norming_vector(c, p)
        assert np.linalg.norm(x, ord=p) == pytest.approx(1.0)
        assert c @ x == pytest.approx(dual_norm(c, p))

    def test_l1_tie_takes_lowest_index(self):
        """Test ties in l_1 pick the lowest index"""
        x = dual_norming_vector(np.array([1.0, -1.0, 0.5]), 1.0)
        np.testing.assert_array_equal(x, [1.0, 0.0, 0.0])

    def test_zero_functional(self):
        """Test a zero functional still gets a unit vector"""
        x = dual_norming_vector(np.zeros(3), 2.0)
        assert np.linalg.norm(x) == pytest.approx(1.0)

    def test_complex_functional(self):
        """Test complex functionals are normed to a real value"""
        c = np.array([1 + 1j, -2j])
        x = dual_norming_vector(c, 2.0)
        assert np.real(c @ x) == pytest.approx(np.linalg.norm(c))
        assert np.imag(c @ x) == pytest.approx(0.0, abs=1e-12)


class TestOperatorNormAscent:
    """Test the alternating ascent estimate"""

    def test_rank_one(self):
        """Test ascent on a rank-one form"""
        a = np.array([1.0, 2.0, -2.0])
        b = np.array([3.0, 4.0, 0.0])
        estimate = operator_norm_ascent(build_dense_form(np.outer(a, b), (2.0, 2.0)))
        assert estimate.value == pytest.approx(15.0, rel=1e-6)
        assert estimate.kind is NormKind.ASCENT_LOWER_ESTIMATE
        assert estimate.converged

    def test_identity_l2(self):
        """Test ascent on the identity in l_2"""
        estimate = operator_norm_ascent(build_dense_form(np.eye(2), (2.0, 2.0)))
        assert estimate.value == pytest.approx(1.0, rel=1e-6)

    def test_identity_l1(self):
        """Test ascent on the identity in l_1"""
        estimate = operator_norm_ascent(build_dense_form(np.eye(4), (1.0, 1.0)), restarts=64)
        assert estimate.value == pytest.approx(1.0, rel=1e-9)

    def test_l1_estimate_below_max_coefficient(self):
        """Test the l_1 norm is the largest coefficient and bounds ascent"""
        coefficients = np.random.default_rng(2).normal(size=(4, 4, 4))
        form = build_dense_form(coefficients, (1.0, 1.0, 1.0))
        exact = operator_norm_bruteforce(form)
        assert exact.exact
        assert exact.value == pytest.approx(np.max(np.abs(coefficients)), rel=1e-12)
        assert operator_norm_ascent(form, restarts=64).value <= exact.value + 1e-12

    def test_reproducible(self):
        """Test ascent is reproducible under the same seed"""
        form = build_ksz_form(3, 5, seed=4)
        first = operator_norm_ascent(form, restarts=4, seed=11)
        second = operator_norm_ascent(form, restarts=4, seed=11)
        assert first.value == second.value

    def test_iteration_cap_is_reported(self):
        """Test hitting the iteration cap is reported as not converged"""
        form = build_ksz_form(2, 8, seed=0, domain_exponent=3.0)
        estimate = operator_norm_ascent(form, restarts=1, tol=0.0, max_iters=1)
        assert not estimate.converged
        assert estimate.value > 0

    def test_below_bruteforce(self):
        """Test ascent stays below the exact norm"""
        form = build_dense_form(np.random.default_rng(8).normal(size=(3, 3)), (np.inf, 1.0))
        exact = operator_norm_bruteforce(form)
        assert exact.exact
        assert operator_norm_ascent(form).value <= exact.value + 1e-9

    @pytest.mark.parametrize('exponents', [(2.0, 2.0), (np.inf, np.inf), (1.0, np.inf), (np.inf, 1.0), (1.0, 1.0)])
    def test_matches_oracle_on_random_forms(self, exponents):
        """Test ascent reaches the exact norm of small random bilinear forms"""
        rng = np.random.default_rng(31)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            form = build_dense_form(rng.normal(size=(n, n)), exponents)
            exact = operator_norm_bruteforce(form)
            assert exact.exact
            estimate = operator_norm_ascent(form, restarts=64)
            assert estimate.value <= exact.value * (1 + 1e-9)
            assert estimate.value == pytest.approx(exact.value, rel=1e-6)

    def test_rejects_c0_valued(self):
        """Test c0-valued operators are rejected"""
        with pytest.raises(InapplicableError):
            operator_norm_ascent(build_coordinate_operator(2, 3))


class TestOperatorNormBruteforce:
    """Test the small-instance oracle"""

    def test_identity_spectral(self):
        """Test the exact spectral norm of the identity"""
        estimate = operator_norm_bruteforce(build_dense_form(np.eye(3), (2.0, 2.0)))
        assert estimate.value == pytest.approx(1.0)
        assert estimate.exact

    def test_linear_form(self):
        """Test the exact norm of a linear form"""
        estimate = operator_norm_bruteforce(build_dense_form(np.array([3.0, -4.0]), (2.0,)))
        assert estimate.value == pytest.approx(5.0)

    def test_identity_l1_vertices(self):
        """Test the exact l_1 norm from vertices"""
        estimate = operator_norm_bruteforce(build_dense_form(np.eye(3), (1.0, 1.0)))
        assert estimate.value == pytest.approx(1.0)
        assert estimate.exact

    def test_sphere_grid(self):
        """Test the sphere grid result is marked inexact"""
        estimate = operator_norm_bruteforce(build_diagonal_form(2, 2, domain_exponent=4.0), resolution=64)
        assert estimate.value == pytest.approx(np.sqrt(2.0), rel=1e-9)
        assert not estimate.exact
        assert estimate.resolution == 64

    def test_budget(self):
        """Test the oracle respects its evaluation budget"""
        with pytest.raises(SizeError):
            operator_norm_bruteforce(build_ksz_form(3, 10, seed=0, domain_exponent=3.0), budget=1000)

    def test_complex_outside_spectral_case(self):
        """Test complex forms outside the spectral case are rejected"""
        form = build_dense_form(np.eye(2) * 1j, (1.0, 1.0))
        with pytest.raises(InapplicableError):
            operator_norm_bruteforce(form)


class TestWeakNorm:
    """Test weak l_q norms of vector families"""

    @pytest.mark.parametrize('q,ambient', [(1.0, np.inf), (2.0, 2.0), (3.0, 1.5)])
    def test_unit_basis_exact(self, q, ambient):
        """Test the weak norm of a unit basis is one"""
        family = VectorFamily.unit_basis(6, ambient)
        estimate = weak_q_norm(family, q)
        assert estimate.value == pytest.approx(1.0)
        assert estimate.exact

    def test_unit_basis_via_ascent(self):
        """Test the weak norm of a unit basis via ascent"""
        family = VectorFamily.unit_basis(5, 4.0 / 3.0)
        assert weak_q_norm(family, 4.0).value == pytest.approx(1.0, rel=1e-9)

    def test_single_vector(self):
        """Test the weak norm of one vector is its norm"""
        family = VectorFamily(np.array([3.0, 4.0]), 2.0)
        assert weak_q_norm(family, 1.5).value == pytest.approx(5.0)

    def test_scaled_basis(self):
        """Test the weak norm scales with the basis"""
        family = VectorFamily.unit_basis(4, 2.0, scale=-2.5)
        assert weak_q_norm(family, 2.0).value == pytest.approx(2.5)

    def test_zero_family(self):
        """Test the weak norm of a zero family is zero"""
        assert weak_q_norm(VectorFamily(np.zeros((3, 3)), 2.0), 2.0).value == 0.0

    def test_hilbert_case_is_largest_singular_value(self):
        """Test the weak l_2 norm of a random l_2 family is its largest singular value"""
        rng = np.random.default_rng(37)
        for _ in range(10):
            matrix = rng.normal(size=(5, 5))
            estimate = weak_q_norm(VectorFamily(matrix, 2.0), 2.0)
            largest = np.linalg.svd(matrix, compute_uv=False)[0]
            assert estimate.exact
            assert estimate.value == pytest.approx(largest, rel=1e-9)
            ascent = operator_norm_ascent(build_dense_form(matrix, (2.0, 2.0)))
            assert ascent.value == pytest.approx(largest, rel=1e-6)

    def test_decreases_in_q(self):
        """Test weak norms do not increase as q grows"""
        rng = np.random.default_rng(41)
        for _ in range(10):
            family = VectorFamily(rng.normal(size=(5, 5)), 2.0)
            values = [weak_q_norm(family, q, restarts=32).value for q in (1.0, 1.5, 2.0, 3.0)]
            for larger, smaller in zip(values, values[1:]):
                assert smaller <= larger * (1 + 1e-9)

    @pytest.mark.parametrize('q', [0.5, np.inf])
    def test_invalid_q(self, q):
        """Test q outside its range is rejected"""
        with pytest.raises(ParameterDomainError):
            weak_q_norm(VectorFamily.unit_basis(2, 2.0), q)


class TestPolynomialNorm:
    """Test sup-norms of homogeneous polynomials"""

    def test_diagonal_is_analytic(self):
        """Test the diagonal polynomial norm is analytic"""
        estimate = polynomial_norm(diagonal_polynomial(2, 9, domain_exponent=4.0))
        assert estimate.value == pytest.approx(3.0)
        assert estimate.kind is NormKind.EXACT_ANALYTIC

    def test_dense_power_iteration(self):
        """Test a dense polynomial norm by ascent"""
        polynomial = HomogeneousPolynomial(build_dense_form(np.diag([2.0, 1.0]), (2.0, 2.0)))
        estimate = polynomial_norm(polynomial, restarts=4)
        assert estimate.value == pytest.approx(2.0, rel=1e-6)
        assert estimate.kind is NormKind.ASCENT_LOWER_ESTIMATE


class TestNormEstimator:
    """Test method dispatch and config defaults"""

    @pytest.fixture
    def estimator(self):
        return NormEstimator(seed=3)

    def test_coordinate_is_always_one(self, estimator):
        """Test every method gives one for the coordinate operator"""
        form = build_coordinate_operator(2, 5)
        for method in NormMethod:
            estimate = estimator.estimate(form, method)
            assert estimate.value == 1.0
            assert estimate.kind is NormKind.EXACT_ANALYTIC

    def test_diagonal_analytic(self, estimator):
        """Test the analytic method on a diagonal form"""
        estimate = estimator.estimate(build_diagonal_form(2, 16, domain_exponent=4.0), 'analytic')
        assert estimate.value == pytest.approx(4.0)

    def test_dense_has_no_analytic_norm(self, estimator):
        """Test dense forms have no analytic norm"""
        with pytest.raises(InapplicableError):
            estimator.estimate(build_ksz_form(2, 3, seed=0), NormMethod.ANALYTIC)

    def test_config_defaults(self, tmp_config):
        """Test the estimator reads its defaults from config"""
        estimator = NormEstimator(tmp_config)
        assert estimator.restarts == 4
        assert estimator.resolution == 32
