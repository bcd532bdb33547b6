"""Произведения Бляшке, сертификат внутренности и нормировка."""

import numpy as np
import pytest
from conftest import cpoly, poly

from core.errors import DegenerateInputError, DomainError, PreconditionError
from domain import generators, series
from domain.entities import BlaschkeSpec, ScalarField
from domain.inner import (
    blaschke_series,
    geometric_tail_bound,
    is_hat_symmetric,
    is_inner,
    normalize_real_symmetric,
)


class TestBlaschkeSpec:
    def test_zero_outside_disk(self):
        with pytest.raises(DomainError):
            BlaschkeSpec(zeros=(1.0,))

    def test_front_must_be_unimodular(self):
        with pytest.raises(DomainError):
            BlaschkeSpec(zeros=(0.5,), front=2.0)

    def test_real_symmetry(self):
        assert BlaschkeSpec(zeros=(0.3 + 0.4j, 0.3 - 0.4j)).real_symmetric
        assert BlaschkeSpec(zeros=(-0.5,)).real_symmetric
        assert not BlaschkeSpec(zeros=(0.3 + 0.4j,)).real_symmetric
        assert not BlaschkeSpec(zeros=(0.5,), front=1j).real_symmetric

    def test_conjugate(self):
        spec = BlaschkeSpec(zeros=(0.3 + 0.4j,), front=1j, monomial_order=2)
        conj = spec.conjugate()
        assert conj.zeros == (0.3 - 0.4j,)
        assert conj.front == -1j
        assert conj.monomial_order == 2
        assert conj.degree == 3


class TestBlaschkeSeries:
    def test_single_real_zero(self):
        b = blaschke_series(BlaschkeSpec(zeros=(0.5,)), 16)
        assert b.field is ScalarField.REAL
        np.testing.assert_allclose(b.coeffs[:4], [0.5, -0.75, -0.375, -0.1875], atol=1e-15)

    def test_monomial(self):
        b = blaschke_series(BlaschkeSpec(monomial_order=2), 8)
        np.testing.assert_array_equal(b.coeffs, np.eye(1, 8, 2)[0])
        assert b.spill == 0.0

    def test_conjugate_pair_gives_real_coefficients(self):
        b = blaschke_series(BlaschkeSpec(zeros=(0.3 + 0.4j, 0.3 - 0.4j)), 64)
        assert b.field is ScalarField.REAL
        assert b.coeffs[0] == pytest.approx(0.25)

    def test_non_symmetric_is_complex(self):
        b = blaschke_series(BlaschkeSpec(zeros=(0.3 + 0.4j,)), 32)
        assert b.field is ScalarField.COMPLEX
        assert b.coeffs[0] == pytest.approx(0.3 + 0.4j)

    def test_hat_matches_conjugate_spec(self):
        spec = BlaschkeSpec(zeros=(0.2 + 0.5j, -0.4j), front=np.exp(0.3j))
        b = blaschke_series(spec, 64)
        b_conj = blaschke_series(spec.conjugate(), 64)
        np.testing.assert_allclose(series.hat(b).coeffs, b_conj.coeffs, atol=1e-14)

    def test_values_inside_disk(self):
        b = blaschke_series(BlaschkeSpec(zeros=(0.5,)), 128)
        assert series.evaluate(b, 0.5) == pytest.approx(0, abs=1e-14)
        assert series.evaluate(b, 0.0) == pytest.approx(0.5)

    @pytest.mark.parametrize('seed', range(6))
    def test_joined_zeros_multiply_series(self, seed):
        rng = generators.stream(seed, 'product')
        A = generators.random_blaschke_spec(rng, 1 + seed % 3, real_symmetric=seed % 2 == 0)
        B = generators.random_blaschke_spec(rng, 1 + seed % 4, real_symmetric=seed % 3 == 0)
        B = BlaschkeSpec(zeros=B.zeros, front=B.front, monomial_order=seed % 3)
        joined = BlaschkeSpec(
            zeros=A.zeros + B.zeros,
            front=A.front * B.front,
            monomial_order=A.monomial_order + B.monomial_order,
        )
        product = series.multiply(blaschke_series(A, 128), blaschke_series(B, 128), 128)
        np.testing.assert_allclose(
            blaschke_series(joined, 128).coeffs, product.coeffs, atol=1e-12
        )
        assert product.spill <= 1e-8


class TestIsInner:
    @pytest.mark.parametrize(
        'spec',
        [
            BlaschkeSpec(zeros=(0.5,)),
            BlaschkeSpec(zeros=(0.3 + 0.4j, 0.3 - 0.4j, -0.6)),
            BlaschkeSpec(monomial_order=3),
            BlaschkeSpec(zeros=(0.1j,), front=1j, monomial_order=1),
        ],
    )
    def test_finite_blaschke_products_are_inner(self, spec):
        certificate = is_inner(blaschke_series(spec, 128))
        assert certificate.passed
        assert certificate.max_deviation <= 1e-10
        assert certificate.grid_size == 512

    def test_polynomial_is_not_inner(self):
        certificate = is_inner(poly(1, 1, order=8))
        assert not certificate.passed
        assert certificate.max_deviation == pytest.approx(1.0)

    def test_truncation_too_short_fails_on_tail(self):
        """Сильная усечённость видна по хвосту, даже если сетка ещё близка к 1."""
        certificate = is_inner(blaschke_series(BlaschkeSpec(zeros=(0.9,)), 16))
        assert not certificate.passed
        assert certificate.tail_bound > 1e-8

    def test_grid_too_small(self):
        with pytest.raises(PreconditionError):
            is_inner(poly(1), grid_size=32)

    def test_high_monomial_is_inner(self):
        certificate = is_inner(series.monomial(120, 128))
        assert certificate.passed
        assert certificate.tail_bound == 0.0

    def test_tail_bound_from_zeros(self):
        spec = BlaschkeSpec(zeros=(0.5,))
        certificate = is_inner(blaschke_series(spec, 128), spec=spec)
        assert certificate.passed
        assert certificate.tail_bound <= 1e-30

        spec = BlaschkeSpec(zeros=(0.9,))
        certificate = is_inner(blaschke_series(spec, 16), spec=spec)
        assert not certificate.passed
        assert certificate.tail_bound > 1e-8

    def test_tail_bound_edge_cases(self):
        assert geometric_tail_bound(BlaschkeSpec(monomial_order=3), 16) == 0.0
        assert geometric_tail_bound(BlaschkeSpec(monomial_order=16), 16) == 1.0
        assert geometric_tail_bound(BlaschkeSpec(zeros=(0.0, 0.0)), 16) == 0.0

    @pytest.mark.parametrize('seed', range(5))
    def test_tail_bound_dominates_spill(self, seed):
        rng = generators.stream(seed, 'tail')
        spec = generators.random_blaschke_spec(rng, 1 + seed % 4, real_symmetric=seed % 2 == 0)
        assert blaschke_series(spec, 32).spill <= geometric_tail_bound(spec, 32)


class TestNormalization:
    def test_real_sign_flip(self):
        b = blaschke_series(BlaschkeSpec(zeros=(0.5,)), 32)
        result = normalize_real_symmetric(series.scale(b, -1.0))
        assert result.lam == -1
        assert result.real_symmetric
        np.testing.assert_allclose(result.series.coeffs, b.coeffs)

    def test_rotated_real_function_becomes_real(self):
        result = normalize_real_symmetric(cpoly(1j, 1j))
        assert result.lam == pytest.approx(-1j)
        assert result.real_symmetric
        assert result.series.field is ScalarField.REAL
        np.testing.assert_allclose(result.series.coeffs[:2], [1, 1])

    def test_first_nonzero_coefficient_is_used(self):
        result = normalize_real_symmetric(cpoly(0, -2j, 1j))
        assert result.lam == pytest.approx(1j)
        np.testing.assert_allclose(result.series.coeffs[:3], [0, 2, -1])

    def test_genuinely_complex_function(self):
        result = normalize_real_symmetric(cpoly(1, 1j))
        assert not result.real_symmetric
        assert result.series.field is ScalarField.COMPLEX

    def test_zero_series(self):
        with pytest.raises(DegenerateInputError):
            normalize_real_symmetric(series.zeros(8))

    def test_hat_symmetry(self):
        assert is_hat_symmetric(poly(1, 2))
        assert is_hat_symmetric(cpoly(1, 2))
        assert not is_hat_symmetric(cpoly(1, 2j))
