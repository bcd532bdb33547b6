"""Генераторы экземпляров: модельные пространства, ядра Тёплица, g·K_θ, дефект."""

import numpy as np
import pytest
import scipy.linalg
from conftest import assert_same_subspace, poly

from core.errors import (
    DimensionMismatchError,
    FieldError,
    PreconditionError,
    RejectedInstanceError,
    SignError,
)
from domain import engine, generators, series
from domain import subspace as sub
from domain.entities import BlaschkeSpec, LaurentSymbol, ScalarField, SeriesTuple
from domain.inner import blaschke_series


class TestStreams:
    def test_same_names_same_draws(self):
        a = generators.stream(3, 'hitt', '1').standard_normal(5)
        b = generators.stream(3, 'hitt', '1').standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_different_names_differ(self):
        a = generators.stream(3, 'hitt', '1').standard_normal(5)
        b = generators.stream(3, 'hitt', '2').standard_normal(5)
        c = generators.stream(4, 'hitt', '1').standard_normal(5)
        assert not np.allclose(a, b)
        assert not np.allclose(a, c)

    def test_random_blaschke_spec(self):
        rng = generators.stream(0, 'spec')
        for degree in range(1, 6):
            spec = generators.random_blaschke_spec(rng, degree)
            assert spec.degree == degree
            assert spec.real_symmetric
            assert all(abs(a) < generators.ZERO_RADIUS + 1e-12 for a in spec.zeros)

    def test_random_subspace_is_reproducible(self):
        S1 = generators.random_subspace(1, 32, 3)
        S2 = generators.random_subspace(1, 32, 3)
        np.testing.assert_array_equal(S1.basis, S2.basis)
        np.testing.assert_allclose(S1.basis.T @ S1.basis, np.eye(3), atol=1e-12)

    def test_random_subspace_too_large(self):
        with pytest.raises(DimensionMismatchError):
            generators.random_subspace(1, 4, 5)

    def test_random_subspaces_are_not_nearly_invariant(self):
        hits = sum(
            engine.is_nearly_invariant(generators.random_subspace(seed, 64, 5))
            for seed in range(20)
        )
        assert hits == 0


class TestModelSpace:
    def test_monomial(self):
        K = generators.model_space(blaschke_series(BlaschkeSpec(monomial_order=2), 16))
        assert_same_subspace(K, sub.span(poly(1), poly(0, 1)))

    def test_single_zero_is_reproducing_kernel(self):
        K = generators.model_space(blaschke_series(BlaschkeSpec(zeros=(0.5,)), 64))
        assert K.dim == 1
        kernel = np.sqrt(0.75) * 0.5 ** np.arange(64)
        np.testing.assert_allclose(K.basis[:, 0], kernel, atol=1e-10)

    def test_constant_theta(self):
        assert generators.model_space(blaschke_series(BlaschkeSpec(), 16)).dim == 0

    def test_rejects_non_inner(self):
        with pytest.raises(PreconditionError):
            generators.model_space(poly(1, 1))

    def test_order_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            generators.model_space(blaschke_series(BlaschkeSpec(monomial_order=1), 16), order=32)

    def test_high_monomial(self):
        K = generators.model_space(blaschke_series(BlaschkeSpec(monomial_order=120), 128))
        assert K.dim == 120

    @pytest.mark.parametrize('seed', range(4))
    def test_dimension_equals_degree_and_invariant(self, seed):
        spec = generators.random_blaschke_spec(generators.stream(seed, 'model'), 1 + seed)
        K = generators.model_space(blaschke_series(spec, 128))
        assert K.dim == spec.degree
        assert engine.almost_defect(K).defect == 0

    def test_beurling_space_is_complement(self):
        theta = blaschke_series(BlaschkeSpec(zeros=(0.5, -0.3)), 64)
        M = generators.beurling_space(theta)
        K = generators.model_space(theta)
        assert M.dim + K.dim == 64
        np.testing.assert_allclose(M.basis.T @ K.basis, 0, atol=1e-12)


class TestToeplitzKernel:
    def test_backward_shift_symbol(self):
        instance = generators.toeplitz_kernel(LaurentSymbol({-1: 1}), 64)
        assert_same_subspace(instance.subspace, sub.span(poly(1, order=64)))
        assert all(c.passed for c in instance.certificates)

    def test_shift_symbol_has_trivial_kernel(self):
        instance = generators.toeplitz_kernel(LaurentSymbol({1: 1}), 64)
        assert instance.subspace.dim == 0
        assert instance.certificates == []

    def test_quarter_symbol(self):
        instance = generators.toeplitz_kernel(LaurentSymbol({-2: 1, 0: -0.25}), 64)
        K = instance.subspace
        assert K.dim == 2
        assert all(c.passed for c in instance.certificates)
        dense = scipy.linalg.null_space(
            generators.toeplitz_matrix(LaurentSymbol({-2: 1, 0: -0.25}), 64), rcond=1e-8
        )
        assert sub.containment_residual(K, sub.from_columns(dense, ScalarField.REAL)) <= 1e-6

    def test_mixed_symbol_is_nearly_but_not_almost_invariant(self):
        instance = generators.toeplitz_kernel(LaurentSymbol({-2: 1, 1: 0.3}), 128)
        K = instance.subspace
        assert K.dim == 2
        assert engine.is_nearly_invariant(K, 1e-6)
        assert engine.almost_defect(K, 1e-6).defect >= 1

    def test_complex_symbol(self):
        instance = generators.toeplitz_kernel(LaurentSymbol({-2: 1, 0: 0.25j}), 64)
        assert instance.subspace.field is ScalarField.COMPLEX
        assert instance.subspace.dim == 2
        assert all(c.passed for c in instance.certificates)

    def test_toeplitz_matrix_entries(self):
        T = generators.toeplitz_matrix(LaurentSymbol({-1: 2, 1: 3}), 4)
        assert T[0, 1] == 2
        assert T[1, 0] == 3
        assert T[0, 0] == 0


class TestInnerMultiplier:
    def test_trivial_multiplier_gives_model_space(self):
        instance = generators.inner_multiplier_instance(
            BlaschkeSpec(), BlaschkeSpec(monomial_order=3), 16
        )
        assert_same_subspace(instance.subspace, sub.span(poly(1), poly(0, 1), poly(0, 0, 1)))
        assert all(c.passed for c in instance.certificates)

    def test_double_zero_multiplier(self):
        instance = generators.inner_multiplier_instance(
            BlaschkeSpec(zeros=(0.5, 0.5)), BlaschkeSpec(monomial_order=2), 128
        )
        assert instance.subspace.dim == 2
        assert all(c.passed for c in instance.certificates)
        g = engine.extract_g(instance.subspace)
        assert g.field is ScalarField.REAL
        assert g.coeffs[0] > 0

    def test_negative_value_at_origin(self):
        with pytest.raises(SignError):
            generators.inner_multiplier_instance(
                BlaschkeSpec(zeros=(-0.5,)), BlaschkeSpec(monomial_order=1), 16
            )

    def test_non_symmetric_multiplier(self):
        with pytest.raises(FieldError):
            generators.inner_multiplier_instance(
                BlaschkeSpec(zeros=(0.3j,)), BlaschkeSpec(monomial_order=1), 16
            )

    @pytest.mark.parametrize('seed', range(6))
    def test_random_instances_pass(self, seed):
        instance = generators.random_inner_multiplier_instance(seed, 128)
        assert instance.seed == seed
        assert all(c.passed for c in instance.certificates), [
            c.residuals for c in instance.certificates
        ]


class TestDefectInstance:
    def test_defect_free_case(self):
        N = sub.span(poly(1), poly(0, 1))
        instance = generators.defect_instance(poly(1), [], N, 16)
        assert_same_subspace(instance.subspace, N)
        assert all(c.passed for c in instance.certificates)

    def test_single_monomial_in_vanishing_case(self):
        N = sub.span(poly(1))
        instance = generators.defect_instance(None, [series.monomial(3, 16)], N, 16)
        assert_same_subspace(instance.subspace, sub.span(series.monomial(4, 16)))
        assert instance.params['case'] == 'ii'
        assert all(c.passed for c in instance.certificates)

    def test_overlap_is_rejected(self):
        N = generators.krylov_stacked_subspace(
            [SeriesTuple((poly(0, 1, order=8), series.zeros(8)))]
        )
        with pytest.raises(RejectedInstanceError):
            generators.defect_instance(poly(1, order=8), [series.monomial(1, 8)], N, 8)

    def test_non_orthonormal_defect_vectors(self):
        N = sub.span(poly(1), sub.column(sub.full_space(16), 1))
        N2 = sub.from_columns(np.vstack([N.basis, np.zeros((16, 2))]), ScalarField.REAL, blocks=2)
        with pytest.raises(PreconditionError):
            generators.defect_instance(poly(1), [poly(0, 0, 0, 2)], N2, 16)

    def test_non_invariant_stack(self):
        N = sub.span(poly(0, 1))
        with pytest.raises(PreconditionError):
            generators.defect_instance(None, [series.monomial(5, 16)], N, 16)

    def test_block_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            generators.defect_instance(poly(1), [series.monomial(5, 16)], sub.span(poly(1)), 16)

    def test_krylov_subspace_is_invariant(self):
        seeds = [SeriesTuple((poly(1, 2, 3), poly(0, 1))), SeriesTuple((poly(0, 0, 1), poly(4)))]
        N = generators.krylov_stacked_subspace(seeds)
        assert N.blocks == 2
        assert engine.invariance_report(N).defect == 0

    @pytest.mark.parametrize('seed', range(3))
    @pytest.mark.parametrize('n', [1, 2])
    @pytest.mark.parametrize('case', ['i', 'ii'])
    def test_random_instances_pass(self, seed, n, case):
        instance = generators.random_defect_instance(seed, n, 128, case)
        assert instance.params['case'] == case
        assert all(c.passed for c in instance.certificates), [
            c.residuals for c in instance.certificates
        ]
        assert engine.defect(instance.subspace).defect <= n

    def test_order_too_small(self):
        with pytest.raises(DimensionMismatchError):
            generators.random_defect_instance(0, 6, 16)

    def test_krylov_closure_of_long_orbit(self, rng):
        head = poly(*rng.standard_normal(41), order=128)
        tail = poly(*rng.standard_normal(30), order=128)
        seeds = [SeriesTuple((head, tail))]
        N = generators.krylov_stacked_subspace(seeds)
        assert max(engine.invariance_report(N).residual_singular_values) <= 1e-10
        vector = np.concatenate([entry.coeffs for entry in seeds[0].entries])
        residual = vector - N.basis @ (N.basis.T @ vector)
        assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(vector)

    @pytest.mark.parametrize(
        ('seed', 'n', 'case'),
        [(681409218, 1, 'i'), (0, 2, 'ii'), (1, 2, 'i'), (7, 1, 'ii')],
    )
    def test_defect_never_exceeds_n(self, seed, n, case):
        instance = generators.random_defect_instance(seed, n, 128, case)
        assert engine.defect(instance.subspace).defect <= n
        assert all(c.passed for c in instance.certificates)
