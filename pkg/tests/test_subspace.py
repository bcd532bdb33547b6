"""Алгебра подпространств: проекции, пересечения, дополнения, сопряжение."""

import numpy as np
import pytest
from conftest import assert_same_subspace, cpoly, poly

from core.errors import (
    ContainmentError,
    DimensionMismatchError,
    FieldError,
    InvariantViolationError,
)
from domain import series
from domain import subspace as sub
from domain.entities import ScalarField, Subspace
from domain.generators import random_subspace


class TestSubspaceEntity:
    def test_basis_must_be_orthonormal(self):
        with pytest.raises(InvariantViolationError):
            Subspace(np.array([[1.0, 1.0], [0.0, 1.0]]), ScalarField.REAL)

    def test_dim_cannot_exceed_order(self):
        with pytest.raises(DimensionMismatchError):
            Subspace(np.zeros((2, 3)), ScalarField.REAL)

    def test_blocks_must_divide_order(self):
        with pytest.raises(DimensionMismatchError):
            Subspace(np.eye(5)[:, :1], ScalarField.REAL, blocks=2)


class TestOrthonormalize:
    def test_dependent_vectors(self):
        S = sub.span(poly(1, 1), poly(2, 2))
        assert S.dim == 1
        np.testing.assert_allclose(S.basis[:2, 0], [2**-0.5, 2**-0.5])

    def test_monomials(self):
        S = sub.span(poly(1), poly(0, 1), poly(0, 0, 1))
        assert S.dim == 3
        np.testing.assert_allclose(S.basis.T @ S.basis, np.eye(3), atol=1e-14)
        assert_same_subspace(S, Subspace(np.eye(16)[:, :3], ScalarField.REAL))

    def test_more_vectors_than_order(self, rng):
        vectors = [series.from_coeffs(rng.standard_normal(32)) for _ in range(50)]
        assert sub.orthonormalize(vectors).dim == 32

    def test_empty_needs_order(self):
        with pytest.raises(DimensionMismatchError):
            sub.orthonormalize([])
        assert sub.orthonormalize([], order=8).dim == 0

    def test_mixed_fields_are_rejected(self):
        with pytest.raises(FieldError):
            sub.span(poly(1), cpoly(0, 1j))

    def test_mixed_orders_are_rejected(self):
        with pytest.raises(DimensionMismatchError):
            sub.span(poly(1, order=8), poly(1, order=16))

    def test_signs_are_fixed(self):
        S = sub.span(poly(-3, 1))
        assert S.basis[0, 0] > 0


class TestProjection:
    def test_project_onto_constants(self):
        f = sub.project(sub.span(poly(1)), poly(3, 4))
        np.testing.assert_allclose(f.coeffs[:2], [3, 0])

    def test_pythagoras(self, rng):
        S = random_subspace(7, 32, 5)
        f = series.from_coeffs(rng.standard_normal(32))
        p = sub.project(S, f)
        r = series.add(f, series.scale(p, -1.0))
        assert series.norm(p) ** 2 + series.norm(r) ** 2 == pytest.approx(series.norm(f) ** 2)

    def test_real_series_on_complex_subspace(self):
        with pytest.raises(FieldError):
            sub.project(sub.span(cpoly(1)), poly(1))

    def test_contains(self):
        S = sub.span(poly(1), poly(0, 1))
        assert sub.contains(S, poly(2, -3))
        assert not sub.contains(sub.span(poly(0, 1)), poly(1))
        assert sub.contains(S, series.zeros(16))
        assert sub.contains(sub.complexify(S), poly(2, -3))


class TestIntersections:
    def test_intersect_zH(self):
        S = sub.intersect_zH(sub.span(poly(1), poly(0, 1)))
        assert_same_subspace(S, sub.span(poly(0, 1)))

    def test_intersect_zH_of_subspace_inside_zH(self):
        M = sub.span(poly(0, 1), poly(0, 0, 1))
        assert_same_subspace(sub.intersect_zH(M), M)

    def test_intersect_zH_trivial(self):
        assert sub.intersect_zH(sub.span(poly(1, 1))).dim == 0

    def test_vanishing_at_top_coefficient(self):
        S = sub.span(poly(1, order=4), poly(0, 0, 0, 1, order=4))
        assert_same_subspace(sub.vanishing_at(S, 3), sub.span(poly(1, order=4)))

    def test_vanishing_at_mixed_row(self):
        S = sub.span(poly(1, 0, 0, 1, order=4), poly(0, 1, order=4))
        assert_same_subspace(sub.vanishing_at(S, 3), sub.span(poly(0, 1, order=4)))


class TestComplement:
    def test_simple(self):
        S = sub.span(poly(1), poly(0, 1))
        assert_same_subspace(sub.complement_in(S, sub.span(poly(0, 1))), sub.span(poly(1)))

    def test_edge_cases(self):
        S = sub.span(poly(1), poly(0, 1))
        assert sub.complement_in(S, S).dim == 0
        assert sub.complement_in(S, sub.zero_subspace(16)) is S

    def test_not_contained(self):
        with pytest.raises(ContainmentError):
            sub.complement_in(sub.span(poly(1)), sub.span(poly(0, 1)))

    def test_complex_inside_real(self):
        with pytest.raises(FieldError):
            sub.complement_in(sub.full_space(16), sub.span(cpoly(1j)))

    def test_orthogonal_and_complementary(self):
        S = random_subspace(3, 24, 10)
        T = sub.from_columns(S.basis[:, :4] + 0.5 * S.basis[:, 4:8], ScalarField.REAL)
        C = sub.complement_in(S, T)
        assert C.dim == 6
        np.testing.assert_allclose(C.basis.T @ T.basis, 0, atol=1e-12)
        assert_same_subspace(sub.direct_sum(C, T), S)


class TestProjectorDistance:
    def test_basis_order_does_not_matter(self):
        A = sub.span(poly(1), poly(0, 1))
        B = sub.span(poly(0, 1), poly(1, 1))
        assert sub.projector_distance(A, B) <= 1e-12

    def test_orthogonal_lines(self):
        assert sub.projector_distance(sub.span(poly(1)), sub.span(poly(0, 1))) == pytest.approx(1)

    def test_small_rotation(self):
        eps = 1e-3
        d = sub.projector_distance(sub.span(poly(1)), sub.span(poly(1, eps)))
        assert d == pytest.approx(eps / np.sqrt(1 + eps**2), abs=1e-12)

    def test_zero_subspaces(self):
        assert sub.projector_distance(sub.zero_subspace(8), sub.zero_subspace(8)) == 0.0
        assert sub.projector_distance(sub.zero_subspace(8), sub.full_space(8)) == 1.0

    def test_order_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            sub.projector_distance(sub.full_space(4), sub.full_space(8))

    def test_embed(self):
        S = sub.embed(sub.span(poly(1, 1, order=4)), 16)
        assert S.order == 16
        assert_same_subspace(S, sub.span(poly(1, 1)))


class TestConjugation:
    def test_hat_of_real_subspace(self):
        S = sub.span(poly(1, 2))
        assert sub.hat_subspace(S) is S

    def test_hat_of_rotated_real_line(self):
        S = sub.span(cpoly(0, 1 + 1j))
        assert sub.projector_distance(sub.hat_subspace(S), S) <= 1e-14

    def test_hat_of_genuinely_complex_line(self):
        S = sub.span(cpoly(1, 1j))
        assert sub.projector_distance(sub.hat_subspace(S), S) == pytest.approx(1)

    def test_complexify_round_trip(self):
        S = random_subspace(11, 32, 4)
        back = sub.symmetrize_subspace(sub.complexify(S))
        assert back.field is ScalarField.REAL
        assert_same_subspace(back, S)

    def test_complexify_rejects_complex(self):
        with pytest.raises(FieldError):
            sub.complexify(sub.span(cpoly(1)))

    def test_complexify_zero(self):
        Z = sub.complexify(sub.zero_subspace(8))
        assert Z.field is ScalarField.COMPLEX
        assert Z.dim == 0

    def test_symmetrize_rotated_line(self):
        S = sub.symmetrize_subspace(sub.span(cpoly(1 + 1j, 1 + 1j)))
        assert_same_subspace(S, sub.span(poly(1, 1)))

    def test_symmetrize_doubles_genuinely_complex_line(self):
        S = sub.symmetrize_subspace(sub.span(cpoly(1, 1j)))
        assert_same_subspace(S, sub.span(poly(1), poly(0, 1)))

    def test_symmetrize_mixed_basis(self):
        S = sub.symmetrize_subspace(sub.span(cpoly(1), cpoly(0, 1j)))
        assert_same_subspace(S, sub.span(poly(1), poly(0, 1)))
