import numpy as np
import pytest

from domain import series
from domain.entities import ScalarField, Subspace, TruncatedSeries
from domain.subspace import projector_distance


def poly(*coeffs: complex, order: int = 16) -> TruncatedSeries:
    """Многочлен с данными коэффициентами в пространстве порядка order."""
    return series.from_coeffs(list(coeffs), order)


def cpoly(*coeffs: complex, order: int = 16) -> TruncatedSeries:
    """То же, но всегда над комплексным полем."""
    return series.as_field(poly(*coeffs, order=order), ScalarField.COMPLEX)


def assert_same_subspace(S1: Subspace, S2: Subspace, tol: float = 1e-10) -> None:
    assert S1.dim == S2.dim
    assert projector_distance(S1, S2) <= tol


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(12345))
