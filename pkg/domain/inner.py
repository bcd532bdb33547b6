"""Внутренние функции: конечные произведения Бляшке и их сертификация."""

from math import comb

import numpy as np
from scipy.signal import lfilter

from core.errors import DegenerateInputError, DomainError, PreconditionError
from core.logger import logger
from core.settings import settings

from . import series
from .entities import (
    BlaschkeSpec,
    InnerCertificate,
    Normalization,
    ScalarField,
    TruncatedSeries,
)


def blaschke_series(spec: BlaschkeSpec, order: int) -> TruncatedSeries:
    """
    Коэффициенты front · z^k · Π_j (a_j − z)/(1 − conj(a_j) z).

    Каждый множитель добавляется делением степенного ряда на (1 − conj(a) z),
    которое и есть рекурсия y_n = x_n + conj(a) y_{n−1} (lfilter).
    Ряд считается до порядка 2N; коэффициенты за N дают spill,
    т.е. оценку хвоста по геометрическому убыванию.
    """
    for a in spec.zeros:
        if not abs(a) < 1:
            raise DomainError(f'нуль {a} вне открытого круга')

    extended = 2 * order
    coeffs = np.zeros(extended, dtype=np.complex128)
    if spec.monomial_order < extended:
        coeffs[spec.monomial_order] = spec.front

    for a in spec.zeros:
        numerator = a * coeffs - np.concatenate([[0], coeffs[:-1]])
        coeffs = lfilter([1.0], [1.0, -np.conj(a)], numerator)

    kept = coeffs[:order]
    tail = 1.0 if spec.monomial_order >= extended else float(np.linalg.norm(coeffs[order:]))

    if spec.real_symmetric:
        return TruncatedSeries(np.real(kept), ScalarField.REAL, tail)
    return TruncatedSeries(kept, ScalarField.COMPLEX, tail)


def geometric_tail_bound(spec: BlaschkeSpec, order: int) -> float:
    """
    Оценка ℓ²-нормы коэффициентов с номерами ≥ order по нулям спецификации.

    У множителя Бляшке |c_0| ≤ 1 и |c_m| ≤ r^{m−1}, r = max|a_j|; у
    произведения d множителей |c_k| ≤ C(k+d−1, d−1)·r^{k−d}. Хвост
    суммируется как геометрический ряд, пока отношение соседних членов < 1.
    """
    shift = order - spec.monomial_order
    d = len(spec.zeros)
    if shift <= 0:
        return 1.0
    if d == 0:
        return 0.0
    r = max(abs(a) for a in spec.zeros)
    if r == 0:
        return 0.0 if shift > d else 1.0
    ratio = r * (shift + d) / (shift + 1)
    if ratio >= 1:
        return float('inf')
    first = comb(shift + d - 1, d - 1) * r ** (shift - d)
    return float(min(1.0, first / (1 - ratio)))


def is_inner(
    f: TruncatedSeries,
    grid_size: int | None = None,
    tol: float | None = None,
    spec: BlaschkeSpec | None = None,
) -> InnerCertificate:
    """
    Сертификат внутренности: max | |f(e^{it})| − 1 | по равномерной сетке
    плюс оценка массы хвоста за порядком усечения. Без spec хвост берётся
    из spill ряда, со spec — из геометрической оценки по нулям.
    """
    grid_size = settings.GRID_SIZE if grid_size is None else grid_size
    tol = settings.TOL if tol is None else tol
    if grid_size < 64:
        raise PreconditionError(f'сетка {grid_size} меньше 64 точек')

    t = 2 * np.pi * np.arange(grid_size) / grid_size
    values = np.polynomial.polynomial.polyval(np.exp(1j * t), f.coeffs)
    deviation = float(np.max(np.abs(np.abs(values) - 1)))

    tail_bound = f.spill if spec is None else geometric_tail_bound(spec, f.order)

    passed = deviation <= tol and tail_bound <= tol
    logger.debug(
        f'[INNER] проверка внутренности: отклонение={deviation:.3e}, хвост={tail_bound:.3e}, '
        f'результат={passed}'
    )
    return InnerCertificate(
        passed=passed,
        max_deviation=deviation,
        tail_bound=tail_bound,
        grid_size=grid_size,
    )


def is_hat_symmetric(f: TruncatedSeries, tol: float | None = None) -> bool:
    """f̂ = f с относительной точностью tol."""
    tol = settings.TOL if tol is None else tol
    if f.field is ScalarField.REAL:
        return True
    return bool(np.linalg.norm(f.coeffs - np.conj(f.coeffs)) <= tol * series.norm(f))


def normalize_real_symmetric(f: TruncatedSeries, tol: float | None = None) -> Normalization:
    """
    Нормировка первым ненулевым коэффициентом: a_k = e^{iα}|a_k|, λ = e^{−iα},
    f₁ = λf. Коэффициенты ниже tol·‖f‖ считаются нулевыми.
    """
    tol = settings.TOL if tol is None else tol
    size = series.norm(f)
    if size == 0:
        raise DegenerateInputError('нельзя нормировать нулевой ряд')

    k = int(np.argmax(np.abs(f.coeffs) > tol * size))
    leading = f.coeffs[k]

    if f.field is ScalarField.REAL:
        lam = 1.0 if leading > 0 else -1.0
        return Normalization(lam=complex(lam), series=series.scale(f, lam), real_symmetric=True)

    lam = complex(np.conj(leading) / abs(leading))
    f1 = TruncatedSeries(lam * f.coeffs, ScalarField.COMPLEX, f.spill)
    if is_hat_symmetric(f1, tol):
        return Normalization(lam=lam, series=series.symmetrize(f1), real_symmetric=True)
    return Normalization(lam=lam, series=f1, real_symmetric=False)
