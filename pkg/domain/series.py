"""
Арифметика усечённых рядов Харди.

Все операции чистые: вход не меняется, результат — новый TruncatedSeries.
Операции, отбрасывающие коэффициенты, учитывают отброшенную ℓ²-массу в spill.
"""

from collections.abc import Sequence

import numpy as np

from core.errors import DimensionMismatchError, DomainError, FieldError
from core.logger import logger

from .entities import ScalarField, SeriesTuple, TruncatedSeries


def _spill(*parts: float) -> float:
    return float(np.hypot.reduce([0.0, *parts]))


def _result_field(*items: TruncatedSeries) -> ScalarField:
    if any(item.field is ScalarField.COMPLEX for item in items):
        return ScalarField.COMPLEX
    return ScalarField.REAL


# ========== Конструкторы ==========


def from_coeffs(coeffs: Sequence[complex] | np.ndarray, order: int | None = None) -> TruncatedSeries:
    """Ряд по списку коэффициентов; поле определяется по наличию мнимых частей."""
    arr = np.asarray(coeffs)
    if order is not None:
        if arr.size > order:
            raise DimensionMismatchError(f'{arr.size} коэффициентов не помещаются в порядок {order}')
        arr = np.concatenate([arr, np.zeros(order - arr.size, dtype=arr.dtype)])
    field = ScalarField.COMPLEX if np.iscomplexobj(arr) and np.any(arr.imag) else ScalarField.REAL
    return TruncatedSeries(arr if field is ScalarField.COMPLEX else np.real(arr), field)


def zeros(order: int, field: ScalarField = ScalarField.REAL) -> TruncatedSeries:
    return TruncatedSeries(np.zeros(order), field)


def monomial(k: int, order: int, field: ScalarField = ScalarField.REAL) -> TruncatedSeries:
    """z^k; при k ≥ N результат нулевой, а масса уходит в spill."""
    coeffs = np.zeros(order)
    if k < order:
        coeffs[k] = 1.0
        return TruncatedSeries(coeffs, field)
    return TruncatedSeries(coeffs, field, spill=1.0)


def as_field(f: TruncatedSeries, field: ScalarField) -> TruncatedSeries:
    """Явное вложение вещественного ряда в комплексное поле."""
    if f.field is field:
        return f
    if field is ScalarField.REAL:
        raise FieldError('комплексный ряд нельзя неявно сделать вещественным, используйте symmetrize')
    return TruncatedSeries(f.coeffs, field, f.spill)


# ========== Скалярное произведение и нормы ==========


def _check_pair(f: TruncatedSeries, h: TruncatedSeries) -> None:
    if f.order != h.order:
        raise DimensionMismatchError(f'порядки не совпадают: {f.order} и {h.order}')
    if f.field != h.field:
        raise DimensionMismatchError(f'поля не совпадают: {f.field} и {h.field}')


def inner_product(f: TruncatedSeries, h: TruncatedSeries) -> complex | float:
    """⟨f, h⟩ = Σ a_n · conj(b_n)."""
    _check_pair(f, h)
    value = np.vdot(h.coeffs, f.coeffs)
    if f.field is ScalarField.REAL:
        return float(np.real(value))
    return complex(value)


def norm(f: TruncatedSeries) -> float:
    return float(np.linalg.norm(f.coeffs))


def add(f: TruncatedSeries, h: TruncatedSeries) -> TruncatedSeries:
    if f.order != h.order:
        raise DimensionMismatchError(f'порядки не совпадают: {f.order} и {h.order}')
    return TruncatedSeries(f.coeffs + h.coeffs, _result_field(f, h), _spill(f.spill, h.spill))


def scale(f: TruncatedSeries, c: complex) -> TruncatedSeries:
    if isinstance(c, complex) and c.imag != 0:
        return TruncatedSeries(c * f.coeffs, ScalarField.COMPLEX, abs(c) * f.spill)
    c = float(np.real(c))
    return TruncatedSeries(c * f.coeffs, f.field, abs(c) * f.spill)


# ========== Инволюция и симметризация ==========


def hat(f: TruncatedSeries) -> TruncatedSeries:
    """F̂(z) = conj(F(conj z)): покоэффициентное сопряжение."""
    if f.field is ScalarField.REAL:
        return f
    return TruncatedSeries(np.conj(f.coeffs), f.field, f.spill)


def symmetrize(f: TruncatedSeries) -> TruncatedSeries:
    """φ(f) = (f + f̂)/2 — вещественная часть коэффициентов."""
    return TruncatedSeries(np.real(f.coeffs), ScalarField.REAL, f.spill)


def real_imag_split(f: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """f = f₁ + i f₂, f₁ = φ(f), f₂ = (f − φ(f))/i."""
    return (
        TruncatedSeries(np.real(f.coeffs), ScalarField.REAL, f.spill),
        TruncatedSeries(np.imag(f.coeffs), ScalarField.REAL),
    )


# ========== Сдвиги ==========


def shift(f: TruncatedSeries) -> TruncatedSeries:
    """(T_z f)(z) = z f(z); старший коэффициент уходит в spill."""
    coeffs = np.concatenate([[0], f.coeffs[:-1]])
    return TruncatedSeries(coeffs, f.field, _spill(f.spill, abs(f.coeffs[-1])))


def backshift(f: TruncatedSeries) -> TruncatedSeries:
    """(T*_z f)(z) = (f(z) − f(0))/z."""
    coeffs = np.concatenate([f.coeffs[1:], [0]])
    return TruncatedSeries(coeffs, f.field, f.spill)


# ========== Произведение и значения ==========


def multiply(f: TruncatedSeries, h: TruncatedSeries, out_order: int) -> TruncatedSeries:
    """Усечённое произведение Коши; хвост точного произведения учитывается в spill."""
    full = np.convolve(f.coeffs, h.coeffs)
    kept = full[:out_order]
    if kept.size < out_order:
        kept = np.concatenate([kept, np.zeros(out_order - kept.size, dtype=full.dtype)])
    tail = float(np.linalg.norm(full[out_order:]))
    product = TruncatedSeries(kept, _result_field(f, h), _spill(tail, f.spill, h.spill))
    if tail > 0:
        logger.debug(f'[SERIES] произведение усечено до {out_order}, spill={tail:.3e}')
    return product


def evaluate(f: TruncatedSeries, w: complex) -> complex:
    """Значение многочлена в точке |w| < 1 по схеме Горнера."""
    if not abs(w) < 1:
        raise DomainError(f'точка {w} вне открытого единичного круга')
    value = 0j
    for c in f.coeffs[::-1]:
        value = value * w + c
    return complex(value)


# ========== m-наборы ==========


def stack(t: SeriesTuple) -> np.ndarray:
    """Склеенный вектор коэффициентов (f_1, …, f_m)."""
    return np.concatenate([entry.coeffs for entry in t.entries])


def unstack(vector: np.ndarray, blocks: int, field: ScalarField) -> SeriesTuple:
    vector = np.asarray(vector)
    if vector.size % blocks:
        raise DimensionMismatchError(f'длина {vector.size} не делится на {blocks}')
    n = vector.size // blocks
    return SeriesTuple(
        tuple(TruncatedSeries(vector[b * n : (b + 1) * n], field) for b in range(blocks))
    )


def stacked_backshift(t: SeriesTuple) -> SeriesTuple:
    """T* ⊕ … ⊕ T* на m-наборе."""
    return SeriesTuple(tuple(backshift(entry) for entry in t.entries))
