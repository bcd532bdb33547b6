from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np

from core.errors import (
    DimensionMismatchError,
    DomainError,
    FieldError,
    InvariantViolationError,
)
from core.settings import settings

# Допуск для проверок вида |front| = 1 и сопряжённой замкнутости нулей
_SPEC_TOL = 1e-12


class ScalarField(StrEnum):
    REAL = 'real'
    COMPLEX = 'complex'


def _frozen_array(values: Any, field_: ScalarField, ndim: int) -> np.ndarray:
    arr = np.array(values)
    if arr.ndim != ndim:
        raise DimensionMismatchError(f'ожидался массив размерности {ndim}, получено {arr.ndim}')
    if field_ is ScalarField.REAL:
        if np.iscomplexobj(arr):
            if np.any(arr.imag != 0):
                raise FieldError('вещественное поле: мнимые части должны быть нулевыми')
            arr = arr.real
        arr = arr.astype(np.float64)
    else:
        arr = arr.astype(np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Функция из H² своими первыми N коэффициентами Тейлора."""

    coeffs: np.ndarray
    field: ScalarField
    spill: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'field', ScalarField(self.field))
        arr = _frozen_array(self.coeffs, self.field, ndim=1)
        if arr.size == 0:
            raise DimensionMismatchError('порядок ряда должен быть положительным')
        if not self.spill >= 0:
            raise InvariantViolationError(f'spill должен быть неотрицательным: {self.spill}')
        object.__setattr__(self, 'coeffs', arr)
        object.__setattr__(self, 'spill', float(self.spill))

    @property
    def order(self) -> int:
        return int(self.coeffs.size)

    def __repr__(self) -> str:
        head = ', '.join(f'{c:.4g}' for c in self.coeffs[:4])
        return f'TruncatedSeries({self.field}, N={self.order}, [{head}, ...], spill={self.spill:.2e})'


@dataclass(frozen=True, eq=False)
class SeriesTuple:
    """m-набор рядов одного порядка и поля (элемент H²(𝔻, ℂ^m))."""

    entries: tuple[TruncatedSeries, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise DimensionMismatchError('пустой набор рядов')
        first = entries[0]
        for entry in entries[1:]:
            if entry.order != first.order or entry.field != first.field:
                raise DimensionMismatchError('ряды набора должны иметь общий порядок и поле')
        object.__setattr__(self, 'entries', entries)

    @property
    def order(self) -> int:
        return self.entries[0].order

    @property
    def field(self) -> ScalarField:
        return self.entries[0].field

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> TruncatedSeries:
        return self.entries[i]


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Конечномерное подпространство усечённого пространства.

    basis — матрица N×d с ортонормированными столбцами (столбец = ряд).
    blocks > 1 означает «склеенное» пространство m-наборов: строки идут
    блоками по N = order / blocks коэффициентов.
    """

    basis: np.ndarray
    field: ScalarField
    ortho_tol: float = field(default_factory=lambda: settings.ORTHO_TOL)
    blocks: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'field', ScalarField(self.field))
        arr = _frozen_array(self.basis, self.field, ndim=2)
        rows, cols = arr.shape
        if cols > rows:
            raise DimensionMismatchError(f'размерность {cols} больше порядка {rows}')
        if self.blocks < 1 or rows % self.blocks:
            raise DimensionMismatchError(f'порядок {rows} не делится на {self.blocks} блоков')
        if cols:
            gram = arr.conj().T @ arr
            err = np.max(np.abs(gram - np.eye(cols)))
            if err > self.ortho_tol:
                raise InvariantViolationError(f'базис не ортонормирован: отклонение {err:.3e}')
        object.__setattr__(self, 'basis', arr)

    @property
    def order(self) -> int:
        return int(self.basis.shape[0])

    @property
    def block_order(self) -> int:
        return self.order // self.blocks

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def __repr__(self) -> str:
        return f'Subspace({self.field}, N={self.order}, dim={self.dim}, blocks={self.blocks})'


def _canonical_key(a: complex) -> tuple[float, float]:
    return (abs(a), float(np.angle(a)))


@dataclass(frozen=True)
class BlaschkeSpec:
    """Конечное произведение Бляшке: front · z^k · Π (a_j − z)/(1 − conj(a_j) z)."""

    zeros: tuple[complex, ...] = ()
    front: complex = 1.0
    monomial_order: int = 0

    def __post_init__(self):
        zeros = tuple(complex(a) for a in self.zeros)
        for a in zeros:
            if not abs(a) < 1:
                raise DomainError(f'нуль {a} вне открытого круга')
        front = complex(self.front)
        if abs(abs(front) - 1) > _SPEC_TOL:
            raise DomainError(f'константа {front} не унимодулярна')
        if self.monomial_order < 0:
            raise DomainError('порядок мономиального множителя отрицателен')
        object.__setattr__(self, 'zeros', tuple(sorted(zeros, key=_canonical_key)))
        object.__setattr__(self, 'front', front)

    @property
    def degree(self) -> int:
        return len(self.zeros) + self.monomial_order

    @property
    def real_symmetric(self) -> bool:
        if abs(self.front.imag) > _SPEC_TOL:
            return False
        pool = list(self.zeros)
        for a in self.zeros:
            match = next(
                (i for i, b in enumerate(pool) if abs(b - a.conjugate()) <= _SPEC_TOL),
                None,
            )
            if match is None:
                return False
            pool.pop(match)
        return True

    def conjugate(self) -> BlaschkeSpec:
        """Спецификация функции θ̂."""
        return BlaschkeSpec(
            zeros=tuple(a.conjugate() for a in self.zeros),
            front=self.front.conjugate(),
            monomial_order=self.monomial_order,
        )


@dataclass(frozen=True)
class LaurentSymbol:
    """Символ Тёплица: коэффициенты c_k, k ∈ [−K, K]."""

    coefficients: dict[int, complex]

    def __post_init__(self):
        object.__setattr__(
            self,
            'coefficients',
            {int(k): complex(c) for k, c in sorted(self.coefficients.items()) if c != 0},
        )

    @property
    def K(self) -> int:
        return max((abs(k) for k in self.coefficients), default=0)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.coefficients.values())


@dataclass
class Certificate:
    """Результат проверки утверждения с зафиксированными невязками."""

    statement: str
    passed: bool
    residuals: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    instance: dict[str, Any] = field(default_factory=dict)


@dataclass
class InnerCertificate:
    passed: bool
    max_deviation: float
    tail_bound: float
    grid_size: int


@dataclass(frozen=True, eq=False)
class Normalization:
    lam: complex
    series: TruncatedSeries
    real_symmetric: bool


@dataclass(eq=False)
class BeurlingFactor:
    theta: TruncatedSeries
    lam: complex
    projector_error: float
    inner: InnerCertificate


@dataclass(eq=False)
class DefectReport:
    defect: int
    defect_basis: Subspace
    residual_singular_values: tuple[float, ...]
    tol_used: float


@dataclass(eq=False)
class HittDecomposition:
    """M = gN: g — экстремальная функция, N — T*-инвариантное подпространство."""

    g: TruncatedSeries
    N: Subspace
    rep_error: float
    isometry_error: float
    invariance_error: float
    invariance_defect: int
    spill: float = 0.0


@dataclass(eq=False)
class DefectDecomposition:
    """f = gh + z Σ h_i e_i, (h, h_1, …, h_n) ∈ N (в случае ii без g и h)."""

    case: str
    g: TruncatedSeries | None
    defect_basis: Subspace
    N: Subspace
    rep_error: float
    norm_identity_error: float
    invariance_error: float
    invariance_defect: int
    remainder: float = 0.0
    spill: float = 0.0

    def components(self, j: int) -> SeriesTuple:
        """j-й базисный вектор N как набор (h, h_1, …, h_n)."""
        column = self.N.basis[:, j]
        n = self.N.block_order
        return SeriesTuple(
            tuple(
                TruncatedSeries(column[b * n : (b + 1) * n], self.N.field)
                for b in range(self.N.blocks)
            )
        )


@dataclass(eq=False)
class Instance:
    """Сгенерированный экземпляр вместе с сертификатами."""

    generator: str
    params: dict[str, Any]
    seed: int | None
    subspace: Subspace
    certificates: list[Certificate] = field(default_factory=list)
