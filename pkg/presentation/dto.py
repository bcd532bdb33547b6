from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FieldName = Literal['real', 'complex']
# Комплексное число на проводе: пара [re, im]
ComplexPair = tuple[float, float]
Coefficient = float | ComplexPair

SUITE_NAMES = (
    'lemma1',
    'lemma2',
    'lemma3',
    'beurling',
    'hitt',
    'defect',
    'almost',
    'theta-psi',
)


def _check_coefficients(values: list[Coefficient], field: str) -> None:
    for v in values:
        if field == 'real' and isinstance(v, tuple):
            raise ValueError('вещественное поле: коэффициенты должны быть числами')
        if field == 'complex' and not isinstance(v, tuple):
            raise ValueError('комплексное поле: коэффициенты должны быть парами [re, im]')


# ============ Ряды и подпространства ============


class SeriesDTO(BaseModel):
    field: FieldName
    order: int = Field(..., ge=1)
    coeffs: list[Coefficient]
    spill: float = Field(default=0.0, ge=0)

    @model_validator(mode='after')
    def check_shape(self) -> 'SeriesDTO':
        if len(self.coeffs) != self.order:
            raise ValueError(f'ожидалось {self.order} коэффициентов, получено {len(self.coeffs)}')
        _check_coefficients(self.coeffs, self.field)
        return self


class SubspaceDTO(BaseModel):
    """basis — список столбцов (каждый столбец — коэффициенты одного ряда)."""

    field: FieldName
    order: int = Field(..., ge=1)
    basis: list[list[Coefficient]]
    blocks: int = Field(default=1, ge=1)

    @model_validator(mode='after')
    def check_shape(self) -> 'SubspaceDTO':
        for column in self.basis:
            if len(column) != self.order:
                raise ValueError(f'столбец длины {len(column)} при порядке {self.order}')
            _check_coefficients(column, self.field)
        if self.order % self.blocks:
            raise ValueError(f'порядок {self.order} не делится на {self.blocks} блоков')
        return self


class BlaschkeSpecDTO(BaseModel):
    zeros: list[ComplexPair] = Field(default_factory=list)
    front: ComplexPair = (1.0, 0.0)
    monomial_order: int = Field(default=0, ge=0)

    @field_validator('zeros')
    @classmethod
    def inside_disk(cls, v: list[ComplexPair]) -> list[ComplexPair]:
        for re, im in v:
            if re * re + im * im >= 1:
                raise ValueError(f'нуль [{re}, {im}] вне открытого круга')
        return v


class LaurentSymbolDTO(BaseModel):
    coefficients: dict[int, ComplexPair]


# ============ Сертификаты и экземпляры ============


class CertificateDTO(BaseModel):
    statement: str
    passed: bool = Field(..., alias='pass')
    residuals: dict[str, float] = Field(default_factory=dict)
    tolerances: dict[str, float] = Field(default_factory=dict)
    instance: dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(populate_by_name=True)


class InnerCertificateDTO(BaseModel):
    passed: bool = Field(..., alias='pass')
    max_deviation: float
    tail_bound: float
    grid_size: int

    model_config = ConfigDict(populate_by_name=True)


class InstanceDTO(BaseModel):
    generator: str
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None
    subspace: SubspaceDTO
    certificates: list[CertificateDTO] = Field(default_factory=list)


class DecompositionReportDTO(BaseModel):
    """Ответ команды decompose."""

    kind: Literal['hitt', 'defect']
    case: Literal['i', 'ii']
    defect: int = Field(..., ge=0)
    g: SeriesDTO | None = None
    N: SubspaceDTO
    defect_basis: SubspaceDTO
    residuals: dict[str, float]
    certificate: CertificateDTO


class ReportRecord(BaseModel):
    """Одна строка отчёта verify (JSON-lines)."""

    suite: str
    trial: int = Field(..., ge=0)
    certificate: CertificateDTO


# ============ Конфигурация прогона ============


class RunConfig(BaseModel):
    order: int = Field(default=128, ge=8)
    rank_tol: float = Field(default=1e-8, gt=0, lt=1)
    tol: float = Field(default=1e-6, gt=0, lt=1)
    seed: int = Field(default=0, ge=0)
    suites: list[str] = Field(default_factory=lambda: list(SUITE_NAMES))
    trials: int | None = Field(default=None, ge=1)
    out: Path | None = None
    format: Literal['json', 'csv'] = 'json'
    threads: int = Field(default=4, ge=1)

    @field_validator('suites')
    @classmethod
    def expand_suites(cls, v: list[str]) -> list[str]:
        if not v or 'all' in v:
            return list(SUITE_NAMES)
        unknown = [name for name in v if name not in SUITE_NAMES]
        if unknown:
            raise ValueError(f'неизвестные наборы проверок: {unknown}')
        # порядок и уникальность как в SUITE_NAMES
        return [name for name in SUITE_NAMES if name in v]
