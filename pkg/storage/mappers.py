import numpy as np

import domain.entities as domain
import presentation.dto as dto


def _encode(values: np.ndarray, field: domain.ScalarField) -> list:
    if field is domain.ScalarField.REAL:
        return [float(v) for v in values]
    return [(float(v.real), float(v.imag)) for v in values]


def _decode(values: list, field: str) -> np.ndarray:
    if field == domain.ScalarField.REAL:
        return np.asarray(values, dtype=np.float64)
    return np.asarray([complex(re, im) for re, im in values], dtype=np.complex128)


def _pair(value: complex) -> tuple[float, float]:
    return (float(value.real), float(value.imag))


def _params(values: dict) -> dict:
    """Сущности внутри params и instance переводятся в их JSON-представление."""
    converted = {}
    for key, value in values.items():
        if isinstance(value, domain.BlaschkeSpec):
            value = BlaschkeSpecMapper.to_dto(value).model_dump(mode='json')
        elif isinstance(value, domain.LaurentSymbol):
            value = LaurentSymbolMapper.to_dto(value).model_dump(mode='json')
        elif isinstance(value, domain.InnerCertificate):
            value = InnerCertificateMapper.to_dto(value).model_dump(mode='json', by_alias=True)
        elif isinstance(value, dict):
            value = _params(value)
        converted[key] = value
    return converted


class SeriesMapper:
    @staticmethod
    def to_domain(model: dto.SeriesDTO) -> domain.TruncatedSeries:
        return domain.TruncatedSeries(
            coeffs=_decode(model.coeffs, model.field),
            field=domain.ScalarField(model.field),
            spill=model.spill,
        )

    @staticmethod
    def to_dto(entity: domain.TruncatedSeries) -> dto.SeriesDTO:
        return dto.SeriesDTO(
            field=entity.field.value,
            order=entity.order,
            coeffs=_encode(entity.coeffs, entity.field),
            spill=entity.spill,
        )


class SubspaceMapper:
    @staticmethod
    def to_domain(model: dto.SubspaceDTO) -> domain.Subspace:
        """Ортонормированность базиса проверяется заново при создании Subspace."""
        if model.basis:
            basis = np.column_stack([_decode(col, model.field) for col in model.basis])
        else:
            basis = np.zeros((model.order, 0))
        return domain.Subspace(
            basis=basis,
            field=domain.ScalarField(model.field),
            blocks=model.blocks,
        )

    @staticmethod
    def to_dto(entity: domain.Subspace) -> dto.SubspaceDTO:
        return dto.SubspaceDTO(
            field=entity.field.value,
            order=entity.order,
            basis=[_encode(entity.basis[:, j], entity.field) for j in range(entity.dim)],
            blocks=entity.blocks,
        )


class BlaschkeSpecMapper:
    @staticmethod
    def to_domain(model: dto.BlaschkeSpecDTO) -> domain.BlaschkeSpec:
        return domain.BlaschkeSpec(
            zeros=tuple(complex(re, im) for re, im in model.zeros),
            front=complex(*model.front),
            monomial_order=model.monomial_order,
        )

    @staticmethod
    def to_dto(entity: domain.BlaschkeSpec) -> dto.BlaschkeSpecDTO:
        return dto.BlaschkeSpecDTO(
            zeros=[_pair(a) for a in entity.zeros],
            front=_pair(entity.front),
            monomial_order=entity.monomial_order,
        )


class LaurentSymbolMapper:
    @staticmethod
    def to_domain(model: dto.LaurentSymbolDTO) -> domain.LaurentSymbol:
        return domain.LaurentSymbol(
            coefficients={k: complex(re, im) for k, (re, im) in model.coefficients.items()}
        )

    @staticmethod
    def to_dto(entity: domain.LaurentSymbol) -> dto.LaurentSymbolDTO:
        return dto.LaurentSymbolDTO(
            coefficients={k: _pair(c) for k, c in entity.coefficients.items()}
        )


class CertificateMapper:
    @staticmethod
    def to_domain(model: dto.CertificateDTO) -> domain.Certificate:
        return domain.Certificate(
            statement=model.statement,
            passed=model.passed,
            residuals=dict(model.residuals),
            tolerances=dict(model.tolerances),
            instance=dict(model.instance),
        )

    @staticmethod
    def to_dto(entity: domain.Certificate) -> dto.CertificateDTO:
        return dto.CertificateDTO(
            statement=entity.statement,
            passed=bool(entity.passed),
            residuals={k: float(v) for k, v in entity.residuals.items()},
            tolerances={k: float(v) for k, v in entity.tolerances.items()},
            instance=_params(entity.instance),
        )


class InnerCertificateMapper:
    @staticmethod
    def to_dto(entity: domain.InnerCertificate) -> dto.InnerCertificateDTO:
        return dto.InnerCertificateDTO(
            passed=bool(entity.passed),
            max_deviation=entity.max_deviation,
            tail_bound=entity.tail_bound,
            grid_size=entity.grid_size,
        )


class InstanceMapper:
    @staticmethod
    def to_domain(model: dto.InstanceDTO) -> domain.Instance:
        return domain.Instance(
            generator=model.generator,
            params=dict(model.params),
            seed=model.seed,
            subspace=SubspaceMapper.to_domain(model.subspace),
            certificates=[CertificateMapper.to_domain(c) for c in model.certificates],
        )

    @staticmethod
    def to_dto(entity: domain.Instance) -> dto.InstanceDTO:
        return dto.InstanceDTO(
            generator=entity.generator,
            params=_params(entity.params),
            seed=entity.seed,
            subspace=SubspaceMapper.to_dto(entity.subspace),
            certificates=[CertificateMapper.to_dto(c) for c in entity.certificates],
        )
