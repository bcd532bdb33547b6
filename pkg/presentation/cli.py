"""
Командная строка лаборатории: verify, decompose, gen, schema.

Коды выхода: 0 — все сертификаты прошли, 1 — хотя бы один провален,
2 — ошибка использования, разбора входа или ввода-вывода.
"""

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from core.logger import logger
from core.settings import settings
from domain import engine, generators
from domain.entities import BlaschkeSpec, Instance, LaurentSymbol, ScalarField, Subspace
from domain.inner import blaschke_series, is_inner
from storage.mappers import CertificateMapper, InstanceMapper, SeriesMapper, SubspaceMapper
from storage.reports import ReportSink, read_json, write_json

from . import dto
from .suites import run_suites

GENERATORS = ('model_space', 'toeplitz', 'inner_multiplier', 'defect_instance', 'random')

SYMBOL_PRESETS: dict[str, dict[int, complex]] = {
    'zbar': {-1: 1},
    'z': {1: 1},
    'zbar2': {-2: 1},
    'zbar2-quarter': {-2: 1, 0: -0.25},
}

SCHEMA_MODELS = (
    dto.SeriesDTO,
    dto.SubspaceDTO,
    dto.BlaschkeSpecDTO,
    dto.LaurentSymbolDTO,
    dto.CertificateDTO,
    dto.InnerCertificateDTO,
    dto.InstanceDTO,
    dto.DecompositionReportDTO,
    dto.ReportRecord,
    dto.RunConfig,
)


# ========== Разбор параметров ==========


def parse_blaschke(text: str) -> BlaschkeSpec:
    """'z2' → z²; '0.5,0.3+0.4j,0.3-0.4j' → нули; '1' → θ = 1; можно смешивать."""
    monomial = 0
    zeros: list[complex] = []
    for token in (t.strip() for t in text.split(',')):
        if not token or token == '1':
            continue
        if token.startswith('z'):
            monomial += int(token[1:] or 1)
        else:
            zeros.append(complex(token.replace(' ', '')))
    return BlaschkeSpec(zeros=tuple(zeros), monomial_order=monomial)


def parse_symbol(text: str) -> LaurentSymbol:
    """Пресет ('zbar', 'z', …) или список 'k=c' через запятую: '-2=1,0=-0.25'."""
    if text in SYMBOL_PRESETS:
        return LaurentSymbol(SYMBOL_PRESETS[text])
    coefficients: dict[int, complex] = {}
    for token in (t.strip() for t in text.split(',') if t.strip()):
        k, _, c = token.partition('=')
        if not c:
            raise ValueError(f'ожидалось k=c, получено {token!r}')
        coefficients[int(k)] = complex(c.replace(' ', ''))
    return LaurentSymbol(coefficients)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--order', type=int, default=settings.ORDER, help='порядок усечения N')
    parser.add_argument('--seed', type=int, default=settings.SEED)
    parser.add_argument('--tol', type=float, default=settings.GUARD_TOL, help='допуск сертификатов')
    parser.add_argument('--rank-tol', type=float, default=settings.RANK_TOL)
    parser.add_argument('--out', type=Path, default=None, help='файл вывода (по умолчанию stdout)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='hardy-lab',
        description='Почти инвариантные подпространства обратного сдвига: проверки и разложения.',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    verify = subparsers.add_parser('verify', help='прогнать наборы проверок')
    _add_common(verify)
    verify.add_argument(
        '--suite',
        action='append',
        choices=[*dto.SUITE_NAMES, 'all'],
        help='набор проверок (можно повторять)',
    )
    verify.add_argument('--trials', type=int, default=None, help='число испытаний в каждом наборе')
    verify.add_argument('--threads', type=int, default=settings.THREADS)
    verify.add_argument('--format', choices=['json', 'csv'], default='json')
    verify.set_defaults(func=cmd_verify)

    decompose = subparsers.add_parser('decompose', help='разложить подпространство из JSON')
    _add_common(decompose)
    decompose.add_argument('input', type=Path, help="JSON подпространства или экземпляра ('-' — stdin)")
    decompose.set_defaults(func=cmd_decompose)

    gen = subparsers.add_parser('gen', help='сгенерировать экземпляр')
    _add_common(gen)
    gen.add_argument('--generator', required=True, choices=GENERATORS)
    gen.add_argument('--theta', default=None, help="θ: 'z2' или нули через запятую")
    gen.add_argument('--g', default=None, help='нули множителя g через запятую')
    gen.add_argument('--symbol', default='zbar', help="символ Тёплица: пресет или '-2=1,0=-0.25'")
    gen.add_argument('--n', type=int, default=1, help='дефект экземпляра')
    gen.add_argument('--case', choices=['i', 'ii'], default='i')
    gen.add_argument('--dim', type=int, default=3, help='размерность случайного подпространства')
    gen.set_defaults(func=cmd_gen)

    schema = subparsers.add_parser('schema', help='JSON-схемы форматов')
    schema.add_argument('--out', type=Path, default=None)
    schema.set_defaults(func=cmd_schema)
    return parser


# ========== Команды ==========


def cmd_verify(args: argparse.Namespace) -> int:
    config = dto.RunConfig(
        order=args.order,
        rank_tol=args.rank_tol,
        tol=args.tol,
        seed=args.seed,
        suites=args.suite or ['all'],
        trials=args.trials,
        out=args.out,
        format=args.format,
        threads=args.threads,
    )
    logger.info(f'[CLI] verify: наборы {config.suites}, N={config.order}, seed={config.seed}')
    records = run_suites(config)
    with ReportSink(config.out, config.format) as sink:
        sink.extend(records)
    for name in config.suites:
        total = sum(r.suite == name for r in records)
        failed = sum(r.suite == name and not r.certificate.passed for r in records)
        logger.info(f'[CLI] {name}: {total - failed}/{total} прошли')
    return 0 if sink.failed == 0 else 1


def _load_subspace(path: Path) -> Subspace:
    """Подпространство или экземпляр gen; '-' читает stdin."""
    document = read_json(dto.InstanceDTO | dto.SubspaceDTO, path)
    if isinstance(document, dto.InstanceDTO):
        document = document.subspace
    return SubspaceMapper.to_domain(document)


def cmd_decompose(args: argparse.Namespace) -> int:
    M = _load_subspace(args.input)
    if M.dim == 0:
        logger.error('[CLI] нулевое подпространство нельзя разложить')
        return 2
    if M.blocks != 1:
        logger.error('[CLI] ожидалось подпространство H², а не склеенное')
        return 2

    report = engine.defect(M, args.rank_tol)
    if report.defect == 0:
        decomposition = engine.hitt_decompose(M, args.rank_tol, args.seed)
        certificate = engine.hitt_certificate(decomposition, args.tol)
        result = dto.DecompositionReportDTO(
            kind='hitt',
            case='i',
            defect=0,
            g=SeriesMapper.to_dto(decomposition.g),
            N=SubspaceMapper.to_dto(decomposition.N),
            defect_basis=SubspaceMapper.to_dto(report.defect_basis),
            residuals=certificate.residuals,
            certificate=CertificateMapper.to_dto(certificate),
        )
    else:
        decomposition = engine.defect_decompose(M, report, args.rank_tol, args.seed)
        certificate = engine.defect_certificate(decomposition, report.defect, args.tol)
        result = dto.DecompositionReportDTO(
            kind='defect',
            case=decomposition.case,
            defect=report.defect,
            g=None if decomposition.g is None else SeriesMapper.to_dto(decomposition.g),
            N=SubspaceMapper.to_dto(decomposition.N),
            defect_basis=SubspaceMapper.to_dto(decomposition.defect_basis),
            residuals=certificate.residuals,
            certificate=CertificateMapper.to_dto(certificate),
        )
    logger.info(f'[CLI] decompose: {result.kind}, случай {result.case}, дефект {result.defect}')
    write_json(result, args.out)
    return 0 if certificate.passed else 1


def _generate(args: argparse.Namespace) -> Instance:
    if args.generator == 'model_space':
        spec = parse_blaschke(args.theta or 'z2')
        theta = blaschke_series(spec, args.order)
        K = generators.model_space(theta, rank_tol=args.rank_tol)
        certificates = [engine.near_invariance_certificate(K, args.rank_tol)] if K.dim else []
        return Instance(
            generator='model_space',
            params={'theta': spec, 'inner': is_inner(theta, tol=args.tol, spec=spec), 'order': args.order},
            seed=None,
            subspace=K,
            certificates=certificates,
        )
    if args.generator == 'toeplitz':
        return generators.toeplitz_kernel(parse_symbol(args.symbol), args.order, args.rank_tol, args.tol)
    if args.generator == 'inner_multiplier':
        if args.g is None and args.theta is None:
            return generators.random_inner_multiplier_instance(args.seed, args.order)
        g_spec = parse_blaschke(args.g or '1')
        if g_spec.degree and blaschke_series(g_spec, args.order).coeffs[0] < 0:
            g_spec = BlaschkeSpec(zeros=g_spec.zeros, front=-1.0, monomial_order=g_spec.monomial_order)
        return generators.inner_multiplier_instance(
            g_spec, parse_blaschke(args.theta or 'z2'), args.order, args.rank_tol
        )
    if args.generator == 'defect_instance':
        return generators.random_defect_instance(args.seed, args.n, args.order, args.case)

    S = generators.random_subspace(args.seed, args.order, args.dim)
    return Instance(
        generator='random',
        params={'order': args.order, 'dim': args.dim, 'field': ScalarField.REAL.value},
        seed=args.seed,
        subspace=S,
        certificates=[engine.near_invariance_certificate(S, args.rank_tol)] if S.dim else [],
    )


def cmd_gen(args: argparse.Namespace) -> int:
    instance = _generate(args)
    logger.info(
        f'[CLI] gen: {instance.generator}, dim={instance.subspace.dim}, '
        f'сертификатов {len(instance.certificates)}'
    )
    write_json(InstanceMapper.to_dto(instance), args.out)
    if instance.generator == 'random':
        return 0
    return 0 if all(c.passed for c in instance.certificates) else 1


def cmd_schema(args: argparse.Namespace) -> int:
    schemas = {model.__name__: model.model_json_schema(by_alias=True) for model in SCHEMA_MODELS}
    text = json.dumps(schemas, indent=2, ensure_ascii=False)
    if args.out is None:
        sys.stdout.write(text + '\n')
    else:
        args.out.write_text(text + '\n', encoding='utf-8')
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        logger.error(f'[CLI] некорректные параметры или вход: {e}')
        return 2
    except OSError as e:
        logger.error(f'[CLI] ошибка ввода-вывода: {e}')
        return 2
    except ValueError as e:
        logger.error(f'[CLI] {type(e).__name__}: {e}')
        return 2
