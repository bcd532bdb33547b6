"""
Наборы проверок verify.

Каждый набор — функция (config, trial) -> Certificate; испытания независимы
и получают свой подпоток случайности по имени набора и номеру испытания.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from core.errors import HardyLabError
from core.logger import logger
from domain import engine, generators, series
from domain import subspace as sub
from domain.entities import Certificate, LaurentSymbol, ScalarField, Subspace, TruncatedSeries
from domain.inner import blaschke_series, normalize_real_symmetric
from storage.mappers import CertificateMapper

from .dto import ReportRecord, RunConfig

# Символы Тёплица с нетривиальным ядром (z оставлен для контроля маскировки края)
TOEPLITZ_SYMBOLS: tuple[dict[int, complex], ...] = (
    {-1: 1},
    {-2: 1, 0: -0.25},
    {-2: 1, 1: 0.3},
    {-3: 1, 0: 0.2},
    {-1: 1, 1: 0.5},
    {-2: 1, 0: 0.25j},
)

LEMMA1_TOL = 1e-12
LEMMA3_TOL = 1e-8
# lemma1 и lemma3 работают на фиксированном порядке независимо от --order
LEMMA_ORDER = 64


@dataclass(frozen=True)
class Suite:
    name: str
    default_trials: int
    run: Callable[[RunConfig, int], Certificate]


def trial_seed(config: RunConfig, suite: str, trial: int) -> int:
    return int(generators.stream(config.seed, suite, str(trial)).integers(0, 2**31 - 1))


def combine(statement: str, certificates: list[Certificate], **instance) -> Certificate:
    """Один сертификат из нескольких: проходит, если прошли все."""
    residuals: dict[str, float] = {}
    tolerances: dict[str, float] = {}
    for c in certificates:
        residuals.update(c.residuals)
        tolerances.update(c.tolerances)
    return Certificate(
        statement=statement,
        passed=all(c.passed for c in certificates),
        residuals=residuals,
        tolerances=tolerances,
        instance=instance,
    )


# ========== Сопряжение и симметризация ==========


def lemma1(config: RunConfig, trial: int) -> Certificate:
    rng = generators.stream(config.seed, 'lemma1', str(trial))
    n = LEMMA_ORDER
    f = TruncatedSeries(rng.standard_normal(n) + 1j * rng.standard_normal(n), ScalarField.COMPLEX)
    h = TruncatedSeries(rng.standard_normal(n) + 1j * rng.standard_normal(n), ScalarField.COMPLEX)
    lhs = series.inner_product(f, h)
    rhs = series.inner_product(series.hat(h), series.hat(f))
    error = abs(lhs - rhs) / (series.norm(f) * series.norm(h))
    return Certificate(
        statement='<f, h> = <hat h, hat f>',
        passed=error <= LEMMA1_TOL,
        residuals={'relative_error': error},
        tolerances={'tol': LEMMA1_TOL},
        instance={'order': n},
    )


def lemma2(config: RunConfig, trial: int) -> Certificate:
    rng = generators.stream(config.seed, 'lemma2', str(trial))
    symmetric = trial % 2 == 0
    spec = generators.random_blaschke_spec(rng, int(rng.integers(1, 5)), real_symmetric=symmetric)
    K = generators.model_space(blaschke_series(spec, config.order), rank_tol=config.rank_tol)
    K_conj = generators.model_space(
        blaschke_series(spec.conjugate(), config.order), rank_tol=config.rank_tol
    )
    distance = sub.projector_distance(sub.hat_subspace(K), K_conj)
    return Certificate(
        statement='hat of the model space of theta is the model space of hat theta',
        passed=distance <= config.tol,
        residuals={'projector_distance': distance},
        tolerances={'tol': config.tol},
        instance={'degree': spec.degree, 'real_symmetric': symmetric, 'dim': K.dim},
    )


def lemma3(config: RunConfig, trial: int) -> Certificate:
    """Чётные испытания — случайные 𝒩, нечётные — замкнутые относительно сопряжения."""
    rng = generators.stream(config.seed, 'lemma3', str(trial))
    dim = int(rng.integers(1, 9))
    seed = trial_seed(config, 'lemma3', trial)
    hat_closed = trial % 2 == 1
    if hat_closed:
        N = sub.complexify(generators.random_subspace(seed, LEMMA_ORDER, dim))
    else:
        N = generators.random_subspace(seed, LEMMA_ORDER, dim, ScalarField.COMPLEX)

    real_complement = sub.complement_in(
        sub.full_space(LEMMA_ORDER), sub.symmetrize_subspace(N, config.rank_tol)
    )
    complement_image = sub.symmetrize_subspace(
        sub.complement_in(sub.full_space(LEMMA_ORDER, ScalarField.COMPLEX), N),
        config.rank_tol,
    )
    containment = sub.containment_residual(real_complement, complement_image)
    residuals = {'containment_residual': containment}
    passed = containment <= LEMMA3_TOL
    if hat_closed:
        equality = sub.projector_distance(real_complement, complement_image)
        residuals['equality_distance'] = equality
        passed = passed and equality <= LEMMA3_TOL
    return Certificate(
        statement='real complement of phi(N) lies in phi of the complement of N',
        passed=passed,
        residuals=residuals,
        tolerances={'tol': LEMMA3_TOL},
        instance={'dim': dim, 'hat_closed': hat_closed},
    )


# ========== Бёрлинг и Хитт ==========


def beurling(config: RunConfig, trial: int) -> Certificate:
    rng = generators.stream(config.seed, 'beurling', str(trial))
    spec = generators.random_blaschke_spec(rng, int(rng.integers(1, 4)))
    theta = blaschke_series(spec, config.order)
    M = generators.beurling_space(theta, rank_tol=config.rank_tol)
    factor = engine.beurling_extract(M, tol=config.tol)
    expected = normalize_real_symmetric(theta).series
    error = float(np.linalg.norm(factor.theta.coeffs - expected.coeffs))
    return Certificate(
        statement='shift invariant subspace is theta H2 for an inner theta',
        passed=error <= config.tol and factor.projector_error <= config.tol and factor.inner.passed,
        residuals={
            'coefficient_error': error,
            'projector_error': factor.projector_error,
            'inner_deviation': factor.inner.max_deviation,
            'inner_tail': factor.inner.tail_bound,
        },
        tolerances={'tol': config.tol},
        instance={'theta': spec, 'inner': factor.inner, 'order': config.order},
    )


def hitt(config: RunConfig, trial: int) -> Certificate:
    """Первые испытания — ядра Тёплица, остальные — случайные g·K_θ."""
    if trial < len(TOEPLITZ_SYMBOLS):
        symbol = LaurentSymbol(TOEPLITZ_SYMBOLS[trial])
        instance = generators.toeplitz_kernel(symbol, config.order, config.rank_tol, config.tol)
        dim = instance.subspace.dim
        if not dim:
            return Certificate(
                statement='toeplitz kernel is nearly invariant',
                passed=False,
                residuals={'dim': 0.0},
                instance={'kind': 'toeplitz', 'symbol': str(symbol.coefficients)},
            )
        return combine(
            'toeplitz kernel is nearly invariant',
            instance.certificates,
            kind='toeplitz',
            dim=dim,
        )

    seed = trial_seed(config, 'hitt', trial)
    instance = generators.random_inner_multiplier_instance(seed, config.order)
    return combine(
        'nearly invariant subspace decomposes as M = gN',
        instance.certificates,
        kind='inner_multiplier',
        seed=seed,
        params=instance.params,
    )


def defect(config: RunConfig, trial: int) -> Certificate:
    seed = trial_seed(config, 'defect', trial)
    n = 1 + trial % 2
    case = 'ii' if trial % 3 == 2 else 'i'
    instance = generators.random_defect_instance(seed, n, config.order, case)
    return combine(
        'defect-n subspace has the representation gh + z sum h_i e_i',
        instance.certificates,
        seed=seed,
        n=n,
        case=case,
    )


# Фиксированные примеры для проверки почти инвариантности
def _almost_examples(order: int) -> list[Subspace]:
    def poly(*coeffs: float) -> TruncatedSeries:
        return series.from_coeffs(list(coeffs), order)

    return [
        sub.span(poly(1), poly(0, 1)),
        sub.span(poly(0, 1)),
        sub.span(poly(1, 1)),
        sub.span(poly(0, 1, 1)),
        sub.span(poly(2, -1), poly(0, 0, 1)),
    ]


def almost(config: RunConfig, trial: int) -> Certificate:
    examples = _almost_examples(config.order)
    if trial < len(examples):
        M = examples[trial]
        kind = 'example'
    else:
        seed = trial_seed(config, 'almost', trial)
        if trial % 2:
            M = generators.random_defect_instance(seed, 1 + (trial // 2) % 2, config.order).subspace
            kind = 'defect_instance'
        else:
            M = generators.random_inner_multiplier_instance(seed, config.order).subspace
            kind = 'inner_multiplier'
    certificate = engine.check_almost_characterization(M, config.rank_tol)
    certificate.instance['kind'] = kind
    return certificate


def theta_psi(config: RunConfig, trial: int) -> Certificate:
    """Сверка θ = ψ и проверка M = gN для комплексификации M (M̂ = M)."""
    seed = trial_seed(config, 'theta-psi', trial)
    instance = generators.random_inner_multiplier_instance(seed, config.order)
    M = instance.subspace
    return combine(
        'inner factors agree and the complexified decomposition is hat symmetric',
        [
            engine.theta_psi_crosscheck(M, config.rank_tol, config.tol),
            engine.check_hat_symmetric_hitt(sub.complexify(M), config.rank_tol, config.tol),
        ],
        seed=seed,
        dim=M.dim,
    )


SUITES: dict[str, Suite] = {
    s.name: s
    for s in (
        Suite('lemma1', 1000, lemma1),
        Suite('lemma2', 40, lemma2),
        Suite('lemma3', 100, lemma3),
        Suite('beurling', 20, beurling),
        Suite('hitt', 30 + len(TOEPLITZ_SYMBOLS), hitt),
        Suite('defect', 30, defect),
        Suite('almost', 25, almost),
        Suite('theta-psi', 10, theta_psi),
    )
}


# ========== Прогон ==========


def run_trial(config: RunConfig, suite: str, trial: int) -> ReportRecord:
    try:
        certificate = SUITES[suite].run(config, trial)
    except (HardyLabError, np.linalg.LinAlgError) as e:
        logger.warning(f'[REPORT] {suite}#{trial}: {type(e).__name__}: {e}')
        certificate = Certificate(
            statement=f'{suite} trial raised',
            passed=False,
            instance={'error': type(e).__name__, 'message': str(e)},
        )
    if not certificate.passed:
        logger.warning(f'[REPORT] {suite}#{trial} не прошёл: {certificate.residuals}')
    return ReportRecord(
        suite=suite,
        trial=trial,
        certificate=CertificateMapper.to_dto(certificate),
    )


def run_suites(config: RunConfig) -> list[ReportRecord]:
    tasks = [
        (name, trial)
        for name in config.suites
        for trial in range(config.trials or SUITES[name].default_trials)
    ]
    logger.info(f'[REPORT] {len(tasks)} испытаний в {config.threads} потоках')
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(lambda task: run_trial(config, *task), tasks))
