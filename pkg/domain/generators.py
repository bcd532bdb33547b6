"""
Генераторы сертифицированных экземпляров.

Вся случайность идёт из одного seed через именованные подпотоки
(stream), поэтому экземпляр воспроизводится по своему JSON.
"""

import zlib
from collections.abc import Sequence

import numpy as np
import scipy.linalg

from core.errors import (
    DimensionMismatchError,
    FieldError,
    PreconditionError,
    RejectedInstanceError,
    SignError,
)
from core.logger import logger
from core.settings import settings

from . import engine
from . import subspace as sub
from .entities import (
    BlaschkeSpec,
    Certificate,
    Instance,
    LaurentSymbol,
    ScalarField,
    SeriesTuple,
    Subspace,
    TruncatedSeries,
)
from .inner import blaschke_series, is_inner

# Радиус, внутри которого выбираются случайные нули Бляшке
ZERO_RADIUS = 0.7
# Невязка, при которой замыкание орбиты под T* считается завершённым
CLOSURE_TOL = 1e-12


# ========== Случайные потоки ==========


def stream(seed: int, *names: str) -> np.random.Generator:
    """Независимый подпоток Philox для пары (seed, имена)."""
    spawn_key = tuple(zlib.crc32(name.encode()) for name in names)
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(sequence))


def random_blaschke_spec(
    rng: np.random.Generator,
    degree: int,
    real_symmetric: bool = True,
    radius: float = ZERO_RADIUS,
) -> BlaschkeSpec:
    if real_symmetric:
        pairs = int(rng.integers(0, degree // 2 + 1))
        zeros: list[complex] = []
        for _ in range(pairs):
            a = radius * np.sqrt(rng.uniform(0.05, 1.0)) * np.exp(1j * rng.uniform(0.1, np.pi - 0.1))
            zeros += [complex(a), complex(np.conj(a))]
        zeros += [complex(rng.uniform(-radius, radius)) for _ in range(degree - 2 * pairs)]
        return BlaschkeSpec(zeros=tuple(zeros), front=1.0)

    moduli = radius * np.sqrt(rng.uniform(0.05, 1.0, size=degree))
    angles = rng.uniform(0, 2 * np.pi, size=degree)
    front = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return BlaschkeSpec(zeros=tuple(moduli * np.exp(1j * angles)), front=complex(front))


# ========== Модельные пространства ==========


def model_space(
    theta: TruncatedSeries,
    order: int | None = None,
    rank_tol: float | None = None,
) -> Subspace:
    """
    K_θ = H² ⊖ θH² при усечении: левое ядро нижнетреугольной матрицы
    Тёплица L_θ, столбцы которой — trunc(z^j θ).
    """
    order = theta.order if order is None else order
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    if order != theta.order:
        raise DimensionMismatchError(f'θ задана порядком {theta.order}, запрошен {order}')
    certificate = is_inner(theta, tol=settings.GUARD_TOL)
    if not certificate.passed:
        raise PreconditionError(
            f'θ не внутренняя: отклонение {certificate.max_deviation:.3e}, '
            f'хвост {certificate.tail_bound:.3e}'
        )

    L = engine.multiplication_matrix(theta.coeffs, order, order)
    u, singular, _ = scipy.linalg.svd(L)
    basis = sub.fix_signs(u[:, singular <= rank_tol])
    logger.debug(f'[GEN] модельное пространство: N={order}, dim={basis.shape[1]}')
    return Subspace(basis, theta.field)


def beurling_space(
    theta: TruncatedSeries,
    order: int | None = None,
    rank_tol: float | None = None,
) -> Subspace:
    """θH² при усечении — дополнение K_θ."""
    K = model_space(theta, order, rank_tol)
    return sub.complement_in(sub.full_space(K.order, K.field), K)


# ========== Ядра Тёплица ==========


def toeplitz_matrix(symbol: LaurentSymbol, order: int) -> np.ndarray:
    """T[i, j] = c_{i−j}."""
    dtype = np.float64 if symbol.is_real else np.complex128
    column = np.zeros(order, dtype=dtype)
    row = np.zeros(order, dtype=dtype)
    for k, c in symbol.coefficients.items():
        value = c.real if symbol.is_real else c
        if 0 <= k < order:
            column[k] = value
        if -order < k <= 0:
            row[-k] = value
    return scipy.linalg.toeplitz(column, row)


def toeplitz_kernel(
    symbol: LaurentSymbol,
    order: int | None = None,
    rank_tol: float | None = None,
    guard_tol: float | None = None,
) -> Instance:
    """
    Ядро усечённого оператора Тёплица с сертификатом почти инвариантности.

    Направления ядра с заметной массой в верхней четверти коэффициентов —
    артефакт последних строк усечения, они отбрасываются.
    """
    order = settings.ORDER if order is None else order
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    guard_tol = settings.GUARD_TOL if guard_tol is None else guard_tol
    field = ScalarField.REAL if symbol.is_real else ScalarField.COMPLEX
    if not symbol.coefficients:
        raise PreconditionError('символ Тёплица нулевой')

    kernel = scipy.linalg.null_space(toeplitz_matrix(symbol, order), rcond=rank_tol)
    band = max(1, order // 4)
    if kernel.shape[1]:
        _, mass, vh = scipy.linalg.svd(kernel[-band:], full_matrices=True)
        mass = np.concatenate([mass, np.zeros(kernel.shape[1] - mass.size)])
        kernel = kernel @ vh.conj().T[:, mass <= guard_tol]
    K = Subspace(sub.orthonormal_columns(kernel, rank_tol), field)
    logger.debug(f'[GEN] ядро Тёплица: N={order}, dim={K.dim}, символ={symbol.coefficients}')

    certificates = [engine.near_invariance_certificate(K, guard_tol)] if K.dim else []
    return Instance(
        generator='toeplitz',
        params={'symbol': symbol, 'order': order},
        seed=None,
        subspace=K,
        certificates=certificates,
    )


# ========== Почти инвариантные экземпляры ==========


def inner_multiplier_instance(
    g_spec: BlaschkeSpec,
    theta_spec: BlaschkeSpec,
    order: int | None = None,
    rank_tol: float | None = None,
    seed: int | None = None,
) -> Instance:
    """M = g·K_θ для вещественно-симметричной внутренней g с g(0) > 0."""
    order = settings.ORDER if order is None else order
    if not g_spec.real_symmetric:
        raise FieldError('множитель g должен быть вещественно-симметричным')
    g = blaschke_series(g_spec, order)
    if not g.coeffs[0] > 0:
        raise SignError(f'g(0) = {g.coeffs[0]:.3e}, нужно g(0) > 0')

    K = model_space(blaschke_series(theta_spec, order), order, rank_tol)
    G = engine.multiplication_matrix(g.coeffs, order, order)
    M = sub.from_columns(G @ K.basis, K.field, rank_tol)

    certificates = [engine.near_invariance_certificate(M, rank_tol)]
    if M.dim:
        certificates.append(engine.hitt_certificate(engine.hitt_decompose(M, rank_tol)))
    logger.debug(f'[GEN] внутренний множитель: N={order}, dim M={M.dim}')
    return Instance(
        generator='inner_multiplier',
        params={'g': g_spec, 'theta': theta_spec, 'order': order},
        seed=seed,
        subspace=M,
        certificates=certificates,
    )


def random_inner_multiplier_instance(
    seed: int,
    order: int | None = None,
    max_degree: int = 3,
) -> Instance:
    """
    Случайные g (g(0) > 0) и θ; оба вещественно-симметричны.

    θ(0) = 0, поэтому 1 ∈ K_θ и экстремальная функция M совпадает с g.
    При θ(0) ≠ 0 пространство N имеет полюса у единичной окружности
    и плохо переносит усечение.
    """
    rng = stream(seed, 'inner_multiplier')
    g_spec = random_blaschke_spec(rng, int(rng.integers(0, max_degree + 1)))
    if g_spec.degree and np.prod(g_spec.zeros).real < 0:
        g_spec = BlaschkeSpec(zeros=g_spec.zeros, front=-1.0)
    zeros = random_blaschke_spec(rng, int(rng.integers(0, max_degree))).zeros
    theta_spec = BlaschkeSpec(zeros=zeros, monomial_order=1)
    return inner_multiplier_instance(g_spec, theta_spec, order, seed=seed)


def _orthogonalize(vector: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # два прохода Грама–Шмидта
    for _ in range(2):
        vector = vector - basis @ (basis.conj().T @ vector)
    return vector


def krylov_stacked_subspace(
    seeds: Sequence[SeriesTuple],
    closure_tol: float = CLOSURE_TOL,
) -> Subspace:
    """
    Наименьшее T* ⊕ … ⊕ T*-инвариантное подпространство, содержащее наборы.

    Базис строится по Арнольди: T* применяется к последнему ортонормированному
    вектору, пока невязка не упадёт до closure_tol. Инвариантность выполняется
    с точностью порядка closure_tol, независимо от обусловленности орбиты.
    """
    if not seeds:
        raise PreconditionError('нужен хотя бы один набор')
    blocks = len(seeds[0])
    order = seeds[0].order
    field = seeds[0].field
    dtype = np.float64 if field is ScalarField.REAL else np.complex128
    basis = np.zeros((order * blocks, 0), dtype=dtype)
    for t in seeds:
        if len(t) != blocks or t.order != order:
            raise DimensionMismatchError('наборы должны иметь общую длину и порядок')
        if t.field is not field:
            raise FieldError('наборы должны иметь общее поле')
        vector = np.concatenate([entry.coeffs for entry in t.entries]).astype(dtype)
        norm = np.linalg.norm(vector)
        if not norm:
            continue
        vector = _orthogonalize(vector / norm, basis)
        while (norm := np.linalg.norm(vector)) > closure_tol:
            q = vector / norm
            basis = np.column_stack([basis, q])
            vector = _orthogonalize(engine.backshift_rows(q[:, None], blocks)[:, 0], basis)
    logger.debug(f'[GEN] орбита наборов: {blocks} блоков, dim={basis.shape[1]}')
    return Subspace(sub.fix_signs(basis), field, blocks=blocks)


def defect_instance(
    g: TruncatedSeries | None,
    e_list: Sequence[TruncatedSeries],
    N_stacked: Subspace,
    order: int | None = None,
    rank_tol: float | None = None,
    seed: int | None = None,
) -> Instance:
    """
    M = {gh + z Σ h_i e_i : (h, h₁, …, h_n) ∈ N_stacked}.

    При g = None компоненты h нет (случай ii), и N_stacked состоит из n блоков.
    """
    order = N_stacked.block_order if order is None else order
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    tol = settings.GUARD_TOL
    n = len(e_list)
    expected_blocks = n + (1 if g is not None else 0)
    if N_stacked.blocks != expected_blocks or N_stacked.block_order != order:
        raise DimensionMismatchError(
            f'N_stacked: {N_stacked.blocks} блоков порядка {N_stacked.block_order}, '
            f'ожидалось {expected_blocks} порядка {order}'
        )
    if g is not None and g.order != order:
        raise DimensionMismatchError(f'порядок g {g.order} ≠ {order}')

    E = np.column_stack([e.coeffs for e in e_list]) if n else np.zeros((order, 0))
    if n:
        gram_error = float(np.max(np.abs(E.conj().T @ E - np.eye(n))))
        if gram_error > settings.ORTHO_TOL:
            raise PreconditionError(f'e_i не ортонормированы: отклонение {gram_error:.3e}')
    invariance = engine.invariance_report(N_stacked, rank_tol)
    if invariance.defect:
        raise PreconditionError('N_stacked не инвариантно относительно T* ⊕ … ⊕ T*')

    field = N_stacked.field
    if g is not None and g.field is ScalarField.COMPLEX or np.iscomplexobj(E):
        field = ScalarField.COMPLEX
    image = engine.synthesis_matrix(g, E, order) @ N_stacked.basis
    M = sub.from_columns(image[:order], field, rank_tol)
    if M.dim == 0:
        raise RejectedInstanceError('синтезированное подпространство нулевое')

    overlap = float(np.max(np.abs(E.conj().T @ M.basis))) if n else 0.0
    if overlap > tol:
        raise RejectedInstanceError(f'e_i не ортогональны M: {overlap:.3e}')

    report = engine.defect(M, rank_tol)
    certificates = [
        Certificate(
            statement='synthesized subspace has defect at most n',
            passed=report.defect <= n,
            residuals={'defect': float(report.defect), 'overlap': overlap},
            tolerances={'tol': tol, 'rank_tol': rank_tol},
            instance={'n': n},
        )
    ]
    if report.defect:
        decomposition = engine.defect_decompose(M, report, rank_tol)
        certificates.append(engine.defect_certificate(decomposition, n))
    elif g is not None:
        certificates.append(engine.hitt_certificate(engine.hitt_decompose(M, rank_tol)))

    logger.debug(f'[GEN] экземпляр с дефектом: n={n}, dim M={M.dim}, дефект={report.defect}')
    return Instance(
        generator='defect_instance',
        params={'n': n, 'order': order, 'case': 'i' if g is not None else 'ii'},
        seed=seed,
        subspace=M,
        certificates=certificates,
    )


def random_defect_instance(
    seed: int,
    n: int,
    order: int | None = None,
    case: str = 'i',
) -> Instance:
    """
    Случайный экземпляр: g = 1, N — орбита случайных полиномиальных наборов,
    e_i — ортогонально перемешанные мономы за пределами носителей.
    """
    order = settings.ORDER if order is None else order
    if n < 1:
        raise PreconditionError('для экземпляра с дефектом нужно n ≥ 1')
    rng = stream(seed, 'defect_instance', case)
    support = max(2, order // 8)
    blocks = n + (1 if case == 'i' else 0)

    # носитель gh: степени < support; z·h_i·e_i занимает (m_i, m_i + support]
    positions = [support + i * (support + 1) for i in range(n)]
    if positions[-1] + support >= order:
        raise DimensionMismatchError(f'порядок {order} мал для n={n}')

    def random_tuple() -> SeriesTuple:
        entries = []
        for _ in range(blocks):
            coeffs = np.zeros(order)
            degree = int(rng.integers(1, support + 1))
            coeffs[:degree] = rng.standard_normal(degree)
            entries.append(TruncatedSeries(coeffs, ScalarField.REAL))
        return SeriesTuple(tuple(entries))

    seeds = [random_tuple() for _ in range(int(rng.integers(1, 3)))]
    if case == 'i':
        constant = [np.eye(1, order, 0)[0]] + [np.zeros(order)] * n
        seeds.append(SeriesTuple(tuple(TruncatedSeries(c, ScalarField.REAL) for c in constant)))
    N_stacked = krylov_stacked_subspace(seeds)

    monomials = np.zeros((order, n))
    for i, m in enumerate(positions):
        monomials[m, i] = 1.0
    mixing, _ = np.linalg.qr(rng.standard_normal((n, n)))
    E = monomials @ mixing
    e_list = [TruncatedSeries(E[:, i], ScalarField.REAL) for i in range(n)]

    g = TruncatedSeries(np.eye(1, order, 0)[0], ScalarField.REAL) if case == 'i' else None
    instance = defect_instance(g, e_list, N_stacked, order, seed=seed)
    instance.params.update({'seed_tuples': len(seeds), 'support': support})
    return instance


def random_subspace(
    seed: int,
    order: int,
    dim: int,
    field: ScalarField = ScalarField.REAL,
) -> Subspace:
    """Ортонормированные гауссовские столбцы; один seed — один и тот же базис."""
    if dim > order:
        raise DimensionMismatchError(f'размерность {dim} больше порядка {order}')
    rng = stream(seed, 'random_subspace', str(field))
    matrix = rng.standard_normal((order, dim))
    if field is ScalarField.COMPLEX:
        matrix = matrix + 1j * rng.standard_normal((order, dim))
    q, _ = scipy.linalg.qr(matrix, mode='economic')
    return Subspace(sub.fix_signs(q), field)
