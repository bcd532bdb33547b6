"""
Теоремы о почти инвариантных подпространствах как исполняемые процедуры.

Проверки не бросают исключений при провале: результат — сертификат
или разложение с записанными невязками. Исключения только для
нарушенных предусловий.
"""

import numpy as np
import scipy.linalg

from core.errors import (
    ContainmentError,
    DefectFreeError,
    DegenerateInputError,
    DimensionMismatchError,
    InvariantViolationError,
    NotCyclicError,
    NotNearlyInvariantError,
    PreconditionError,
    VanishingBranchError,
)
from core.logger import logger
from core.settings import settings

from . import series
from . import subspace as sub
from .entities import (
    BeurlingFactor,
    Certificate,
    DefectDecomposition,
    DefectReport,
    HittDecomposition,
    ScalarField,
    SeriesTuple,
    Subspace,
    TruncatedSeries,
)
from .inner import is_inner, normalize_real_symmetric

# Число случайных единичных комбинаций в проверках изометрии
RANDOM_SAMPLES = 100


# ========== Матричные примитивы ==========


def multiplication_matrix(coeffs: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Нижнетреугольная матрица Тёплица умножения на ряд: M[i, j] = c_{i−j}."""
    coeffs = np.asarray(coeffs)
    column = np.zeros(rows, dtype=coeffs.dtype)
    m = min(rows, coeffs.size)
    column[:m] = coeffs[:m]
    row = np.zeros(cols, dtype=coeffs.dtype)
    row[0] = column[0]
    return scipy.linalg.toeplitz(column, row)


def backshift_rows(columns: np.ndarray, blocks: int = 1) -> np.ndarray:
    """T* к каждому столбцу; при blocks > 1 — поблочно (T* ⊕ … ⊕ T*)."""
    rows, cols = columns.shape
    parts = columns.reshape(blocks, rows // blocks, cols)
    moved = np.zeros_like(parts)
    moved[:, :-1, :] = parts[:, 1:, :]
    return moved.reshape(rows, cols)


def shift_rows(columns: np.ndarray) -> np.ndarray:
    moved = np.zeros_like(columns)
    moved[1:] = columns[:-1]
    return moved


def _residual_report(S: Subspace, moved: np.ndarray, rank_tol: float) -> DefectReport:
    """Ранг (I − P_S)·moved и ортонормированный базис его образа."""
    residual = moved - S.basis @ (S.basis.conj().T @ moved)
    if residual.shape[1] == 0:
        singular = np.zeros(0)
        basis = np.zeros((S.order, 0), dtype=S.basis.dtype)
    else:
        u, singular, _ = scipy.linalg.svd(residual, full_matrices=False)
        rank = int(np.sum(singular > rank_tol))
        basis = sub.fix_signs(u[:, :rank])
    return DefectReport(
        defect=basis.shape[1],
        defect_basis=Subspace(basis, S.field, blocks=S.blocks),
        residual_singular_values=tuple(float(s) for s in singular),
        tol_used=rank_tol,
    )


def _kernel(matrix: np.ndarray, field: ScalarField, rank_tol: float) -> Subspace:
    """Ядро матрицы через SVD с порогом rank_tol · max(1, σ_max)."""
    _, singular, vh = scipy.linalg.svd(matrix, full_matrices=True)
    top = singular[0] if singular.size else 0.0
    rank = int(np.sum(singular > rank_tol * max(1.0, top)))
    return Subspace(sub.fix_signs(vh[rank:].conj().T), field)


def _sample_vectors(S: Subspace, seed: int) -> np.ndarray:
    """Базисные столбцы S и RANDOM_SAMPLES случайных единичных комбинаций."""
    rng = np.random.Generator(np.random.Philox(seed))
    coords = rng.standard_normal((S.dim, RANDOM_SAMPLES))
    if S.field is ScalarField.COMPLEX:
        coords = coords + 1j * rng.standard_normal((S.dim, RANDOM_SAMPLES))
    coords /= np.linalg.norm(coords, axis=0)
    return np.hstack([S.basis, S.basis @ coords])


def _require_nonzero(M: Subspace) -> None:
    if M.dim == 0:
        raise DegenerateInputError('операция не определена для нулевого подпространства')


# ========== Дефект и почти инвариантность ==========


def defect(M: Subspace, rank_tol: float | None = None) -> DefectReport:
    """Канонический ℱ = range((I − P_M) T* W), W = M ∩ zH²."""
    _require_nonzero(M)
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    W = sub.intersect_zH(M)
    report = _residual_report(M, backshift_rows(W.basis), rank_tol)
    logger.debug(f'[ENGINE] дефект: dim M={M.dim}, dim W={W.dim}, n={report.defect}')
    return report


def almost_defect(M: Subspace, rank_tol: float | None = None) -> DefectReport:
    """То же, что defect, но T* применяется ко всему M."""
    _require_nonzero(M)
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    report = _residual_report(M, backshift_rows(M.basis), rank_tol)
    logger.debug(f'[ENGINE] почти-дефект: dim M={M.dim}, n={report.defect}')
    return report


def is_nearly_invariant(M: Subspace, tol: float | None = None) -> bool:
    return defect(M, rank_tol=tol).defect == 0


def invariance_report(S: Subspace, rank_tol: float | None = None) -> DefectReport:
    """(I − P_S)·T*S; для склеенных пространств T* действует поблочно."""
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    return _residual_report(S, backshift_rows(S.basis, S.blocks), rank_tol)


def extract_g(M: Subspace) -> TruncatedSeries:
    """Единичный вектор M ⊖ (M ∩ zH²) с g(0) > 0."""
    _require_nonzero(M)
    W = sub.intersect_zH(M)
    if W.dim == M.dim:
        raise VanishingBranchError('все функции M обращаются в нуль в 0: ветка ii')
    complement = sub.complement_in(M, W)
    if complement.dim != 1:
        raise InvariantViolationError(
            f'дополнение M ⊖ (M ∩ zH²) имеет размерность {complement.dim}, ожидалась 1'
        )
    g = complement.basis[:, 0]
    g = g * (np.conj(g[0]) / abs(g[0]))
    return TruncatedSeries(g, M.field)


# ========== Разложение Хитта M = gN ==========


def hitt_decompose(
    M: Subspace,
    rank_tol: float | None = None,
    seed: int | None = None,
) -> HittDecomposition:
    """
    N = ker((I − P_M)G) ⊖ ker(G), где G — умножение на g порядка 2N × N.

    Нижняя половина строк G ловит элементы, у которых gh выходит за усечение:
    такие h в N не попадают.
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    seed = settings.SEED if seed is None else seed
    _require_nonzero(M)
    report = defect(M, rank_tol)
    if report.defect:
        raise NotNearlyInvariantError(f'M имеет дефект {report.defect}, нужен defect_decompose')

    g = extract_g(M)
    order = M.order
    G = multiplication_matrix(g.coeffs, 2 * order, order)
    guarded = np.vstack([M.basis, np.zeros((order, M.dim), dtype=M.basis.dtype)])
    R = G - guarded @ (guarded.conj().T @ G)

    N = sub.complement_in(_kernel(R, M.field, rank_tol), _kernel(G, M.field, rank_tol))

    image = G @ N.basis
    synthesized = sub.from_columns(image[:order], M.field, rank_tol)
    rep_error = sub.projector_distance(synthesized, M)
    spill = float(np.max(np.linalg.norm(image[order:], axis=0))) if N.dim else 0.0

    samples = _sample_vectors(N, seed)
    isometry_error = float(np.max(np.abs(np.linalg.norm(G @ samples, axis=0) - 1)))

    invariance = invariance_report(N, rank_tol)
    invariance_error = max(invariance.residual_singular_values, default=0.0)

    logger.debug(
        f'[ENGINE] Хитт: dim N={N.dim}, rep={rep_error:.2e}, '
        f'изометрия={isometry_error:.2e}, инвариантность={invariance_error:.2e}'
    )
    return HittDecomposition(
        g=g,
        N=N,
        rep_error=rep_error,
        isometry_error=isometry_error,
        invariance_error=invariance_error,
        invariance_defect=invariance.defect,
        spill=spill,
    )


# ========== Разложение с дефектом ==========


def _peel(
    M: Subspace,
    g: np.ndarray | None,
    E: np.ndarray,
    F: np.ndarray,
    steps: int,
) -> tuple[np.ndarray | None, np.ndarray, float, float]:
    """
    Рекурсия f = c·g + z(f₁ + Σ β_i e_i), f₁ ∈ M, по всем столбцам F сразу.

    Возвращает коэффициенты h (steps × d), коэффициенты h_i (n × steps × d),
    норму остатка после steps шагов и невязку включения T*(M ∩ zH²) ⊂ M ⊕ ℱ.
    """
    d = F.shape[1]
    dtype = M.basis.dtype
    H = np.zeros((steps, d), dtype=dtype) if g is not None else None
    Hi = np.zeros((E.shape[1], steps, d), dtype=dtype)
    leak = 0.0
    for k in range(steps):
        if not np.any(np.abs(F) > 1e-300):
            break
        if g is not None:
            c = F[0] / g[0]
            H[k] = c
            X = F - np.outer(g, c)
        else:
            X = F
        U = backshift_rows(X)
        beta = E.conj().T @ U
        Hi[:, k, :] = beta
        F = M.basis @ (M.basis.conj().T @ U)
        leak = max(leak, float(np.linalg.norm(U - F - E @ beta)))
    return H, Hi, float(np.linalg.norm(F)), leak


def synthesis_matrix(g: TruncatedSeries | None, E: np.ndarray, order: int) -> np.ndarray:
    """A = [G | Z₁ | … | Z_n], Z_i — умножение на z·e_i; 2N строк."""
    blocks = []
    if g is not None:
        blocks.append(multiplication_matrix(g.coeffs, 2 * order, order))
    for i in range(E.shape[1]):
        ze = np.concatenate([[0], E[:, i]])
        blocks.append(multiplication_matrix(ze, 2 * order, order))
    return np.hstack(blocks)


def defect_decompose(
    M: Subspace,
    report: DefectReport | None = None,
    rank_tol: float | None = None,
    seed: int | None = None,
) -> DefectDecomposition:
    """
    f = gh + z Σ h_i e_i с (h, h₁, …, h_n) ∈ N ⊂ H²(ℂ^{n+1}).

    Каноническое представление строится рекурсией отщепления, N — образ
    базиса M; в случае ii (M ⊂ zH²) компонента h отсутствует.
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    seed = settings.SEED if seed is None else seed
    _require_nonzero(M)
    report = defect(M, rank_tol) if report is None else report
    if report.defect == 0:
        raise DefectFreeError('дефект равен нулю: используйте hitt_decompose')

    order = M.order
    vanishing = sub.intersect_zH(M).dim == M.dim
    case = 'ii' if vanishing else 'i'
    g = None if vanishing else extract_g(M)
    E = report.defect_basis.basis

    H, Hi, remainder, leak = _peel(M, None if g is None else g.coeffs, E, M.basis, order)
    parts = ([H] if H is not None else []) + list(Hi)
    blocks = len(parts)
    N = sub.from_columns(np.vstack(parts), M.field, rank_tol, blocks=blocks)

    A = synthesis_matrix(g, E, order)
    image = A @ N.basis
    rep_error = sub.projector_distance(sub.from_columns(image[:order], M.field, rank_tol), M)
    spill = float(np.max(np.linalg.norm(image[order:], axis=0))) if N.dim else 0.0

    samples = _sample_vectors(N, seed)
    norm_identity_error = float(
        np.max(np.abs(np.linalg.norm(A @ samples, axis=0) ** 2 - np.linalg.norm(samples, axis=0) ** 2))
    )

    invariance = invariance_report(N, rank_tol)
    invariance_error = max(invariance.residual_singular_values, default=0.0)

    logger.debug(
        f'[ENGINE] разложение с дефектом: случай {case}, n={report.defect}, '
        f'rep={rep_error:.2e}, норма={norm_identity_error:.2e}, остаток={remainder:.2e}, '
        f'утечка={leak:.2e}'
    )
    return DefectDecomposition(
        case=case,
        g=g,
        defect_basis=report.defect_basis,
        N=N,
        rep_error=rep_error,
        norm_identity_error=norm_identity_error,
        invariance_error=invariance_error,
        invariance_defect=invariance.defect,
        remainder=remainder,
        spill=spill,
    )


def recover_representation(
    M: Subspace,
    f: TruncatedSeries,
    report: DefectReport | None = None,
) -> SeriesTuple:
    """Канонический набор (h, h₁, …, h_n) для f ∈ M (в случае ii — (h₁, …, h_n))."""
    _require_nonzero(M)
    if f.order != M.order:
        raise DimensionMismatchError(f'порядки не совпадают: {f.order} и {M.order}')
    if not sub.contains(M, f, settings.GUARD_TOL):
        raise ContainmentError('f не лежит в M')
    report = defect(M) if report is None else report

    vanishing = sub.intersect_zH(M).dim == M.dim
    g = None if vanishing else extract_g(M)
    column = np.asarray(f.coeffs, dtype=M.basis.dtype)[:, None]
    H, Hi, _, _ = _peel(M, None if g is None else g.coeffs, report.defect_basis.basis, column, M.order)
    parts = ([H[:, 0]] if H is not None else []) + [block[:, 0] for block in Hi]
    if not parts:
        raise DegenerateInputError('в случае ii с нулевым дефектом представление пусто')
    return SeriesTuple(tuple(TruncatedSeries(p, M.field) for p in parts))


def synthesize(
    components: SeriesTuple,
    g: TruncatedSeries | None,
    defect_basis: Subspace,
) -> TruncatedSeries:
    """Обратное отображение: (h, h₁, …, h_n) ↦ gh + z Σ h_i e_i."""
    order = components.order
    parts = list(components.entries)
    total = series.zeros(order, components.field)
    if g is not None:
        total = series.multiply(g, parts.pop(0), order)
    if len(parts) != defect_basis.dim:
        raise DimensionMismatchError(
            f'{len(parts)} компонент h_i при дефекте {defect_basis.dim}'
        )
    for i, h_i in enumerate(parts):
        term = series.shift(series.multiply(h_i, sub.column(defect_basis, i), order))
        total = series.add(total, term)
    return total


# ========== Почти инвариантность: характеризация ==========


def check_almost_characterization(
    M: Subspace,
    rank_tol: float | None = None,
) -> Certificate:
    """
    almost_defect = defect ⟺ (случай ii или T*g ∈ M ⊕ ℱ).

    Обе стороны вычисляются независимо; сертификат проходит, когда они совпадают.
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    report = defect(M, rank_tol)
    almost = almost_defect(M, rank_tol)
    vanishing = sub.intersect_zH(M).dim == M.dim

    backshift_g_residual = 0.0
    if vanishing:
        rhs = True
    else:
        g = extract_g(M)
        target = sub.direct_sum(M, report.defect_basis, rank_tol)
        moved = series.backshift(g)
        backshift_g_residual = float(
            np.linalg.norm(moved.coeffs - sub.project(target, moved).coeffs)
        )
        rhs = backshift_g_residual <= rank_tol
    lhs = almost.defect == report.defect

    passed = lhs == rhs
    if not passed:
        logger.warning(
            f'[ENGINE] характеризация почти инвариантности не сошлась: '
            f'almost={almost.defect}, defect={report.defect}, T*g={backshift_g_residual:.2e}'
        )
    return Certificate(
        statement='almost invariant with defect n iff nearly invariant with defect n '
        'and backshift(g) in M + F',
        passed=passed,
        residuals={
            'defect': float(report.defect),
            'almost_defect': float(almost.defect),
            'backshift_g_residual': backshift_g_residual,
        },
        tolerances={'rank_tol': rank_tol},
        instance={
            'order': M.order,
            'dim': M.dim,
            'case': 'ii' if vanishing else 'i',
            'almost_invariant': lhs,
        },
    )


# ========== Теорема Бёрлинга ==========


def beurling_extract(
    M: Subspace,
    which_field: ScalarField | None = None,
    tol: float | None = None,
) -> BeurlingFactor:
    """
    θ из блуждающего подпространства M ⊖ zM.

    Сдвигаются только элементы с нулевым старшим коэффициентом, чтобы
    zM оставалось внутри усечения.
    """
    tol = settings.GUARD_TOL if tol is None else tol
    _require_nonzero(M)
    which_field = M.field if which_field is None else ScalarField(which_field)
    if which_field is not M.field:
        M = sub.complexify(M)

    low = sub.vanishing_at(M, M.order - 1)
    shifted = Subspace(shift_rows(low.basis), M.field)
    residual = sub.containment_residual(shifted, M)
    if residual > tol:
        raise PreconditionError(f'M не инвариантно относительно сдвига: невязка {residual:.3e}')

    wandering = sub.complement_in(M, shifted)
    if wandering.dim != 1:
        raise NotCyclicError(f'блуждающее подпространство имеет размерность {wandering.dim}')

    normalization = normalize_real_symmetric(sub.column(wandering, 0))
    theta = normalization.series
    if theta.field is not M.field:
        theta = series.as_field(theta, M.field)

    generated = multiplication_matrix(theta.coeffs, M.order, M.dim)
    projector_error = sub.projector_distance(sub.from_columns(generated, M.field), M)
    inner = is_inner(theta)
    logger.debug(
        f'[ENGINE] Бёрлинг: codim={M.order - M.dim}, проектор={projector_error:.2e}, '
        f'внутренность={inner.passed}'
    )
    return BeurlingFactor(
        theta=normalization.series,
        lam=normalization.lam,
        projector_error=projector_error,
        inner=inner,
    )


def theta_psi_crosscheck(
    M: Subspace,
    rank_tol: float | None = None,
    tol: float | None = None,
) -> Certificate:
    """
    ψ из вещественного пути (N = H²_ℝ ⊖ ψH²_ℝ) и θ из комплексифицированного
    (K = H² ⊖ θH²) должны совпасть после нормировки.
    """
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    tol = settings.GUARD_TOL if tol is None else tol
    statement = 'inner factors of the real and complexified decompositions coincide'
    instance = {'order': M.order, 'dim': M.dim}

    real = hitt_decompose(M, rank_tol)
    complexified = hitt_decompose(sub.complexify(M), rank_tol)
    complexification_error = sub.projector_distance(sub.complexify(real.N), complexified.N)

    if real.N.dim == real.N.order:
        logger.info('[ENGINE] N совпадает со всем пространством: внутреннего множителя нет')
        return Certificate(
            statement=statement,
            passed=complexification_error <= tol,
            residuals={'complexification_error': complexification_error},
            tolerances={'tol': tol, 'rank_tol': rank_tol},
            instance={**instance, 'note': 'no inner factor'},
        )

    psi = beurling_extract(sub.complement_in(sub.full_space(M.order), real.N), tol=tol)
    theta = beurling_extract(
        sub.complement_in(sub.full_space(M.order, ScalarField.COMPLEX), complexified.N),
        tol=tol,
    )
    distance = float(np.linalg.norm(theta.theta.coeffs - psi.theta.coeffs))
    passed = distance <= tol and complexification_error <= tol
    if not passed:
        logger.warning(f'[ENGINE] θ ≠ ψ: расстояние {distance:.2e}')
    return Certificate(
        statement=statement,
        passed=passed,
        residuals={
            'theta_psi_distance': distance,
            'complexification_error': complexification_error,
            'psi_projector_error': psi.projector_error,
            'theta_projector_error': theta.projector_error,
            'psi_inner_deviation': psi.inner.max_deviation,
        },
        tolerances={'tol': tol, 'rank_tol': rank_tol},
        instance={**instance, 'codim_N': M.order - real.N.dim},
    )


def check_hat_symmetric_hitt(
    M: Subspace,
    rank_tol: float | None = None,
    tol: float | None = None,
) -> Certificate:
    """Для M̂ = M: ĝ = g, N̂ = N и M = φ(M) + iφ(M)."""
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    tol = settings.GUARD_TOL if tol is None else tol
    if M.field is not ScalarField.COMPLEX:
        M = sub.complexify(M)
    hat_distance = sub.projector_distance(sub.hat_subspace(M), M)
    if hat_distance > tol:
        raise PreconditionError(f'M не замкнуто относительно сопряжения: {hat_distance:.3e}')

    decomposition = hitt_decompose(M, rank_tol)
    g_hat_error = float(np.linalg.norm(decomposition.g.coeffs - np.conj(decomposition.g.coeffs)))
    n_hat_error = sub.projector_distance(sub.hat_subspace(decomposition.N), decomposition.N)
    split_error = sub.projector_distance(sub.complexify(sub.symmetrize_subspace(M, rank_tol)), M)
    return Certificate(
        statement='hat-symmetric subspace has hat-symmetric g and N',
        passed=max(g_hat_error, n_hat_error, split_error) <= tol,
        residuals={
            'g_hat_error': g_hat_error,
            'N_hat_error': n_hat_error,
            'real_imaginary_split_error': split_error,
        },
        tolerances={'tol': tol, 'rank_tol': rank_tol},
        instance={'order': M.order, 'dim': M.dim},
    )


# ========== Сертификаты для генераторов и набора проверок ==========


def near_invariance_certificate(M: Subspace, rank_tol: float | None = None) -> Certificate:
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    report = defect(M, rank_tol)
    return Certificate(
        statement='nearly invariant under the backward shift',
        passed=report.defect == 0,
        residuals={
            'defect': float(report.defect),
            'max_residual': max(report.residual_singular_values, default=0.0),
        },
        tolerances={'rank_tol': rank_tol},
        instance={'order': M.order, 'dim': M.dim},
    )


def hitt_certificate(
    decomposition: HittDecomposition,
    tol: float | None = None,
    isometry_tol: float | None = None,
) -> Certificate:
    tol = settings.GUARD_TOL if tol is None else tol
    isometry_tol = settings.TOL if isometry_tol is None else isometry_tol
    passed = (
        decomposition.rep_error <= tol
        and decomposition.isometry_error <= isometry_tol
        and decomposition.invariance_defect == 0
    )
    return Certificate(
        statement='M = gN with isometric multiplication and backward-shift invariant N',
        passed=passed,
        residuals={
            'rep_error': decomposition.rep_error,
            'isometry_error': decomposition.isometry_error,
            'invariance_error': decomposition.invariance_error,
            'invariance_defect': float(decomposition.invariance_defect),
            'spill': decomposition.spill,
        },
        tolerances={'tol': tol, 'isometry_tol': isometry_tol},
        instance={'dim_N': decomposition.N.dim},
    )


def defect_certificate(
    decomposition: DefectDecomposition,
    bound: int,
    tol: float | None = None,
) -> Certificate:
    tol = settings.GUARD_TOL if tol is None else tol
    n = decomposition.defect_basis.dim
    passed = (
        n <= bound
        and decomposition.rep_error <= tol
        and decomposition.norm_identity_error <= tol
        and decomposition.invariance_defect == 0
    )
    return Certificate(
        statement='f = gh + z sum h_i e_i with norm identity and stacked invariance',
        passed=passed,
        residuals={
            'defect': float(n),
            'rep_error': decomposition.rep_error,
            'norm_identity_error': decomposition.norm_identity_error,
            'invariance_error': decomposition.invariance_error,
            'invariance_defect': float(decomposition.invariance_defect),
            'remainder': decomposition.remainder,
            'spill': decomposition.spill,
        },
        tolerances={'tol': tol},
        instance={'case': decomposition.case, 'bound': bound},
    )
