"""
Алгебра конечномерных подпространств усечённого пространства Харди.

Все равенства подпространств проверяются через projector_distance,
все ранговые решения — через относительный порог rank_tol · σ_max.
Вещественное подпространство попадает в комплексное только явно (complexify).
"""

from collections.abc import Sequence

import numpy as np
import scipy.linalg

from core.errors import ContainmentError, DimensionMismatchError, FieldError
from core.logger import logger
from core.settings import settings

from . import series
from .entities import ScalarField, Subspace, TruncatedSeries


def _dtype(field: ScalarField) -> type:
    return np.float64 if field is ScalarField.REAL else np.complex128


def fix_signs(columns: np.ndarray) -> np.ndarray:
    """Первый заметный коэффициент каждого столбца делается вещественным положительным."""
    columns = np.array(columns)
    for j in range(columns.shape[1]):
        col = columns[:, j]
        peak = np.max(np.abs(col)) if col.size else 0.0
        if peak == 0:
            continue
        k = int(np.argmax(np.abs(col) > 1e-10 * peak))
        lead = col[k]
        columns[:, j] = col * (np.conj(lead) / abs(lead))
    return columns


def orthonormal_columns(matrix: np.ndarray, rank_tol: float | None = None) -> np.ndarray:
    """Ортонормированный базис образа матрицы через SVD с относительным порогом."""
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    matrix = np.asarray(matrix)
    if matrix.shape[1] == 0 or not np.any(matrix):
        return np.zeros((matrix.shape[0], 0), dtype=matrix.dtype)
    u, s, _ = scipy.linalg.svd(matrix, full_matrices=False)
    keep = s > rank_tol * s[0]
    return fix_signs(u[:, keep])


def from_columns(
    matrix: np.ndarray,
    field: ScalarField,
    rank_tol: float | None = None,
    blocks: int = 1,
) -> Subspace:
    matrix = np.asarray(matrix)
    if field is ScalarField.COMPLEX:
        matrix = matrix.astype(np.complex128)
    return Subspace(orthonormal_columns(matrix, rank_tol), field, blocks=blocks)


def zero_subspace(order: int, field: ScalarField = ScalarField.REAL, blocks: int = 1) -> Subspace:
    return Subspace(np.zeros((order, 0), dtype=_dtype(field)), field, blocks=blocks)


def full_space(order: int, field: ScalarField = ScalarField.REAL) -> Subspace:
    return Subspace(np.eye(order, dtype=_dtype(field)), field)


def column(S: Subspace, j: int) -> TruncatedSeries:
    return TruncatedSeries(S.basis[:, j], S.field)


def projector(S: Subspace) -> np.ndarray:
    return S.basis @ S.basis.conj().T


# ========== Операции ==========


def orthonormalize(
    vectors: Sequence[TruncatedSeries],
    rank_tol: float | None = None,
    *,
    order: int | None = None,
    field: ScalarField | None = None,
) -> Subspace:
    """
    Ортонормированный базис линейной оболочки.

    Пустой список даёт нулевое подпространство; его порядок берётся из order.
    """
    if not vectors:
        if order is None:
            raise DimensionMismatchError('для пустого набора нужно указать order')
        return zero_subspace(order, field or ScalarField.REAL)

    first = vectors[0]
    for v in vectors[1:]:
        if v.order != first.order:
            raise DimensionMismatchError(f'порядки не совпадают: {first.order} и {v.order}')
        if v.field != first.field:
            raise FieldError(f'поля не совпадают: {first.field} и {v.field}')
    target = field or first.field
    if first.field is ScalarField.COMPLEX and target is ScalarField.REAL:
        raise FieldError('комплексные векторы не образуют вещественное подпространство')

    matrix = np.column_stack([v.coeffs for v in vectors]).astype(_dtype(target))
    return Subspace(orthonormal_columns(matrix, rank_tol), target)


def span(*vectors: TruncatedSeries) -> Subspace:
    return orthonormalize(list(vectors))


def project(S: Subspace, f: TruncatedSeries) -> TruncatedSeries:
    """P_S f = B (Bᴴ f)."""
    if S.order != f.order:
        raise DimensionMismatchError(f'порядки не совпадают: {S.order} и {f.order}')
    if S.field is ScalarField.COMPLEX and f.field is ScalarField.REAL:
        raise FieldError('вещественный ряд нельзя проектировать на комплексный базис без вложения')
    coeffs = S.basis @ (S.basis.conj().T @ f.coeffs)
    return TruncatedSeries(coeffs, f.field, f.spill)


def contains(S: Subspace, f: TruncatedSeries, tol: float | None = None) -> bool:
    """‖f − P_S f‖ ≤ tol·‖f‖; нулевой ряд содержится всегда."""
    tol = settings.TOL if tol is None else tol
    size = series.norm(f)
    if size == 0:
        return True
    if S.field is ScalarField.COMPLEX:
        f = series.as_field(f, ScalarField.COMPLEX)
    residual = np.linalg.norm(f.coeffs - project(S, f).coeffs)
    return bool(residual <= tol * size)


def vanishing_at(S: Subspace, index: int, tol: float | None = None) -> Subspace:
    """{f ∈ S : a_index(f) = 0} — ядро функционала коэффициента на S."""
    tol = settings.RANK_TOL if tol is None else tol
    row = S.basis[index, :]
    if S.dim == 0 or np.linalg.norm(row) <= tol:
        return S
    kernel = scipy.linalg.null_space(row[None, :])
    basis = fix_signs(S.basis @ kernel)
    return Subspace(basis, S.field, blocks=S.blocks)


def intersect_zH(S: Subspace) -> Subspace:
    """S ∩ zH²: элементы, обращающиеся в нуль в начале координат."""
    return vanishing_at(S, 0)


def containment_residual(A: Subspace, B: Subspace) -> float:
    """‖(I − P_B) P_A‖: ноль тогда и только тогда, когда A ⊂ B."""
    if A.order != B.order:
        raise DimensionMismatchError(f'порядки не совпадают: {A.order} и {B.order}')
    if A.dim == 0:
        return 0.0
    residual = A.basis - B.basis @ (B.basis.conj().T @ A.basis)
    return float(np.linalg.norm(residual, 2))


def complement_in(S: Subspace, T: Subspace, tol: float | None = None) -> Subspace:
    """S ⊖ T для T ⊂ S (вложение проверяется)."""
    tol = settings.GUARD_TOL if tol is None else tol
    if S.order != T.order:
        raise DimensionMismatchError(f'порядки не совпадают: {S.order} и {T.order}')
    if S.field is ScalarField.REAL and T.field is ScalarField.COMPLEX:
        raise FieldError('комплексное T не может лежать в вещественном S')
    if T.dim == 0:
        return S
    residual = containment_residual(T, S)
    if residual > tol:
        raise ContainmentError(f'T не содержится в S: невязка {residual:.3e}')
    if T.dim >= S.dim:
        return zero_subspace(S.order, S.field, S.blocks)

    coords = S.basis.conj().T @ T.basis
    u, _, _ = scipy.linalg.svd(coords, full_matrices=True)
    basis = fix_signs(S.basis @ u[:, T.dim :])
    return Subspace(basis, S.field, blocks=S.blocks)


def direct_sum(A: Subspace, B: Subspace, rank_tol: float | None = None) -> Subspace:
    """Линейная оболочка A + B (для M ⊕ ℱ)."""
    if A.order != B.order:
        raise DimensionMismatchError(f'порядки не совпадают: {A.order} и {B.order}')
    field = ScalarField.COMPLEX if ScalarField.COMPLEX in (A.field, B.field) else ScalarField.REAL
    return from_columns(np.hstack([A.basis, B.basis]), field, rank_tol, blocks=A.blocks)


def embed(S: Subspace, order: int) -> Subspace:
    """Вложение в пространство большего порядка дополнением нулями."""
    if order < S.order:
        raise DimensionMismatchError(f'нельзя вложить порядок {S.order} в {order}')
    pad = np.zeros((order - S.order, S.dim), dtype=S.basis.dtype)
    return Subspace(np.vstack([S.basis, pad]), S.field)


def projector_distance(S1: Subspace, S2: Subspace) -> float:
    """‖P_{S1} − P_{S2}‖₂ — синус наибольшего главного угла."""
    if S1.order != S2.order:
        raise DimensionMismatchError(f'порядки не совпадают: {S1.order} и {S2.order}')
    if S1.dim == 0 and S2.dim == 0:
        return 0.0
    distance = float(np.linalg.norm(projector(S1) - projector(S2), 2))
    return min(distance, 1.0)


def hat_subspace(S: Subspace) -> Subspace:
    """N̂ = {F̂ : F ∈ N}: сопряжение базиса."""
    if S.field is ScalarField.REAL:
        return S
    return Subspace(fix_signs(np.conj(S.basis)), S.field, blocks=S.blocks)


def complexify(S: Subspace) -> Subspace:
    """M_ℂ = M + iM: тот же базис над комплексным полем."""
    if S.field is not ScalarField.REAL:
        raise FieldError('комплексифицировать можно только вещественное подпространство')
    return Subspace(S.basis.astype(np.complex128), ScalarField.COMPLEX, blocks=S.blocks)


def symmetrize_subspace(S: Subspace, rank_tol: float | None = None) -> Subspace:
    """φ(K) — вещественная оболочка {φ(b), φ(ib)} по столбцам базиса."""
    if S.field is ScalarField.REAL:
        return S
    vectors = np.hstack([np.real(S.basis), -np.imag(S.basis)])
    result = from_columns(vectors, ScalarField.REAL, rank_tol, blocks=S.blocks)
    logger.debug(f'[SUBSPACE] симметризация: dim {S.dim} (ℂ) -> {result.dim} (ℝ)')
    return result
