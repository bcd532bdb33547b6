class HardyLabError(ValueError):
    """Базовая ошибка лаборатории."""


class DimensionMismatchError(HardyLabError):
    """Порядки (или размерности) операндов не совпадают."""


class FieldError(HardyLabError):
    """Недопустимая комбинация полей: вещественное / комплексное."""


class DomainError(HardyLabError):
    """Точка или нуль вне открытого единичного круга."""


class DegenerateInputError(HardyLabError):
    """Нулевой ряд или нулевое подпространство там, где нужен ненулевой."""


class ContainmentError(HardyLabError):
    """Подпространство T не содержится в S."""


class PreconditionError(HardyLabError):
    """Нарушено предусловие операции."""


class NotNearlyInvariantError(PreconditionError):
    """Подпространство не является почти инвариантным."""


class VanishingBranchError(PreconditionError):
    """Все функции подпространства обращаются в нуль в 0 (ветка ii)."""


class DefectFreeError(PreconditionError):
    """Дефект равен нулю: нужно использовать hitt_decompose."""


class NotCyclicError(HardyLabError):
    """Блуждающее подпространство не одномерно."""


class SignError(HardyLabError):
    """Множитель g должен быть положителен в нуле."""


class RejectedInstanceError(HardyLabError):
    """Сгенерированный экземпляр не прошёл проверку ортогональности."""


class InvariantViolationError(HardyLabError):
    """Нарушен внутренний инвариант (ошибка в вычислениях)."""
