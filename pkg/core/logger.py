import logging
import sys
from pathlib import Path

from core.settings import settings

logger = logging.getLogger('HardyLab')
logger.setLevel(settings.LOG_LEVEL.upper())

_formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')

# Консольный обработчик (stderr: stdout занят отчётами)
console_handler = logging.StreamHandler(sys.stderr)
console_handler.setLevel(settings.LOG_LEVEL.upper())
console_handler.setFormatter(_formatter)

logger.addHandler(console_handler)

# Файловый обработчик (только если задан путь и есть права на запись)
if settings.LOG_FILE:
    try:
        log_file = Path(settings.LOG_FILE)
        log_file.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(str(log_file), encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(_formatter)
        logger.addHandler(file_handler)
    except (PermissionError, OSError):
        # Если нет прав на запись, используем только консольный handler
        pass
