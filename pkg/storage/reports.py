import csv
import sys
from pathlib import Path
from typing import IO, Any

from pydantic import BaseModel, TypeAdapter

from core.logger import logger
from presentation.dto import SUITE_NAMES, ReportRecord

CSV_FIXED_COLUMNS = ['suite', 'trial', 'statement', 'pass']


class ReportSink:
    """
    Единственный писатель отчёта verify.

    Записи копятся в памяти и выгружаются при закрытии, отсортированные
    по набору проверок и номеру испытания: порядок вывода не зависит
    от того, в каком порядке завершились параллельные испытания.
    """

    def __init__(self, path: Path | None = None, fmt: str = 'json'):
        if fmt not in ('json', 'csv'):
            raise ValueError(f'неизвестный формат отчёта: {fmt}')
        self.path = path
        self.fmt = fmt
        self.records: list[ReportRecord] = []

    def __enter__(self) -> 'ReportSink':
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.flush()

    def write(self, record: ReportRecord) -> None:
        self.records.append(record)

    def extend(self, records: list[ReportRecord]) -> None:
        self.records.extend(records)

    @property
    def failed(self) -> int:
        return sum(not r.certificate.passed for r in self.records)

    def _sorted(self) -> list[ReportRecord]:
        rank = {name: i for i, name in enumerate(SUITE_NAMES)}
        return sorted(self.records, key=lambda r: (rank.get(r.suite, len(rank)), r.suite, r.trial))

    def flush(self) -> None:
        records = self._sorted()
        if self.path is None:
            self._dump(sys.stdout, records)
        else:
            # Отчёты дописываются: повторный прогон не затирает предыдущий
            self.path.parent.mkdir(parents=True, exist_ok=True)
            is_new = not self.path.exists() or self.path.stat().st_size == 0
            with self.path.open('a', encoding='utf-8', newline='') as stream:
                self._dump(stream, records, header=is_new)
        logger.info(
            f'[REPORT] записано {len(records)} сертификатов '
            f'({self.fmt}, {self.path or "stdout"}), провалено: {self.failed}'
        )

    def _dump(self, stream: IO[str], records: list[ReportRecord], header: bool = True) -> None:
        if self.fmt == 'json':
            for record in records:
                stream.write(record.model_dump_json(by_alias=True) + '\n')
            return

        residual_keys = sorted({k for r in records for k in r.certificate.residuals})
        writer = csv.DictWriter(
            stream,
            fieldnames=CSV_FIXED_COLUMNS + [f'residual.{k}' for k in residual_keys],
        )
        if header:
            writer.writeheader()
        for record in records:
            row = {
                'suite': record.suite,
                'trial': record.trial,
                'statement': record.certificate.statement,
                'pass': record.certificate.passed,
            }
            row.update({f'residual.{k}': v for k, v in record.certificate.residuals.items()})
            writer.writerow(row)


def write_json(model: BaseModel, path: Path | None = None) -> None:
    """Один JSON-документ в файл или в stdout."""
    text = model.model_dump_json(by_alias=True, indent=2)
    if path is None:
        sys.stdout.write(text + '\n')
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + '\n', encoding='utf-8')
    logger.info(f'[REPORT] документ записан в {path}')


def read_json(model: Any, path: Path) -> Any:
    """Документ из файла или stdin ('-'); model — модель или объединение моделей."""
    text = sys.stdin.read() if str(path) == '-' else path.read_text(encoding='utf-8')
    return TypeAdapter(model).validate_json(text)
