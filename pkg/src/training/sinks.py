"""Приёмники обучения: CSV-лог потерь и запись чекпоинтов."""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from src.losses import LossReport
from src.training.checkpoint import save_checkpoint
from src.training.config import TrainConfig
from src.training.state import TrainState


class TrainingLog:
    """Построчный CSV-лог LossReport. При продолжении обучения дописывает файл."""

    def __init__(self, path: str | Path, append: bool = False):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fresh = not (append and self.path.exists())
        self._fh = self.path.open("w" if fresh else "a", newline="", encoding="utf-8")
        self._writer = csv.DictWriter(self._fh, fieldnames=LossReport.columns(), lineterminator="\n")
        if fresh:
            self._writer.writeheader()

    def write(self, report: LossReport) -> None:
        row = {k: ("" if v is None else repr(v)) for k, v in report.as_row().items()}
        self._writer.writerow(row)
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "TrainingLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass
class TrainSinks:
    log: Optional[TrainingLog] = None
    checkpoint_path: Optional[Path] = None
    progress: bool = False

    def write(self, report: LossReport) -> None:
        if self.log is not None:
            self.log.write(report)

    def checkpoint(self, state: TrainState, config: TrainConfig) -> None:
        if self.checkpoint_path is not None:
            save_checkpoint(self.checkpoint_path, state, config)
