"""Исключения svma-lifter.

Семейство ValueError означает ошибку входных данных или конфигурации
(код выхода 2), NumericFaultError — численный сбой обучения (код выхода 3).
"""

from typing import Optional


class SVMAError(Exception):
    """Базовое исключение пакета."""


class DegenerateInputError(SVMAError, ValueError):
    """Поза вырождена: все суставы совпадают с корнем."""


class SchemaError(SVMAError, ValueError):
    """Файл ключевых точек не соответствует скелету."""


class ProjectionDomainError(SVMAError, ValueError):
    """Перспективная проекция точки с неположительной глубиной."""


class CameraDomainError(SVMAError, ValueError):
    """Нулевая матрица камеры."""


class ConfigurationError(SVMAError, ValueError):
    """Неверные параметры запуска."""


class CheckpointError(SVMAError, OSError):
    """Не удалось прочитать или записать чекпоинт."""


class NumericFaultError(SVMAError, ArithmeticError):
    """Неконечное значение в активациях, градиентах или лоссах."""

    def __init__(self, where: str, step: Optional[int] = None, detail: str = ""):
        self.where = where
        self.step = step
        msg = f"Неконечное значение в '{where}'"
        if step is not None:
            msg += f" на шаге {step}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
