"""Общая обвязка команд CLI: трейсинг, метрики и коды выхода."""

import contextlib
from pathlib import Path
from typing import Any, Iterator, List, Optional

import click
from opentelemetry import trace
from opentelemetry.trace import Span

from src.config import logger
from src.errors import ConfigurationError, NumericFaultError, SVMAError
from src.metrics import COMMAND_CALLS, EXECUTION_ERRORS

tracer = trace.get_tracer(__name__)
log = logger.getChild("cli")

EXIT_INVALID_INPUT = 2
EXIT_NUMERIC_FAULT = 3


@contextlib.contextmanager
def command_span(command: str, **attributes: Any) -> Iterator[Span]:
    """Оборачивает тело команды: span, счётчики и перевод исключений в коды выхода.

    ValueError (в том числе ошибки схемы и конфигурации) -> код 2,
    NumericFaultError -> код 3 с диагностикой, прочие ошибки пакета -> код 1.
    """
    with tracer.start_as_current_span(command) as span:
        for key, value in attributes.items():
            if value is not None:
                span.set_attribute(key, str(value))
        try:
            yield span
        except click.exceptions.Exit:
            raise
        except NumericFaultError as e:
            span.set_attribute("error", "numeric_fault")
            span.set_attribute("error_message", str(e))
            COMMAND_CALLS.labels(command=command, status="numeric_fault").inc()
            EXECUTION_ERRORS.labels(command=command, error_type="numeric").inc()
            log.error("Численный сбой в команде %s: %s", command, e)
            click.echo(f"💥 Численный сбой: {e}", err=True)
            click.echo(f"   место: {e.where}, шаг: {e.step if e.step is not None else '-'}", err=True)
            raise click.exceptions.Exit(EXIT_NUMERIC_FAULT)
        except ValueError as e:
            span.set_attribute("error", "validation_error")
            span.set_attribute("error_message", str(e))
            COMMAND_CALLS.labels(command=command, status="validation_error").inc()
            EXECUTION_ERRORS.labels(command=command, error_type="validation").inc()
            click.echo(f"❌ {e}", err=True)
            raise click.exceptions.Exit(EXIT_INVALID_INPUT)
        except SVMAError as e:
            span.set_attribute("error", "execution_error")
            span.set_attribute("error_message", str(e))
            COMMAND_CALLS.labels(command=command, status="error").inc()
            EXECUTION_ERRORS.labels(command=command, error_type="execution").inc()
            click.echo(f"💥 {e}", err=True)
            raise click.exceptions.Exit(1)
        except Exception as e:
            span.set_attribute("error", "execution_error")
            span.set_attribute("error_message", str(e))
            COMMAND_CALLS.labels(command=command, status="error").inc()
            EXECUTION_ERRORS.labels(command=command, error_type="execution").inc()
            log.exception("Неожиданная ошибка в команде %s", command)
            raise
        else:
            span.set_attribute("success", True)
            COMMAND_CALLS.labels(command=command, status="success").inc()


def parse_list(value: Optional[str | List[Any]]) -> Optional[List[str]]:
    """'S1,S5' или список из YAML -> ['S1', 'S5']; пустое значение -> None."""
    if value is None:
        return None
    items = value.split(",") if isinstance(value, str) else [str(v) for v in value]
    items = [v.strip() for v in items if v.strip()]
    return items or None


def parse_floats(value: str, name: str) -> List[float]:
    try:
        return [float(v) for v in parse_list(value) or []]
    except ValueError as e:
        raise ConfigurationError(f"{name}: ожидается список чисел через запятую ({value}).") from e


def resolve_dataset(path: Optional[str]) -> Path:
    if not path:
        raise ConfigurationError("dataset: путь к набору не задан (--data или ключ dataset в конфигурации).")
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"dataset: файл {path} не найден.")
    return path
