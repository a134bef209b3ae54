"""Точка входа CLI svma-lifter.

Запуск: python -m src.main <команда> [опции]
"""

from src.cli_instance import cli
from src.tracing import init_tracing

# Регистрация команд в click-группе
from src.commands import ablate, evaluate, lift, plot, synth, train  # noqa: F401,E402


def main() -> None:
    init_tracing()
    cli(prog_name="svma")


if __name__ == "__main__":
    main()
