"""
Це головний модуль і точка входу для всього CLI-додатку.

Він відповідає за:
- Налаштування логування.
- Створення головного парсера аргументів командного рядка.
- Передачу керування підкомандам експерименту.
- Перетворення помилок конфігурації на код завершення 2.
"""

import argparse
import asyncio
import sys

from loguru import logger

from .common.exceptions import ConfigurationError
from .common.logging_setup import setup_logging
from .experiment import main as experiment_main

EXIT_CONFIG_ERROR = 2


async def main(argv=None):
    """
    Головна функція, що виконується при запуску `python -m comhom` або `comhom`.

    Returns:
        int: Код завершення (0 - успіх, 1 - невдалий запуск, 2 - помилка конфігурації).
    """
    setup_logging()

    parser = argparse.ArgumentParser(description="Комбінаторно-гомоморфні ознаки для розпізнавання жестів ЕМГ")
    subparsers = parser.add_subparsers(dest="command", required=True)
    experiment_main.add_arguments(subparsers)

    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        parser.print_help(sys.stderr)
        return 1

    args = parser.parse_args(argv)
    try:
        return await experiment_main.run(args)
    except ConfigurationError as e:
        logger.error(f"Помилка конфігурації: {e}")
        return EXIT_CONFIG_ERROR


def cli():
    sys.exit(asyncio.run(main()))


if __name__ == "__main__":
    cli()
