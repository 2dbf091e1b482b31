"""
Цей модуль є точкою входу для підкоманд експерименту.

Він визначає, які функції викликати на основі аргументів командного рядка
(`synth-data`, `run`, `report`, `grad-check`), і повертає код завершення.
"""

import os

from loguru import logger
from tabulate import tabulate

from comhom.common.config import CONFIG_DIR, load_model, settings
from comhom.data.io import save_dataset
from comhom.data.synth import SynthCohortSpec, generate_synth_cohort
from .aggregate import render_tables, write_aggregates
from .config import ExperimentConfig
from .diagnostics import check_composite, check_layers
from .runner import count_failures, load_reports, run_experiment

EXIT_OK = 0
EXIT_FAILED = 1


class ExperimentApp:
    """Клас, що інкапсулює логіку виконання команд експерименту."""

    def __init__(self, args):
        """
        Ініціалізує додаток з аргументами командного рядка.

        Args:
            args: Аргументи, розпарсені з argparse.
        """
        self.args = args
        self._command_map = {
            "synth-data": self._run_synth_data,
            "run": self._run_experiment,
            "report": self._run_report,
            "grad-check": self._run_grad_check,
        }

    async def run(self):
        """Запускає відповідний метод на основі команди та повертає код завершення."""
        command_func = self._command_map.get(self.args.command)
        if command_func is None:
            logger.error(f"Невідома команда: {self.args.command}")
            return EXIT_FAILED
        return await command_func()

    async def _run_synth_data(self):
        spec = await load_model(SynthCohortSpec, self.args.spec)
        dataset = generate_synth_cohort(spec, self.args.seed)
        await save_dataset(dataset, self.args.out)
        return EXIT_OK

    async def _run_experiment(self):
        config = await load_model(ExperimentConfig, self.args.config)
        output_dir = self.args.out or config.output_dir or settings.output_dir
        results = await run_experiment(config, output_dir, jobs=self.args.jobs)
        reports = await load_reports(output_dir)
        if reports:
            print(render_tables(await write_aggregates(output_dir, reports)))
        failed = [r for r in results if r["status"] != "ok"]
        for result in failed:
            logger.error(f"Невдалий запуск {result['label']}: {result['error']}")
        return EXIT_FAILED if failed else EXIT_OK

    async def _run_report(self):
        reports = await load_reports(self.args.input_dir)
        if not reports:
            logger.error(f"У каталозі {self.args.input_dir} не знайдено звітів")
            return EXIT_FAILED
        failures = count_failures(self.args.input_dir)
        if failures:
            logger.warning(f"Пропущено {failures} невдалих запусків")
        print(render_tables(await write_aggregates(self.args.input_dir, reports)))
        return EXIT_OK

    async def _run_grad_check(self):
        rows = check_layers(self.args.points, self.args.seed, self.args.tolerance)
        rows += check_composite(self.args.points, self.args.seed, self.args.tolerance, self.args.window)
        print(tabulate(rows, headers="keys", tablefmt="grid", floatfmt=".2e"))
        return EXIT_OK if all(row["passed"] for row in rows) else EXIT_FAILED


def add_arguments(subparsers):
    """
    Додає підкоманди експерименту до головного парсера.

    Args:
        subparsers: Об'єкт `_SubParsersAction` головного парсера.
    """
    synth_parser = subparsers.add_parser("synth-data", help="Згенерувати синтетичну когорту у форматі набору даних.")
    synth_parser.add_argument("--spec", default=os.path.join(CONFIG_DIR, "synth_cohort.json"), help="JSON з параметрами когорти.")
    synth_parser.add_argument("--out", required=True, help="Каталог для запису набору.")
    synth_parser.add_argument("--seed", type=int, default=0, help="Сід генератора.")

    run_parser = subparsers.add_parser("run", help="Виконати повний експеримент LOSO.")
    run_parser.add_argument("--config", required=True, help="JSON-документ експерименту.")
    run_parser.add_argument("--jobs", type=int, default=1, help="Кількість паралельних процесів.")
    run_parser.add_argument("--out", default=None, help="Каталог результатів (за замовчуванням з конфігурації).")

    report_parser = subparsers.add_parser("report", help="Перезібрати зведені таблиці з готових звітів.")
    report_parser.add_argument("--in", dest="input_dir", default=settings.output_dir, help="Каталог результатів.")

    grad_parser = subparsers.add_parser("grad-check", help="Перевірити аналітичні градієнти скінченними різницями.")
    grad_parser.add_argument("--points", type=int, default=10, help="Кількість випадкових точок.")
    grad_parser.add_argument("--seed", type=int, default=0)
    grad_parser.add_argument("--tolerance", type=float, default=1e-4)
    grad_parser.add_argument("--window", type=int, default=32, help="Довжина вікна для композитної перевірки.")


async def run(args):
    """
    Створює екземпляр ExperimentApp та запускає його.

    Returns:
        int: Код завершення.
    """
    app = ExperimentApp(args)
    return await app.run()
