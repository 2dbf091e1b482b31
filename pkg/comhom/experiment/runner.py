"""
Виконання протоколу LOSO: для кожного (фолд, сід, точка сітки) одне
попереднє навчання, потім оцінювання трьох режимів нагляду на однаковій
тестовій вибірці.

Запуски незалежні; з `jobs > 1` вони розподіляються між процесами, кожен
процес виконує свій запуск у власному циклі asyncio.
"""

import asyncio
import hashlib
import json
import os
import shutil
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List

import aiofiles
import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel
from rich.progress import Progress

from comhom.calibrate.calibration_set import SupervisionMode, build_calibration_set, subsample_per_class, synthetic_combos
from comhom.calibrate.downstream import fit_downstream, predict
from comhom.common.exceptions import ConfigurationError, DatasetLoadError
from comhom.common.logging_setup import setup_logging
from comhom.common.utils import hash_arrays, save_frame_csv, save_to_json
from comhom.data.dataset import Dataset
from comhom.data.io import MANIFEST_FILE, load_dataset, load_roster, save_dataset
from comhom.data.labels import COMBO_CLASSES, class_indices
from comhom.data.splits import split_loso
from comhom.data.synth import generate_synth_cohort
from comhom.metrics.accuracy import accuracy_summary, confusion_matrix
from comhom.metrics.similarity import SimilaritySummary, similarity_matrix
from comhom.model.bundle import save_bundle
from comhom.model.encoder import encode
from comhom.nncore.rng import derive_seed, make_stream
from comhom.pretrain.trainer import pretrain
from .config import ExperimentConfig, GridPoint

REPORT_PREFIX = "report_"
FAILURE_FILE = "failure.json"
SIMILARITY_FILE = "similarity.csv"
SYNTH_DIGEST_FILE = "synth.json"


class RunReport(BaseModel):
    """Результат одного режиму нагляду одного запуску."""

    fold: int
    seed: int
    eval_subject: int
    grid: GridPoint
    grid_key: str
    grid_hash: str
    mode: str
    algorithm: str
    acc_single: float
    acc_comb: float
    acc_all: float
    confusion: List[List[int]]
    similarity: SimilaritySummary
    parameter_counts: Dict[str, int]
    best_epoch: int
    calib_size: int
    test_split_hash: str
    wall_time_s: float

    def fingerprint(self):
        """Вміст звіту без часу виконання (для перевірки відтворюваності)."""
        return self.model_dump(exclude={"wall_time_s"})


@dataclass(frozen=True)
class RunTask:
    config: ExperimentConfig
    dataset_path: str
    point: GridPoint
    fold: int
    seed: int
    output_dir: str

    @property
    def run_dir(self):
        return os.path.join(self.output_dir, self.point.digest, f"{self.fold}-{self.seed}")

    @property
    def label(self):
        return f"{self.point.key} fold={self.fold} seed={self.seed}"


def report_filename(mode, algorithm):
    return f"{REPORT_PREFIX}{mode}_{algorithm}.json"


def synth_digest(config):
    """Відбиток специфікації когорти та сіду, з яких згенеровано `<out>/dataset`."""
    payload = json.dumps({"synth": config.synth.model_dump(mode="json"), "seed": config.synth_seed}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


async def _stored_digest(path):
    digest_path = os.path.join(path, SYNTH_DIGEST_FILE)
    if not os.path.exists(os.path.join(path, MANIFEST_FILE)) or not os.path.exists(digest_path):
        return None
    async with aiofiles.open(digest_path, "r", encoding="utf-8") as f:
        try:
            return json.loads(await f.read()).get("digest")
        except (json.JSONDecodeError, AttributeError):
            return None


async def prepare_dataset(config, output_dir):
    """
    Повертає шлях до набору.

    Синтетична когорта кешується у `<out>/dataset` разом з відбитком
    специфікації; якщо відбиток відсутній або інший, каталог генерується заново.
    """
    if config.dataset is not None:
        return config.dataset
    path = os.path.join(output_dir, "dataset")
    digest = synth_digest(config)
    stored = await _stored_digest(path)
    if stored == digest:
        logger.debug(f"Синтетична когорта у {path} актуальна")
        return path
    if os.path.isdir(path):
        logger.warning(f"Когорта у {path} згенерована з іншої специфікації, генерую заново")
        shutil.rmtree(path)
    logger.info(f"Генерація синтетичної когорти (сід {config.synth_seed}) у {path}")
    await save_dataset(generate_synth_cohort(config.synth, config.synth_seed), path)
    await save_to_json({"digest": digest, "synth_seed": config.synth_seed}, os.path.join(path, SYNTH_DIGEST_FILE))
    return path


async def check_folds(config, dataset_path):
    """Кожен фолд має бути позицією у відсортованому списку суб'єктів набору."""
    try:
        roster = await load_roster(dataset_path)
    except DatasetLoadError as e:
        raise ConfigurationError(f"Набір даних {dataset_path} недоступний: {e}") from e
    bad = [fold for fold in config.folds if fold >= len(roster)]
    if bad:
        raise ConfigurationError(f"Фолди {bad} поза діапазоном [0, {len(roster)}) для набору {dataset_path}")


def clear_run_outputs(run_dir):
    """Видаляє failure.json та звіти попереднього запуску в цьому каталозі."""
    if not os.path.isdir(run_dir):
        return
    for name in os.listdir(run_dir):
        if name == FAILURE_FILE or (name.startswith(REPORT_PREFIX) and name.endswith(".json")):
            os.remove(os.path.join(run_dir, name))


def similarity_for_subject(bundle, features, dataset, n_synth_per_class, rng):
    """M_Sim для всіх даних тестового суб'єкта: реальні комбо проти синтетичних."""
    combos = np.isin(dataset.classes, COMBO_CLASSES)
    synth = synthetic_combos(bundle, features, dataset.directions, dataset.modifiers)
    synth_classes = class_indices(synth.directions, synth.modifiers)
    keep = subsample_per_class(synth_classes, n_synth_per_class, rng)
    return similarity_matrix(features[combos], dataset.classes[combos], synth.features[keep], synth_classes[keep])


async def execute_run(task):
    """
    Виконує один запуск і записує звіти у каталог запуску.

    Returns:
        dict: {"status": "ok" | "failed", "label": ..., "reports": n, "error": ...}.
    """
    config, point = task.config, task.point
    run_seed = derive_seed(task.seed, "run", task.fold)
    started = time.perf_counter()
    failure_path = os.path.join(task.run_dir, FAILURE_FILE)
    clear_run_outputs(task.run_dir)
    try:
        dataset = await load_dataset(task.dataset_path)
        split = split_loso(dataset, task.fold, config.calib_fraction, seed=derive_seed(task.seed, "split", task.fold))
        logger.info(f"Запуск {task.label}: тестовий суб'єкт {split.eval_subject}, валідаційний {split.val_subject}")

        bundle = pretrain(split.pretrain, split.validation, config.pretrain_config(point, run_seed))
        await save_bundle(bundle, os.path.join(task.run_dir, "bundle"))
        await save_frame_csv(pd.DataFrame(bundle.metadata["trace"]), os.path.join(task.run_dir, "trace.csv"))

        calib_features = encode(bundle.encoder, split.calibration.samples)
        test_features = encode(bundle.encoder, split.test.samples)
        test_hash = hash_arrays(split.test.samples, split.test.directions, split.test.modifiers)

        held_out = Dataset.concat([split.calibration, split.test])
        matrix, summary = similarity_for_subject(
            bundle, np.concatenate([calib_features, test_features]), held_out,
            config.n_synth_per_class, make_stream(run_seed, "similarity"),
        )
        await save_frame_csv(matrix.to_frame(), os.path.join(task.run_dir, SIMILARITY_FILE), index=True)

        count = 0
        for spec in config.downstream:
            spec = spec.model_copy(update={"seed": derive_seed(spec.seed, "downstream", run_seed)})
            for mode in SupervisionMode:
                calib = build_calibration_set(
                    mode, bundle, split.calibration, config.n_synth_per_class,
                    make_stream(run_seed, "calibration", mode.value), features=calib_features,
                )
                model = fit_downstream(spec, calib)
                predictions = predict(model, test_features)
                scores = accuracy_summary(split.test.labels, predictions)
                report = RunReport(
                    fold=task.fold, seed=task.seed, eval_subject=split.eval_subject,
                    grid=point, grid_key=point.key, grid_hash=point.digest,
                    mode=mode.value, algorithm=spec.algorithm, **scores,
                    confusion=confusion_matrix(split.test.labels, predictions).counts.tolist(),
                    similarity=summary, parameter_counts=bundle.parameter_counts(),
                    best_epoch=bundle.best_epoch, calib_size=len(calib), test_split_hash=test_hash,
                    wall_time_s=round(time.perf_counter() - started, 3),
                )
                await save_to_json(report.model_dump(), os.path.join(task.run_dir, report_filename(mode.value, spec.algorithm)))
                logger.info(
                    f"{task.label} [{mode.value}/{spec.algorithm}]: single {scores['acc_single']:.2f}, "
                    f"comb {scores['acc_comb']:.2f}, all {scores['acc_all']:.2f}"
                )
                count += 1
        return {"status": "ok", "label": task.label, "reports": count}
    except Exception as e:
        logger.exception(f"Запуск {task.label} завершився помилкою: {e}")
        await save_to_json({"label": task.label, "error": f"{type(e).__name__}: {e}"}, failure_path)
        return {"status": "failed", "label": task.label, "reports": 0, "error": str(e)}


def _execute_in_worker(task):
    setup_logging()
    return asyncio.run(execute_run(task))


def build_tasks(config, dataset_path, output_dir):
    return [
        RunTask(config, dataset_path, point, fold, seed, output_dir)
        for point in config.grid()
        for fold in config.folds
        for seed in config.seeds
    ]


async def run_experiment(config, output_dir, jobs=1):
    """
    Виконує всі запуски експерименту.

    Args:
        config (ExperimentConfig): Документ експерименту.
        output_dir (str): Кореневий каталог результатів.
        jobs (int): Кількість паралельних процесів.

    Returns:
        list[dict]: Статус кожного запуску в порядку задач.
    """
    os.makedirs(output_dir, exist_ok=True)
    await save_to_json(config.model_dump(), os.path.join(output_dir, "experiment.json"), with_timestamp=True)
    dataset_path = await prepare_dataset(config, output_dir)
    await check_folds(config, dataset_path)
    tasks = build_tasks(config, dataset_path, output_dir)
    logger.info(f"Заплановано {len(tasks)} запусків ({len(config.grid())} точок сітки), паралельно: {jobs}")

    results = []
    with Progress(transient=True) as progress:
        bar = progress.add_task("Запуски", total=len(tasks))
        if jobs <= 1:
            for task in tasks:
                results.append(await execute_run(task))
                progress.advance(bar)
        else:
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                futures = [loop.run_in_executor(executor, _execute_in_worker, task) for task in tasks]
                for future in futures:
                    future.add_done_callback(lambda _: progress.advance(bar))
                results = list(await asyncio.gather(*futures))

    completed = sum(1 for r in results if r["status"] == "ok")
    logger.info(f"Завершено {completed} з {len(results)} запусків")
    return results


async def load_reports(output_dir):
    """Читає всі звіти завершених запусків з `<out>/<grid>/<fold>-<seed>/`."""
    reports = []
    for root, _, files in sorted(os.walk(output_dir)):
        for name in sorted(files):
            if name.startswith(REPORT_PREFIX) and name.endswith(".json"):
                async with aiofiles.open(os.path.join(root, name), "r", encoding="utf-8") as f:
                    reports.append(RunReport.model_validate(json.loads(await f.read())))
    return reports


def count_failures(output_dir):
    return sum(FAILURE_FILE in files for _, _, files in os.walk(output_dir))


def similarity_files(output_dir, grid_hash):
    root = os.path.join(output_dir, grid_hash)
    if not os.path.isdir(root):
        return []
    return sorted(
        os.path.join(root, run, SIMILARITY_FILE) for run in os.listdir(root)
        if os.path.exists(os.path.join(root, run, SIMILARITY_FILE))
    )
