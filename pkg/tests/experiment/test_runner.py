# -*- coding: utf-8 -*-
"""
Тести для виконання протоколу LOSO на крихітній синтетичній когорті.
"""

import json
import os

import pytest

from comhom.common.exceptions import ConfigurationError
from comhom.data.io import load_roster
from comhom.experiment.config import ExperimentConfig
from comhom.experiment.runner import (
    FAILURE_FILE, SYNTH_DIGEST_FILE, build_tasks, count_failures, load_reports, prepare_dataset, run_experiment,
    similarity_files, synth_digest,
)


@pytest.fixture
def tiny_config():
    return ExperimentConfig.model_validate({
        "name": "tiny",
        "synth": {"subjects": 3, "singles_per_class": 3, "combos_per_class": 3, "window_samples": 32},
        "folds": [0],
        "seeds": [0],
        "downstream": [{"algorithm": "knn", "n_neighbors": 1}],
        "pretrain": {
            "max_epochs": 1, "steps_per_epoch": 1,
            "encoder": {"stem_channels": 4, "width": 6, "feature_dim": 6},
        },
        "n_synth_per_class": 5,
    })


def test_tasks_cover_grid_folds_and_seeds(tiny_config):
    config = tiny_config.model_copy(update={"folds": [0, 1], "seeds": [0, 1, 2]})
    tasks = build_tasks(config, "data", "out")
    assert len(tasks) == 6
    assert tasks[0].run_dir == os.path.join("out", tasks[0].point.digest, "0-0")


async def test_run_writes_three_mode_reports(tiny_config, tmp_path):
    """
    Один запуск дає звіти трьох режимів на однаковій тестовій вибірці,
    а також бандл, трасування та матрицю подібності.
    """
    # Act
    results = await run_experiment(tiny_config, str(tmp_path))
    reports = await load_reports(str(tmp_path))

    # Assert
    assert [r["status"] for r in results] == ["ok"]
    assert sorted(r.mode for r in reports) == ["augmented", "full", "partial"]
    assert len({r.test_split_hash for r in reports}) == 1
    by_mode = {r.mode: r for r in reports}
    assert by_mode["partial"].calib_size == 8 * 2
    assert by_mode["full"].calib_size == 24 * 2
    assert by_mode["augmented"].calib_size == 8 * 2 + 16 * 4
    run_dir = tmp_path / reports[0].grid_hash / "0-0"
    assert (run_dir / "bundle" / "bundle.json").exists()
    assert (run_dir / "trace.csv").exists()
    assert similarity_files(str(tmp_path), reports[0].grid_hash) == [str(run_dir / "similarity.csv")]
    assert json.loads((tmp_path / "experiment.json").read_text(encoding="utf-8"))["data"]["name"] == "tiny"


async def test_runs_are_reproducible(tiny_config, tmp_path):
    """Однакова конфігурація дає однакові звіти (без урахування часу виконання)."""
    await run_experiment(tiny_config, str(tmp_path / "a"))
    await run_experiment(tiny_config, str(tmp_path / "b"))

    first = [r.fingerprint() for r in await load_reports(str(tmp_path / "a"))]
    second = [r.fingerprint() for r in await load_reports(str(tmp_path / "b"))]

    assert first == second


async def test_failed_run_is_recorded(tiny_config, tmp_path, mocker):
    """Помилка одного запуску записується у failure.json і не зупиняє експеримент."""
    # Arrange
    mocker.patch("comhom.experiment.runner.pretrain", side_effect=RuntimeError("збій"))

    # Act
    results = await run_experiment(tiny_config, str(tmp_path))

    # Assert
    assert results[0]["status"] == "failed"
    assert count_failures(str(tmp_path)) == 1
    run_dir = build_tasks(tiny_config, "", str(tmp_path))[0].run_dir
    with open(os.path.join(run_dir, FAILURE_FILE), encoding="utf-8") as f:
        failure = json.load(f)
    assert "RuntimeError" in failure["error"]


async def test_cached_cohort_is_reused_only_for_same_spec(tiny_config, tmp_path):
    """Когорта у `<out>/dataset` генерується заново, якщо змінилась специфікація або сід."""
    # Arrange
    path = await prepare_dataset(tiny_config, str(tmp_path))
    marker = tmp_path / "dataset" / "marker.txt"
    marker.write_text("old")
    bigger = tiny_config.model_copy(update={"synth": tiny_config.synth.model_copy(update={"subjects": 4})})

    # Act
    same = await prepare_dataset(tiny_config, str(tmp_path))
    kept = marker.exists()
    await prepare_dataset(bigger, str(tmp_path))

    # Assert
    assert same == path
    assert kept
    assert not marker.exists()
    assert await load_roster(path) == [0, 1, 2, 3]
    stored = json.loads((tmp_path / "dataset" / SYNTH_DIGEST_FILE).read_text(encoding="utf-8"))
    assert stored["digest"] == synth_digest(bigger) != synth_digest(tiny_config)


async def test_cohort_without_digest_is_regenerated(tiny_config, tmp_path):
    """Старий каталог без відбитка не вважається актуальним."""
    # Arrange
    path = await prepare_dataset(tiny_config, str(tmp_path))
    os.remove(os.path.join(path, SYNTH_DIGEST_FILE))
    reseeded = tiny_config.model_copy(update={"synth_seed": 7})

    # Act
    await prepare_dataset(reseeded, str(tmp_path))

    # Assert
    stored = json.loads((tmp_path / "dataset" / SYNTH_DIGEST_FILE).read_text(encoding="utf-8"))
    assert stored == {"digest": synth_digest(reseeded), "synth_seed": 7}


async def test_stale_reports_are_removed_before_run(tiny_config, tmp_path, mocker):
    """Звіти попереднього запуску в тому ж каталозі не змішуються з новими."""
    # Arrange
    run_dir = build_tasks(tiny_config, "", str(tmp_path))[0].run_dir
    os.makedirs(run_dir)
    with open(os.path.join(run_dir, "report_partial_rf.json"), "w", encoding="utf-8") as f:
        f.write("{}")
    mocker.patch("comhom.experiment.runner.pretrain", side_effect=RuntimeError("збій"))

    # Act
    await run_experiment(tiny_config, str(tmp_path))

    # Assert
    assert not os.path.exists(os.path.join(run_dir, "report_partial_rf.json"))
    assert await load_reports(str(tmp_path)) == []
    assert count_failures(str(tmp_path)) == 1


async def test_fold_outside_roster_is_configuration_error(tiny_config, tmp_path, mocker):
    """Фолд 3 при трьох суб'єктах відхиляється до початку запусків."""
    # Arrange
    config = tiny_config.model_copy(update={"folds": [0, 3]})
    execute = mocker.patch("comhom.experiment.runner.execute_run")

    # Act / Assert
    with pytest.raises(ConfigurationError, match=r"\[3\]"):
        await run_experiment(config, str(tmp_path))
    execute.assert_not_called()
