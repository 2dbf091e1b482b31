"""
Тести для зведення звітів у таблиці.
"""

import os

import numpy as np
import pytest

from comhom.experiment.aggregate import (
    build_tables, format_mean_std, mean_confusions, render_tables, write_aggregates,
)
from comhom.experiment.config import GridPoint
from comhom.experiment.runner import RunReport
from comhom.losses.objective import LossToggles
from comhom.metrics.similarity import SimilaritySummary

POINT = GridPoint(heads="small", operator="mlp", triplet="basic", toggles=LossToggles(), snr_db=20.0)


def _report(mode, acc, seed=0, matching=0.2, algorithm="rf"):
    confusion = np.eye(24, 25, dtype=int) * 2
    return RunReport(
        fold=0, seed=seed, eval_subject=0, grid=POINT, grid_key=POINT.key, grid_hash=POINT.digest,
        mode=mode, algorithm=algorithm, acc_single=acc, acc_comb=acc, acc_all=acc,
        confusion=confusion.tolist(),
        similarity=SimilaritySummary(real_within=0.5, synth_within=0.6, matching=matching, non_matching=0.1),
        parameter_counts={"encoder": 1, "operator": 2, "heads": 3}, best_epoch=3, calib_size=10,
        test_split_hash="abc", wall_time_s=1.0,
    )


@pytest.fixture
def reports():
    return [
        _report("full", 0.4, seed=0, matching=0.05), _report("full", 0.6, seed=1),
        _report("partial", 0.3, seed=0), _report("partial", 0.3, seed=1),
        _report("augmented", 0.5, seed=0), _report("augmented", 0.5, seed=1),
    ]


def test_format_mean_std_uses_population_std():
    assert format_mean_std([0.4, 0.6]) == "0.50 ± 0.10"
    assert format_mean_std([0.3]) == "0.30 ± 0.00"


def test_modes_table_orders_and_aggregates(reports):
    """Режими йдуть у порядку partial, augmented, full; кожен рядок - середнє двох сідів."""
    tables = build_tables(reports)
    modes = tables["modes"]

    assert list(modes["mode"]) == ["partial", "augmented", "full"]
    assert list(modes["acc_all"]) == ["0.30 ± 0.00", "0.50 ± 0.00", "0.50 ± 0.10"]
    assert list(modes["runs"]) == [2, 2, 2]


def test_groups_are_never_merged(reports):
    extra = reports + [_report("full", 0.9, algorithm="knn")]
    classifiers = build_tables(extra)["classifiers"]
    assert len(classifiers) == 4
    assert classifiers.loc[classifiers["algorithm"] == "knn", "acc_all"].item() == "0.90 ± 0.00"


def test_similarity_table_counts_wins(reports):
    """Один рядок на (точка, фолд, сід): сід 0 має matching < non_matching."""
    similarity = build_tables(reports)["similarity"]
    row = similarity.iloc[0]
    assert row["runs"] == 2
    assert row["matching_gt_non_matching"] == "1/2"


def test_mean_confusions_are_row_normalized(reports):
    confusions = mean_confusions(reports)
    assert set(confusions) == {(POINT.digest, mode, "rf") for mode in ("full", "partial", "augmented")}
    frame = confusions[(POINT.digest, "full", "rf")]
    np.testing.assert_allclose(frame.to_numpy().sum(axis=1), 1.0)


async def test_write_aggregates_creates_files(reports, tmp_path):
    tables = await write_aggregates(str(tmp_path), reports)
    files = set(os.listdir(tmp_path / "aggregate"))
    assert {"modes.csv", "grid.csv", "classifiers.csv", "ablation.csv", "similarity.csv"} <= files
    assert f"confusion_{POINT.digest}_full_rf.csv" in files
    assert "--- modes ---" in render_tables(tables)
