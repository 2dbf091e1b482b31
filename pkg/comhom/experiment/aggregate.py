"""
Зведення звітів запусків у таблиці "середнє ± стандартне відхилення".

Стандартне відхилення - популяційне (ddof=0). Різні ключі групування
ніколи не об'єднуються.
"""

import os

import numpy as np
import pandas as pd
from loguru import logger
from tabulate import tabulate

from comhom.common.utils import save_frame_csv
from comhom.data.labels import CLASS_NAMES, PREDICTION_NAMES
from comhom.metrics.accuracy import ConfusionMatrix
from .runner import similarity_files

MODE_ORDER = ["partial", "augmented", "full"]
ACCURACY_COLUMNS = ["acc_single", "acc_comb", "acc_all"]
SIMILARITY_COLUMNS = ["real_within", "synth_within", "matching", "non_matching"]

TABLE_KEYS = {
    "modes": ["grid_key", "algorithm", "mode"],
    "grid": ["heads", "operator", "triplet", "mode"],
    "classifiers": ["algorithm", "mode"],
    "ablation": ["toggles", "snr_db", "mode"],
}


def format_mean_std(values):
    values = np.asarray(values, dtype=np.float64)
    return f"{values.mean():.2f} ± {values.std(ddof=0):.2f}"


def reports_frame(reports):
    rows = []
    for report in reports:
        snr = report.grid.snr_db
        rows.append({
            "fold": report.fold, "seed": report.seed, "grid_key": report.grid_key, "grid_hash": report.grid_hash,
            "heads": report.grid.heads, "operator": report.grid.operator, "triplet": report.grid.triplet,
            "toggles": report.grid.toggles.label, "snr_db": "inf" if snr is None else f"{snr:g}",
            "mode": report.mode, "algorithm": report.algorithm,
            **{column: getattr(report, column) for column in ACCURACY_COLUMNS},
            **report.similarity.model_dump(),
        })
    frame = pd.DataFrame(rows)
    frame["mode"] = pd.Categorical(frame["mode"], categories=MODE_ORDER, ordered=True)
    return frame


def summarize(frame, keys, columns):
    """Групує за `keys` і форматує кожну колонку як `m ± s`; додає кількість запусків."""
    grouped = frame.groupby(keys, observed=True, sort=True)
    table = grouped[columns].agg(format_mean_std)
    table["runs"] = grouped.size()
    return table.reset_index()


def similarity_table(frame):
    """Підсумки M_Sim по точках сітки; один рядок на (точка, фолд, сід)."""
    runs = frame.drop_duplicates(["grid_hash", "fold", "seed"])
    table = summarize(runs, ["grid_key"], SIMILARITY_COLUMNS)
    wins = runs.assign(win=runs["matching"] > runs["non_matching"]).groupby("grid_key")["win"].sum()
    table["matching_gt_non_matching"] = [f"{int(wins[key])}/{n}" for key, n in zip(table["grid_key"], table["runs"])]
    return table


def build_tables(reports):
    frame = reports_frame(reports)
    tables = {name: summarize(frame, keys, ACCURACY_COLUMNS) for name, keys in TABLE_KEYS.items()}
    tables["similarity"] = similarity_table(frame)
    return tables


def mean_confusions(reports):
    """Середня нормована матриця невідповідностей для кожного (точка, режим, алгоритм)."""
    groups = {}
    for report in reports:
        key = (report.grid_hash, report.mode, report.algorithm)
        groups.setdefault(key, []).append(ConfusionMatrix(np.asarray(report.confusion)).normalized)
    return {
        key: pd.DataFrame(np.mean(matrices, axis=0), index=pd.Index(CLASS_NAMES, name="true"), columns=PREDICTION_NAMES)
        for key, matrices in groups.items()
    }


def mean_similarity(paths):
    frames = [pd.read_csv(path, index_col=0) for path in paths]
    return sum(frames[1:], frames[0]) / len(frames)


async def write_aggregates(output_dir, reports):
    """
    Записує таблиці у `<out>/aggregate/*.csv`.

    Returns:
        dict: Назва таблиці -> DataFrame.
    """
    target = os.path.join(output_dir, "aggregate")
    tables = build_tables(reports)
    for name, table in tables.items():
        await save_frame_csv(table, os.path.join(target, f"{name}.csv"))
    for (grid_hash, mode, algorithm), frame in mean_confusions(reports).items():
        await save_frame_csv(frame, os.path.join(target, f"confusion_{grid_hash}_{mode}_{algorithm}.csv"), index=True)
    for grid_hash in sorted({report.grid_hash for report in reports}):
        paths = similarity_files(output_dir, grid_hash)
        if paths:
            await save_frame_csv(mean_similarity(paths), os.path.join(target, f"similarity_{grid_hash}.csv"), index=True)
    logger.info(f"Зведені таблиці з {len(reports)} звітів записано у {target}")
    return tables


def render_tables(tables):
    parts = []
    for name, table in tables.items():
        parts.append(f"--- {name} ---")
        parts.append(tabulate(table, headers="keys", tablefmt="grid", showindex=False))
    return "\n\n".join(parts)
