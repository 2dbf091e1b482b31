"""
Читання та запис набору даних у форматі каталогу.

Каталог містить `manifest.json`, а для кожного суб'єкта - `data_<id>.bin`
(little-endian float32, row-major [count, channels, window_samples]) та
`labels_<id>.csv` із заголовком `index,direction,modifier`.
"""

import csv
import io
import json
import os

import aiofiles
import numpy as np
from loguru import logger

from comhom.common.exceptions import DatasetLoadError, LabelError
from comhom.common.utils import write_atomic
from .dataset import CHANNELS, SAMPLE_RATE_HZ, WINDOW_SAMPLES, Dataset
from .labels import GestureLabel

SCHEMA_VERSION = 1
MANIFEST_FILE = "manifest.json"
LABELS_HEADER = ["index", "direction", "modifier"]
_LE_FLOAT32 = np.dtype('<f4')


async def _read(path, mode='r'):
    if not os.path.exists(path):
        raise DatasetLoadError(f"Файл не знайдено: {path}", path=path)
    kwargs = {} if 'b' in mode else {'encoding': 'utf-8'}
    async with aiofiles.open(path, mode, **kwargs) as f:
        return await f.read()


def _parse_labels(text, path, count):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != LABELS_HEADER:
        raise DatasetLoadError(f"Некоректний заголовок {header} у {path}", path=path)
    directions, modifiers = [], []
    for row_number, row in enumerate(reader):
        if not row:
            continue
        if len(row) != 3 or row[0].strip() != str(row_number):
            raise DatasetLoadError(f"Некоректний рядок {row_number} у {path}: {row}", path=path)
        try:
            label = GestureLabel.parse(row[1], row[2])
        except LabelError as e:
            raise DatasetLoadError(f"{e} у файлі {path}", path=path) from e
        if label.is_outlier:
            raise DatasetLoadError(f"Мітка (NoDir, NoMod) у рядку {row_number} файлу {path}", path=path)
        directions.append(label.direction.index)
        modifiers.append(label.modifier.index)
    if len(directions) != count:
        raise DatasetLoadError(f"{path}: оголошено {count} міток, знайдено {len(directions)}", path=path)
    return directions, modifiers


def _subject_entry(entry, manifest_path):
    try:
        return int(entry["id"]), int(entry["count"]), str(entry["data_file"]), str(entry["labels_file"])
    except (KeyError, TypeError, ValueError) as e:
        raise DatasetLoadError(f"Некоректний запис суб'єкта {entry!r} у {manifest_path}: {e!r}", path=manifest_path) from e


async def _read_manifest(path):
    manifest_path = os.path.join(path, MANIFEST_FILE)
    try:
        manifest = json.loads(await _read(manifest_path))
    except json.JSONDecodeError as e:
        raise DatasetLoadError(f"Помилка декодування JSON з {manifest_path}: {e}", path=manifest_path) from e
    if not isinstance(manifest, dict) or not isinstance(manifest.get("subjects", []), list):
        raise DatasetLoadError(f"Маніфест {manifest_path} має бути об'єктом зі списком 'subjects'", path=manifest_path)
    return manifest, manifest_path


async def load_roster(path):
    """Відсортовані ідентифікатори суб'єктів з маніфесту (без читання даних)."""
    manifest, manifest_path = await _read_manifest(path)
    return sorted({_subject_entry(entry, manifest_path)[0] for entry in manifest.get("subjects", [])})


async def load_dataset(path):
    """
    Завантажує набір даних з каталогу.

    Args:
        path (str): Каталог з `manifest.json`.

    Returns:
        Dataset: Завантажений набір (порожній, якщо список суб'єктів порожній).

    Raises:
        DatasetLoadError: Відсутній файл, невідповідність розміру/кількості
            або невідома мітка; повідомлення містить ім'я файлу.
    """
    manifest, manifest_path = await _read_manifest(path)
    try:
        channels = int(manifest.get("channels", CHANNELS))
        window_samples = int(manifest.get("window_samples", WINDOW_SAMPLES))
        sample_rate_hz = int(manifest.get("sample_rate_hz", SAMPLE_RATE_HZ))
    except (TypeError, ValueError) as e:
        raise DatasetLoadError(f"Некоректні розміри у {manifest_path}: {e}", path=manifest_path) from e
    subjects = manifest.get("subjects", [])
    if not subjects:
        logger.warning(f"Маніфест {manifest_path} не містить суб'єктів, повертаю порожній набір.")
        return Dataset.empty(channels, window_samples, sample_rate_hz)

    parts = []
    for entry in subjects:
        subject_id, count, data_file, labels_file = _subject_entry(entry, manifest_path)
        data_path = os.path.join(path, data_file)
        labels_path = os.path.join(path, labels_file)

        blob = await _read(data_path, 'rb')
        expected = count * channels * window_samples
        if len(blob) != expected * _LE_FLOAT32.itemsize:
            raise DatasetLoadError(
                f"{data_path}: очікувалось {expected} значень float32, знайдено {len(blob) // _LE_FLOAT32.itemsize}",
                path=data_path,
            )
        samples = np.frombuffer(blob, dtype=_LE_FLOAT32).astype(np.float32).reshape(count, channels, window_samples)
        directions, modifiers = _parse_labels(await _read(labels_path), labels_path, count)
        parts.append(Dataset(samples, directions, modifiers, np.full(count, subject_id), sample_rate_hz))
        logger.debug(f"Суб'єкт {subject_id}: завантажено {count} вікон з {data_path}")

    dataset = Dataset.concat(parts)
    logger.info(f"Завантажено {len(dataset)} вікон для {len(parts)} суб'єктів з {path}")
    return dataset


async def save_dataset(dataset, path):
    """Записує набір даних у формат каталогу (по одному блобу на суб'єкта)."""
    os.makedirs(path, exist_ok=True)
    entries = []
    for subject_id in dataset.roster():
        part = dataset.for_subjects([subject_id])
        data_file, labels_file = f"data_{subject_id}.bin", f"labels_{subject_id}.csv"
        await write_atomic(os.path.join(path, data_file), part.samples.astype(_LE_FLOAT32).tobytes(), mode='wb')

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(LABELS_HEADER)
        for i, label in enumerate(part.labels):
            writer.writerow([i, label.direction.value, label.modifier.value])
        await write_atomic(os.path.join(path, labels_file), buffer.getvalue())
        entries.append({"id": subject_id, "data_file": data_file, "labels_file": labels_file, "count": len(part)})

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "sample_rate_hz": dataset.sample_rate_hz,
        "channels": dataset.channels,
        "window_samples": dataset.window_samples,
        "subjects": entries,
    }
    await write_atomic(os.path.join(path, MANIFEST_FILE), json.dumps(manifest, indent=2))
    logger.info(f"Набір з {len(dataset)} вікон збережено у {path}")
