"""
Чекпоінти параметрів.

Формат: текстовий маніфест `manifest.txt` з рядками `ключ=значення`
(метадані та опис кожного параметра) і окремий бінарний файл на параметр
з little-endian float32 у row-major порядку.
"""

import os

import aiofiles
import numpy as np

from comhom.common.exceptions import DatasetLoadError
from comhom.common.utils import write_atomic
from .tensor import Parameter, ParameterSet

MANIFEST_NAME = "manifest.txt"
_LE_FLOAT32 = np.dtype('<f4')


def _blob_name(name):
    return f"{name}.bin"


async def save_checkpoint(params, directory, metadata=None):
    """
    Зберігає параметри у каталог чекпоінта.

    Args:
        params (ParameterSet): Параметри для збереження.
        directory (str): Каталог (створюється за потреби).
        metadata (dict, optional): Плоскі метадані (значення без переносів рядка).
    """
    os.makedirs(directory, exist_ok=True)
    lines = ["format=comhom-checkpoint-v1", f"parameter_count={len(params)}"]
    for key, value in sorted((metadata or {}).items()):
        lines.append(f"meta.{key}={value}")
    for name, param in params:
        shape = "x".join(str(d) for d in param.value.shape) or "scalar"
        lines.append(f"param.{name}=shape:{shape};dtype:float32;file:{_blob_name(name)}")
        await write_atomic(os.path.join(directory, _blob_name(name)), param.value.astype(_LE_FLOAT32).tobytes(), mode='wb')
    await write_atomic(os.path.join(directory, MANIFEST_NAME), "\n".join(lines) + "\n")


def _parse_manifest(text, path):
    metadata, specs = {}, {}
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if "=" not in line:
            raise DatasetLoadError(f"Некоректний рядок маніфесту: {line!r}", path=path)
        key, value = line.split("=", 1)
        if key.startswith("meta."):
            metadata[key[len("meta."):]] = value
        elif key.startswith("param."):
            fields = dict(item.split(":", 1) for item in value.split(";"))
            shape = () if fields["shape"] == "scalar" else tuple(int(d) for d in fields["shape"].split("x"))
            specs[key[len("param."):]] = (shape, fields["file"])
    return metadata, specs


async def load_checkpoint(directory):
    """
    Завантажує чекпоінт.

    Returns:
        tuple: (ParameterSet, метадані dict).

    Raises:
        DatasetLoadError: Якщо файл відсутній або розмір блоба не збігається з формою.
    """
    manifest_path = os.path.join(directory, MANIFEST_NAME)
    if not os.path.exists(manifest_path):
        raise DatasetLoadError(f"Маніфест чекпоінта не знайдено: {manifest_path}", path=manifest_path)
    async with aiofiles.open(manifest_path, 'r', encoding='utf-8') as f:
        metadata, specs = _parse_manifest(await f.read(), manifest_path)

    params = ParameterSet()
    for name, (shape, filename) in specs.items():
        blob_path = os.path.join(directory, filename)
        if not os.path.exists(blob_path):
            raise DatasetLoadError(f"Файл параметра не знайдено: {blob_path}", path=blob_path)
        async with aiofiles.open(blob_path, 'rb') as f:
            blob = await f.read()
        values = np.frombuffer(blob, dtype=_LE_FLOAT32)
        if values.size != int(np.prod(shape)):
            raise DatasetLoadError(f"Розмір {blob_path} не відповідає формі {shape}", path=blob_path)
        params.add(name, Parameter(values.astype(np.float32).reshape(shape)))
    return params, metadata
