"""
Цей модуль містить набір допоміжних функцій (утиліт), що використовуються
в різних частинах проекту: атомарний запис файлів, збереження JSON з міткою
часу та хешування масивів.
"""

import hashlib
import json
import os
import uuid
from datetime import datetime, timezone

import aiofiles
from dateutil import tz
from loguru import logger
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential


def _log_retry_attempt(retry_state):
    """
    Функція для логування перед кожною повторною спробою запису.
    Використовується в `before_sleep` декоратора `@retry`.
    """
    logger.warning(
        f"Помилка запису, повторна спроба №{retry_state.attempt_number} через "
        f"{retry_state.next_action.sleep:.2f} секунд. Причина: {retry_state.outcome.exception()}"
    )


# Тимчасові збої файлової системи при записі результатів повторюються.
io_retry = retry(
    wait=wait_exponential(multiplier=0.1, min=0.1, max=2),
    stop=stop_after_attempt(5),
    retry=retry_if_exception_type(OSError),
    before_sleep=_log_retry_attempt,
    reraise=True,
)


@io_retry
async def write_atomic(path, content, mode='w'):
    """
    Атомарно записує вміст у файл: спершу у тимчасовий файл, потім `os.replace`.

    Args:
        path (str): Кінцевий шлях.
        content (str | bytes): Вміст.
        mode (str): 'w' для тексту або 'wb' для байтів.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp_path = f"{path}.{uuid.uuid4().hex}.tmp"
    kwargs = {} if 'b' in mode else {'encoding': 'utf-8'}
    try:
        async with aiofiles.open(tmp_path, mode, **kwargs) as f:
            await f.write(content)
        os.replace(tmp_path, path)
    finally:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)


def timestamp_now():
    """Повертає поточний локальний час у форматі звітів."""
    now_local = datetime.now(timezone.utc).astimezone(tz.tzlocal())
    return now_local.strftime('%d/%m/%Y %H:%M')


async def save_to_json(data, filename, with_timestamp=False):
    """
    Атомарно зберігає дані у файл формату JSON.

    Args:
        data: Дані для збереження (серіалізовні в JSON).
        filename (str): Назва файлу.
        with_timestamp (bool): Чи обгорнути дані полем `last_updated`.
    """
    if with_timestamp:
        data = {"last_updated": timestamp_now(), "data": data}
    await write_atomic(filename, json.dumps(data, indent=2, ensure_ascii=False))


async def save_frame_csv(frame, filename, index=False):
    """Атомарно зберігає pandas DataFrame у CSV."""
    await write_atomic(filename, frame.to_csv(index=index))


def hash_arrays(*arrays):
    """
    Обчислює SHA-256 від байтів масивів (разом з формами та типами).

    Використовується для перевірки, що тестова вибірка побайтово однакова
    для всіх режимів нагляду.
    """
    digest = hashlib.sha256()
    for array in arrays:
        digest.update(str(array.shape).encode())
        digest.update(str(array.dtype).encode())
        digest.update(array.tobytes())
    return digest.hexdigest()
