"""
Цей модуль надає централізовані налаштування процесу та завантажувачі
конфігураційних JSON-документів.

Налаштування процесу (рівень логування, каталоги) читаються зі змінних
середовища з префіксом `COMHOM_` та з файлу `.env`. Документи експериментів
валідуються pydantic-моделями, тож невідомі ключі відхиляються одразу.
"""

import json
import os

import aiofiles
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigurationError

CONFIG_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..', 'configs'))


class Settings(BaseSettings):
    """Налаштування процесу, спільні для всіх підкоманд."""

    model_config = SettingsConfigDict(env_prefix="COMHOM_", env_file=".env", extra="ignore")

    log: str = "INFO"
    log_dir: str = "logs"
    output_dir: str = "out"


async def read_json(path):
    """
    Асинхронно читає JSON-документ.

    Raises:
        ConfigurationError: Якщо файл відсутній або містить некоректний JSON.
    """
    if not os.path.exists(path):
        raise ConfigurationError(f"Файл конфігурації не знайдено за шляхом: {path}")
    async with aiofiles.open(path, 'r', encoding='utf-8') as f:
        content = await f.read()
    try:
        return json.loads(content)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Помилка декодування JSON з {path}: {e}") from e


async def load_model(model_cls, path):
    """
    Завантажує JSON-документ і валідує його pydantic-моделлю.

    Args:
        model_cls: Клас pydantic-моделі (з `extra="forbid"`).
        path (str): Шлях до JSON-файлу.

    Returns:
        Екземпляр `model_cls`.

    Raises:
        ConfigurationError: Якщо документ не проходить валідацію.
    """
    raw = await read_json(path)
    try:
        return model_cls.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(f"Некоректна конфігурація у {path}:\n{e}") from e


# Єдиний екземпляр налаштувань, який імпортується в інші модулі.
settings = Settings()
