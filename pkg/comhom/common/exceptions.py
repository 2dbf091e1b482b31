"""
Цей модуль визначає кастомні класи винятків для проекту.

Використання власних винятків дозволяє більш точно обробляти помилки,
специфічні для логіки конвеєра: конфігурація, чисельні збої, завантаження
даних, мітки жестів, розбиття, навчання класифікаторів та метрики.
"""


class ComhomException(Exception):
    """Базовий виняток для всіх помилок пакета `comhom`."""
    pass


class ConfigurationError(ComhomException):
    """Виняток для некоректної конфігурації (CLI повертає код 2)."""
    pass


class ShapeError(ConfigurationError):
    """Виняток, що виникає, коли форма тензора не відповідає очікуваній."""
    pass


class NumericError(ComhomException):
    """Виняток для нескінченних або NaN значень.

    Атрибути:
        layer (str | None): Назва шару, на межі якого виявлено проблему.
        context (dict): Додаткова діагностика (епоха, крок, значення доданків втрат).
    """

    def __init__(self, message, layer=None, context=None):
        super().__init__(message)
        self.layer = layer
        self.context = dict(context or {})


class DatasetLoadError(ComhomException):
    """Виняток при завантаженні набору даних; містить шлях до проблемного файлу."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class LabelError(ComhomException):
    """Виняток для невідомих міток або порушення передумов `combine`."""
    pass


class SplitError(ComhomException):
    """Виняток для некоректного розбиття (fold поза діапазоном, замало суб'єктів)."""
    pass


class DegenerateFitError(ComhomException):
    """Виняток, коли голова класифікатора отримує цілі лише одного класу."""
    pass


class MetricError(ComhomException):
    """Виняток, коли метрику неможливо обчислити (відсутній клас, замалий набір)."""
    pass
