"""
Модель набору даних: вікна сигналу з мітками та ідентифікаторами суб'єктів.

Набір зберігається колонками numpy (семпли, індекси компонентів, суб'єкти) і
не змінюється після створення; підмножини створюються через `subset`.
"""

from dataclasses import dataclass

import numpy as np

from comhom.common.exceptions import LabelError, ShapeError
from .labels import NO_DIR, NO_MOD, N_CLASSES, GestureLabel, class_indices

SAMPLE_RATE_HZ = 1926
CHANNELS = 8
WINDOW_SAMPLES = 963


@dataclass(frozen=True)
class Window:
    """Одне вікно сирого сигналу [channels, time] з міткою та суб'єктом."""

    samples: np.ndarray
    label: GestureLabel
    subject: int


class Dataset:
    """Впорядкована колекція вікон."""

    def __init__(self, samples, directions, modifiers, subjects, sample_rate_hz=SAMPLE_RATE_HZ):
        samples = np.asarray(samples, dtype=np.float32)
        directions = np.asarray(directions, dtype=np.int64)
        modifiers = np.asarray(modifiers, dtype=np.int64)
        subjects = np.asarray(subjects, dtype=np.int64)
        count = len(directions)
        if samples.ndim != 3 or samples.shape[0] != count or len(modifiers) != count or len(subjects) != count:
            raise ShapeError(
                f"Неузгоджені колонки набору: samples {list(samples.shape)}, мітки {count}, "
                f"модифікатори {len(modifiers)}, суб'єкти {len(subjects)}"
            )
        if np.any((directions == NO_DIR) & (modifiers == NO_MOD)):
            raise LabelError("Мітка (NoDir, NoMod) не може бути справжньою міткою набору")
        if np.any((directions < 0) | (directions > NO_DIR) | (modifiers < 0) | (modifiers > NO_MOD)):
            raise LabelError("Індекс компонента мітки поза словником")
        if not np.all(np.isfinite(samples)):
            raise ShapeError("Набір містить нескінченні значення")
        self.samples = samples
        self.directions = directions
        self.modifiers = modifiers
        self.subjects = subjects
        self.classes = class_indices(directions, modifiers)
        self.sample_rate_hz = sample_rate_hz

    @classmethod
    def empty(cls, channels=CHANNELS, window_samples=WINDOW_SAMPLES, sample_rate_hz=SAMPLE_RATE_HZ):
        return cls(np.zeros((0, channels, window_samples), dtype=np.float32), [], [], [], sample_rate_hz)

    def __len__(self):
        return len(self.directions)

    def __getitem__(self, index):
        return Window(
            samples=self.samples[index],
            label=GestureLabel.from_indices(self.directions[index], self.modifiers[index]),
            subject=int(self.subjects[index]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def channels(self):
        return self.samples.shape[1]

    @property
    def window_samples(self):
        return self.samples.shape[2]

    @property
    def labels(self):
        return [GestureLabel.from_indices(d, m) for d, m in zip(self.directions, self.modifiers)]

    def roster(self):
        """Відсортований список ідентифікаторів суб'єктів."""
        return sorted(int(s) for s in np.unique(self.subjects))

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.samples[indices], self.directions[indices], self.modifiers[indices],
            self.subjects[indices], self.sample_rate_hz,
        )

    def for_subjects(self, subject_ids):
        return self.subset(np.flatnonzero(np.isin(self.subjects, list(subject_ids))))

    def class_counts(self, subject=None):
        """Кількість вікон кожного з 24 класів (для суб'єкта або всього набору)."""
        classes = self.classes if subject is None else self.classes[self.subjects == subject]
        return np.bincount(classes, minlength=N_CLASSES)[:N_CLASSES]

    def class_members(self, class_index):
        return np.flatnonzero(self.classes == class_index)

    @staticmethod
    def concat(datasets):
        datasets = list(datasets)
        if not datasets:
            return Dataset.empty()
        return Dataset(
            np.concatenate([d.samples for d in datasets]),
            np.concatenate([d.directions for d in datasets]),
            np.concatenate([d.modifiers for d in datasets]),
            np.concatenate([d.subjects for d in datasets]),
            datasets[0].sample_rate_hz,
        )
