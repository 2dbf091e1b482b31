"""
Стратифіковані батчі для попереднього навчання.

Кожен батч містить однакову кількість вікон кожного з 24 класів. У межах
епохи вікна класу вибираються без повторень; коли клас вичерпано, він
просто відсутній у решті батчів епохи.
"""

from dataclasses import dataclass

import numpy as np

from comhom.common.exceptions import ConfigurationError
from comhom.data.labels import CLASS_NAMES, N_CLASSES
from comhom.data.noise import inject_noise_per_class


@dataclass(frozen=True)
class Batch:
    samples: np.ndarray
    directions: np.ndarray
    modifiers: np.ndarray
    classes: np.ndarray
    indices: np.ndarray

    def __len__(self):
        return len(self.indices)


def check_composition(dataset, per_class):
    """
    Raises:
        ConfigurationError: Якщо якийсь клас має менше `per_class` прикладів.
    """
    counts = dataset.class_counts()
    short = [CLASS_NAMES[c] for c in range(N_CLASSES) if counts[c] < per_class]
    if short:
        raise ConfigurationError(
            f"Замало прикладів для батчу по {per_class} на клас: {', '.join(short)}"
        )


def assemble_batch(dataset, indices, snr_db, rng):
    """Збирає вікна за індексами та додає шум окремо для кожного класу."""
    indices = np.asarray(indices, dtype=np.int64)
    classes = dataset.classes[indices]
    samples = inject_noise_per_class(dataset.samples[indices], classes, snr_db, rng)
    return Batch(samples, dataset.directions[indices], dataset.modifiers[indices], classes, indices)


def make_batch(dataset, per_class, snr_db, rng):
    """
    Один стратифікований батч: `per_class` вікон кожного класу без повторень.

    Args:
        dataset (Dataset): D_pre.
        per_class (int): Кількість прикладів на клас.
        snr_db (float | None): SNR шуму; None - сирі вікна.
        rng (numpy.random.Generator): Потік вибору та шуму.

    Returns:
        Batch: 24·per_class вікон.
    """
    check_composition(dataset, per_class)
    chosen = [
        rng.choice(dataset.class_members(c), size=per_class, replace=False)
        for c in range(N_CLASSES)
    ]
    return assemble_batch(dataset, np.concatenate(chosen), snr_db, rng)


def epoch_batches(dataset, per_class, snr_db, rng, max_steps=None):
    """Генерує батчі однієї епохи; останні батчі можуть бути неповними."""
    members = [rng.permutation(dataset.class_members(c)) for c in range(N_CLASSES)]
    longest = max((len(m) for m in members), default=0)
    steps = int(np.ceil(longest / per_class))
    if max_steps is not None:
        steps = min(steps, max_steps)
    for step in range(steps):
        indices = np.concatenate([m[step * per_class:(step + 1) * per_class] for m in members])
        if indices.size == 0:
            break
        yield assemble_batch(dataset, indices, snr_db, rng)
