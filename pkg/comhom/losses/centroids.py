"""
Банк центроїдів комбінованих класів з експоненційним ковзним середнім.

Реальна та синтетична сторони зберігаються окремо (по 16 класів), щоб
майнінг `centroids` порівнював якір лише з центроїдами протилежної сторони.
"""

from dataclasses import dataclass

import numpy as np

from comhom.data.labels import N_COMBO, N_SINGLE

REAL = 0
SYNTHETIC = 1
SIDES = (REAL, SYNTHETIC)


@dataclass(frozen=True)
class CentroidBank:
    """Центроїди [2 сторони, 16 класів, K] та прапорці ініціалізації [2, 16]."""

    centroids: np.ndarray
    initialized: np.ndarray

    @classmethod
    def empty(cls, feature_dim=64):
        return cls(
            centroids=np.zeros((len(SIDES), N_COMBO, feature_dim), dtype=np.float64),
            initialized=np.zeros((len(SIDES), N_COMBO), dtype=bool),
        )

    def centroid(self, side, class_index):
        return self.centroids[side, class_index - N_SINGLE]

    def is_initialized(self, side, class_index):
        return bool(self.initialized[side, class_index - N_SINGLE])

    def initialized_classes(self, side):
        return [int(i) + N_SINGLE for i in np.flatnonzero(self.initialized[side])]


def update_centroids(bank, features, classes, side, momentum):
    """
    Оновлює центроїди однієї сторони середніми батчу.

    C ← M·C + (1 − M)·mean для ініціалізованих класів; перше спостереження
    класу встановлює C = mean.

    Args:
        bank (CentroidBank): Поточний банк (не змінюється).
        features (ndarray): [n, K] ознаки комбінованих жестів.
        classes (ndarray): [n] індекси класів 8..23.
        side (int): REAL або SYNTHETIC.
        momentum (float): M у [0, 1].

    Returns:
        CentroidBank: Новий банк.
    """
    centroids = bank.centroids.copy()
    initialized = bank.initialized.copy()
    classes = np.asarray(classes)
    for class_index in np.unique(classes):
        slot = int(class_index) - N_SINGLE
        batch_mean = features[classes == class_index].astype(np.float64).mean(axis=0)
        if initialized[side, slot]:
            centroids[side, slot] = momentum * centroids[side, slot] + (1 - momentum) * batch_mean
        else:
            centroids[side, slot] = batch_mean
            initialized[side, slot] = True
    return CentroidBank(centroids=centroids, initialized=initialized)
