"""
Подібність у просторі ознак на основі RBF-ядра.

M_Sim - симетрична матриця 32 x 32: рядки/стовпці 0..15 - реальні
комбінації, 16..31 - синтетичні, обидві частини у порядку
"напрямок-старший".
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd
from pydantic import BaseModel
from scipy.spatial.distance import cdist

from comhom.common.exceptions import MetricError
from comhom.data.labels import CLASS_NAMES, COMBO_CLASSES, N_COMBO

DELTA = 1 / 128


def rbf_similarity(z1, z2, delta=DELTA):
    diff = np.asarray(z1, dtype=np.float64) - np.asarray(z2, dtype=np.float64)
    return float(np.exp(-delta * np.dot(diff, diff)))


def set_sim(z1, z2=None, delta=DELTA):
    """
    Середня RBF-подібність усіх пар між двома наборами.

    Якщо `z2` не задано, порівнюються різні елементи одного набору (діагональ
    виключається).

    Raises:
        MetricError: Порожній набір або набір з одного елемента у режимі одного набору.
    """
    z1 = np.asarray(z1, dtype=np.float64)
    if z2 is None:
        if len(z1) < 2:
            raise MetricError("Подібність у межах набору потребує щонайменше двох елементів")
        kernel = np.exp(-delta * cdist(z1, z1, "sqeuclidean"))
        n = len(z1)
        return float((kernel.sum() - np.trace(kernel)) / (n * (n - 1)))
    z2 = np.asarray(z2, dtype=np.float64)
    if len(z1) == 0 or len(z2) == 0:
        raise MetricError("Подібність наборів потребує непорожніх наборів")
    return float(np.exp(-delta * cdist(z1, z2, "sqeuclidean")).mean())


class SimilaritySummary(BaseModel):
    real_within: float
    synth_within: float
    matching: float
    non_matching: float


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray

    def summary(self):
        """Чотири регіональні середні: діагоналі, 16-та піддіагональ, решта під діагоналлю."""
        diagonal = np.diag(self.values)
        matching = np.array([self.values[N_COMBO + i, i] for i in range(N_COMBO)])
        rows, cols = np.tril_indices(2 * N_COMBO, k=-1)
        others = (rows - cols) != N_COMBO
        return SimilaritySummary(
            real_within=float(diagonal[:N_COMBO].mean()),
            synth_within=float(diagonal[N_COMBO:].mean()),
            matching=float(matching.mean()),
            non_matching=float(self.values[rows[others], cols[others]].mean()),
        )

    def to_frame(self):
        names = [f"real:{CLASS_NAMES[c]}" for c in COMBO_CLASSES] + [f"synth:{CLASS_NAMES[c]}" for c in COMBO_CLASSES]
        return pd.DataFrame(self.values, index=names, columns=names)


def _groups(features, classes, side):
    groups = []
    for class_index in COMBO_CLASSES:
        members = features[np.asarray(classes) == class_index]
        if len(members) < 2:
            raise MetricError(f"Клас {CLASS_NAMES[class_index]} ({side}) має менше двох елементів")
        groups.append(members)
    return groups


def similarity_matrix(real_features, real_classes, synth_features, synth_classes, delta=DELTA):
    """
    Будує M_Sim та його підсумок.

    Args:
        real_features (ndarray): Ознаки реальних комбінацій.
        real_classes (ndarray): Їхні індекси класів 8..23.
        synth_features (ndarray): Синтетичні ознаки (вже підвибрані до ліміту на клас).
        synth_classes (ndarray): Їхні індекси класів.
        delta (float): Параметр ядра.

    Returns:
        tuple: (SimilarityMatrix, SimilaritySummary).

    Raises:
        MetricError: Якщо якийсь із 16 класів відсутній з будь-якого боку.
    """
    groups = _groups(real_features, real_classes, "real") + _groups(synth_features, synth_classes, "synthetic")
    size = len(groups)
    values = np.zeros((size, size))
    for i in range(size):
        values[i, i] = set_sim(groups[i], delta=delta)
        for j in range(i):
            values[i, j] = values[j, i] = set_sim(groups[i], groups[j], delta)
    matrix = SimilarityMatrix(values)
    return matrix, matrix.summary()
