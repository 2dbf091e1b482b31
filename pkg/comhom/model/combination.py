"""
Оператор комбінування ознак C та CombineAllPairs.

Два варіанти: `avg` (поелементне середнє, без параметрів) та `mlp`
(MLP, обумовлений класом: [z_dir, one-hot(dir), z_mod, one-hot(mod)] -> 64).
Синтетична ознака отримує мітку (i, j) з активних компонентів входів.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from comhom.common.exceptions import LabelError
from comhom.data.labels import N_ACTIVE, NO_DIR, NO_MOD, GestureLabel
from comhom.nncore.layers import Dense, ReLU, Sequential
from comhom.nncore.tensor import ParameterSet

AVG = "avg"
MLP = "mlp"
MLP_HIDDEN = 85


class CombinationOperator(ABC):
    """Базовий клас оператора комбінування."""

    variant = None

    def __init__(self, params):
        self.params = params

    def parameter_count(self):
        return self.params.count()

    @abstractmethod
    def forward(self, z_dir, directions, z_mod, modifiers):
        """Комбінує рядки попарно; повертає (ознаки, кеш)."""

    @abstractmethod
    def backward(self, cache, dz):
        """Повертає (dz_dir, dz_mod) і накопичує градієнти параметрів."""


class AvgOperator(CombinationOperator):
    variant = AVG

    def __init__(self):
        super().__init__(ParameterSet())

    def forward(self, z_dir, directions, z_mod, modifiers):
        return (z_dir + z_mod) / 2, None

    def backward(self, cache, dz):
        return dz / 2, dz / 2


def _one_hot(indices, dtype):
    encoded = np.zeros((len(indices), N_ACTIVE), dtype=dtype)
    encoded[np.arange(len(indices)), indices] = 1
    return encoded


class MlpOperator(CombinationOperator):
    """MLP 136 -> 85 -> 64 з ReLU (17 149 параметрів при K=64)."""

    variant = MLP

    def __init__(self, graph, params, feature_dim):
        super().__init__(params)
        self.graph = graph
        self.feature_dim = feature_dim

    @classmethod
    def create(cls, rng, feature_dim=64, hidden=MLP_HIDDEN):
        graph = Sequential("operator", [
            Dense("hidden", 2 * (feature_dim + N_ACTIVE), hidden),
            ReLU("relu"),
            Dense("out", hidden, feature_dim),
        ])
        return cls(graph, ParameterSet(graph.init_params(rng)), feature_dim)

    def forward(self, z_dir, directions, z_mod, modifiers):
        x = np.concatenate([
            z_dir, _one_hot(directions, z_dir.dtype),
            z_mod, _one_hot(modifiers, z_mod.dtype),
        ], axis=1)
        return self.graph.forward(self.params, x)

    def backward(self, cache, dz):
        dx = self.graph.backward(self.params, cache, dz)
        k = self.feature_dim
        return dx[:, :k], dx[:, k + N_ACTIVE:2 * k + N_ACTIVE]


def make_operator(variant, rng, feature_dim=64):
    if variant == AVG:
        return AvgOperator()
    if variant == MLP:
        return MlpOperator.create(rng, feature_dim)
    raise LabelError(f"Невідомий варіант оператора: {variant}")


@dataclass(frozen=True)
class SyntheticFeature:
    features: np.ndarray
    label: GestureLabel


@dataclass(frozen=True)
class SyntheticSet:
    """Результат CombineAllPairs: ознаки, індекси компонентів та джерела пар."""

    features: np.ndarray
    directions: np.ndarray
    modifiers: np.ndarray
    direction_source: np.ndarray
    modifier_source: np.ndarray

    def __len__(self):
        return len(self.directions)

    @property
    def labels(self):
        return [GestureLabel.from_indices(d, m) for d, m in zip(self.directions, self.modifiers)]

    def subset(self, indices):
        return SyntheticSet(
            self.features[indices], self.directions[indices], self.modifiers[indices],
            self.direction_source[indices], self.modifier_source[indices],
        )


def _check_direction_single(label):
    if label.direction.index == NO_DIR or label.modifier.index != NO_MOD:
        raise LabelError(f"Очікувався одиночний жест напрямку, отримано {label}")


def _check_modifier_single(label):
    if label.modifier.index == NO_MOD or label.direction.index != NO_DIR:
        raise LabelError(f"Очікувався одиночний жест модифікатора, отримано {label}")


def combine(op, direction_item, modifier_item):
    """
    Комбінує одну пару (z_dir, y_dir), (z_mod, y_mod) у синтетичну ознаку.

    Raises:
        LabelError: Якщо y_dir не має форми (i, NoMod) або y_mod - (NoDir, j).
    """
    z_dir, y_dir = direction_item
    z_mod, y_mod = modifier_item
    _check_direction_single(y_dir)
    _check_modifier_single(y_mod)
    features, _ = op.forward(
        np.atleast_2d(z_dir), np.array([y_dir.direction.index]),
        np.atleast_2d(z_mod), np.array([y_mod.modifier.index]),
    )
    return SyntheticFeature(features=features[0], label=GestureLabel(y_dir.direction, y_mod.modifier))


def pair_indices(n_dir, n_mod):
    """Усі пари (i, j) у порядку "напрямок-старший"."""
    return np.repeat(np.arange(n_dir), n_mod), np.tile(np.arange(n_mod), n_dir)


def combine_pairs(op, z_dir, directions, z_mod, modifiers, dir_idx, mod_idx):
    """Диференційовна комбінація вибраних пар; повертає (ознаки, кеш)."""
    return op.forward(z_dir[dir_idx], directions[dir_idx], z_mod[mod_idx], modifiers[mod_idx])


def combine_pairs_backward(op, cache, dz, dir_idx, mod_idx, n_dir, n_mod):
    """Розносить градієнт синтетичних ознак назад на вхідні одиночні ознаки."""
    dz_dir_pairs, dz_mod_pairs = op.backward(cache, dz)
    dz_dir = np.zeros((n_dir, dz.shape[1]), dtype=dz.dtype)
    dz_mod = np.zeros((n_mod, dz.shape[1]), dtype=dz.dtype)
    np.add.at(dz_dir, dir_idx, dz_dir_pairs)
    np.add.at(dz_mod, mod_idx, dz_mod_pairs)
    return dz_dir, dz_mod


def combine_all_pairs(op, z_dir, directions, z_mod, modifiers):
    """
    CombineAllPairs: застосовує оператор до кожної пари (напрямок, модифікатор).

    Args:
        op (CombinationOperator): Оператор.
        z_dir (ndarray): [n_dir, K] ознаки одиночних жестів напрямку.
        directions (ndarray): [n_dir] індекси напрямків (0..3).
        z_mod (ndarray): [n_mod, K] ознаки одиночних жестів модифікатора.
        modifiers (ndarray): [n_mod] індекси модифікаторів (0..3).

    Returns:
        SyntheticSet: n_dir·n_mod елементів у порядку "напрямок-старший".
    """
    directions = np.asarray(directions, dtype=np.int64)
    modifiers = np.asarray(modifiers, dtype=np.int64)
    if len(directions) == 0 or len(modifiers) == 0:
        raise LabelError("CombineAllPairs потребує непорожніх наборів напрямків і модифікаторів")
    if np.any((directions < 0) | (directions >= N_ACTIVE)) or np.any((modifiers < 0) | (modifiers >= N_ACTIVE)):
        raise LabelError("CombineAllPairs приймає лише активні компоненти (без NoDir/NoMod)")
    dir_idx, mod_idx = pair_indices(len(directions), len(modifiers))
    features, _ = combine_pairs(op, z_dir, directions, z_mod, modifiers, dir_idx, mod_idx)
    return SyntheticSet(features, directions[dir_idx], modifiers[mod_idx], dir_idx, mod_idx)
