"""
Майнінг трійок між реальними та синтетичними комбінованими ознаками і
триплетна втрата з квадратом евклідової відстані.

Якорями є всі реальні та всі синтетичні комбіновані ознаки батчу. Для
реального якоря позитив і негатив беруться із синтетичних ознак, для
синтетичного - з реальних. Пул індексів: спершу реальні (0..n_real-1), потім
синтетичні.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from comhom.common.exceptions import ConfigurationError
from .centroids import REAL, SYNTHETIC

BASIC = "basic"
HARD = "hard"
CENTROIDS = "centroids"


class TripletConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variant: Literal["basic", "hard", "centroids"] = BASIC
    margin: float = Field(1.0, gt=0)
    triplets_per_anchor: int = Field(3, ge=1)
    momentum: float = Field(0.9, ge=0, le=1)


@dataclass(frozen=True)
class TripletSet:
    """
    Трійки як індекси у пулі [реальні; синтетичні].

    Для варіанту `centroids` позитиви/негативи задані векторами центроїдів
    (`positive_vectors`, `negative_vectors`), а індекси дорівнюють -1.
    """

    anchors: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray
    anchor_is_real: np.ndarray
    n_real: int
    skipped_anchors: int = 0
    positive_vectors: np.ndarray = None
    negative_vectors: np.ndarray = None

    def __len__(self):
        return len(self.anchors)

    @property
    def uses_centroids(self):
        return self.positive_vectors is not None

    def gather(self, pool):
        anchor = pool[self.anchors]
        positive = self.positive_vectors.astype(pool.dtype) if self.uses_centroids else pool[self.positives]
        negative = self.negative_vectors.astype(pool.dtype) if self.uses_centroids else pool[self.negatives]
        return anchor, positive, negative

    def scatter(self, pool_size, d_anchor, d_positive, d_negative):
        """Збирає градієнти трійок назад у форму пулу; центроїди градієнта не отримують."""
        grad = np.zeros((pool_size, d_anchor.shape[1]), dtype=d_anchor.dtype)
        np.add.at(grad, self.anchors, d_anchor)
        if not self.uses_centroids:
            np.add.at(grad, self.positives, d_positive)
            np.add.at(grad, self.negatives, d_negative)
        return grad


@dataclass(frozen=True)
class TripletLoss:
    value: float
    d_anchor: np.ndarray
    d_positive: np.ndarray
    d_negative: np.ndarray
    empty: bool = False
    active: int = 0


def squared_distances(a, b):
    diff = a - b
    return np.einsum("ij,ij->i", diff, diff)


def _empty_set(n_real, skipped, feature_dim, with_vectors=False):
    empty = np.zeros(0, dtype=np.int64)
    vectors = np.zeros((0, feature_dim)) if with_vectors else None
    return TripletSet(empty, empty, empty, np.zeros(0, dtype=bool), n_real, skipped, vectors, vectors)


def mine_triplets(config, real_features, real_classes, synth_features, synth_classes, bank, rng):
    """
    Формує трійки за вибраним варіантом.

    Args:
        config (TripletConfig): Варіант, N, M.
        real_features (ndarray): [R, K] реальні комбіновані ознаки.
        real_classes (ndarray): [R] індекси класів 8..23.
        synth_features (ndarray): [S, K] синтетичні ознаки.
        synth_classes (ndarray): [S] індекси класів.
        bank (CentroidBank | None): Центроїди (потрібні для `centroids`).
        rng (numpy.random.Generator): Потік для `basic` та вибору негативного центроїда.

    Returns:
        TripletSet: Трійки; якорі без кандидатів пропускаються і рахуються у `skipped_anchors`.
    """
    real_classes = np.asarray(real_classes)
    synth_classes = np.asarray(synth_classes)
    n_real, n_synth = len(real_classes), len(synth_classes)
    if n_real == 0 or n_synth == 0:
        raise ConfigurationError("Майнінг трійок потребує хоча б однієї реальної та однієї синтетичної ознаки")
    if config.variant == CENTROIDS and bank is None:
        raise ConfigurationError("Варіант 'centroids' потребує банку центроїдів")

    pool_classes = np.concatenate([real_classes, synth_classes])
    pool = np.concatenate([real_features, synth_features])
    anchors, positives, negatives, anchor_is_real = [], [], [], []
    positive_vectors, negative_vectors = [], []
    skipped = 0

    for anchor in range(n_real + n_synth):
        is_real = anchor < n_real
        cls = pool_classes[anchor]
        if is_real:
            candidates = np.arange(n_real, n_real + n_synth)
        else:
            candidates = np.arange(n_real)
        candidate_classes = pool_classes[candidates]
        pos_candidates = candidates[candidate_classes == cls]
        neg_candidates = candidates[candidate_classes != cls]

        if config.variant == CENTROIDS:
            other_side = SYNTHETIC if is_real else REAL
            negative_classes = [c for c in bank.initialized_classes(other_side) if c != cls]
            if not bank.is_initialized(other_side, cls) or not negative_classes:
                skipped += 1
                continue
            anchors.append(anchor)
            anchor_is_real.append(is_real)
            positive_vectors.append(bank.centroid(other_side, cls))
            negative_vectors.append(bank.centroid(other_side, negative_classes[rng.integers(len(negative_classes))]))
            continue

        if pos_candidates.size == 0 or neg_candidates.size == 0:
            skipped += 1
            continue

        if config.variant == HARD:
            pos_dist = squared_distances(pool[anchor], pool[pos_candidates])
            neg_dist = squared_distances(pool[anchor], pool[neg_candidates])
            chosen_pos = [pos_candidates[int(np.argmax(pos_dist))]]
            chosen_neg = [neg_candidates[int(np.argmin(neg_dist))]]
        else:
            k = min(config.triplets_per_anchor, pos_candidates.size, neg_candidates.size)
            chosen_pos = rng.choice(pos_candidates, size=k, replace=False)
            chosen_neg = rng.choice(neg_candidates, size=k, replace=False)

        anchors.extend([anchor] * len(chosen_pos))
        anchor_is_real.extend([is_real] * len(chosen_pos))
        positives.extend(int(p) for p in chosen_pos)
        negatives.extend(int(n) for n in chosen_neg)

    if skipped:
        logger.debug(f"Майнінг трійок: пропущено {skipped} якорів без кандидатів")
    if not anchors:
        return _empty_set(n_real, skipped, pool.shape[1], with_vectors=config.variant == CENTROIDS)

    if config.variant == CENTROIDS:
        none = np.full(len(anchors), -1, dtype=np.int64)
        return TripletSet(
            np.array(anchors, dtype=np.int64), none, none, np.array(anchor_is_real), n_real, skipped,
            np.array(positive_vectors), np.array(negative_vectors),
        )
    return TripletSet(
        np.array(anchors, dtype=np.int64), np.array(positives, dtype=np.int64),
        np.array(negatives, dtype=np.int64), np.array(anchor_is_real), n_real, skipped,
    )


def triplet_loss(anchor, positive, negative, margin):
    """
    Середнє max(d(a,p) − d(a,n) + γ, 0) з d - квадрат евклідової відстані.

    Returns:
        TripletLoss: Значення та градієнти за a, p, n; для порожнього
            списку - нуль із прапорцем `empty`.
    """
    if len(anchor) == 0:
        logger.debug("Порожній список трійок: внесок триплетної втрати 0")
        zeros = np.zeros_like(anchor)
        return TripletLoss(0.0, zeros, zeros.copy(), zeros.copy(), empty=True)
    count = len(anchor)
    hinge = squared_distances(anchor, positive) - squared_distances(anchor, negative) + margin
    active = (hinge > 0).astype(anchor.dtype)[:, None]
    value = float(np.maximum(hinge, 0).mean())
    scale = 2 * active / count
    d_anchor = scale * (negative - positive)
    d_positive = -scale * (anchor - positive)
    d_negative = scale * (anchor - negative)
    return TripletLoss(value, d_anchor, d_positive, d_negative, active=int(active.sum()))
