"""
Повна цільова функція попереднього навчання: триплетна втрата плюс
крос-ентропія голів на реальних і синтетичних ознаках.
"""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from comhom.common.exceptions import ConfigurationError, NumericError
from comhom.nncore.objectives import softmax_cross_entropy
from .triplets import triplet_loss

TERMS = ("triplet", "ce_real", "ce_synth")


class LossToggles(BaseModel):
    """Перемикачі та ваги трьох доданків (ваги за замовчуванням одиничні)."""

    model_config = ConfigDict(extra="forbid")

    triplet: bool = True
    ce_real: bool = True
    ce_synth: bool = True
    triplet_weight: float = Field(1.0, ge=0)
    ce_real_weight: float = Field(1.0, ge=0)
    ce_synth_weight: float = Field(1.0, ge=0)

    def enabled_terms(self):
        return [term for term in TERMS if getattr(self, term)]

    def weight(self, term):
        return getattr(self, f"{term}_weight")

    def require_any(self):
        if not self.enabled_terms():
            raise ConfigurationError("Усі доданки втрати вимкнено: увімкніть хоча б один")
        return self

    @property
    def label(self):
        return "+".join(self.enabled_terms()) or "none"


@dataclass(frozen=True)
class FeatureBatch:
    features: np.ndarray
    directions: np.ndarray
    modifiers: np.ndarray

    def __len__(self):
        return len(self.directions)


@dataclass(frozen=True)
class TripletTerms:
    """Триплетна втрата з градієнтами, розкладеними на реальні комбо та синтетичні ознаки."""

    value: float
    d_real_combos: np.ndarray
    d_synth: np.ndarray
    empty: bool
    count: int
    skipped_anchors: int


@dataclass(frozen=True)
class LossBreakdown:
    total: float
    triplet: float
    ce_real: float
    ce_synth: float
    d_real: np.ndarray
    d_synth: np.ndarray
    triplet_empty: bool = False

    def as_dict(self):
        return {"total": self.total, "triplet": self.triplet, "ce_real": self.ce_real, "ce_synth": self.ce_synth}


def triplet_terms(triplets, real_combo_features, synth_features, margin):
    pool = np.concatenate([real_combo_features, synth_features])
    result = triplet_loss(*triplets.gather(pool), margin)
    d_pool = triplets.scatter(len(pool), result.d_anchor, result.d_positive, result.d_negative)
    n_real = len(real_combo_features)
    return TripletTerms(
        value=result.value, d_real_combos=d_pool[:n_real], d_synth=d_pool[n_real:],
        empty=result.empty, count=len(triplets), skipped_anchors=triplets.skipped_anchors,
    )


def heads_cross_entropy(heads, batch, compute_grads=True, weight=1.0):
    """
    Крос-ентропія голів напрямку та модифікатора, усереднена між двома головами.

    Args:
        weight (float): Вага доданка; масштабує градієнти голів і dL/dz, але не втрату.

    Returns:
        tuple: (втрата, weight·dL/dz); градієнти параметрів голів накопичуються, якщо `compute_grads`.
    """
    if len(batch) == 0:
        return 0.0, np.zeros_like(batch.features)
    (dir_logits, mod_logits), cache = heads.forward(batch.features)
    dir_loss, d_dir = softmax_cross_entropy(dir_logits, batch.directions)
    mod_loss, d_mod = softmax_cross_entropy(mod_logits, batch.modifiers)
    loss = (dir_loss + mod_loss) / 2
    if not compute_grads:
        return loss, None
    scale = weight / 2
    return loss, heads.backward(cache, scale * d_dir, scale * d_mod)


def total_loss(real, synth, heads, triplets, toggles, real_combo_rows=None, compute_grads=True):
    """
    Сума увімкнених доданків: L_triplet + L_ce (реальні) + L̃_ce (синтетичні).

    Args:
        real (FeatureBatch): Усі реальні ознаки батчу (одиночні та комбо).
        synth (FeatureBatch): Синтетичні ознаки з CombineAllPairs.
        heads (PretrainHeads): Голови G^Pre.
        triplets (TripletTerms | None): Результат `triplet_terms` або None.
        toggles (LossToggles): Перемикачі та ваги.
        real_combo_rows (ndarray | None): Рядки `real`, з яких утворено реальну
            частину пулу трійок.
        compute_grads (bool): False для оцінювання на валідації.

    Returns:
        LossBreakdown: Значення доданків та градієнти за реальними й синтетичними ознаками.

    Raises:
        ConfigurationError: Якщо всі доданки вимкнено.
        NumericError: Якщо сумарна втрата нескінченна.
    """
    toggles.require_any()
    d_real = np.zeros_like(real.features)
    d_synth = np.zeros_like(synth.features)
    values = {term: 0.0 for term in TERMS}
    triplet_empty = False

    if toggles.triplet and triplets is not None:
        weight = toggles.weight("triplet")
        values["triplet"] = triplets.value
        triplet_empty = triplets.empty
        if compute_grads:
            np.add.at(d_real, real_combo_rows, weight * triplets.d_real_combos)
            d_synth += weight * triplets.d_synth

    if toggles.ce_real:
        values["ce_real"], d_z = heads_cross_entropy(heads, real, compute_grads, toggles.weight("ce_real"))
        if compute_grads:
            d_real += d_z

    if toggles.ce_synth:
        values["ce_synth"], d_z = heads_cross_entropy(heads, synth, compute_grads, toggles.weight("ce_synth"))
        if compute_grads:
            d_synth += d_z

    total = sum(toggles.weight(term) * values[term] for term in toggles.enabled_terms())
    if not np.isfinite(total):
        raise NumericError("Нескінченна сумарна втрата", layer="total_loss", context=dict(values))
    return LossBreakdown(
        total=float(total), triplet=values["triplet"], ce_real=values["ce_real"], ce_synth=values["ce_synth"],
        d_real=d_real, d_synth=d_synth, triplet_empty=triplet_empty,
    )
