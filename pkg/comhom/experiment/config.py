"""
Документ експерименту: джерело даних, фолди, сіди, сітка гіперпараметрів
попереднього навчання, абляції доданків втрат і SNR, алгоритми калібрування.
"""

import hashlib
import itertools
import json
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from comhom.calibrate.calibration_set import N_SYNTH_PER_CLASS
from comhom.calibrate.downstream import DownstreamSpec
from comhom.data.splits import CALIB_FRACTION
from comhom.data.synth import SynthCohortSpec
from comhom.losses.objective import LossToggles
from comhom.pretrain.trainer import PretrainConfig


class GridPoint(BaseModel):
    """Одна точка сітки: розмір голів, оператор, варіант трійок, доданки, SNR."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    heads: Literal["small", "large"]
    operator: Literal["avg", "mlp"]
    triplet: Literal["basic", "hard", "centroids"]
    toggles: LossToggles
    snr_db: Optional[float]

    @property
    def key(self):
        snr = "inf" if self.snr_db is None else f"{self.snr_db:g}"
        return f"{self.heads}-{self.operator}-{self.triplet}-{self.toggles.label}-snr{snr}"

    @property
    def digest(self):
        payload = json.dumps(self.model_dump(), sort_keys=True).encode("utf-8")
        return hashlib.sha1(payload).hexdigest()[:10]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    dataset: Optional[str] = None
    synth: Optional[SynthCohortSpec] = None
    synth_seed: int = 0
    folds: List[int] = Field(..., min_length=1)
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4], min_length=1)
    heads: List[Literal["small", "large"]] = Field(default_factory=lambda: ["small"], min_length=1)
    operators: List[Literal["avg", "mlp"]] = Field(default_factory=lambda: ["mlp"], min_length=1)
    triplet_variants: List[Literal["basic", "hard", "centroids"]] = Field(default_factory=lambda: ["basic"], min_length=1)
    loss_toggles: List[LossToggles] = Field(default_factory=lambda: [LossToggles()], min_length=1)
    snr_db: List[Optional[float]] = Field(default_factory=lambda: [20.0], min_length=1)
    downstream: List[DownstreamSpec] = Field(default_factory=lambda: [DownstreamSpec()], min_length=1)
    pretrain: PretrainConfig = Field(default_factory=PretrainConfig)
    n_synth_per_class: int = Field(N_SYNTH_PER_CLASS, ge=1)
    calib_fraction: float = Field(CALIB_FRACTION, gt=0, lt=1)
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _check_source(self):
        if (self.dataset is None) == (self.synth is None):
            raise ValueError("Вкажіть рівно одне джерело даних: 'dataset' або 'synth'")
        if any(fold < 0 for fold in self.folds):
            raise ValueError("Номери фолдів мають бути невід'ємними")
        for toggles in self.loss_toggles:
            if not toggles.enabled_terms():
                raise ValueError("Набір доданків втрат не може бути порожнім")
        return self

    def grid(self):
        """Усі точки сітки у фіксованому порядку."""
        return [
            GridPoint(heads=h, operator=o, triplet=t, toggles=toggles, snr_db=snr)
            for h, o, t, toggles, snr in itertools.product(
                self.heads, self.operators, self.triplet_variants, self.loss_toggles, self.snr_db,
            )
        ]

    def pretrain_config(self, point, seed):
        return self.pretrain.model_copy(update={
            "heads": point.heads,
            "operator": point.operator,
            "triplet": self.pretrain.triplet.model_copy(update={"variant": point.triplet}),
            "toggles": point.toggles,
            "snr_db": point.snr_db,
            "seed": seed,
        })
