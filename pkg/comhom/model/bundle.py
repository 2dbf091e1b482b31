"""
TrainedBundle: заморожений енкодер, оператор комбінування та допоміжні голови
з одного запуску попереднього навчання, разом з метаданими.
"""

import json
import os
from dataclasses import dataclass, field

import aiofiles

from comhom.common.exceptions import DatasetLoadError
from comhom.common.utils import write_atomic
from comhom.nncore.checkpoint import load_checkpoint, save_checkpoint
from comhom.nncore.rng import make_stream
from comhom.nncore.tensor import ParameterSet
from .combination import make_operator
from .encoder import Encoder, EncoderConfig
from .heads import PretrainHeads

BUNDLE_METADATA_FILE = "bundle.json"


def build_model(encoder_config, operator_variant, heads_size, seed):
    """Створює (енкодер, оператор, голови) з детермінованою ініціалізацією."""
    encoder = Encoder.create(encoder_config, make_stream(seed, "init", "encoder"))
    operator = make_operator(operator_variant, make_stream(seed, "init", "operator"), encoder.output_dim)
    heads = PretrainHeads.create(heads_size, make_stream(seed, "init", "heads"), encoder.output_dim)
    return encoder, operator, heads


def all_parameters(encoder, operator, heads):
    return ParameterSet.merge(encoder.params, operator.params, heads.params)


@dataclass
class TrainedBundle:
    encoder: Encoder
    operator: object
    heads: PretrainHeads
    best_epoch: int = 0
    val_trace: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def params(self):
        return all_parameters(self.encoder, self.operator, self.heads)

    def parameter_counts(self):
        return {
            "encoder": self.encoder.parameter_count(),
            "operator": self.operator.parameter_count(),
            "heads": self.heads.parameter_count(),
        }


async def save_bundle(bundle, directory):
    """Зберігає параметри у форматі чекпоінта nncore та метадані у `bundle.json`."""
    os.makedirs(directory, exist_ok=True)
    await save_checkpoint(bundle.params, os.path.join(directory, "checkpoint"), {
        "operator": bundle.operator.variant,
        "heads": bundle.heads.size,
        "best_epoch": bundle.best_epoch,
    })
    record = {
        "encoder_config": bundle.encoder.config.model_dump(),
        "operator": bundle.operator.variant,
        "heads": bundle.heads.size,
        "best_epoch": bundle.best_epoch,
        "val_trace": bundle.val_trace,
        "config": bundle.config,
        "metadata": bundle.metadata,
        "parameter_counts": bundle.parameter_counts(),
    }
    await write_atomic(os.path.join(directory, BUNDLE_METADATA_FILE), json.dumps(record, indent=2))


async def load_bundle(directory):
    """Відновлює TrainedBundle, збережений `save_bundle`."""
    metadata_path = os.path.join(directory, BUNDLE_METADATA_FILE)
    if not os.path.exists(metadata_path):
        raise DatasetLoadError(f"Метадані бандла не знайдено: {metadata_path}", path=metadata_path)
    async with aiofiles.open(metadata_path, "r", encoding="utf-8") as f:
        record = json.loads(await f.read())
    encoder, operator, heads = build_model(
        EncoderConfig.model_validate(record["encoder_config"]), record["operator"], record["heads"], seed=0,
    )
    stored, _ = await load_checkpoint(os.path.join(directory, "checkpoint"))
    all_parameters(encoder, operator, heads).load_values(stored)
    return TrainedBundle(
        encoder=encoder, operator=operator, heads=heads,
        best_epoch=record["best_epoch"], val_trace=record["val_trace"],
        config=record["config"], metadata=record["metadata"],
    )
