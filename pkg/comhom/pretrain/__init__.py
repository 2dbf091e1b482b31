"""Цикл попереднього навчання енкодера та оператора комбінування."""

from .batching import Batch, assemble_batch, check_composition, epoch_batches, make_batch
from .trainer import (
    EarlyStopping, PretrainConfig, batch_objective, composite_loss_and_grad, pretrain, shadow_bundle,
    validation_loss,
)
