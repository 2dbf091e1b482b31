"""
Цикл попереднього навчання: кодування батчу, синтетичні комбінації з
одиночних жестів, майнінг трійок, сумарна втрата, зворотне поширення через
енкодер, оператор і голови, крок AdamW та рання зупинка за валідацією.
"""

from collections import defaultdict
from typing import Literal, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from comhom.common.exceptions import NumericError
from comhom.data.labels import NO_DIR, NO_MOD, class_indices
from comhom.losses.centroids import REAL, SYNTHETIC, CentroidBank, update_centroids
from comhom.losses.objective import FeatureBatch, LossToggles, total_loss, triplet_terms
from comhom.losses.triplets import TripletConfig, mine_triplets
from comhom.model.bundle import TrainedBundle, build_model
from comhom.model.combination import AvgOperator, MlpOperator, combine_pairs, combine_pairs_backward, pair_indices
from comhom.model.encoder import Encoder, EncoderConfig
from comhom.model.heads import PretrainHeads
from comhom.nncore.optim import OptimizerState, adamw_step
from comhom.nncore.rng import make_stream
from comhom.nncore.tensor import CHECK_DTYPE
from .batching import check_composition, epoch_batches


class PretrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_epochs: int = Field(300, ge=1)
    lr: float = Field(3e-4, gt=0)
    weight_decay: float = Field(0.01, ge=0)
    triplet: TripletConfig = Field(default_factory=TripletConfig)
    toggles: LossToggles = Field(default_factory=LossToggles)
    snr_db: Optional[float] = 20.0
    per_class: int = Field(2, ge=1)
    patience: int = Field(30, ge=1)
    seed: int = 0
    operator: Literal["avg", "mlp"] = "mlp"
    heads: Literal["small", "large"] = "small"
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    steps_per_epoch: Optional[int] = Field(None, ge=1)


class EarlyStopping:
    """Відстежує найкращу валідаційну втрату та лічильник епох без покращення."""

    def __init__(self, patience):
        self.patience = patience
        self.best_loss = np.inf
        self.best_epoch = -1
        self.last_epoch = -1

    def update(self, epoch, loss):
        """Повертає True, якщо епоха стала новою найкращою."""
        self.last_epoch = epoch
        if loss < self.best_loss:
            self.best_loss = loss
            self.best_epoch = epoch
            return True
        return False

    @property
    def should_stop(self):
        return self.last_epoch - self.best_epoch >= self.patience


def _rows(batch):
    direction_rows = np.flatnonzero((batch.directions != NO_DIR) & (batch.modifiers == NO_MOD))
    modifier_rows = np.flatnonzero((batch.directions == NO_DIR) & (batch.modifiers != NO_MOD))
    combo_rows = np.flatnonzero((batch.directions != NO_DIR) & (batch.modifiers != NO_MOD))
    return direction_rows, modifier_rows, combo_rows


def batch_objective(bundle, batch, config, bank, rng, compute_grads=True, update_bank=True):
    """
    Обчислює сумарну втрату одного батчу і, за потреби, накопичує градієнти
    всіх параметрів (енкодер, оператор, голови).

    Args:
        bundle (TrainedBundle): Моделі, що навчаються.
        batch (Batch): Батч вікон.
        config (PretrainConfig): Конфігурація.
        bank (CentroidBank): Поточний банк центроїдів.
        rng (numpy.random.Generator): Потік майнінгу трійок.
        compute_grads (bool): False - лише значення втрати.
        update_bank (bool): Чи оновлювати центроїди ознаками батчу.

    Returns:
        tuple: (LossBreakdown, CentroidBank, кількість трійок).
    """
    encoder, operator, heads = bundle.encoder, bundle.operator, bundle.heads
    samples = batch.samples.astype(encoder.params.value(encoder.params.names()[0]).dtype, copy=False)
    z, encoder_cache = encoder.forward(samples)
    direction_rows, modifier_rows, combo_rows = _rows(batch)

    if direction_rows.size and modifier_rows.size:
        dir_idx, mod_idx = pair_indices(direction_rows.size, modifier_rows.size)
        z_synth, synth_cache = combine_pairs(
            operator, z[direction_rows], batch.directions[direction_rows],
            z[modifier_rows], batch.modifiers[modifier_rows], dir_idx, mod_idx,
        )
        synth = FeatureBatch(
            z_synth, batch.directions[direction_rows][dir_idx], batch.modifiers[modifier_rows][mod_idx],
        )
    else:
        synth = FeatureBatch(np.zeros((0, z.shape[1]), dtype=z.dtype), np.zeros(0, np.int64), np.zeros(0, np.int64))

    real_combos = FeatureBatch(z[combo_rows], batch.directions[combo_rows], batch.modifiers[combo_rows])
    real_combo_classes = batch.classes[combo_rows]
    synth_classes = class_indices(synth.directions, synth.modifiers)

    if update_bank and config.triplet.variant == "centroids":
        if len(real_combos):
            bank = update_centroids(bank, real_combos.features, real_combo_classes, REAL, config.triplet.momentum)
        if len(synth):
            bank = update_centroids(bank, synth.features, synth_classes, SYNTHETIC, config.triplet.momentum)

    terms = None
    if config.toggles.triplet and len(real_combos) and len(synth):
        triplets = mine_triplets(
            config.triplet, real_combos.features, real_combo_classes, synth.features, synth_classes, bank, rng,
        )
        terms = triplet_terms(triplets, real_combos.features, synth.features, config.triplet.margin)

    real = FeatureBatch(z, batch.directions, batch.modifiers)
    breakdown = total_loss(real, synth, heads, terms, config.toggles, combo_rows, compute_grads)

    if compute_grads:
        d_z = breakdown.d_real
        if len(synth):
            d_dir, d_mod = combine_pairs_backward(
                operator, synth_cache, breakdown.d_synth, dir_idx, mod_idx, direction_rows.size, modifier_rows.size,
            )
            d_z = d_z.copy()
            d_z[direction_rows] += d_dir
            d_z[modifier_rows] += d_mod
        encoder.backward(encoder_cache, d_z)
    return breakdown, bank, 0 if terms is None else terms.count


def validation_loss(bundle, d_val, config, bank):
    """Середня сумарна втрата на D_val без шуму; банк центроїдів лише читається."""
    batches = epoch_batches(d_val, config.per_class, None, make_stream(config.seed, "validation", "order"))
    rng = make_stream(config.seed, "validation", "mining")
    losses = [
        batch_objective(bundle, batch, config, bank, rng, compute_grads=False, update_bank=False)[0].total
        for batch in batches
    ]
    if not losses:
        raise NumericError("Валідаційний набір порожній", layer="validation")
    return float(np.mean(losses))


def pretrain(d_pre, d_val, config, on_epoch=None):
    """
    Повний цикл попереднього навчання з ранньою зупинкою.

    Args:
        d_pre (Dataset): Дані попереднього навчання.
        d_val (Dataset): Валідаційний суб'єкт.
        config (PretrainConfig): Конфігурація.
        on_epoch (callable, optional): Викликається з рядком трасування після кожної епохи.

    Returns:
        TrainedBundle: Параметри з найкращої валідаційної епохи; `metadata["trace"]`
            містить трасування по епохах.

    Raises:
        NumericError: Нескінченна втрата (контекст містить епоху, крок і доданки).
        ConfigurationError: Некоректна конфігурація або склад батчу.
    """
    config.toggles.require_any()
    check_composition(d_pre, config.per_class)
    encoder, operator, heads = build_model(config.encoder, config.operator, config.heads, config.seed)
    bundle = TrainedBundle(encoder=encoder, operator=operator, heads=heads, config=config.model_dump())
    params = bundle.params
    state = OptimizerState.for_params(params, lr=config.lr, weight_decay=config.weight_decay)
    bank = CentroidBank.empty(encoder.output_dim)
    stopper = EarlyStopping(config.patience)
    best_params = params.copy()
    trace = []

    logger.info(
        f"Попереднє навчання: {len(d_pre)} вікон, оператор '{config.operator}', трійки '{config.triplet.variant}', "
        f"доданки {config.toggles.label}, параметрів {params.count()}"
    )
    for epoch in range(config.max_epochs):
        sums, steps, triplet_count = defaultdict(float), 0, 0
        batches = epoch_batches(
            d_pre, config.per_class, config.snr_db, make_stream(config.seed, "batches", epoch), config.steps_per_epoch,
        )
        for step, batch in enumerate(batches):
            params.zero_grad()
            try:
                breakdown, bank, count = batch_objective(
                    bundle, batch, config, bank, make_stream(config.seed, "mining", epoch, step),
                )
            except NumericError as error:
                error.context.update(epoch=epoch, step=step)
                logger.error(f"Нескінченне значення на епосі {epoch}, крок {step}: {error} {error.context}")
                raise
            adamw_step(params, state)
            for term, value in breakdown.as_dict().items():
                sums[term] += value
            triplet_count += count
            steps += 1

        val_loss = validation_loss(bundle, d_val, config, bank)
        row = {"epoch": epoch, **{f"train_{k}": v / max(steps, 1) for k, v in sums.items()},
               "triplets": triplet_count, "val_loss": val_loss}
        trace.append(row)
        if stopper.update(epoch, val_loss):
            best_params = params.copy()
        logger.info(f"Епоха {epoch}: train {row.get('train_total', 0.0):.4f}, val {val_loss:.4f}")
        if on_epoch is not None:
            on_epoch(row)
        if stopper.should_stop:
            logger.info(f"Рання зупинка на епосі {epoch}; найкраща епоха {stopper.best_epoch}")
            break

    params.load_values(best_params)
    bundle.best_epoch = stopper.best_epoch
    bundle.val_trace = [row["val_loss"] for row in trace]
    bundle.metadata = {"trace": trace, "parameter_counts": bundle.parameter_counts()}
    logger.success(f"Попереднє навчання завершено: найкраща епоха {bundle.best_epoch}, val {stopper.best_loss:.4f}")
    return bundle


def shadow_bundle(bundle, dtype=CHECK_DTYPE):
    """Копія моделей з параметрами іншого типу (для перевірки градієнтів у float64)."""
    encoder = Encoder(bundle.encoder.config, bundle.encoder.graph, bundle.encoder.params.astype(dtype))
    if isinstance(bundle.operator, MlpOperator):
        operator = MlpOperator(bundle.operator.graph, bundle.operator.params.astype(dtype), bundle.operator.feature_dim)
    else:
        operator = AvgOperator()
    heads = PretrainHeads(bundle.heads.size, bundle.heads.direction, bundle.heads.modifier, bundle.heads.params.astype(dtype))
    return TrainedBundle(encoder=encoder, operator=operator, heads=heads, config=bundle.config)


def composite_loss_and_grad(bundle, batch, config, bank, mining_seed=0):
    """
    Замикання `params -> loss` для `check_gradients` через увесь ланцюг
    енкодер -> оператор -> голови -> сумарна втрата. Потік майнінгу
    відтворюється при кожному виклику, банк не оновлюється.
    """
    def loss_and_grad(_params):
        breakdown, _, _ = batch_objective(
            bundle, batch, config, bank, make_stream(mining_seed, "gradcheck"), update_bank=False,
        )
        return breakdown.total

    return loss_and_grad
