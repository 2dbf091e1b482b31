"""
Генератор синтетичної когорти для перевірки конвеєра на настільному масштабі.

Кожен одиночний клас має глобальний гладкий шаблон T_s; кожен суб'єкт -
випадкову матрицю змішування каналів M близьку до одиничної. Комбінація
(i, j) утворюється канально-насичувальним законом tanh(g_i·T_i + g_j·T_j),
тож вона не є ні сумою, ні середнім своїх частин.
"""

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from scipy.ndimage import gaussian_filter1d

from comhom.nncore.rng import make_stream
from .dataset import CHANNELS, SAMPLE_RATE_HZ, WINDOW_SAMPLES, Dataset
from .labels import COMBO_CLASSES, N_ACTIVE, SINGLE_CLASSES, class_components


class SynthCohortSpec(BaseModel):
    """Параметри синтетичної когорти."""

    model_config = ConfigDict(extra="forbid")

    subjects: int = Field(10, ge=1)
    singles_per_class: int = Field(40, ge=1)
    combos_per_class: int = Field(40, ge=1)
    channels: int = Field(CHANNELS, ge=1)
    window_samples: int = Field(WINDOW_SAMPLES, ge=8)
    sample_rate_hz: int = Field(SAMPLE_RATE_HZ, ge=1)
    template_smoothness: float = Field(6.0, gt=0)
    noise_scale: float = Field(0.1, ge=0)
    mixing_strength: float = Field(0.15, ge=0)
    nonlinearity_gain: float = Field(2.0, ge=0)
    gain_spread: float = Field(0.5, ge=0, lt=1)
    max_shift: int = Field(0, ge=0)


def _templates(spec, rng):
    """Гладкі шаблони з одиничним стандартним відхиленням: [8, channels, time]."""
    raw = rng.standard_normal((len(SINGLE_CLASSES), spec.channels, spec.window_samples))
    smooth = gaussian_filter1d(raw, sigma=spec.template_smoothness, axis=-1, mode="wrap")
    return smooth / smooth.std(axis=(1, 2), keepdims=True)


def combination_signal(templates, direction_gains, modifier_gains, direction, modifier):
    """ψ(T_dir, T_mod) = tanh(g_dir·T_dir + g_mod·T_mod)."""
    return np.tanh(
        direction_gains[direction] * templates[direction]
        + modifier_gains[modifier] * templates[N_ACTIVE + modifier]
    )


def generate_synth_cohort(spec, seed):
    """
    Генерує збалансовану за класами когорту.

    Args:
        spec (SynthCohortSpec): Параметри когорти.
        seed (int): Сід; однакові (spec, seed) дають побітово однаковий набір.

    Returns:
        Dataset: subjects × (8·singles_per_class + 16·combos_per_class) вікон.
    """
    rng = make_stream(seed, "synth", "templates")
    templates = _templates(spec, rng)
    spread = spec.gain_spread
    direction_gains = spec.nonlinearity_gain * rng.uniform(1 - spread, 1 + spread, size=N_ACTIVE)
    modifier_gains = spec.nonlinearity_gain * rng.uniform(1 - spread, 1 + spread, size=N_ACTIVE)

    clean = {}
    for class_index in SINGLE_CLASSES:
        clean[class_index] = templates[class_index]
    for class_index in COMBO_CLASSES:
        clean[class_index] = combination_signal(templates, direction_gains, modifier_gains, *class_components(class_index))

    samples, directions, modifiers, subjects = [], [], [], []
    for subject in range(spec.subjects):
        subject_rng = make_stream(seed, "synth", "subject", subject)
        mixing = np.eye(spec.channels) + spec.mixing_strength * subject_rng.standard_normal((spec.channels, spec.channels))
        for class_index in SINGLE_CLASSES + COMBO_CLASSES:
            count = spec.singles_per_class if class_index in SINGLE_CLASSES else spec.combos_per_class
            signal = clean[class_index]
            shifts = subject_rng.integers(0, spec.max_shift + 1, size=count)
            batch = np.stack([np.roll(signal, int(shift), axis=-1) for shift in shifts])
            batch = np.einsum("ij,njt->nit", mixing, batch)
            batch = batch + spec.noise_scale * subject_rng.standard_normal(batch.shape)
            direction, modifier = class_components(class_index)
            samples.append(batch.astype(np.float32))
            directions.extend([direction] * count)
            modifiers.extend([modifier] * count)
            subjects.extend([subject] * count)

    dataset = Dataset(np.concatenate(samples), directions, modifiers, subjects, spec.sample_rate_hz)
    logger.info(f"Згенеровано синтетичну когорту: {spec.subjects} суб'єктів, {len(dataset)} вікон")
    return dataset
