"""Модель даних, формат на диску, розбиття LOSO, шум та синтетична когорта."""

from .dataset import CHANNELS, SAMPLE_RATE_HZ, WINDOW_SAMPLES, Dataset, Window
from .io import load_dataset, save_dataset
from .labels import (
    CLASS_LABELS, CLASS_NAMES, COMBO_CLASSES, DIRECTIONS, MODIFIERS, N_CLASSES, NO_DIR, NO_MOD, OUTLIER,
    OUTLIER_INDEX, PREDICTION_NAMES, SINGLE_CLASSES, Direction, GestureLabel, Modifier, class_components,
    class_indices,
)
from .noise import inject_noise, inject_noise_per_class, noise_sigma
from .splits import CALIB_FRACTION, LosoSplit, split_loso, stratified_indices
from .synth import SynthCohortSpec, generate_synth_cohort
