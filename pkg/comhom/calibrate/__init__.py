"""Калібрувальні набори та класифікатори, що навчаються поверх заморожених ознак."""

from .calibration_set import (
    N_SYNTH_PER_CLASS, REAL_COMBO, REAL_SINGLE, SYNTHETIC_COMBO, CalibrationSet, SupervisionMode,
    build_calibration_set, subsample_per_class, synthetic_combos,
)
from .downstream import (
    ALGORITHMS, DownstreamModel, DownstreamSpec, dump_model, fit_downstream, load_model_file, make_estimator,
    predict,
)
