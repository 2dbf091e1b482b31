"""
Перевірка градієнтів для кожного типу шару та для повного ланцюга
енкодер -> оператор -> голови -> сумарна втрата (у режимі float64).
"""

from loguru import logger

from comhom.data.synth import SynthCohortSpec, generate_synth_cohort
from comhom.losses.centroids import CentroidBank
from comhom.losses.objective import LossToggles
from comhom.model.bundle import TrainedBundle, build_model
from comhom.model.combination import AVG, MLP, MlpOperator
from comhom.model.encoder import EncoderConfig
from comhom.nncore.gradcheck import check_gradients, grad_check
from comhom.nncore.layers import Conv1d, Dense, GlobalAvgPool, ReLU, Residual, Sequential
from comhom.nncore.objectives import SoftmaxCrossEntropy, SquaredError
from comhom.nncore.rng import make_stream
from comhom.nncore.tensor import ParameterSet
from comhom.pretrain.batching import make_batch
from comhom.pretrain.trainer import PretrainConfig, composite_loss_and_grad, shadow_bundle

CHECK_ENCODER = EncoderConfig(stem_channels=4, width=6, feature_dim=6)
CHECK_HIDDEN = 8
# Параметри, що перевіряються поелементно; для решти енкодера - вибірка.
FULL_CHECK_PREFIXES = ("encoder.block1.", "operator.", "heads.")
KINK_TOLERANCE = 1e-2
COMPOSITE_CASES = (
    ("avg", LossToggles()),
    ("mlp", LossToggles()),
    ("mlp", LossToggles(triplet_weight=0.5, ce_real_weight=2.0, ce_synth_weight=3.0)),
)


def _layer_cases():
    """(назва, граф, форма входу, фабрика голови втрат) для кожного типу шару."""
    return [
        ("dense", Sequential("check", [Dense("fc", 5, 3)]), (4, 5),
         lambda rng, y: SoftmaxCrossEntropy(rng.integers(0, 3, size=y[0]))),
        ("relu", Sequential("check", [Dense("fc1", 5, 6), ReLU("relu"), Dense("fc2", 6, 3)]), (4, 5),
         lambda rng, y: SoftmaxCrossEntropy(rng.integers(0, 3, size=y[0]))),
        ("conv1d", Sequential("check", [Conv1d("conv", 3, 4, 3, stride=2), GlobalAvgPool("pool")]), (2, 3, 11),
         lambda rng, y: SquaredError(rng.standard_normal((y[0], 4)))),
        ("residual", Sequential("check", [
            Residual("res", Sequential("body", [Conv1d("c1", 3, 3, 3), ReLU("r"), Conv1d("c2", 3, 3, 3)])),
            GlobalAvgPool("pool"),
        ]), (2, 3, 9), lambda rng, y: SquaredError(rng.standard_normal((y[0], 3)))),
    ]


def check_layers(points=10, seed=0, tolerance=1e-4):
    rows = []
    for name, graph, shape, make_head in _layer_cases():
        for point in range(points):
            rng = make_stream(seed, "gradcheck", name, point)
            params = graph.init_params(rng)
            report = grad_check(graph, ParameterSet(params), rng.standard_normal(shape), make_head(rng, shape), tolerance=tolerance)
            rows.append({"check": name, "point": point, "worst": report.worst, "passed": report.passed})
    return rows


def composite_report(dataset, operator, toggles, seed=0, tolerance=1e-4, max_entries=3):
    """
    Перевіряє градієнти ланцюга енкодер -> оператор -> голови -> сумарна втрата
    на одному стратифікованому батчі у float64.

    Поелементно перевіряються голови, оператор і перший залишковий блок
    енкодера; решта енкодера - `max_entries` випадкових елементів на параметр.
    Точки зламу ReLU та hinge пропускаються.

    Returns:
        GradCheckReport: Звіт з кількістю перевірених і пропущених елементів.
    """
    config = PretrainConfig(
        encoder=CHECK_ENCODER, operator=operator, toggles=toggles, per_class=1, snr_db=None, seed=seed,
    )
    encoder, combiner, heads = build_model(config.encoder, AVG, config.heads, seed)
    if operator == MLP:
        combiner = MlpOperator.create(make_stream(seed, "init", "operator"), encoder.output_dim, hidden=CHECK_HIDDEN)
    shadow = shadow_bundle(TrainedBundle(encoder=encoder, operator=combiner, heads=heads))
    batch = make_batch(dataset, 1, None, make_stream(seed, "gradcheck", "batch"))
    loss_and_grad = composite_loss_and_grad(shadow, batch, config, CentroidBank.empty(encoder.output_dim), seed)
    return check_gradients(
        shadow.params, loss_and_grad, epsilon=1e-6, tolerance=tolerance, max_entries=max_entries,
        rng=make_stream(seed, "gradcheck", "entries"), full=FULL_CHECK_PREFIXES, kink_tolerance=KINK_TOLERANCE,
        floor=1e-5,
    )


def check_composite(points=10, seed=0, tolerance=1e-4, window_samples=32, max_entries=3):
    """Перевіряє повний ланцюг для кожного оператора та набору ваг на крихітній когорті."""
    spec = SynthCohortSpec(subjects=1, singles_per_class=1, combos_per_class=1, window_samples=window_samples)
    dataset = generate_synth_cohort(spec, seed)
    rows = []
    for point in range(points):
        for operator, toggles in COMPOSITE_CASES:
            report = composite_report(dataset, operator, toggles, seed + point, tolerance, max_entries)
            if not report.passed:
                logger.warning(f"Композитна перевірка ({operator}, точка {point}): відхилено {report.flagged}")
            rows.append({
                "check": f"composite-{operator}", "point": point, "weights": _weights_label(toggles),
                "worst": report.worst, "passed": report.passed,
                "checked": sum(report.checked.values()), "kinks": sum(report.skipped_kinks.values()),
            })
    return rows


def _weights_label(toggles):
    return "/".join(f"{toggles.weight(term):g}" for term in toggles.enabled_terms())
