"""
Тести для підкоманди перевірки градієнтів.
"""

from comhom.experiment.diagnostics import COMPOSITE_CASES, check_composite, check_layers


def test_every_layer_type_passes():
    rows = check_layers(points=2, seed=0)
    assert {row["check"] for row in rows} == {"dense", "relu", "conv1d", "residual"}
    assert all(row["passed"] for row in rows), rows


def test_composite_chain_passes_for_every_operator_and_weighting():
    """Тестує, що композитна перевірка охоплює avg, mlp та випадок з неодиничними вагами."""
    # Act
    rows = check_composite(points=1, seed=0, window_samples=16)

    # Assert
    assert len(rows) == len(COMPOSITE_CASES)
    assert {row["check"] for row in rows} == {"composite-avg", "composite-mlp"}
    assert {row["weights"] for row in rows} == {"1/1/1", "0.5/2/3"}
    assert all(row["passed"] for row in rows), rows
    assert all(row["checked"] > 0 for row in rows)
