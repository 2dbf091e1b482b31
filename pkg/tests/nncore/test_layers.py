"""
Тести для шарів `nncore`: форми виходів, відповідність прямої згортки та
перевірка аналітичних градієнтів кожного типу шару.
"""

import numpy as np
import pytest

from comhom.common.exceptions import NumericError, ShapeError
from comhom.nncore.gradcheck import grad_check
from comhom.nncore.graph import forward, forward_backward
from comhom.nncore.layers import Conv1d, Dense, GlobalAvgPool, ReLU, Residual, Sequential
from comhom.nncore.objectives import SoftmaxCrossEntropy, SquaredError, softmax
from comhom.nncore.rng import make_stream
from comhom.nncore.tensor import ParameterSet


def _params(graph, seed=0):
    return ParameterSet(graph.init_params(make_stream(seed, "test", graph.name)))


def test_dense_forward_matches_matmul():
    """Тестує, що Dense обчислює x W^T + b."""
    # Arrange
    graph = Sequential("toy", [Dense("fc", 3, 2)])
    params = _params(graph)
    params["toy.fc.bias"].value[...] = [0.5, -0.5]
    x = np.arange(6, dtype=np.float32).reshape(2, 3)

    # Act
    y = forward(graph, params, x)

    # Assert
    expected = x @ params.value("toy.fc.weight").T + np.array([0.5, -0.5])
    np.testing.assert_allclose(y, expected, rtol=1e-6)


def test_conv1d_output_length_with_stride():
    """Тестує довжину виходу згортки з кроком 2 та доповненням k//2."""
    conv = Conv1d("conv", 2, 3, 3, stride=2)
    assert conv.output_length(11) == 6
    assert conv.output_length(963) == 482


def test_conv1d_matches_direct_convolution():
    """Порівнює векторизовану згортку з прямим обчисленням у циклі."""
    # Arrange
    conv = Conv1d("conv", 2, 3, 3, stride=2)
    params = ParameterSet(conv.init_params(make_stream(0, "conv"), dtype=np.float64))
    x = make_stream(1, "x").standard_normal((2, 2, 9))
    weight, bias = params.value("conv.weight"), params.value("conv.bias")
    padded = np.pad(x, ((0, 0), (0, 0), (1, 1)))

    # Act
    y, _ = conv.forward(params, x)

    # Assert
    expected = np.zeros((2, 3, conv.output_length(9)))
    for b in range(2):
        for o in range(3):
            for t in range(expected.shape[2]):
                expected[b, o, t] = np.sum(weight[o] * padded[b, :, 2 * t:2 * t + 3]) + bias[o]
    np.testing.assert_allclose(y, expected, rtol=1e-10)


@pytest.mark.parametrize("graph, shape, head", [
    (Sequential("dense", [Dense("fc", 5, 3)]), (4, 5), lambda rng: SoftmaxCrossEntropy(rng.integers(0, 3, 4))),
    (Sequential("relu", [Dense("fc1", 5, 6), ReLU("relu"), Dense("fc2", 6, 3)]), (4, 5),
     lambda rng: SoftmaxCrossEntropy(rng.integers(0, 3, 4))),
    (Sequential("conv", [Conv1d("c", 3, 4, 3, stride=2), GlobalAvgPool("pool")]), (2, 3, 11),
     lambda rng: SquaredError(rng.standard_normal((2, 4)))),
    (Sequential("residual", [
        Residual("res", Sequential("body", [Conv1d("c1", 3, 3, 3), ReLU("r"), Conv1d("c2", 3, 3, 3)])),
        GlobalAvgPool("pool"),
    ]), (2, 3, 9), lambda rng: SquaredError(rng.standard_normal((2, 3)))),
])
def test_layer_gradients_match_finite_differences(graph, shape, head):
    """Перевіряє градієнти кожного типу шару скінченними різницями у float64."""
    # Arrange
    rng = make_stream(7, "gradcheck", graph.name)
    params = _params(graph)

    # Act
    report = grad_check(graph, params, rng.standard_normal(shape), head(rng))

    # Assert
    assert report.passed, report.max_relative_error
    assert report.worst < 1e-4


def test_dense_rejects_wrong_input_shape():
    """Тестує, що невідповідна форма входу дає ShapeError."""
    graph = Sequential("toy", [Dense("fc", 3, 2)])
    with pytest.raises(ShapeError):
        forward(graph, _params(graph), np.zeros((2, 4), dtype=np.float32))


def test_sequential_reports_layer_with_non_finite_output():
    """Тестує, що NaN у вагах виявляється на межі відповідного шару."""
    # Arrange
    graph = Sequential("toy", [Dense("fc", 3, 2), ReLU("relu")])
    params = _params(graph)
    params["toy.fc.weight"].value[0, 0] = np.nan

    # Act / Assert
    with pytest.raises(NumericError) as error:
        forward(graph, params, np.ones((1, 3), dtype=np.float32))
    assert error.value.layer == "toy.fc"


def test_residual_rejects_shape_changing_body():
    """Тестує, що залишковий блок вимагає збереження форми."""
    graph = Residual("res", Sequential("body", [Conv1d("c", 2, 3, 3)]))
    params = ParameterSet(graph.init_params(make_stream(0, "res")))
    with pytest.raises(ShapeError):
        graph.forward(params, np.ones((1, 2, 8), dtype=np.float32))


def test_parameter_names_are_scoped():
    """Тестує повні імена параметрів вкладених шарів."""
    graph = Sequential("encoder", [Residual("block", Sequential("body", [Conv1d("conv1", 2, 2, 3)]))])
    assert sorted(graph.init_params(make_stream(0, "names"))) == [
        "encoder.block.body.conv1.bias", "encoder.block.body.conv1.weight",
    ]


def test_hand_differentiated_dense_gradient():
    """y = W·x з W=[[1]], x=[1], ціль [0] → втрата 1, ∂L/∂W = 2."""
    # Arrange
    graph = Sequential("toy", [Dense("fc", 1, 1)])
    params = ParameterSet({"toy.fc.weight": np.ones((1, 1)), "toy.fc.bias": np.zeros(1)})

    # Act
    loss = forward_backward(graph, params, np.ones((1, 1)), SquaredError(np.zeros((1, 1))))

    # Assert
    assert loss == 1.0
    assert params["toy.fc.weight"].grad[0, 0] == 2.0


def test_zeroed_graph_gives_uniform_probabilities():
    graph = Sequential("toy", [Dense("fc", 4, 5), ReLU("relu")])
    params = ParameterSet({name: np.zeros_like(param.value) for name, param in _params(graph)})
    probabilities = softmax(forward(graph, params, np.ones((3, 4))))
    np.testing.assert_allclose(probabilities, 0.2)
