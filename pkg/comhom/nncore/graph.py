"""Прямий та зворотний прохід графа з головою втрат."""

from comhom.common.exceptions import ShapeError
from .tensor import ensure_finite


def forward(graph, params, x):
    """Прямий прохід без градієнтів; повертає лише вихід."""
    ensure_finite(x, "input")
    y, _ = graph.forward(params, x)
    return y


def forward_backward(graph, params, x, loss_head):
    """
    Обчислює втрату та записує ∂loss/∂θ в акумулятори `params`.

    Градієнти додаються до вже наявних; очищення - відповідальність
    циклу навчання (`params.zero_grad()`).

    Args:
        graph (Layer): Граф (зазвичай `Sequential`).
        params (ParameterSet): Параметри графа.
        x (ndarray): Вхідний тензор.
        loss_head (LossHead): Голова втрат.

    Returns:
        float: Значення втрати.

    Raises:
        ShapeError: Якщо форма входу не відповідає першому шару.
        NumericError: Якщо втрата або проміжні значення нескінченні.
    """
    for name, param in params:
        if param.grad.shape != param.value.shape:
            raise ShapeError(f"Акумулятор градієнта '{name}' має хибну форму")
    graph.check_input(x)
    ensure_finite(x, "input")
    y, cache = graph.forward(params, x)
    loss, dy = loss_head(y)
    graph.backward(params, cache, dy)
    return loss
