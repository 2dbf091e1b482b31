"""
Оптимізатор AdamW з відокремленим затуханням ваг.

Значення за замовчуванням: β1=0.9, β2=0.999, ε=1e-8, weight decay=0.01.
Швидкість навчання 0.0003 задається конфігурацією попереднього навчання.
"""

from dataclasses import dataclass, field

import numpy as np

from comhom.common.exceptions import ShapeError


@dataclass
class OptimizerState:
    """Стан AdamW: перший/другий моменти для кожного параметра та лічильник кроків."""

    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    weight_decay: float = 0.01
    eps: float = 1e-8
    step: int = 0
    first_moment: dict = field(default_factory=dict)
    second_moment: dict = field(default_factory=dict)

    @classmethod
    def for_params(cls, params, **hyperparams):
        state = cls(**hyperparams)
        for name, param in params:
            state.first_moment[name] = np.zeros_like(param.value)
            state.second_moment[name] = np.zeros_like(param.value)
        return state


def adamw_step(params, state):
    """
    Застосовує один крок AdamW на місці.

    Градієнти не очищуються. Лічильник кроків збільшується рівно на 1.

    Raises:
        ShapeError: Якщо стан не відповідає параметрам.
    """
    state.step += 1
    bias1 = 1 - state.beta1 ** state.step
    bias2 = 1 - state.beta2 ** state.step
    for name, param in params:
        if name not in state.first_moment or state.first_moment[name].shape != param.value.shape:
            raise ShapeError(f"Стан оптимізатора не відповідає параметру '{name}'")
        m = state.first_moment[name]
        v = state.second_moment[name]
        g = param.grad
        m *= state.beta1
        m += (1 - state.beta1) * g
        v *= state.beta2
        v += (1 - state.beta2) * g * g
        if state.weight_decay:
            param.value *= param.value.dtype.type(1 - state.lr * state.weight_decay)
        update = (m / bias1) / (np.sqrt(v / bias2) + state.eps)
        param.value -= (state.lr * update).astype(param.value.dtype)
    return params, state
