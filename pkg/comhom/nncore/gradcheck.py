"""
Перевірка аналітичних градієнтів центральними скінченними різницями.

Перевірка виконується у режимі float64: параметри та вхід копіюються у
64-бітний тип, тож похибка скінченних різниць не маскує помилки у backward.
"""

from dataclasses import dataclass, field

import numpy as np

from .graph import forward_backward
from .tensor import CHECK_DTYPE

# Нижня межа знаменника при порівнянні лівої та правої похідних.
KINK_FLOOR = 1e-3


@dataclass
class GradCheckReport:
    """Звіт перевірки: максимальна відносна похибка для кожного параметра."""

    tolerance: float
    max_relative_error: dict = field(default_factory=dict)
    checked: dict = field(default_factory=dict)
    skipped_kinks: dict = field(default_factory=dict)

    @property
    def flagged(self):
        return sorted(name for name, error in self.max_relative_error.items() if error > self.tolerance)

    @property
    def passed(self):
        return not self.flagged

    @property
    def worst(self):
        return max(self.max_relative_error.values(), default=0.0)


def relative_error(analytic, numeric, floor=1e-6):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def check_gradients(params, loss_and_grad, epsilon=1e-5, tolerance=1e-4, max_entries=None, rng=None,
                    full=(), kink_tolerance=None, floor=1e-6):
    """
    Порівнює аналітичні градієнти зі скінченними різницями.

    Args:
        params (ParameterSet): Параметри (бажано у float64).
        loss_and_grad (callable): Функція `params -> loss`, що також записує
            градієнти в акумулятори `params`.
        epsilon (float): Крок скінченних різниць.
        tolerance (float): Допустима відносна похибка.
        max_entries (int, optional): Скільки випадкових елементів перевіряти
            в кожному параметрі; None - всі.
        rng (numpy.random.Generator, optional): Потік для вибору елементів.
        full (tuple[str]): Префікси імен параметрів, які перевіряються
            повністю незалежно від `max_entries`.
        kink_tolerance (float, optional): Якщо задано, елемент, для якого
            ліва та права похідні розходяться більше ніж на цю відносну
            величину, вважається точкою зламу (ReLU, hinge) і пропускається.
        floor (float): Нижня межа знаменника відносної похибки.

    Returns:
        GradCheckReport: Звіт (винятків не кидає).
    """
    params.zero_grad()
    loss_at_point = loss_and_grad(params)
    analytic = {name: param.grad.copy() for name, param in params}
    report = GradCheckReport(tolerance=tolerance)

    for name, param in params:
        flat = param.value.reshape(-1)
        indices = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries and not name.startswith(tuple(full)):
            indices = np.sort((rng or np.random.default_rng(0)).choice(flat.size, size=max_entries, replace=False))
        worst, checked, kinks = 0.0, 0, 0
        for index in indices:
            original = flat[index]
            flat[index] = original + epsilon
            params.zero_grad()
            loss_plus = loss_and_grad(params)
            flat[index] = original - epsilon
            params.zero_grad()
            loss_minus = loss_and_grad(params)
            flat[index] = original
            if kink_tolerance is not None:
                right = (loss_plus - loss_at_point) / epsilon
                left = (loss_at_point - loss_minus) / epsilon
                if relative_error(left, right, KINK_FLOOR) > kink_tolerance:
                    kinks += 1
                    continue
            numeric = (loss_plus - loss_minus) / (2 * epsilon)
            worst = max(worst, relative_error(analytic[name].reshape(-1)[index], numeric, floor))
            checked += 1
        report.max_relative_error[name] = worst
        report.checked[name] = checked
        report.skipped_kinks[name] = kinks

    params.zero_grad()
    return report


def grad_check(graph, params, x, loss_head, epsilon=1e-5, tolerance=1e-4, max_entries=None, rng=None):
    """
    Перевіряє градієнти графа з головою втрат у режимі float64.

    Returns:
        GradCheckReport: Максимальна відносна похибка для кожного параметра.
    """
    shadow = params.astype(CHECK_DTYPE)
    x64 = np.asarray(x, dtype=CHECK_DTYPE)
    return check_gradients(
        shadow,
        lambda p: forward_backward(graph, p, x64, loss_head),
        epsilon=epsilon,
        tolerance=tolerance,
        max_entries=max_entries,
        rng=rng,
    )
