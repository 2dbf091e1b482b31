"""
Функції втрат, що завершують граф: softmax-крос-ентропія та квадратична помилка.

Кожна голова втрат повертає пару (скалярна втрата, градієнт за виходом графа).
Втрата усереднюється за батчем.
"""

from abc import ABC, abstractmethod

import numpy as np

from comhom.common.exceptions import NumericError, ShapeError


def log_softmax(logits):
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits):
    return np.exp(log_softmax(logits))


def softmax_cross_entropy(logits, targets):
    """
    Середня крос-ентропія та її градієнт за логітами.

    Args:
        logits (ndarray): [batch, classes].
        targets (ndarray): [batch] цілі індекси класів.

    Returns:
        tuple: (втрата, dlogits).
    """
    targets = np.asarray(targets, dtype=np.int64)
    if logits.ndim != 2 or targets.shape != (logits.shape[0],):
        raise ShapeError(f"Логіти {list(logits.shape)} не узгоджуються з цілями {list(targets.shape)}")
    batch = logits.shape[0]
    if batch == 0:
        return 0.0, np.zeros_like(logits)
    log_probs = log_softmax(logits)
    rows = np.arange(batch)
    loss = -log_probs[rows, targets].mean()
    d_logits = np.exp(log_probs)
    d_logits[rows, targets] -= 1
    return float(loss), d_logits / batch


class LossHead(ABC):
    """Голова втрат для `forward_backward`."""

    name = "loss"

    @abstractmethod
    def evaluate(self, y):
        pass

    def __call__(self, y):
        loss, dy = self.evaluate(y)
        if not np.isfinite(loss):
            raise NumericError(f"Нескінченна втрата у голові '{self.name}'", layer=self.name)
        return loss, dy


class SoftmaxCrossEntropy(LossHead):
    name = "softmax_cross_entropy"

    def __init__(self, targets):
        self.targets = np.asarray(targets, dtype=np.int64)

    def evaluate(self, y):
        return softmax_cross_entropy(y, self.targets)


class SquaredError(LossHead):
    """Сума квадратів відхилень, усереднена за батчем."""

    name = "squared_error"

    def __init__(self, target):
        self.target = np.asarray(target)

    def evaluate(self, y):
        if y.shape != self.target.shape:
            raise ShapeError(f"Вихід {list(y.shape)} не збігається з ціллю {list(self.target.shape)}")
        residual = y - self.target.astype(y.dtype)
        batch = y.shape[0] if y.ndim else 1
        return float((residual ** 2).sum() / batch), 2 * residual / batch
