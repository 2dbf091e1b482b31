"""
Класифікатор попереднього навчання G^Pre: дві незалежні голови 64 -> 5.

`small` - по одному лінійному шару на голову (650 параметрів);
`large` - 64 -> 96 -> 96 -> 5 з ReLU на голову (~32K параметрів).
Голови використовуються лише під час попереднього навчання.
"""

import numpy as np

from comhom.common.exceptions import ConfigurationError
from comhom.nncore.layers import Dense, ReLU, Sequential
from comhom.nncore.objectives import softmax
from comhom.nncore.tensor import ParameterSet

SMALL = "small"
LARGE = "large"
HEAD_CLASSES = 5
LARGE_HIDDEN = 96


def _head_graph(name, size, feature_dim):
    if size == SMALL:
        layers = [Dense("linear", feature_dim, HEAD_CLASSES)]
    elif size == LARGE:
        layers = [
            Dense("hidden1", feature_dim, LARGE_HIDDEN), ReLU("relu1"),
            Dense("hidden2", LARGE_HIDDEN, LARGE_HIDDEN), ReLU("relu2"),
            Dense("out", LARGE_HIDDEN, HEAD_CLASSES),
        ]
    else:
        raise ConfigurationError(f"Невідомий розмір класифікатора: {size}")
    graph = Sequential(name, layers)
    graph.set_scope("heads")
    return graph


class PretrainHeads:
    """Голови напрямку та модифікатора без спільних параметрів."""

    def __init__(self, size, direction, modifier, params):
        self.size = size
        self.direction = direction
        self.modifier = modifier
        self.params = params

    @classmethod
    def create(cls, size, rng, feature_dim=64):
        direction = _head_graph("direction", size, feature_dim)
        modifier = _head_graph("modifier", size, feature_dim)
        params = ParameterSet({**direction.init_params(rng), **modifier.init_params(rng)})
        return cls(size, direction, modifier, params)

    def parameter_count(self):
        return self.params.count()

    def forward(self, z):
        dir_logits, dir_cache = self.direction.forward(self.params, z)
        mod_logits, mod_cache = self.modifier.forward(self.params, z)
        return (dir_logits, mod_logits), (dir_cache, mod_cache)

    def backward(self, cache, d_dir_logits, d_mod_logits):
        dir_cache, mod_cache = cache
        return (
            self.direction.backward(self.params, dir_cache, d_dir_logits)
            + self.modifier.backward(self.params, mod_cache, d_mod_logits)
        )


def classify_heads(heads, z):
    """
    Ймовірності напрямку та модифікатора для ознак.

    Args:
        heads (PretrainHeads): Голови.
        z (ndarray): [K] або [batch, K].

    Returns:
        tuple: (p_dir, p_mod), кожен рядок - розподіл на 5 класах.
    """
    batch = np.atleast_2d(z)
    (dir_logits, mod_logits), _ = heads.forward(batch)
    p_dir, p_mod = softmax(dir_logits), softmax(mod_logits)
    if np.ndim(z) == 1:
        return p_dir[0], p_mod[0]
    return p_dir, p_mod
