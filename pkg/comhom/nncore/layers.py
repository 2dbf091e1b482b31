"""
Шари мінімального диференційовного ядра.

Кожен шар працює у функціональному стилі: `forward(params, x)` повертає вихід
та кеш, а `backward(params, cache, dy)` повертає градієнт за входом і додає
градієнти параметрів в акумулятори `ParameterSet`. Завдяки явному кешу один і
той самий граф можна викликати декілька разів за крок (наприклад, класифікатор
на реальних і синтетичних ознаках).
"""

from abc import ABC, abstractmethod

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from comhom.common.exceptions import ShapeError
from .tensor import ensure_finite


class Layer(ABC):
    """Базовий клас шару."""

    def __init__(self, name):
        self.name = name
        self.scope = name

    def set_scope(self, prefix):
        self.scope = f"{prefix}.{self.name}" if prefix else self.name

    def param_name(self, suffix):
        return f"{self.scope}.{suffix}"

    def init_params(self, rng, dtype=np.float32):
        """Повертає словник {повне ім'я: масив} початкових значень."""
        return {}

    def check_input(self, x):
        pass

    @abstractmethod
    def forward(self, params, x):
        pass

    @abstractmethod
    def backward(self, params, cache, dy):
        pass


def _kaiming_uniform(rng, shape, fan_in, dtype):
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Dense(Layer):
    """Повнозв'язний шар y = x W^T + b для входу [batch, in]."""

    def __init__(self, name, in_features, out_features, zero_init=False):
        super().__init__(name)
        self.in_features = in_features
        self.out_features = out_features
        self.zero_init = zero_init

    def init_params(self, rng, dtype=np.float32):
        shape = (self.out_features, self.in_features)
        weight = np.zeros(shape, dtype=dtype) if self.zero_init else _kaiming_uniform(rng, shape, self.in_features, dtype)
        return {
            self.param_name("weight"): weight,
            self.param_name("bias"): np.zeros(self.out_features, dtype=dtype),
        }

    def check_input(self, x):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(f"Шар '{self.scope}' очікує [batch, {self.in_features}], отримано {list(x.shape)}")

    def forward(self, params, x):
        self.check_input(x)
        weight = params.value(self.param_name("weight"))
        bias = params.value(self.param_name("bias"))
        return x @ weight.T + bias, x

    def backward(self, params, cache, dy):
        x = cache
        weight = params.value(self.param_name("weight"))
        params.accumulate(self.param_name("weight"), dy.T @ x)
        params.accumulate(self.param_name("bias"), dy.sum(axis=0))
        return dy @ weight


class Conv1d(Layer):
    """Одновимірна згортка з нульовим доповненням для входу [batch, channels, time]."""

    def __init__(self, name, in_channels, out_channels, kernel_size, stride=1, padding=None):
        super().__init__(name)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = kernel_size // 2 if padding is None else padding

    def init_params(self, rng, dtype=np.float32):
        fan_in = self.in_channels * self.kernel_size
        shape = (self.out_channels, self.in_channels, self.kernel_size)
        return {
            self.param_name("weight"): _kaiming_uniform(rng, shape, fan_in, dtype),
            self.param_name("bias"): np.zeros(self.out_channels, dtype=dtype),
        }

    def output_length(self, length):
        return (length + 2 * self.padding - self.kernel_size) // self.stride + 1

    def check_input(self, x):
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ShapeError(f"Шар '{self.scope}' очікує [batch, {self.in_channels}, time], отримано {list(x.shape)}")
        if self.output_length(x.shape[2]) < 1:
            raise ShapeError(f"Шар '{self.scope}': вхід довжиною {x.shape[2]} закороткий для ядра {self.kernel_size}")

    def forward(self, params, x):
        self.check_input(x)
        batch, channels, length = x.shape
        out_length = self.output_length(length)
        padded = np.pad(x, ((0, 0), (0, 0), (self.padding, self.padding)))
        windows = sliding_window_view(padded, self.kernel_size, axis=2)[:, :, ::self.stride][:, :, :out_length]
        # [batch, out_length, in_channels * kernel]
        cols = np.ascontiguousarray(windows.transpose(0, 2, 1, 3)).reshape(batch, out_length, -1)
        weight = params.value(self.param_name("weight")).reshape(self.out_channels, -1)
        bias = params.value(self.param_name("bias"))
        y = cols @ weight.T + bias
        return np.ascontiguousarray(y.transpose(0, 2, 1)), (cols, length)

    def backward(self, params, cache, dy):
        cols, length = cache
        batch, out_length, _ = cols.shape
        weight = params.value(self.param_name("weight"))
        dy_t = dy.transpose(0, 2, 1)
        d_weight = dy_t.reshape(-1, self.out_channels).T @ cols.reshape(-1, cols.shape[2])
        params.accumulate(self.param_name("weight"), d_weight.reshape(weight.shape))
        params.accumulate(self.param_name("bias"), dy.sum(axis=(0, 2)))

        d_cols = (dy_t @ weight.reshape(self.out_channels, -1)).reshape(batch, out_length, self.in_channels, self.kernel_size)
        d_padded = np.zeros((batch, self.in_channels, length + 2 * self.padding), dtype=dy.dtype)
        span = self.stride * (out_length - 1) + 1
        for k in range(self.kernel_size):
            d_padded[:, :, k:k + span:self.stride] += d_cols[:, :, :, k].transpose(0, 2, 1)
        return d_padded[:, :, self.padding:self.padding + length]


class ReLU(Layer):

    def forward(self, params, x):
        mask = x > 0
        return x * mask, mask

    def backward(self, params, cache, dy):
        return dy * cache


class GlobalAvgPool(Layer):
    """Середнє за часовою віссю: [batch, channels, time] -> [batch, channels]."""

    def forward(self, params, x):
        if x.ndim != 3:
            raise ShapeError(f"Шар '{self.scope}' очікує тривимірний вхід, отримано {list(x.shape)}")
        return x.mean(axis=2), x.shape[2]

    def backward(self, params, cache, dy):
        length = cache
        return np.repeat(dy[:, :, None] / length, length, axis=2)


class Sequential(Layer):
    """Послідовність шарів; перевіряє скінченність виходу кожного шару."""

    def __init__(self, name, layers):
        super().__init__(name)
        self.layers = list(layers)
        self.set_scope("")

    def set_scope(self, prefix):
        super().set_scope(prefix)
        for layer in self.layers:
            layer.set_scope(self.scope)

    def init_params(self, rng, dtype=np.float32):
        values = {}
        for layer in self.layers:
            values.update(layer.init_params(rng, dtype))
        return values

    def check_input(self, x):
        if self.layers:
            self.layers[0].check_input(x)

    def forward(self, params, x):
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(params, x)
            ensure_finite(x, layer.scope)
            caches.append(cache)
        return x, caches

    def backward(self, params, cache, dy):
        for layer, layer_cache in zip(reversed(self.layers), reversed(cache)):
            dy = layer.backward(params, layer_cache, dy)
        return dy


class Residual(Layer):
    """Залишкове додавання: y = x + body(x); форма body(x) має збігатися з x."""

    def __init__(self, name, body):
        super().__init__(name)
        self.body = body
        self.set_scope("")

    def set_scope(self, prefix):
        super().set_scope(prefix)
        self.body.set_scope(self.scope)

    def init_params(self, rng, dtype=np.float32):
        return self.body.init_params(rng, dtype)

    def check_input(self, x):
        self.body.check_input(x)

    def forward(self, params, x):
        out, cache = self.body.forward(params, x)
        if out.shape != x.shape:
            raise ShapeError(f"Залишковий блок '{self.scope}' змінює форму {list(x.shape)} -> {list(out.shape)}")
        return x + out, cache

    def backward(self, params, cache, dy):
        return dy + self.body.backward(params, cache, dy)
