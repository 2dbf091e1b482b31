"""
Енкодер F: одновимірна залишкова згорткова мережа [batch, 8, time] -> [batch, 64].

Архітектура: stem-згортка (ядро 7, крок 2), три залишкові блоки з двома
згортками ядра 3, між ними згортки-даунсемплери з кроком 2, глобальне
усереднення за часом та щільний шар 64 -> 64.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from comhom.common.exceptions import ShapeError
from comhom.nncore.graph import forward as graph_forward
from comhom.nncore.layers import Conv1d, Dense, GlobalAvgPool, ReLU, Residual, Sequential
from comhom.nncore.tensor import ParameterSet

FEATURE_DIM = 64


class EncoderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    in_channels: int = Field(8, ge=1)
    stem_channels: int = Field(32, ge=1)
    width: int = Field(64, ge=1)
    stem_kernel: int = Field(7, ge=1)
    feature_dim: int = Field(FEATURE_DIM, ge=1)


def _residual_block(name, channels):
    body = Sequential("body", [
        Conv1d("conv1", channels, channels, 3),
        ReLU("relu"),
        Conv1d("conv2", channels, channels, 3),
    ])
    return [Residual(name, body), ReLU(f"{name}_relu")]


def build_encoder_graph(config, zero_init_output=False):
    c, w = config.stem_channels, config.width
    layers = [
        Conv1d("stem", config.in_channels, c, config.stem_kernel, stride=2),
        ReLU("stem_relu"),
        *_residual_block("block1", c),
        Conv1d("down1", c, w, 3, stride=2),
        ReLU("down1_relu"),
        *_residual_block("block2", w),
        Conv1d("down2", w, w, 3, stride=2),
        ReLU("down2_relu"),
        *_residual_block("block3", w),
        GlobalAvgPool("pool"),
        Dense("proj", w, config.feature_dim, zero_init=zero_init_output),
    ]
    return Sequential("encoder", layers)


class Encoder:
    """Граф енкодера разом з його параметрами."""

    def __init__(self, config, graph, params):
        self.config = config
        self.graph = graph
        self.params = params

    @classmethod
    def create(cls, config, rng, zero_init_output=False):
        graph = build_encoder_graph(config, zero_init_output)
        return cls(config, graph, ParameterSet(graph.init_params(rng)))

    @property
    def output_dim(self):
        return self.config.feature_dim

    def parameter_count(self):
        return self.params.count()

    def forward(self, x):
        return self.graph.forward(self.params, x)

    def backward(self, cache, dz):
        return self.graph.backward(self.params, cache, dz)


def _as_samples(windows):
    if isinstance(windows, np.ndarray):
        return windows
    return np.stack([w.samples for w in windows]) if len(windows) else np.zeros((0, 0, 0), dtype=np.float32)


def encode(encoder, windows, batch_size=256):
    """
    Кодує вікна у вектори ознак, зберігаючи порядок.

    Args:
        encoder (Encoder): Енкодер.
        windows: ndarray [N, channels, time] або послідовність `Window`.
        batch_size (int): Розмір під-батчу для обмеження пам'яті.

    Returns:
        ndarray: [N, feature_dim] float32.

    Raises:
        ShapeError: Якщо вікна мають хибну кількість каналів.
    """
    samples = _as_samples(windows)
    if samples.shape[0] == 0:
        return np.zeros((0, encoder.output_dim), dtype=np.float32)
    if samples.ndim != 3 or samples.shape[1] != encoder.config.in_channels:
        raise ShapeError(f"Енкодер очікує [N, {encoder.config.in_channels}, time], отримано {list(samples.shape)}")
    samples = samples.astype(encoder.params.value(encoder.params.names()[0]).dtype, copy=False)
    parts = [graph_forward(encoder.graph, encoder.params, samples[i:i + batch_size]) for i in range(0, len(samples), batch_size)]
    return np.concatenate(parts)
