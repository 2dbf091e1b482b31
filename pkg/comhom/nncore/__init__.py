"""Мінімальне диференційовне ядро: шари, втрати, AdamW, перевірка градієнтів, чекпоінти."""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import GradCheckReport, check_gradients, grad_check
from .graph import forward, forward_backward
from .layers import Conv1d, Dense, GlobalAvgPool, Layer, ReLU, Residual, Sequential
from .objectives import SoftmaxCrossEntropy, SquaredError, log_softmax, softmax, softmax_cross_entropy
from .optim import OptimizerState, adamw_step
from .rng import derive_seed, make_stream
from .tensor import CHECK_DTYPE, TRAIN_DTYPE, Parameter, ParameterSet, as_tensor, ensure_finite
