"""
Тести для голів попереднього навчання.
"""

import numpy as np
import pytest

from comhom.common.exceptions import ConfigurationError
from comhom.model.heads import LARGE, SMALL, PretrainHeads, classify_heads
from comhom.nncore.rng import make_stream


@pytest.mark.parametrize("size, expected", [(SMALL, 650), (LARGE, 32074)])
def test_parameter_counts(size, expected):
    heads = PretrainHeads.create(size, make_stream(0, "heads"))
    assert heads.parameter_count() == expected


def test_heads_share_no_parameters():
    heads = PretrainHeads.create(SMALL, make_stream(0, "heads"))
    assert all(name.startswith(("heads.direction.", "heads.modifier.")) for name in heads.params.names())


def test_classify_returns_distributions():
    """Тестує, що кожна голова повертає розподіл на 5 класах."""
    heads = PretrainHeads.create(LARGE, make_stream(0, "heads"))
    z = make_stream(1, "z").standard_normal((4, 64)).astype(np.float32)

    p_dir, p_mod = classify_heads(heads, z)

    assert p_dir.shape == (4, 5) and p_mod.shape == (4, 5)
    np.testing.assert_allclose(p_dir.sum(axis=1), 1, rtol=1e-5)
    single_dir, _ = classify_heads(heads, z[0])
    np.testing.assert_allclose(single_dir, p_dir[0], rtol=1e-5)


def test_unknown_size():
    with pytest.raises(ConfigurationError):
        PretrainHeads.create("medium", make_stream(0, "heads"))
