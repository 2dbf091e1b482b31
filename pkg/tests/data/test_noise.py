"""
Тести для додавання шуму з заданим SNR.
"""

import numpy as np

from comhom.data.noise import inject_noise, inject_noise_per_class, noise_sigma


def test_noise_sigma_formula():
    samples = np.array([[-1.0, 1.0]])
    assert np.isclose(noise_sigma(samples, 20.0), 0.1)
    assert np.isclose(noise_sigma(samples, 0.0), 1.0)


def test_injected_noise_has_target_level():
    """Емпіричне стандартне відхилення шуму близьке до σ_X / 10^(B/20)."""
    # Arrange
    rng = np.random.default_rng(0)
    samples = rng.standard_normal((50, 8, 200)).astype(np.float32) * 3

    # Act
    noisy = inject_noise(samples, 10.0, np.random.default_rng(1))

    # Assert
    expected = samples.std() / 10 ** 0.5
    assert abs((noisy - samples).std() / expected - 1) < 0.02


def test_none_snr_and_constant_signal_are_untouched():
    samples = np.ones((2, 1, 4), dtype=np.float32)
    assert inject_noise(samples, None, np.random.default_rng(0)) is samples
    np.testing.assert_array_equal(inject_noise(samples, 20.0, np.random.default_rng(0)), samples)


def test_per_class_noise_uses_class_statistics():
    """Кожен клас зашумлюється відносно власного σ_X."""
    rng = np.random.default_rng(2)
    quiet = rng.standard_normal((20, 1, 500)) * 0.01
    loud = rng.standard_normal((20, 1, 500)) * 100
    samples = np.concatenate([quiet, loud])
    classes = np.array([0] * 20 + [1] * 20)

    noisy = inject_noise_per_class(samples, classes, 0.0, np.random.default_rng(3))

    assert (noisy[:20] - quiet).std() < 0.02
    assert (noisy[20:] - loud).std() > 50
