"""Додавання білого гаусового шуму з заданим SNR до батчу одного класу."""

import numpy as np


def noise_sigma(samples, snr_db):
    """σ_B = σ_X / 10^(B/20), де σ_X - стандартне відхилення всього батчу."""
    sigma_x = float(np.std(samples, dtype=np.float64))
    return sigma_x / (10 ** (snr_db / 20))


def inject_noise(samples, snr_db, rng):
    """
    Додає свіжий білий шум до вікон одного класу.

    Args:
        samples (ndarray): [items, channels, time] - вікна одного класу.
        snr_db (float | None): Цільовий SNR у дБ; None означає без шуму.
        rng (numpy.random.Generator): Потік випадкових чисел.

    Returns:
        ndarray: Зашумлені вікна (вхід без змін, якщо snr_db None або σ_X = 0).
    """
    if snr_db is None or samples.size == 0:
        return samples
    sigma_b = noise_sigma(samples, snr_db)
    if sigma_b == 0:
        return samples
    noise = rng.standard_normal(samples.shape) * sigma_b
    return (samples + noise).astype(samples.dtype)


def inject_noise_per_class(samples, classes, snr_db, rng):
    """Застосовує `inject_noise` окремо до кожного класу, присутнього у батчі."""
    if snr_db is None:
        return samples
    noisy = samples.copy()
    for class_index in np.unique(classes):
        members = classes == class_index
        noisy[members] = inject_noise(samples[members], snr_db, rng)
    return noisy
