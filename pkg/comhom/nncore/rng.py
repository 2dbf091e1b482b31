"""
Детерміновані потоки випадкових чисел.

Кожен потік виводиться з пари (глобальний сід, тег призначення) і
базується на лічильниковому генераторі Philox, тож паралельні запуски не
ділять жодного стану.
"""

import zlib

import numpy as np


def _tag_key(tag):
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    return zlib.crc32(str(tag).encode('utf-8'))


def make_stream(seed, *tags):
    """
    Створює незалежний генератор для (сід, тег, ...).

    Args:
        seed (int): Глобальний сід.
        *tags: Рядки або цілі числа, що описують призначення потоку
            (наприклад, "pretrain", fold, "batch").

    Returns:
        numpy.random.Generator: Генератор на основі Philox.
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_tag_key(t) for t in tags))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed, *tags):
    """Ціле число-сід для (сід, теги), напр. окремий сід кожного (seed, fold)."""
    return int(make_stream(seed, *tags).integers(0, 2 ** 31 - 1))
