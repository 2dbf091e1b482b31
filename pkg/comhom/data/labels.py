"""
Словник двокомпонентних міток жестів.

Мітка складається з напрямку (Up, Down, Left, Right, NoDir) та модифікатора
(Thumb, Pinch, Fist, Open, NoMod). Порядок класів фіксований: 8 одиночних
(спершу напрямки, потім модифікатори), далі 16 комбінацій у порядку
"напрямок-старший". Пара (NoDir, NoMod) існує лише як прогноз-викид.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from comhom.common.exceptions import LabelError


class Direction(Enum):
    UP = "Up"
    DOWN = "Down"
    LEFT = "Left"
    RIGHT = "Right"
    NO_DIR = "NoDir"

    @property
    def index(self):
        return DIRECTIONS.index(self)


class Modifier(Enum):
    THUMB = "Thumb"
    PINCH = "Pinch"
    FIST = "Fist"
    OPEN = "Open"
    NO_MOD = "NoMod"

    @property
    def index(self):
        return MODIFIERS.index(self)


DIRECTIONS = list(Direction)
MODIFIERS = list(Modifier)
NO_DIR = Direction.NO_DIR.index
NO_MOD = Modifier.NO_MOD.index
N_ACTIVE = 4
N_SINGLE = 8
N_COMBO = 16
N_CLASSES = 24
OUTLIER_INDEX = 24


@dataclass(frozen=True)
class GestureLabel:
    """Двокомпонентна мітка жесту."""

    direction: Direction
    modifier: Modifier

    @classmethod
    def parse(cls, direction, modifier):
        try:
            return cls(Direction(direction), Modifier(modifier))
        except ValueError as e:
            raise LabelError(f"Невідома мітка: ({direction}, {modifier})") from e

    @classmethod
    def from_indices(cls, direction, modifier):
        return cls(DIRECTIONS[int(direction)], MODIFIERS[int(modifier)])

    @property
    def is_single(self):
        return (self.direction is Direction.NO_DIR) != (self.modifier is Modifier.NO_MOD)

    @property
    def is_combo(self):
        return self.direction is not Direction.NO_DIR and self.modifier is not Modifier.NO_MOD

    @property
    def is_outlier(self):
        return self.direction is Direction.NO_DIR and self.modifier is Modifier.NO_MOD

    @property
    def class_index(self):
        return int(class_indices(self.direction.index, self.modifier.index))

    def __str__(self):
        return f"({self.direction.value}, {self.modifier.value})"


def class_indices(directions, modifiers):
    """
    Векторно перетворює індекси компонентів на індекси класів 0..23 (24 - викид).
    """
    d = np.asarray(directions, dtype=np.int64)
    m = np.asarray(modifiers, dtype=np.int64)
    return np.where(
        (d < NO_DIR) & (m < NO_MOD), N_SINGLE + d * N_ACTIVE + m,
        np.where(m == NO_MOD, np.where(d == NO_DIR, OUTLIER_INDEX, d), N_ACTIVE + m),
    )


def class_components(index):
    """Повертає (індекс напрямку, індекс модифікатора) для індексу класу."""
    index = int(index)
    if index < N_ACTIVE:
        return index, NO_MOD
    if index < N_SINGLE:
        return NO_DIR, index - N_ACTIVE
    if index < N_CLASSES:
        return (index - N_SINGLE) // N_ACTIVE, (index - N_SINGLE) % N_ACTIVE
    if index == OUTLIER_INDEX:
        return NO_DIR, NO_MOD
    raise LabelError(f"Індекс класу поза діапазоном: {index}")


CLASS_LABELS = [GestureLabel.from_indices(*class_components(i)) for i in range(N_CLASSES)]
OUTLIER = GestureLabel(Direction.NO_DIR, Modifier.NO_MOD)
CLASS_NAMES = [f"{label.direction.value}+{label.modifier.value}" for label in CLASS_LABELS]
PREDICTION_NAMES = CLASS_NAMES + [f"{OUTLIER.direction.value}+{OUTLIER.modifier.value}"]
SINGLE_CLASSES = list(range(N_SINGLE))
COMBO_CLASSES = list(range(N_SINGLE, N_CLASSES))
