"""
Параметри моделі та перевірки тензорів.

Тензор у цьому пакеті - це `numpy.ndarray` (float32 для навчання, float64
для режиму перевірки градієнтів). `ParameterSet` зберігає іменовані
параметри разом з акумуляторами градієнтів тієї ж форми.
"""

from collections import OrderedDict

import numpy as np

from comhom.common.exceptions import NumericError, ShapeError

TRAIN_DTYPE = np.float32
CHECK_DTYPE = np.float64


def ensure_finite(array, layer):
    """Перевіряє, що всі значення скінченні, інакше кидає `NumericError`."""
    if not np.all(np.isfinite(array)):
        raise NumericError(f"Нескінченні або NaN значення на виході шару '{layer}'", layer=layer)
    return array


def as_tensor(values, shape=None, dtype=TRAIN_DTYPE):
    """
    Перетворює значення на тензор і перевіряє форму та скінченність.

    Raises:
        ShapeError: Якщо кількість значень не відповідає формі.
        NumericError: Якщо є NaN/Inf.
    """
    array = np.asarray(values, dtype=dtype)
    if shape is not None:
        shape = tuple(shape)
        if int(np.prod(shape)) != array.size:
            raise ShapeError(f"Форма {shape} не відповідає кількості значень {array.size}")
        array = array.reshape(shape)
    return ensure_finite(array, "input")


class Parameter:
    """Один навчуваний тензор з акумулятором градієнта."""

    __slots__ = ("value", "grad")

    def __init__(self, value):
        self.value = value
        self.grad = np.zeros_like(value)

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Parameter(shape={self.value.shape}, dtype={self.value.dtype})"


class ParameterSet:
    """
    Іменована колекція параметрів з детермінованим порядком обходу (за іменем).

    Декілька наборів можна об'єднати через `merge`: об'єднаний набір посилається
    на ті самі об'єкти `Parameter`, тож оптимізатор оновлює їх на місці.
    """

    def __init__(self, parameters=None):
        self._parameters = OrderedDict()
        for name, value in sorted((parameters or {}).items()):
            self.add(name, value)

    def add(self, name, value):
        if name in self._parameters:
            raise ShapeError(f"Параметр '{name}' вже існує")
        param = value if isinstance(value, Parameter) else Parameter(np.asarray(value))
        self._parameters[name] = param
        self._parameters = OrderedDict(sorted(self._parameters.items()))
        return param

    def __getitem__(self, name):
        return self._parameters[name]

    def __contains__(self, name):
        return name in self._parameters

    def __iter__(self):
        return iter(self._parameters.items())

    def __len__(self):
        return len(self._parameters)

    def names(self):
        return list(self._parameters)

    def value(self, name):
        return self._parameters[name].value

    def accumulate(self, name, grad):
        param = self._parameters[name]
        if grad.shape != param.value.shape:
            raise ShapeError(f"Градієнт {grad.shape} не відповідає параметру '{name}' {param.value.shape}")
        param.grad += grad

    def zero_grad(self):
        for _, param in self:
            param.grad.fill(0)

    def count(self):
        """Загальна кількість навчуваних скалярів."""
        return int(sum(param.value.size for _, param in self))

    def copy(self):
        """Глибока копія значень (градієнти обнуляються)."""
        return ParameterSet({name: Parameter(param.value.copy()) for name, param in self})

    def astype(self, dtype):
        """Копія з іншим типом даних (для режиму float64 у grad_check)."""
        return ParameterSet({name: Parameter(param.value.astype(dtype)) for name, param in self})

    def load_values(self, other):
        """Копіює значення з іншого набору з тими ж іменами та формами."""
        for name, param in self:
            if name not in other:
                raise ShapeError(f"Параметр '{name}' відсутній у джерелі")
            source = other.value(name)
            if source.shape != param.value.shape:
                raise ShapeError(f"Форма параметра '{name}' не збігається: {source.shape} != {param.value.shape}")
            param.value[...] = source

    def subset(self, prefix):
        """Набір, що посилається лише на параметри з заданим префіксом."""
        return ParameterSet({name: param for name, param in self if name.startswith(prefix)})

    @staticmethod
    def merge(*sets):
        merged = ParameterSet()
        for parameter_set in sets:
            for name, param in parameter_set:
                merged.add(name, param)
        return merged

    def state_dict(self):
        return {name: param.value for name, param in self}
