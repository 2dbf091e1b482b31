"""
Класифікатори G^Test, що навчаються з нуля на заморожених ознаках.

Модель складається з двох незалежних 5-класових голів (напрямок та
модифікатор) одного алгоритму scikit-learn. Прогноз (NoDir, NoMod)
допустимий і трактується як викид.
"""

from dataclasses import dataclass
from typing import Literal

import joblib
import numpy as np
from pydantic import BaseModel, ConfigDict
from sklearn.base import clone
from sklearn.discriminant_analysis import LinearDiscriminantAnalysis
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.neighbors import KNeighborsClassifier
from sklearn.tree import DecisionTreeClassifier

from comhom.common.exceptions import ConfigurationError, DegenerateFitError
from comhom.data.labels import DIRECTIONS, GestureLabel

ALGORITHMS = ("rf", "knn", "dt", "lda", "logreg")


class DownstreamSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algorithm: Literal["rf", "knn", "dt", "lda", "logreg"] = "rf"
    n_estimators: int = 100
    n_neighbors: int = 5
    seed: int = 0


def make_estimator(spec):
    """Оцінювач scikit-learn з зафіксованими гіперпараметрами."""
    if spec.algorithm == "rf":
        return RandomForestClassifier(
            n_estimators=spec.n_estimators, criterion="gini", max_features="sqrt",
            bootstrap=True, random_state=spec.seed,
        )
    if spec.algorithm == "knn":
        return KNeighborsClassifier(n_neighbors=spec.n_neighbors)
    if spec.algorithm == "dt":
        return DecisionTreeClassifier(criterion="gini", random_state=spec.seed)
    if spec.algorithm == "lda":
        return LinearDiscriminantAnalysis(solver="lsqr", shrinkage=1e-6)
    if spec.algorithm == "logreg":
        return LogisticRegression(C=1e4, max_iter=1000, tol=1e-6)
    raise ConfigurationError(f"Невідомий алгоритм: {spec.algorithm}")


@dataclass
class DownstreamModel:
    spec: DownstreamSpec
    direction: object
    modifier: object

    def predict_components(self, features):
        return (
            np.asarray(self.direction.predict(features), dtype=np.int64),
            np.asarray(self.modifier.predict(features), dtype=np.int64),
        )


def _check_targets(head, targets):
    if np.unique(targets).size < 2:
        raise DegenerateFitError(f"Голова '{head}' отримала цілі лише одного класу")


def _check_direction_coverage(directions):
    missing = sorted(set(range(len(DIRECTIONS))) - set(np.unique(directions).tolist()))
    if missing:
        names = [DIRECTIONS[i].value for i in missing]
        raise DegenerateFitError(f"Голова 'direction' не має цілей для напрямків {names}")


def fit_downstream(spec, calib):
    """
    Навчає дві незалежні голови на калібрувальному наборі.

    Raises:
        DegenerateFitError: Набір порожній, голова має один клас цілей
            або серед напрямків бракує хоча б одного значення.
    """
    if len(calib) == 0:
        raise DegenerateFitError("Порожній калібрувальний набір")
    _check_targets("direction", calib.directions)
    _check_direction_coverage(calib.directions)
    _check_targets("modifier", calib.modifiers)
    estimator = make_estimator(spec)
    direction = clone(estimator).fit(calib.features, calib.directions)
    modifier = clone(estimator).fit(calib.features, calib.modifiers)
    return DownstreamModel(spec=spec, direction=direction, modifier=modifier)


def predict(model, features):
    """Мітка кожного елемента: (argmax напрямку, argmax модифікатора)."""
    directions, modifiers = model.predict_components(features)
    return [GestureLabel.from_indices(d, m) for d, m in zip(directions, modifiers)]


def dump_model(model, path):
    """Серіалізує модель разом з тегом алгоритму (для аудиту)."""
    joblib.dump({"algorithm": model.spec.algorithm, "spec": model.spec.model_dump(),
                 "direction": model.direction, "modifier": model.modifier}, path)


def load_model_file(path):
    record = joblib.load(path)
    return DownstreamModel(
        spec=DownstreamSpec.model_validate(record["spec"]), direction=record["direction"], modifier=record["modifier"],
    )
