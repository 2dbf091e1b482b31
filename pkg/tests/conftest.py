"""
Спільні фікстури тестів: крихітна синтетична когорта з короткими вікнами.
"""

import pytest

from comhom.data.synth import SynthCohortSpec, generate_synth_cohort

TINY_WINDOW = 32


@pytest.fixture(scope="session")
def tiny_spec():
    """Чотири суб'єкти, по три вікна на клас, вікна довжиною 32."""
    return SynthCohortSpec(subjects=4, singles_per_class=3, combos_per_class=3, window_samples=TINY_WINDOW)


@pytest.fixture(scope="session")
def tiny_cohort(tiny_spec):
    return generate_synth_cohort(tiny_spec, seed=0)
