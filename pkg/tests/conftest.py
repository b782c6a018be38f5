"""Общие фикстуры тестов."""

import os

import pytest

from config.loader import merge_settings
from mechanics.transmission import Bar1D, solve_interface
from potential.double_well import make_asymmetric, make_quartic


ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture(scope="session")
def settings_path():
    return os.path.join(ROOT, "config", "settings.yaml")


@pytest.fixture
def settings():
    """Значения по умолчанию (без файла)."""
    return merge_settings(None)


@pytest.fixture(scope="session")
def quartic():
    return make_quartic()


@pytest.fixture(scope="session")
def asymmetric():
    return make_asymmetric()


@pytest.fixture(scope="session")
def bar():
    """Стержень с ε̄:T̂ = 0.03 и без объёмной силы."""
    return Bar1D(length=1.0, interface=0.5, modulus=1.0, eps_bar=0.2, body_force=(0.0,), u0=0.0, uL=0.25)


@pytest.fixture(scope="session")
def loaded_bar():
    """Тот же стержень под постоянной объёмной силой b = 0.5."""
    return Bar1D(length=1.0, interface=0.5, modulus=1.0, eps_bar=0.2, body_force=(0.5,), u0=0.0, uL=0.25)


@pytest.fixture(scope="session")
def bar_data(bar, quartic):
    return solve_interface(bar, quartic)
