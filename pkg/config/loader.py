"""
Модуль загрузки конфигурации.

Читает YAML файл настроек, накладывает его на значения по умолчанию
и предоставляет единый интерфейс для доступа к секциям.
"""

import copy
import math
import os
from typing import Any, Dict, Optional

import yaml


DEFAULT_CONFIG_DIR = "config"

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "potential": {
        "kind": "quartic",
        "amplitude": 1.0,
        "skew": 0.5,
        "bump": 0.02,
    },
    "bar": {
        "length": 1.0,
        "interface": 0.5,
        "modulus": 1.0,
        "eps_bar": 0.2,
        "body_force": [0.5],
        "u0": 0.0,
        "uL": 0.25,
    },
    "interface": {
        "kappa": 0.0,
        "kappa_prime": 0.0,
    },
    "kinetics": {
        "mu": 0.01,
        "lambda": 0.04,
        "mobility": 1.0,
        "mu0": math.exp(-2.0),
        "lambda0": 1.0,
    },
    "synthetic": {
        "lame_lambda": 1.0,
        "lame_mu": 1.0,
        "normal": [1.0, 0.0, 0.0],
        "eps_bar": [[0.1, 0.02, 0.0], [0.02, -0.05, 0.0], [0.0, 0.0, 0.03]],
        "T_minus": [[0.2, 0.0, 0.05], [0.0, 0.1, 0.0], [0.05, 0.0, -0.1]],
        "sigma_check0": 0.0,
        "sigma_hat_prime0": 0.0,
        "grad_term": 0.0,
    },
    "profiles": {
        "half_width": None,
        "points": 4001,
        "tail_tol": 1e-6,
    },
    "sim": {
        "geometry": "planar1d",
        "domain": None,
        "points": 801,
        "mu": 0.004,
        "lambda": 0.04,
        "mobility": 1.0,
        "R0": 0.25,
        "dt": None,
        "end_time": 0.02,
        "output_every": 20,
        "max_jump": 0.1,
        "overshoot_tol": 1e-3,
    },
    "sweep": {
        "kind": "speed",
        "mu": [4e-3, 2e-3, 1e-3, 5e-4],
        "lambda": [0.04],
        "measure_time": 0.02,
        "refine_check": True,
    },
    "residuals": {
        "mu": [1e-2, 5e-3, 2.5e-3, 1.25e-3],
        "lambda": 0.04,
        "points_per_width": 32,
    },
    "effort": {
        "target_error": 0.1,
        "curvature_norm": 1.0,
        "s10_norm": 1.0,
        "mobility": 1.0,
        "power": 2.0,
        "remainder_constant": 1.0,
    },
    "logging": {
        "level": "INFO",
        "file": "lab.log",
    },
}


def merge_settings(raw: Optional[Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    """
    Накладывает прочитанные настройки на значения по умолчанию.

    Raises:
        ValueError: Если встречена неизвестная секция или ключ
    """
    settings = copy.deepcopy(DEFAULTS)
    if raw is None:
        return settings
    if not isinstance(raw, dict):
        raise ValueError("Файл настроек должен содержать словарь секций")

    for section, values in raw.items():
        if section not in DEFAULTS:
            raise ValueError(f"Неизвестная секция настроек: {section}")
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ValueError(f"Секция {section} должна быть словарём")
        for key, value in values.items():
            if key not in DEFAULTS[section]:
                raise ValueError(f"Неизвестный ключ настроек: {section}.{key}")
            settings[section][key] = value
    return settings


class ConfigLoader:
    """Класс для загрузки конфигурации из YAML файла."""

    def __init__(self, config_dir: str = DEFAULT_CONFIG_DIR, path: Optional[str] = None):
        """
        Инициализация загрузчика конфигурации.

        Args:
            config_dir: Директория с settings.yaml
            path: Явный путь к файлу настроек (перекрывает config_dir)
        """
        self.path = path or os.path.join(config_dir, "settings.yaml")
        self.settings: Dict[str, Dict[str, Any]] = {}

    def load(self) -> None:
        """Загружает файл настроек."""
        if not os.path.exists(self.path):
            raise FileNotFoundError(f"Конфигурационный файл не найден: {self.path}")
        with open(self.path, 'r', encoding='utf-8') as f:
            self.settings = merge_settings(yaml.safe_load(f))

    def get_settings(self) -> Dict[str, Dict[str, Any]]:
        """Возвращает все настройки."""
        return self.settings

    def get_section(self, name: str) -> Dict[str, Any]:
        """
        Возвращает одну секцию настроек.

        Raises:
            KeyError: Если такой секции нет
        """
        if name not in self.settings:
            raise KeyError(f"Секция настроек не найдена: {name}")
        return self.settings[name]
