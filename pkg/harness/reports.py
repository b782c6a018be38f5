"""
Запись таблиц CSV и сводок JSON.

Строки сортируются по (mu, lambda), поэтому одинаковые расчёты дают
побайтно одинаковые файлы.
"""

import json
import logging
import math
import os
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd


logger = logging.getLogger(__name__)

SORT_KEYS = ["mu", "lambda"]


def _to_builtin(value: Any) -> Any:
    """numpy-типы и вложенные структуры → типы json."""
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


def write_table(table: pd.DataFrame, path: str, columns: Optional[Sequence[str]] = None) -> str:
    """Пишет таблицу в CSV с объявленным порядком столбцов."""
    frame = table.copy()
    if columns is not None:
        missing = [c for c in columns if c not in frame]
        if missing:
            raise ValueError(f"В таблице нет столбцов: {', '.join(missing)}")
        frame = frame[list(columns)]
    keys = [k for k in SORT_KEYS if k in frame]
    if keys:
        frame = frame.sort_values(keys, kind="mergesort").reset_index(drop=True)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Таблица записана: {path} ({len(frame)} строк)")
    return path


def write_summary(summary: Dict[str, Any], path: str) -> str:
    """Пишет сводку в JSON; нечисловые значения (NaN, inf) записываются как null."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(_to_builtin(summary), f, indent=2, ensure_ascii=False, sort_keys=True)
    logger.info(f"Сводка записана: {path}")
    return path


def read_summary(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Файл сводки не найден: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)
