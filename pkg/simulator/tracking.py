"""
Положение и скорость границы по уровню S = 1/2.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from simulator.state import PLANAR, SimState


logger = logging.getLogger(__name__)

# Окно (в записанных точках) для центральной разности положения
SPEED_WINDOW = 5


class TopologyChangeError(RuntimeError):
    """Уровень S = 1/2 пересекается не ровно один раз."""


def level_crossings(x: np.ndarray, S: np.ndarray, level: float = 0.5) -> np.ndarray:
    """Все пересечения уровня с линейной интерполяцией между узлами."""
    d = np.asarray(S, dtype=float) - level
    idx = np.nonzero(d[:-1] * d[1:] < 0.0)[0]
    weight = d[idx] / (d[idx] - d[idx + 1])
    between = x[idx] + weight * (x[idx + 1] - x[idx])
    exact = x[d == 0.0]
    return np.sort(np.concatenate([between, exact]))


def locate_level(x: np.ndarray, S: np.ndarray, level: float = 0.5) -> float:
    """
    Единственное пересечение уровня.

    Raises:
        TopologyChangeError: Если пересечений нет или больше одного
    """
    crossings = level_crossings(x, S, level)
    if crossings.size != 1:
        raise TopologyChangeError(
            f"Уровень S={level:g} пересекается {crossings.size} раз(а)"
            + (f" в точках {np.array2string(crossings[:5], precision=4)}" if crossings.size else "")
        )
    return float(crossings[0])


def orientation(geometry: str) -> float:
    """
    Знак перевода dγ/dt в нормальную скорость.

    Нормаль направлена в фазу S = 1: в плоском случае вдоль +x, в радиальном
    случае (S = 1 внутри) к центру, поэтому s = −dR/dt.
    """
    return 1.0 if geometry == PLANAR else -1.0


def window_speed(times: Sequence[float], positions: Sequence[float], window: int = SPEED_WINDOW) -> float:
    """Центральная разность по последним window записям; NaN, если записей мало."""
    if len(times) < window:
        return float("nan")
    dt = times[-1] - times[-window]
    if dt <= 0:
        raise ValueError("Моменты записи должны возрастать")
    return (positions[-1] - positions[-window]) / dt


def speed_series(times: Sequence[float], positions: Sequence[float], geometry: str,
                 window: int = SPEED_WINDOW) -> np.ndarray:
    """Нормальная скорость в центре каждого окна; NaN по краям ряда."""
    t = np.asarray(times, dtype=float)
    p = np.asarray(positions, dtype=float)
    half = window // 2
    speeds = np.full(t.size, np.nan)
    if t.size >= window:
        speeds[half:t.size - half] = (p[window - 1:] - p[:t.size - window + 1]) / (t[window - 1:] - t[:t.size - window + 1])
    return orientation(geometry) * speeds


def track_interface(state: SimState) -> Tuple[float, float]:
    """
    Положение границы в текущем состоянии и нормальная скорость по истории.

    Скорость: центральная разность по окну из пяти последних записей
    (текущее состояние добавляется, если оно ещё не записано).
    """
    position = locate_level(state.x, state.S)
    times, positions = list(state.times), list(state.positions)
    if not times or times[-1] < state.t:
        times.append(state.t)
        positions.append(position)
    speed = orientation(state.geometry) * window_speed(times, positions)
    return position, speed


def measure_width(x: np.ndarray, S: np.ndarray, low: float = 0.1, high: float = 0.9) -> float:
    """Расстояние между пересечениями уровней low и high."""
    return abs(locate_level(x, S, high) - locate_level(x, S, low))
