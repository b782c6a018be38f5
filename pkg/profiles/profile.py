"""
Профили на растянутой координате ζ и гладкая срезающая функция.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline


ArrayLike = Union[float, np.ndarray]

# Допуск хвостов профилей по умолчанию
TAIL_TOL = 1e-6


def make_grid(half_width: float, points: int) -> np.ndarray:
    """
    Равномерная сетка на [−Z, Z], симметричная и содержащая ζ = 0 точно.

    Raises:
        ValueError: Для чётного числа точек или неположительной полуширины
    """
    if half_width <= 0:
        raise ValueError(f"Полуширина сетки должна быть положительной, получено {half_width}")
    if points < 5 or points % 2 == 0:
        raise ValueError(f"Число точек сетки должно быть нечётным и ≥ 5, получено {points}")
    m = points // 2
    return np.arange(-m, m + 1) * (half_width / m)


@dataclass(eq=False)
class Profile:
    """
    Функция ζ на усечённой сетке.

    Attributes:
        name: Имя профиля (S0, S1, S2, rho1, rho2)
        grid: Узлы ζ
        values: Значения в узлах
        left_limit: Асимптота при ζ → −∞, вычисленная на левом конце сетки
        right_limit: Асимптота при ζ → +∞, вычисленная на правом конце сетки
        decay_rate: Ожидаемая скорость затухания a
        left_slope: Наклон продолжения за левым концом (линейный рост S₂)
        right_slope: Наклон продолжения за правым концом
        derivative: Точная первая производная в узлах, если она известна
    """
    name: str
    grid: np.ndarray
    values: np.ndarray
    left_limit: float
    right_limit: float
    decay_rate: float
    left_slope: float = 0.0
    right_slope: float = 0.0
    derivative: Optional[np.ndarray] = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size != np.asarray(self.values).size:
            raise ValueError(f"{self.name}: размеры сетки и значений не совпадают")
        if np.any(np.diff(grid) <= 0):
            raise ValueError(f"{self.name}: сетка должна строго возрастать")
        if not np.allclose(grid, -grid[::-1], rtol=0.0, atol=1e-12):
            raise ValueError(f"{self.name}: сетка должна быть симметричной относительно 0")
        if grid[grid.size // 2] != 0.0:
            raise ValueError(f"{self.name}: сетка должна содержать ζ = 0")

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def center(self) -> int:
        """Индекс узла ζ = 0."""
        return self.grid.size // 2

    @property
    def half_width(self) -> float:
        return float(self.grid[-1])

    def tail_defect(self) -> float:
        """max(|values[0] − left_limit|, |values[-1] − right_limit|)."""
        return max(abs(self.values[0] - self.left_limit), abs(self.values[-1] - self.right_limit))

    def check_tails(self, tail_tol: float = TAIL_TOL) -> None:
        """
        Raises:
            ValueError: Если хвост не вышел на асимптоту с допуском tail_tol
        """
        defect = self.tail_defect()
        if defect > tail_tol:
            raise ValueError(f"{self.name}: хвост отличается от асимптоты на {defect:.3e} > {tail_tol:g}")

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.grid, self.values)

    def __call__(self, zeta: ArrayLike, derivative: int = 0) -> ArrayLike:
        """
        Значение или производная (до второй) в произвольных точках.

        Внутри сетки кубический сплайн, снаружи линейное продолжение
        с наклонами left_slope / right_slope.
        """
        z = np.asarray(zeta, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        values = self._spline(np.clip(z, lo, hi), derivative)
        if derivative == 0:
            values = np.where(z > hi, self.values[-1] + self.right_slope * (z - hi), values)
            values = np.where(z < lo, self.values[0] + self.left_slope * (z - lo), values)
        elif derivative == 1:
            values = np.where(z > hi, self.right_slope, values)
            values = np.where(z < lo, self.left_slope, values)
        else:
            values = np.where((z > hi) | (z < lo), 0.0, values)
        return float(values) if values.ndim == 0 else values


def _bump_factor(t: np.ndarray, derivative: int) -> np.ndarray:
    """f(t) = e^{−1/t} при t > 0 и её производные до второй."""
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    f = np.exp(-1.0 / tp)
    if derivative == 0:
        out[pos] = f
    elif derivative == 1:
        out[pos] = f / tp ** 2
    else:
        out[pos] = f * (1.0 / tp ** 4 - 2.0 / tp ** 3)
    return out


def smooth_step(zeta: ArrayLike, derivative: int = 0) -> ArrayLike:
    """
    C^∞-ступенька φ: 0 при ζ ≤ 1, 1 при ζ ≥ 2.

    φ(ζ) = f(t)/(f(t) + f(1 − t)), t = ζ − 1, f(t) = e^{−1/t}. Подойдёт любая
    гладкая монотонная ступенька: разница поглощается сдвигом β·S₀'.

    Args:
        zeta: Точки
        derivative: Порядок производной 0..2
    """
    t = np.asarray(zeta, dtype=float) - 1.0
    p, q = _bump_factor(t, 0), _bump_factor(1.0 - t, 0)
    total = p + q
    if derivative == 0:
        values = p / total
    else:
        dp, dq = _bump_factor(t, 1), -_bump_factor(1.0 - t, 1)
        numerator = dp * q - p * dq
        if derivative == 1:
            values = numerator / total ** 2
        else:
            ddp, ddq = _bump_factor(t, 2), _bump_factor(1.0 - t, 2)
            values = ((ddp * q - p * ddq) * total - 2.0 * numerator * (dp + dq)) / total ** 3
    return float(values) if np.ndim(values) == 0 else values


def plateau(r: ArrayLike, derivative: int = 0) -> ArrayLike:
    """Функция φ_cut: 1 при |r| ≤ 1, 0 при |r| ≥ 2, гладкий переход между ними."""
    r = np.asarray(r, dtype=float)
    sign = np.sign(r)
    values = smooth_step(np.abs(r), derivative)
    if derivative == 0:
        values = 1.0 - values
    elif derivative == 1:
        values = -sign * values
    else:
        values = -values
    return float(values) if np.ndim(values) == 0 else values


def fit_decay(grid: np.ndarray, values: np.ndarray, window: Optional[tuple] = None,
              floor: float = 1e-13) -> float:
    """
    Наклон log|values| по |ζ| на окне хвоста (по умолчанию [Z/4, Z/2]) методом наименьших квадратов.

    Returns:
        Наклон (отрицательный для затухающего хвоста)
    """
    z = np.abs(np.asarray(grid, dtype=float))
    lo, hi = window if window is not None else (0.25 * z.max(), 0.5 * z.max())
    mask = (z >= lo) & (z <= hi) & (np.abs(values) > floor)
    if mask.sum() < 4:
        raise ValueError("Недостаточно точек хвоста для оценки скорости затухания")
    slope, _ = np.polyfit(z[mask], np.log(np.abs(values[mask])), 1)
    return float(slope)
