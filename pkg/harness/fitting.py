"""
Подгонка степенных законов в логарифмических координатах.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd


logger = logging.getLogger(__name__)

# Минимальное число точек на одну подгонку
MIN_POINTS = 4


@dataclass(frozen=True)
class FitResult:
    """
    Прямая наименьших квадратов log|y| = slope·log x + intercept.

    Attributes:
        name: Что подгонялось
        slope: Наклон (для плоскости по первой переменной)
        intercept: Свободный член
        residual: Среднеквадратичное отклонение точек от прямой
        points: Таблица точек (x, y)
        slope_lambda: Наклон по λ при совместной подгонке по (μ, λ)
    """
    name: str
    slope: float
    intercept: float
    residual: float
    points: pd.DataFrame = field(compare=False, repr=False)
    slope_lambda: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "name": self.name,
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "count": int(len(self.points)),
        }
        if self.slope_lambda is not None:
            data["slope_lambda"] = self.slope_lambda
        return data


def _usable(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.isfinite(x) & np.isfinite(y) & (x > 0) & (np.abs(y) > 0)


def fit_loglog(x: Sequence[float], y: Sequence[float], name: str) -> FitResult:
    """
    Наклон log|y| против log x.

    Raises:
        ValueError: Если пригодных точек меньше четырёх
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = _usable(x, y)
    if np.count_nonzero(mask) < MIN_POINTS:
        raise ValueError(f"{name}: для подгонки нужно не меньше {MIN_POINTS} точек, есть {np.count_nonzero(mask)}")
    lx, ly = np.log(x[mask]), np.log(np.abs(y[mask]))
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    logger.info(f"Подгонка {name}: наклон {slope:.4f} по {lx.size} точкам")
    return FitResult(name=name, slope=float(slope), intercept=float(intercept), residual=residual,
                     points=pd.DataFrame({"x": x[mask], "y": y[mask]}))


def fit_log_factor(mu: Sequence[float], y: Sequence[float], name: str) -> FitResult:
    """Вспомогательная подгонка против μ|ln μ|³."""
    mu = np.asarray(mu, dtype=float)
    scale = mu * np.abs(np.log(mu)) ** 3
    return fit_loglog(scale, y, f"{name} ~ mu|ln mu|^3")


def fit_plane(mu: Sequence[float], lam: Sequence[float], y: Sequence[float], name: str) -> FitResult:
    """
    Совместная подгонка log|y| = a·log μ + b·log λ + c.

    Raises:
        ValueError: Если точек меньше четырёх или значения μ либо λ не различаются
    """
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = _usable(mu, y) & np.isfinite(lam) & (lam > 0)
    if np.count_nonzero(mask) < MIN_POINTS:
        raise ValueError(f"{name}: для подгонки нужно не меньше {MIN_POINTS} точек, есть {np.count_nonzero(mask)}")
    if np.unique(mu[mask]).size < 2 or np.unique(lam[mask]).size < 2:
        raise ValueError(f"{name}: для подгонки по (μ, λ) нужны хотя бы два значения каждого параметра")

    design = np.column_stack([np.log(mu[mask]), np.log(lam[mask]), np.ones(np.count_nonzero(mask))])
    target = np.log(np.abs(y[mask]))
    params, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = float(np.sqrt(np.mean((target - design @ params) ** 2)))
    logger.info(f"Подгонка {name}: наклоны {params[0]:.4f} (μ), {params[1]:.4f} (λ)")
    return FitResult(name=name, slope=float(params[0]), intercept=float(params[2]), residual=residual,
                     points=pd.DataFrame({"mu": mu[mask], "lambda": lam[mask], "y": y[mask]}),
                     slope_lambda=float(params[1]))


def fit_table(table: pd.DataFrame, column: str, secondary: bool = False) -> Dict[str, Any]:
    """
    Все подгонки столбца: по μ при каждом λ, по λ при каждом μ и совместная.

    Подгонки, для которых не хватает точек, попадают в список errors.
    """
    fits, errors = [], []
    if column not in table or table.empty:
        return {"column": column, "fits": fits, "errors": [f"Столбца {column} нет в таблице"]}
    ok = table.dropna(subset=[column])

    def attempt(builder, *args):
        try:
            fits.append(builder(*args).to_dict())
        except ValueError as e:
            errors.append(str(e))

    for lam, group in ok.groupby("lambda", sort=True):
        attempt(fit_loglog, group["mu"], group[column], f"{column} ~ mu @ lambda={lam:g}")
        if secondary:
            attempt(fit_log_factor, group["mu"], group[column], f"{column} @ lambda={lam:g}")
    if ok["lambda"].nunique() > 1:
        for mu, group in ok.groupby("mu", sort=True):
            attempt(fit_loglog, group["lambda"], group[column], f"{column} ~ lambda @ mu={mu:g}")
    if ok["mu"].nunique() > 1 and ok["lambda"].nunique() > 1:
        attempt(fit_plane, ok["mu"], ok["lambda"], ok[column], f"{column} ~ mu, lambda")

    if not fits:
        logger.warning(f"Для {column} не удалось выполнить ни одной подгонки")
    return {"column": column, "fits": fits, "errors": errors}


def slope_within(value: float, bounds: Tuple[float, float]) -> bool:
    """Наклон в допустимой полосе [low, high]."""
    low, high = bounds
    return math.isfinite(value) and low <= value <= high
