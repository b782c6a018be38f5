"""
Модуль двухъямного потенциала ψ̂.

Содержит тип потенциала с аналитическими производными до пятого порядка,
конструкторы канонического (квартичного) и асимметричного потенциалов,
а также производные константы a и c₁, которые используются во всех
остальных модулях.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate


logger = logging.getLogger(__name__)

# Максимальный порядок производной, который поставляет каждый потенциал
MAX_ORDER = 5

# Допуск для проверки ям ψ̂(0) = ψ̂(1) = 0 и ψ̂'(0) = ψ̂'(1) = 0
WELL_TOL = 1e-12

# Носитель C⁵-горба асимметричного потенциала
BUMP_LEFT = 0.2
BUMP_WIDTH = 0.6

# На таком расстоянии от ям горб равен нулю и ψ̂ = s²(1−s)²·g(s)
WELL_ZONE = BUMP_LEFT

ArrayLike = Union[float, np.ndarray]


class IntegrationError(RuntimeError):
    """Квадратура или интегратор ОДУ не достигли требуемой точности."""


@dataclass(frozen=True)
class DoubleWellPotential:
    """
    Двухъямный потенциал с ямами в 0 и 1.

    Attributes:
        name: Имя потенциала (для логов и отчётов)
        symmetric: Выполняется ли ψ̂(1/2 − ζ) = ψ̂(1/2 + ζ)
        derivatives: Функция (s, order) → значение производной порядка order
        weight: Множитель g(s) в ψ̂ = s²(1−s)²·g(s) около ям, если он известен
    """
    name: str
    symmetric: bool
    derivatives: Callable[[np.ndarray, int], np.ndarray]
    weight: Optional[Polynomial] = field(default=None, compare=False)

    def eval(self, s: ArrayLike, order: int = 0) -> ArrayLike:
        """
        Вычисляет ψ̂ или её производную.

        Args:
            s: Значение (или массив значений) параметра порядка
            order: Порядок производной от 0 до 5

        Returns:
            Скаляр для скалярного s, иначе массив той же формы

        Raises:
            ValueError: Если порядок вне диапазона 0..5
        """
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"Порядок производной должен быть в 0..{MAX_ORDER}, получено {order}")
        values = self.derivatives(np.asarray(s, dtype=float), order)
        if np.ndim(values) == 0:
            return float(values)
        return values

    def well_curvatures(self) -> Tuple[float, float]:
        """Возвращает пару (ψ̂''(0), ψ̂''(1))."""
        return self.eval(0.0, 2), self.eval(1.0, 2)

    def near_well(self, distance: ArrayLike, well: int) -> ArrayLike:
        """
        ψ̂ в точке s = well ± distance.

        Расстояние до ямы передаётся отдельно, поэтому при distance ≪ 1
        значение сохраняет относительную точность (1 − s не вычисляется).

        Args:
            distance: Расстояние d ≥ 0 до ямы
            well: 0 или 1

        Raises:
            ValueError: Если well не 0 и не 1
        """
        if well not in (0, 1):
            raise ValueError(f"Яма должна быть 0 или 1, получено {well}")
        d = np.asarray(distance, dtype=float)
        s = d if well == 0 else 1.0 - d
        values = np.asarray(self.eval(s), dtype=float)
        if self.weight is not None:
            close = d < WELL_ZONE
            values = np.where(close, d ** 2 * (1.0 - d) ** 2 * self.weight(s), values)
        return float(values) if values.ndim == 0 else values


def _well_derivatives(weight: Polynomial) -> Callable[[np.ndarray, int], np.ndarray]:
    """
    Производные ψ̂ = q·g, q = s²(1−s)².

    Порядки 0 и 1 считаются в разложенном на множители виде: в развёрнутом
    полиноме около ям слагаемые сокращаются до ошибки округления.
    """
    poly = Polynomial([0.0, 0.0, 1.0, -2.0, 1.0]) * weight
    table = [poly.deriv(k) if k > 0 else poly for k in range(MAX_ORDER + 1)]
    dweight = weight.deriv()

    def derivatives(s: np.ndarray, order: int) -> np.ndarray:
        if order > 1:
            return table[order](s)
        r = 1.0 - s
        q = s ** 2 * r ** 2
        if order == 0:
            return q * weight(s)
        return 2.0 * s * r * (r - s) * weight(s) + q * dweight(s)

    return derivatives


def make_quartic(amplitude: float = 1.0) -> DoubleWellPotential:
    """
    Канонический потенциал ψ̂(s) = A·s²(1−s)².

    Args:
        amplitude: Амплитуда A > 0

    Returns:
        Симметричный потенциал

    Raises:
        ValueError: Если амплитуда неположительна
    """
    if amplitude <= 0:
        raise ValueError(f"Амплитуда потенциала должна быть положительной, получено {amplitude}")

    weight = Polynomial([amplitude])
    psi = DoubleWellPotential(
        name=f"quartic(A={amplitude:g})",
        symmetric=True,
        derivatives=_well_derivatives(weight),
        weight=weight,
    )
    check_invariants(psi)
    return psi


def make_asymmetric(amplitude: float = 1.0, skew: float = 0.5, bump: float = 0.02) -> DoubleWellPotential:
    """
    Асимметричный тестовый потенциал.

    ψ̂(s) = s²(1−s)²(A + B·s) + h·β((s − 0.2)/0.6), где β(t) = (t(1−t))⁶
    на [0, 1] и ноль вне отрезка. Горб имеет класс C⁵, ямы имеют разные
    кривизны ψ̂''(0) = 2A и ψ̂''(1) = 2(A + B).

    Args:
        amplitude: A > 0
        skew: B, причём A + B > 0
        bump: Высота горба h ≥ 0

    Returns:
        Несимметричный потенциал

    Raises:
        ValueError: Если нарушены ограничения на параметры
    """
    if amplitude <= 0 or amplitude + skew <= 0:
        raise ValueError(
            f"Кривизны ям должны быть положительными: A={amplitude}, A+B={amplitude + skew}"
        )
    if bump < 0:
        raise ValueError(f"Высота горба не может быть отрицательной, получено {bump}")

    weight = Polynomial([amplitude, skew])
    base = _well_derivatives(weight)
    shape = Polynomial([0.0, 1.0, -1.0]) ** 6
    shape_table = [shape.deriv(k) if k > 0 else shape for k in range(MAX_ORDER + 1)]

    def derivatives(s: np.ndarray, order: int) -> np.ndarray:
        t = (s - BUMP_LEFT) / BUMP_WIDTH
        inside = (t > 0.0) & (t < 1.0)
        bump_part = np.where(inside, shape_table[order](t), 0.0) * bump / BUMP_WIDTH ** order
        return base(s, order) + bump_part

    psi = DoubleWellPotential(
        name=f"asymmetric(A={amplitude:g}, B={skew:g}, h={bump:g})",
        symmetric=False,
        derivatives=derivatives,
        weight=weight,
    )
    check_invariants(psi)
    return psi


def make_potential(kind: str, amplitude: float = 1.0, skew: float = 0.5, bump: float = 0.02) -> DoubleWellPotential:
    """
    Выбирает потенциал по имени (ключ potential.kind в настройках).

    Raises:
        ValueError: Для неизвестного имени
    """
    if kind == "quartic":
        return make_quartic(amplitude)
    if kind == "asymmetric":
        return make_asymmetric(amplitude, skew, bump)
    raise ValueError(f"Неизвестный тип потенциала: {kind}")


def build_potential(settings: Dict[str, Any]) -> DoubleWellPotential:
    """Строит потенциал из секции potential настроек."""
    section = settings["potential"]
    return make_potential(
        section["kind"],
        amplitude=section["amplitude"],
        skew=section["skew"],
        bump=section["bump"],
    )


def check_invariants(psi: DoubleWellPotential, samples: int = 201) -> None:
    """
    Проверяет свойства ям, положительность и (если заявлена) симметрию.

    Raises:
        ValueError: С указанием нарушенного свойства
    """
    for well in (0.0, 1.0):
        for order in (0, 1):
            value = psi.eval(well, order)
            if abs(value) > WELL_TOL:
                raise ValueError(f"{psi.name}: ψ̂^({order})({well:g}) = {value:.3e} вместо 0")

    interior = np.linspace(0.0, 1.0, samples)[1:-1]
    if np.any(psi.eval(interior) <= 0.0):
        raise ValueError(f"{psi.name}: ψ̂ должна быть положительной на (0, 1)")

    pp0, pp1 = psi.well_curvatures()
    if pp0 <= 0 or pp1 <= 0:
        raise ValueError(f"{psi.name}: ψ̂''(0)={pp0:g}, ψ̂''(1)={pp1:g} должны быть положительными")

    if psi.symmetric:
        zeta = np.linspace(0.0, 1.5, samples)
        defect = np.max(np.abs(psi.eval(0.5 - zeta) - psi.eval(0.5 + zeta)))
        if defect > WELL_TOL:
            raise ValueError(f"{psi.name}: заявлена симметрия, но дефект {defect:.3e}")


def decay_rate(psi: DoubleWellPotential) -> float:
    """
    Скорость экспоненциального затухания профилей a = min(√ψ̂''(0), √ψ̂''(1)).

    Raises:
        ValueError: Если одна из кривизн ям неположительна
    """
    pp0, pp1 = psi.well_curvatures()
    if pp0 <= 0 or pp1 <= 0:
        raise ValueError(
            f"Некорректный потенциал {psi.name}: ψ̂''(0)={pp0:g}, ψ̂''(1)={pp1:g}"
        )
    return min(math.sqrt(pp0), math.sqrt(pp1))


def c1_constant(psi: DoubleWellPotential, tol: float = 1e-10) -> float:
    """
    Константа энергии границы c₁ = ∫₀¹ √(2ψ̂(ϑ)) dϑ (адаптивная квадратура).

    Args:
        psi: Потенциал
        tol: Абсолютный допуск квадратуры

    Returns:
        c₁ > 0

    Raises:
        IntegrationError: Если квадратура не сошлась; сообщение содержит достигнутую точность
    """
    def integrand(theta: float) -> float:
        return math.sqrt(2.0 * max(psi.eval(theta), 0.0))

    result = integrate.quad(integrand, 0.0, 1.0, epsabs=tol, epsrel=1e-13, limit=200, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 or abserr > tol:
        raise IntegrationError(
            f"Квадратура c₁ для {psi.name} не сошлась: достигнутая точность {abserr:.3e}"
        )
    logger.debug(f"c₁({psi.name}) = {value:.12f} (оценка ошибки {abserr:.1e})")
    return value
