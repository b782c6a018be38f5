"""
Конфигурация и состояние прямого моделирования уравнения Аллена–Кана.

Плоский режим (planar1d) решает связанную задачу на стержне [0, L],
радиальные режимы (radial2d, radial3d) решают уравнение для S по радиусу
r ∈ [0, R] без упругости (ε̄ = 0).
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from mechanics.transmission import Bar1D, build_bar
from potential.double_well import DoubleWellPotential, build_potential
from profiles.kinetics import LAMBDA0, MU0, check_parameters


logger = logging.getLogger(__name__)

PLANAR = "planar1d"
RADIAL2D = "radial2d"
RADIAL3D = "radial3d"
GEOMETRIES = (PLANAR, RADIAL2D, RADIAL3D)

# Сетка должна разрешать границу: Δx ≤ B/RESOLUTION
RESOLUTION = 8

# Запас устойчивости явной части шага
DT_SAFETY = 0.2

# Диапазон S, по которому оценивается max|ψ̂''| (с учётом перелёта)
CURVATURE_RANGE = (-0.1, 1.1)


@dataclass(frozen=True)
class SimConfig:
    """
    Параметры одного расчёта.

    Attributes:
        geometry: planar1d, radial2d или radial3d
        domain: Длина стержня L или радиус области R
        points: Число узлов сетки N
        mu, lam: Параметры μ, λ
        c: Подвижность
        psi: Потенциал
        bar: Стержень (только planar1d)
        R0: Начальный радиус (только радиальные режимы)
        dt: Шаг по времени; None означает автоматический выбор
        end_time: Время окончания расчёта
        output_every: Запись временного ряда каждые output_every шагов
        max_jump: Шаг отклоняется и делится пополам, если max|ΔS| больше
        overshoot_tol: Допустимый выход S за [0, 1] (только контроль)
    """
    geometry: str
    domain: float
    points: int
    mu: float
    lam: float
    c: float
    psi: DoubleWellPotential
    bar: Optional[Bar1D] = None
    R0: Optional[float] = None
    dt: Optional[float] = None
    end_time: float = 0.1
    output_every: int = 10
    max_jump: float = 0.1
    overshoot_tol: float = 1e-3
    mu0: float = MU0
    lam0: float = LAMBDA0

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"Неизвестная геометрия {self.geometry}, допустимы {', '.join(GEOMETRIES)}")
        if self.domain <= 0:
            raise ValueError(f"Размер области должен быть положительным, получено {self.domain}")
        if self.points < 3:
            raise ValueError(f"Нужно не меньше 3 узлов, получено {self.points}")
        if self.c <= 0:
            raise ValueError(f"Подвижность c должна быть положительной, получено {self.c}")
        if self.end_time < 0 or self.output_every < 1 or self.max_jump <= 0:
            raise ValueError("end_time ≥ 0, output_every ≥ 1 и max_jump > 0 обязательны")
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"Шаг по времени должен быть положительным, получено {self.dt}")
        check_parameters(self.mu, self.lam, self.mu0, self.lam0)

        if self.spacing > self.width / RESOLUTION:
            raise ValueError(
                f"Сетка не разрешает границу: Δx = {self.spacing:.3e} > B/{RESOLUTION} = "
                f"{self.width / RESOLUTION:.3e}; нужно не меньше "
                f"{int(math.ceil(RESOLUTION * self.domain / self.width)) + 1} узлов"
            )

        if self.geometry == PLANAR:
            if self.bar is None:
                raise ValueError("Для planar1d нужен стержень (секция bar)")
            if abs(self.bar.length - self.domain) > 1e-12 * self.domain:
                raise ValueError(f"Длина стержня {self.bar.length} не совпадает с областью {self.domain}")
        else:
            if self.R0 is None or not 0.0 < self.R0 < self.domain:
                raise ValueError(f"Начальный радиус R0={self.R0} должен лежать в (0, {self.domain})")

    @property
    def width(self) -> float:
        """B = (μλ)^{1/2}."""
        return math.sqrt(self.mu * self.lam)

    @property
    def spacing(self) -> float:
        return self.domain / (self.points - 1)

    @property
    def dimension(self) -> int:
        return {PLANAR: 1, RADIAL2D: 2, RADIAL3D: 3}[self.geometry]

    @property
    def eps_bar(self) -> float:
        return self.bar.eps_bar if self.bar is not None else 0.0

    @property
    def modulus(self) -> float:
        return self.bar.modulus if self.bar is not None else 0.0

    @property
    def rate(self) -> float:
        """Множитель c/B перед вариационной производной."""
        return self.c / self.width

    @property
    def diffusion(self) -> float:
        """Коэффициент при лапласиане (c/B)·μ^{1/2}λ = cλ^{1/2}."""
        return self.c * math.sqrt(self.lam)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.domain, self.points)

    def stable_dt(self) -> float:
        """0.2/L, где L: константа Липшица явной части."""
        s = np.linspace(*CURVATURE_RANGE, 241)
        curvature = float(np.max(np.abs(self.psi.eval(s, 2))))
        lipschitz = self.rate * (curvature / math.sqrt(self.mu) + self.eps_bar ** 2 * self.modulus)
        return DT_SAFETY / lipschitz

    def time_step(self) -> float:
        """Заданный шаг, ограниченный устойчивым."""
        stable = self.stable_dt()
        if self.dt is None:
            return stable
        if self.dt > stable:
            logger.warning(f"Шаг dt={self.dt:.3e} больше устойчивого {stable:.3e}, используется устойчивый")
            return stable
        return self.dt

    def with_parameters(self, mu: float, lam: float) -> "SimConfig":
        """Та же задача при других (μ, λ); сетка сгущается, пока Δx > B/8."""
        B = math.sqrt(mu * lam)
        needed = int(math.ceil(RESOLUTION * self.domain / B)) + 1
        return dataclasses.replace(self, mu=mu, lam=lam, points=max(self.points, needed))

    def refined(self) -> "SimConfig":
        """Та же задача на сетке с вдвое меньшим шагом (узлы грубой сетки сохраняются)."""
        return dataclasses.replace(self, points=2 * self.points - 1)


@dataclass
class SimState:
    """
    Состояние расчёта: поля на сетке и история положения границы.

    Attributes:
        t: Время
        x: Узлы сетки (x или r)
        S, u, T: Параметр порядка, перемещение, напряжение в узлах
        geometry: Геометрия расчёта
        times, positions: Записанная история положения границы
        steps: Число выполненных шагов
        rejected: Число отклонённых шагов
        overshoot: Максимальный выход S за [0, 1]
    """
    t: float
    x: np.ndarray
    S: np.ndarray
    u: np.ndarray
    T: np.ndarray
    geometry: str = PLANAR
    times: List[float] = field(default_factory=list)
    positions: List[float] = field(default_factory=list)
    steps: int = 0
    rejected: int = 0
    overshoot: float = 0.0

    def copy(self) -> "SimState":
        return dataclasses.replace(
            self, S=self.S.copy(), u=self.u.copy(), T=self.T.copy(),
            times=list(self.times), positions=list(self.positions),
        )

    def fields(self) -> Dict[str, np.ndarray]:
        """Поля для CSV финального состояния."""
        return {"x": self.x, "S": self.S, "u": self.u, "T": self.T}


def build_sim_config(settings: Dict[str, Any]) -> SimConfig:
    """Строит SimConfig из секций sim, potential, bar и kinetics настроек."""
    section = settings["sim"]
    kinetics = settings["kinetics"]
    geometry = section["geometry"]
    psi = build_potential(settings)

    bar = None
    domain = section["domain"]
    if geometry == PLANAR:
        bar = build_bar(settings)
        if domain is None:
            domain = bar.length
    if domain is None:
        raise ValueError("Для радиальной геометрии нужно задать sim.domain")

    return SimConfig(
        geometry=geometry,
        domain=float(domain),
        points=int(section["points"]),
        mu=float(section["mu"]),
        lam=float(section["lambda"]),
        c=float(section["mobility"]),
        psi=psi,
        bar=bar,
        R0=section["R0"],
        dt=section["dt"],
        end_time=float(section["end_time"]),
        output_every=int(section["output_every"]),
        max_jump=float(section["max_jump"]),
        overshoot_tol=float(section["overshoot_tol"]),
        mu0=float(kinetics["mu0"]),
        lam0=float(kinetics["lambda0"]),
    )
