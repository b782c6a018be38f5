"""
Шаг по времени для связанной задачи Аллена–Кана.

Упругость решается квазистатически (трёхдиагональная система для узловых
перемещений), уравнение для S продвигается по схеме IMEX: лапласиан неявно,
ψ̂'(S) и упругая движущая сила явно. Пространственная дискретизация:
метод конечных объёмов с весами r^{d−1}; при d = 1 это обычные разности
с условием Неймана через зеркальный узел.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded

from asymptotic.composite import CompositeField
from asymptotic.residuals import asymptotic_solution
from profiles.solvers import solve_S0
from simulator.state import PLANAR, SimConfig, SimState


logger = logging.getLogger(__name__)

# Предел числа последовательных делений шага пополам
MAX_HALVINGS = 12


@dataclass(frozen=True)
class Discretization:
    """
    Конечно-объёмная сетка.

    Attributes:
        x: Узлы
        step: Шаг h
        volumes: Объёмы ячеек ((r+)^d − (r−)^d)/d; при d = 1 веса трапеций
        faces: Площади граней r_{i+1/2}^{d−1}
    """
    x: np.ndarray
    step: float
    volumes: np.ndarray
    faces: np.ndarray

    @property
    def upper(self) -> np.ndarray:
        """Коэффициент при S_{i+1} в строке i дискретного лапласиана (i = 0..N−2)."""
        return self.faces / (self.step * self.volumes[:-1])

    @property
    def lower(self) -> np.ndarray:
        """Коэффициент при S_{i−1} в строке i (i = 1..N−1)."""
        return self.faces / (self.step * self.volumes[1:])

    def laplacian(self, S: np.ndarray) -> np.ndarray:
        flux = self.faces * np.diff(S) / self.step
        out = np.zeros_like(S)
        out[:-1] += flux
        out[1:] -= flux
        return out / self.volumes

    def implicit_bands(self, factor: float) -> np.ndarray:
        """Ленточная форма матрицы I − factor·Δ_h для solve_banded."""
        n = self.x.size
        ab = np.zeros((3, n))
        ab[1] = 1.0
        ab[1, :-1] += factor * self.upper
        ab[1, 1:] += factor * self.lower
        ab[0, 1:] = -factor * self.upper
        ab[2, :-1] = -factor * self.lower
        return ab


@lru_cache(maxsize=16)
def discretize(config: SimConfig) -> Discretization:
    """Сетка и веса конечных объёмов для геометрии расчёта."""
    x = config.grid()
    h = config.spacing
    d = config.dimension
    left = np.maximum(x - 0.5 * h, 0.0)
    right = np.minimum(x + 0.5 * h, config.domain)
    volumes = (right ** d - left ** d) / d
    faces = (x[:-1] + 0.5 * h) ** (d - 1)
    return Discretization(x=x, step=h, volumes=volumes, faces=faces)


def midpoint_stress(config: SimConfig, grid: Discretization, u: np.ndarray, S: np.ndarray) -> np.ndarray:
    """T_{i+1/2} = D((u_{i+1} − u_i)/h − ε̄(S_i + S_{i+1})/2)."""
    return config.modulus * (np.diff(u) / grid.step - config.eps_bar * 0.5 * (S[:-1] + S[1:]))


def nodal_stress(T_mid: np.ndarray) -> np.ndarray:
    """Узловое напряжение: среднее соседних граней, на концах ближайшая грань."""
    T = np.empty(T_mid.size + 1)
    T[1:-1] = 0.5 * (T_mid[:-1] + T_mid[1:])
    T[0], T[-1] = T_mid[0], T_mid[-1]
    return T


def solve_elasticity(config: SimConfig, S: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Квазистатическое равновесие −T' = b с u(0) = U₀, u(L) = U_L при данном S.

    В радиальных режимах ε̄ = 0 и u = T = 0.

    Returns:
        (u, T) в узлах
    """
    grid = discretize(config)
    if config.geometry != PLANAR:
        zero = np.zeros_like(S)
        return zero, zero.copy()

    bar = config.bar
    D, h, eps = bar.modulus, grid.step, bar.eps_bar
    x = grid.x
    S_mid = 0.5 * (S[:-1] + S[1:])
    n = x.size - 2

    rhs = bar.force()(x[1:-1]) - (D * eps / h) * np.diff(S_mid)
    rhs[0] += D * bar.u0 / h ** 2
    rhs[-1] += D * bar.uL / h ** 2
    ab = np.empty((3, n))
    ab[0] = -D / h ** 2
    ab[1] = 2.0 * D / h ** 2
    ab[2] = -D / h ** 2

    u = np.empty_like(x)
    u[0], u[-1] = bar.u0, bar.uL
    u[1:-1] = solve_banded((1, 1), ab, rhs)
    T = nodal_stress(midpoint_stress(config, grid, u, S))
    return u, T


def elasticity_residual(config: SimConfig, u: np.ndarray, S: np.ndarray) -> float:
    """max |−(T_{i+1/2} − T_{i−1/2})/h − b_i| по внутренним узлам."""
    if config.geometry != PLANAR:
        return 0.0
    grid = discretize(config)
    T_mid = midpoint_stress(config, grid, u, S)
    residual = -np.diff(T_mid) / grid.step - config.bar.force()(grid.x[1:-1])
    return float(np.max(np.abs(residual)))


def reaction(config: SimConfig, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Явная часть: (c/B)(ε̄T − μ^{-1/2}ψ̂'(S))."""
    return config.rate * (config.eps_bar * T - config.psi.eval(S, 1) / math.sqrt(config.mu))


def time_derivative(state: SimState, config: SimConfig) -> np.ndarray:
    """Правая часть ∂ₜS дискретной задачи в текущем состоянии."""
    grid = discretize(config)
    return reaction(config, state.S, state.T) + config.diffusion * grid.laplacian(state.S)


def energy_parts(state: SimState, config: SimConfig) -> Dict[str, float]:
    """
    Слагаемые дискретной свободной энергии.

    В радиальных режимах энергия берётся на единицу телесного угла.
    """
    grid = discretize(config)
    S = state.S
    elastic = 0.0
    if config.geometry == PLANAR:
        T_mid = midpoint_stress(config, grid, state.u, S)
        elastic = float(np.sum(grid.step * T_mid ** 2) / (2.0 * config.modulus))
    well = float(np.sum(grid.volumes * config.psi.eval(S))) / math.sqrt(config.mu)
    gradient = 0.5 * math.sqrt(config.mu) * config.lam * float(
        np.sum(grid.faces * np.diff(S) ** 2) / grid.step
    )
    return {"elastic": elastic, "well": well, "gradient": gradient}


def free_energy(state: SimState, config: SimConfig) -> float:
    """W(ε, S) + μ^{-1/2}ψ̂(S) + (μ^{1/2}λ/2)|∂ₓS|², проинтегрированное по области."""
    return sum(energy_parts(state, config).values())


def _advance(config: SimConfig, S: np.ndarray, T: np.ndarray, dt: float) -> np.ndarray:
    grid = discretize(config)
    rhs = S + dt * reaction(config, S, T)
    return solve_banded((1, 1), grid.implicit_bands(dt * config.diffusion), rhs)


def _advance_checked(config: SimConfig, S: np.ndarray, T: np.ndarray, dt: float,
                     depth: int = 0) -> Tuple[np.ndarray, int]:
    """Шаг с отклонением: при max|ΔS| > max_jump шаг делится пополам."""
    new = _advance(config, S, T, dt)
    jump = float(np.max(np.abs(new - S)))
    if not np.isfinite(jump):
        raise np.linalg.LinAlgError(f"Шаг dt={dt:.3e} дал нечисловые значения S")
    if jump <= config.max_jump:
        return new, 0
    if depth >= MAX_HALVINGS:
        raise RuntimeError(f"Шаг не принят после {MAX_HALVINGS} делений: max|ΔS| = {jump:.3e}")

    logger.warning(f"Шаг dt={dt:.3e} отклонён: max|ΔS| = {jump:.3e} > {config.max_jump:g}, делим пополам")
    half, first = _advance_checked(config, S, T, 0.5 * dt, depth + 1)
    _, T_half = solve_elasticity(config, half)
    full, second = _advance_checked(config, half, T_half, 0.5 * dt, depth + 1)
    return full, 1 + first + second


def step(state: SimState, config: SimConfig, dt: Optional[float] = None) -> SimState:
    """
    Один шаг: S^{n+1} по схеме IMEX, затем квазистатическая упругость для S^{n+1}.

    Raises:
        LinAlgError: Если линейная система вырождена или решение не конечно
        RuntimeError: Если шаг не удалось принять делением пополам
    """
    dt = config.time_step() if dt is None else dt
    S, rejected = _advance_checked(config, state.S, state.T, dt)
    u, T = solve_elasticity(config, S)

    overshoot = max(float(-np.min(S)), float(np.max(S)) - 1.0, 0.0)
    if overshoot > config.overshoot_tol and overshoot > state.overshoot:
        logger.warning(f"S выходит за [0, 1] на {overshoot:.3e} при t={state.t + dt:.4e}")

    return dataclasses.replace(
        state,
        t=state.t + dt,
        S=S,
        u=u,
        T=T,
        times=list(state.times),
        positions=list(state.positions),
        steps=state.steps + 1,
        rejected=state.rejected + rejected,
        overshoot=max(state.overshoot, overshoot),
    )


def seed_traveling(config: SimConfig,
                   field: Optional[CompositeField] = None) -> Tuple[SimState, CompositeField]:
    """Начальное состояние из составного асимптотического поля и само поле."""
    if config.geometry != PLANAR:
        raise ValueError(f"Бегущая волна задаётся только в геометрии {PLANAR}, получено {config.geometry}")
    if field is None:
        field = asymptotic_solution(config.bar, config.psi, config.mu, config.lam, config.c)
    x = discretize(config).x
    S = field.jets(x).S
    u, T = solve_elasticity(config, S)
    logger.info(f"Начальный профиль задан: γ={config.bar.interface:g}, B={config.width:.4e}, N={x.size}")
    return SimState(t=0.0, x=x, S=S, u=u, T=T, geometry=config.geometry), field


def init_traveling(config: SimConfig) -> SimState:
    """S из составного решения в положении γ стержня, u из мгновенного решения упругости."""
    state, _ = seed_traveling(config)
    return state


def init_radial(config: SimConfig) -> SimState:
    """S = S₀((R₀ − r)/B): фаза S = 1 внутри шара радиуса R₀, u = T = 0."""
    if config.geometry == PLANAR:
        raise ValueError("Радиальное начальное условие требует радиальной геометрии")
    profile = solve_S0(config.psi)
    x = discretize(config).x
    S = np.asarray(profile((config.R0 - x) / config.width), dtype=float)
    zero = np.zeros_like(x)
    return SimState(t=0.0, x=x, S=S, u=zero, T=zero.copy(), geometry=config.geometry)


def init_state(config: SimConfig) -> SimState:
    if config.geometry == PLANAR:
        return init_traveling(config)
    return init_radial(config)
