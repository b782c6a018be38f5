"""
Решатели задач для профилей S₀, S₁, S₂.

S₀ интегрируется явным методом высокого порядка (DOP853) в обе стороны от
ζ = 0. Задачи для S₁, S₂ являются линейными краевые задачи с оператором
L = ψ̂''(S₀) − ∂²_ζ, ядро которого натянуто на S₀'. Оператор
дискретизируется центральными разностями; диагональ исправляется на
величину O(h²) так, чтобы выборка S₀' лежала в ядре дискретного оператора
точно. После этого условие разрешимости и дефляция ядра становятся
точными дискретными тождествами.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, sparse
from scipy.linalg import solve_banded
from scipy.sparse.linalg import spsolve

from mechanics.transmission import InterfaceData
from potential.double_well import DoubleWellPotential, IntegrationError, decay_rate
from profiles.forcing import (
    first_order_forcing,
    rho_first,
    rho_second,
    second_order_forcing,
    second_order_slopes,
)
from profiles.profile import TAIL_TOL, Profile, make_grid


logger = logging.getLogger(__name__)

DEFAULT_POINTS = 4001
MIN_HALF_WIDTH = 30.0

# Допуск условия ортогональности ⟨F, S₀'⟩
SOLVABILITY_TOL = 1e-6

# Абсолютный допуск для расстояния до ямы: фактически работает только относительный
GAP_ATOL = 1e-300

# Ниже этого уровня S₀' теряет относительную точность (близко к денормализованным числам)
KERNEL_FLOOR = 1e-250

# Порог доверия к S₀', восстановленной по значениям S₀, в единицах √ψ̂''
VALUE_NOISE = 1e-8

# Допуск отклонения S₂ от линейных асимптот, отнесённого к 1 + |ζ|
GROWTH_TOL = 1e-3


class SolvabilityError(RuntimeError):
    """Правая часть не ортогональна ядру: скорость не согласована с данными."""


def default_half_width(psi: DoubleWellPotential) -> float:
    """Z = max(12/a, 30)."""
    return max(12.0 / decay_rate(psi), MIN_HALF_WIDTH)


def s0_derivative(psi: DoubleWellPotential, values: np.ndarray) -> np.ndarray:
    """S₀' = √(2ψ̂(S₀)) по значениям S₀."""
    return np.sqrt(2.0 * np.clip(psi.eval(np.asarray(values, dtype=float)), 0.0, None))


def _approach_well(psi: DoubleWellPotential, nodes: np.ndarray, well: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Расстояние d(ζ) от S₀ до ямы и S₀' на узлах одной половины сетки.

    Интегрируется уравнение для d, а не для S₀: около ямы d ~ e^{−a|ζ|}
    убывает до 1e-19 и ниже, и только так сохраняется относительная точность.
    """
    sign = 1.0 if well == 0 else -1.0

    def rhs(_zeta, y):
        d = y[0]
        if not 0.0 < d < 1.0:
            return [0.0]
        return [sign * math.sqrt(2.0 * max(psi.near_well(d, well), 0.0))]

    sol = integrate.solve_ivp(rhs, (nodes[0], nodes[-1]), [0.5], method="DOP853", t_eval=nodes,
                              rtol=1e-12, atol=GAP_ATOL)
    if not sol.success:
        reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(f"Интегрирование S₀ остановилось при ζ = {reached:.4f}: {sol.message}")
    gap = np.clip(sol.y[0], 0.0, 0.5)
    return gap, np.sqrt(2.0 * np.clip(psi.near_well(gap, well), 0.0, None))


def solve_S0(psi: DoubleWellPotential, half_width: Optional[float] = None,
             points: int = DEFAULT_POINTS, tail_tol: float = TAIL_TOL) -> Profile:
    """
    Гетероклиническая орбита S₀' = √(2ψ̂(S₀)), S₀(0) = 1/2.

    Args:
        psi: Потенциал
        half_width: Полуширина Z; по умолчанию max(12/a, 30)
        points: Нечётное число узлов
        tail_tol: Допуск выхода на асимптоты 0 и 1

    Returns:
        Профиль S₀ с пределами 0 и 1 и точной производной S₀' в узлах

    Raises:
        ValueError: Если Z < 12/a
        IntegrationError: Если интегратор остановился; в сообщении точка ζ
    """
    a = decay_rate(psi)
    Z = default_half_width(psi) if half_width is None else half_width
    if Z < 12.0 / a - 1e-12:
        raise ValueError(f"Полуширина Z={Z:g} меньше 12/a = {12.0 / a:.4f}")
    grid = make_grid(Z, points)
    m = grid.size // 2

    values = np.empty_like(grid)
    derivative = np.empty_like(grid)
    right_gap, right_prime = _approach_well(psi, grid[m:], 1)
    left_gap, left_prime = _approach_well(psi, grid[m::-1], 0)
    values[m:] = 1.0 - right_gap
    derivative[m:] = right_prime
    values[m::-1] = left_gap
    derivative[m::-1] = left_prime
    values[m] = 0.5

    profile = Profile("S0", grid, values, 0.0, 1.0, a, derivative=derivative)
    profile.check_tails(tail_tol)
    logger.debug(f"S₀ решён: Z={Z:g}, N={points}, S₀' на концах {derivative[0]:.2e}, {derivative[-1]:.2e}")
    return profile


@dataclass(eq=False)
class ProfileOperator:
    """
    Дискретный оператор L = ψ̂''(S₀) − ∂²_ζ на внутренних узлах (Дирихле на ±Z).

    Attributes:
        step: Шаг сетки h
        diagonal: Потенциальный член во внутренних узлах
        kernel: S₀' на всей сетке
    """
    step: float
    diagonal: np.ndarray
    kernel: np.ndarray

    @property
    def size(self) -> int:
        return self.diagonal.size

    def apply(self, values: np.ndarray) -> np.ndarray:
        """L·values во внутренних узлах (значения на концах используются как данные Дирихле)."""
        v = np.asarray(values, dtype=float)
        return self.diagonal * v[1:-1] - (v[:-2] - 2.0 * v[1:-1] + v[2:]) / self.step ** 2

    def banded(self) -> np.ndarray:
        """Трёхдиагональная матрица в формате solve_banded((1, 1), ...)."""
        off = -1.0 / self.step ** 2
        ab = np.empty((3, self.size))
        ab[0, :] = off
        ab[1, :] = self.diagonal + 2.0 / self.step ** 2
        ab[2, :] = off
        return ab

    def sparse(self) -> sparse.spmatrix:
        off = np.full(self.size - 1, -1.0 / self.step ** 2)
        return sparse.diags([off, self.diagonal + 2.0 / self.step ** 2, off], [-1, 0, 1])


def kernel_values(psi: DoubleWellPotential, S0: Profile) -> Tuple[np.ndarray, float]:
    """
    S₀' на сетке и уровень шума, ниже которого ей нельзя доверять.

    Если профиль несёт точную производную, используется она. Иначе S₀'
    восстанавливается по значениям, и около 1 её ограничивает округление S₀.
    """
    if S0.derivative is not None:
        return np.asarray(S0.derivative, dtype=float), KERNEL_FLOOR
    curvature = max(psi.well_curvatures())
    return s0_derivative(psi, S0.values), VALUE_NOISE * math.sqrt(curvature)


def build_operator(psi: DoubleWellPotential, S0: Profile, corrected: bool = True) -> ProfileOperator:
    """
    Собирает дискретный оператор L.

    При corrected=True из диагонали вычитается r/S₀', где r = L_h S₀',
    погрешность аппроксимации O(h²). Тогда L S₀' = 0 во внутренних узлах.
    В узлах, где S₀' ниже уровня шума, диагональ берётся по хвосту
    e^{−a_w|ζ|}: (2ch(a_w h) − 2)/h², a_w = √ψ̂''(яма).
    """
    kernel, noise = kernel_values(psi, S0)
    operator = ProfileOperator(S0.step, psi.eval(S0.values[1:-1], 2), kernel)
    if corrected:
        h = S0.step
        residual = operator.apply(kernel)
        inner = kernel[1:-1]
        resolved = inner > noise
        diagonal = operator.diagonal.copy()
        diagonal[resolved] -= residual[resolved] / inner[resolved]
        if not resolved.all():
            pp0, pp1 = psi.well_curvatures()
            rates = np.where(S0.grid[1:-1] < 0.0, math.sqrt(pp0), math.sqrt(pp1))
            tail = ~resolved
            diagonal[tail] = (2.0 * np.cosh(rates[tail] * h) - 2.0) / h ** 2
            logger.debug(f"Поправка ядра по хвосту в {int(tail.sum())} узлах")
        operator = ProfileOperator(h, diagonal, kernel)
    return operator


def kernel_residual(psi: DoubleWellPotential, S0: Profile) -> float:
    """max |L_h S₀'| для оператора без поправки (порядок h²)."""
    operator = build_operator(psi, S0, corrected=False)
    return float(np.max(np.abs(operator.apply(operator.kernel))))


def deflated_solve(operator: ProfileOperator, rhs: np.ndarray, shift: float) -> np.ndarray:
    """
    Решает (L + σ v̂v̂ᵀ) w = P rhs, P: проектор на ортогональное дополнение v̂ = S₀'/|S₀'|.

    Сдвинутая матрица невырождена. Решение получается формулой Вудбери
    от трёхдиагональной матрицы M = L + σ eₘeₘᵀ, eₘ: узел ζ = 0.
    Ответ ортогонален v̂.
    """
    v = operator.kernel[1:-1]
    vhat = v / np.linalg.norm(v)
    g = rhs - (vhat @ rhs) * vhat
    center = operator.size // 2
    e_center = np.zeros(operator.size)
    e_center[center] = 1.0

    ab = operator.banded()
    ab[1, center] += shift
    solved = solve_banded((1, 1), ab, np.column_stack([g, vhat, e_center]))
    y, Z = solved[:, 0], solved[:, 1:]
    U = np.column_stack([vhat, e_center])
    capacitance = np.diag([1.0 / shift, -1.0 / shift]) + U.T @ Z
    w = y - Z @ np.linalg.solve(capacitance, U.T @ y)
    return w - (vhat @ w) * vhat


def _normalize(operator: ProfileOperator, rho: np.ndarray, w: np.ndarray) -> np.ndarray:
    """S = ρ + w, затем сдвиг на β·S₀' так, чтобы S(0) = 0."""
    values = rho.copy()
    values[1:-1] += w
    m = values.size // 2
    beta = -values[m] / operator.kernel[m]
    return values + beta * operator.kernel


def augmented_solve(operator: ProfileOperator, fixed_forcing: np.ndarray,
                    rho: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Седловая система [[L, −S₀'], [eₘᵀ, 0]]·(w, q) = (F_fix − Lρ, −ρ(0)).

    Неизвестные: значения профиля и множитель q при S₀' в правой части.
    Используется как независимая проверка формул скоростей.

    Returns:
        (профиль на всей сетке, множитель q)
    """
    n = operator.size
    center = n // 2
    v = operator.kernel[1:-1]
    rhs = np.append(fixed_forcing[1:-1] - operator.apply(rho), -rho[center + 1])
    row = sparse.csr_matrix(([1.0], ([0], [center])), shape=(1, n))
    system = sparse.bmat(
        [[operator.sparse(), sparse.csr_matrix(-v.reshape(-1, 1))], [row, None]],
        format="csc",
    )
    solution = spsolve(system, rhs)
    values = rho.copy()
    values[1:-1] += solution[:n]
    return values, float(solution[-1])


def orthogonality_defect(operator: ProfileOperator, forcing: np.ndarray, rho: np.ndarray,
                         grid: np.ndarray) -> float:
    """|∫(F − Lρ)S₀' dζ| по внутренним узлам (трапеции)."""
    interior = np.zeros_like(grid)
    interior[1:-1] = (forcing[1:-1] - operator.apply(rho)) * operator.kernel[1:-1]
    return abs(float(integrate.trapezoid(interior, grid)))


def s0_integral(psi: DoubleWellPotential, S0: Profile) -> np.ndarray:
    """∫_{−∞}^ζ S₀ на сетке; хвост левее −Z оценивается как S₀(−Z)/√ψ̂''(0)."""
    tail = S0.values[0] / math.sqrt(psi.eval(0.0, 2))
    return tail + integrate.cumulative_trapezoid(S0.values, S0.grid, initial=0.0)


def solve_S1(psi: DoubleWellPotential, S0: Profile, data: InterfaceData, s0: float, lam: float,
             c: float, tail_tol: float = TAIL_TOL) -> Profile:
    """
    Первая поправка S₁: L S₁ = F₁, S₁(0) = 0, пределы ε̄:T̂^±/ψ̂''.

    Args:
        s0: Скорость s₀ = s₀₀ + λ^{1/2}s₀₁ из явной формулы
        lam: λ
        c: Подвижность

    Raises:
        SolvabilityError: Если |∫F₁S₀'| > 1e-6
    """
    grid = S0.grid
    operator = build_operator(psi, S0)
    forcing = first_order_forcing(data, S0.values, operator.kernel,
                                  s0 / c - math.sqrt(lam) * data.kappa)
    defect = abs(float(integrate.trapezoid(forcing * operator.kernel, grid)))
    if defect > SOLVABILITY_TOL:
        raise SolvabilityError(f"Условие разрешимости для S₁ нарушено: |⟨F₁, S₀'⟩| = {defect:.3e}")

    rho = rho_first(grid, data)
    w = deflated_solve(operator, forcing[1:-1] - operator.apply(rho), shift=S0.decay_rate ** 2)
    profile = Profile("S1", grid, _normalize(operator, rho, w),
                      data.limit_minus, data.limit_plus, S0.decay_rate)
    profile.check_tails(tail_tol)
    logger.debug(f"S₁ решён: дефект ортогональности {defect:.2e}")
    return profile


def solve_S2(psi: DoubleWellPotential, S0: Profile, S1: Profile, data: InterfaceData,
             s1: Tuple[float, float], lam: float, c: float, c1: float,
             tail_tol: float = TAIL_TOL) -> Profile:
    """
    Вторая поправка S₂: L S₂ = F₂, S₂(0) = 0, линейный рост на бесконечности.

    Args:
        s1: Пара (s₁₀, s₁₁) из явных формул
        c1: Константа c₁

    Raises:
        SolvabilityError: Если |∫(F₂ + F₃)S₀'| > 1e-6
        ValueError: Если хвост S₂ не совпал с ρ₂
        SolvabilityError: Если S₂ растёт быстрее C(1 + |ζ|) с C из асимптот ρ₂
    """
    grid = S0.grid
    operator = build_operator(psi, S0)
    s10, s11 = s1
    forcing = second_order_forcing(
        psi, data, grid, S0.values, operator.kernel, s0_integral(psi, S0),
        S1.values, np.gradient(S1.values, S1.step), lam,
        (s10 + math.sqrt(lam) * s11) / c, c1,
    )
    rho = rho_second(grid, data, psi, lam)
    defect = orthogonality_defect(operator, forcing, rho, grid)
    if defect > SOLVABILITY_TOL:
        raise SolvabilityError(f"Условие разрешимости для S₂ нарушено: |⟨F₂ + F₃, S₀'⟩| = {defect:.3e}")

    w = deflated_solve(operator, forcing[1:-1] - operator.apply(rho), shift=S0.decay_rate ** 2)
    left_slope, right_slope = second_order_slopes(data, lam)
    profile = Profile("S2", grid, _normalize(operator, rho, w), float(rho[0]), float(rho[-1]),
                      S0.decay_rate, left_slope=left_slope, right_slope=right_slope)
    profile.check_tails(tail_tol)
    growth = check_linear_growth(profile)
    logger.debug(f"S₂ решён: дефект ортогональности {defect:.2e}, константа роста {growth:.3e}")
    return profile


def growth_constant(profile: Profile) -> float:
    """Наименьшее C с |S(ζ)| ≤ C(1 + |ζ|) на сетке."""
    return float(np.max(np.abs(profile.values) / (1.0 + np.abs(profile.grid))))


def growth_bound(profile: Profile, tol: float = GROWTH_TOL) -> float:
    """
    Допустимая константа роста по асимптотам профиля.

    Прямые α±ζ + β± проходят через концевые значения с наклонами
    left_slope / right_slope; на |ζ| ≥ Z/2 для них
    |αζ + β| ≤ (|α| + |β|/(1 + Z/2))(1 + |ζ|).
    """
    Z = profile.half_width
    beta_left = profile.values[0] + profile.left_slope * Z
    beta_right = profile.values[-1] - profile.right_slope * Z
    return max(abs(profile.left_slope) + abs(beta_left) / (1.0 + Z / 2.0),
               abs(profile.right_slope) + abs(beta_right) / (1.0 + Z / 2.0)) + tol


def check_linear_growth(profile: Profile, tol: float = GROWTH_TOL) -> float:
    """
    Проверяет |S(ζ)| ≤ C(1 + |ζ|) с C из асимптот профиля.

    На внешней половине сетки |ζ| ≥ Z/2 профиль сравнивается со своими
    линейными асимптотами: отклонение, отнесённое к 1 + |ζ|, не должно
    превышать tol, и константа роста там не больше growth_bound.

    Returns:
        Константа роста на всей сетке

    Raises:
        SolvabilityError: Если профиль растёт не так, как его асимптоты
    """
    z = profile.grid
    Z = profile.half_width
    weight = 1.0 + np.abs(z)
    left = z <= -Z / 2.0
    right = z >= Z / 2.0
    left_line = profile.values[0] + profile.left_slope * (z + Z)
    right_line = profile.values[-1] + profile.right_slope * (z - Z)
    deviation = max(
        float(np.max(np.abs(profile.values[left] - left_line[left]) / weight[left])),
        float(np.max(np.abs(profile.values[right] - right_line[right]) / weight[right])),
    )
    window = left | right
    outer = float(np.max(np.abs(profile.values[window]) / weight[window]))
    bound = growth_bound(profile, tol)
    if deviation > tol or outer > bound:
        raise SolvabilityError(
            f"{profile.name}: рост не линейный с заданными наклонами: отклонение от асимптот "
            f"{deviation:.3e}, константа роста {outer:.3e} при допустимой {bound:.3e}"
        )
    return growth_constant(profile)
