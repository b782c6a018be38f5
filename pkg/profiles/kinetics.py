"""
Кинетическое соотношение s = s₀ + μ^{1/2}s₁.

Явные формулы для s₀, s₁ считаются основными. Условие разрешимости и
расширенная седловая система служат проверкой: если они расходятся с
явными формулами, решатель падает с SolvabilityError.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import integrate

from mechanics.transmission import InterfaceData
from potential.double_well import DoubleWellPotential, c1_constant, decay_rate
from profiles.forcing import first_order_forcing, rho_first, rho_second, second_order_forcing
from profiles.profile import TAIL_TOL, Profile, fit_decay
from profiles.solvers import (
    DEFAULT_POINTS,
    SOLVABILITY_TOL,
    SolvabilityError,
    augmented_solve,
    build_operator,
    orthogonality_defect,
    s0_integral,
    solve_S0,
    solve_S1,
    solve_S2,
)


logger = logging.getLogger(__name__)

# Границы области параметров μ ∈ (0, μ₀], λ ∈ (0, λ₀]
MU0 = math.exp(-2.0)
LAMBDA0 = 1.0


@dataclass(frozen=True)
class KineticCoefficients:
    """
    Коэффициенты кинетического соотношения; от μ и λ не зависят.

    s₀ = s₀₀ + λ^{1/2}s₀₁, s₁ = s₁₀ + λ^{1/2}s₁₁, s = s₀ + μ^{1/2}s₁.
    """
    s00: float
    s01: float
    s10: float = 0.0
    s11: float = 0.0

    def s0(self, lam: float) -> float:
        return self.s00 + math.sqrt(lam) * self.s01

    def s1(self, lam: float) -> float:
        return self.s10 + math.sqrt(lam) * self.s11

    def speed(self, mu: float, lam: float) -> float:
        return self.s0(lam) + math.sqrt(mu) * self.s1(lam)

    def to_dict(self) -> Dict[str, float]:
        return {"s00": self.s00, "s01": self.s01, "s10": self.s10, "s11": self.s11}


def check_parameters(mu: float, lam: float, mu0: float = MU0, lam0: float = LAMBDA0) -> None:
    """
    Raises:
        ValueError: Если μ ∉ (0, μ₀] или λ ∉ (0, λ₀]
    """
    if not 0.0 < mu <= mu0 * (1.0 + 1e-12):
        raise ValueError(f"μ = {mu:g} вне (0, {mu0:.6g}]")
    if not 0.0 < lam <= lam0 * (1.0 + 1e-12):
        raise ValueError(f"λ = {lam:g} вне (0, {lam0:g}]")


def s0_closed_form(data: InterfaceData, psi: DoubleWellPotential, lam: float, c: float,
                   c1: Optional[float] = None) -> Tuple[float, float]:
    """
    s₀₀ = −(c/c₁)·ε̄:⟨T̂⟩, s₀₁ = c·κ.

    Raises:
        ValueError: Если c ≤ 0 или λ ≤ 0
    """
    if c <= 0:
        raise ValueError(f"Подвижность c должна быть положительной, получено {c}")
    if lam <= 0:
        raise ValueError(f"λ должно быть положительным, получено {lam}")
    c1 = c1_constant(psi) if c1 is None else c1
    return -(c / c1) * data.eps_T_mean, c * data.kappa


def s1_closed_form(psi: DoubleWellPotential, S0: Profile, S1: Profile, data: InterfaceData,
                   c: float, c1: Optional[float] = None) -> Tuple[float, float]:
    """
    s₁₀ = (c/c₁)(−ε̄:⟨Ť⟩ + ε̄:[T̂](⟨ε̄:T̂/ψ̂''⟩ − ∫S₁S₀') + (1/c₁)ε̄:⟨T̂⟩∫S₁'S₀' + ½∫ψ̂'''(S₀)S₁²S₀'),
    s₁₁ = −(c/c₁)·grad_term·∫S₀(ζ)S₀(−ζ).

    Формула для s₁₁ и отсутствие членов с σ̂'(0), κ' опираются на
    симметрию S₀'; для несимметричного потенциала они точны только при
    σ̂'(0) = κ' = grad_term = 0, иначе solve_S2 сообщит о несогласованности.
    """
    if not np.array_equal(S0.grid, S1.grid):
        raise ValueError("S₀ и S₁ должны быть заданы на одной сетке")
    c1 = c1_constant(psi) if c1 is None else c1
    grid = S0.grid
    S0_prime = build_operator(psi, S0, corrected=False).kernel
    S1_prime = np.gradient(S1.values, S1.step)
    trap = integrate.trapezoid

    s10 = (c / c1) * (
        -data.eps_check_T_mean
        + data.eps_T_jump * (data.limit_mean - trap(S1.values * S0_prime, grid))
        + data.eps_T_mean * trap(S1_prime * S0_prime, grid) / c1
        + 0.5 * trap(psi.eval(S0.values, 3) * S1.values ** 2 * S0_prime, grid)
    )
    s11 = -(c / c1) * data.grad_term * trap(S0.values * S0.values[::-1], grid)
    return float(s10), float(s11)


def kinetic_relation(coeffs: KineticCoefficients, mu: float, lam: float,
                     mu0: float = MU0, lam0: float = LAMBDA0) -> float:
    """
    Скорость границы s = s₀ + μ^{1/2}(s₁₀ + λ^{1/2}s₁₁).

    Raises:
        ValueError: При выходе μ или λ из области параметров
    """
    check_parameters(mu, lam, mu0, lam0)
    return coeffs.speed(mu, lam)


def sphere_kappa_prime(kappa: float, dim: int) -> float:
    """κ' = −κ²/(d − 1) для сферы; только справочно, не подставляется автоматически."""
    if dim < 2:
        raise ValueError(f"Размерность сферы должна быть ≥ 2, получено {dim}")
    return -kappa ** 2 / (dim - 1)


def orthogonality_integrals(psi: DoubleWellPotential, S0: Profile) -> Dict[str, float]:
    """Контрольные интегралы профиля S₀ (трапеции на усечённой сетке)."""
    grid = S0.grid
    S0_prime = build_operator(psi, S0, corrected=False).kernel
    trap = integrate.trapezoid
    return {
        "int_S0p_sq": float(trap(S0_prime ** 2, grid)),
        "int_S0_S0p": float(trap(S0.values * S0_prime, grid)),
        "int_S0p": float(trap(S0_prime, grid)),
        "int_S0_S0_reflected": float(trap(S0.values * S0.values[::-1], grid)),
        "int_zeta_S0p": float(trap(grid * S0_prime, grid)),
        "int_S0_integral_excess": float(trap(s0_integral(psi, S0) - np.maximum(grid, 0.0), grid)),
    }


@dataclass(eq=False)
class ProfileSet:
    """
    Результат решения задач для профилей при заданных данных.

    Attributes:
        S0, S1, S2: Профили
        rho1, rho2: Пограничные слои
        coefficients: s₀₀, s₀₁, s₁₀, s₁₁
        c1: Константа c₁
        lam: λ, при котором собраны S₂ и ρ₂
        defects: Дефекты ортогональности и хвостов
        integrals: Контрольные интегралы S₀
    """
    S0: Profile
    S1: Profile
    S2: Profile
    rho1: Profile
    rho2: Profile
    coefficients: KineticCoefficients
    c1: float
    lam: float
    defects: Dict[str, float] = field(default_factory=dict)
    integrals: Dict[str, float] = field(default_factory=dict)


def first_order_defect(psi: DoubleWellPotential, S0: Profile, data: InterfaceData, s0: float,
                       lam: float, c: float, corrected: bool = True) -> float:
    """
    |∫(F₁ − Lρ₁)S₀' dζ| при заданной скорости s₀.

    С оператором без поправки ядра дефект равен погрешности аппроксимации
    O(h²); с поправкой он на уровне квадратуры и округления.
    """
    operator = build_operator(psi, S0, corrected)
    forcing = first_order_forcing(data, S0.values, operator.kernel, s0 / c - math.sqrt(lam) * data.kappa)
    return orthogonality_defect(operator, forcing, rho_first(S0.grid, data), S0.grid)


def second_order_defect(psi: DoubleWellPotential, S0: Profile, S1: Profile, data: InterfaceData,
                        s1: float, lam: float, c: float, c1: float, corrected: bool = True) -> float:
    """|∫(F₂ + F₃ − Lρ₂)S₀' dζ| при заданной скорости s₁ = s₁₀ + λ^{1/2}s₁₁."""
    operator = build_operator(psi, S0, corrected)
    forcing = second_order_forcing(
        psi, data, S0.grid, S0.values, operator.kernel, s0_integral(psi, S0),
        S1.values, np.gradient(S1.values, S1.step), lam, s1 / c, c1,
    )
    return orthogonality_defect(operator, forcing, rho_second(S0.grid, data, psi, lam), S0.grid)


def compute_profiles(psi: DoubleWellPotential, data: InterfaceData, lam: float, c: float,
                     half_width: Optional[float] = None, points: int = DEFAULT_POINTS,
                     tail_tol: float = TAIL_TOL) -> ProfileSet:
    """
    Полная цепочка: S₀ → s₀ → S₁ → s₁ → S₂.

    Raises:
        SolvabilityError: Если явные скорости не проходят условие разрешимости
    """
    c1 = c1_constant(psi)
    S0 = solve_S0(psi, half_width, points, tail_tol)
    s00, s01 = s0_closed_form(data, psi, lam, c, c1)
    s0 = s00 + math.sqrt(lam) * s01
    S1 = solve_S1(psi, S0, data, s0, lam, c, tail_tol)
    s10, s11 = s1_closed_form(psi, S0, S1, data, c, c1)
    S2 = solve_S2(psi, S0, S1, data, (s10, s11), lam, c, c1, tail_tol)

    grid = S0.grid
    a = decay_rate(psi)
    rho1 = Profile("rho1", grid, rho_first(grid, data), data.limit_minus, data.limit_plus, a)
    rho2_values = rho_second(grid, data, psi, lam)
    rho2 = Profile("rho2", grid, rho2_values, float(rho2_values[0]), float(rho2_values[-1]), a,
                   left_slope=S2.left_slope, right_slope=S2.right_slope)

    coefficients = KineticCoefficients(s00, s01, s10, s11)
    defects = {
        "orthogonality_S1": first_order_defect(psi, S0, data, s0, lam, c),
        "orthogonality_S2": second_order_defect(psi, S0, S1, data, coefficients.s1(lam), lam, c, c1),
        "tail_S0": S0.tail_defect(),
        "tail_S1": S1.tail_defect(),
        "tail_S2": S2.tail_defect(),
    }
    logger.info(
        f"Профили решены ({psi.name}): s00={s00:.6e}, s01={s01:.6e}, s10={s10:.6e}, s11={s11:.6e}, "
        f"дефекты ортогональности {defects['orthogonality_S1']:.2e} / {defects['orthogonality_S2']:.2e}"
    )
    return ProfileSet(
        S0=S0, S1=S1, S2=S2, rho1=rho1, rho2=rho2, coefficients=coefficients, c1=c1, lam=lam,
        defects=defects, integrals=orthogonality_integrals(psi, S0),
    )


def augmented_speeds(psi: DoubleWellPotential, profiles: ProfileSet, data: InterfaceData,
                     c: float) -> Tuple[float, float]:
    """
    Скорости s₀ и s₁ как множители расширенной седловой системы.

    Returns:
        (s₀, s₁) при λ из profiles
    """
    lam = profiles.lam
    S0, S1 = profiles.S0, profiles.S1
    grid = S0.grid
    operator = build_operator(psi, S0)

    fixed_first = first_order_forcing(data, S0.values, operator.kernel, 0.0)
    _, q0 = augmented_solve(operator, fixed_first, rho_first(grid, data))
    s0 = c * (q0 + math.sqrt(lam) * data.kappa)

    fixed_second = second_order_forcing(
        psi, data, grid, S0.values, operator.kernel, s0_integral(psi, S0),
        S1.values, np.gradient(S1.values, S1.step), lam, 0.0, profiles.c1,
    )
    _, q1 = augmented_solve(operator, fixed_second, rho_second(grid, data, psi, lam))
    return s0, c * q1


def cross_validate(psi: DoubleWellPotential, profiles: ProfileSet, data: InterfaceData, c: float,
                   tol: float = SOLVABILITY_TOL) -> Dict[str, float]:
    """
    Сравнивает явные скорости с множителями седловой системы.

    Raises:
        SolvabilityError: Если расхождение больше tol
    """
    lam = profiles.lam
    s0_aug, s1_aug = augmented_speeds(psi, profiles, data, c)
    gaps = {
        "s0_gap": abs(s0_aug - profiles.coefficients.s0(lam)),
        "s1_gap": abs(s1_aug - profiles.coefficients.s1(lam)),
    }
    if max(gaps.values()) > tol:
        raise SolvabilityError(
            f"Явные скорости расходятся с седловой системой: Δs₀={gaps['s0_gap']:.3e}, Δs₁={gaps['s1_gap']:.3e}"
        )
    return gaps


def decay_slopes(profiles: ProfileSet) -> Dict[str, float]:
    """Наклоны log-хвостов S₀, S₁ − ρ₁, S₂ − ρ₂ справа и слева."""
    grid = profiles.S0.grid
    right, left = grid >= 0, grid <= 0
    S0 = profiles.S0.values
    slopes = {
        "S0_left": fit_decay(grid[left], S0[left]),
        "S0_right": fit_decay(grid[right], 1.0 - S0[right]),
    }
    for name, profile, rho in (("S1", profiles.S1, profiles.rho1), ("S2", profiles.S2, profiles.rho2)):
        excess = profile.values - rho.values
        for side, mask in (("left", left), ("right", right)):
            try:
                slopes[f"{name}_{side}"] = fit_decay(grid[mask], excess[mask])
            except ValueError:
                # хвост на уровне округления: профиль совпал с ρ
                slopes[f"{name}_{side}"] = float("nan")
    return slopes
