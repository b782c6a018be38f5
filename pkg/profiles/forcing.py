"""
Правые части F₁, F₂ задач для S₁, S₂ и пограничные слои ρ₁, ρ₂.

Все функции принимают массивы на сетке ζ. Множитель при S₀' (скорость)
передаётся отдельным аргументом speed_term, чтобы тот же код собирал
правую часть как с известной скоростью, так и без неё (для
расширенной системы с неизвестным множителем).
"""

from typing import Union

import numpy as np

from mechanics.transmission import InterfaceData
from potential.double_well import DoubleWellPotential
from profiles.profile import smooth_step


ArrayLike = Union[float, np.ndarray]


def _cutoffs(zeta: np.ndarray, data: InterfaceData, derivative: int):
    """φ₋(ζ) = φ(−ζ)/ψ̂''(0), φ₊(ζ) = φ(ζ)/ψ̂''(1) и их производные."""
    sign = (-1.0) ** derivative
    minus = sign * smooth_step(-zeta, derivative) / data.psi_pp_0
    plus = smooth_step(zeta, derivative) / data.psi_pp_1
    return np.asarray(minus), np.asarray(plus)


def rho_first(zeta: ArrayLike, data: InterfaceData, derivative: int = 0) -> np.ndarray:
    """ρ₁ = ε̄:T̂⁻·φ₋ + ε̄:T̂⁺·φ₊; ρ₁ ≡ 0 при |ζ| ≤ 1."""
    z = np.asarray(zeta, dtype=float)
    minus, plus = _cutoffs(z, data, derivative)
    return data.eps_T_minus * minus + data.eps_T_plus * plus


def _second_order_asymptotes(zeta: np.ndarray, data: InterfaceData, psi: DoubleWellPotential,
                             lam: float, derivative: int):
    """Линейные асимптоты S₂ слева и справа (значение или производная)."""
    root = np.sqrt(lam)
    left_slope = root * data.sigma_hat_prime0
    right_slope = left_slope + root * data.grad_term
    if derivative == 0:
        left = (data.check_T("-") - 0.5 * psi.eval(0.0, 3) * data.limit_minus ** 2
                + left_slope * zeta)
        right = (data.check_T("+") - 0.5 * psi.eval(1.0, 3) * data.limit_plus ** 2
                 + right_slope * zeta)
    elif derivative == 1:
        left = np.full_like(zeta, left_slope)
        right = np.full_like(zeta, right_slope)
    else:
        left = np.zeros_like(zeta)
        right = np.zeros_like(zeta)
    return left, right


def rho_second(zeta: ArrayLike, data: InterfaceData, psi: DoubleWellPotential, lam: float,
               derivative: int = 0) -> np.ndarray:
    """
    ρ₂ = φ₋·(ε̄:Ť⁻ − ψ̂'''(0)/2·(S₁⁻)² + λ^{1/2}σ̂'(0)ζ)
       + φ₊·(ε̄:Ť⁺ − ψ̂'''(1)/2·(S₁⁺)² + λ^{1/2}σ̂'(0)ζ + λ^{1/2}·grad_term·ζ⁺).

    На носителе φ₊ (ζ ≥ 1) ζ⁺ = ζ.
    """
    z = np.asarray(zeta, dtype=float)
    total = np.zeros_like(z)
    # правило Лейбница для φ±·A± до второго порядка
    weights = {0: (1,), 1: (1, 1), 2: (1, 2, 1)}[derivative]
    for k, weight in enumerate(weights):
        minus, plus = _cutoffs(z, data, derivative - k)
        left, right = _second_order_asymptotes(z, data, psi, lam, k)
        total = total + weight * (minus * left + plus * right)
    return total


def second_order_slopes(data: InterfaceData, lam: float):
    """Наклоны линейного роста S₂ при ζ → −∞ и ζ → +∞."""
    root = np.sqrt(lam)
    left = root * data.sigma_hat_prime0 / data.psi_pp_0
    right = root * (data.sigma_hat_prime0 + data.grad_term) / data.psi_pp_1
    return float(left), float(right)


def first_order_forcing(data: InterfaceData, S0: np.ndarray, S0_prime: np.ndarray,
                        speed_term: float) -> np.ndarray:
    """
    F₁ = ε̄:([T̂]S₀ + T̂⁻) + speed_term·S₀'.

    Args:
        speed_term: s₀/c − λ^{1/2}κ (ноль для расширенной системы)
    """
    return data.eps_T_jump * S0 + data.eps_T_minus + speed_term * S0_prime


def second_order_forcing(psi: DoubleWellPotential, data: InterfaceData, zeta: np.ndarray,
                         S0: np.ndarray, S0_prime: np.ndarray, S0_integral: np.ndarray,
                         S1: np.ndarray, S1_prime: np.ndarray, lam: float,
                         speed_term: float, c1: float) -> np.ndarray:
    """
    F₂ = σ̌(0) + ε̄:[T̂]S₁ − (1/c₁)ε̄:⟨T̂⟩S₁' − ½ψ̂'''(S₀)S₁²
         + λ^{1/2}(σ̂'(0)ζ + grad_term·∫_{−∞}^ζ S₀) + (speed_term − λκ'ζ)S₀'.

    Args:
        S0_integral: ∫_{−∞}^ζ S₀ на сетке
        speed_term: s₁/c (ноль для расширенной системы)
    """
    root = np.sqrt(lam)
    return (
        data.sigma_check0
        + data.eps_T_jump * S1
        - data.eps_T_mean * S1_prime / c1
        - 0.5 * psi.eval(S0, 3) * S1 ** 2
        + root * (data.sigma_hat_prime0 * zeta + data.grad_term * S0_integral)
        + (speed_term - lam * data.kappa_prime * zeta) * S0_prime
    )
