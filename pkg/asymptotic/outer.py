"""
Внешнее разложение на стержне: S̃₁, S̃₂, S̃₃ и (ũ, T̃).

Все поля кусочно-полиномиальные (PiecewiseField), поэтому производные
по x вычисляются точно по обе стороны от γ.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from mechanics.transmission import Bar1D, BarSolution, InterfaceData, PiecewiseField
from potential.double_well import DoubleWellPotential
from profiles.kinetics import ProfileSet
from profiles.solvers import s0_integral


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OuterExpansion:
    """
    Внешнее разложение u₂ = û + μ^{1/2}ǔ + μũ, S₂ = Ŝ + μ^{1/2}S̃₁ + μS̃₂ + μ^{3/2}S̃₃.

    Attributes:
        hat, check: Решения первой и второй задач сопряжения
        S_tilde1, S_tilde2, S_tilde3: Поправки параметра порядка
        u_tilde, T_tilde: Решение задачи для ũ со следами u_trace_minus, u_trace_plus
        speed_hint: Скорость, задающая ∂ₜ ≈ −s∂ₓ
    """
    hat: BarSolution
    check: BarSolution
    S_tilde1: PiecewiseField
    S_tilde2: PiecewiseField
    S_tilde3: PiecewiseField
    u_tilde: PiecewiseField
    T_tilde: PiecewiseField
    u_trace_minus: float
    u_trace_plus: float
    speed_hint: float

    @property
    def interface(self) -> float:
        return self.hat.bar.interface

    def order_parameter(self, x: np.ndarray, mu: float, derivative: int = 0) -> np.ndarray:
        """S₂^{(μ)} или её производная по x."""
        root = math.sqrt(mu)
        base = self.hat.phase_term(x, derivative)
        return (base + root * self.S_tilde1(x, derivative) + mu * self.S_tilde2(x, derivative)
                + mu * root * self.S_tilde3(x, derivative))

    def displacement(self, x: np.ndarray, mu: float, derivative: int = 0) -> np.ndarray:
        """u₂^{(μ)} или её производная по x."""
        return (self.hat.displacement(x, derivative) + math.sqrt(mu) * self.check.displacement(x, derivative)
                + mu * self.u_tilde(x, derivative))


def displacement_traces(profiles: ProfileSet, psi: DoubleWellPotential, data: InterfaceData,
                        lam: float) -> tuple:
    """
    Следы ũ на границе из квадратур профиля S₁.

    ũ⁻ = −λ^{1/2}u*∫_{−∞}^0 (S₁ − S₁⁻) dζ,
    ũ⁺ = λ^{1/2}u*∫_0^∞ (S₁ − S₁⁺) dζ + λa*∫(∫_{−∞}^ζ S₀ − ζ⁺) dζ.
    """
    S0, S1 = profiles.S0, profiles.S1
    grid = S0.grid
    m = S0.center
    root = math.sqrt(lam)
    left = integrate.trapezoid(S1.values[: m + 1] - data.limit_minus, grid[: m + 1])
    right = integrate.trapezoid(S1.values[m:] - data.limit_plus, grid[m:])
    excess = integrate.trapezoid(s0_integral(psi, S0) - np.maximum(grid, 0.0), grid)
    u_minus = -root * data.u_star * left
    u_plus = root * data.u_star * right + lam * data.a_star * excess
    return float(u_minus), float(u_plus)


def build_outer(bar: Bar1D, hat: BarSolution, check: BarSolution, psi: DoubleWellPotential,
                profiles: ProfileSet, data: InterfaceData, lam: float, c: float,
                speed_hint: float) -> OuterExpansion:
    """
    Строит внешнее разложение.

    S̃₁ = ε̄T̂/ψ̂'', S̃₂ = ε̄Ť/ψ̂'' − ψ̂'''/(2ψ̂'')·S̃₁², задача для ũ решается
    на каждой стороне как задача Дирихле ũ(0) = ũ(L) = 0 со следами на γ,
    S̃₃ поточечно из алгебраического уравнения третьего порядка
    с ∂ₜS̃₁ = −speed_hint·∂ₓS̃₁.
    """
    D, L, gamma, eps = bar.modulus, bar.length, bar.interface, bar.eps_bar
    S1 = check.phase_term
    wells = {"-": 0.0, "+": 1.0}

    S2_pieces = {}
    for side, poly in (("-", S1.minus), ("+", S1.plus)):
        well = wells[side]
        pp, ppp = psi.eval(well, 2), psi.eval(well, 3)
        stress = check.stress.minus if side == "-" else check.stress.plus
        S2_pieces[side] = stress * (eps / pp) - poly ** 2 * (ppp / (2.0 * pp))
    S_tilde2 = PiecewiseField(gamma, S2_pieces["-"], S2_pieces["+"])

    u_minus, u_plus = displacement_traces(profiles, psi, data, lam)
    left_work = float(S2_pieces["-"].integ(lbnd=0.0)(gamma))
    right_work = float(S2_pieces["+"].integ(lbnd=gamma)(L))
    T_minus = D * (u_minus - eps * left_work) / gamma
    T_plus = D * (-u_plus - eps * right_work) / (L - gamma)
    u_tilde = PiecewiseField(
        gamma,
        (Polynomial([T_minus / D]) + S2_pieces["-"] * eps).integ(lbnd=0.0),
        u_plus + (Polynomial([T_plus / D]) + S2_pieces["+"] * eps).integ(lbnd=gamma),
    )
    T_tilde = PiecewiseField(gamma, Polynomial([T_minus]), Polynomial([T_plus]))

    S3_pieces = {}
    root = math.sqrt(lam)
    for side, poly in (("-", S1.minus), ("+", S1.plus)):
        well = wells[side]
        pp, ppp, pppp = (psi.eval(well, k) for k in (2, 3, 4))
        stress = T_minus if side == "-" else T_plus
        S3_pieces[side] = (
            Polynomial([eps * stress])
            - S2_pieces[side] * poly * ppp
            - poly ** 3 * (pppp / 6.0)
            + poly.deriv() * (root * speed_hint / c)
            + poly.deriv(2) * lam
        ) / pp
    S_tilde3 = PiecewiseField(gamma, S3_pieces["-"], S3_pieces["+"])

    logger.debug(f"Внешнее разложение: ũ⁻={u_minus:.4e}, ũ⁺={u_plus:.4e}, T̃⁻={T_minus:.4e}, T̃⁺={T_plus:.4e}")
    return OuterExpansion(
        hat=hat,
        check=check,
        S_tilde1=S1,
        S_tilde2=S_tilde2,
        S_tilde3=S_tilde3,
        u_tilde=u_tilde,
        T_tilde=T_tilde,
        u_trace_minus=u_minus,
        u_trace_plus=u_plus,
        speed_hint=speed_hint,
    )
