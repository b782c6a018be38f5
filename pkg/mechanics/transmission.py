"""
Задачи сопряжения на одномерном двухфазном стержне.

Решает первую задачу (û, T̂) с превращением ε̄Ŝ и вторую задачу (ǔ, Ť)
с источником ε̄·S̃₁, S̃₁ = ε̄T̂/ψ̂''(Ŝ). Решения хранятся как кусочно-
полиномиальные функции по обе стороны от границы γ, поэтому следы на
границе точные. Из решений извлекаются интерфейсные данные InterfaceData,
которые потребляют задачи для профилей S₁, S₂.

Нормаль направлена в фазу S = 1, то есть в сторону x > γ.
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from mechanics.tensor_algebra import ElasticityTensor, SymTensor3, jump_data
from potential.double_well import DoubleWellPotential


logger = logging.getLogger(__name__)

# Допуск тождества для σ̌(0), после которого данные считаются несогласованными
IDENTITY_TOL = 1e-8

# Степень интерполяции для неполиномиальной объёмной силы
FORCE_INTERP_DEGREE = 16

BodyForce = Union[Sequence[float], Callable[[np.ndarray], np.ndarray]]


class InconsistentDataError(RuntimeError):
    """Интерфейсные данные нарушают тождество для σ̌(0)."""


@dataclass(frozen=True)
class Bar1D:
    """
    Двухфазный стержень [0, L] с границей фаз в точке γ.

    Attributes:
        length: Длина L
        interface: Положение границы γ ∈ (0, L)
        modulus: Модуль упругости D > 0
        eps_bar: Деформация превращения ε̄
        body_force: Коэффициенты полинома b(x) (свободный член первым) или функция x → b(x)
        u0: Перемещение на левом конце
        uL: Перемещение на правом конце
    """
    length: float
    interface: float
    modulus: float
    eps_bar: float
    body_force: BodyForce = (0.0,)
    u0: float = 0.0
    uL: float = 0.0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"Длина стержня должна быть положительной, получено {self.length}")
        if not 0.0 < self.interface < self.length:
            raise ValueError(f"Граница γ={self.interface} должна лежать внутри (0, {self.length})")
        if self.modulus <= 0:
            raise ValueError(f"Модуль упругости должен быть положительным, получено {self.modulus}")

    def force(self) -> Polynomial:
        """Объёмная сила как полином (функции интерполируются по Чебышёву)."""
        if callable(self.body_force):
            cheb = Chebyshev.interpolate(self.body_force, FORCE_INTERP_DEGREE, domain=[0.0, self.length])
            return cheb.convert(kind=Polynomial)
        return Polynomial(np.asarray(self.body_force, dtype=float))

    def with_interface(self, gamma: float) -> "Bar1D":
        """Тот же стержень с другим положением границы."""
        return dataclasses.replace(self, interface=gamma)


@dataclass(frozen=True)
class PiecewiseField:
    """
    Функция, заданная полиномами на [0, γ] (сторона S = 0) и на [γ, L] (сторона S = 1).

    В самой точке γ значение берётся со стороны S = 1.
    """
    interface: float
    minus: Polynomial
    plus: Polynomial

    def __call__(self, x: Union[float, np.ndarray], derivative: int = 0) -> Union[float, np.ndarray]:
        points = np.asarray(x, dtype=float)
        left = self.minus.deriv(derivative) if derivative else self.minus
        right = self.plus.deriv(derivative) if derivative else self.plus
        values = np.where(points < self.interface, left(points), right(points))
        return float(values) if values.ndim == 0 else values

    def trace(self, side: str, derivative: int = 0) -> float:
        """След на границе со стороны '+' (S = 1) или '-' (S = 0)."""
        if side not in ("+", "-"):
            raise ValueError(f"Сторона должна быть '+' или '-', получено {side}")
        poly = self.plus if side == "+" else self.minus
        if derivative:
            poly = poly.deriv(derivative)
        return float(poly(self.interface))

    def jump(self, derivative: int = 0) -> float:
        """Скачок [w] = w⁺ − w⁻ производной заданного порядка."""
        return self.trace("+", derivative) - self.trace("-", derivative)

    def integral(self, length: float) -> float:
        """∫₀ᴸ по обоим кускам."""
        left = self.minus.integ(lbnd=0.0)
        right = self.plus.integ(lbnd=self.interface)
        return float(left(self.interface) + right(length))


@dataclass(frozen=True)
class BarSolution:
    """
    Решение задачи сопряжения.

    Attributes:
        bar: Стержень
        displacement: Перемещение (û или ǔ)
        stress: Напряжение (T̂ или Ť)
        phase_term: Член при ε̄ в законе Гука (Ŝ для первой задачи, S̃₁ для второй)
    """
    bar: Bar1D
    displacement: PiecewiseField
    stress: PiecewiseField
    phase_term: PiecewiseField


@dataclass(frozen=True)
class InterfaceData:
    """
    Скалярные интерфейсные величины для задач S₁, S₂ и формул скоростей.

    Все поля с префиксом eps_T являются свёртками ε̄ с напряжениями. Для синтетических
    данных (трёхмерная граница) поля задаются напрямую.
    """
    psi_pp_0: float
    psi_pp_1: float
    eps_T_plus: float = 0.0
    eps_T_minus: float = 0.0
    sigma_hat0: float = 0.0
    sigma_hat_prime0: float = 0.0
    sigma_check0: float = 0.0
    eps_check_T_mean: float = 0.0
    u_star: float = 0.0
    a_star: float = 0.0
    grad_term: float = 0.0
    kappa: float = 0.0
    kappa_prime: float = 0.0

    @property
    def eps_T_mean(self) -> float:
        return 0.5 * (self.eps_T_plus + self.eps_T_minus)

    @property
    def eps_T_jump(self) -> float:
        return self.eps_T_plus - self.eps_T_minus

    @property
    def limit_plus(self) -> float:
        """Предел S₁ при ζ → +∞: ε̄:T̂⁺/ψ̂''(1)."""
        return self.eps_T_plus / self.psi_pp_1

    @property
    def limit_minus(self) -> float:
        """Предел S₁ при ζ → −∞: ε̄:T̂⁻/ψ̂''(0)."""
        return self.eps_T_minus / self.psi_pp_0

    @property
    def limit_mean(self) -> float:
        """⟨ε̄:T̂/ψ̂''(Ŝ)⟩."""
        return 0.5 * (self.limit_plus + self.limit_minus)

    def check_T(self, side: str) -> float:
        """ε̄:Ť со стороны '+' или '-' по тождеству σ̌(0) + ε̄:[T̂]·ε̄:T̂^±/ψ̂''."""
        limit = self.limit_plus if side == "+" else self.limit_minus
        return self.sigma_check0 + self.eps_T_jump * limit

    def well_stress_defect(self) -> float:
        """Дефект тождества σ̌(0) = ε̄:⟨Ť⟩ − ε̄:[T̂]·⟨ε̄:T̂/ψ̂''⟩."""
        return abs(self.sigma_check0 - (self.eps_check_T_mean - self.eps_T_jump * self.limit_mean))

    def to_dict(self) -> Dict[str, float]:
        data = dataclasses.asdict(self)
        data.update(eps_T_mean=self.eps_T_mean, eps_T_jump=self.eps_T_jump)
        return data


def solve_hat(bar: Bar1D) -> BarSolution:
    """
    Первая задача сопряжения: −T̂' = b, T̂ = D(û' − ε̄Ŝ), û(0)=U₀, û(L)=U_L.

    Returns:
        Кусочно-полиномиальное решение; T̂ непрерывно, û' прыгает на ε̄
    """
    D, L, gamma, eps = bar.modulus, bar.length, bar.interface, bar.eps_bar
    load = bar.force().integ(lbnd=gamma)  # ∫_γ^x b
    # û(L) − U₀ = T̂(γ)L/D − ∫₀ᴸ∫_γ^x b/D + ε̄(L − γ)
    load_work = float((load / D).integ(lbnd=0.0)(L))
    stress_at_gamma = D * (bar.uL - bar.u0 - eps * (L - gamma) + load_work) / L

    stress = Polynomial([stress_at_gamma]) - load
    u_minus = bar.u0 + (stress / D).integ(lbnd=0.0)
    u_plus = float(u_minus(gamma)) + (stress / D + eps).integ(lbnd=gamma)

    logger.debug(f"T̂(γ) = {stress_at_gamma:.6e} при γ = {gamma:.6f}")
    return BarSolution(
        bar=bar,
        displacement=PiecewiseField(gamma, u_minus, u_plus),
        stress=PiecewiseField(gamma, stress, stress),
        phase_term=PiecewiseField(gamma, Polynomial([0.0]), Polynomial([1.0])),
    )


def solve_check(bar: Bar1D, hat: BarSolution, psi: DoubleWellPotential) -> BarSolution:
    """
    Вторая задача сопряжения с источником ε̄·S̃₁ и однородными краевыми условиями.

    Ť постоянно (объёмной силы нет), ǔ(0) = ǔ(L) = 0.
    """
    D, L, gamma, eps = bar.modulus, bar.length, bar.interface, bar.eps_bar
    pp0, pp1 = psi.well_curvatures()
    source = PiecewiseField(
        gamma,
        hat.stress.minus * (eps / pp0),
        hat.stress.plus * (eps / pp1),
    )
    check_stress = -D * eps * source.integral(L) / L

    u_minus = (Polynomial([check_stress / D]) + source.minus * eps).integ(lbnd=0.0)
    u_plus = float(u_minus(gamma)) + (Polynomial([check_stress / D]) + source.plus * eps).integ(lbnd=gamma)
    stress = Polynomial([check_stress])
    return BarSolution(
        bar=bar,
        displacement=PiecewiseField(gamma, u_minus, u_plus),
        stress=PiecewiseField(gamma, stress, stress),
        phase_term=source,
    )


def interface_data(bar: Bar1D, hat: BarSolution, check: BarSolution, psi: DoubleWellPotential,
                   kappa: float = 0.0, kappa_prime: float = 0.0) -> InterfaceData:
    """
    Извлекает интерфейсные данные из двух решений задач сопряжения.

    σ̂ и σ̌ вычисляются по остаткам v̂, v̌ со стороны ξ < 0, где
    v̂ = û и v̌ = ǔ − u*·ε̄T̂⁻/ψ̂''(0)·ξ.

    Raises:
        InconsistentDataError: Если тождество для σ̌(0) нарушено сильнее 1e-8
    """
    D, eps = bar.modulus, bar.eps_bar
    pp0, pp1 = psi.well_curvatures()
    u_hat, u_check = hat.displacement, check.displacement

    u_star = u_hat.jump(1)
    a_star = u_hat.jump(2)
    eps_T_minus = eps * hat.stress.trace("-")
    data = InterfaceData(
        psi_pp_0=pp0,
        psi_pp_1=pp1,
        eps_T_plus=eps * hat.stress.trace("+"),
        eps_T_minus=eps_T_minus,
        sigma_hat0=eps * D * u_hat.trace("-", 1),
        sigma_hat_prime0=eps * D * u_hat.trace("-", 2),
        sigma_check0=eps * D * (u_check.trace("-", 1) - u_star * eps_T_minus / pp0),
        eps_check_T_mean=eps * 0.5 * (check.stress.trace("+") + check.stress.trace("-")),
        u_star=u_star,
        a_star=a_star,
        grad_term=eps * D * a_star,
        kappa=kappa,
        kappa_prime=kappa_prime,
    )
    defect = data.well_stress_defect()
    if defect > IDENTITY_TOL:
        raise InconsistentDataError(f"Тождество для σ̌(0) нарушено: дефект {defect:.3e}")
    return data


def solve_interface(bar: Bar1D, psi: DoubleWellPotential, kappa: float = 0.0,
                    kappa_prime: float = 0.0) -> InterfaceData:
    """Обе задачи сопряжения и интерфейсные данные при текущем положении границы."""
    hat = solve_hat(bar)
    check = solve_check(bar, hat, psi)
    return interface_data(bar, hat, check, psi, kappa, kappa_prime)


def synthetic_interface_data(D: ElasticityTensor, n: Sequence[float], eps_bar: SymTensor3,
                             T_minus: SymTensor3, psi: DoubleWellPotential,
                             sigma_check0: float = 0.0, sigma_hat_prime0: float = 0.0,
                             grad_term: float = 0.0, kappa: float = 0.0,
                             kappa_prime: float = 0.0) -> InterfaceData:
    """
    Интерфейсные данные трёхмерной плоской границы.

    Напряжение со стороны S = 1 получается из скачка [T̂] = −DQₙε̄, а ε̄:⟨Ť⟩ берётся
    из тождества для σ̌(0). Так формулы скоростей проверяются на данных с
    ε̄:[T̂] ≠ 0, которые одномерный стержень дать не может.
    """
    jumps = jump_data(D, n, eps_bar)
    T_plus = T_minus + jumps.stress_jump
    pp0, pp1 = psi.well_curvatures()
    partial = InterfaceData(
        psi_pp_0=pp0,
        psi_pp_1=pp1,
        eps_T_plus=eps_bar.ddot(T_plus),
        eps_T_minus=eps_bar.ddot(T_minus),
        sigma_hat0=eps_bar.ddot(T_minus),
        sigma_hat_prime0=sigma_hat_prime0,
        sigma_check0=sigma_check0,
        u_star=float(jumps.u_star @ np.asarray(n, dtype=float)),
        grad_term=grad_term,
        kappa=kappa,
        kappa_prime=kappa_prime,
    )
    return dataclasses.replace(
        partial,
        eps_check_T_mean=sigma_check0 + partial.eps_T_jump * partial.limit_mean,
    )


def build_bar(settings: Dict[str, Any], interface: Optional[float] = None) -> Bar1D:
    """Строит стержень из секции bar настроек."""
    section = settings["bar"]
    return Bar1D(
        length=section["length"],
        interface=section["interface"] if interface is None else interface,
        modulus=section["modulus"],
        eps_bar=section["eps_bar"],
        body_force=tuple(section["body_force"]),
        u0=section["u0"],
        uL=section["uL"],
    )
