"""
Составное асимптотическое решение на стержне.

Внутреннее разложение
    u₁ = B·u₀(ζ) + μλ^{1/2}·u₁(ζ) + μλ·u₂(ζ) + v̂ + μ^{1/2}v̌,
    S₁ = S₀(ζ) + μ^{1/2}S₁(ζ) + μS₂(ζ),   ζ = ξ/B,
сшивается с внешним весом φ_μλ; напряжение T = D(∂ₓu − ε̄S).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict

import numpy as np
from scipy import integrate

from asymptotic.outer import OuterExpansion
from asymptotic.regions import MATCH, blending, check_geometry, classify, width
from mechanics.transmission import InterfaceData
from potential.double_well import DoubleWellPotential, decay_rate
from profiles.kinetics import ProfileSet, check_parameters
from profiles.profile import Profile
from profiles.solvers import s0_derivative, s0_integral


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FieldJets:
    """Значения составного поля и производных на наборе точек x."""
    x: np.ndarray
    u: np.ndarray
    du: np.ndarray
    S: np.ndarray
    dS: np.ndarray
    d2S: np.ndarray
    T: np.ndarray
    weight: np.ndarray


@dataclass(eq=False)
class CompositeField:
    """
    Составное решение (u, S, T) при заданных μ, λ.

    Attributes:
        outer: Внешнее разложение
        profiles: Профили S₀, S₁, S₂
        data: Интерфейсные данные
        psi: Потенциал
        mu, lam: Параметры
        S0_integral: ∫_{−∞}^ζ S₀ как профиль
        S1_integral: ∫_0^ζ S₁ как профиль
        S0_double_integral: ∫_{−∞}^ζ∫_{−∞}^ϑ S₀ как профиль
    """
    outer: OuterExpansion
    profiles: ProfileSet
    data: InterfaceData
    psi: DoubleWellPotential
    mu: float
    lam: float
    S0_integral: Profile
    S1_integral: Profile
    S0_double_integral: Profile

    @property
    def interface(self) -> float:
        return self.outer.interface

    @property
    def width(self) -> float:
        return width(self.mu, self.lam)

    @property
    def decay(self) -> float:
        return decay_rate(self.psi)

    def regions(self, x: np.ndarray) -> np.ndarray:
        return classify(np.asarray(x, dtype=float) - self.interface, self.mu, self.lam, self.decay)

    def _remainders(self, x: np.ndarray, xi: np.ndarray):
        """v̂, v̌ и их первые производные."""
        data = self.data
        hat, check = self.outer.hat.displacement, self.outer.check.displacement
        plus = xi >= 0.0
        v_hat = hat(x) - np.where(plus, data.u_star * xi + 0.5 * data.a_star * xi ** 2, 0.0)
        dv_hat = hat(x, 1) - np.where(plus, data.u_star + data.a_star * xi, 0.0)
        limit = np.where(plus, data.limit_plus, data.limit_minus)
        v_check = check(x) - data.u_star * limit * xi
        dv_check = check(x, 1) - data.u_star * limit
        return v_hat, dv_hat, v_check, dv_check

    def inner(self, x: np.ndarray) -> Dict[str, np.ndarray]:
        """Внутреннее разложение и его производные."""
        x = np.asarray(x, dtype=float)
        B, mu, data = self.width, self.mu, self.data
        root = math.sqrt(mu)
        xi = x - self.interface
        zeta = xi / B
        S0, S1, S2 = self.profiles.S0, self.profiles.S1, self.profiles.S2

        s0 = np.asarray(S0(zeta))
        ds0 = s0_derivative(self.psi, s0)
        d2s0 = self.psi.eval(s0, 1)
        S = s0 + root * S1(zeta) + mu * S2(zeta)
        dS = (ds0 + root * S1(zeta, 1) + mu * S2(zeta, 1)) / B
        d2S = (d2s0 + root * S1(zeta, 2) + mu * S2(zeta, 2)) / B ** 2

        v_hat, dv_hat, v_check, dv_check = self._remainders(x, xi)
        u = (B * data.u_star * self.S0_integral(zeta)
             + mu * math.sqrt(self.lam) * data.u_star * self.S1_integral(zeta)
             + mu * self.lam * data.a_star * self.S0_double_integral(zeta)
             + v_hat + root * v_check)
        du = (data.u_star * s0 + root * data.u_star * S1(zeta)
              + B * data.a_star * self.S0_integral(zeta) + dv_hat + root * dv_check)
        return {"u": u, "du": du, "S": S, "dS": dS, "d2S": d2S}

    def outer_fields(self, x: np.ndarray) -> Dict[str, np.ndarray]:
        x = np.asarray(x, dtype=float)
        outer, mu = self.outer, self.mu
        return {
            "u": outer.displacement(x, mu),
            "du": outer.displacement(x, mu, 1),
            "S": outer.order_parameter(x, mu),
            "dS": outer.order_parameter(x, mu, 1),
            "d2S": outer.order_parameter(x, mu, 2),
        }

    def jets(self, x: np.ndarray) -> FieldJets:
        """
        Составное поле φ·inner + (1 − φ)·outer с производными.

        Внутреннее разложение вычисляется только там, где φ > 0.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi = x - self.interface
        a = self.decay
        phi = np.asarray(blending(xi, self.mu, self.lam, a))
        dphi = np.asarray(blending(xi, self.mu, self.lam, a, 1))
        d2phi = np.asarray(blending(xi, self.mu, self.lam, a, 2))
        out = self.outer_fields(x)
        fields = {key: value.copy() for key, value in out.items()}

        active = phi > 0.0
        if np.any(active):
            inn = self.inner(x[active])
            o = {key: value[active] for key, value in out.items()}
            p, dp, d2p = phi[active], dphi[active], d2phi[active]
            gap_u, gap_S, gap_dS = inn["u"] - o["u"], inn["S"] - o["S"], inn["dS"] - o["dS"]
            fields["u"][active] = o["u"] + p * gap_u
            fields["du"][active] = o["du"] + dp * gap_u + p * (inn["du"] - o["du"])
            fields["S"][active] = o["S"] + p * gap_S
            fields["dS"][active] = o["dS"] + dp * gap_S + p * gap_dS
            fields["d2S"][active] = (o["d2S"] + d2p * gap_S + 2.0 * dp * gap_dS
                                     + p * (inn["d2S"] - o["d2S"]))

        bar = self.outer.hat.bar
        T = bar.modulus * (fields["du"] - bar.eps_bar * fields["S"])
        return FieldJets(x=x, u=fields["u"], du=fields["du"], S=fields["S"], dS=fields["dS"],
                         d2S=fields["d2S"], T=T, weight=phi)

    def matching_error(self, points: int = 401) -> float:
        """sup |S_inner − S_outer| по зоне сращивания с обеих сторон."""
        ell = 1.5 * self.width * abs(math.log(self.mu)) / self.decay
        offsets = np.linspace(ell, 2.0 * ell, points)
        x = self.interface + np.concatenate([-offsets[::-1], offsets])
        gap = self.inner(x)["S"] - self.outer_fields(x)["S"]
        mask = self.regions(x) == MATCH
        return float(np.max(np.abs(gap[mask])))


def _integral_profiles(profiles: ProfileSet, psi: DoubleWellPotential, data: InterfaceData):
    """Профили ∫_{−∞}^ζ S₀, ∫_0^ζ S₁ и ∫_{−∞}^ζ∫ S₀ для внутреннего перемещения."""
    S0, S1 = profiles.S0, profiles.S1
    grid, m, a = S0.grid, S0.center, S0.decay_rate
    first = s0_integral(psi, S0)
    S0_integral = Profile("int_S0", grid, first, first[0], first[-1], a, right_slope=1.0)

    running = integrate.cumulative_trapezoid(S1.values, grid, initial=0.0)
    running -= running[m]
    S1_integral = Profile("int_S1", grid, running, running[0], running[-1], a,
                          left_slope=data.limit_minus, right_slope=data.limit_plus)

    second = integrate.cumulative_trapezoid(first, grid, initial=0.0)
    S0_double = Profile("int_int_S0", grid, second, second[0], second[-1], a,
                        right_slope=float(first[-1]))
    return S0_integral, S1_integral, S0_double


def build_composite(outer: OuterExpansion, profiles: ProfileSet, data: InterfaceData,
                    psi: DoubleWellPotential, mu: float, lam: float) -> CompositeField:
    """
    Составное решение при (μ, λ).

    Raises:
        RegionGeometryError: Если 3(μλ)^{1/2}|ln μ|/a ≥ δ = min(γ, L − γ)
        ValueError: Для несимметричного потенциала или если сетка профилей
            не покрывает зону сращивания
    """
    if not psi.symmetric:
        raise ValueError(f"Составное решение строится только для симметричного потенциала, получен {psi.name}")
    check_parameters(mu, lam)
    bar = outer.hat.bar
    a = decay_rate(psi)
    check_geometry(mu, lam, a, min(bar.interface, bar.length - bar.interface))
    reach = 3.0 * abs(math.log(mu)) / a
    if profiles.S0.half_width < reach:
        raise ValueError(
            f"Сетка профилей Z={profiles.S0.half_width:g} не покрывает зону сращивания 3|ln μ|/a = {reach:.3f}"
        )
    if abs(profiles.lam - lam) > 1e-14:
        raise ValueError(f"Профили собраны при λ={profiles.lam:g}, запрошено λ={lam:g}")

    S0_integral, S1_integral, S0_double = _integral_profiles(profiles, psi, data)
    field = CompositeField(outer=outer, profiles=profiles, data=data, psi=psi, mu=mu, lam=lam,
                           S0_integral=S0_integral, S1_integral=S1_integral,
                           S0_double_integral=S0_double)
    logger.debug(f"Составное решение построено: μ={mu:g}, λ={lam:g}, B={field.width:.4e}")
    return field
