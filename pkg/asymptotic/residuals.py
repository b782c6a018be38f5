"""
Невязки f₁, f₂, f₃ составного решения в уравнениях модели Аллена–Кана.

f₁ = −∂ₓT − b (центральные разности по собранному T),
f₂ = ∂ₜS + (c/B)(−ε̄T + μ^{-1/2}ψ̂'(S) − μ^{1/2}λ∂²ₓS) с ∂ₜ ≈ −s∂ₓ,
f₃ = ∂ₙS на концах стержня.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from asymptotic.composite import CompositeField, build_composite
from asymptotic.outer import build_outer
from asymptotic.regions import OUTER, check_guards, match_scale, width
from mechanics.transmission import Bar1D, solve_check, solve_hat, interface_data
from potential.double_well import DoubleWellPotential, decay_rate
from profiles.kinetics import ProfileSet, compute_profiles
from profiles.solvers import DEFAULT_POINTS, MIN_HALF_WIDTH


logger = logging.getLogger(__name__)

# Допустимое расхождение норм на двух разрешениях
RESOLUTION_TOL = 0.2

# Нормы ниже этого уровня считаются шумом округления и не сравниваются
NOISE_FLOOR = 1e-11

# Запас сетки профилей за пределами зоны сращивания
PROFILE_MARGIN = 5.0


class ResolutionError(RuntimeError):
    """Сетка невязок не разрешает внутренний масштаб."""


@dataclass(frozen=True)
class ResidualReport:
    """
    Нормы невязок при (μ, λ).

    Поля *_inn: sup-норма по внутренней зоне и зоне сращивания, *_out: по
    внешней зоне; f1_l1, f2_l1: нормы в L¹ по всему стержню.
    """
    mu: float
    lam: float
    f1_inn: float
    f1_out: float
    f2_inn: float
    f2_out: float
    f3: float
    f1_l1: float
    f2_l1: float
    matching_error: float
    points: int

    @property
    def f1_l1_ratio(self) -> float:
        """∥f₁∥_{L¹}/(|ln μ|³μ)."""
        return self.f1_l1 / (abs(math.log(self.mu)) ** 3 * self.mu)

    @property
    def f2_l1_ratio(self) -> float:
        """∥f₂∥_{L¹}λ^{1/2}/(|ln μ|³μ)."""
        return self.f2_l1 * math.sqrt(self.lam) / (abs(math.log(self.mu)) ** 3 * self.mu)

    def to_row(self) -> Dict[str, float]:
        row = asdict(self)
        row["lambda"] = row.pop("lam")
        row.update(f1_l1_ratio=self.f1_l1_ratio, f2_l1_ratio=self.f2_l1_ratio)
        return row


def residual_grid(field: CompositeField, points_per_width: int, outer_points: int = 2001) -> np.ndarray:
    """
    Сетка: шаг B/points_per_width в полосе |ξ| ≤ 3.3ℓ и равномерная крупная сетка снаружи.
    """
    bar = field.outer.hat.bar
    B = field.width
    reach = 3.3 * match_scale(field.mu, field.lam, field.decay)
    gamma = field.interface
    fine = np.arange(-reach, reach + 0.5 * B / points_per_width, B / points_per_width) + gamma
    left = np.linspace(0.0, gamma - reach, outer_points, endpoint=False)
    right = np.linspace(gamma + reach, bar.length, outer_points)[1:]
    x = np.unique(np.concatenate([left, fine, right]))
    return x[(x >= 0.0) & (x <= bar.length)]


def _single_resolution(field: CompositeField, psi: DoubleWellPotential, c: float, speed: float,
                       points_per_width: int) -> ResidualReport:
    bar = field.outer.hat.bar
    mu, lam = field.mu, field.lam
    B = width(mu, lam)
    x = residual_grid(field, points_per_width)
    jets = field.jets(x)

    f1 = -np.gradient(jets.T, x) - bar.force()(x)
    f2 = -speed * jets.dS + (c / B) * (
        -bar.eps_bar * jets.T + psi.eval(jets.S, 1) / math.sqrt(mu) - math.sqrt(mu) * lam * jets.d2S
    )
    ends = field.jets(np.array([0.0, bar.length]))
    f3 = max(abs(ends.dS[0]), abs(ends.dS[1]))

    regions = field.regions(x)
    near = regions != OUTER
    outer = regions == OUTER
    # узлы, чей разностный шаблон задевает зону сращивания, исключаются
    outer[1:-1] &= outer[:-2] & outer[2:]

    return ResidualReport(
        mu=mu,
        lam=lam,
        f1_inn=float(np.max(np.abs(f1[near]))),
        f1_out=float(np.max(np.abs(f1[outer]))),
        f2_inn=float(np.max(np.abs(f2[near]))),
        f2_out=float(np.max(np.abs(f2[outer]))),
        f3=float(f3),
        f1_l1=float(integrate.trapezoid(np.abs(f1), x)),
        f2_l1=float(integrate.trapezoid(np.abs(f2), x)),
        matching_error=field.matching_error(),
        points=int(x.size),
    )


def residuals(field: CompositeField, bar: Bar1D, psi: DoubleWellPotential, mu: float, lam: float,
              c: float, points_per_width: int = 32, tol: float = RESOLUTION_TOL) -> ResidualReport:
    """
    Нормы невязок с проверкой разрешения по двум сеткам.

    Raises:
        ValueError: Если points_per_width < 32 или параметры поля не совпадают с (μ, λ)
        ResolutionError: Если sup-нормы на сетках h и h/2 расходятся больше чем на tol
    """
    if points_per_width < 32:
        raise ValueError(f"Нужно не меньше 32 точек на ширину B, получено {points_per_width}")
    if field.mu != mu or field.lam != lam or field.outer.hat.bar != bar:
        raise ValueError("Составное решение построено для других μ, λ или другого стержня")

    speed = field.profiles.coefficients.speed(mu, lam)
    coarse = _single_resolution(field, psi, c, speed, points_per_width)
    fine = _single_resolution(field, psi, c, speed, 2 * points_per_width)
    for name in ("f1_inn", "f1_out", "f2_inn", "f2_out"):
        a, b = getattr(coarse, name), getattr(fine, name)
        scale = max(abs(a), abs(b))
        if scale > NOISE_FLOOR and abs(a - b) > tol * scale:
            raise ResolutionError(
                f"{name}: нормы на двух сетках расходятся ({a:.4e} против {b:.4e}) при μ={mu:g}"
            )
    logger.info(f"Невязки μ={mu:g}, λ={lam:g}: f1_inn={fine.f1_inn:.3e}, f1_out={fine.f1_out:.3e}, "
                f"f2_inn={fine.f2_inn:.3e}, f2_out={fine.f2_out:.3e}, f3={fine.f3:.3e}")
    return fine


def profile_grid(psi: DoubleWellPotential, mu_min: float, points: int = DEFAULT_POINTS):
    """
    Полуширина и число точек сетки профилей, покрывающей зону сращивания при μ_min.

    Шаг сетки сохраняется таким же, как у сетки по умолчанию.
    """
    a = decay_rate(psi)
    base = max(12.0 / a, MIN_HALF_WIDTH)
    half_width = max(base, 3.0 * abs(math.log(mu_min)) / a + PROFILE_MARGIN)
    scaled = int(math.ceil((points - 1) * half_width / base))
    return half_width, scaled + 1 + scaled % 2


def asymptotic_solution(bar: Bar1D, psi: DoubleWellPotential, mu: float, lam: float, c: float,
                        kappa: float = 0.0, kappa_prime: float = 0.0,
                        profiles: Optional[ProfileSet] = None,
                        points: int = DEFAULT_POINTS) -> CompositeField:
    """Вся цепочка: задачи сопряжения → профили → внешнее разложение → составное поле."""
    hat = solve_hat(bar)
    check = solve_check(bar, hat, psi)
    data = interface_data(bar, hat, check, psi, kappa, kappa_prime)
    if profiles is None:
        half_width, n = profile_grid(psi, mu, points)
        profiles = compute_profiles(psi, data, lam, c, half_width, n)
    speed = profiles.coefficients.speed(mu, lam)
    outer = build_outer(bar, hat, check, psi, profiles, data, lam, c, speed)
    return build_composite(outer, profiles, data, psi, mu, lam)


def residual_study(bar: Bar1D, psi: DoubleWellPotential, mus: Sequence[float], lam: float, c: float,
                   kappa: float = 0.0, kappa_prime: float = 0.0, points_per_width: int = 32,
                   points: int = DEFAULT_POINTS) -> List[ResidualReport]:
    """
    Невязки для набора μ при фиксированном λ; профили решаются один раз.

    Raises:
        RegionGeometryError: Если область (0, max μ] × (0, λ] не помещается в окрестность границы
    """
    if not mus:
        raise ValueError("Список μ пуст")
    a = decay_rate(psi)
    delta = min(bar.interface, bar.length - bar.interface)
    for mu in mus:
        check_guards(mu, lam, a, delta, mu0=max(mus), lam0=lam)
    hat = solve_hat(bar)
    check = solve_check(bar, hat, psi)
    data = interface_data(bar, hat, check, psi, kappa, kappa_prime)
    half_width, n = profile_grid(psi, min(mus), points)
    profiles = compute_profiles(psi, data, lam, c, half_width, n)

    reports = []
    for mu in sorted(mus):
        field = asymptotic_solution(bar, psi, mu, lam, c, kappa, kappa_prime, profiles=profiles)
        reports.append(residuals(field, bar, psi, mu, lam, c, points_per_width))
    return reports
