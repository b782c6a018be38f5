"""
Разбиение окрестности границы на внутреннюю зону, зону сращивания и внешнюю зону.

Внутренняя зона: |ξ| < 3/2·B|ln μ|/a, зона сращивания: до 3·B|ln μ|/a,
где B = (μλ)^{1/2}. Весовая функция φ_μλ равна 1 во внутренней зоне и 0 во
внешней.
"""

import math
from typing import Union

import numpy as np

from profiles.kinetics import LAMBDA0, MU0, check_parameters
from profiles.profile import plateau


ArrayLike = Union[float, np.ndarray]

INNER = "inner"
MATCH = "match"
OUTER = "outer"


class RegionGeometryError(ValueError):
    """Зона сращивания выходит за трубчатую окрестность границы."""


def width(mu: float, lam: float) -> float:
    """Параметр ширины B = (μλ)^{1/2}."""
    return math.sqrt(mu * lam)


def match_scale(mu: float, lam: float, a: float) -> float:
    """ℓ = B|ln μ|/a; внутренняя зона |ξ| < 1.5ℓ, внешняя |ξ| > 3ℓ."""
    return width(mu, lam) * abs(math.log(mu)) / a


def blending(xi: ArrayLike, mu: float, lam: float, a: float, derivative: int = 0) -> ArrayLike:
    """
    φ_μλ(ξ) = φ(2aξ/(3B|ln μ|)) и её производные по ξ.
    """
    stretch = 1.0 / (1.5 * match_scale(mu, lam, a))
    return plateau(np.asarray(xi, dtype=float) * stretch, derivative) * stretch ** derivative


def classify(xi: ArrayLike, mu: float, lam: float, a: float) -> np.ndarray:
    """Метка зоны (inner / match / outer) для каждой точки ξ."""
    ell = match_scale(mu, lam, a)
    distance = np.abs(np.asarray(xi, dtype=float))
    labels = np.full(distance.shape, MATCH, dtype=object)
    labels[distance < 1.5 * ell] = INNER
    labels[distance > 3.0 * ell] = OUTER
    return labels


def check_geometry(mu: float, lam: float, a: float, delta: float) -> None:
    """
    Зона сращивания должна лежать в окрестности ширины δ.

    Raises:
        RegionGeometryError: Если 3(μλ)^{1/2}|ln μ|/a ≥ δ
    """
    reach = 3.0 * match_scale(mu, lam, a)
    if reach >= delta:
        raise RegionGeometryError(
            f"Зона сращивания 3B|ln μ|/a = {reach:.4g} не помещается в окрестность δ = {delta:.4g}"
        )


def check_guards(mu: float, lam: float, a: float, delta: float,
                 mu0: float = MU0, lam0: float = LAMBDA0) -> None:
    """
    Ограничения на область параметров: μ₀ ≤ e⁻², 3(μ₀λ₀)^{1/2}|ln μ₀|/a < δ, 0 < μ ≤ μ₀, 0 < λ ≤ λ₀.

    Raises:
        RegionGeometryError: Если нарушены ограничения на μ₀, λ₀
        ValueError: Если μ или λ вне области параметров
    """
    if mu0 > MU0 * (1.0 + 1e-12):
        raise RegionGeometryError(f"μ₀ = {mu0:g} больше e⁻² = {MU0:.6g}")
    try:
        check_geometry(mu0, lam0, a, delta)
    except RegionGeometryError as e:
        raise RegionGeometryError(f"Ограничение на (μ₀, λ₀) нарушено: {e}") from e
    check_parameters(mu, lam, mu0, lam0)
    check_geometry(mu, lam, a, delta)
