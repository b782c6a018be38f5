"""
Параметры численных затрат: энергия границы E, ошибка F, ширина B = EF
и e_num = B^{−p} при заданной допустимой ошибке модели ℰ.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EffortReport:
    """
    Оценка затрат.

    Attributes:
        target_error: ℰ
        E: Параметр энергии границы λ^{1/2}
        F: Параметр ошибки μ^{1/2}
        B: Ширина границы EF
        e_num: B^{−p}
        degenerate: True, если s₁₀ ≡ 0 и F = (ℰ/C_ℰ)^{1/2}
    """
    target_error: float
    E: float
    F: float
    B: float
    e_num: float
    power: float
    degenerate: bool

    @property
    def lam(self) -> float:
        return self.E ** 2

    @property
    def mu(self) -> float:
        return self.F ** 2

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.update(mu=self.mu, **{"lambda": self.lam})
        return data


def effort_report(target_error: float, curvature_norm: float, s10_norm: float, c: float, p: float,
                  remainder_constant: float = 1.0) -> EffortReport:
    """
    E = ℰ/(c∥κ∥), F = 2ℰ/∥s₁₀∥, B = EF, e_num = B^{−p}.

    При ∥s₁₀∥ = 0 используется вырожденная ветвь F = (ℰ/C_ℰ)^{1/2},
    тогда B ∝ ℰ^{3/2} и e_num ∝ ℰ^{−3p/2}.

    Raises:
        ValueError: Если ℰ, ∥κ∥, c, p или C_ℰ не положительны, или ∥s₁₀∥ < 0
    """
    for name, value in (("target_error", target_error), ("curvature_norm", curvature_norm),
                        ("mobility", c), ("power", p), ("remainder_constant", remainder_constant)):
        if not value > 0:
            raise ValueError(f"{name} должно быть положительным, получено {value}")
    if s10_norm < 0:
        raise ValueError(f"s10_norm не может быть отрицательным, получено {s10_norm}")

    E = target_error / (c * curvature_norm)
    degenerate = s10_norm == 0
    if degenerate:
        F = math.sqrt(target_error / remainder_constant)
    else:
        F = 2.0 * target_error / s10_norm
    B = E * F
    report = EffortReport(target_error=target_error, E=E, F=F, B=B, e_num=B ** (-p), power=p,
                          degenerate=degenerate)
    logger.info(f"ℰ={target_error:g}: E={E:.4e}, F={F:.4e}, B={B:.4e}, e_num={report.e_num:.4e}"
                + (" (вырожденная ветвь)" if degenerate else ""))
    return report


def fundamental_speed(driving_force: float, kappa: float, E: float, model_error: float,
                      c: float, c1: float) -> float:
    """s_AC = (c/c₁)·n·[Ĉ]n + cκE + ℰ[E, F]."""
    return c / c1 * driving_force + c * kappa * E + model_error
