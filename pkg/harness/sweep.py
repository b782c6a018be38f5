"""
Серии расчётов по сетке (μ, λ) и подгонка показателей.

Точки независимы и могут считаться в пуле процессов; ошибка в одной
точке записывается в таблицу, серия продолжается.
"""

import copy
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from asymptotic.regions import check_guards
from asymptotic.residuals import asymptotic_solution, residuals
from harness.fitting import fit_table, slope_within
from harness.reports import write_summary, write_table
from mechanics.transmission import build_bar
from potential.double_well import build_potential, decay_rate
from profiles.kinetics import check_parameters
from simulator.experiments import measure_speed_vs_kinetics, radial_benchmark, width_experiment
from simulator.state import PLANAR, build_sim_config


logger = logging.getLogger(__name__)

SPEED = "speed"
RESIDUALS = "residuals"
WIDTH = "width"
RADIAL = "radial"
KINDS = (SPEED, RESIDUALS, WIDTH, RADIAL)

# Ожидаемые полосы наклонов по μ (для ширины и по λ)
EXPECTED_SLOPES: Dict[str, Dict[str, Tuple[float, float]]] = {
    SPEED: {"model_error": (0.4, 0.6), "remainder_s10": (0.85, math.inf)},
    RESIDUALS: {"f2_inn": (0.35, 0.65), "f1_out": (1.35, 1.65), "f3": (0.35, 0.65)},
    WIDTH: {"width": (0.45, 0.55)},
    RADIAL: {},
}


@dataclass(frozen=True)
class SweepPlan:
    """
    Серия расчётов.

    Attributes:
        kind: speed, residuals, width или radial
        mus, lams: Значения μ и λ; считаются все пары
        settings: Общие физические настройки (все секции)
        out_dir: Каталог для CSV и summary.json (None: не записывать)
        measure_time: Время измерения скорости или релаксации ширины
        refine_check: Считать ли сертификат сетки для скорости
    """
    kind: str
    mus: Tuple[float, ...]
    lams: Tuple[float, ...]
    settings: Dict[str, Any] = field(compare=False, repr=False)
    out_dir: Optional[str] = None
    measure_time: float = 0.02
    refine_check: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Неизвестный тип серии {self.kind}, допустимы {', '.join(KINDS)}")
        if not self.mus:
            raise ValueError("Список μ пуст")
        if not self.lams:
            raise ValueError("Список λ пуст")
        if self.measure_time <= 0:
            raise ValueError(f"measure_time должно быть положительным, получено {self.measure_time}")

        sim = self.settings["sim"]
        if self.kind == RADIAL and (sim["geometry"] == PLANAR or sim["domain"] is None):
            raise ValueError("Серия radial требует sim.geometry = radial2d или radial3d и заданного sim.domain")

        psi = build_potential(self.settings)
        a = decay_rate(psi)
        kinetics = self.settings["kinetics"]
        delta = self.neighbourhood()
        for mu, lam in self.points():
            check_parameters(mu, lam, kinetics["mu0"], kinetics["lambda0"])
            check_guards(mu, lam, a, delta, mu0=max(self.mus), lam0=max(self.lams))

    def neighbourhood(self) -> float:
        """δ: расстояние от границы до края области."""
        if self.kind == RADIAL:
            sim = self.settings["sim"]
            return min(sim["R0"], sim["domain"] - sim["R0"])
        bar = self.settings["bar"]
        return min(bar["interface"], bar["length"] - bar["interface"])

    def points(self) -> List[Tuple[float, float]]:
        return sorted(itertools.product(self.mus, self.lams))


@dataclass
class SweepResult:
    table: pd.DataFrame
    fits: Dict[str, Any]
    summary: Dict[str, Any]


def _planar_settings(settings: Dict[str, Any]) -> Dict[str, Any]:
    planar = copy.deepcopy(settings)
    planar["sim"]["geometry"] = PLANAR
    planar["sim"]["domain"] = None
    return planar


def _speed_point(settings, mu, lam, measure_time, refine_check) -> Dict[str, Any]:
    config = build_sim_config(_planar_settings(settings)).with_parameters(mu, lam)
    return measure_speed_vs_kinetics(config, measure_time, refine_check).to_row()


def _residual_point(settings, mu, lam, measure_time, refine_check) -> Dict[str, Any]:
    bar = build_bar(settings)
    psi = build_potential(settings)
    c = settings["kinetics"]["mobility"]
    interface = settings["interface"]
    composite = asymptotic_solution(bar, psi, mu, lam, c, interface["kappa"], interface["kappa_prime"])
    return residuals(composite, bar, psi, mu, lam, c, settings["residuals"]["points_per_width"]).to_row()


def _width_point(settings, mu, lam, measure_time, refine_check) -> Dict[str, Any]:
    config = build_sim_config(_planar_settings(settings)).with_parameters(mu, lam)
    return width_experiment(config, measure_time)


def _radial_point(settings, mu, lam, measure_time, refine_check) -> Dict[str, Any]:
    config = build_sim_config(settings).with_parameters(mu, lam)
    report, _ = radial_benchmark(config)
    return report.to_row()


POINT_RUNNERS = {
    SPEED: _speed_point,
    RESIDUALS: _residual_point,
    WIDTH: _width_point,
    RADIAL: _radial_point,
}


def run_point(kind: str, settings: Dict[str, Any], mu: float, lam: float, measure_time: float,
              refine_check: bool) -> Tuple[Optional[Dict[str, Any]], Optional[str]]:
    """
    Одна точка серии.

    Returns:
        (строка таблицы, None) при успехе или (None, сообщение об ошибке)
    """
    try:
        return POINT_RUNNERS[kind](settings, mu, lam, measure_time, refine_check), None
    except Exception as e:
        logger.warning(f"Точка μ={mu:g}, λ={lam:g} ({kind}) не посчитана: {e}")
        return None, f"{type(e).__name__}: {e}"


def _mark_bands(kind: str, column: str, fits: Dict[str, Any]) -> None:
    bounds = EXPECTED_SLOPES[kind][column]
    for fit in fits["fits"]:
        name = fit["name"]
        if "|ln mu|" in name:
            continue
        if "~ mu" in name:
            ok = slope_within(fit["slope"], bounds)
            if kind == WIDTH and "slope_lambda" in fit:
                ok = ok and slope_within(fit["slope_lambda"], bounds)
            fit["within_band"] = ok
        elif kind == WIDTH:
            fit["within_band"] = slope_within(fit["slope"], bounds)


def run_sweep(plan: SweepPlan, jobs: int = 1) -> SweepResult:
    """
    Выполняет серию, подгоняет наклоны и (если задан out_dir) пишет sweep.csv и summary.json.

    Raises:
        ValueError: Если jobs < 1
    """
    if jobs < 1:
        raise ValueError(f"Число процессов должно быть не меньше 1, получено {jobs}")
    tasks = plan.points()
    logger.info(f"Серия {plan.kind}: {len(tasks)} точек, процессов {jobs}")

    args = [(plan.kind, plan.settings, mu, lam, plan.measure_time, plan.refine_check) for mu, lam in tasks]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_point, *task) for task in args]
            results = [future.result() for future in futures]
    else:
        results = [run_point(*task) for task in args]

    rows = []
    for (mu, lam), (row, error) in zip(tasks, results):
        entry = dict(row) if row is not None else {"mu": mu, "lambda": lam}
        entry["error"] = error or ""
        rows.append(entry)
    table = pd.DataFrame(rows).sort_values(["mu", "lambda"], kind="mergesort").reset_index(drop=True)
    failed = int((table["error"] != "").sum())

    fits = {}
    secondary = plan.kind in (SPEED, RESIDUALS)
    for column in EXPECTED_SLOPES[plan.kind]:
        fits[column] = fit_table(table, column, secondary=secondary)
        _mark_bands(plan.kind, column, fits[column])

    summary: Dict[str, Any] = {
        "kind": plan.kind,
        "points": len(tasks),
        "failed": failed,
        "errors": table.loc[table["error"] != "", ["mu", "lambda", "error"]].to_dict("records"),
        "fits": fits,
    }
    if plan.kind == SPEED and "certificate_ok" in table:
        done = table[table["error"] == ""]
        summary["certificates"] = done[["mu", "lambda", "certificate", "certificate_ok"]].to_dict("records")
        summary["all_certificates_ok"] = bool(done["certificate_ok"].astype(bool).all()) if plan.refine_check else None
    if "energy_ok" in table:
        done = table[table["error"] == ""]
        flagged = done[~done["energy_ok"].astype(bool)]
        summary["energy_violations"] = flagged[["mu", "lambda"]].to_dict("records")
        if not flagged.empty:
            logger.warning(f"Серия {plan.kind}: энергия росла в {len(flagged)} точках")
    if plan.kind == RADIAL and "max_deviation" in table:
        summary["max_deviation"] = float(table["max_deviation"].max())
    if plan.kind == WIDTH and "width_ratio" in table:
        ratios = table["width_ratio"].dropna()
        if not ratios.empty:
            summary["width_ratio_mean"] = float(ratios.mean())
            summary["width_ratio_spread"] = float((ratios.max() - ratios.min()) / ratios.mean())

    if failed:
        logger.warning(f"Серия {plan.kind}: {failed} из {len(tasks)} точек завершились ошибкой")
    if plan.out_dir is not None:
        write_table(table, os.path.join(plan.out_dir, "sweep.csv"))
        write_summary(summary, os.path.join(plan.out_dir, "summary.json"))
    return SweepResult(table=table, fits=fits, summary=summary)


def build_sweep_plan(settings: Dict[str, Any], out_dir: Optional[str] = None) -> SweepPlan:
    """Строит SweepPlan из секции sweep настроек."""
    section = settings["sweep"]
    return SweepPlan(
        kind=section["kind"],
        mus=tuple(float(m) for m in section["mu"]),
        lams=tuple(float(v) for v in section["lambda"]),
        settings=settings,
        out_dir=out_dir,
        measure_time=float(section["measure_time"]),
        refine_check=bool(section["refine_check"]),
    )
