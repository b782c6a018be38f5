"""
Главный файл запуска лаборатории кинетического соотношения.

Загружает конфигурацию, настраивает логирование и выполняет одну из
подкоманд: profiles, kinetics, simulate, sweep, residuals, effort.
"""

import argparse
import logging
import math
import os
import sys
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from asymptotic.residuals import residual_study
from config.loader import ConfigLoader
from harness.effort import effort_report, fundamental_speed
from harness.fitting import fit_table
from harness.reports import write_summary, write_table
from harness.sweep import build_sweep_plan, run_sweep
from mechanics.tensor_algebra import ElasticityTensor, SymTensor3, eshelby_normal_jump, jump_data
from mechanics.transmission import build_bar, solve_interface, synthetic_interface_data
from potential.double_well import build_potential
from profiles.kinetics import compute_profiles, cross_validate, decay_slopes, kinetic_relation
from profiles.solvers import growth_constant, kernel_residual
from simulator.experiments import radial_benchmark, run_simulation
from simulator.state import PLANAR, build_sim_config


logger = logging.getLogger(__name__)

COMMANDS = ("profiles", "kinetics", "simulate", "sweep", "residuals", "effort")


def setup_logging(settings: Dict[str, Any], out_dir: str) -> None:
    """Настройка логирования: консоль и файл из секции logging."""
    section = settings["logging"]
    os.makedirs(out_dir, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, str(section["level"]).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stdout),
            logging.FileHandler(os.path.join(out_dir, section["file"]), encoding='utf-8')
        ]
    )


def _profile_set(settings: Dict[str, Any], data):
    psi = build_potential(settings)
    kinetics, prof = settings["kinetics"], settings["profiles"]
    return compute_profiles(psi, data, kinetics["lambda"], kinetics["mobility"],
                            prof["half_width"], prof["points"], prof["tail_tol"])


def run_profiles(settings: Dict[str, Any], out_dir: str) -> Dict[str, Any]:
    """Профили S₀, S₁, S₂ для настроенного стержня, дефекты и контрольные интегралы."""
    psi = build_potential(settings)
    interface = settings["interface"]
    c = settings["kinetics"]["mobility"]
    data = solve_interface(build_bar(settings), psi, interface["kappa"], interface["kappa_prime"])
    profiles = _profile_set(settings, data)
    gaps = cross_validate(psi, profiles, data, c)

    grid = profiles.S0.grid
    table = pd.DataFrame({
        "zeta": grid,
        "S0": profiles.S0.values,
        "S1": profiles.S1.values,
        "S2": profiles.S2.values,
        "rho1": profiles.rho1.values,
        "rho2": profiles.rho2.values,
    })
    write_table(table, os.path.join(out_dir, "profiles.csv"))
    summary = {
        "potential": psi.name,
        "c1": profiles.c1,
        "lambda": profiles.lam,
        "coefficients": profiles.coefficients.to_dict(),
        "defects": profiles.defects,
        "integrals": profiles.integrals,
        "decay_slopes": decay_slopes(profiles),
        "kernel_residual": kernel_residual(psi, profiles.S0),
        "growth_constants": {"S1": growth_constant(profiles.S1), "S2": growth_constant(profiles.S2)},
        "cross_validation": gaps,
        "interface_data": data.to_dict(),
    }
    write_summary(summary, os.path.join(out_dir, "summary.json"))
    return summary


def _synthetic_coefficients(settings: Dict[str, Any]) -> Dict[str, Any]:
    section = settings["synthetic"]
    interface = settings["interface"]
    kinetics = settings["kinetics"]
    psi = build_potential(settings)
    D = ElasticityTensor.isotropic(section["lame_lambda"], section["lame_mu"])
    normal = np.asarray(section["normal"], dtype=float)
    eps_bar = SymTensor3.from_matrix(np.asarray(section["eps_bar"], dtype=float))
    T_minus = SymTensor3.from_matrix(np.asarray(section["T_minus"], dtype=float))

    data = synthetic_interface_data(
        D, normal, eps_bar, T_minus, psi,
        sigma_check0=section["sigma_check0"],
        sigma_hat_prime0=section["sigma_hat_prime0"],
        grad_term=section["grad_term"],
        kappa=interface["kappa"],
        kappa_prime=interface["kappa_prime"],
    )
    profiles = _profile_set(settings, data)
    T_plus = T_minus + jump_data(D, normal, eps_bar).stress_jump
    driving = eshelby_normal_jump(T_plus, T_minus, eps_bar, 0.0)
    lam, c = kinetics["lambda"], kinetics["mobility"]
    sharp = fundamental_speed(driving, interface["kappa"], math.sqrt(lam), 0.0, c, profiles.c1)
    s0 = profiles.coefficients.s0(lam)
    if abs(sharp - s0) > 1e-8 * max(1.0, abs(s0)):
        logger.warning(f"Скорость по скачку Эшелби {sharp:.6e} расходится с s₀ = {s0:.6e}")
    return {
        "coefficients": profiles.coefficients.to_dict(),
        "speed": kinetic_relation(profiles.coefficients, kinetics["mu"], lam, kinetics["mu0"], kinetics["lambda0"]),
        "eshelby_jump": driving,
        "sharp_speed": sharp,
        "s0": s0,
        "interface_data": data.to_dict(),
    }


def run_kinetics(settings: Dict[str, Any], out_dir: str) -> Dict[str, Any]:
    """Коэффициенты кинетического соотношения для стержня и синтетической 3D границы."""
    psi = build_potential(settings)
    interface, kinetics = settings["interface"], settings["kinetics"]
    data = solve_interface(build_bar(settings), psi, interface["kappa"], interface["kappa_prime"])
    profiles = _profile_set(settings, data)
    summary = {
        "potential": psi.name,
        "mu": kinetics["mu"],
        "lambda": kinetics["lambda"],
        "bar": {
            "coefficients": profiles.coefficients.to_dict(),
            "speed": kinetic_relation(profiles.coefficients, kinetics["mu"], kinetics["lambda"],
                                      kinetics["mu0"], kinetics["lambda0"]),
            "interface_data": data.to_dict(),
        },
        "synthetic": _synthetic_coefficients(settings),
    }
    write_summary(summary, os.path.join(out_dir, "summary.json"))
    return summary


def run_simulate(settings: Dict[str, Any], out_dir: str) -> Dict[str, Any]:
    """Прямой расчёт: временной ряд, финальные поля, сводка."""
    config = build_sim_config(settings)
    if config.geometry == PLANAR:
        result = run_simulation(config)
        summary = dict(result.summary)
    else:
        report, result = radial_benchmark(config)
        summary = dict(result.summary, radial=report.to_row())

    write_table(result.series, os.path.join(out_dir, "timeseries.csv"))
    write_table(pd.DataFrame(result.state.fields()), os.path.join(out_dir, "fields.csv"),
                columns=["x", "S", "u", "T"])
    write_summary(summary, os.path.join(out_dir, "summary.json"))
    return summary


def run_sweep_command(settings: Dict[str, Any], out_dir: str, jobs: int = 1) -> Dict[str, Any]:
    plan = build_sweep_plan(settings, out_dir)
    return run_sweep(plan, jobs).summary


def run_residuals(settings: Dict[str, Any], out_dir: str) -> Dict[str, Any]:
    """Невязки составного решения для набора μ и подгонка показателей."""
    section = settings["residuals"]
    interface = settings["interface"]
    reports = residual_study(
        build_bar(settings), build_potential(settings), list(section["mu"]), section["lambda"],
        settings["kinetics"]["mobility"], interface["kappa"], interface["kappa_prime"],
        section["points_per_width"],
    )
    table = pd.DataFrame([report.to_row() for report in reports])
    write_table(table, os.path.join(out_dir, "residuals.csv"))
    summary = {
        "lambda": section["lambda"],
        "fits": {column: fit_table(table, column, secondary=True)
                 for column in ("f1_inn", "f1_out", "f2_inn", "f2_out", "f3", "f1_l1", "f2_l1")},
    }
    write_summary(summary, os.path.join(out_dir, "summary.json"))
    return summary


def run_effort(settings: Dict[str, Any], out_dir: str) -> Dict[str, Any]:
    section = settings["effort"]
    report = effort_report(section["target_error"], section["curvature_norm"], section["s10_norm"],
                           section["mobility"], section["power"], section["remainder_constant"])
    summary = report.to_dict()
    write_summary(summary, os.path.join(out_dir, "summary.json"))
    return summary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Кинетическое соотношение модели Аллена–Кана")
    parser.add_argument("command", choices=COMMANDS, help="Подкоманда")
    parser.add_argument("--config", default=None, help="Путь к settings.yaml")
    parser.add_argument("--out", default="output", help="Каталог результатов")
    parser.add_argument("--jobs", type=int, default=1, help="Число процессов для серии")
    return parser


def main(argv: Optional[List[str]] = None) -> Dict[str, Any]:
    """Главная функция запуска."""
    args = build_parser().parse_args(argv)

    try:
        config_loader = ConfigLoader(path=args.config)
        config_loader.load()
        settings = config_loader.get_settings()
        setup_logging(settings, args.out)

        logger.info(f"Подкоманда {args.command}, результаты в {args.out}")
        if args.command == "profiles":
            summary = run_profiles(settings, args.out)
        elif args.command == "kinetics":
            summary = run_kinetics(settings, args.out)
        elif args.command == "simulate":
            summary = run_simulate(settings, args.out)
        elif args.command == "sweep":
            summary = run_sweep_command(settings, args.out, args.jobs)
        elif args.command == "residuals":
            summary = run_residuals(settings, args.out)
        else:
            summary = run_effort(settings, args.out)
        logger.info("Готово")
        return summary
    except Exception as e:
        logger.error(f"Критическая ошибка: {e}", exc_info=True)
        raise


if __name__ == "__main__":
    main()
