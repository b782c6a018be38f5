"""
Численные эксперименты поверх шага по времени: временной ряд расчёта,
измерение скорости границы против кинетического соотношения, радиальный
тест сжатия и измерение ширины границы.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
import pandas as pd

from asymptotic.composite import CompositeField
from mechanics.transmission import solve_interface
from profiles.kinetics import compute_profiles
from simulator.state import PLANAR, SimConfig, SimState
from simulator.stepper import (
    discretize,
    elasticity_residual,
    free_energy,
    init_radial,
    init_state,
    seed_traveling,
    step,
    time_derivative,
)
from simulator.tracking import (
    SPEED_WINDOW,
    locate_level,
    measure_width,
    orientation,
    speed_series,
    window_speed,
)


logger = logging.getLogger(__name__)

# Допустимый относительный рост энергии за шаг
ENERGY_TOL = 1e-8

# Сертификат сетки: |Δs_AC| < CERTIFICATE_TOL·|s_AC − s₀| при h → h/2
CERTIFICATE_TOL = 0.1

# Радиальный тест проверяется, пока R ≥ STOP_WIDTHS·B
STOP_WIDTHS = 5.0

SERIES_COLUMNS = ["t", "interface_position", "speed", "energy"]


@dataclass
class SimulationResult:
    """Финальное состояние, временной ряд и сводка одного расчёта."""
    config: SimConfig
    state: SimState
    series: pd.DataFrame
    summary: Dict[str, Any] = field(default_factory=dict)


def run_simulation(config: SimConfig, state: Optional[SimState] = None,
                   end_time: Optional[float] = None,
                   stop: Optional[Callable[[SimState, float], bool]] = None) -> SimulationResult:
    """
    Интегрирует задачу до end_time, записывая положение границы каждые output_every шагов.

    Args:
        config: Параметры расчёта
        state: Начальное состояние (по умолчанию из init_state)
        end_time: Время окончания (по умолчанию config.end_time)
        stop: Условие досрочной остановки по (состояние, положение границы)
    """
    state = init_state(config) if state is None else state.copy()
    end_time = config.end_time if end_time is None else end_time
    dt = config.time_step()
    n_steps = max(int(math.ceil((end_time - state.t) / dt - 1e-9)), 0)
    if n_steps:
        dt = (end_time - state.t) / n_steps
    logger.info(f"Расчёт {config.geometry}: N={config.points}, dt={dt:.3e}, шагов {n_steps}, "
                f"μ={config.mu:g}, λ={config.lam:g}")

    energies = []
    energy = free_energy(state, config)
    initial_energy = energy
    worst = 0.0

    def record(current: SimState, value: float) -> float:
        position = locate_level(current.x, current.S)
        current.times.append(current.t)
        current.positions.append(position)
        energies.append(value)
        return position

    record(state, energy)
    for k in range(1, n_steps + 1):
        state = step(state, config, dt)
        new_energy = free_energy(state, config)
        worst = max(worst, new_energy - energy)
        energy = new_energy
        if k % config.output_every == 0 or k == n_steps:
            position = record(state, energy)
            logger.debug(f"t={state.t:.5e}: граница {position:.6f}, энергия {energy:.8e}")
            if stop is not None and stop(state, position):
                logger.info(f"Остановка по условию при t={state.t:.4e}")
                break

    scale = abs(initial_energy) if initial_energy else 1.0
    energy_increase = worst / scale
    energy_ok = bool(energy_increase <= ENERGY_TOL)
    if not energy_ok:
        logger.warning(f"Энергия выросла за шаг на {energy_increase:.3e} (относительно E₀)")

    series = pd.DataFrame({
        "t": state.times,
        "interface_position": state.positions,
        "speed": speed_series(state.times, state.positions, state.geometry),
        "energy": energies,
    }, columns=SERIES_COLUMNS)
    summary = {
        "geometry": config.geometry,
        "mu": config.mu,
        "lambda": config.lam,
        "points": config.points,
        "dt": dt,
        "steps": state.steps,
        "rejected_steps": state.rejected,
        "overshoot": state.overshoot,
        "energy_initial": initial_energy,
        "energy_final": energy,
        "energy_increase": energy_increase,
        "energy_ok": energy_ok,
        "elasticity_residual": elasticity_residual(config, state.u, state.S),
        "final_position": state.positions[-1],
    }
    logger.info(f"Расчёт завершён: t={state.t:.4e}, граница {state.positions[-1]:.6f}, "
                f"отклонено шагов {state.rejected}")
    return SimulationResult(config=config, state=state, series=series, summary=summary)


def measured_speed(state: SimState) -> tuple:
    """
    Скорость по последнему окну записей и положение в центре окна.

    Raises:
        ValueError: Если записей меньше пяти
    """
    if len(state.times) < SPEED_WINDOW:
        raise ValueError(
            f"Для скорости нужно {SPEED_WINDOW} записей, есть {len(state.times)}: "
            f"увеличьте время измерения или уменьшите output_every"
        )
    speed = orientation(state.geometry) * window_speed(state.times, state.positions)
    center = state.positions[-(SPEED_WINDOW // 2) - 1]
    return speed, center


def speed_identity_check(state: SimState, config: SimConfig, composite: CompositeField) -> Dict[str, float]:
    """
    Разность скоростей в начальном состоянии, записанная двумя способами.

    −∂ₜS_AC/∂ₓS − s (правая часть дискретной задачи) сравнивается с
    (f₂ − (c/B)ε̄(T_AC − T))/∂ₓS, где f₂ и T берутся из составного поля в γ.
    """
    gamma = composite.interface
    jets = composite.jets(np.array([gamma]))
    mu, lam = config.mu, config.lam
    s = composite.profiles.coefficients.speed(mu, lam)
    S, dS, d2S, T = float(jets.S[0]), float(jets.dS[0]), float(jets.d2S[0]), float(jets.T[0])

    f2 = -s * dS + config.rate * (
        -config.eps_bar * T + config.psi.eval(S, 1) / math.sqrt(mu) - math.sqrt(mu) * lam * d2S
    )
    dSdt = float(np.interp(gamma, state.x, time_derivative(state, config)))
    T_ac = float(np.interp(gamma, state.x, state.T))
    lhs = -dSdt / dS - s
    rhs = (f2 - config.rate * config.eps_bar * (T_ac - T)) / dS
    return {"identity_lhs": lhs, "identity_rhs": rhs, "identity_gap": lhs - rhs, "identity_f2": f2}


@dataclass(frozen=True)
class SpeedReport:
    """
    Измеренная скорость s_AC против кинетического соотношения.

    model_error = s_AC − s₀, remainder = s_AC − s₀ − μ^{1/2}s₁,
    remainder_s10 = s_AC − s₀ − μ^{1/2}s₁₀; certificate = |Δs_AC|/|s_AC − s₀|
    при сгущении сетки вдвое.
    """
    mu: float
    lam: float
    points: int
    measure_time: float
    position: float
    s_ac: float
    s0: float
    s1: float
    s10: float
    s11: float
    speed: float
    driving_force: float
    model_error: float
    remainder: float
    remainder_s10: float
    refined_s_ac: float
    certificate: float
    certificate_ok: bool
    width_ratio: float
    energy_increase: float
    energy_ok: bool
    identity_lhs: float
    identity_rhs: float
    identity_gap: float

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["lambda"] = row.pop("lam")
        return row


def measure_speed_vs_kinetics(config: SimConfig, measure_time: Optional[float] = None,
                              refine_check: bool = True) -> SpeedReport:
    """
    Плоский расчёт до measure_time и сравнение s_AC с s₀ и s₀ + μ^{1/2}s₁.

    Коэффициенты пересчитываются по мгновенному решению задач сопряжения
    при положении границы в центре окна скорости. Краевые перемещения
    постоянны во времени.
    """
    if config.geometry != PLANAR:
        raise ValueError("Измерение скорости требует плоской геометрии")
    measure_time = config.end_time if measure_time is None else measure_time
    mu, lam = config.mu, config.lam

    state, composite = seed_traveling(config)
    identity = speed_identity_check(state, config, composite)
    result = run_simulation(config, state, measure_time)
    s_ac, center = measured_speed(result.state)

    data = solve_interface(config.bar.with_interface(center), config.psi)
    coefficients = compute_profiles(config.psi, data, lam, config.c).coefficients
    s0, s1 = coefficients.s0(lam), coefficients.s1(lam)
    model_error = s_ac - s0

    refined = float("nan")
    certificate = float("nan")
    certificate_ok = False
    if refine_check:
        fine_config = config.refined()
        fine_state, _ = seed_traveling(fine_config, composite)
        fine = run_simulation(fine_config, fine_state, measure_time)
        refined, _ = measured_speed(fine.state)
        change = abs(refined - s_ac)
        certificate = change / abs(model_error) if model_error else math.inf
        certificate_ok = change < CERTIFICATE_TOL * abs(model_error)
        if not certificate_ok:
            logger.warning(f"Сертификат сетки не выполнен при μ={mu:g}: |Δs_AC| = {change:.3e}, "
                           f"|s_AC − s₀| = {abs(model_error):.3e}")

    report = SpeedReport(
        mu=mu,
        lam=lam,
        points=config.points,
        measure_time=measure_time,
        position=center,
        s_ac=s_ac,
        s0=s0,
        s1=s1,
        s10=coefficients.s10,
        s11=coefficients.s11,
        speed=coefficients.speed(mu, lam),
        driving_force=-data.eps_T_mean,
        model_error=model_error,
        remainder=s_ac - coefficients.speed(mu, lam),
        remainder_s10=model_error - math.sqrt(mu) * coefficients.s10,
        refined_s_ac=refined,
        certificate=certificate,
        certificate_ok=certificate_ok,
        width_ratio=measure_width(result.state.x, result.state.S) / config.width,
        energy_increase=result.summary["energy_increase"],
        energy_ok=result.summary["energy_ok"],
        identity_lhs=identity["identity_lhs"],
        identity_rhs=identity["identity_rhs"],
        identity_gap=identity["identity_gap"],
    )
    logger.info(f"μ={mu:g}, λ={lam:g}: s_AC={s_ac:.6e}, s₀={s0:.6e}, s_AC − s₀={model_error:.3e}, "
                f"остаток {report.remainder_s10:.3e}")
    return report


@dataclass(frozen=True)
class RadialReport:
    """Радиальное сжатие: R(t)² против R₀² − 2(d−1)cλ^{1/2}t."""
    dimension: int
    mu: float
    lam: float
    R0: float
    final_time: float
    final_radius: float
    max_deviation: float
    checked_points: int
    energy_ok: bool = True

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["lambda"] = row.pop("lam")
        return row


def shrink_law(config: SimConfig, t: np.ndarray) -> np.ndarray:
    """R₀² − 2(d−1)cλ^{1/2}t."""
    return config.R0 ** 2 - 2.0 * (config.dimension - 1) * config.diffusion * np.asarray(t)


def radial_benchmark(config: SimConfig, stop_widths: float = STOP_WIDTHS) -> tuple:
    """
    Сжатие шара при ε̄ = 0 до R < stop_widths·B или до end_time.

    Returns:
        (RadialReport, SimulationResult); в ряд добавлены колонки radius_sq_law и deviation
    """
    if config.geometry == PLANAR:
        raise ValueError("Радиальный тест требует геометрии radial2d или radial3d")
    threshold = stop_widths * config.width
    result = run_simulation(config, init_radial(config), stop=lambda _state, radius: radius < threshold)

    series = result.series
    law = shrink_law(config, series["t"].to_numpy())
    radius = series["interface_position"].to_numpy()
    deviation = np.abs(radius ** 2 - law) / config.R0 ** 2
    series["radius_sq_law"] = law
    series["deviation"] = deviation
    checked = radius >= threshold

    report = RadialReport(
        dimension=config.dimension,
        mu=config.mu,
        lam=config.lam,
        R0=config.R0,
        final_time=float(series["t"].iloc[-1]),
        final_radius=float(radius[-1]),
        max_deviation=float(np.max(deviation[checked])) if np.any(checked) else float("nan"),
        checked_points=int(np.count_nonzero(checked)),
        energy_ok=result.summary["energy_ok"],
    )
    logger.info(f"Радиальный тест d={report.dimension}: max|R² − закон|/R₀² = {report.max_deviation:.3e} "
                f"по {report.checked_points} точкам")
    return report, result


def width_experiment(config: SimConfig, relax_time: float) -> Dict[str, float]:
    """Ширина 0.1–0.9 после релаксации начального профиля, в единицах B."""
    result = run_simulation(config, end_time=relax_time)
    grid = discretize(config)
    width = measure_width(grid.x, result.state.S)
    ratio = width / config.width
    logger.info(f"Ширина при μ={config.mu:g}, λ={config.lam:g}: {width:.4e} = {ratio:.4f}·B")
    return {"mu": config.mu, "lambda": config.lam, "width": width, "width_ratio": ratio,
            "energy_increase": result.summary["energy_increase"], "energy_ok": result.summary["energy_ok"]}
