import dataclasses
import logging
import math

import numpy as np
import pytest
from scipy import integrate

from mechanics.transmission import Bar1D
from potential.double_well import c1_constant
from simulator import experiments
from simulator.experiments import SERIES_COLUMNS, measure_speed_vs_kinetics, radial_benchmark, run_simulation
from simulator.state import PLANAR, RADIAL2D, SimConfig, SimState
from simulator.stepper import (
    discretize,
    elasticity_residual,
    energy_parts,
    init_radial,
    seed_traveling,
    solve_elasticity,
    step,
)
from simulator.tracking import (
    TopologyChangeError,
    level_crossings,
    locate_level,
    measure_width,
    orientation,
    speed_series,
    track_interface,
    window_speed,
)


def planar_config(bar, **overrides):
    params = dict(geometry=PLANAR, domain=1.0, points=801, mu=0.004, lam=0.04, c=1.0,
                  psi=overrides.pop("psi"), bar=bar, end_time=0.002, output_every=5)
    params.update(overrides)
    return SimConfig(**params)


@pytest.fixture
def config(bar, quartic):
    return planar_config(bar, psi=quartic)


@pytest.fixture(scope="module")
def seeded(quartic):
    bar = Bar1D(1.0, 0.5, 1.0, 0.2, body_force=(0.0,), uL=0.25)
    config = planar_config(bar, psi=quartic)
    state, _ = seed_traveling(config)
    return config, state


def test_config_requires_resolution(bar, quartic):
    with pytest.raises(ValueError, match="B/8"):
        planar_config(bar, psi=quartic, points=201)


def test_config_checks_domain(bar, quartic):
    with pytest.raises(ValueError):
        planar_config(bar, psi=quartic, domain=2.0, points=2001)
    with pytest.raises(ValueError):
        planar_config(None, psi=quartic)
    with pytest.raises(ValueError):
        planar_config(bar, psi=quartic, geometry="spherical")


@pytest.mark.parametrize("R0", [None, 0.0, 1.5])
def test_radial_config_checks_radius(quartic, R0):
    with pytest.raises(ValueError):
        SimConfig(geometry=RADIAL2D, domain=1.0, points=501, mu=0.01, lam=0.04, c=1.0, psi=quartic, R0=R0)


def test_with_parameters_refines_grid(config):
    finer = config.with_parameters(0.001, 0.04)
    assert finer.spacing <= finer.width / 8
    assert finer.points > config.points
    assert config.refined().points == 2 * config.points - 1


def test_time_step_is_capped(config, caplog):
    stable = config.stable_dt()
    assert config.time_step() == stable
    too_large = dataclasses.replace(config, dt=10.0 * stable)
    with caplog.at_level(logging.WARNING):
        assert too_large.time_step() == stable
    assert "устойчив" in caplog.text
    assert dataclasses.replace(config, dt=0.5 * stable).time_step() == 0.5 * stable


def test_unstrained_zero_phase_is_fixed(quartic):
    bar = Bar1D(1.0, 0.5, 1.0, 0.0, body_force=(0.0,), uL=0.0)
    config = planar_config(bar, psi=quartic)
    x = discretize(config).x
    zero = np.zeros_like(x)
    state = SimState(t=0.0, x=x, S=zero, u=zero.copy(), T=zero.copy())
    new = step(state, config)
    np.testing.assert_allclose(new.S, 0.0, atol=1e-14)
    assert new.t == pytest.approx(config.stable_dt())
    assert new.steps == 1 and new.rejected == 0


def test_large_step_is_halved(config):
    x = discretize(config).x
    S = np.full_like(x, 0.3)
    u, T = solve_elasticity(config, S)
    state = SimState(t=0.0, x=x, S=S, u=u, T=T)
    new = step(state, config, dt=50.0 * config.stable_dt())
    assert new.rejected >= 1
    assert np.all(np.isfinite(new.S))
    # постоянный S остаётся постоянным: лапласиан с условием Неймана его не меняет
    assert np.ptp(new.S) < 1e-10


def test_step_gives_up_after_halvings(config):
    x = discretize(config).x
    S = np.full_like(x, 0.3)
    u, T = solve_elasticity(config, S)
    strict = dataclasses.replace(config, max_jump=1e-12)
    with pytest.raises(RuntimeError):
        step(SimState(t=0.0, x=x, S=S, u=u, T=T), strict, dt=50.0 * config.stable_dt())


def test_elasticity_on_step_profile(config, bar):
    x = discretize(config).x
    S = (x > 0.5).astype(float)
    u, T = solve_elasticity(config, S)
    # без объёмной силы T постоянно и равно D(U_L − U₀ − ε̄∫S)/L
    expected = bar.modulus * (bar.uL - bar.u0 - bar.eps_bar * integrate.trapezoid(S, x)) / bar.length
    np.testing.assert_allclose(T, expected, atol=1e-10)
    assert u[0] == bar.u0 and u[-1] == bar.uL
    assert elasticity_residual(config, u, S) < 1e-10


def test_elasticity_under_body_force(loaded_bar, quartic):
    config = planar_config(loaded_bar, psi=quartic)
    x = discretize(config).x
    S = 0.5 * (1.0 + np.tanh((x - 0.5) / config.width))
    u, _ = solve_elasticity(config, S)
    assert elasticity_residual(config, u, S) < 1e-7


def test_radial_elasticity_is_trivial(quartic):
    config = SimConfig(geometry=RADIAL2D, domain=1.0, points=501, mu=0.01, lam=0.04, c=1.0,
                       psi=quartic, R0=0.25)
    state = init_radial(config)
    u, T = solve_elasticity(config, state.S)
    assert not np.any(u) and not np.any(T)
    assert state.S[0] == pytest.approx(1.0, abs=1e-6)
    assert state.S[-1] == pytest.approx(0.0, abs=1e-10)
    assert locate_level(state.x, state.S) == pytest.approx(0.25, abs=1e-3)


def test_level_crossings():
    x = np.linspace(0.0, 1.0, 11)
    assert locate_level(x, x) == pytest.approx(0.5)
    np.testing.assert_allclose(level_crossings(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 1.0])), [1.0])
    with pytest.raises(TopologyChangeError):
        locate_level(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 0.0]))
    with pytest.raises(TopologyChangeError):
        locate_level(x, np.zeros_like(x))


def test_orientation():
    assert orientation(PLANAR) == 1.0
    assert orientation(RADIAL2D) == -1.0


def test_window_speed():
    times = [0.0, 1.0, 2.0, 3.0, 4.0]
    assert window_speed(times, [2.0 * t for t in times]) == pytest.approx(2.0)
    assert math.isnan(window_speed(times[:4], times[:4]))
    with pytest.raises(ValueError):
        window_speed([1.0] * 5, times)


def test_speed_series_edges():
    t = np.linspace(0.0, 0.6, 7)
    speeds = speed_series(t, 1.0 - 0.1 * t, RADIAL2D)
    assert np.all(np.isnan(speeds[:2])) and np.all(np.isnan(speeds[-2:]))
    np.testing.assert_allclose(speeds[2:5], 0.1)


def test_track_interface_without_history(seeded):
    _, state = seeded
    position, speed = track_interface(state)
    assert position == pytest.approx(0.5, abs=1e-8)
    assert math.isnan(speed)


def test_seeded_width(seeded):
    config, state = seeded
    # ширина 0.1–0.9 логистического профиля: 2 ln 9/√2 ширин B
    ratio = measure_width(state.x, state.S) / config.width
    assert ratio == pytest.approx(2.0 * math.log(9.0) / math.sqrt(2.0), rel=0.02)


def test_seeded_interface_energy(seeded, quartic):
    config, state = seeded
    parts = energy_parts(state, config)
    interfacial = parts["gradient"] + parts["well"]
    assert interfacial == pytest.approx(math.sqrt(config.lam) * c1_constant(quartic), rel=0.03)


def test_planar_run_dissipates_energy(seeded):
    config, state = seeded
    result = run_simulation(config, state)
    summary = result.summary
    assert summary["energy_increase"] <= 1e-8
    assert summary["energy_ok"] is True
    assert summary["energy_final"] <= summary["energy_initial"]
    assert summary["rejected_steps"] == 0
    assert summary["elasticity_residual"] < 1e-10
    assert list(result.series.columns) == SERIES_COLUMNS
    assert result.state.t == pytest.approx(config.end_time)
    # исходное состояние не изменяется
    assert state.t == 0.0 and not state.times


def test_energy_growth_is_flagged(seeded, monkeypatch, caplog):
    config, state = seeded
    # любой ненулевой рост энергии считается нарушением
    monkeypatch.setattr(experiments, "ENERGY_TOL", -math.inf)
    with caplog.at_level(logging.WARNING, logger="simulator.experiments"):
        summary = run_simulation(config, state, end_time=config.end_time / 4.0).summary
    assert summary["energy_ok"] is False
    assert "Энергия выросла" in caplog.text


@pytest.mark.slow
def test_radial_shrink_law(quartic):
    config = SimConfig(geometry=RADIAL2D, domain=1.0, points=501, mu=0.01, lam=0.04, c=1.0,
                       psi=quartic, R0=0.25, end_time=0.2, output_every=20)
    report, result = radial_benchmark(config)
    assert report.checked_points > 10
    assert report.max_deviation <= 0.02
    assert report.final_radius < 0.25
    assert "deviation" in result.series.columns


@pytest.mark.slow
def test_speed_follows_kinetic_relation(bar, quartic):
    config = planar_config(bar, psi=quartic, end_time=0.005)
    report = measure_speed_vs_kinetics(config, refine_check=False)
    # s₀ = −(c/c₁)ε̄T̂ < 0: граница уходит в фазу S = 0
    assert report.s0 == pytest.approx(-0.1272792, rel=5e-3)
    assert report.s_ac < 0.0
    assert report.s_ac == pytest.approx(report.s0, rel=0.25)
    assert report.energy_increase <= 1e-8
    assert math.isfinite(report.identity_gap)
    assert math.isnan(report.certificate)


def test_speed_measurement_needs_planar_bar(quartic):
    config = SimConfig(geometry=RADIAL2D, domain=1.0, points=501, mu=0.01, lam=0.04, c=1.0,
                       psi=quartic, R0=0.25)
    with pytest.raises(ValueError):
        measure_speed_vs_kinetics(config)
