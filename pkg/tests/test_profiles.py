import math

import numpy as np
import pytest
from scipy import integrate

from potential.double_well import c1_constant
from profiles.profile import Profile, fit_decay, make_grid, plateau, smooth_step
from profiles.solvers import (
    SolvabilityError,
    build_operator,
    check_linear_growth,
    deflated_solve,
    growth_constant,
    kernel_residual,
    s0_integral,
    solve_S0,
)


@pytest.fixture(scope="module")
def S0(quartic):
    return solve_S0(quartic, half_width=30.0, points=4001)


def test_grid_is_symmetric():
    grid = make_grid(10.0, 21)
    assert grid[10] == 0.0
    np.testing.assert_allclose(grid, -grid[::-1])
    with pytest.raises(ValueError):
        make_grid(10.0, 20)


def test_s0_matches_logistic(S0):
    logistic = 1.0 / (1.0 + np.exp(-math.sqrt(2.0) * S0.grid))
    assert np.max(np.abs(S0.values - logistic)) <= 1e-8
    assert S0.values[S0.center] == 0.5



def test_s0_tails_keep_relative_accuracy(S0):
    a = math.sqrt(2.0)
    z = np.abs(S0.grid)
    gap = np.exp(-a * z) / (1.0 + np.exp(-a * z))
    left = S0.grid < 0.0
    # до e^{−42} на краю сетки
    np.testing.assert_allclose(S0.values[left], gap[left], rtol=1e-7)
    np.testing.assert_allclose(S0.derivative, a * gap * (1.0 - gap), rtol=1e-7)
    tail = (S0.grid > 5.0) & (S0.grid < 25.0)
    slope = np.polyfit(S0.grid[tail], np.log(S0.derivative[tail]), 1)[0]
    assert slope == pytest.approx(-a, rel=2e-3)


def test_s0_asymmetric_tails(asymmetric):
    S0 = solve_S0(asymmetric)
    right = (S0.grid > 10.0) & (S0.grid < 28.0)
    left = (S0.grid < -10.0) & (S0.grid > -28.0)
    assert np.polyfit(S0.grid[right], np.log(S0.derivative[right]), 1)[0] == pytest.approx(-math.sqrt(3.0), rel=2e-3)
    assert np.polyfit(S0.grid[left], np.log(S0.derivative[left]), 1)[0] == pytest.approx(math.sqrt(2.0), rel=2e-3)

def test_s0_energy_identity(S0, quartic):
    prime = build_operator(quartic, S0, corrected=False).kernel
    # ∫(S₀')² = c₁
    assert integrate.trapezoid(prime ** 2, S0.grid) == pytest.approx(c1_constant(quartic), abs=1e-8)


def test_s0_rejects_short_grid(quartic):
    with pytest.raises(ValueError):
        solve_S0(quartic, half_width=5.0)


def test_kernel_residual_is_second_order(quartic):
    coarse = kernel_residual(quartic, solve_S0(quartic, 30.0, 1001))
    fine = kernel_residual(quartic, solve_S0(quartic, 30.0, 2001))
    assert coarse / fine == pytest.approx(4.0, rel=0.1)


def test_corrected_operator_annihilates_kernel(quartic, S0):
    operator = build_operator(quartic, S0)
    residual = operator.apply(operator.kernel)
    assert np.max(np.abs(residual)) < 1e-8



def test_operator_from_rounded_values_uses_tail_diagonal(quartic, S0):
    # без точной S₀' около 1 она восстанавливается по округлённым значениям
    rounded = Profile("S0", S0.grid, S0.values, 0.0, 1.0, S0.decay_rate)
    h = S0.step
    tail = (2.0 * math.cosh(math.sqrt(2.0) * h) - 2.0) / h ** 2
    operator = build_operator(quartic, rounded)
    assert operator.diagonal[-1] == pytest.approx(tail, rel=1e-12)
    assert operator.diagonal[0] == pytest.approx(tail, rel=1e-12)
    np.testing.assert_allclose(operator.diagonal, quartic.eval(S0.values[1:-1], 2), atol=1e-2)
    exact = build_operator(quartic, S0)
    assert exact.diagonal[-1] == pytest.approx(tail, rel=1e-6)
    np.testing.assert_allclose(exact.diagonal, operator.diagonal, atol=1e-2)

def test_deflated_solve_is_orthogonal(quartic, S0):
    operator = build_operator(quartic, S0)
    rhs = np.exp(-S0.grid[1:-1] ** 2)
    w = deflated_solve(operator, rhs, shift=2.0)
    v = operator.kernel[1:-1]
    assert abs(w @ v) < 1e-10 * np.linalg.norm(w) * np.linalg.norm(v)
    # L w = P rhs на внутренних узлах
    projected = rhs - (rhs @ v) / (v @ v) * v
    full = np.zeros(S0.grid.size)
    full[1:-1] = w
    np.testing.assert_allclose(operator.apply(full), projected, atol=1e-8)


def test_s0_integral_tail(quartic, S0):
    integral = s0_integral(quartic, S0)
    # ∫_{−∞}^ζ S₀ = ln(1 + e^{√2ζ})/√2
    assert integral[S0.center] == pytest.approx(math.log(2.0) / math.sqrt(2.0), abs=1e-4)
    assert integral[-1] - S0.grid[-1] == pytest.approx(0.0, abs=1e-6)


def test_profile_extension():
    grid = make_grid(5.0, 11)
    profile = Profile("line", grid, grid.copy(), -5.0, 5.0, 1.0, left_slope=1.0, right_slope=1.0)
    assert profile(7.0) == pytest.approx(7.0)
    assert profile(-6.0) == pytest.approx(-6.0)
    assert profile(8.0, 1) == 1.0
    assert profile(8.0, 2) == 0.0
    assert growth_constant(profile) == pytest.approx(5.0 / 6.0)


def test_profile_rejects_asymmetric_grid():
    with pytest.raises(ValueError):
        Profile("bad", np.array([-1.0, 0.0, 2.0]), np.zeros(3), 0.0, 0.0, 1.0)


def test_smooth_step_and_plateau():
    assert smooth_step(0.5) == 0.0
    assert smooth_step(2.5) == 1.0
    assert smooth_step(1.5) == pytest.approx(0.5)
    assert plateau(0.5) == 1.0
    assert plateau(-3.0) == 0.0
    z = np.linspace(1.01, 1.99, 99)
    numeric = np.gradient(smooth_step(z), z)
    np.testing.assert_allclose(smooth_step(z, 1)[5:-5], numeric[5:-5], rtol=1e-2, atol=1e-3)


def test_fit_decay_recovers_rate():
    grid = np.linspace(0.0, 40.0, 401)
    assert fit_decay(grid, np.exp(-1.5 * grid)) == pytest.approx(-1.5, rel=1e-8)


def test_linear_growth_accepts_declared_slopes():
    grid = make_grid(30.0, 61)
    profile = Profile("S2", grid, 0.5 * grid + 1.0, -14.0, 16.0, 1.0, left_slope=0.5, right_slope=0.5)
    assert check_linear_growth(profile) == pytest.approx(growth_constant(profile))


def test_linear_growth_rejects_wrong_slopes():
    grid = make_grid(30.0, 61)
    profile = Profile("S2", grid, 3.0 * grid, -90.0, 90.0, 1.0)
    with pytest.raises(SolvabilityError):
        check_linear_growth(profile)
