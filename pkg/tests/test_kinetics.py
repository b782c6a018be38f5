import math

import numpy as np
import pytest

from mechanics.tensor_algebra import ElasticityTensor, SymTensor3
from mechanics.transmission import InterfaceData, solve_interface, synthetic_interface_data
from profiles import solvers
from profiles.kinetics import (
    KineticCoefficients,
    check_parameters,
    compute_profiles,
    cross_validate,
    decay_slopes,
    first_order_defect,
    kinetic_relation,
    s0_closed_form,
    second_order_defect,
    sphere_kappa_prime,
)
from profiles.solvers import SolvabilityError, check_linear_growth, growth_bound, solve_S0, solve_S1, solve_S2


C1 = math.sqrt(2.0) / 6.0


@pytest.fixture(scope="module")
def bar_profiles(quartic, bar_data):
    return compute_profiles(quartic, bar_data, 0.04, 1.0)


def test_s00_closed_form(bar_data, quartic):
    s00, s01 = s0_closed_form(bar_data, quartic, 0.04, 1.0)
    assert s00 == pytest.approx(-0.1272792, abs=1e-7)
    assert s01 == 0.0


def test_s01_is_curvature(quartic):
    data = InterfaceData(psi_pp_0=2.0, psi_pp_1=2.0, kappa=0.7)
    assert s0_closed_form(data, quartic, 0.04, 2.0) == pytest.approx((0.0, 1.4))


def test_closed_form_rejects_bad_inputs(bar_data, quartic):
    with pytest.raises(ValueError):
        s0_closed_form(bar_data, quartic, 0.04, 0.0)
    with pytest.raises(ValueError):
        s0_closed_form(bar_data, quartic, 0.0, 1.0)


def test_kinetic_relation_arithmetic():
    coefficients = KineticCoefficients(s00=-0.1272792, s01=0.0, s10=0.05, s11=0.0)
    assert kinetic_relation(coefficients, 0.01, 0.04) == pytest.approx(-0.1222792, abs=1e-12)


def test_kinetic_relation_checks_range():
    coefficients = KineticCoefficients(0.0, 0.0)
    with pytest.raises(ValueError):
        kinetic_relation(coefficients, 0.5, 0.04)
    with pytest.raises(ValueError):
        kinetic_relation(coefficients, 0.01, 0.0)
    check_parameters(math.exp(-2.0), 1.0)


def test_bar_profiles(bar_profiles):
    coefficients = bar_profiles.coefficients
    assert coefficients.s00 == pytest.approx(-0.1272792, abs=1e-7)
    assert coefficients.s11 == pytest.approx(0.0, abs=1e-12)
    assert bar_profiles.c1 == pytest.approx(C1, abs=1e-9)
    assert bar_profiles.defects["orthogonality_S1"] <= 1e-8
    assert bar_profiles.defects["orthogonality_S2"] <= 1e-6
    assert bar_profiles.S1.values[bar_profiles.S1.center] == pytest.approx(0.0, abs=1e-12)
    assert bar_profiles.S2.values[bar_profiles.S2.center] == pytest.approx(0.0, abs=1e-12)


def test_orthogonality_integrals(bar_profiles):
    integrals = bar_profiles.integrals
    assert integrals["int_S0_S0_reflected"] == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-6)
    assert integrals["int_S0p_sq"] == pytest.approx(C1, abs=1e-8)
    assert integrals["int_S0p"] == pytest.approx(1.0, abs=1e-8)
    assert integrals["int_S0_S0p"] == pytest.approx(0.5, abs=1e-8)
    # S₀' чётна
    assert integrals["int_zeta_S0p"] == pytest.approx(0.0, abs=1e-9)


def test_profiles_cross_validate(quartic, bar_data, bar_profiles):
    gaps = cross_validate(quartic, bar_profiles, bar_data, 1.0)
    assert gaps["s0_gap"] < 1e-6
    assert gaps["s1_gap"] < 1e-6


def test_decay_slopes(bar_profiles):
    slopes = decay_slopes(bar_profiles)
    assert slopes["S0_left"] == pytest.approx(-math.sqrt(2.0), rel=1e-2)
    assert slopes["S0_right"] == pytest.approx(-math.sqrt(2.0), rel=1e-2)


def synthetic(psi, rng):
    D = ElasticityTensor.isotropic(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))
    normal = rng.normal(size=3)
    normal /= np.linalg.norm(normal)
    eps_bar = SymTensor3.from_matrix(0.1 * rng.normal(size=(3, 3)))
    T_minus = SymTensor3.from_matrix(0.2 * rng.normal(size=(3, 3)))
    grad_term = rng.uniform(-0.1, 0.1) if psi.symmetric else 0.0
    return synthetic_interface_data(
        D, normal, eps_bar, T_minus, psi,
        sigma_check0=rng.uniform(-0.05, 0.05),
        grad_term=grad_term,
        kappa=rng.uniform(-1.0, 1.0) if psi.symmetric else 0.0,
    )


@pytest.mark.parametrize("name", ["quartic", "asymmetric"])
def test_cross_validation_on_synthetic_data(name, request):
    psi = request.getfixturevalue(name)
    rng = np.random.default_rng(11 if psi.symmetric else 13)
    for _ in range(10):
        data = synthetic(psi, rng)
        assert abs(data.eps_T_jump) > 0.0
        profiles = compute_profiles(psi, data, 0.04, 1.0)
        gaps = cross_validate(psi, profiles, data, 1.0)
        assert max(gaps.values()) < 1e-6


def test_grad_term_gives_s11(quartic):
    data = InterfaceData(psi_pp_0=2.0, psi_pp_1=2.0, grad_term=0.1)
    profiles = compute_profiles(quartic, data, 0.04, 1.0)
    # s₁₁ = −(c/c₁)·grad_term·∫S₀(ζ)S₀(−ζ)
    assert profiles.coefficients.s11 == pytest.approx(-(1.0 / C1) * 0.1 / math.sqrt(2.0), rel=1e-6)


def test_wrong_speed_breaks_solvability(quartic, bar_data):
    S0 = solve_S0(quartic)
    with pytest.raises(SolvabilityError):
        solve_S1(quartic, S0, bar_data, s0=0.0, lam=0.04, c=1.0)


def test_sphere_kappa_prime():
    assert sphere_kappa_prime(2.0, 3) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        sphere_kappa_prime(1.0, 1)


def test_s2_grows_linearly(bar_profiles):
    S2 = bar_profiles.S2
    assert check_linear_growth(S2) >= 0.0
    window = np.abs(S2.grid) >= S2.half_width / 2.0
    growth = np.max(np.abs(S2.values[window]) / (1.0 + np.abs(S2.grid[window])))
    assert growth <= growth_bound(S2)


def test_s2_with_wrong_slopes_is_rejected(quartic, bar_data, bar_profiles, monkeypatch):
    monkeypatch.setattr(solvers, "second_order_slopes", lambda data, lam: (0.5, -0.5))
    coefficients = bar_profiles.coefficients
    with pytest.raises(SolvabilityError):
        solve_S2(quartic, bar_profiles.S0, bar_profiles.S1, bar_data,
                 (coefficients.s10, coefficients.s11), 0.04, 1.0, bar_profiles.c1)


@pytest.mark.parametrize("order", ["first", "second"])
def test_uncorrected_defect_is_second_order(bar, asymmetric, order):
    # без поправки ядра дефект ортогональности равен погрешности схемы
    data = solve_interface(bar, asymmetric)
    defects = []
    for points in (2001, 4001, 8001):
        profiles = compute_profiles(asymmetric, data, 0.04, 1.0, half_width=30.0, points=points)
        coefficients = profiles.coefficients
        if order == "first":
            defect = first_order_defect(asymmetric, profiles.S0, data, coefficients.s0(0.04), 0.04, 1.0, corrected=False)
        else:
            defect = second_order_defect(asymmetric, profiles.S0, profiles.S1, data, coefficients.s1(0.04),
                                         0.04, 1.0, profiles.c1, corrected=False)
        defects.append(defect)
    assert defects[-1] > 1e-13
    assert defects[0] / defects[1] >= 3.5
    assert defects[1] / defects[2] >= 3.5
