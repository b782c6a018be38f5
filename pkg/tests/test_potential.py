import math

import numpy as np
import pytest

from potential.double_well import (
    DoubleWellPotential,
    build_potential,
    c1_constant,
    check_invariants,
    decay_rate,
    make_asymmetric,
    make_potential,
    make_quartic,
)


def test_quartic_values(quartic):
    assert quartic.eval(0.5) == pytest.approx(1.0 / 16.0)
    assert quartic.well_curvatures() == pytest.approx((2.0, 2.0))
    assert quartic.eval(0.0, 1) == 0.0
    assert quartic.eval(1.0, 1) == 0.0
    assert quartic.eval(0.3, 4) == pytest.approx(24.0)
    assert quartic.eval(0.3, 5) == 0.0



def test_values_near_wells_keep_relative_accuracy(quartic, asymmetric):
    d = 2.0 ** -30
    s = 1.0 - d
    assert quartic.eval(s) == pytest.approx(d ** 2 * s ** 2, rel=1e-12)
    assert quartic.eval(s, 1) == pytest.approx(2.0 * s * d * (1.0 - 2.0 * s), rel=1e-12)
    assert quartic.eval(1e-9) == pytest.approx(1e-18 * (1.0 - 1e-9) ** 2, rel=1e-12)
    # s = 1 − 1e-12 в двойной точности уже теряет относительную точность d
    assert asymmetric.near_well(1e-12, 1) == pytest.approx(1.5e-24, rel=1e-9)
    assert asymmetric.near_well(1e-12, 0) == pytest.approx(1e-24, rel=1e-9)
    assert asymmetric.near_well(0.3, 1) == pytest.approx(asymmetric.eval(0.7), rel=1e-14)
    with pytest.raises(ValueError):
        quartic.near_well(0.1, 2)


def test_eval_keeps_array_shape(quartic):
    s = np.linspace(0.0, 1.0, 7).reshape(7, 1)
    assert quartic.eval(s, 2).shape == (7, 1)
    assert isinstance(quartic.eval(0.2), float)


def test_eval_rejects_order(quartic):
    with pytest.raises(ValueError):
        quartic.eval(0.5, 6)


def test_c1_quartic(quartic):
    assert c1_constant(quartic) == pytest.approx(math.sqrt(2.0) / 6.0, abs=1e-9)


def test_c1_scales_with_amplitude():
    assert c1_constant(make_quartic(4.0)) == pytest.approx(2.0 * math.sqrt(2.0) / 6.0, abs=1e-9)


def test_decay_rate(quartic, asymmetric):
    assert decay_rate(quartic) == pytest.approx(math.sqrt(2.0))
    # ψ̂''(0) = 2A = 2, ψ̂''(1) = 2(A + B) = 3
    assert asymmetric.well_curvatures() == pytest.approx((2.0, 3.0))
    assert decay_rate(asymmetric) == pytest.approx(math.sqrt(2.0))


def test_asymmetric_is_not_symmetric(asymmetric):
    assert not asymmetric.symmetric
    assert abs(asymmetric.eval(0.3) - asymmetric.eval(0.7)) > 1e-3
    assert asymmetric.eval(np.linspace(0.01, 0.99, 99)).min() > 0


def test_asymmetric_bump_is_smooth():
    psi = make_asymmetric(bump=0.05)
    # горб класса C⁵: производные непрерывны на краях носителя
    for order in range(5):
        left = psi.eval(0.2 - 1e-9, order) - psi.eval(0.2 + 1e-9, order)
        assert abs(left) < 1e-5


@pytest.mark.parametrize("amplitude, skew", [(0.0, 0.5), (1.0, -1.5)])
def test_asymmetric_rejects_bad_curvatures(amplitude, skew):
    with pytest.raises(ValueError):
        make_asymmetric(amplitude, skew)


def test_invariants_catch_false_symmetry():
    poly = np.polynomial.Polynomial([0.0, 0.0, 1.0, -2.0, 1.0]) * np.polynomial.Polynomial([1.0, 1.0])
    psi = DoubleWellPotential("fake", True, lambda s, k: poly.deriv(k)(s) if k else poly(s))
    with pytest.raises(ValueError, match="симметрия"):
        check_invariants(psi)


def test_make_potential_by_name(settings):
    assert make_potential("quartic").symmetric
    assert build_potential(settings).name.startswith("quartic")
    with pytest.raises(ValueError):
        make_potential("sextic")
