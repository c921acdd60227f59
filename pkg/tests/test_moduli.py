from __future__ import annotations

import math
import random

import numpy as np
import pytest

from nonorientable_mcshane.errors import DomainError, NoSolution
from nonorientable_mcshane.moduli import (
    TWO_PI,
    FNPoint,
    chart_one_sided_from_fn,
    chart_residual,
    direct_integral,
    fn_from_one_sided,
    integrand_envelope,
    integrate_punctured_klein,
    jacobian_check_klein,
    jacobian_check_moebius,
    jacobian_y_chart,
    monte_carlo_integral,
    truncation_tail,
    unfolded_integrand,
)
from nonorientable_mcshane.spectra import z_from_seed


def _points(n, seed=5):
    rnd = random.Random(seed)
    for _ in range(n):
        l = rnd.uniform(0.2, 6.0)
        yield rnd.uniform(0.0, 3.0), FNPoint(l, rnd.uniform(0.01, 0.99) * l)


def test_symmetric_twist_gives_equal_traces():
    l = 2 * math.acosh(1.5)
    y1, y2 = chart_one_sided_from_fn(0.0, FNPoint(l, l / 2))
    assert y1 == pytest.approx(y2)
    # y = Y/2 = 1 is the Fibonacci seed with Z = 3
    assert z_from_seed(y1 / 2, y2 / 2) == pytest.approx(3.0)


def test_twist_reflection_swaps():
    p, q = FNPoint(2.0, 0.4), FNPoint(2.0, 1.6)
    a = chart_one_sided_from_fn(0.5, p)
    b = chart_one_sided_from_fn(0.5, q)
    assert a[0] == pytest.approx(b[1]) and a[1] == pytest.approx(b[0])


def test_chart_round_trip():
    for L, p in _points(50):
        assert chart_residual(L, p) < 1e-10
        q = fn_from_one_sided(L, *chart_one_sided_from_fn(L, p))
        assert q.l_gamma == pytest.approx(p.l_gamma, abs=1e-8)
        assert q.theta == pytest.approx(p.theta, abs=1e-8)


def test_inverse_rejects_unrealisable():
    with pytest.raises(NoSolution):
        fn_from_one_sided(0.0, 1e-3, 50.0)


def test_fnpoint_validation():
    with pytest.raises(DomainError):
        FNPoint(1.0, 1.0)
    with pytest.raises(DomainError):
        FNPoint(0.0, 0.0)


def test_jacobian_klein():
    for L, p in _points(50):
        assert abs(jacobian_check_klein(L, p)) < 1e-5
    l = 3.0
    assert abs(jacobian_check_klein(0.0, FNPoint(l, l / 2))) < 1e-5
    assert abs(jacobian_check_klein(0.0, FNPoint(l, 1e-3 * l))) < 1e-5
    with pytest.raises(DomainError):
        jacobian_check_klein(0.0, FNPoint(1.0, 0.5), h=1e-2)


def test_y_chart_determinant():
    for L, p in _points(10):
        fd, predicted = jacobian_y_chart(L, p)
        assert fd == pytest.approx(predicted, rel=1e-6)


def test_jacobian_moebius():
    grid = np.linspace(0.5, 4.0, 6)
    worst = max(jacobian_check_moebius(x, y, z) for x in grid for y in grid for z in grid)
    assert worst < 1e-6
    # the variant with full arguments fails
    assert jacobian_check_moebius(1.0, 1.0, 1.0, half_argument=False) > 0.1


def test_envelope_bounds_integrand():
    xs = np.linspace(0.0, 60.0, 241)
    X, Y = np.meshgrid(xs, xs)
    assert np.all(unfolded_integrand(X, Y) <= integrand_envelope(X, Y))
    assert truncation_tail() < 1e-10


def test_direct_form():
    val, _ = direct_integral(1)
    assert val == pytest.approx(TWO_PI, abs=1e-12)


def test_quadrature():
    res = integrate_punctured_klein(1, "quadrature")
    assert abs(res.residual) < 1e-6
    assert abs(res.value - res.cross_check) < 1e-8
    assert set(res.to_dict()) >= {"n", "method", "value", "error_estimate", "target", "residual"}


def test_higher_n_forms_agree():
    res = integrate_punctured_klein(2, "quadrature")
    assert res.target is None and res.residual is None
    assert res.value == pytest.approx(res.cross_check, abs=1e-8)


def test_monte_carlo_small_and_deterministic():
    a = monte_carlo_integral(1, 200_000, seed=4)
    b = monte_carlo_integral(1, 200_000, seed=4)
    assert a == b
    assert abs(a[0] - TWO_PI) < 4 * a[1]


def test_bad_method():
    with pytest.raises(DomainError):
        integrate_punctured_klein(1, "simpson")
    with pytest.raises(DomainError):
        integrate_punctured_klein(0)
