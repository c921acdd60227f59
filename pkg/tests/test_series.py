from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _oracles as oracle
from nonorientable_mcshane.errors import DomainError, InvalidSeed, LoxodromicViolation
from nonorientable_mcshane.series import (
    complex_two_sided_length,
    sum_bordered_klein,
    sum_complex,
    sum_punctured_klein,
    sum_punctured_torus,
    telescoping_partial_sum,
)
from nonorientable_mcshane.spectra import extend, spectrum_from_seed

seed = st.floats(0.2, 8.0, allow_nan=False)


def test_fibonacci_value():
    rep = sum_punctured_klein(1.0, 2.0, tol=1e-12)
    assert rep.target == pytest.approx(math.sqrt(5) / 3, rel=1e-15)
    assert rep.residual < 1e-12
    assert rep.converged and rep.terms_used <= 60
    assert rep.to_dict()["kind"] == "punctured-klein"


def test_against_high_precision_sum():
    for y0, y1 in [(1, 2), (0.3, 0.7), (4, 1.5)]:
        total, target = oracle.cusp_series(y0, y1)
        rep = sum_punctured_klein(y0, y1, tol=1e-13)
        assert rep.partial_sum == pytest.approx(float(total), abs=2e-13)
        assert rep.target == pytest.approx(float(target), rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(seed, seed)
def test_telescoping_matches_terms(y0, y1):
    s = extend(spectrum_from_seed(y0, y1), 12)
    for lo, hi in [(-5, 5), (-10, 3), (0, 10)]:
        direct = math.fsum(1 / (1 + s.y(i) ** 2 + s.y(i + 1) ** 2) for i in range(lo, hi + 1))
        assert telescoping_partial_sum(s, lo, hi) == pytest.approx(direct, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed, seed)
def test_tail_bound_is_honest(y0, y1):
    rep = sum_punctured_klein(y0, y1, tol=1e-11)
    assert rep.converged
    assert rep.residual <= rep.tail_bound + 1e-14


def test_max_terms_reports_non_convergence():
    rep = sum_punctured_klein(8.0, 8.0, tol=1e-12, max_terms=10)
    assert not rep.converged
    assert rep.terms_used <= 10


def test_bordered():
    for L in (0.1, 1.0, 2.0):
        rep = sum_bordered_klein(L, 1.0, 2.0, tol=1e-10)
        assert rep.converged and rep.residual < 1e-9
    small = sum_bordered_klein(1e-4, 1.0, 2.0, tol=1e-14)
    assert small.partial_sum / 1e-4 == pytest.approx(math.sqrt(5) / 3, abs=1e-5)
    with pytest.raises(DomainError):
        sum_bordered_klein(0.0, 1.0, 2.0)


def test_punctured_torus():
    rep = sum_punctured_torus(depth=25)
    assert abs(rep.partial_sum - 0.5) < 1e-6
    shallow = sum_punctured_torus(depth=6)
    assert abs(shallow.partial_sum - 0.5) <= shallow.tail_bound
    with pytest.raises(InvalidSeed):
        sum_punctured_torus(root=(3.0, 3.0, 4.0))


def test_complex_seed():
    rep = sum_complex(1 + 0.3j, 2 - 0.1j, tol=1e-12)
    assert rep.converged and rep.residual < 1e-10
    l = complex_two_sided_length(1 + 0.3j, 2 - 0.1j)
    assert rep.target == pytest.approx(cmath.tanh(l / 2))


def test_complex_reduces_to_real():
    real = sum_punctured_klein(1.0, 2.0, tol=1e-13)
    cplx = sum_complex(1.0 + 0j, 2.0 + 0j, tol=1e-13)
    assert abs(cplx.partial_sum - real.partial_sum) < 1e-12


@pytest.mark.parametrize("y0,y1", [(1j, 1j), (0.8j, 0.8j), (0.5j, 1.2j)])
def test_complex_elliptic_rejected(y0, y1):
    with pytest.raises(LoxodromicViolation):
        sum_complex(y0, y1)


def test_bad_tolerance():
    with pytest.raises(DomainError):
        sum_punctured_klein(1.0, 2.0, tol=0.0)


@settings(max_examples=60, deadline=None)
@given(seed, seed)
def test_sixty_terms_when_gamma_not_short(y0, y1):
    # the true tail at l_gamma = 0.5 needs about 106 terms; 60 suffice from l_gamma = 1
    rep = sum_punctured_klein(y0, y1, tol=1e-10)
    if rep.l_gamma >= 1.0:
        assert rep.terms_used <= 60
        assert rep.residual < 1e-10


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.3, 5.0), st.floats(-0.4, 0.4), st.floats(0.3, 5.0), st.floats(-0.4, 0.4)
)
def test_complex_tail_bound_is_honest(r0, a0, r1, a1):
    y0, y1 = cmath.rect(r0, a0), cmath.rect(r1, a1)
    try:
        rep = sum_complex(y0, y1, tol=1e-11)
    except LoxodromicViolation:
        return
    assert rep.converged
    assert rep.residual <= rep.tail_bound + 1e-13


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.0), seed, seed)
def test_bordered_tail_bound_is_honest(L, y0, y1):
    rep = sum_bordered_klein(L, y0, y1, tol=1e-11)
    assert rep.converged
    assert rep.residual <= rep.tail_bound + 1e-13
