from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _oracles as oracle
from nonorientable_mcshane.errors import DomainError, InvalidSeed
from nonorientable_mcshane.hyptrig import Mat2, adjugate
from nonorientable_mcshane.spectra import (
    FIBONACCI_A,
    FIBONACCI_B,
    MarkoffTriple,
    bordered_constant,
    extend,
    extend_backward,
    extend_forward,
    fibonacci_surface,
    fibonacci_word,
    general_solution,
    markoff_tree,
    minimum_index,
    spectrum_from_seed,
    write_spectrum_csv,
    z_from_seed,
)

seed = st.floats(0.2, 8.0, allow_nan=False)


def test_z_from_seed():
    assert z_from_seed(1.0, 2.0) == 3.0
    assert z_from_seed(1.0, 1.0) == 3.0
    assert z_from_seed(1.0, 2.0, 1.0) == pytest.approx(3.0)
    with pytest.raises(InvalidSeed):
        z_from_seed(-1.0, 2.0)
    with pytest.raises(InvalidSeed):
        z_from_seed(1.0, 1.0, c=0.0)


def test_z_lower_bound():
    # Z = 2 + ((y0 - y1)^2 + c) / (y0 y1) >= 2 + c / (y0 y1)
    for y0, y1 in [(1, 1), (8, 8), (0.3, 5)]:
        assert z_from_seed(y0, y1) >= 2 + 1 / (y0 * y1) - 1e-15
    assert z_from_seed(8.0, 8.0) < 3.0


def test_fibonacci_sequence():
    s = extend(spectrum_from_seed(1.0, 2.0), 6)
    for i in range(8):
        assert s.y(i) == oracle.fibonacci(2 * i)
    for i in range(1, 7):
        assert s.y(-i) == oracle.fibonacci(2 * i - 2)
    lin, quad = s.relation_residuals()
    assert lin < 1e-15 and quad < 1e-15


def test_extend_directions_and_minimum():
    s = spectrum_from_seed(5.0, 13.0)
    f = extend_forward(s, 3)
    b = extend_backward(s, 3)
    assert f.hi == 4 and f.lo == 0
    assert b.lo == -3 and b.hi == 1
    assert [b.y(i) for i in (-3, -2, -1)] == [1.0, 1.0, 2.0]
    assert minimum_index(s) in (-3, -2)


def test_bordered_constant():
    assert bordered_constant(0.0) == 1.0
    assert bordered_constant(4.0) == pytest.approx(math.cosh(1.0) ** 2)
    with pytest.raises(DomainError):
        bordered_constant(-1.0)


@settings(max_examples=100, deadline=None)
@given(seed, seed, st.floats(0.0, 3.0))
def test_relations_hold(y0, y1, L):
    s = extend(spectrum_from_seed(y0, y1, bordered_constant(L)), 12)
    lin, quad = s.relation_residuals()
    assert lin < 1e-12 and quad < 1e-9


@settings(max_examples=100, deadline=None)
@given(seed, seed)
def test_general_solution_matches_recursion(y0, y1):
    s = extend(spectrum_from_seed(y0, y1), 10)
    g = general_solution(y0, s.l_gamma, 1.0, y1)
    for i in s.indices():
        assert g.y(i) == pytest.approx(s.y(i), rel=1e-9)
    assert g.c_plus * g.c_minus * 4 * math.sinh(s.l_gamma / 2) ** 2 == pytest.approx(1.0, rel=1e-9)


def test_general_solution_root_choice():
    l = 2 * math.acosh(1.5)
    g = general_solution(1.0, l)
    assert g.c_plus >= g.c_minus
    assert g.c_plus + g.c_minus == pytest.approx(1.0)
    # the larger root describes the forward Fibonacci direction
    assert g.y(1) == pytest.approx(2.0)
    with pytest.raises(InvalidSeed):
        general_solution(0.01, l)


def test_complex_sequence():
    s = extend(spectrum_from_seed(1 + 0.3j, 2 - 0.1j), 5)
    lin, quad = s.relation_residuals()
    assert lin < 1e-12 and quad < 1e-12


def test_markoff_tree():
    t2 = markoff_tree(2)
    assert {m.as_tuple() for m in t2} == {(3, 3, 3), (3, 3, 6), (3, 6, 15)}
    t5 = markoff_tree(5)
    assert all(m.residual < 1e-12 for m in t5)
    assert MarkoffTriple(3.0, 6.0, 15.0).residual == 0.0
    with pytest.raises(DomainError):
        markoff_tree(2, root=(1.0, 2.0, 3.0))


def test_fibonacci_words():
    assert FIBONACCI_A.det == pytest.approx(-1.0)
    assert FIBONACCI_A.trace == 2.0
    assert FIBONACCI_B.trace == 3.0
    s = fibonacci_surface()[2]
    for i in range(-4, 8):
        assert abs(fibonacci_word(i).trace) == pytest.approx(2 * s.y(i))
    cross = FIBONACCI_A @ FIBONACCI_B @ adjugate(FIBONACCI_A) @ FIBONACCI_B
    assert cross.trace > 0
    assert isinstance(cross, Mat2)


def test_csv():
    text = write_spectrum_csv(extend(spectrum_from_seed(1.0, 2.0), 1))
    lines = text.splitlines()
    assert lines[0] == "index,y,length"
    assert lines[1].startswith("-1,1.0,")
    assert len(lines) == 5
