from __future__ import annotations

import io
import math

import pytest

from nonorientable_mcshane.errors import DomainError
from nonorientable_mcshane.identities import D, R
from nonorientable_mcshane.shooting import (
    ShotClass,
    ShotOutcome,
    build_moebius,
    build_pants,
    closed_form_targets,
    estimate_partition,
    holonomy,
    launch_state,
    lorentz_to_mat2,
    right_angled_hexagon,
    run_shots,
    shoot,
    summarize,
    write_shots_csv,
    z_scores,
)
from nonorientable_mcshane.shooting.geometry import compose, mu_prime_half_length


@pytest.fixture(scope="module")
def pants():
    return build_pants(1.0, 1.0, 1.0)


@pytest.fixture(scope="module")
def moebius():
    return build_moebius(1.0, 1.0, 1.0)


def test_hexagon_is_right_angled():
    h = right_angled_hexagon(0.5, 1.0, 1.5)
    assert h.closure_residual() < 1e-12
    assert h.angle_residual() < 1e-12
    assert h.side_length_residual() < 1e-12
    assert h.lengths[0] == pytest.approx(0.5)
    assert h.lengths[2] == pytest.approx(1.0)
    assert h.lengths[4] == pytest.approx(1.5)


def test_uhp_export(pants):
    for verts in pants.hexagons_uhp():
        assert len(verts) == 6
        assert all(v.imag > 0 for v in verts)


@pytest.mark.parametrize("build,args", [(build_pants, (1, 2, 3)), (build_moebius, (2, 0.5, 0.7))])
def test_gluings_consistent(build, args):
    g = build(*args)
    assert g.gluing_residual() < 1e-9
    assert g.deck_residual() < 1e-9
    assert all(gl.orientation == 1 for gl in g.gluings.values())


def test_gluing_mat2_matches_lorentz(pants):
    m = pants.gluing_mat2(0, 1)
    assert abs(abs(m.det) - 1) < 1e-12
    assert m.det_sign == 1


def test_holonomy_traces(moebius):
    z, zp = moebius.one_sided_lengths
    R_ = moebius.deck_matrix
    mu = lorentz_to_mat2(compose(R_, holonomy(moebius, [(0, 4), (3, 5)])))
    assert mu.det_sign == -1
    assert abs(mu.trace) == pytest.approx(2 * math.sinh(z / 2), rel=1e-9)
    cover = lorentz_to_mat2(holonomy(moebius, [(0, 4), (3, 5), (2, 4), (1, 5)]))
    assert abs(cover.trace) == pytest.approx(2 * math.cosh(z), rel=1e-9)
    mup = lorentz_to_mat2(compose(R_, holonomy(moebius, [(0, 1), (1, 4)])))
    assert abs(mup.trace) == pytest.approx(2 * math.sinh(zp / 2), rel=1e-9)
    assert 2 * mu_prime_half_length(moebius) == pytest.approx(zp, rel=1e-9)


def test_launch_state(pants):
    poly, side, p, t = launch_state(pants, 0.25)
    assert (poly, side) == (0, 0)
    assert -p[0] ** 2 - p[1] ** 2 + p[2] ** 2 == pytest.approx(1.0)
    poly, _, _, _ = launch_state(pants, 0.75)
    assert poly == 1
    with pytest.raises(DomainError):
        launch_state(pants, 1.0)


def test_single_shot_records_arcs(pants):
    arcs = []
    out = shoot(pants, 0.3, record=arcs)
    assert isinstance(out, ShotOutcome)
    assert len(arcs) == out.arcs_traced
    assert out.label in ("A", "B2", "B3")
    assert out.path_length > 0


def test_cap_gives_unresolved(pants):
    out = shoot(pants, 0.3, max_arcs=0)
    assert out.classification is ShotClass.UNRESOLVED


def test_outcome_rejects_b1():
    with pytest.raises(ValueError):
        ShotOutcome(ShotClass.HIT_BOUNDARY, 1, 1, 1.0)


def test_targets():
    t = closed_form_targets(build_pants(1.0, 2.0, 3.0))
    assert t["A"] == pytest.approx(D(1, 2, 3))
    assert t["B2"] == pytest.approx(1 - R(1, 3, 2))
    assert t["B3"] == pytest.approx(1 - R(1, 2, 3))
    assert sum(t.values()) == pytest.approx(1.0, abs=1e-14)
    m = build_moebius(1.0, 1.0, 1.0)
    tm = closed_form_targets(m)
    z, zp = m.one_sided_lengths
    assert tm["A"] == pytest.approx(R(1, 2 * z, 1) + R(1, 2 * zp, 1) - 1)


@pytest.mark.parametrize("lengths", [(1, 1, 1), (1, 2, 3), (2, 0.5, 0.5)])
def test_pants_partition(lengths):
    g = build_pants(*lengths)
    est = estimate_partition(g, 4000, seed=7)
    zs = z_scores(est, closed_form_targets(g))
    assert all(abs(v) < 4 for v in zs.values()), zs
    assert est.fractions["U"] < 0.01
    assert sum(est.fractions.values()) == pytest.approx(1.0, abs=1e-12)


def test_moebius_partition(moebius):
    est = estimate_partition(moebius, 4000, seed=3)
    zs = z_scores(est, closed_form_targets(moebius))
    assert all(abs(v) < 4 for v in zs.values()), zs
    assert est.fact_i_violations == 0
    assert est.fact_ii_violations == 0
    assert sum(est.first_hit.values()) == pytest.approx(est.fractions["A"])


def test_determinism_across_workers(pants):
    a = run_shots(pants, 200, seed=11)
    b = run_shots(pants, 200, seed=11, workers=2)
    assert write_shots_csv(a) == write_shots_csv(b)
    c = run_shots(pants, 200, seed=12)
    assert write_shots_csv(a) != write_shots_csv(c)


def test_shots_csv_and_summary(pants):
    shots = run_shots(pants, 50, seed=1)
    buf = io.StringIO()
    text = write_shots_csv(shots, buf)
    assert buf.getvalue() == text
    assert text.splitlines()[0] == "s,class,arcs,first_hit"
    est = summarize(pants, shots, 200, 1)
    assert est.samples == 50
    assert est.to_dict()["counts"] == dict(est.counts)


def test_invalid_inputs():
    with pytest.raises(DomainError):
        build_pants(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        build_moebius(1.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        run_shots(build_pants(1, 1, 1), 0)
