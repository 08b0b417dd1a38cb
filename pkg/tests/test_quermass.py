import math

import numpy as np
import pytest

from capflow import surface as S
from capflow.inequal import cap_reference_all
from capflow.quermass import QuermassReport, quermass_report
from oracles import closed_ball_quermass


def unit_ball_volume(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("rho0", [0.5, 1.0])
def test_hemisphere_is_half_ball(n, rho0):
    s = S.cap_graph(math.pi / 2, math.tanh(rho0 / 2), S.HalfSphereGrid(n, 256))
    rep = quermass_report(s)
    ref = closed_ball_quermass(rho0, n)
    assert np.allclose(2 * np.array(rep.W), ref, rtol=1e-9)
    assert np.allclose(rep.A, rep.W[: n + 1], rtol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_top_boundary_quermass(n):
    # Gauss-Bonnet for the flat-in-H region: W^H_n is the unit-ball volume
    s = S.cap_graph(1.0, 0.5, S.HalfSphereGrid(n, 64))
    assert quermass_report(s).WH[n] == pytest.approx(unit_ball_volume(n), rel=1e-10)


def test_n2_top_quermass_formula():
    rng = np.random.default_rng(2)
    for theta in (0.5, 1.0, math.pi / 2):
        s = S.perturbed_cap(theta, 0.6, S.HalfSphereGrid(2, 128), 0.05, rng)
        rep = quermass_report(s)
        length = S.boundary_geometry(s).length
        mean = 2 * rep.curvature_integrals[1]
        want = (mean - 2 * rep.W[0] - math.sin(theta) * math.cos(theta) * length) / 6
        assert rep.A[2] == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3, math.pi / 2])
def test_cap_matches_exact_reference(theta):
    rep = quermass_report(S.cap_graph(theta, 0.6, S.HalfSphereGrid(2, 256)))
    assert np.allclose(rep.A, cap_reference_all(theta, 0.6), rtol=1e-8)


def test_monotone_in_radius():
    vals = [quermass_report(S.cap_graph(1.0, r, S.HalfSphereGrid(3, 64))).A for r in (0.2, 0.4, 0.6)]
    assert np.all(np.diff(np.array(vals), axis=0) > 0)


def test_report_round_trip():
    import json

    rep = quermass_report(S.cap_graph(1.0, 0.5, S.HalfSphereGrid(2, 32)))
    back = QuermassReport.from_dict(json.loads(rep.to_json()))
    assert back == rep
