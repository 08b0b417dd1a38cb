import io
import math

import numpy as np
import pytest

from capflow import flow
from capflow import surface as S
from capflow.errors import ConvexityLoss, DomainError, FormatError, ValidationError
from capflow.surface import integrate_bulk


def perturbed(theta=1.0, m=128, n=2, seed=0, eps=0.05):
    return S.perturbed_cap(theta, 0.6, S.HalfSphereGrid(n, m), eps, np.random.default_rng(seed))


def test_config_validation():
    for bad in ({"dt_safety": 0.0}, {"dt_safety": 1.5}, {"stop_speed_tol": 0.0}, {"t_max": -1.0}, {"monitor_stride": 0}):
        with pytest.raises(DomainError):
            flow.FlowConfig(**bad)
    cfg = flow.with_config(flow.FlowConfig(), t_max=3.0)
    assert cfg.t_max == 3.0


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3, math.pi / 2])
def test_cap_is_static(theta):
    s = S.cap_graph(theta, 0.6, S.HalfSphereGrid(2, 256))
    assert np.max(np.abs(flow.speed(S.geometry(s)))) < 1e-8
    assert np.max(np.abs(flow.kernel_rhs(s))) < 1e-8


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("theta", [0.5, 1.2])
def test_compiled_rhs_matches_reference(n, theta):
    s = perturbed(theta, 128, n)
    assert np.max(np.abs(flow.kernel_rhs(s) - flow.rhs(s))) < 1e-10


def test_rk4_order():
    # coarse grid and steps near the stability limit keep time error above rounding
    s = perturbed(1.0, 32)
    cfg = flow.FlowConfig()
    T = 100 * flow.stable_dt(s, S.geometry(s), cfg)
    ends = []
    for nsteps in (20, 40, 80):
        st = flow.initial_state(s)
        for _ in range(nsteps):
            st = flow.step(st, cfg, T / nsteps)
        ends.append(st.surface.rho)
    ratio = np.max(np.abs(ends[0] - ends[1])) / np.max(np.abs(ends[1] - ends[2]))
    assert 12 < ratio < 20


def test_full_mode_step_and_rhs():
    g = S.HalfSphereGrid(2, 64, S.FULL, 16)
    cap = S.cap_graph(1.0, 0.6, g)
    assert np.max(np.abs(flow.rhs(cap))) < 1e-6
    pert = S.Perturbation(eps=0.03, coeffs=(0.5, -0.2), azimuthal=((0.3, 0.2), (0.4, 1.0)))
    s = pert.apply(1.0, 0.6, g)
    st = flow.step(flow.initial_state(s), flow.FlowConfig())
    assert st.t > 0 and np.ptp(st.surface.rho[0]) == 0.0


def test_speed_changes_sign():
    # int f H_n dA equals the k = n Minkowski residual, so f cannot keep one sign
    s = S.Perturbation(0.1, (-1.0,)).apply(1.0, 0.6, S.HalfSphereGrid(2, 256))
    fields = S.geometry(s)
    f = flow.speed(fields)
    assert f.min() < 0 < f.max()
    weighted = integrate_bulk(fields, f * fields.hk[..., 2])
    assert weighted == pytest.approx(S.minkowski_residual(s, fields, 2), abs=1e-12)
    assert abs(weighted) < 1e-7 * integrate_bulk(fields, np.abs(f) * fields.hk[..., 2])


def test_nonconvex_initial_rejected():
    g = S.HalfSphereGrid(2, 128)
    cap = S.cap_graph(math.pi / 2, 0.5, g)
    # a deep dimple at the pole
    rho = cap.rho * (1 - 0.4 * np.exp(-((g.zeta / 0.2) ** 2)))
    s = cap.with_rho(rho)
    with pytest.raises(ValidationError):
        flow.run(s, flow.FlowConfig(t_max=0.1))
    with pytest.raises(ConvexityLoss):
        flow.curvature_quotient(S.geometry(s), 2)


def test_enclosing_radius_check():
    s = perturbed(1.0, 64)
    with pytest.raises(ValidationError):
        flow.run(s, flow.FlowConfig(t_max=0.1, enclosing_radius=0.3))


def test_short_run_and_csv(tmp_path):
    s = perturbed(1.0, 64)
    cfg = flow.FlowConfig(t_max=0.05, monitor_stride=20)
    a = flow.run(s, cfg)
    b = flow.run(s, cfg)
    assert a.csv_text() == b.csv_text()
    cols, data = flow.read_monitor_csv(io.StringIO(a.csv_text()))
    assert cols == flow.monitor_columns(2)
    assert data.shape == (len(a.samples), len(cols))
    assert np.array_equal(data[:, 0], a.times)
    assert a.final.t == pytest.approx(0.05)
    assert a.barrier_excess == 0.0
    assert a.conservation_drift < 1e-6
    assert np.all(np.diff(a.channel("A_1")) > -1e-10)


def test_csv_errors():
    with pytest.raises(FormatError):
        flow.read_monitor_csv(io.StringIO("t,A_0\n1,2\n"))
    with pytest.raises(FormatError):
        flow.read_monitor_csv(io.StringIO(flow.MONITOR_FORMAT + "\nt,A_0\n1,x\n"))
    cols, data = flow.read_monitor_csv(io.StringIO(flow.MONITOR_FORMAT + "\nt,A_0\n"))
    assert data.shape == (0, 2)


def test_stable_dt_scales_with_h2():
    a = perturbed(1.0, 64)
    b = perturbed(1.0, 128)
    cfg = flow.FlowConfig()
    ra = flow.stable_dt(a, S.geometry(a), cfg)
    rb = flow.stable_dt(b, S.geometry(b), cfg)
    assert 3.5 < ra / rb < 4.5


def test_small_theta_flagged(caplog):
    s = S.cap_graph(0.15, 0.6, S.HalfSphereGrid(2, 64))
    res = flow.run(s, flow.FlowConfig(t_max=1e-3, monitor_stride=10))
    assert res.summary()["experimental"]
    assert "experimental" in caplog.text
    assert not flow.run(perturbed(1.0, 32), flow.FlowConfig(t_max=1e-3)).summary()["experimental"]


def test_y20_perturbed_sphere_rhs_linear():
    # at theta = pi/2 a centred sphere is static; the response is linear in eps
    g = S.HalfSphereGrid(2, 128)
    y20 = 0.5 * (3 * np.cos(g.zeta) ** 2 - 1)
    sizes = []
    for eps in (1e-3, 2e-3):
        s = S.GraphSurface(g, 0.8 * (1 + eps * y20), math.pi / 2)
        sizes.append(np.max(np.abs(flow.rhs(s))))
    assert sizes[0] < 1e-2
    assert sizes[1] / sizes[0] == pytest.approx(2.0, rel=1e-2)
