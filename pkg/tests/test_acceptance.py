"""Acceptance criteria 1-9, each at its stated tolerance.

A per-criterion PASS/FAIL line (with the measured values) is printed in
the terminal summary by ``conftest.py``.
"""

import io
import itertools
import math
import time
from math import comb

import numpy as np
import pytest

from capflow import cli, flow, inequal
from capflow import surface as S
from capflow.quermass import quermass_report
from capflow.symfun import h_all, minors_all, newton_maclaurin_gap, quotient_eval, sigma_all
from conftest import record
from oracles import closed_ball_quermass, closed_flow_rhs

THETAS = {"pi/6": math.pi / 6, "pi/3": math.pi / 3, "pi/2": math.pi / 2}
M = 256
R0 = 0.6
EPS = 0.05
SEED = 0


def crit(number, title):
    return pytest.mark.criterion(number, title)


# -- 1: symmetric functions -----------------------------------------------------

C1 = crit(1, "symmetric-function suite")


def gamma_n_samples(n, count, rng):
    return np.exp(rng.normal(0.0, 1.0, size=(count, n)))


@C1
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_c1_identities(n):
    rng = np.random.default_rng(100 + n)
    lam = gamma_n_samples(n, 2000, rng)
    s = sigma_all(lam)
    mins = minors_all(lam)
    big = np.abs(lam).max(axis=1)
    worst = 0.0
    for k in range(1, n + 1):
        scale = np.maximum(1.0, big) ** (k + 1) * comb(n, k) * n
        e1 = np.abs(s[:, None, k] - mins[:, :, k] - lam * mins[:, :, k - 1]).max(axis=1)
        e2 = np.abs(mins[:, :, k].sum(axis=1) - (n - k) * s[:, k])
        e3 = np.abs((lam * mins[:, :, k - 1]).sum(axis=1) - k * s[:, k])
        nxt = s[:, k + 1] if k < n else 0.0
        e4 = np.abs((lam**2 * mins[:, :, k - 1]).sum(axis=1) - (s[:, 1] * s[:, k] - (k + 1) * nxt))
        worst = max(worst, float(np.max(np.maximum.reduce([e1, e2, e3, e4]) / scale)))
    record(1, f"n={n}: identity residual / scale max {worst:.2e} (tol 1e-11)")
    assert worst <= 1e-11


@C1
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_c1_newton_maclaurin(n):
    rng = np.random.default_rng(200 + n)
    lam = gamma_n_samples(n, 2000, rng)
    scale = np.abs(lam).max(axis=1)
    worst = np.inf
    for k, l, r, s in itertools.product(range(n + 1), repeat=4):
        if n >= k > l >= 0 and r > s >= 0 and k >= r and l >= s:
            gap = newton_maclaurin_gap(lam, k, l, r, s)
            worst = min(worst, float(np.min(gap / scale)))
    record(1, f"n={n}: min Newton-Maclaurin gap / scale {worst:.2e} (tol -1e-11)")
    assert worst >= -1e-11


@C1
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_c1_quotient_gradient(n):
    rng = np.random.default_rng(300 + n)
    lam = gamma_n_samples(n, 2000, rng)
    worst = 0.0
    for k, l in ((n, n - 1), (n, 0), (max(1, n - 1), max(0, n - 3))):
        q = quotient_eval(lam, k, l)
        assert np.all(q.gradient >= 0.0) and np.all(q.value > 0.0)
        for i in range(n):
            step = 1e-5 * lam[:, i]
            up, dn = lam.copy(), lam.copy()
            up[:, i] += step
            dn[:, i] -= step
            fd = (quotient_eval(up, k, l).value - quotient_eval(dn, k, l).value) / (2 * step)
            worst = max(worst, float(np.max(np.abs(q.gradient[:, i] - fd) / np.abs(fd))))
    record(1, f"n={n}: gradient vs finite differences, max relative error {worst:.2e} (tol 1e-6)")
    assert worst <= 1e-6


# -- 2: static caps ---------------------------------------------------------------

C2 = crit(2, "static-cap fixed point")


@C2
@pytest.mark.parametrize("theta", list(THETAS.values()), ids=list(THETAS))
@pytest.mark.parametrize("r0", [0.3, 0.6])
def test_c2_static_cap(theta, r0):
    cap = S.cap_graph(theta, r0, S.HalfSphereGrid(2, M))
    st = flow.initial_state(cap)
    sup_f = float(np.max(np.abs(flow.speed(st.fields))))
    moved = float(np.max(np.abs(flow.step(st, flow.FlowConfig()).surface.rho - cap.rho)))
    record(2, f"theta={theta:.4f} r0={r0}: sup|f| {sup_f:.2e} (tol 1e-8), one-step move {moved:.2e} (tol 1e-9)")
    assert sup_f <= 1e-8
    assert moved <= 1e-9


# -- 3: Minkowski identity ---------------------------------------------------------

C3 = crit(3, "Minkowski identity")


@C3
def test_c3_minkowski():
    rng = np.random.default_rng(3)
    thetas = list(THETAS.values())
    worst_res, worst_order = 0.0, np.inf
    for i in range(20):
        theta = thetas[i % 3]
        _, pert = S.draw_convex_perturbation(theta, R0, S.HalfSphereGrid(2, M), EPS, rng, modes=3)
        res = {}
        for m in (M // 2, M):
            s = pert.apply(theta, R0, S.HalfSphereGrid(2, m))
            f = S.geometry(s)
            res[m] = [abs(S.minkowski_residual(s, f, k)) / f.area for k in (1, 2)]
        worst_res = max(worst_res, *res[M])
        order = min(math.log2(a / b) for a, b in zip(res[M // 2], res[M]))
        worst_order = min(worst_order, order)
    record(3, f"20 surfaces: max |residual|/area {worst_res:.2e} (tol 5e-5), min order m={M // 2}->{M}: {worst_order:.2f} (tol 1.9)")
    assert worst_res <= 5e-5
    assert worst_order >= 1.9


# -- 4, 5, 6: flow runs --------------------------------------------------------------


@pytest.fixture(scope="session")
def flow_runs():
    out = {}
    for name, theta in THETAS.items():
        surf = S.perturbed_cap(theta, R0, S.HalfSphereGrid(2, M), EPS, np.random.default_rng(SEED))
        t0 = time.perf_counter()
        res = flow.run(surf, flow.FlowConfig(t_max=50.0, stop_speed_tol=1e-6))
        out[name] = (res, time.perf_counter() - t0)
    return out


RUN_IDS = list(THETAS)
C4 = crit(4, "conservation and monotonicity")
C5 = crit(5, "F bounds and convexity")
C6 = crit(6, "convergence to a cap")


@C4
@pytest.mark.parametrize("name", RUN_IDS)
def test_c4_conservation_monotonicity(flow_runs, name):
    res, _ = flow_runs[name]
    drift = res.conservation_drift
    a1 = res.channel("A_1")
    worst = float(np.min(np.diff(a1)) / abs(a1[0]))
    record(4, f"theta={name}: A_2 drift {drift:.2e} (tol 1e-6), min dA_1/|A_1| {worst:.2e} (tol -1e-8)")
    assert drift <= 1e-6
    assert worst >= -1e-8


@C5
@pytest.mark.parametrize("name", RUN_IDS)
def test_c5_bounds(flow_runs, name):
    res, _ = flow_runs[name]
    fmax = res.channel("F_max")
    kmin = res.channel("kappa_min")
    rise = float(fmax.max() - fmax[0])
    ratio = float(kmin.min() / kmin[0])
    record(5, f"theta={name}: max F rise {rise:.2e} (tol 1e-6), min kappa / initial {ratio:.4f} (tol 0.5)")
    assert rise <= 1e-6
    assert ratio >= 0.5


@C6
@pytest.mark.parametrize("name", RUN_IDS)
def test_c6_convergence(flow_runs, name):
    res, secs = flow_runs[name]
    theta = THETAS[name]
    a_n0 = res.samples[0].report.A[2]
    r_star = inequal.cap_reference_inverse(theta, 2, a_n0, n=2)
    ref = S.cap_rho(theta, r_star, res.final.surface.grid.zeta)
    dist = float(np.max(np.abs(res.final.surface.rho - ref)))
    sup_f = res.samples[-1].sup_f
    record(
        6,
        f"theta={name}: sup|f| {sup_f:.2e} at t={res.final.t:.3f} after {res.steps} steps ({secs:.0f} s), "
        f"r*={r_star:.10f}, distance {dist:.2e} (tol 1e-4)",
    )
    assert res.converged and sup_f < 1e-6 and res.final.t <= 50.0
    assert dist <= 1e-4


# -- 7: Alexandrov-Fenchel ------------------------------------------------------------

C7 = crit(7, "Alexandrov-Fenchel inequality")


@C7
@pytest.mark.parametrize("name", RUN_IDS)
def test_c7_af_random(name):
    theta = THETAS[name]
    rng = np.random.default_rng(700 + RUN_IDS.index(name))
    worst, worst_identity = np.inf, 0.0
    for _ in range(50):
        r0 = rng.uniform(0.3, 0.8)
        eps = rng.uniform(0.01, 0.08)
        s = S.perturbed_cap(theta, r0, S.HalfSphereGrid(2, M), eps, rng, modes=3)
        fields = S.geometry(s)
        af = inequal.check_af(s, fields)
        mk = inequal.check_minkowski_n2(s, fields)
        slack = af["slack"]["1"]
        worst = min(worst, slack)
        worst_identity = max(worst_identity, abs(mk["gap"] - 6 * slack))
    record(7, f"theta={name}: 50 surfaces, min slack {worst:.2e} (tol -1e-8), max |gap - 6 slack| {worst_identity:.2e} (tol 1e-12)")
    assert worst >= -1e-8
    assert worst_identity <= 1e-12


@C7
@pytest.mark.parametrize("name", RUN_IDS)
def test_c7_af_caps(name):
    theta = THETAS[name]
    worst = 0.0
    for r0 in (0.3, 0.6):
        af = inequal.check_af(S.cap_graph(theta, r0, S.HalfSphereGrid(2, M)))
        worst = max(worst, abs(af["slack"]["1"]))
    record(7, f"theta={name}: caps max |slack| {worst:.2e} (tol 1e-8)")
    assert worst <= 1e-8


# -- 8: reflection at theta = pi/2 ----------------------------------------------------

C8 = crit(8, "theta = pi/2 reflection oracle")


@C8
@pytest.mark.parametrize("rho0", [0.5, 1.0])
def test_c8_sphere_quermass(rho0):
    s = S.cap_graph(math.pi / 2, math.tanh(rho0 / 2), S.HalfSphereGrid(2, M))
    rep = quermass_report(s)
    ref = closed_ball_quermass(rho0, 2)
    err_w = float(np.max(np.abs(2 * np.array(rep.W) / ref - 1)))
    err_a = float(np.max(np.abs(2 * np.array(rep.A) / ref[:3] - 1)))
    record(8, f"rho0={rho0}: max relative error 2W {err_w:.2e}, 2A {err_a:.2e} (tol 1e-6)")
    assert err_w <= 1e-6 and err_a <= 1e-6


def bump(zeta, width=0.9):
    out = np.zeros_like(zeta)
    inside = zeta < width
    x = zeta[inside] / width
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x * x))
    return out


@C8
@pytest.mark.parametrize("rho0", [0.5, 1.0])
@pytest.mark.parametrize("amp", [0.0, 0.03, -0.03])
def test_c8_closed_flow(rho0, amp):
    g = S.HalfSphereGrid(2, M)
    rho = rho0 * (1.0 + amp * bump(g.zeta))
    s = S.GraphSurface(g, rho, math.pi / 2)
    full = np.concatenate([rho, rho[-2::-1]])
    want = closed_flow_rhs(full, 2)[: M + 1]
    diff = max(float(np.max(np.abs(flow.rhs(s) - want))), float(np.max(np.abs(flow.kernel_rhs(s) - want))))
    record(8, f"rho0={rho0} bump={amp:+.2f}: max |rhs - closed rhs| {diff:.2e} (tol 1e-10)")
    assert diff <= 1e-10


# -- 9: determinism and I/O ---------------------------------------------------------

C9 = crit(9, "determinism and I/O")


@C9
def test_c9_csv_bit_identical(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[simulate]\nm = 64\nt_max = 0.05\nmonitor_stride = 100\n")
    texts = []
    for name in ("a", "b"):
        assert cli.main(["simulate", "--config", str(ini), "--seed", "7", "--out", str(tmp_path / name), "--quiet"]) == 0
        texts.append((tmp_path / name / "monitors.csv").read_bytes())
    surf = S.perturbed_cap(1.0, R0, S.HalfSphereGrid(2, 64), EPS, np.random.default_rng(7))
    cfg = flow.FlowConfig(t_max=0.05, monitor_stride=100)
    runs = [flow.run(surf, cfg).csv_text() for _ in range(2)]
    record(9, f"CLI CSV identical: {texts[0] == texts[1]}; library CSV identical: {runs[0] == runs[1]}")
    assert texts[0] == texts[1]
    assert runs[0] == runs[1]
    cols, data = flow.read_monitor_csv(io.StringIO(runs[0]))
    assert runs[0] == flow.MONITOR_FORMAT + "\n" + ",".join(cols) + "\n" + "".join(
        ",".join("%.17g" % x for x in row) + "\n" for row in data
    )


@C9
@pytest.mark.parametrize("mode", [S.AXISYMMETRIC, S.FULL])
def test_c9_surface_round_trip(mode, tmp_path):
    rng = np.random.default_rng(9)
    g = S.HalfSphereGrid(2, 64, mode, 16 if mode == S.FULL else 0)
    rho = rng.uniform(0.2, 2.0, size=g.shape)
    if mode == S.FULL:
        rho[0] = rho[0, 0]
    s = S.GraphSurface(g, rho, rng.uniform(0.1, 1.5))
    path = tmp_path / "s.txt"
    S.save(s, path)
    back = S.load(path)
    same = np.array_equal(back.rho, s.rho) and back.theta == s.theta and back.grid == s.grid
    record(9, f"{mode} surface round trip bit-exact: {same}")
    assert same
