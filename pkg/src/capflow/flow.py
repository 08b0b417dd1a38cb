"""Locally constrained inverse curvature flow of capillary graphs.

The state variable is ``u = Phi(rho)``, which evolves by

    du/dt = (omega / sinh rho) * f,   f = Vtilde / F - <x, nu>,

with ``F = H_k / H_{k-1}`` (``k = n`` by default).  Time stepping is
classical RK4 with the parabolic step restriction

    dt = dt_safety * h^2 / max(Vtilde * trace(dF) / (F sinh rho)^2).

The axisymmetric path runs in a numba kernel that advances many steps
per call; the full (n = 2) path is plain numpy.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from math import comb

import numpy as np
from numba import njit

from . import hypgeom
from ._stencil import FD_ORDER, central_weights, ghost_count, neumann_ghost_coefficients
from .errors import ConvexityLoss, DomainError, NumericalAbort, ParabolicityLoss, ValidationError
from .quermass import QuermassReport, quermass_report
from .surface import (
    AXISYMMETRIC,
    GeometryFields,
    GraphSurface,
    bounding_cap_radii,
    cap_rho,
    check_between_caps,
    geometry,
    minkowski_residual,
)

log = logging.getLogger(__name__)

MONITOR_FORMAT = "# capflow monitors v1"

# Below this contact angle convergence is not covered by theory; runs are allowed but flagged.
EXPERIMENTAL_THETA = 0.2

_OK, _CONVEXITY, _PARABOLICITY, _NONFINITE = 0, 1, 2, 3


@dataclass(frozen=True)
class FlowConfig:
    """Integrator settings.

    ``k`` selects ``F = H_k / H_{k-1}``; ``None`` means ``k = n``.
    ``barrier_tol`` is the slack allowed when checking that the surface
    stays between its initial inner and outer caps.
    """

    dt_safety: float = 0.2
    t_max: float = 50.0
    stop_speed_tol: float = 1e-6
    monitor_stride: int = 1000
    k: int | None = None
    max_steps: int = 50_000_000
    barrier_tol: float = 1e-9
    enclosing_radius: float | None = None

    def __post_init__(self):
        if not 0.0 < self.dt_safety < 1.0:
            raise DomainError("dt_safety must lie in (0, 1)")
        if not self.stop_speed_tol > 0.0:
            raise DomainError("stop_speed_tol must be positive")
        if self.t_max < 0.0:
            raise DomainError("t_max must be non-negative")
        if self.monitor_stride < 1:
            raise DomainError("monitor_stride must be >= 1")


@dataclass(frozen=True, eq=False)
class FlowState:
    t: float
    surface: GraphSurface
    fields: GeometryFields
    step_index: int = 0


def _quotient_index(surface: GraphSurface, k: int | None) -> int:
    n = surface.n
    k = n if k is None else k
    if not 1 <= k <= n:
        raise DomainError(f"flow index k must lie in [1, {n}]")
    return k


def curvature_quotient(fields: GeometryFields, k: int) -> np.ndarray:
    """``F = H_k / H_{k-1}`` per node; raises if the state is not convex."""
    hk, hl = fields.hk[..., k], fields.hk[..., k - 1]
    if np.any(~(fields.kappa > 0.0)) or np.any(~(hl > 0.0)):
        raise ConvexityLoss("curvature left the positive cone")
    return hk / hl


def speed(fields: GeometryFields, k: int | None = None) -> np.ndarray:
    """Normal speed ``f = Vtilde / F - <x, nu>``."""
    k = fields.kappa.shape[-1] if k is None else k
    return fields.vtilde_denom / curvature_quotient(fields, k) - fields.support_v


def rhs(surface: GraphSurface, fields: GeometryFields | None = None, k: int | None = None) -> np.ndarray:
    """``du/dt = (omega / sinh rho) f`` assembled from cached geometry.

    On the full grid the pole row is replaced by its mean, which keeps
    the pole single-valued (the per-azimuth values agree to rounding).
    """
    if fields is None:
        fields = geometry(surface)
    k = _quotient_index(surface, k)
    out = fields.omega / np.sinh(surface.rho) * speed(fields, k)
    if surface.grid.mode != AXISYMMETRIC:
        out[0] = out[0].mean()
    return out


def _quotient_trace(kappa: np.ndarray, k: int) -> np.ndarray:
    """``sum_i dF/dkappa_i`` via ``sum_i sigma_{j-1}(kappa|i) = (n-j+1) sigma_{j-1}``."""
    from .symfun import sigma_all

    n = kappa.shape[-1]
    s = sigma_all(kappa)
    hk = s[..., k] / comb(n, k)
    hl = s[..., k - 1] / comb(n, k - 1)
    dk = (n - k + 1) * s[..., k - 1] / comb(n, k)
    dl = (n - k + 2) * s[..., k - 2] / comb(n, k - 1) if k >= 2 else 0.0
    return (dk * hl - hk * dl) / hl**2


def parabolic_coefficient(surface: GraphSurface, fields: GeometryFields, k: int) -> np.ndarray:
    """Largest second-order coefficient bound ``Vtilde tr(dF) / (F sinh rho)^2``."""
    F = curvature_quotient(fields, k)
    return fields.vtilde_denom * _quotient_trace(fields.kappa, k) / (F * np.sinh(surface.rho)) ** 2


def stable_dt(surface: GraphSurface, fields: GeometryFields, config: FlowConfig) -> float:
    k = _quotient_index(surface, config.k)
    grid = surface.grid
    c = parabolic_coefficient(surface, fields, k)
    if grid.mode != AXISYMMETRIC:
        # spectral azimuth: |d^2/dpsi^2| <= K^2/4, scaled by 1/sin^2 zeta
        sin = np.sin(grid.zeta[1:])
        k2 = (grid.n_azimuth**2 / 4.0) * grid.h**2 / (sin[:, None] ** 2) * (3.0 / 16.0)
        c = c[1:] * (1.0 + k2)
    return config.dt_safety * grid.h**2 / float(np.max(c))


# -- axisymmetric numba kernel -------------------------------------------


def _kernel_tables(n: int, k: int):
    offs, w1 = central_weights(FD_ORDER, 1)
    offs2, w2 = central_weights(FD_ORDER, 2)
    g = ghost_count(FD_ORDER)
    full1 = np.zeros(2 * g + 1)
    full2 = np.zeros(2 * g + 1)
    full1[offs + g] = w1
    full2[offs2 + g] = w2
    coef, scoef = neumann_ghost_coefficients(FD_ORDER)
    binom_nm1 = np.array([comb(n - 1, j) for j in range(n + 1)], dtype=float)
    return g, full1, full2, np.ascontiguousarray(coef), scoef.copy(), binom_nm1, float(comb(n, k)), float(comb(n, k - 1))


@njit(cache=True)
def _esp_two_valued(k1, k2, j, binom_nm1):
    # sigma_j of (k1, k2, ..., k2) with n - 1 copies of k2
    if j < 0:
        return 0.0
    if j == 0:
        return 1.0
    p = 1.0
    for _ in range(j - 1):
        p *= k2
    return (binom_nm1[j] * k2 + binom_nm1[j - 1] * k1) * p


@njit(cache=True)
def _axisym_rhs(u, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, out, diag):
    # trig rows: sin(zeta), cos(zeta), cot(zeta) (unused on the axis)
    m1 = u.shape[0]
    ue = np.empty(m1 + 2 * g)
    return _axisym_rhs_into(u, ue, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, out, diag)


@njit(cache=True)
def _axisym_rhs_into(u, ue, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, out, diag):
    m1 = u.shape[0]
    for i in range(m1):
        ue[g + i] = u[i]
    for j in range(1, g + 1):
        ue[g - j] = u[j]
    q = gcoef.shape[1]
    end = u[m1 - 1]
    for j in range(g):
        acc = gscoef[j] * h * slope
        for p in range(q - 1):
            acc += gcoef[j, p] * (u[m1 - q + p] - end)
        ue[g + m1 + j] = end + acc
    inv_h = 1.0 / h
    inv_h2 = inv_h * inv_h
    inv_cnk = 1.0 / cnk
    inv_cnk1 = 1.0 / cnk1
    cmax = 0.0
    fmax = 0.0
    for i in range(m1):
        d1 = 0.0
        d2 = 0.0
        for o in range(2 * g + 1):
            d1 += w1[o] * ue[i + o]
            d2 += w2[o] * ue[i + o]
        d1 *= inv_h
        d2 *= inv_h2
        if i == m1 - 1:
            d1 = slope
        # r = e^u is the Euclidean radius: sinh rho = 2r/(1-r^2), cosh rho = (1+r^2)/(1-r^2)
        r = math.exp(u[i])
        den = 1.0 - r * r
        inv_den = 1.0 / den
        phi = 2.0 * r * inv_den
        inv_phi = 0.5 * den / r
        ch = (1.0 + r * r) * inv_den
        om2 = 1.0 + d1 * d1
        om = math.sqrt(om2)
        inv_om = 1.0 / om
        if i == 0:
            tr = d2
        else:
            tr = trig[2, i] * d1
        inv_wp = inv_om * inv_phi
        k1 = (ch - d2 * inv_om * inv_om) * inv_wp
        k2 = (ch - tr) * inv_wp
        if not (math.isfinite(k1) and math.isfinite(k2)):
            return 3
        if k1 <= 0.0 or k2 <= 0.0:
            diag[2] = i
            return 1
        hk = _esp_two_valued(k1, k2, k, binom_nm1) * inv_cnk
        sl = _esp_two_valued(k1, k2, k - 1, binom_nm1)
        hl = sl * inv_cnk1
        inv_hl = 1.0 / hl
        inv_F = hl / hk
        ydn = (trig[1, i] + ch * trig[0, i] * d1) * inv_om
        vt = ch - cos_theta * ydn
        if not vt > 0.0:
            diag[2] = i
            return 2
        f = vt * inv_F - phi * inv_om
        out[i] = om * inv_phi * f
        af = abs(f)
        if af > fmax:
            fmax = af
        dk = (n - k + 1) * sl * inv_cnk
        dl = 0.0
        if k >= 2:
            dl = (n - k + 2) * _esp_two_valued(k1, k2, k - 2, binom_nm1) * inv_cnk1
        trace = (dk * hl - hk * dl) * inv_hl * inv_hl
        c = vt * trace * (inv_F * inv_phi) ** 2
        if c > cmax:
            cmax = c
    diag[0] = cmax
    diag[1] = fmax
    return 0


@njit(cache=True)
def _axisym_advance(
    u, t, t_end, max_steps, dt_safety, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, diag
):
    m1 = u.shape[0]
    k1 = np.empty(m1)
    k2 = np.empty(m1)
    k3 = np.empty(m1)
    k4 = np.empty(m1)
    tmp = np.empty(m1)
    ue = np.empty(m1 + 2 * g)
    steps = 0
    while steps < max_steps and t < t_end:
        st = _axisym_rhs_into(u, ue, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, k1, diag)
        if st != 0:
            return st, steps, t
        dt = dt_safety * h * h / diag[0]
        if t + dt > t_end:
            dt = t_end - t
        for i in range(m1):
            tmp[i] = u[i] + 0.5 * dt * k1[i]
        st = _axisym_rhs_into(tmp, ue, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, k2, diag)
        if st != 0:
            return st, steps, t
        for i in range(m1):
            tmp[i] = u[i] + 0.5 * dt * k2[i]
        st = _axisym_rhs_into(tmp, ue, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, k3, diag)
        if st != 0:
            return st, steps, t
        for i in range(m1):
            tmp[i] = u[i] + dt * k3[i]
        st = _axisym_rhs_into(tmp, ue, h, trig, cos_theta, slope, n, k, g, w1, w2, gcoef, gscoef, binom_nm1, cnk, cnk1, k4, diag)
        if st != 0:
            return st, steps, t
        for i in range(m1):
            tmp[i] = u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not (tmp[i] < 0.0):
                return 3, steps, t
        for i in range(m1):
            u[i] = tmp[i]
        t += dt
        steps += 1
    return 0, steps, t


class _AxisymKernel:
    def __init__(self, surface: GraphSurface, k: int):
        self.grid = surface.grid
        self.theta = surface.theta
        n = surface.n
        g, w1, w2, gcoef, gscoef, binom, cnk, cnk1 = _kernel_tables(n, k)
        z = self.grid.zeta
        sin = np.sin(z)
        cot = np.zeros_like(z)
        cot[1:] = np.cos(z[1:]) / sin[1:]
        trig = np.ascontiguousarray(np.stack([sin, np.cos(z), cot]))
        self.args = (
            self.grid.h,
            trig,
            math.cos(self.theta),
            math.cos(self.theta) / math.sin(self.theta),
            n,
            k,
            g,
            w1,
            w2,
            gcoef,
            gscoef,
            binom,
            cnk,
            cnk1,
        )
        self.diag = np.zeros(3)

    def rhs(self, u):
        out = np.empty_like(u)
        st = _axisym_rhs(u, *self.args, out, self.diag)
        _raise_status(st, None, self.diag)
        return out

    def advance(self, u, t, t_end, max_steps, dt_safety):
        u = np.array(u, dtype=float)
        st, steps, t = _axisym_advance(u, t, t_end, max_steps, dt_safety, *self.args, self.diag)
        return st, steps, t, u


def _raise_status(status, state, diag):
    if status == _OK:
        return
    node = int(diag[2])
    if status == _CONVEXITY:
        raise ConvexityLoss(f"convexity lost at node {node}", state=state)
    if status == _PARABOLICITY:
        raise ParabolicityLoss(f"Vtilde <= 0 at node {node}", state=state)
    raise NumericalAbort("non-finite values in the flow", state=state)


def kernel_rhs(surface: GraphSurface, k: int | None = None) -> np.ndarray:
    """``du/dt`` from the compiled coordinate formula (axisymmetric only)."""
    if surface.grid.mode != AXISYMMETRIC:
        raise DomainError("compiled kernel is axisymmetric only")
    k = _quotient_index(surface, k)
    return _AxisymKernel(surface, k).rhs(hypgeom.graph_potential(surface.rho))


# -- generic numpy stepping (full mode, and a reference path) -----------


def _surface_from_u(surface: GraphSurface, u) -> GraphSurface:
    if np.any(~(u < 0.0)):
        raise NumericalAbort("graph left the ball")
    return surface.with_rho(hypgeom.graph_potential_inverse(u))


def step(state: FlowState, config: FlowConfig, dt: float | None = None) -> FlowState:
    """One RK4 step; ghosts and geometry are rebuilt at every stage."""
    surf = state.surface
    k = _quotient_index(surf, config.k)
    if dt is None:
        dt = stable_dt(surf, state.fields, config)
    u0 = hypgeom.graph_potential(surf.rho)
    try:
        if surf.grid.mode == AXISYMMETRIC:
            kern = _AxisymKernel(surf, k)
            stage = kern.rhs
        else:
            def stage(u):
                return rhs(_surface_from_u(surf, u), k=k)
        s1 = stage(u0)
        s2 = stage(u0 + 0.5 * dt * s1)
        s3 = stage(u0 + 0.5 * dt * s2)
        s4 = stage(u0 + dt * s3)
        u1 = u0 + dt / 6.0 * (s1 + 2 * s2 + 2 * s3 + s4)
        new = _surface_from_u(surf, u1)
        fields = geometry(new)
    except NumericalAbort as exc:
        exc.state = state
        raise
    except (DomainError, ValidationError) as exc:
        raise NumericalAbort(str(exc), state=state) from exc
    return FlowState(t=state.t + dt, surface=new, fields=fields, step_index=state.step_index + 1)


# -- monitors -------------------------------------------------------------


def monitor_columns(n: int) -> list[str]:
    cols = ["t"]
    cols += [f"A_{i}" for i in range(n + 1)]
    cols += [f"W_{i}" for i in range(n + 2)]
    cols += [f"WH_{i}" for i in range(n + 1)]
    cols += ["sup_f", "F_min", "F_max", "kappa_min", "kappa_max"]
    cols += [f"mink_res_{i}" for i in range(1, n + 1)]
    cols += ["v_min", "vtilde_min", "vtilde_max", "P_min", "P_max"]
    return cols


@dataclass(frozen=True)
class MonitorSample:
    t: float
    step: int
    report: QuermassReport
    sup_f: float
    F_min: float
    F_max: float
    kappa_min: float
    kappa_max: float
    mink_res: tuple
    v_min: float
    vtilde_min: float
    vtilde_max: float
    P_min: float
    P_max: float
    barrier_excess: float

    def row(self) -> list[float]:
        r = self.report
        vals = [self.t, *r.A, *r.W, *r.WH, self.sup_f, self.F_min, self.F_max, self.kappa_min, self.kappa_max]
        vals += list(self.mink_res)
        vals += [self.v_min, self.vtilde_min, self.vtilde_max, self.P_min, self.P_max]
        return vals


def sample_monitors(state: FlowState, k: int, barrier=None) -> MonitorSample:
    surf, fl = state.surface, state.fields
    F = curvature_quotient(fl, k)
    f = fl.vtilde_denom / F - fl.support_v
    P = fl.vtilde * F
    excess = 0.0
    if barrier is not None:
        lo, hi = barrier
        excess = float(max(np.max(lo - surf.rho), np.max(surf.rho - hi), 0.0))
    return MonitorSample(
        t=state.t,
        step=state.step_index,
        report=quermass_report(surf, fl),
        sup_f=float(np.max(np.abs(f))),
        F_min=float(F.min()),
        F_max=float(F.max()),
        kappa_min=float(fl.kappa.min()),
        kappa_max=float(fl.kappa.max()),
        mink_res=tuple(minkowski_residual(surf, fl, j) for j in range(1, surf.n + 1)),
        v_min=float(fl.support_v.min()),
        vtilde_min=float(fl.vtilde.min()),
        vtilde_max=float(fl.vtilde.max()),
        P_min=float(P.min()),
        P_max=float(P.max()),
        barrier_excess=excess,
    )


@dataclass
class FlowRun:
    """Result of :func:`run`: monitor samples plus the convergence summary."""

    n: int
    theta: float
    config: FlowConfig
    samples: list = field(default_factory=list)
    final: FlowState | None = None
    converged: bool = False
    steps: int = 0
    r_star: float | None = None
    cap_distance: float | None = None
    inner_radius: float | None = None
    outer_radius: float | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def channel(self, name: str) -> np.ndarray:
        """One monitor column as an array, e.g. ``"A_2"`` or ``"sup_f"``."""
        cols = monitor_columns(self.n)
        j = cols.index(name)
        return np.array([s.row()[j] for s in self.samples])

    @property
    def conservation_drift(self) -> float:
        a = self.channel(f"A_{self.n}")
        return float(np.max(np.abs(a - a[0])) / abs(a[0]))

    @property
    def barrier_excess(self) -> float:
        return max((s.barrier_excess for s in self.samples), default=0.0)

    def write_csv(self, fh) -> None:
        write_monitor_csv(fh, self.n, self.samples)

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "n": self.n,
            "theta": self.theta,
            "converged": self.converged,
            "steps": self.steps,
            "t_final": self.final.t if self.final else None,
            "sup_f_final": self.samples[-1].sup_f if self.samples else None,
            "r_star": self.r_star,
            "cap_distance": self.cap_distance,
            "conservation_drift": self.conservation_drift if self.samples else None,
            "barrier_excess": self.barrier_excess,
            "experimental": self.theta < EXPERIMENTAL_THETA,
            "inner_radius": self.inner_radius,
            "outer_radius": self.outer_radius,
        }


def write_monitor_csv(fh, n: int, samples) -> None:
    fh.write(MONITOR_FORMAT + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(monitor_columns(n))
    for s in samples:
        w.writerow(["%.17g" % x for x in s.row()])


def read_monitor_csv(fh) -> tuple[list[str], np.ndarray]:
    """Parse a monitors CSV; returns ``(columns, data)`` with one row per sample."""
    from .errors import FormatError

    first = fh.readline().strip()
    if first != MONITOR_FORMAT:
        raise FormatError("not a capflow monitors file")
    rows = list(csv.reader(fh))
    if not rows:
        raise FormatError("missing header row")
    cols = rows[0]
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(x) for x in r] for r in body], dtype=float)
    except ValueError as exc:
        raise FormatError(f"non-numeric monitor value: {exc}") from None
    if body and data.shape[1] != len(cols):
        raise FormatError("row length does not match the header")
    return cols, data.reshape(len(body), len(cols))


# -- driver ---------------------------------------------------------------


def initial_state(surface: GraphSurface) -> FlowState:
    fields = geometry(surface)
    if not fields.convex:
        node = int(np.argmin(fields.kappa.min(axis=-1).ravel()))
        raise ValidationError("initial surface is not strictly convex", node=node)
    return FlowState(t=0.0, surface=surface, fields=fields, step_index=0)


def run(initial: GraphSurface, config: FlowConfig = FlowConfig(), fit_cap: bool = True, callback=None) -> FlowRun:
    """Integrate until ``sup|f| < stop_speed_tol`` (checked at samples) or ``t_max``.

    A numerical abort propagates with ``exc.state`` set to the last good
    state.  Non-convergence by ``t_max`` is reported, not raised.
    """
    k = _quotient_index(initial, config.k)
    if initial.theta < EXPERIMENTAL_THETA:
        log.warning("theta=%.3g < %.1f: experimental regime", initial.theta, EXPERIMENTAL_THETA)
    if config.enclosing_radius is not None:
        check_between_caps(initial, None, config.enclosing_radius)
    state = initial_state(initial)
    r_in, r_out = bounding_cap_radii(initial)
    zeta = initial.grid.zeta_field()
    barrier = (
        cap_rho(initial.theta, r_in, zeta) - config.barrier_tol,
        cap_rho(initial.theta, r_out, zeta) + config.barrier_tol,
    )
    out = FlowRun(n=initial.n, theta=initial.theta, config=config, inner_radius=r_in, outer_radius=r_out)
    sample = sample_monitors(state, k, barrier)
    out.samples.append(sample)
    kern = _AxisymKernel(initial, k) if initial.grid.mode == AXISYMMETRIC else None

    while sample.sup_f >= config.stop_speed_tol and state.t < config.t_max and state.step_index < config.max_steps:
        budget = min(config.monitor_stride, config.max_steps - state.step_index)
        if kern is not None:
            u = hypgeom.graph_potential(state.surface.rho)
            st, steps, t, u_new = kern.advance(u, state.t, config.t_max, budget, config.dt_safety)
            if st != _OK:
                _raise_status(st, state, kern.diag)
            try:
                new = _surface_from_u(state.surface, u_new)
                state = FlowState(t=t, surface=new, fields=geometry(new), step_index=state.step_index + steps)
            except (DomainError, ValidationError) as exc:
                raise NumericalAbort(str(exc), state=state) from exc
        else:
            for _ in range(budget):
                dt = min(stable_dt(state.surface, state.fields, config), config.t_max - state.t)
                state = step(state, config, dt)
                if state.t >= config.t_max:
                    break
        sample = sample_monitors(state, k, barrier)
        out.samples.append(sample)
        if callback is not None:
            callback(sample)
        log.debug("t=%.6g step=%d sup|f|=%.3e", state.t, state.step_index, sample.sup_f)

    out.final = state
    out.steps = state.step_index
    out.converged = sample.sup_f < config.stop_speed_tol
    if fit_cap:
        from .inequal import cap_reference_inverse

        n = initial.n
        try:
            out.r_star = cap_reference_inverse(initial.theta, n, sample.report.A[n], n=n)
            ref = cap_rho(initial.theta, out.r_star, zeta)
            out.cap_distance = float(np.max(np.abs(state.surface.rho - ref)))
        except DomainError as exc:
            log.warning("cap fit failed: %s", exc)
    return out


def with_config(config: FlowConfig, **changes) -> FlowConfig:
    return replace(config, **changes)
