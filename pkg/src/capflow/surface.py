"""Discrete capillary graphs over the closed upper half-sphere.

A surface is stored as its hyperbolic radius ``rho`` sampled on a
uniform polar grid.  Two layouts exist:

* ``axisymmetric``: ``rho`` has shape ``(m + 1,)`` over ``zeta`` in
  ``[0, pi/2]``; any dimension ``n`` in 2..6.
* ``full``: ``n = 2`` only, ``rho`` has shape ``(m + 1, K)`` with ``K``
  equispaced azimuth nodes.

Derivatives in ``zeta`` use fourth-order central differences.  The
pole is closed by even reflection and the contact line by ghost values
that carry the oblique boundary condition ``u_zeta = cos(theta) omega``.
Azimuthal derivatives are spectral.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import hypgeom
from ._stencil import (
    FD_ORDER,
    diff_extended,
    extend_axis,
    ghost_count,
    quadrature_weights,
    spectral_periodic_derivative,
)
from .errors import DomainError, FormatError, ValidationError
from .symfun import h_all

AXISYMMETRIC = "axisymmetric"
FULL = "full"
_FORMAT_TAG = "# capflow surface v1"

_GL_NODES, _GL_WEIGHTS = leggauss(96)


def sphere_area(k: int) -> float:
    """Area of the unit ``k``-sphere in R^{k+1}."""
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def sinh_power_integral(rho, n: int):
    """``int_0^rho sinh(s)^n ds`` by fixed 96-point Gauss-Legendre.

    The integrand is entire, so the rule is exact to rounding for every
    radius met in practice, and it keeps full relative accuracy as
    ``rho -> 0`` where the antiderivative formulas cancel badly.
    """
    rho = np.asarray(rho, dtype=float)
    s = 0.5 * rho[..., None] * (_GL_NODES + 1.0)
    out = 0.5 * rho * np.sum(_GL_WEIGHTS * np.sinh(s) ** n, axis=-1)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HalfSphereGrid:
    """Uniform polar grid on the closed upper half-sphere."""

    n: int
    m: int
    mode: str = AXISYMMETRIC
    n_azimuth: int = 0

    def __post_init__(self):
        if self.mode not in (AXISYMMETRIC, FULL):
            raise DomainError(f"unknown grid mode {self.mode!r}")
        if self.m < 16:
            raise DomainError(f"need m >= 16, got {self.m}")
        if self.mode == FULL:
            if self.n != 2:
                raise DomainError("full mode requires n = 2")
            if self.n_azimuth < 8 or self.n_azimuth % 2:
                raise DomainError("full mode needs an even azimuth count >= 8")
        else:
            if not 2 <= self.n <= 6:
                raise DomainError(f"axisymmetric mode supports n in 2..6, got {self.n}")
            if self.n_azimuth:
                raise DomainError("axisymmetric grids carry no azimuth nodes")

    @property
    def h(self) -> float:
        return 0.5 * math.pi / self.m

    @property
    def shape(self) -> tuple:
        if self.mode == FULL:
            return (self.m + 1, self.n_azimuth)
        return (self.m + 1,)

    @cached_property
    def zeta(self) -> np.ndarray:
        z = np.arange(self.m + 1) * self.h
        z[-1] = 0.5 * math.pi
        return z

    @cached_property
    def psi(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_azimuth) / max(self.n_azimuth, 1)

    @cached_property
    def sphere_weights(self) -> np.ndarray:
        """Quadrature weights of the round measure on the half-sphere."""
        wz = quadrature_weights(self.m + 1, self.h)
        sin = np.sin(self.zeta)
        if self.mode == FULL:
            dpsi = 2.0 * math.pi / self.n_azimuth
            return np.outer(wz * sin, np.full(self.n_azimuth, dpsi))
        return wz * sin ** (self.n - 1) * sphere_area(self.n - 1)

    @cached_property
    def boundary_weights(self) -> np.ndarray:
        """Weights of the round measure on the equator ``S^{n-1}``."""
        if self.mode == FULL:
            return np.full(self.n_azimuth, 2.0 * math.pi / self.n_azimuth)
        return np.array([sphere_area(self.n - 1)])

    def zeta_field(self) -> np.ndarray:
        """``zeta`` broadcast to the node layout."""
        if self.mode == FULL:
            return np.broadcast_to(self.zeta[:, None], self.shape)
        return self.zeta


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (0.0 < theta <= 0.5 * math.pi + 1e-15):
        raise DomainError("theta out of (0, pi/2]")
    return min(theta, 0.5 * math.pi)


@dataclass(frozen=True, eq=False)
class GraphSurface:
    """Radial graph ``rho`` over the half-sphere meeting ``H`` at angle ``theta``.

    The array is copied and made read-only on construction.
    """

    grid: HalfSphereGrid
    rho: np.ndarray
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_theta(self.theta))
        rho = np.array(self.rho, dtype=float, copy=True)
        if rho.shape != self.grid.shape:
            raise DomainError(f"rho has shape {rho.shape}, grid wants {self.grid.shape}")
        if not np.all(np.isfinite(rho)):
            raise DomainError("rho has non-finite entries")
        bad = np.flatnonzero(rho.ravel() < hypgeom.RHO_MIN)
        if bad.size:
            raise ValidationError(f"rho below rho_min={hypgeom.RHO_MIN}", node=int(bad[0]))
        if self.grid.mode == FULL and np.ptp(rho[0]) > 1e-12 * rho[0].max():
            raise ValidationError("pole row is not single-valued", node=0)
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.grid.n

    def with_rho(self, rho) -> "GraphSurface":
        return GraphSurface(self.grid, rho, self.theta)

    def geometry(self) -> "GeometryFields":
        return geometry(self)


@dataclass(frozen=True, eq=False)
class GeometryFields:
    """Per-node geometry of a graph surface.

    ``kappa`` has a trailing axis of length ``n`` and ``hk`` one of
    length ``n + 1`` (``H_0 .. H_n``).  ``area_weight`` already contains
    the quadrature weight, so ``area_weight.sum()`` is the area.
    ``u_zeta``/``u_psi`` are the coordinate derivatives of ``u = Phi(rho)``.
    """

    omega: np.ndarray
    u_zeta: np.ndarray
    u_psi: np.ndarray | None
    support_v: np.ndarray
    vtilde_denom: np.ndarray
    vtilde: np.ndarray
    y_dot_nu: np.ndarray
    kappa: np.ndarray
    hk: np.ndarray
    area_weight: np.ndarray
    boundary_tangential: np.ndarray = field(repr=False)

    @property
    def convex(self) -> bool:
        return bool(np.all(self.kappa > 0.0))

    @property
    def area(self) -> float:
        return math.fsum(self.area_weight.ravel())


@dataclass(frozen=True, eq=False)
class BoundaryGeometry:
    """Contact-line data: ``hhat`` (curvatures of the boundary in ``H``),
    line element weights ``ds_weight`` and boundary radius ``rho_b``."""

    hhat: np.ndarray
    ds_weight: np.ndarray
    rho_b: np.ndarray
    n: int

    @property
    def length(self) -> float:
        return math.fsum(self.ds_weight.ravel())

    @property
    def hk(self) -> np.ndarray:
        """Normalized symmetric functions ``H_0..H_{n-1}`` of ``hhat``."""
        return h_all(self.hhat)


def boundary_slope(theta: float, u_psi_boundary=None):
    """Contact-angle slope ``u_zeta`` at ``zeta = pi/2``.

    ``u_zeta = cos(theta) * sqrt(1 + u_zeta^2 + u_psi^2)`` solved for the
    root that is continuous at ``theta = pi/2``.
    """
    cot = math.cos(theta) / math.sin(theta)
    if u_psi_boundary is None:
        return cot
    return cot * np.sqrt(1.0 + np.asarray(u_psi_boundary) ** 2)


def _zeta_derivatives(u, slope, h):
    ue = extend_axis(u, slope, h, FD_ORDER)
    return diff_extended(ue, h, 1, FD_ORDER), diff_extended(ue, h, 2, FD_ORDER)


def _axisym_derivatives(surface: GraphSurface):
    grid = surface.grid
    u = hypgeom.graph_potential(surface.rho)
    du, d2u = _zeta_derivatives(u, boundary_slope(surface.theta), grid.h)
    du[-1] = boundary_slope(surface.theta)
    return u, du, d2u


def _full_extend(u, slope, h):
    # Across the pole the meridian continues at azimuth psi + pi.
    half = u.shape[1] // 2
    mirrored = np.roll(u, -half, axis=1)
    ue = extend_axis(u, slope, h, FD_ORDER)
    g = ghost_count(FD_ORDER)
    ue[:g] = mirrored[1 : g + 1][::-1]
    return ue


def _axisym_curvatures(rho, zeta, du, d2u, n):
    warp = np.sinh(rho)
    cosh = np.cosh(rho)
    omega = np.sqrt(1.0 + du * du)
    sin = np.sin(zeta)
    safe = np.where(sin > 0.0, sin, 1.0)
    transverse = np.where(sin > 0.0, np.cos(zeta) * du / safe, d2u)
    k1 = (cosh - d2u / omega**2) / (omega * warp)
    k2 = (cosh - transverse) / (omega * warp)
    kappa = np.empty(rho.shape + (n,))
    kappa[..., 0] = k1
    kappa[..., 1:] = k2[..., None]
    return omega, kappa


def _full_pole(u, h):
    """Gradient and Hessian at the pole in Cartesian normal coordinates.

    Along the meridian of azimuth ``psi`` the first and second
    ``zeta``-derivatives are ``g . e(psi)`` and ``e(psi)^T D e(psi)``; the
    Cartesian data are read off the Fourier modes 1 and 0, 2.
    """
    ue = _full_extend(u, 0.0, h)
    d1 = diff_extended(ue, h, 1, FD_ORDER)[0]
    d2 = diff_extended(ue, h, 2, FD_ORDER)[0]
    k = u.shape[1]
    psi = 2.0 * math.pi * np.arange(k) / k
    c1, s1 = np.cos(psi), np.sin(psi)
    gx = 2.0 * np.mean(d1 * c1)
    gy = 2.0 * np.mean(d1 * s1)
    mean = np.mean(d2)
    c2 = 2.0 * np.mean(d2 * np.cos(2 * psi))
    s2 = 2.0 * np.mean(d2 * np.sin(2 * psi))
    hxx, hyy, hxy = mean + c2, mean - c2, s2
    return np.array([gx, gy]), np.array([[hxx, hxy], [hxy, hyy]])


def _sym2_eigs(a, b, d):
    mid = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), b)
    return mid + rad, mid - rad


def _full_fields(surface: GraphSurface):
    """Frame data for the full (n = 2) layout.

    Returns ``u_z, u_p, omega`` and the orthonormal-frame gradient ``p``
    and covariant Hessian ``H`` (components ``zz, zp, pp``).
    """
    grid = surface.grid
    h = grid.h
    u = hypgeom.graph_potential(surface.rho)
    u_p = spectral_periodic_derivative(u, 1, axis=1)
    u_pp = spectral_periodic_derivative(u, 2, axis=1)
    slope = boundary_slope(surface.theta, u_p[-1])
    ue = _full_extend(u, slope, h)
    u_z = diff_extended(ue, h, 1, FD_ORDER)
    u_zz = diff_extended(ue, h, 2, FD_ORDER)
    u_z[-1] = slope
    u_zp = spectral_periodic_derivative(u_z, 1, axis=1)

    zeta = grid.zeta[:, None]
    sin = np.sin(zeta)
    cos = np.cos(zeta)
    safe = np.where(sin > 0.0, sin, 1.0)
    p1 = u_z
    p2 = u_p / safe
    hzz = u_zz
    hzp = (u_zp - cos / safe * u_p) / safe
    hpp = u_pp / safe**2 + cos / safe * u_z

    g, hess = _full_pole(u, h)
    psi = grid.psi
    # At the pole the frame (e_zeta, e_psi) is the rotated Cartesian frame.
    c, s = np.cos(psi), np.sin(psi)
    p1[0] = g[0] * c + g[1] * s
    p2[0] = -g[0] * s + g[1] * c
    hzz[0] = hess[0, 0] * c * c + 2 * hess[0, 1] * c * s + hess[1, 1] * s * s
    hpp[0] = hess[0, 0] * s * s - 2 * hess[0, 1] * c * s + hess[1, 1] * c * c
    hzp[0] = (hess[1, 1] - hess[0, 0]) * c * s + hess[0, 1] * (c * c - s * s)
    return u_z, u_p, p1, p2, hzz, hzp, hpp


def _full_curvatures(rho, p1, p2, hzz, hzp, hpp):
    """Principal curvatures from ``(cosh rho I - S H) / (omega sinh rho)``.

    ``S = I - p p^T / omega^2`` is conjugated to the symmetric form
    ``S^{1/2} H S^{1/2}`` so the closed-form 2x2 eigenvalues apply.
    """
    pp = p1 * p1 + p2 * p2
    omega = np.sqrt(1.0 + pp)
    c = -1.0 / (omega * (omega + 1.0))
    # S^{1/2} = I + c p p^T
    r11 = 1.0 + c * p1 * p1
    r12 = c * p1 * p2
    r22 = 1.0 + c * p2 * p2
    t11 = r11 * hzz + r12 * hzp
    t12 = r11 * hzp + r12 * hpp
    t21 = r12 * hzz + r22 * hzp
    t22 = r12 * hzp + r22 * hpp
    b11 = t11 * r11 + t12 * r12
    b12 = t11 * r12 + t12 * r22
    b22 = t21 * r12 + t22 * r22
    mu_hi, mu_lo = _sym2_eigs(b11, b12, b22)
    warp = np.sinh(rho)
    cosh = np.cosh(rho)
    kappa = np.stack([(cosh - mu_hi) / (omega * warp), (cosh - mu_lo) / (omega * warp)], axis=-1)
    return omega, kappa


def geometry(surface: GraphSurface) -> GeometryFields:
    """Evaluate all per-node geometric scalars of ``surface``."""
    grid = surface.grid
    n = grid.n
    rho = surface.rho
    zeta = grid.zeta_field()
    if grid.mode == AXISYMMETRIC:
        _, du, d2u = _axisym_derivatives(surface)
        omega, kappa = _axisym_curvatures(rho, zeta, du, d2u, n)
        u_psi = None
        u_zeta = du
        tangential = kappa[-1, 1:].copy()
    else:
        u_zeta, u_psi, p1, p2, hzz, hzp, hpp = _full_fields(surface)
        omega, kappa = _full_curvatures(rho, p1, p2, hzz, hzp, hpp)
        # h(T, T) for the unit tangent of the contact line (sin zeta = 1).
        q = 1.0 + p2[-1] ** 2
        tangential = ((np.cosh(rho[-1]) * q - hpp[-1]) / (omega[-1] * np.sinh(rho[-1]) * q))[:, None]
    if not np.all(np.isfinite(kappa)):
        raise DomainError("non-finite curvature (second differences blew up)")
    amb = hypgeom.ambient_bundle(rho, zeta, u_zeta, omega, surface.theta)
    support = amb.warp / omega
    area_weight = amb.warp**n * omega * grid.sphere_weights
    return GeometryFields(
        omega=omega,
        u_zeta=u_zeta,
        u_psi=u_psi,
        support_v=support,
        vtilde_denom=amb.vtilde_denom,
        vtilde=support / amb.vtilde_denom,
        y_dot_nu=amb.y_dot_nu,
        kappa=kappa,
        hk=h_all(kappa),
        area_weight=area_weight,
        boundary_tangential=tangential,
    )


def boundary_geometry(surface: GraphSurface, fields: GeometryFields | None = None) -> BoundaryGeometry:
    """Curvatures ``hhat = h|_T / sin(theta)`` and line weights of the contact line."""
    if fields is None:
        fields = geometry(surface)
    grid = surface.grid
    n = grid.n
    rho_b = surface.rho[-1]
    hhat = fields.boundary_tangential / math.sin(surface.theta)
    warp_b = np.sinh(rho_b)
    if grid.mode == FULL:
        ds = warp_b * np.sqrt(1.0 + fields.u_psi[-1] ** 2) * grid.boundary_weights
        rho_b = np.asarray(rho_b)
    else:
        ds = np.array([warp_b ** (n - 1)]) * grid.boundary_weights
        rho_b = np.array([rho_b])
        hhat = hhat[None, :]
    return BoundaryGeometry(hhat=hhat, ds_weight=ds, rho_b=rho_b, n=n)


def integrate_bulk(fields: GeometryFields, integrand) -> float:
    """``int_Sigma integrand dA`` for a node array or a callable of ``fields``."""
    vals = integrand(fields) if callable(integrand) else np.asarray(integrand)
    return math.fsum(np.broadcast_to(vals * fields.area_weight, fields.area_weight.shape).ravel())


def integrate_boundary(boundary: BoundaryGeometry, integrand) -> float:
    """``int_{boundary} integrand ds``."""
    vals = integrand(boundary) if callable(integrand) else np.asarray(integrand)
    return math.fsum(np.broadcast_to(vals * boundary.ds_weight, boundary.ds_weight.shape).ravel())


def enclosed_volume(surface: GraphSurface) -> float:
    """Hyperbolic volume of the region between the graph and ``H``."""
    inner = sinh_power_integral(surface.rho, surface.n)
    return math.fsum((inner * surface.grid.sphere_weights).ravel())


def boundary_enclosed_area(surface: GraphSurface) -> float:
    """``n``-volume of the region of ``H`` bounded by the contact line."""
    grid = surface.grid
    inner = sinh_power_integral(surface.rho[-1], grid.n - 1)
    return math.fsum((np.atleast_1d(inner) * grid.boundary_weights).ravel())


def minkowski_residual(surface: GraphSurface, fields: GeometryFields, k: int) -> float:
    """``int (H_{k-1} Vtilde - H_k <x, nu>) dA``; zero in the continuum."""
    n = surface.n
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}]")
    integrand = fields.hk[..., k - 1] * fields.vtilde_denom - fields.hk[..., k] * fields.support_v
    return integrate_bulk(fields, integrand)


# -- caps ---------------------------------------------------------------


def cap_max_radius(theta: float) -> float:
    """Caps need ``r0 < 1/sin(theta)``; the ball also forces ``r_e < 1``."""
    return 1.0 / math.sin(theta)


def cap_euclidean_radius(theta: float, r0: float, zeta):
    """Euclidean radius of the cap ``|x + r0 cos(theta) E| = r0`` along ``zeta``."""
    c, s = math.cos(theta), math.sin(theta)
    cz = np.cos(zeta)
    # r0 (sqrt(c^2 cz^2 + s^2) - c cz), rewritten without cancellation
    return r0 * s * s / (np.sqrt(c * c * cz * cz + s * s) + c * cz)


def cap_rho(theta: float, r0: float, zeta) -> np.ndarray:
    theta = _check_theta(theta)
    if not 0.0 < r0:
        raise DomainError("cap radius must be positive")
    re = cap_euclidean_radius(theta, r0, zeta)
    if np.any(re >= 1.0) or r0 * math.sin(theta) >= 1.0:
        raise DomainError("cap leaves the ball (r0 too large for theta)")
    return hypgeom.rho_from_r(re)


def cap_curvature(theta: float, r0: float) -> float:
    """Principal curvature of the cap ``C_{theta, r0}``."""
    s = math.sin(theta)
    return (1.0 + r0 * r0 * s * s) / (2.0 * r0)


def cap_graph(theta: float, r0: float, grid: HalfSphereGrid) -> GraphSurface:
    """The exact spherical cap sampled on ``grid``."""
    rho = cap_rho(theta, r0, grid.zeta)
    if grid.mode == FULL:
        rho = np.repeat(rho[:, None], grid.n_azimuth, axis=1)
    return GraphSurface(grid, rho, theta)


def perturbation_profile(zeta, coeffs) -> np.ndarray:
    """``sum_j a_j (cos(2 j zeta) - (-1)^j) / 2``, normalized to sup 1.

    Each term vanishes with zero slope at ``zeta = pi/2`` and is even at
    the pole, so multiplying a cap by ``1 + eps P`` keeps the contact
    angle and the axis regularity exactly.
    """
    zeta = np.asarray(zeta, dtype=float)
    fine = np.linspace(0.0, 0.5 * math.pi, 2049)
    def raw(z):
        return sum(a * 0.5 * (np.cos(2 * (j + 1) * z) - (-1) ** (j + 1)) for j, a in enumerate(coeffs))
    scale = np.max(np.abs(raw(fine)))
    if scale == 0.0:
        return np.zeros_like(zeta)
    return raw(zeta) / scale


def azimuthal_profile(zeta, psi, coeffs) -> np.ndarray:
    """Non-axisymmetric modes ``b_j sin(zeta)^j cos(zeta)^2 cos(j psi + phase_j)``.

    ``coeffs`` holds ``(b_j, phase_j)`` for ``j = 1, 2, ...``.  The factor
    ``cos^2`` keeps value and slope zero on the contact line.
    """
    z = np.asarray(zeta)[:, None]
    out = np.zeros((z.shape[0], len(psi)))
    for j, (b, phase) in enumerate(coeffs, start=1):
        out += b * np.sin(z) ** j * np.cos(z) ** 2 * np.cos(j * psi + phase)
    return out


@dataclass(frozen=True)
class Perturbation:
    """Coefficients of a cap perturbation (see :func:`perturbation_profile`).

    ``azimuthal`` holds ``(b_j, phase_j)`` pairs and is only used on full grids.
    """

    eps: float
    coeffs: tuple
    azimuthal: tuple = ()

    @classmethod
    def draw(cls, rng: np.random.Generator, eps: float, modes: int = 2) -> "Perturbation":
        coeffs = tuple(float(x) for x in rng.uniform(-1.0, 1.0, size=modes))
        amp = rng.uniform(-1.0, 1.0, size=modes)
        phase = rng.uniform(0.0, 2.0 * math.pi, size=modes)
        return cls(eps=float(eps), coeffs=coeffs, azimuthal=tuple(zip(amp.tolist(), phase.tolist())))

    def apply(self, theta: float, r0: float, grid: HalfSphereGrid) -> GraphSurface:
        """``rho_cap (1 + eps P)`` on ``grid``."""
        base = cap_rho(theta, r0, grid.zeta)
        prof = perturbation_profile(grid.zeta, self.coeffs)
        if grid.mode == FULL:
            extra = azimuthal_profile(grid.zeta, grid.psi, self.azimuthal)
            rho = base[:, None] * (1.0 + self.eps * (prof[:, None] + extra))
        else:
            rho = base * (1.0 + self.eps * prof)
        if np.any(np.tanh(0.5 * rho) >= 1.0 - 1e-12):
            raise DomainError("perturbation leaves the ball")
        return GraphSurface(grid, rho, theta)


def perturbed_cap(
    theta: float,
    r0: float,
    grid: HalfSphereGrid,
    eps: float,
    rng: np.random.Generator,
    modes: int = 2,
    max_tries: int = 100,
) -> GraphSurface:
    """Random strictly convex perturbation ``rho_cap (1 + eps P)`` of a cap.

    Coefficients are uniform on ``[-1, 1]``; draws giving a non-convex
    or out-of-ball surface are rejected and redrawn.
    """
    return draw_convex_perturbation(theta, r0, grid, eps, rng, modes, max_tries)[0]


def draw_convex_perturbation(theta, r0, grid, eps, rng, modes=2, max_tries=100):
    """Like :func:`perturbed_cap` but also returns the accepted :class:`Perturbation`."""
    for _ in range(max_tries):
        pert = Perturbation.draw(rng, eps, modes)
        try:
            surf = pert.apply(theta, r0, grid)
            if geometry(surf).convex:
                return surf, pert
        except (DomainError, ValidationError, ArithmeticError):
            continue
    raise ValidationError("could not draw a convex perturbation; lower eps")


def check_between_caps(surface: GraphSurface, r_inner: float | None, r_outer: float | None, tol: float = 0.0):
    """Validate ``rho_cap(r_inner) <= rho <= rho_cap(r_outer)`` node by node.

    Raises :class:`ValidationError` naming the first offending node.
    """
    zeta = surface.grid.zeta_field()
    if r_outer is not None:
        outer = cap_rho(surface.theta, r_outer, zeta)
        bad = np.flatnonzero((surface.rho - outer).ravel() > tol)
        if bad.size:
            raise ValidationError(f"surface leaves the enclosing cap r={r_outer}", node=int(bad[0]))
    if r_inner is not None:
        inner = cap_rho(surface.theta, r_inner, zeta)
        bad = np.flatnonzero((inner - surface.rho).ravel() > tol)
        if bad.size:
            raise ValidationError(f"surface does not contain the cap r={r_inner}", node=int(bad[0]))


def fits_inside_cap(surface: GraphSurface, r0: float) -> bool:
    try:
        check_between_caps(surface, None, r0)
    except ValidationError:
        return False
    return True


def bounding_cap_radii(surface: GraphSurface) -> tuple[float, float]:
    """Largest enclosed and smallest enclosing cap radii (same ``theta``).

    Cap radii are monotone in ``r0`` at every ``zeta``, so each bound is
    a pointwise extremum of the inverse relation ``r_e -> r0``.
    """
    zeta = surface.grid.zeta_field()
    unit = cap_euclidean_radius(surface.theta, 1.0, zeta)
    ratio = np.tanh(0.5 * surface.rho) / unit
    return float(ratio.min()), float(ratio.max())


# -- serialization ------------------------------------------------------


def dumps(surface: GraphSurface) -> str:
    g = surface.grid
    buf = io.StringIO()
    buf.write(f"{_FORMAT_TAG}\n")
    buf.write(f"n {g.n}\nmode {g.mode}\nm {g.m}\nn_azimuth {g.n_azimuth}\n")
    buf.write(f"theta {surface.theta:.17g}\n")
    rows = surface.rho if g.mode == FULL else surface.rho[:, None]
    for row in rows:
        buf.write(" ".join(f"{x:.17g}" for x in row))
        buf.write("\n")
    return buf.getvalue()


def loads(text: str) -> GraphSurface:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != _FORMAT_TAG:
        raise FormatError("missing surface header line")
    header = {}
    try:
        for ln in lines[1:6]:
            key, val = ln.split()
            header[key] = val
        grid = HalfSphereGrid(
            n=int(header["n"]),
            m=int(header["m"]),
            mode=header["mode"],
            n_azimuth=int(header["n_azimuth"]),
        )
        theta = float(header["theta"])
        data = np.array([[float(x) for x in ln.split()] for ln in lines[6:]])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad surface file: {exc}") from None
    if grid.mode == AXISYMMETRIC:
        if data.ndim != 2 or data.shape[1] != 1:
            raise FormatError("axisymmetric surfaces carry one value per line")
        data = data[:, 0]
    if data.shape != grid.shape:
        raise FormatError(f"expected {grid.shape} values, found {data.shape}")
    return GraphSurface(grid, data, theta)


def save(surface: GraphSurface, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps(surface))


def load(path) -> GraphSurface:
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())
