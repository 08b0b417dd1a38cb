"""Cap reference functions ``f_{k,theta}(r) = A_{k,theta}(cap_r)`` and the
Alexandrov-Fenchel / Minkowski inequality checkers built on them."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._stencil import quadrature_weights
from .errors import DomainError
from .quermass import QuermassReport, capillary_quermass, quermass_report
from .surface import (
    GeometryFields,
    GraphSurface,
    _check_theta,
    cap_euclidean_radius,
    cap_max_radius,
    geometry,
    sinh_power_integral,
    sphere_area,
)

M_REF = 1024


def _cap_quermass_raw(theta: float, r0: float, n: int, m: int):
    """``W``, ``WH``, ``A`` of the cap with exact curvatures.

    Only the area element and the enclosed volumes are integrated
    numerically; the slope ``u'`` is differentiated analytically.
    """
    c, s = math.cos(theta), math.sin(theta)
    h = 0.5 * math.pi / m
    zeta = np.arange(m + 1) * h
    zeta[-1] = 0.5 * math.pi
    cz, sz = np.cos(zeta), np.sin(zeta)
    re = cap_euclidean_radius(theta, r0, zeta)
    root = np.sqrt(c * c * cz * cz + s * s)
    # d(log r_e)/dzeta = c sin(zeta) / sqrt(c^2 cos^2 + s^2)
    du = c * sz / root
    omega = np.sqrt(1.0 + du * du)
    rho = 2.0 * np.arctanh(re)
    warp = np.sinh(rho)
    sw = quadrature_weights(m + 1, h) * sz ** (n - 1) * sphere_area(n - 1)
    area = math.fsum(warp**n * omega * sw)
    kappa = (1.0 + r0 * r0 * s * s) / (2.0 * r0)
    curv = [area * kappa**j for j in range(n + 1)]
    W = [math.fsum(sinh_power_integral(rho, n) * sw), curv[0] / (n + 1)]
    for j in range(1, n + 1):
        W.append(math.fsum([curv[j] / (n + 1), -j / (n + 2 - j) * W[j - 1]]))

    rb = r0 * s
    rho_b = 2.0 * math.atanh(rb)
    hhat = (1.0 + rb * rb) / (2.0 * rb)
    length = sphere_area(n - 1) * math.sinh(rho_b) ** (n - 1)
    WH = [sphere_area(n - 1) * sinh_power_integral(rho_b, n - 1), length / n]
    for j in range(1, n):
        WH.append(math.fsum([length * hhat**j / n, -j / (n + 1 - j) * WH[j - 1]]))
    A = capillary_quermass(W, WH, theta, n)
    return W, WH, A


def _check_radius(theta: float, r: float) -> None:
    if not 0.0 < r < cap_max_radius(theta):
        raise DomainError(f"cap radius {r} outside (0, 1/sin(theta))")


@lru_cache(maxsize=4096)
def _cap_A(theta: float, r: float, n: int, m: int) -> tuple:
    return tuple(_cap_quermass_raw(theta, r, n, m)[2])


def cap_reference_all(theta: float, r: float, n: int = 2, m_ref: int = M_REF) -> list:
    """``[f_{0,theta}(r), ..., f_{n,theta}(r)]``."""
    theta = _check_theta(theta)
    _check_radius(theta, r)
    return list(_cap_A(theta, float(r), n, m_ref))


def cap_reference(theta: float, r: float, k: int, n: int = 2, m_ref: int = M_REF) -> float:
    if not 0 <= k <= n:
        raise DomainError(f"k must lie in [0, {n}]")
    return cap_reference_all(theta, r, n, m_ref)[k]


def cap_quermass_report(theta: float, r: float, n: int = 2, m_ref: int = M_REF) -> QuermassReport:
    theta = _check_theta(theta)
    _check_radius(theta, r)
    W, WH, A = _cap_quermass_raw(theta, r, n, m_ref)
    return QuermassReport(
        n=n, theta=theta, W=list(W), WH=list(WH), A=list(A), curvature_integrals=[], grid={"mode": "exact-cap", "m": m_ref}
    )


def cap_radius_bracket(theta: float) -> tuple[float, float]:
    rmax = cap_max_radius(theta)
    return 1e-8 * rmax, rmax * (1.0 - 1e-9)


def cap_reference_inverse(theta: float, k: int, target: float, n: int = 2, m_ref: int = M_REF, rtol: float = 1e-12) -> float:
    """The radius ``r`` with ``f_{k,theta}(r) = target`` by bisection."""
    theta = _check_theta(theta)
    lo, hi = cap_radius_bracket(theta)
    flo = cap_reference(theta, lo, k, n, m_ref)
    fhi = cap_reference(theta, hi, k, n, m_ref)
    if not flo < target < fhi:
        raise DomainError(f"target {target} outside the range ({flo}, {fhi}) of f_{k}")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if cap_reference(theta, mid, k, n, m_ref) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CapTable:
    theta: float
    r: np.ndarray
    values: np.ndarray  # shape (len(r), n + 1)

    @property
    def n(self) -> int:
        return self.values.shape[1] - 1

    def strictly_increasing(self) -> bool:
        return bool(np.all(np.diff(self.values, axis=0) > 0.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r"] + [f"f_{k}" for k in range(self.n + 1)])
        for r, row in zip(self.r, self.values):
            w.writerow(["%.17g" % r] + ["%.17g" % v for v in row])
        return buf.getvalue()


def cap_table(theta: float, r_values, n: int = 2, m_ref: int = M_REF) -> CapTable:
    r = np.asarray(r_values, dtype=float)
    if r.ndim != 1 or np.any(np.diff(r) <= 0.0):
        raise DomainError("r samples must be strictly increasing")
    vals = np.array([cap_reference_all(theta, float(x), n, m_ref) for x in r])
    return CapTable(theta=_check_theta(theta), r=r, values=vals)


def _report(surface, fields):
    if fields is None:
        fields = geometry(surface)
    return fields, quermass_report(surface, fields)


def check_af(surface: GraphSurface, fields: GeometryFields | None = None, tol: float = 1e-8, m_ref: int = M_REF) -> dict:
    """Slacks ``A_n - f_n(f_k^{-1}(A_k))`` for ``k = 1..n-1``.

    ``equality_candidate`` is set when every slack is within ``tol`` and
    the principal curvatures vary by less than ``1e-6`` relative.
    """
    fields, rep = _report(surface, fields)
    n, theta = surface.n, surface.theta
    slacks = {}
    for k in range(1, n):
        r = cap_reference_inverse(theta, k, rep.A[k], n=n, m_ref=m_ref)
        slacks[k] = rep.A[n] - cap_reference(theta, r, n, n, m_ref)
    kap = fields.kappa
    spread = float((kap.max() - kap.min()) / kap.mean())
    ok = all(s >= -tol for s in slacks.values())
    return {
        "n": n,
        "theta": theta,
        "A": rep.A,
        "slack": {str(k): v for k, v in slacks.items()},
        "tolerance": tol,
        "pass": ok,
        "curvature_spread": spread,
        "equality_candidate": ok and all(abs(s) <= tol for s in slacks.values()) and spread < 1e-6,
    }


def check_minkowski_n2(surface: GraphSurface, fields: GeometryFields | None = None, tol: float = 1e-8, m_ref: int = M_REF) -> dict:
    """``int sigma_1 dA - 2|vol| - 6 f_2(f_1^{-1}(A_1)) - sin cos |boundary|``.

    The mean curvature here is the unnormalized trace ``sigma_1 = 2 H_1``.
    """
    if surface.n != 2:
        raise DomainError("the Minkowski-type check is for n = 2 only")
    fields, rep = _report(surface, fields)
    theta = surface.theta
    from .surface import boundary_geometry

    length = boundary_geometry(surface, fields).length
    r = cap_reference_inverse(theta, 1, rep.A[1], n=2, m_ref=m_ref)
    rhs_term = 6.0 * cap_reference(theta, r, 2, 2, m_ref)
    mean_curv = 2.0 * rep.curvature_integrals[1]
    gap = math.fsum([mean_curv, -2.0 * rep.W[0], -rhs_term, -math.sin(theta) * math.cos(theta) * length])
    return {
        "n": 2,
        "theta": theta,
        "integral_H": mean_curv,
        "volume": rep.W[0],
        "boundary_length": length,
        "gap": gap,
        "tolerance": tol,
        "pass": gap >= -tol,
    }


def to_json(report: dict, **kw) -> str:
    return json.dumps(report, **kw)

