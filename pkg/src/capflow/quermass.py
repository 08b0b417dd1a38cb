"""Quermassintegrals of the enclosed body, of its trace on ``H``, and the
capillary combinations ``A_{k,theta}``."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .surface import (
    BoundaryGeometry,
    GeometryFields,
    GraphSurface,
    boundary_enclosed_area,
    boundary_geometry,
    enclosed_volume,
    geometry,
    integrate_boundary,
    integrate_bulk,
)


@dataclass(frozen=True)
class QuermassReport:
    """``W`` has ``n + 2`` entries, ``WH`` and ``A`` have ``n + 1``."""

    n: int
    theta: float
    W: list
    WH: list
    A: list
    curvature_integrals: list
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "QuermassReport":
        return cls(**data)


def bulk_quermass(surface: GraphSurface, fields: GeometryFields) -> tuple[list, list]:
    """``W_0 .. W_{n+1}`` of the enclosed region and ``int H_k dA``."""
    n = surface.n
    curv = [integrate_bulk(fields, fields.hk[..., k]) for k in range(n + 1)]
    W = [enclosed_volume(surface), curv[0] / (n + 1)]
    for k in range(1, n + 1):
        W.append(math.fsum([curv[k] / (n + 1), -k / (n + 2 - k) * W[k - 1]]))
    return W, curv


def boundary_quermass(surface: GraphSurface, boundary: BoundaryGeometry) -> list:
    """``W^H_0 .. W^H_n`` of the region of ``H`` inside the contact line."""
    n = boundary.n
    hk = boundary.hk
    WH = [boundary_enclosed_area(surface), boundary.length / n]
    for k in range(1, n):
        integral = integrate_boundary(boundary, hk[..., k])
        WH.append(math.fsum([integral / n, -k / (n + 1 - k) * WH[k - 1]]))
    return WH


def capillary_quermass(W, WH, theta: float, n: int) -> list:
    """Combine bulk and boundary quermassintegrals into ``A_{0..n, theta}``."""
    c, s = math.cos(theta), math.sin(theta)
    A = [W[0], math.fsum([W[1], -c / (n + 1) * WH[0]])]
    for k in range(1, n):
        terms = [W[k + 1]]
        for l in range(k // 2 + 1):
            prod = 1.0
            for j in range(l):
                prod *= (k - 2 * j) / (n - k + 2 * (j + 1))
            sign = -1.0 if l % 2 == 0 else 1.0  # (-1)^(l-1)
            terms.append(c / (n + 1) * sign * s ** (k - 2 * l) * WH[k - 2 * l] * prod)
        A.append(math.fsum(terms))
    return A


def quermass_report(surface: GraphSurface, fields: GeometryFields | None = None) -> QuermassReport:
    if fields is None:
        fields = geometry(surface)
    bnd = boundary_geometry(surface, fields)
    W, curv = bulk_quermass(surface, fields)
    WH = boundary_quermass(surface, bnd)
    A = capillary_quermass(W, WH, surface.theta, surface.n)
    g = surface.grid
    meta = {"mode": g.mode, "m": g.m, "n_azimuth": g.n_azimuth}
    return QuermassReport(
        n=surface.n,
        theta=surface.theta,
        W=[float(x) for x in W],
        WH=[float(x) for x in WH],
        A=[float(x) for x in A],
        curvature_integrals=[float(x) for x in curv],
        grid=meta,
    )

