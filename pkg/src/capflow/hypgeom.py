"""Poincare-ball coordinates and the ambient scalar fields of the flow.

Points of the upper half ball are described by the hyperbolic distance
``rho`` to the origin and the polar angle ``zeta`` measured from the
vertical axis ``E_{n+1}``; ``zeta = pi/2`` is the supporting totally
geodesic hyperplane.  Everything here broadcasts over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParabolicityLoss, PoleSingularity

RHO_MIN = 1e-3


def rho_from_r(r):
    """Hyperbolic distance for Euclidean ball radius ``r`` in [0, 1)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r >= 1.0):
        raise DomainError("Euclidean radius must lie in [0, 1)")
    out = 2.0 * np.arctanh(r)
    return float(out) if out.ndim == 0 else out


def r_from_rho(rho):
    """Euclidean ball radius ``(e^rho - 1)/(e^rho + 1) = tanh(rho/2)``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise DomainError("rho must be non-negative")
    out = np.tanh(0.5 * rho)
    return float(out) if out.ndim == 0 else out


def graph_potential(rho):
    """``Phi(rho) = ln tanh(rho/2)``, an antiderivative of ``1/sinh``.

    The additive constant is fixed by ``Phi(inf) = 0``.  Note that
    ``Phi(rho)`` is the logarithm of the Euclidean radius.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise PoleSingularity("graph potential diverges at rho <= 0")
    out = np.log(np.tanh(0.5 * rho))
    return float(out) if out.ndim == 0 else out


def graph_potential_inverse(u):
    u = np.asarray(u, dtype=float)
    if np.any(u >= 0.0):
        raise DomainError("graph potential values are negative")
    out = 2.0 * np.arctanh(np.exp(u))
    return float(out) if out.ndim == 0 else out


def e_coefficients(rho, zeta):
    """Coefficients of ``d_rho`` and ``d_zeta`` in the field ``E_{n+1}``."""
    rho = np.asarray(rho, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    em1 = np.expm1(rho)
    ep1 = em1 + 2.0
    c_rho = np.cos(zeta) * ep1**2 / (2.0 * np.exp(rho))
    c_zeta = -np.sin(zeta) * ep1 / em1
    return c_rho, c_zeta


def e_dot_nu(rho, zeta, du_dzeta, omega):
    """``<E_{n+1}, nu>`` for a radial graph with potential gradient ``du``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise PoleSingularity("polar chart degenerates at rho = 0")
    em1 = np.expm1(rho)
    ep1 = em1 + 2.0
    warp = np.sinh(rho)
    return (
        np.cos(zeta) * ep1**2 / (2.0 * np.exp(rho) * omega)
        + np.sin(zeta) * ep1 * warp * du_dzeta / (omega * em1)
    )


def killing_field_dot_nu(rho, zeta, du_dzeta, omega):
    """``<Y_{n+1}, nu>`` on a radial graph.

    ``Y = (1+|x|^2)/2 E - <x, E> x``; in the graph chart the position
    field contributes the support function ``sinh(rho)/omega`` and the
    Euclidean quantities are rewritten through ``r = tanh(rho/2)``.

    Parameters
    ----------
    rho, zeta : array_like
        Hyperbolic radius and polar angle of the surface point.
    du_dzeta : array_like
        ``zeta``-component of the gradient of ``u = Phi(rho)``.
    omega : array_like
        ``sqrt(1 + |grad u|^2)``.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise PoleSingularity("polar chart degenerates at rho = 0")
    r = np.tanh(0.5 * rho)
    em1 = np.expm1(rho)
    delta_xe = np.cos(zeta) * em1 / (em1 + 2.0)
    support = np.sinh(rho) / omega
    return 0.5 * (1.0 + r * r) * e_dot_nu(rho, zeta, du_dzeta, omega) - delta_xe * support


def killing_field_norm_sq(rho, zeta):
    """``g(Y, Y) = ((1+|x|^2)^2 - 4 <x,E>^2) / (1-|x|^2)^2``."""
    r = np.tanh(0.5 * np.asarray(rho, dtype=float))
    d = r * np.cos(zeta)
    return ((1.0 + r * r) ** 2 - 4.0 * d * d) / (1.0 - r * r) ** 2


@dataclass(frozen=True)
class AmbientScalars:
    """Ambient fields at surface points (arrays broadcast together)."""

    warp: np.ndarray
    v0: np.ndarray
    y_dot_nu: np.ndarray
    e_coeffs: tuple
    vtilde_denom: np.ndarray


def ambient_bundle(rho, zeta, du_dzeta, omega, theta) -> AmbientScalars:
    """Collect ``sinh rho``, ``V_0``, ``<Y,nu>`` and ``V_0 - cos(theta)<Y,nu>``.

    Raises
    ------
    ParabolicityLoss
        If ``V_0 - cos(theta) <Y, nu>`` is not positive somewhere.
    """
    rho = np.asarray(rho, dtype=float)
    warp = np.sinh(rho)
    v0 = np.cosh(rho)
    ydn = killing_field_dot_nu(rho, zeta, du_dzeta, omega)
    denom = v0 - np.cos(theta) * ydn
    if np.any(~(denom > 0.0)):
        raise ParabolicityLoss("V0 - cos(theta)<Y,nu> is not positive")
    return AmbientScalars(
        warp=warp,
        v0=v0,
        y_dot_nu=ydn,
        e_coeffs=e_coefficients(rho, zeta),
        vtilde_denom=denom,
    )
