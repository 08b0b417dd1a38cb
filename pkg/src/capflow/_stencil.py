"""Finite-difference stencils, Neumann ghost closures and end-corrected quadrature."""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

FD_ORDER = 4


@lru_cache(maxsize=None)
def central_weights(order: int, deriv: int) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of the centred ``order``-accurate stencil."""
    half = (order + deriv - 1) // 2
    offs = np.arange(-half, half + 1)
    vander = np.vander(offs, increasing=True).T.astype(float)
    rhs = np.zeros(len(offs))
    rhs[deriv] = factorial(deriv)
    w = np.linalg.solve(vander, rhs)
    w[np.abs(w) < 1e-14] = 0.0
    return offs, w


def ghost_count(order: int) -> int:
    return max(central_weights(order, 1)[0][-1], central_weights(order, 2)[0][-1])


@lru_cache(maxsize=None)
def neumann_ghost_coefficients(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Ghost values beyond a Neumann end from a one-sided polynomial fit.

    The polynomial of degree ``order + 1`` through the last ``order + 1``
    nodes with prescribed end slope ``s`` is evaluated at the ghosts, so

        ghost[i] = coef[i] @ u[-(order+1):] + slope_coef[i] * h * s

    The fit is done on a unit grid; the result is h-independent.  Rows
    of ``coef`` sum to one, so callers evaluate the fit on differences
    ``u - u[-1]`` and constant data gives exactly constant ghosts.
    """
    q = order + 1
    g = ghost_count(order)
    deg = q
    x = np.arange(-q + 1, 1, dtype=float)
    rows = [x**p for p in range(deg + 1)]
    mat = np.zeros((q + 1, deg + 1))
    mat[:q] = np.array(rows).T
    mat[q, 1] = 1.0
    inv = np.linalg.inv(mat)
    xg = np.arange(1, g + 1, dtype=float)
    evalm = np.array([xg**p for p in range(deg + 1)]).T
    full = evalm @ inv
    return full[:, :q].copy(), full[:, q].copy()


@lru_cache(maxsize=None)
def gregory_end_weights(npts: int = 6) -> np.ndarray:
    """End corrections for the trapezoid rule (Gregory type).

    Returns multipliers ``a_0..a_{npts-1}`` so that
    ``h * (a_0 f_0 + ... + a_{p-1} f_{p-1} + f_p + ... )`` (mirrored at
    the other end) integrates polynomials of degree < npts exactly.
    """
    # Mirrored unknowns make each single-N system rank deficient; stacking
    # several N pins down the N-independent (local) correction.
    rows, rhs = [], []
    for big in (3 * npts, 3 * npts + 1, 3 * npts + 2):
        x = np.arange(big + 1, dtype=float) / big
        for d in range(npts):
            vals = x**d
            rows.append(vals[:npts] + vals[::-1][:npts])
            rhs.append(big / (d + 1) - vals[npts:-npts].sum())
    sol = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0]
    return sol


def quadrature_weights(npoints: int, h: float, end_points: int = 6) -> np.ndarray:
    """Weights on ``npoints`` uniform nodes spaced ``h`` (closed interval)."""
    if npoints < 2 * end_points + 1:
        raise ValueError("too few nodes for the end-corrected rule")
    w = np.ones(npoints)
    a = gregory_end_weights(end_points)
    w[:end_points] = a
    w[-end_points:] = a[::-1]
    return h * w


def extend_axis(u: np.ndarray, slope, h: float, order: int = FD_ORDER) -> np.ndarray:
    """Pad the polar axis (axis 0) of ``u`` with ghost rows.

    Left: even reflection about the pole.  Right: Neumann closure with
    the given end slope (scalar or one value per column).
    """
    g = ghost_count(order)
    coef, scoef = neumann_ghost_coefficients(order)
    q = coef.shape[1]
    left = u[1 : g + 1][::-1]
    end = u[-1]
    tail = u[-q:] - end
    slope = np.broadcast_to(np.asarray(slope, dtype=float), u.shape[1:])
    right = end + np.tensordot(coef, tail, axes=(1, 0)) + np.multiply.outer(scoef, h * slope)
    return np.concatenate([left, u, right.reshape((g,) + u.shape[1:])], axis=0)


def diff_extended(ue: np.ndarray, h: float, deriv: int, order: int = FD_ORDER) -> np.ndarray:
    """Centred derivative along axis 0 of an array padded by ``extend_axis``."""
    g = ghost_count(order)
    offs, w = central_weights(order, deriv)
    npts = ue.shape[0] - 2 * g
    out = np.zeros((npts,) + ue.shape[1:])
    for o, wt in zip(offs, w):
        if wt != 0.0:
            out += wt * ue[g + o : g + o + npts]
    return out / h**deriv


def spectral_periodic_derivative(u: np.ndarray, deriv: int, axis: int = -1) -> np.ndarray:
    """Fourier derivative on a uniform periodic grid of period ``2 pi``."""
    npts = u.shape[axis]
    k = np.fft.rfftfreq(npts, d=1.0 / npts)
    uh = np.fft.rfft(u, axis=axis)
    mult = (1j * k) ** deriv
    if npts % 2 == 0 and deriv % 2 == 1:
        mult[-1] = 0.0
    shape = [1] * u.ndim
    shape[axis] = len(k)
    return np.fft.irfft(uh * mult.reshape(shape), n=npts, axis=axis)
