"""Elementary symmetric functions of principal curvatures.

Every function accepts ``lam`` as an array whose last axis holds the
``n`` entries of a curvature vector, so a whole grid of curvature
vectors can be evaluated at once.  Scalars come back for 1-d input.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ConeViolation, DomainError

__all__ = [
    "CurvatureQuotient",
    "sigma_all",
    "sigma_k",
    "h_k",
    "h_all",
    "sigma_k_minor",
    "minors_all",
    "gamma_k_contains",
    "quotient_eval",
    "newton_maclaurin_gap",
]


def _as_lambda(lam) -> np.ndarray:
    arr = np.asarray(lam, dtype=float)
    if arr.ndim == 0:
        arr = arr[None]
    if arr.shape[-1] < 1:
        raise DomainError("curvature vector must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise DomainError("curvature vector has non-finite entries")
    return arr


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def sigma_all(lam) -> np.ndarray:
    """Return ``[sigma_0, ..., sigma_n]`` along a new last axis.

    Uses the incremental expansion of ``prod_i (1 + lambda_i t)``, which
    costs O(n^2) and avoids the subset sums entirely.  Entries are
    sorted first so the result is bitwise invariant under permutation.
    """
    lam = np.sort(_as_lambda(lam), axis=-1)
    n = lam.shape[-1]
    out = np.zeros(lam.shape[:-1] + (n + 1,))
    out[..., 0] = 1.0
    for i in range(n):
        li = lam[..., i]
        for j in range(i + 1, 0, -1):
            out[..., j] += li * out[..., j - 1]
    return out


def sigma_k(lam, k: int):
    """k-th elementary symmetric polynomial; 1 for k = 0, 0 for k > n."""
    if k < 0:
        raise DomainError(f"sigma_k needs k >= 0, got {k}")
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if k > n:
        return _scalar(np.zeros(lam.shape[:-1]))
    return _scalar(sigma_all(lam)[..., k])


def h_all(lam) -> np.ndarray:
    """Normalized ``H_k = sigma_k / C(n, k)`` for k = 0..n."""
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    binoms = np.array([comb(n, k) for k in range(n + 1)], dtype=float)
    return sigma_all(lam) / binoms


def h_k(lam, k: int):
    if k < 0:
        raise DomainError(f"H_k needs k >= 0, got {k}")
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if k > n:
        return _scalar(np.zeros(lam.shape[:-1]))
    return _scalar(h_all(lam)[..., k])


def minors_all(lam) -> np.ndarray:
    """``sigma_k(lam | i)`` for every i and k = 0..n.

    Shape ``lam.shape + (n + 1,)``; the entry ``[..., i, k]`` is the
    k-th symmetric function of ``lam`` with entry i set to zero.
    """
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    out = np.empty(lam.shape + (n + 1,))
    for i in range(n):
        reduced = lam.copy()
        reduced[..., i] = 0.0
        out[..., i, :] = sigma_all(reduced)
    return out


def sigma_k_minor(lam, k: int, i: int):
    """``sigma_k`` of ``lam`` with entry ``i`` set to zero."""
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if not -n <= i < n:
        raise IndexError(f"index {i} out of range for n = {n}")
    if k < 0:
        raise DomainError(f"sigma_k needs k >= 0, got {k}")
    if k > n:
        return _scalar(np.zeros(lam.shape[:-1]))
    reduced = lam.copy()
    reduced[..., i] = 0.0
    return _scalar(sigma_all(reduced)[..., k])


def gamma_k_contains(lam, k: int):
    """True where ``sigma_1, ..., sigma_k`` are all strictly positive."""
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"cone index must lie in [1, {n}], got {k}")
    s = sigma_all(lam)[..., 1 : k + 1]
    res = np.all(s > 0.0, axis=-1)
    return bool(res) if res.ndim == 0 else res


@dataclass(frozen=True)
class CurvatureQuotient:
    """Value and diagonal gradient of ``F = H_k / H_l``."""

    k: int
    l: int
    value: float | np.ndarray
    gradient: np.ndarray

    @property
    def trace(self):
        """Sum of the gradient entries (the trace of dF/dh)."""
        return self.gradient.sum(axis=-1)


def quotient_eval(lam, k: int, l: int) -> CurvatureQuotient:
    """Evaluate ``H_k / H_l`` and its gradient with respect to ``lam``.

    Uses ``d sigma_m / d lambda_i = sigma_{m-1}(lam | i)`` and the
    quotient rule; no finite differences.

    Raises
    ------
    ConeViolation
        If some curvature vector is outside ``Gamma_k``.
    DomainError
        If ``H_l <= 0`` or the indices are inconsistent.
    """
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if not 0 <= l < k <= n:
        raise DomainError(f"need 0 <= l < k <= n, got k={k}, l={l}, n={n}")
    if not np.all(gamma_k_contains(lam, k)):
        raise ConeViolation(f"curvature vector outside Gamma_{k}")
    hs = h_all(lam)
    hk, hl = hs[..., k], hs[..., l]
    if np.any(hl <= 0.0):
        raise DomainError(f"H_{l} <= 0, quotient undefined")
    mins = minors_all(lam)
    dhk = mins[..., k - 1] / comb(n, k)
    dhl = mins[..., l - 1] / comb(n, l) if l > 0 else np.zeros_like(dhk)
    grad = (dhk * hl[..., None] - hk[..., None] * dhl) / (hl**2)[..., None]
    return CurvatureQuotient(k=k, l=l, value=_scalar(hk / hl), gradient=grad)


def newton_maclaurin_gap(lam, k: int, l: int, r: int, s: int):
    """``(H_r/H_s)^(1/(r-s)) - (H_k/H_l)^(1/(k-l))``, non-negative on Gamma_k."""
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if not (n >= k > l >= 0 and r > s >= 0 and k >= r and l >= s):
        raise DomainError(f"invalid index set (k,l,r,s)=({k},{l},{r},{s})")
    if not np.all(gamma_k_contains(lam, k)):
        raise ConeViolation(f"curvature vector outside Gamma_{k}")
    hs = h_all(lam)
    low = (hs[..., r] / hs[..., s]) ** (1.0 / (r - s))
    high = (hs[..., k] / hs[..., l]) ** (1.0 / (k - l))
    return _scalar(low - high)
