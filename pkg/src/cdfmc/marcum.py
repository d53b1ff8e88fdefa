"""First-order Marcum Q function and Rician amplitude laws.

Q1(a, b) = P(|a + n| > b) for n circular complex Gaussian with unit
per-quadrature variance.  Evaluated from the Bessel series

    Q1(a, b) = exp(-(a-b)^2/2) sum_{k>=0} (a/b)^k Ie_k(ab)             (a < b)
    Q1(a, b) = 1 - exp(-(a-b)^2/2) sum_{k>=1} (b/a)^k Ie_k(ab)         (a >= b)

with Ie_k the exponentially scaled modified Bessel function, so no term
overflows for large arguments.  Outside |a - b| <= BAND the result is 0 or 1
to below 1e-31, since |a + n| lies within a +- |n| and P(|n| > t) = exp(-t^2/2).
"""

from __future__ import annotations

import numpy as np
from scipy import integrate, special

BAND = 12.0
_CHUNK = 1 << 21
_RECURRENCE_MIN_X = 50.0


def _n_terms(x_max: float) -> int:
    # Ie_k(x) / Ie_0(x) ~ exp(-k^2 / 2x); 10 sqrt(x) puts the tail below e^-50
    return int(np.ceil(10.0 * np.sqrt(x_max) + 40.0))


def _series(ratio: np.ndarray, x: np.ndarray, k0: int) -> np.ndarray:
    """sum_{k>=k0} ratio^k Ie_k(x), chunked over points sorted by x."""
    out = np.empty_like(x)
    order = np.argsort(x)
    ratio, x = ratio[order], x[order]
    start = 0
    while start < x.size:
        # x is sorted, so the chunk's last element bounds the term count
        stop = min(start + 4096, x.size)
        n = _n_terms(x[stop - 1])
        if x[start] < _RECURRENCE_MIN_X:
            stop = min(stop, start + max(1, _CHUNK // n), int(np.searchsorted(x, _RECURRENCE_MIN_X)))
            k = np.arange(k0, k0 + n, dtype=float)
            with np.errstate(under="ignore"):
                terms = ratio[start:stop, None] ** k * special.ive(k, x[start:stop, None])
            out[order[start:stop]] = terms.sum(axis=1)
        else:
            out[order[start:stop]] = _series_recurrence(ratio[start:stop], x[start:stop], k0, n)
        start = stop
    return out


def _series_recurrence(ratio: np.ndarray, x: np.ndarray, k0: int, n: int) -> np.ndarray:
    # Miller backward recurrence I_{k-1} = I_{k+1} + (2k/x) I_k, normalized by Ie_0(x)
    inv_x2 = 2.0 / x
    nxt = np.zeros_like(x)
    cur = np.ones_like(x)
    acc = np.zeros_like(x)
    with np.errstate(under="ignore"):
        for k in range(n, 0, -1):
            if k >= k0:
                acc += ratio**k * cur
            nxt, cur = cur, nxt + k * inv_x2 * cur
            if k % 16 == 0:
                big = cur > 1e200
                if np.any(big):
                    cur[big] *= 1e-200
                    nxt[big] *= 1e-200
                    acc[big] *= 1e-200
    if k0 == 0:
        acc += cur
    return acc * (special.ive(0, x) / cur)


def marcum_q1(a, b) -> np.ndarray:
    """Q1(a, b) for nonnegative ``a`` and ``b`` (broadcast), absolute error < 1e-10."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("Marcum Q arguments must be nonnegative")
    q = np.where(b > a, 0.0, 1.0)
    mid = np.abs(a - b) <= BAND
    if not np.any(mid):
        return q
    am, bm = a[mid], b[mid]
    pref = np.exp(-0.5 * (am - bm) ** 2)
    x = am * bm
    qm = np.empty_like(am)
    lower = am < bm
    if np.any(lower):
        qm[lower] = pref[lower] * _series(am[lower] / bm[lower], x[lower], 0)
    upper = ~lower
    if np.any(upper):
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(am[upper] > 0, bm[upper] / am[upper], 0.0)
        qm[upper] = 1.0 - pref[upper] * _series(r, x[upper], 1)
    q[mid] = np.clip(qm, 0.0, 1.0)
    return q


def rice_cdf(z, nu: float, s: float) -> np.ndarray:
    """P(|nu + n| <= z) with per-quadrature noise standard deviation ``s``."""
    z = np.asarray(z, dtype=float)
    if s == 0:
        return (z >= nu).astype(float)
    return 1.0 - marcum_q1(nu / s, np.maximum(z, 0.0) / s)


def rice_pdf(z, nu: float, s: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    with np.errstate(under="ignore"):
        out = z / s**2 * np.exp(-((z - nu) ** 2) / (2 * s**2)) * special.i0e(z * nu / s**2)
    return np.where(z >= 0, out, 0.0)


def rice_mean(nu: float, s: float) -> float:
    """Mean amplitude by adaptive quadrature of the Rician density."""
    if s == 0:
        return float(nu)
    lo = max(0.0, nu - 40.0 * s)
    hi = nu + 40.0 * s
    pts = [nu] if lo < nu < hi else None
    val, _ = integrate.quad(
        lambda z: z * rice_pdf(z, nu, s), lo, hi, points=pts,
        epsabs=1e-14, epsrel=1e-13, limit=200,
    )
    return float(val)
