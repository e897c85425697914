"""Dirichlet spectrum of the unit disk from zeros of Bessel functions J_n.

J_n itself is evaluated by :func:`scipy.special.jv`; the zeros are located here.
For ``n >= 1`` consecutive zeros of J_n are more than pi apart (Sturm comparison for
``sqrt(x) J_n``), so sampling on a grid of step ``0.9 pi`` starting at ``x = n``
(below the first zero) isolates every zero in its own cell.  J_0 zeros are
bracketed by ``((k - 1/2) pi, k pi)``.  Each bracket is refined by vectorized
bisection and polished with Newton steps.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import jv

from .spectra import SpectralResolution


class BesselZeroError(ArithmeticError):
    def __init__(self, n: int, k: int, msg: str = "no sign change in bracket"):
        super().__init__(f"J_{n} zero #{k}: {msg}")
        self.n, self.k = n, k


def _refine(n: int, lo: np.ndarray, hi: np.ndarray, iterations: int = 48) -> np.ndarray:
    flo, fhi = jv(n, lo), jv(n, hi)
    bad = np.nonzero(np.sign(flo) * np.sign(fhi) > 0)[0]
    if bad.size:
        raise BesselZeroError(n, int(bad[0]) + 1)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fmid = jv(n, mid)
        left = np.sign(fmid) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fmid, flo)
        hi = np.where(left, hi, mid)
    x = 0.5 * (lo + hi)
    for _ in range(2):
        deriv = jv(n - 1, x) - n / x * jv(n, x)
        step = jv(n, x) / deriv
        x = np.where(np.abs(step) < (hi - lo) + 1e-12 * x, x - step, x)
    if not np.all(np.isfinite(x)):
        k = int(np.nonzero(~np.isfinite(x))[0][0]) + 1
        raise BesselZeroError(n, k, "Newton polish produced a non-finite value")
    return x


def bessel_zeros(n: int, x_max: float) -> np.ndarray:
    """All positive zeros of J_n not exceeding ``x_max``, increasing."""
    if n < 0:
        raise ValueError("order must be non-negative")
    if n == 0:
        k = np.arange(1, int(x_max / math.pi) + 2)
        lo, hi = (k - 0.5) * math.pi, k * math.pi
    else:
        if x_max <= n:
            return np.zeros(0)
        grid = n + 0.9 * math.pi * np.arange(int((x_max - n) / (0.9 * math.pi)) + 2)
        vals = jv(n, grid)
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
        lo, hi = grid[idx], grid[idx + 1]
    if lo.size == 0:
        return np.zeros(0)
    z = _refine(n, lo.astype(float), hi.astype(float))
    return z[z <= x_max]


def disk_dirichlet_spectrum(count: int, radius: float = 1.0) -> SpectralResolution:
    """The ``count`` lowest Dirichlet eigenvalues ``(j_{n,k} / radius)^2`` of a disk.

    Multiplicity is 1 for ``n = 0`` and 2 otherwise; a degenerate pair straddling the
    cut is truncated, and ``complete_to`` then stops below it.
    """
    if count < 1:
        raise ValueError("count must be positive")
    # Weyl with boundary correction: N(lam) ~ lam/4 - sqrt(lam)/2 for the unit disk
    x_max = 1.0 + math.sqrt(1.0 + 4.0 * 1.02 * count) + 2.0
    while True:
        lam, mult = [], []
        n = 0
        while True:
            z = bessel_zeros(n, x_max)
            if z.size == 0:
                break
            lam.append(z ** 2)
            mult.append(np.full(z.size, 1 if n == 0 else 2))
            n += 1
        lam = np.concatenate(lam)
        mult = np.concatenate(mult)
        if mult.sum() >= count:
            break
        x_max *= 1.1
    order = np.argsort(lam, kind="stable")
    lam, mult = lam[order], mult[order]
    cum = np.cumsum(mult)
    last = int(np.searchsorted(cum, count))
    lam, mult = lam[: last + 1], mult[: last + 1].copy()
    excess = int(cum[last] - count)
    complete_to = float(lam[-1])
    if excess:
        mult[-1] -= excess
        complete_to = float(lam[-2]) if lam.size > 1 else 0.0
    scale = radius ** -2
    return SpectralResolution(lam * scale, mult, "bessel", 2, math.pi * radius ** 2,
                              2 * math.pi * radius, "dirichlet", complete_to=complete_to * scale)
