"""Finite-difference spectra of ``-(p u')' = lam w u`` on an interval.

Robin conditions use the inward normal: ``u'(0) + s0 u(0) = 0`` and
``-u'(l) + s1 u(l) = 0``; ``s = 0`` is Neumann.  The scheme is the symmetric
three-point stencil with half-weight boundary nodes (lumped linear elements), which
is second order for all three conditions.  The lowest eigenvalues come from LAPACK's
bisection routine for symmetric tridiagonal matrices.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .spectra import SpectralResolution

WeightFn = Optional[Callable[[np.ndarray], np.ndarray]]


def _eval(fn: WeightFn, x: np.ndarray) -> np.ndarray:
    if fn is None:
        return np.ones_like(x)
    out = np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape)
    if np.any(out <= 0):
        raise ValueError("Sturm-Liouville weights must be positive")
    return out


def sturm_liouville_fd(length: float, bc: str, n: int, k: int, p: WeightFn = None,
                       w: WeightFn = None,
                       s: Union[float, Sequence[float]] = 0.0) -> SpectralResolution:
    """Lowest ``k`` eigenvalues on a uniform mesh of ``n`` cells.

    ``bc`` is ``"dirichlet"``, ``"neumann"`` or ``"robin"`` (with ``s`` a scalar or a
    pair for the two endpoints).
    """
    bc = bc.lower()
    if bc not in ("dirichlet", "neumann", "robin"):
        raise ValueError(f"unknown boundary condition {bc!r}")
    if length <= 0 or n < 4:
        raise ValueError("need a positive length and at least 4 cells")
    h = length / n
    nodes = np.linspace(0.0, length, n + 1)
    p_mid = _eval(p, nodes[:-1] + 0.5 * h)
    w_node = _eval(w, nodes)

    diag = np.zeros(n + 1)
    diag[:-1] += p_mid / h
    diag[1:] += p_mid / h
    off = -p_mid / h
    mass = h * w_node
    mass[[0, -1]] *= 0.5
    if bc == "dirichlet":
        diag, off, mass = diag[1:-1], off[1:-1], mass[1:-1]
        s0 = s1 = 0.0
    else:
        s0, s1 = (0.0, 0.0) if bc == "neumann" else np.broadcast_to(np.asarray(s, float), (2,))
        diag[0] -= s0 * _eval(p, nodes[:1])[0]
        diag[-1] -= s1 * _eval(p, nodes[-1:])[0]
    k = min(k, diag.size)
    scale = 1.0 / np.sqrt(mass)
    d = diag * scale ** 2
    e = off * scale[:-1] * scale[1:]
    try:
        lam = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, k - 1),
                               lapack_driver="stebz")
    except (LinAlgError, ValueError) as exc:
        raise ArithmeticError(f"tridiagonal eigensolver failed: {exc}") from exc
    label = bc if bc != "robin" else f"robin(s={float(s0):g},{float(s1):g})"
    # 2 boundary points in one dimension
    return SpectralResolution(lam, np.ones(lam.size, dtype=np.int64), "discrete", 1, length, 2.0,
                              label, mesh=h)


def richardson(coarse: SpectralResolution, fine: SpectralResolution) -> SpectralResolution:
    """Combine second-order spectra on meshes ``h`` and ``h/2`` into a fourth-order one."""
    k = min(coarse.count, fine.count)
    if coarse.mesh is None or fine.mesh is None or not math.isclose(coarse.mesh, 2 * fine.mesh):
        raise ValueError("Richardson extrapolation needs meshes h and h/2")
    lam = (4 * fine.expanded()[:k] - coarse.expanded()[:k]) / 3
    return SpectralResolution(lam, np.ones(k, dtype=np.int64), "discrete", fine.m, fine.volume,
                              fine.boundary_volume, fine.bc, mesh=fine.mesh)


def convergence_orders(spectra: Sequence[SpectralResolution], exact: Sequence[float]) -> np.ndarray:
    """Empirical orders ``log2(err_h / err_{h/2})`` per mode for successive mesh halvings."""
    exact = np.asarray(exact, dtype=float)
    errs = np.array([np.abs(s.expanded()[: exact.size] - exact) for s in spectra])
    return np.log2(errs[:-1] / errs[1:])
