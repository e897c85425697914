"""Discrete Δ₀ and □₀ on the Hermitian 6-torus.

Grid axes are ordered ``(x1, y1, x2, y2, x3, y3)`` with ``N`` points of spacing
``h = 2 pi / N`` each.  The metric coefficients depend on ``(x1, y1)`` only, so a grid
function ``f(x1, y1) exp(i k . x')`` with ``k`` an integer 4-vector on the flat
directions ``x' = (x2, y2, x3, y3)`` is mapped to another function of the same form.
:meth:`GridOperator.apply_mode` exploits this and only touches an ``N x N`` array,
which is what makes ``N = 32`` (a billion grid points) cheap.  :meth:`GridOperator.apply`
is the plain matrix-free 6D action, kept for small ``N`` and for cross-checking.

Δ₀ is the staggered divergence form ``-(1/√g) D⁻(√g g^{ii} D⁺ u)``.  □₀ is ``∂̄*∂̄``
with centered differences ``∂̄_α = ½(D_x + i D_y)`` and the adjoint taken in the
weighted inner product ``Σ (2/h_α) ω_α conj(η_α) √g``; the factor 2 is ``|dz̄|²`` in the
real metric, so that ``2 □₀ = Δ₀`` for the flat torus in the continuum.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..geometry import HermitianTorusMetric

KINDS = ("delta0", "box0")


def _fwd(f, axis, h):
    return (np.roll(f, -1, axis) - f) / h


def _bwd(f, axis, h):
    return (f - np.roll(f, 1, axis)) / h


def _ctr(f, axis, h):
    return (np.roll(f, -1, axis) - np.roll(f, 1, axis)) / (2 * h)


@dataclass(frozen=True, eq=False)
class GridOperator:
    """Matrix-free operator on the periodic ``N^6`` lattice.

    Self-adjoint for :meth:`inner`, the ``√g``-weighted discrete L² product.
    ``scale`` multiplies the whole operator (``scale=2`` gives ``2 □₀``).
    """

    kind: str
    metric: HermitianTorusMetric
    N: int
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.N < 8:
            raise ValueError("need N >= 8 points per axis")
        n = self.N
        x = self.h * np.arange(n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        _, h2, h3 = self.metric.block_scales(X, Y)
        sg = self.metric.sqrt_det(X, Y)
        half = 0.5 * self.h
        cache = {"h_blocks": (np.ones_like(X), np.asarray(h2, float), np.asarray(h3, float)),
                 "sqrt_g": np.asarray(sg, float),
                 # √g g^{ii} at the staggered points; g^{ii} = 1 on the z1 block
                 "a_x": np.asarray(self.metric.sqrt_det(X + half, Y), float),
                 "a_y": np.asarray(self.metric.sqrt_det(X, Y + half), float)}
        object.__setattr__(self, "_c", cache)

    @property
    def h(self) -> float:
        return 2 * math.pi / self.N

    @property
    def sqrt_g(self) -> np.ndarray:
        """``√g`` on the ``(x1, y1)`` grid."""
        return self._c["sqrt_g"]

    def scaled(self, factor: float) -> "GridOperator":
        return GridOperator(self.kind, self.metric, self.N, self.scale * factor)

    def at(self, N: int) -> "GridOperator":
        """The same operator on another mesh."""
        return GridOperator(self.kind, self.metric, N, self.scale)

    # z1 block ------------------------------------------------------------------

    def _apply_z1(self, f, axes=(0, 1), expand=lambda a: a):
        h = self.h
        sg = expand(self.sqrt_g)
        if self.kind == "delta0":
            out = (_bwd(expand(self._c["a_x"]) * _fwd(f, axes[0], h), axes[0], h)
                   + _bwd(expand(self._c["a_y"]) * _fwd(f, axes[1], h), axes[1], h))
            return -out / sg
        dbar = 0.5 * (_ctr(f, axes[0], h) + 1j * _ctr(f, axes[1], h))
        w = 2 * sg * dbar
        return -0.5 * (_ctr(w, axes[0], h) - 1j * _ctr(w, axes[1], h)) / sg

    # flat directions -------------------------------------------------------------

    def flat_symbol(self, k: Sequence[int]) -> np.ndarray:
        """Multiplier on ``f`` produced by the flat directions for the mode ``k``."""
        k = np.asarray(k, dtype=float)
        if k.shape != (4,):
            raise ValueError("flat mode must have 4 integer components")
        h = self.h
        if self.kind == "delta0":
            per_axis = (2 - 2 * np.cos(k * h)) / h ** 2
            weights = [1.0, 1.0]
        else:
            per_axis = (np.sin(k * h) / h) ** 2
            weights = [0.5, 0.5]
        _, h2, h3 = self._c["h_blocks"]
        return (weights[0] * (per_axis[0] + per_axis[1]) / h2
                + weights[1] * (per_axis[2] + per_axis[3]) / h3)

    # public actions ----------------------------------------------------------------

    def apply_mode(self, f: np.ndarray, k: Sequence[int] = (0, 0, 0, 0)) -> np.ndarray:
        """Action on ``f(x1, y1) exp(i k . x')``; returns the new ``(x1, y1)`` factor."""
        f = np.asarray(f)
        if f.shape != (self.N, self.N):
            raise ValueError(f"expected an {self.N}x{self.N} array")
        return self.scale * (self._apply_z1(f) + self.flat_symbol(k) * f)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Full 6D action (memory ``N^6``; meant for ``N <= 12``)."""
        u = np.asarray(u)
        if u.shape != (self.N,) * 6:
            raise ValueError(f"expected a grid function of shape {(self.N,) * 6}")
        expand = lambda a: a.reshape(self.N, self.N, 1, 1, 1, 1)
        out = self._apply_z1(u, (0, 1), expand)
        h = self.h
        _, h2, h3 = self._c["h_blocks"]
        for block, hb in ((1, h2), (2, h3)):
            ax, ay = 2 * block, 2 * block + 1
            inv = expand(1.0 / hb)
            if self.kind == "delta0":
                out = out - inv * (_bwd(_fwd(u, ax, h), ax, h) + _bwd(_fwd(u, ay, h), ay, h))
            else:
                dbar = 0.5 * (_ctr(u, ax, h) + 1j * _ctr(u, ay, h))
                out = out - 2 * inv * 0.5 * (_ctr(dbar, ax, h) - 1j * _ctr(dbar, ay, h))
        return self.scale * out

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        """``Σ u conj(v) √g h^6`` on full 6D grid functions."""
        w = self.sqrt_g.reshape(self.N, self.N, 1, 1, 1, 1)
        return complex(np.sum(u * np.conj(v) * w) * self.h ** 6)

    def inner_mode(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Inner product of two functions carrying the same flat mode."""
        return complex(np.sum(f * np.conj(g) * self.sqrt_g) * self.h ** 2 * (2 * math.pi) ** 4)

    def norm_mode(self, f: np.ndarray) -> float:
        return math.sqrt(max(self.inner_mode(f, f).real, 0.0))


def hermitian_torus_delta0(metric: HermitianTorusMetric, N: int) -> GridOperator:
    return GridOperator("delta0", metric, N)


def hermitian_torus_box0(metric: HermitianTorusMetric, N: int) -> GridOperator:
    return GridOperator("box0", metric, N)


# comparison harness ----------------------------------------------------------------


@dataclass(frozen=True)
class TrigTestFunction:
    """``Σ_{|j|,|l| <= 1} c_{jl} exp(i(j x1 + l y1))`` times ``exp(i k . x')``."""

    coefficients: np.ndarray  # 3x3 complex, index (j+1, l+1)
    k: tuple

    @classmethod
    def random(cls, rng: np.random.Generator, flat: bool = True) -> "TrigTestFunction":
        c = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        k = tuple(int(v) for v in rng.integers(-1, 2, size=4)) if flat else (0, 0, 0, 0)
        return cls(c, k)

    def factor(self, N: int) -> np.ndarray:
        x = 2 * math.pi * np.arange(N) / N
        e = np.exp(1j * np.outer(np.arange(-1, 2), x))  # (3, N)
        return np.einsum("jl,jx,ly->xy", self.coefficients, e, e)

    def full(self, N: int) -> np.ndarray:
        x = 2 * math.pi * np.arange(N) / N
        flat = [np.exp(1j * kk * x) for kk in self.k]
        out = self.factor(N).reshape(N, N, 1, 1, 1, 1)
        for axis, vec in enumerate(flat):
            shape = [1] * 6
            shape[axis + 2] = N
            out = out * vec.reshape(shape)
        return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HEATSPEC_THREADS", "1")))
    except ValueError:
        return 1


def _rel_diff(A: GridOperator, B: GridOperator, tests) -> float:
    def one(tf):
        f = tf.factor(A.N)
        au = A.apply_mode(f, tf.k)
        bu = B.apply_mode(f, tf.k)
        denom = A.norm_mode(au)
        return A.norm_mode(au - bu) / denom if denom > 0 else 0.0

    workers = _threads()
    if workers == 1:
        return max(map(one, tests))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return max(pool.map(one, tests))


def operator_compare(A: GridOperator, B: GridOperator, trials: int = 8, seed: int = 0,
                     refine: bool = True) -> dict:
    """Largest ``‖(A−B)u‖/‖Au‖`` over seeded random trigonometric test functions.

    The first trial has no flat-direction dependence.  With ``refine`` the same test
    functions are reused on the mesh ``2N``, and ``per_mesh`` lists ``(N, rel_diff)``.
    """
    same_metric = (A.metric.psi.text, A.metric.variant) == (B.metric.psi.text, B.metric.variant)
    if A.N != B.N or not same_metric:
        raise ValueError("operators must live on the same grid and metric")
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    tests = [TrigTestFunction.random(rng, flat=i > 0) for i in range(trials)]
    meshes = [A.N, 2 * A.N] if refine else [A.N]
    per_mesh = [(n, _rel_diff(A.at(n), B.at(n), tests)) for n in meshes]
    out = {"rel_diff": per_mesh[0][1], "per_mesh": per_mesh}
    if refine:
        r0, r1 = per_mesh[0][1], per_mesh[1][1]
        out["ratio"] = r1 / r0 if r0 > 0 else 0.0
    return out
