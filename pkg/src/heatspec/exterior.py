"""Pointwise exterior algebra on a real inner-product space with a complex structure.

Forms are stored sparsely: a map from strictly increasing index tuples to complex
coefficients.  Indices are 0-based and, for complex manifolds, the coordinate order
is ``(x1, y1, x2, y2, ..., xm, ym)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

# Coefficients below this magnitude are dropped when forms are built from arithmetic.
_DROP = 0.0


class FormError(ValueError):
    """Invalid arguments to an exterior-algebra operation."""


def _sort_sign(indices: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``indices``, and the sorted tuple.

    Returns sign 0 if an index repeats.
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


@dataclass(frozen=True, eq=False)
class AlternatingForm:
    """A complex alternating ``degree``-form in ``dimension`` real variables."""

    dimension: int
    degree: int
    coefficients: Mapping[tuple[int, ...], complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise FormError("dimension must be positive")
        if self.degree < 0:
            raise FormError("degree must be non-negative")
        clean: dict[tuple[int, ...], complex] = {}
        if self.degree <= self.dimension:
            for key, val in self.coefficients.items():
                key = tuple(int(k) for k in key)
                if len(key) != self.degree:
                    raise FormError(f"index tuple {key} does not have length {self.degree}")
                if any(k < 0 or k >= self.dimension for k in key):
                    raise FormError(f"index tuple {key} out of range")
                if any(a >= b for a, b in zip(key, key[1:])):
                    raise FormError(f"index tuple {key} is not strictly increasing")
                val = complex(val)
                if abs(val) > _DROP:
                    clean[key] = val
        object.__setattr__(self, "coefficients", clean)

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, dimension: int, degree: int) -> "AlternatingForm":
        return cls(dimension, degree, {})

    @classmethod
    def scalar(cls, dimension: int, value: complex = 1.0) -> "AlternatingForm":
        return cls(dimension, 0, {(): value})

    @classmethod
    def basis(cls, dimension: int, *indices: int, coefficient: complex = 1.0) -> "AlternatingForm":
        """``coefficient * e^{i1} ^ e^{i2} ^ ...`` for indices in any order."""
        sign, key = _sort_sign(indices)
        if sign == 0:
            return cls.zero(dimension, len(indices))
        return cls(dimension, len(indices), {key: sign * coefficient})

    @classmethod
    def from_vector(cls, dimension: int, degree: int, vector) -> "AlternatingForm":
        keys = basis_keys(dimension, degree)
        return cls(dimension, degree, dict(zip(keys, np.asarray(vector, dtype=complex))))

    def to_vector(self) -> np.ndarray:
        keys = basis_keys(self.dimension, self.degree)
        return np.array([self.coefficients.get(k, 0.0) for k in keys], dtype=complex)

    # arithmetic ---------------------------------------------------------

    def _check_same(self, other: "AlternatingForm"):
        if not isinstance(other, AlternatingForm):
            raise FormError("expected an AlternatingForm")
        if other.dimension != self.dimension or other.degree != self.degree:
            raise FormError("forms must share dimension and degree")

    def __add__(self, other: "AlternatingForm") -> "AlternatingForm":
        self._check_same(other)
        out = dict(self.coefficients)
        for k, v in other.coefficients.items():
            out[k] = out.get(k, 0.0) + v
        return AlternatingForm(self.dimension, self.degree, out)

    def __sub__(self, other: "AlternatingForm") -> "AlternatingForm":
        return self + (-1.0) * other

    def __neg__(self) -> "AlternatingForm":
        return (-1.0) * self

    def __mul__(self, scalar: complex) -> "AlternatingForm":
        scalar = complex(scalar)
        return AlternatingForm(
            self.dimension, self.degree, {k: scalar * v for k, v in self.coefficients.items()}
        )

    __rmul__ = __mul__

    def __xor__(self, other: "AlternatingForm") -> "AlternatingForm":
        return wedge(self, other)

    def conj(self) -> "AlternatingForm":
        return AlternatingForm(
            self.dimension, self.degree, {k: v.conjugate() for k, v in self.coefficients.items()}
        )

    def __getitem__(self, key) -> complex:
        return self.coefficients.get(tuple(key), 0.0)

    def is_zero(self, atol: float = 0.0) -> bool:
        return all(abs(v) <= atol for v in self.coefficients.values())

    def allclose(self, other: "AlternatingForm", atol: float = 1e-12) -> bool:
        self._check_same(other)
        return (self - other).is_zero(atol)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coefficients.values()), default=0.0)

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {v:.6g}" for k, v in sorted(self.coefficients.items()))
        return f"AlternatingForm(dim={self.dimension}, deg={self.degree}, {{{terms}}})"


@lru_cache(maxsize=None)
def basis_keys(dimension: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Increasing index tuples spanning degree-``degree`` forms, in lexicographic order."""
    if degree > dimension:
        return ()
    return tuple(itertools.combinations(range(dimension), degree))


def wedge(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    """Exterior product ``a ^ b``."""
    if a.dimension != b.dimension:
        raise FormError("wedge of forms of different dimension")
    degree = a.degree + b.degree
    out: dict[tuple[int, ...], complex] = {}
    if degree <= a.dimension:
        for ka, va in a.coefficients.items():
            for kb, vb in b.coefficients.items():
                sign, key = _sort_sign(ka + kb)
                if sign:
                    out[key] = out.get(key, 0.0) + sign * va * vb
    return AlternatingForm(a.dimension, degree, out)


def wedge_power(a: AlternatingForm, k: int) -> AlternatingForm:
    """``a ^ a ^ ... ^ a`` (k factors); ``k = 0`` gives the constant 1."""
    out = AlternatingForm.scalar(a.dimension)
    for _ in range(k):
        out = wedge(out, a)
    return out


@dataclass(frozen=True, eq=False)
class PointMetric:
    """Riemannian metric at a point, as a symmetric positive-definite matrix."""

    components: np.ndarray

    def __post_init__(self):
        g = np.array(self.components, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise FormError("metric must be a square matrix")
        if not np.allclose(g, g.T, rtol=0, atol=1e-13 * max(1.0, np.abs(g).max())):
            raise FormError("metric is not symmetric")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise FormError("metric is not positive definite")
        g.setflags(write=False)
        object.__setattr__(self, "components", g)
        inv = np.linalg.inv(g)
        inv.setflags(write=False)
        object.__setattr__(self, "inverse", inv)
        object.__setattr__(self, "sqrt_det", float(np.sqrt(np.linalg.det(g))))

    @property
    def dimension(self) -> int:
        return self.components.shape[0]

    @classmethod
    def identity(cls, dimension: int) -> "PointMetric":
        return cls(np.eye(dimension))

    @classmethod
    def diagonal(cls, entries) -> "PointMetric":
        return cls(np.diag(np.asarray(entries, dtype=float)))


def _minor_det(inv: np.ndarray, rows: tuple[int, ...], cols: tuple[int, ...]) -> float:
    if not rows:
        return 1.0
    return float(np.linalg.det(inv[np.ix_(rows, cols)]))


@lru_cache(maxsize=64)
def _gram_cached(inv_bytes: bytes, dimension: int, degree: int) -> np.ndarray:
    inv = np.frombuffer(inv_bytes, dtype=float).reshape(dimension, dimension)
    keys = basis_keys(dimension, degree)
    gram = np.empty((len(keys), len(keys)))
    for i, ki in enumerate(keys):
        for j, kj in enumerate(keys):
            gram[i, j] = _minor_det(inv, ki, kj)
    return gram


def form_gram(g: PointMetric, degree: int) -> np.ndarray:
    """Matrix of inner products between basis ``degree``-forms induced by ``g``."""
    return _gram_cached(np.ascontiguousarray(g.inverse).tobytes(), g.dimension, degree)


def form_inner(a: AlternatingForm, b: AlternatingForm, g: PointMetric) -> complex:
    """Hermitian inner product, linear in ``a`` and conjugate-linear in ``b``."""
    if a.dimension != b.dimension or a.dimension != g.dimension:
        raise FormError("dimension mismatch in form_inner")
    if a.degree != b.degree:
        raise FormError("form_inner needs forms of equal degree")
    if a.degree > a.dimension:
        return 0.0j
    gram = form_gram(g, a.degree)
    return complex(a.to_vector() @ gram @ b.to_vector().conj())


def form_norm2(a: AlternatingForm, g: PointMetric) -> float:
    return form_inner(a, a, g).real


def volume_form(g: PointMetric, orientation: int = 1) -> AlternatingForm:
    n = g.dimension
    return AlternatingForm(n, n, {tuple(range(n)): orientation * g.sqrt_det})


def hodge_star(a: AlternatingForm, g: PointMetric, orientation: int = 1) -> AlternatingForm:
    """Complex-linear Hodge star fixed by ``a ^ *conj(b) = <a, b> vol``.

    The coordinate order is positively oriented when ``orientation`` is +1.
    """
    if orientation not in (1, -1):
        raise FormError("orientation must be +1 or -1")
    n = g.dimension
    if a.dimension != n:
        raise FormError("dimension mismatch in hodge_star")
    k = a.degree
    if k > n:
        return AlternatingForm.zero(n, 0)
    keys = basis_keys(n, k)
    raised = form_gram(g, k) @ a.to_vector()
    out: dict[tuple[int, ...], complex] = {}
    full = set(range(n))
    for key, val in zip(keys, raised):
        if val == 0:
            continue
        comp = tuple(sorted(full.difference(key)))
        sign, _ = _sort_sign(key + comp)
        out[comp] = orientation * sign * g.sqrt_det * val
    return AlternatingForm(n, n - k, out)


@dataclass(frozen=True, eq=False)
class ComplexStructure:
    """Constant complex structure ``J``; column ``j`` holds ``J e_j``."""

    matrix: np.ndarray

    def __post_init__(self):
        J = np.array(self.matrix, dtype=float)
        n = J.shape[0]
        if J.shape != (n, n) or n % 2:
            raise FormError("complex structure must be an even-dimensional square matrix")
        if not np.allclose(J @ J, -np.eye(n), rtol=0, atol=1e-12):
            raise FormError("J o J != -1")
        J.setflags(write=False)
        object.__setattr__(self, "matrix", J)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def standard(cls, m_hat: int) -> "ComplexStructure":
        """``J d/dx_a = d/dy_a``, so that ``dz_a = dx_a + i dy_a`` has type (1,0)."""
        J = np.zeros((2 * m_hat, 2 * m_hat))
        for a in range(m_hat):
            J[2 * a + 1, 2 * a] = 1.0
            J[2 * a, 2 * a + 1] = -1.0
        return cls(J)

    def is_unitary(self, g: PointMetric, atol: float = 1e-12) -> bool:
        G = g.components
        return bool(np.allclose(self.matrix.T @ G @ self.matrix, G, rtol=0, atol=atol))


def _one_form_projectors(J: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # row-vector action on 1-form coefficients: (J* theta)_j = theta(J e_j)
    n = J.shape[0]
    eye = np.eye(n)
    p10 = 0.5 * (eye - 1j * J)
    p01 = 0.5 * (eye + 1j * J)
    return p10, p01


@lru_cache(maxsize=128)
def _projection_matrix(j_bytes: bytes, n: int, degree: int, p: int) -> np.ndarray:
    J = np.frombuffer(j_bytes, dtype=float).reshape(n, n)
    p10, p01 = _one_form_projectors(J)
    keys = basis_keys(n, degree)
    index = {k: i for i, k in enumerate(keys)}
    one_forms = [
        [AlternatingForm.from_vector(n, 1, proj[i]) for i in range(n)] for proj in (p10, p01)
    ]
    mat = np.zeros((len(keys), len(keys)), dtype=complex)
    for col, key in enumerate(keys):
        total: dict[tuple[int, ...], complex] = {}
        for holo in itertools.combinations(range(degree), p):
            prod = AlternatingForm.scalar(n)
            for slot, idx in enumerate(key):
                prod = wedge(prod, one_forms[0 if slot in holo else 1][idx])
            for k, v in prod.coefficients.items():
                total[k] = total.get(k, 0.0) + v
        for k, v in total.items():
            mat[index[k], col] = v
    mat.setflags(write=False)
    return mat


def pq_project(a: AlternatingForm, J: ComplexStructure, p: int, q: int) -> AlternatingForm:
    """Component of ``a`` of type ``(p, q)`` with respect to ``J``."""
    if p < 0 or q < 0 or p + q != a.degree:
        raise FormError(f"type ({p},{q}) does not match degree {a.degree}")
    if a.dimension != J.dimension:
        raise FormError("dimension mismatch in pq_project")
    if a.degree > a.dimension:
        return a
    mat = _projection_matrix(np.ascontiguousarray(J.matrix).tobytes(), a.dimension, a.degree, p)
    return AlternatingForm.from_vector(a.dimension, a.degree, mat @ a.to_vector())


def kaehler_form(g: PointMetric, J: ComplexStructure) -> AlternatingForm:
    """Fundamental 2-form ``(X, Y) -> g(JX, Y)``.

    With the standard structure this is ``sum_a g_aa dx_a ^ dy_a`` for diagonal ``g``.
    """
    mat = J.matrix.T @ g.components
    n = g.dimension
    return AlternatingForm(n, 2, {(i, j): mat[i, j] for i, j in basis_keys(n, 2)})
