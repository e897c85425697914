"""Closed-form heat trace coefficients a_0..a_4 and the decision procedures built on them.

Dirichlet and Robin coefficients follow the classical Branson-Gilkey tables.  Rational
constants are carried as :class:`fractions.Fraction` until the final product with the
(irrational) ``(4 pi)^(-k/2)`` prefactor and the quadrature integrals.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction as F
from typing import Optional, Union

import numpy as np

from .geometry import BoundaryField, InteriorField, KTriple, MissingDataError

Number = Union[int, float, F]


class UnsupportedOrderError(ValueError):
    pass


class BCKind(str, enum.Enum):
    DIRICHLET = "dirichlet"
    ROBIN = "robin"


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet, or Robin with the universal endomorphism ``S = (c1 + c2 kappa) I``.

    ``c1 = c2 = 0`` is the Neumann condition.
    """

    kind: BCKind
    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", BCKind(self.kind))
        if self.kind is BCKind.DIRICHLET and (self.c1 or self.c2):
            raise ValueError("Dirichlet conditions carry no S")

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(BCKind.DIRICHLET)

    @classmethod
    def neumann(cls) -> "BoundaryCondition":
        return cls(BCKind.ROBIN)

    @classmethod
    def robin(cls, c1: float, c2: float = 0.0) -> "BoundaryCondition":
        return cls(BCKind.ROBIN, c1, c2)

    @property
    def is_neumann(self) -> bool:
        return self.kind is BCKind.ROBIN and self.c1 == 0 and self.c2 == 0

    @property
    def label(self) -> str:
        if self.kind is BCKind.DIRICHLET:
            return "dirichlet"
        if self.is_neumann:
            return "neumann"
        return f"robin(c1={self.c1:g},c2={self.c2:g})"

    @classmethod
    def parse(cls, text: str, s: float = 0.0, c2: float = 0.0) -> "BoundaryCondition":
        text = text.lower()
        if text == "dirichlet":
            return cls.dirichlet()
        if text == "neumann":
            return cls.neumann()
        if text == "robin":
            return cls.robin(s, c2)
        raise ValueError(f"unknown boundary condition {text!r}")


def _samples(value, n: int) -> Optional[np.ndarray]:
    if value is None:
        return None
    return np.broadcast_to(np.asarray(value, dtype=float), (n,))


@dataclass(frozen=True, eq=False)
class OperatorData:
    """Traces of the endomorphisms of a Laplace-type operator ``-(Tr nabla^2 + E)``.

    Interior samplers align with the interior field cells and boundary samplers with
    the boundary cells; scalars broadcast.  ``None`` marks an unknown sampler, which
    raises :class:`MissingDataError` only if a formula needs it.  ``tr_Omega2`` is
    the trace of the squared curvature of the connection (not the fundamental form).
    ``tr_S*`` samplers describe the Robin endomorphism; ``tr_SE`` defaults to
    ``tr_S * tr_E / tr_I``, exact whenever ``S`` or ``E`` is a multiple of the identity.
    """

    m: int
    tr_I: Number = 1
    tr_E: Optional[object] = 0.0
    tr_E2: Optional[object] = 0.0
    tr_Omega2: Optional[object] = 0.0
    tr_E_lap: Optional[object] = 0.0
    tr_E_bdy: Optional[object] = 0.0
    tr_E_m: Optional[object] = 0.0
    tr_S: Optional[object] = 0.0
    tr_S2: Optional[object] = 0.0
    tr_S3: Optional[object] = 0.0
    tr_SE: Optional[object] = None
    label: str = "scalar Laplacian"

    def __post_init__(self):
        if not self.tr_I > 0:
            raise ValueError("Tr I must be positive")

    @classmethod
    def scalar_laplacian(cls, m: int) -> "OperatorData":
        return cls(m)

    @classmethod
    def form_laplacian(cls, m: int, p: int, interior: InteriorField,
                       boundary: Optional[BoundaryField] = None) -> "OperatorData":
        """Hodge Laplacian on p-forms.

        ``Tr I`` and ``Tr E = -b tau`` (with its derivatives) are known; ``Tr E^2`` and
        ``Tr Omega^2`` need the full curvature and are left unknown unless ``p`` is 0 or m.
        """
        b = weitzenbock_coefficient(m, p)
        has_bdy = boundary is not None and not boundary.is_empty
        if not b:
            e_lap = 0.0
        else:
            e_lap = None if interior.tau_lap is None else -b * interior.tau_lap
        return cls(m, tr_I=math.comb(m, p), tr_E=-b * interior.tau,
                   tr_E2=None if b else 0.0, tr_Omega2=None if 0 < p < m else 0.0,
                   tr_E_lap=e_lap, tr_E_bdy=-b * boundary.tau if has_bdy else 0.0,
                   tr_E_m=-b * boundary.tau_m if has_bdy else 0.0,
                   label=f"Hodge Laplacian on {p}-forms")

    def with_robin(self, boundary: BoundaryField, c1: float, c2: float = 0.0) -> "OperatorData":
        """Copy with ``S = (c1 + c2 kappa) I`` on the boundary."""
        s = c1 + c2 * boundary.kappa
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw.update(tr_S=s * float(self.tr_I), tr_S2=s ** 2 * float(self.tr_I),
                  tr_S3=s ** 3 * float(self.tr_I), tr_SE=None)
        return OperatorData(**kw)

    def interior(self, name: str, field: InteriorField) -> np.ndarray:
        val = _samples(getattr(self, name), field.weights.size)
        if val is None:
            raise MissingDataError(f"operator data has no {name!r} sampler")
        return val

    def boundary(self, name: str, field: BoundaryField) -> np.ndarray:
        n = field.weights.size
        if name == "tr_SE" and self.tr_SE is None:
            return self.boundary("tr_S", field) * self.boundary("tr_E_bdy", field) / float(self.tr_I)
        val = _samples(getattr(self, name), n)
        if val is None:
            raise MissingDataError(f"operator data has no {name!r} sampler")
        return val


@dataclass(frozen=True)
class CoefficientReport:
    n: int
    value: float
    bc: BoundaryCondition
    interior_part: float
    boundary_part: float
    provenance: str = "formula"
    formula_id: str = ""

    def to_json(self) -> dict:
        return {"n": self.n, "bc": self.bc.label, "value": self.value,
                "interior_part": self.interior_part, "boundary_part": self.boundary_part,
                "formula_id": self.formula_id, "provenance": self.provenance}


def _report(n, interior_part, boundary_part, bc, formula_id) -> CoefficientReport:
    interior_part = float(interior_part)
    boundary_part = float(boundary_part)
    return CoefficientReport(n, interior_part + boundary_part, bc, interior_part,
                             boundary_part, "formula", formula_id)


def _pref(m: int, shift: int = 0) -> float:
    """``(4 pi)^(-(m - shift)/2)``."""
    return (4 * math.pi) ** (-(m - shift) / 2)


def _check(n: int, interior: InteriorField, boundary: Optional[BoundaryField], op: OperatorData):
    if not 0 <= n <= 4:
        raise UnsupportedOrderError(f"a_{n} is not implemented (orders 0..4)")
    if op.m != interior.dimension:
        raise ValueError("operator and interior field disagree on the dimension")
    if boundary is None:
        boundary = BoundaryField.empty(interior.dimension)
    if boundary.dimension != interior.dimension:
        raise ValueError("boundary and interior field disagree on the dimension")
    return boundary


def _interior_a2(interior: InteriorField, op: OperatorData) -> float:
    return interior.integrate(6 * op.interior("tr_E", interior) + float(op.tr_I) * interior.tau)


def _interior_a4(interior: InteriorField, op: OperatorData) -> float:
    rho2, r2, tau_lap = interior.require("rho_norm2", "R_norm2", "tau_lap")
    tau = interior.tau
    E = op.interior("tr_E", interior)
    integrand = (60 * op.interior("tr_E_lap", interior) + 60 * tau * E
                 + 180 * op.interior("tr_E2", interior) + 30 * op.interior("tr_Omega2", interior)
                 + float(op.tr_I) * (12 * tau_lap + 5 * tau ** 2 - 2 * rho2 + 2 * r2))
    return interior.integrate(integrand)


def dirichlet_an(n: int, interior: InteriorField, boundary: Optional[BoundaryField],
                 op: OperatorData) -> CoefficientReport:
    """``a_n`` for Dirichlet conditions, ``0 <= n <= 4``."""
    bdy = _check(n, interior, boundary, op)
    m, trI = op.m, float(op.tr_I)
    bc = BoundaryCondition.dirichlet()
    fid = f"dirichlet.a{n}"
    if n == 0:
        return _report(0, _pref(m) * trI * interior.volume, 0.0, bc, fid)
    if n == 1:
        return _report(1, 0.0, -_pref(m, 1) * 0.25 * trI * bdy.volume, bc, fid)
    if n == 2:
        inner = _pref(m) / 6 * _interior_a2(interior, op)
        outer = _pref(m) / 6 * bdy.integrate(2 * trI * bdy.kappa)
        return _report(2, inner, outer, bc, fid)
    if n == 3:
        if bdy.is_empty:
            return _report(3, 0.0, 0.0, bc, fid)
        integrand = (96 * op.boundary("tr_E_bdy", bdy)
                     + trI * (16 * bdy.tau + 8 * bdy.R_amam + 7 * bdy.kappa ** 2
                              - 10 * bdy.L_norm2))
        return _report(3, 0.0, -_pref(m, 1) / 384 * bdy.integrate(integrand), bc, fid)
    inner = _pref(m) / 360 * _interior_a4(interior, op)
    outer = 0.0
    if not bdy.is_empty:
        k = bdy.kappa
        geo = (-18 * bdy.tau_m + 20 * bdy.tau * k + 4 * bdy.R_amam * k - 12 * bdy.R_ambm_L
               + 4 * bdy.R_abcb_L + float(F(40, 21)) * k ** 3
               - float(F(88, 7)) * bdy.L_norm2 * k + float(F(320, 21)) * bdy.L_cubed)
        integrand = (-120 * op.boundary("tr_E_m", bdy) + 120 * op.boundary("tr_E_bdy", bdy) * k
                     + trI * geo)
        outer = _pref(m) / 360 * bdy.integrate(integrand)
    return _report(4, inner, outer, bc, fid)


def robin_an(n: int, interior: InteriorField, boundary: Optional[BoundaryField],
             op: OperatorData, bc: Optional[BoundaryCondition] = None) -> CoefficientReport:
    """``a_n`` for Robin conditions ``(nabla_m + S) phi = 0`` (inward normal), ``0 <= n <= 4``.

    ``S`` comes from the ``tr_S*`` samplers of ``op``; all zero is Neumann.
    """
    bdy = _check(n, interior, boundary, op)
    m, trI = op.m, float(op.tr_I)
    bc = bc or BoundaryCondition.neumann()
    fid = f"robin.a{n}"
    if n == 0:
        return _report(0, _pref(m) * trI * interior.volume, 0.0, bc, fid)
    if n == 1:
        return _report(1, 0.0, _pref(m, 1) * 0.25 * trI * bdy.volume, bc, fid)
    if bdy.is_empty:
        S = S2 = S3 = SE = np.zeros(0)
    else:
        S, S2, S3 = (op.boundary(k, bdy) for k in ("tr_S", "tr_S2", "tr_S3"))
        SE = op.boundary("tr_SE", bdy)
    k = bdy.kappa
    if n == 2:
        inner = _pref(m) / 6 * _interior_a2(interior, op)
        outer = _pref(m) / 6 * bdy.integrate(2 * trI * k + 12 * S)
        return _report(2, inner, outer, bc, fid)
    if n == 3:
        if bdy.is_empty:
            return _report(3, 0.0, 0.0, bc, fid)
        # -8 R_amma = +8 R_amam
        integrand = (96 * op.boundary("tr_E_bdy", bdy)
                     + trI * (16 * bdy.tau + 8 * bdy.R_amam + 13 * k ** 2 + 2 * bdy.L_norm2)
                     + 96 * S * k + 192 * S2)
        return _report(3, 0.0, _pref(m, 1) / 384 * bdy.integrate(integrand), bc, fid)
    inner = _pref(m) / 360 * _interior_a4(interior, op)
    outer = 0.0
    if not bdy.is_empty:
        geo = (42 * bdy.tau_m + 20 * bdy.tau * k + 4 * bdy.R_amam * k - 12 * bdy.R_ambm_L
               + 4 * bdy.R_abcb_L + float(F(40, 3)) * k ** 3 + 8 * bdy.L_norm2 * k
               + float(F(32, 3)) * bdy.L_cubed)
        integrand = (240 * op.boundary("tr_E_m", bdy) + 120 * op.boundary("tr_E_bdy", bdy) * k
                     + trI * geo + 120 * S * bdy.tau + 720 * SE + 144 * S * k ** 2
                     + 48 * S * bdy.L_norm2 + 480 * S2 * k + 480 * S3)
        outer = _pref(m) / 360 * bdy.integrate(integrand)
    return _report(4, inner, outer, bc, fid)


def heat_coefficient(n: int, interior: InteriorField, boundary: Optional[BoundaryField],
                     op: OperatorData, bc: BoundaryCondition) -> CoefficientReport:
    """Dispatch on ``bc``; Robin ``S`` is taken from ``bc`` when ``op`` has none."""
    if bc.kind is BCKind.DIRICHLET:
        return dirichlet_an(n, interior, boundary, op)
    if not bc.is_neumann and boundary is not None and not boundary.is_empty:
        op = op.with_robin(boundary, bc.c1, bc.c2)
    return robin_an(n, interior, boundary, op, bc)


# a_2 of the real and complex Laplacians on functions and 1-forms -----------------


@dataclass(frozen=True)
class FormLaplacianA2:
    """``a_2`` of ``2 Box_0``, ``Delta_0``, ``2 Box_(1,0)``, ``2 Box_(0,1)``, ``Delta_1``.

    The 1-form entries are ``None`` when ``m_hat = 2``.
    """

    box0: Number
    delta0: Number
    box10: Optional[Number] = None
    box01: Optional[Number] = None
    delta1: Optional[Number] = None

    @property
    def box1(self) -> Optional[Number]:
        if self.box10 is None:
            return None
        return self.box10 + self.box01


def a2_form_laplacians(m_hat: int, tau_int: Number, K: KTriple, kappa_int: Number,
                       exact: bool = False) -> FormLaplacianA2:
    """The five ``a_2`` values in terms of the integrals of tau, K1, K2, K3 and kappa.

    With ``exact=True`` the common prefactor ``(4 pi)^(-m_hat)`` is dropped so that
    rational inputs give rational outputs.
    """
    if m_hat < 2:
        raise UnsupportedOrderError("m_hat = 1 is automatically Kaehler; no formulas needed")
    pref = F(1, 6) if exact else (4 * math.pi) ** (-m_hat) / 6
    K1, K2, K3 = K
    if m_hat == 2:
        return FormLaplacianA2(box0=pref * (2 * kappa_int + tau_int + 3 * K2),
                               delta0=pref * (2 * kappa_int + tau_int))
    common = (m_hat - 3) * (tau_int + 3 * K2 + 3 * K3)
    return FormLaplacianA2(
        box0=pref * (2 * kappa_int + tau_int + 3 * K2 + 3 * K3),
        delta0=pref * (2 * kappa_int + tau_int),
        box10=pref * (2 * m_hat * kappa_int + common - 6 * K1 + 6 * K2 + 3 * K3),
        box01=pref * (2 * m_hat * kappa_int + common + 6 * K1 + 6 * K2 + 3 * K3),
        delta1=pref * (4 * m_hat * kappa_int + 2 * (m_hat - 3) * tau_int),
    )


def torsion_from_a2_gaps(m_hat: int, gap0: Number, gap1: Number) -> tuple[Number, Number]:
    """Solve for ``(int K2, int K3)`` from normalized ``a_2`` gaps.

    ``gap0 = a2(2 Box_0) - a2(Delta_0)`` and ``gap1 = a2(2 Box_1) - a2(Delta_1)``, both
    multiplied by ``6 (4 pi)^m_hat``.  Fractions in give fractions out.
    """
    if m_hat < 3:
        raise ValueError("the two-equation system needs m_hat >= 3")
    if isinstance(gap0, (int, F)) and isinstance(gap1, (int, F)):
        gap0, gap1 = F(gap0), F(gap1)
    # gap0 = 3 K2 + 3 K3 ; gap1 = 2 (m_hat - 3) gap0 + 12 K2 + 6 K3
    s = gap0 / 3                              # K2 + K3
    h = (gap1 - 2 * (m_hat - 3) * gap0) / 6   # 2 K2 + K3
    k2 = h - s
    return k2, s - k2


class Decision(str, enum.Enum):
    KAEHLER = "kaehler"
    NOT_DECIDED = "not_decided"


@dataclass(frozen=True)
class KaehlerVerdict:
    decision: Decision
    reason: str
    int_K2_solved: Optional[float] = None

    @property
    def is_kaehler(self) -> bool:
        return self.decision is Decision.KAEHLER


def kaehler_decide(m_hat: int, a2_equal_p0: bool, a2_equal_p1: bool, K_integrals: KTriple,
                   volume: float = 1.0, rtol: float = 1e-8) -> KaehlerVerdict:
    """Decide the Kaehler property from equality of ``a_2`` for ``Delta_p`` and ``2 Box_p``.

    Returns ``NOT_DECIDED`` when the spectral hypotheses fail or are inconsistent
    with the supplied torsion integrals (``|int K2| > rtol * volume``).
    """
    if m_hat < 1:
        raise ValueError("m_hat must be positive")
    if m_hat == 1:
        return KaehlerVerdict(Decision.KAEHLER, "complex dimension 1 is automatically Kaehler")
    if not a2_equal_p0:
        return KaehlerVerdict(Decision.NOT_DECIDED, "a2(Delta_0) != a2(2 Box_0)")
    if m_hat == 2:
        solved = 0.0
        reason = "m_hat = 2: equality on functions forces int K2 = 0"
    else:
        if not a2_equal_p1:
            return KaehlerVerdict(Decision.NOT_DECIDED,
                                  "only the p = 0 equality holds; p = 1 equality is required")
        solved, _ = torsion_from_a2_gaps(m_hat, F(0), F(0))
        reason = "p = 0 and p = 1 equalities force int K2 = 0"
    if abs(K_integrals.K2 - float(solved)) > rtol * volume:
        return KaehlerVerdict(Decision.NOT_DECIDED,
                              f"equality flags inconsistent with int K2 = {K_integrals.K2:.6g}",
                              float(solved))
    return KaehlerVerdict(Decision.KAEHLER, reason, float(solved))


# Patodi constants and the reduced a_4 --------------------------------------------


def _binom(n: int, k: int) -> int:
    """``n! / (k! (n-k)!)`` with the convention that a negative factorial kills the term."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def patodi_c(m: int, p: int) -> tuple[F, F, F, F]:
    """Exact ``(c1, c2, c3, c4)`` of the interior ``a_4`` integrand for ``Delta_p``."""
    if not 0 <= p <= m:
        raise ValueError(f"p = {p} out of range for m = {m}")
    b0, b2, b4 = _binom(m, p), _binom(m - 2, p - 1), _binom(m - 4, p - 2)
    return (F(1, 72) * b0 - F(1, 6) * b2 + F(1, 2) * b4,
            -F(1, 180) * b0 + F(1, 2) * b2 - 2 * b4,
            F(1, 180) * b0 - F(1, 12) * b2 + F(1, 2) * b4,
            F(1, 30) * b0 - F(1, 6) * b2)


def reduced_c(m: int, p: int) -> tuple[F, F, F, F]:
    """``c~^k = c^k_{m,p} - binom(m,p) c^k_{m,0}`` for k = 1..4."""
    b2, b4 = _binom(m - 2, p - 1), _binom(m - 4, p - 2)
    return (-F(1, 6) * b2 + F(1, 2) * b4,
            F(1, 2) * b2 - 2 * b4,
            -F(1, 12) * b2 + F(1, 2) * b4,
            -F(1, 6) * b2)


def reduced_boundary_c(m: int, p: int, bc: BoundaryCondition) -> tuple[F, F]:
    """``(c~5, c~6)``: coefficients of ``tau kappa`` and ``tau_;m`` in the reduced ``a_4``.

    Only the E-dependent boundary terms survive the reduction; with
    ``Tr E = -b tau`` (``b = binom(m-2, p-1)``) the Dirichlet terms
    ``(-120 E_;m + 120 E kappa)/360`` give ``(-b/3, b/3)`` and the Robin terms
    ``(240 E_;m + 120 E kappa)/360`` give ``(-b/3, -2b/3)``.
    """
    b = _binom(m - 2, p - 1)
    if bc.kind is BCKind.DIRICHLET:
        return F(-b, 3), F(b, 3)
    return F(-b, 3), F(-2 * b, 3)


def reduced_matrix_determinant(m: int) -> F:
    """``det [[c~2_{m,1}, c~3_{m,1}], [c~2_{m,2}, c~3_{m,2}]]``."""
    _, a, b, _ = reduced_c(m, 1)
    _, c, d, _ = reduced_c(m, 2)
    return a * d - b * c


def weitzenbock_coefficient(m: int, p: int) -> int:
    """``b`` in ``Tr E(Delta_p) = -b tau``."""
    if not 0 <= p <= m:
        raise ValueError(f"p = {p} out of range for m = {m}")
    return _binom(m - 2, p - 1)


def weitzenbock_trace(m: int, p: int, tau):
    return -weitzenbock_coefficient(m, p) * tau


def patodi_a4_closed(interior: InteriorField, m: int, p: int,
                     boundary: Optional[BoundaryField] = None) -> float:
    """``a_4(Delta_p)`` on a closed manifold from the four Patodi constants."""
    if boundary is not None and not boundary.is_empty:
        raise ValueError("the Patodi formula applies only when the boundary is empty")
    if interior.dimension != m:
        raise ValueError("field dimension does not match m")
    rho2, r2, tau_lap = interior.require("rho_norm2", "R_norm2", "tau_lap")
    c1, c2, c3, c4 = (float(c) for c in patodi_c(m, p))
    tau = interior.tau
    return _pref(m) * interior.integrate(c1 * tau ** 2 + c2 * rho2 + c3 * r2 + c4 * tau_lap)


def reduced_a4(interior: InteriorField, boundary: Optional[BoundaryField], m: int, p: int,
               bc: BoundaryCondition) -> float:
    """``a_4(Delta_p) - binom(m, p) a_4(Delta_0)`` from the reduced constants.

    For Robin ``S = (c1 + c2 kappa) I`` the surviving ``720 S E`` term adds
    ``-2 b (c1 tau + c2 tau kappa)`` to the boundary integrand.
    """
    if p == 0:
        raise ValueError("the reduced invariant vanishes identically for p = 0")
    if not 1 <= p <= m - 1:
        raise ValueError(f"p = {p} out of range 1..m-1")
    rho2, r2, tau_lap = interior.require("rho_norm2", "R_norm2", "tau_lap")
    t1, t2, t3, t4 = (float(c) for c in reduced_c(m, p))
    tau = interior.tau
    inner = interior.integrate(t1 * tau ** 2 + t2 * rho2 + t3 * r2 + t4 * tau_lap)
    outer = 0.0
    if boundary is not None and not boundary.is_empty:
        t5, t6 = (float(c) for c in reduced_boundary_c(m, p, bc))
        integrand = t5 * boundary.tau * boundary.kappa + t6 * boundary.tau_m
        if bc.kind is BCKind.ROBIN and (bc.c1 or bc.c2):
            b = weitzenbock_coefficient(m, p)
            integrand = integrand - 2 * b * (bc.c1 + bc.c2 * boundary.kappa) * boundary.tau
        outer = boundary.integrate(integrand)
    return _pref(m) * (inner + outer)


# recovery of tau and the boundary curvature integral ---------------------------------


def a2_laplacian_p0(interior: InteriorField, boundary: Optional[BoundaryField]) -> float:
    """``a_2(Delta_0)`` (Dirichlet or Neumann; they agree at this order)."""
    return dirichlet_an(2, interior, boundary, OperatorData(interior.dimension)).value


def a2_laplacian_p1(interior: InteriorField, boundary: Optional[BoundaryField]) -> float:
    """``a_2(Delta_1) = (4 pi)^(-m/2) / 6 * (int (m - 6) tau + int 2 m kappa)``."""
    m = interior.dimension
    op = OperatorData.form_laplacian(m, 1, interior, boundary)
    return dirichlet_an(2, interior, boundary, op).value


def recover_tau(a2_p0: float, a2_p1: float, vol: float, m: int) -> float:
    """Average scalar curvature from ``a_2`` of ``Delta_0`` and ``Delta_1``; exact if tau is constant."""
    if vol <= 0:
        raise ValueError("volume must be positive")
    return (4 * math.pi) ** (m / 2) / vol * (m * a2_p0 - a2_p1)


def recover_kappa_integral(a2_p0: float, tau_int: float, m: int) -> float:
    """``int_{dM} kappa = 3 (4 pi)^(m/2) a2(Delta_0) - int_M tau / 2``."""
    if m < 2:
        raise ValueError("the boundary curvature integral needs m >= 2")
    return 3 * (4 * math.pi) ** (m / 2) * a2_p0 - 0.5 * tau_int


def reports_to_json(reports) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2)
