"""Least-squares extraction of heat-trace coefficients from sampled traces.

The model is ``Z(t) ~ sum_{n <= n_max} a_n t^{(n-m)/2}``.  Rows are multiplied by
``t^{m/2}`` so every row is O(1) near ``t = 0``, columns are scaled to unit norm, and the
scaled system is solved by ``numpy.linalg.lstsq``.  Uncertainties are jackknife
(leave-one-sample-out) standard errors: the dominant error is truncation of the ladder,
which shows up as window sensitivity rather than as noise.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .heat_coefficients import BCKind, CoefficientReport
from .model_spectra.spectra import (TRUNCATION_GUARD, SpectralResolution, heat_traces,
                                    weyl_tail)

ILL_CONDITIONED = 1e8


class NonGeometricGridWarning(UserWarning):
    pass


class IllConditionedFitWarning(UserWarning):
    pass


class InvalidComparisonError(ValueError):
    pass


@dataclass(frozen=True)
class FittedCoefficient:
    n: int
    estimate: float
    standard_error: float


@dataclass(frozen=True)
class FitResult:
    coefficients: tuple
    t_grid: np.ndarray
    traces: np.ndarray
    residual_norm: float
    condition_number: float
    converged: bool
    m: int
    bc: str = "closed"
    ill_conditioned: bool = False
    advice: str = ""
    meta: dict = field(default_factory=dict)

    def estimate(self, n: int) -> float:
        return self._get(n).estimate

    def error(self, n: int) -> float:
        return self._get(n).standard_error

    def _get(self, n: int) -> FittedCoefficient:
        for c in self.coefficients:
            if c.n == n:
                return c
        raise KeyError(f"order {n} was not fitted")

    @property
    def orders(self) -> list[int]:
        return [c.n for c in self.coefficients]

    def model(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return sum(c.estimate * t ** ((c.n - self.m) / 2) for c in self.coefficients)

    def to_json(self) -> dict:
        return {
            "m": self.m, "bc": self.bc,
            "coefficients": {str(c.n): c.estimate for c in self.coefficients},
            "errors": {str(c.n): c.standard_error for c in self.coefficients},
            "window": [float(self.t_grid.min()), float(self.t_grid.max())],
            "samples": int(self.t_grid.size),
            "condition_number": self.condition_number,
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "ill_conditioned": self.ill_conditioned,
            "advice": self.advice,
            **self.meta,
        }

    def write_csv(self, path) -> Path:
        """``t,trace,model,residual`` rows, one per sample."""
        path = Path(path)
        model = self.model(self.t_grid)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "trace", "model", "residual"])
            for t, z, mz in zip(self.t_grid, self.traces, model):
                w.writerow([repr(float(t)), repr(float(z)), repr(float(mz)), repr(float(z - mz))])
        return path

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=2))
        return path


def geometric_grid(t_min: float, t_max: float, ratio: float = 1.3) -> np.ndarray:
    """Geometric sequence from ``t_min`` to ``t_max`` (both included) with step close to ``ratio``."""
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    count = max(2, int(math.ceil(math.log(t_max / t_min) / math.log(ratio))) + 1)
    return np.geomspace(t_min, t_max, count)


def _solve(t: np.ndarray, z: np.ndarray, m: int, n_max: int):
    powers = np.arange(n_max + 1) / 2.0
    design = t[:, None] ** powers[None, :]       # row-scaled by t^{m/2}
    rhs = z * t ** (m / 2)
    norms = np.linalg.norm(design, axis=0)
    scaled = design / norms
    sol, *_ = np.linalg.lstsq(scaled, rhs, rcond=None)
    coef = sol / norms
    resid = rhs - design @ coef
    return coef, float(np.linalg.norm(resid)), float(np.linalg.cond(scaled))


def fit_coefficients(samples: Union[Sequence, np.ndarray], m: int, n_max: int,
                     bc: str = "closed") -> FitResult:
    """Fit ``a_0 .. a_{n_max}`` to ``(t, trace)`` samples.

    Examples
    --------
    >>> t = np.geomspace(1e-3, 1e-1, 16)
    >>> fit = fit_coefficients(np.c_[t, 2 / t + 1 - t], m=2, n_max=4)
    >>> round(fit.estimate(0), 9), round(fit.estimate(2), 9), round(fit.estimate(4), 9)
    (2.0, 1.0, -1.0)
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (t, trace) pairs")
    order = np.argsort(arr[:, 0])
    t, z = arr[order, 0], arr[order, 1]
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if t.size < n_max + 3:
        raise ValueError(f"need at least {n_max + 3} samples for n_max = {n_max}")
    if np.any(t <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("times must be positive and samples finite")
    ratios = t[1:] / t[:-1]
    if np.ptp(np.log(ratios)) > 1e-6 * max(1.0, float(np.abs(np.log(ratios)).max())):
        warnings.warn("t-grid is not geometric; the jackknife weights samples unevenly",
                      NonGeometricGridWarning, stacklevel=2)

    coef, resid, cond = _solve(t, z, m, n_max)
    loo = np.array([_solve(np.delete(t, i), np.delete(z, i), m, n_max)[0] for i in range(t.size)])
    k = t.size
    se = np.sqrt((k - 1) / k * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))

    ill = not math.isfinite(cond) or cond > ILL_CONDITIONED
    advice = ""
    if ill:
        advice = (f"condition number {cond:.3g} exceeds {ILL_CONDITIONED:g}; lower n_max "
                  "or widen the t-window")
        warnings.warn(advice, IllConditionedFitWarning, stacklevel=2)
    converged = bool(np.all(np.isfinite(coef)) and math.isfinite(resid) and not ill)
    coefficients = tuple(FittedCoefficient(n, float(a), float(e))
                         for n, (a, e) in enumerate(zip(coef, se)))
    return FitResult(coefficients, t, z, resid, cond, converged, m, bc, ill, advice)


def fit_spectrum(s: SpectralResolution, n_max: int, t_grid: np.ndarray,
                 tail_policy: str = "strict") -> FitResult:
    """Sample the heat trace of ``s`` on ``t_grid`` and fit it."""
    t_grid = np.asarray(t_grid, dtype=float)
    z = heat_traces(s, t_grid, tail_policy)
    return fit_coefficients(np.c_[t_grid, z], s.m, n_max, bc=s.bc)


def choose_window(s: SpectralResolution, n_max: int, ladder_tol: float = 1e-3,
                  tail_tol: float = 1e-9, next_ratio: Optional[float] = None,
                  ratio: float = 1.3) -> np.ndarray:
    """Geometric t-grid adapted to a spectrum.

    ``t_min`` is the smallest time at which the Weyl estimate of the discarded tail is
    below ``tail_tol`` times the trace (never below the strict truncation guard).
    ``t_max`` keeps the first omitted term ``|a_{n_max+1}/a_0| t^{(n_max+1)/2}`` below
    ``ladder_tol``; ``next_ratio`` is that coefficient ratio, defaulting to the
    boundary-to-volume ratio raised to the power ``n_max + 1`` (its size for domains
    without curvature scales other than the boundary), or 1.
    """
    lam_max = s.lambda_max
    if lam_max <= 0:
        raise ValueError("spectrum too short for a window")
    t_min = TRUNCATION_GUARD / lam_max

    def rel_tail(t):
        return weyl_tail(s, t) / (s.volume * (4 * math.pi * t) ** (-s.m / 2))

    while rel_tail(t_min) > tail_tol:
        t_min *= 1.1
    if next_ratio is None:
        scale = s.boundary_volume / s.volume if s.boundary_volume > 0 else 1.0
        next_ratio = max(1.0, scale) ** (n_max + 1)
    t_max = (ladder_tol / next_ratio) ** (2.0 / (n_max + 1))
    if t_max <= t_min * ratio ** (n_max + 2):
        raise ValueError(f"no usable window: t_min = {t_min:.3g}, t_max = {t_max:.3g}; "
                         "use more modes or a smaller n_max")
    return geometric_grid(t_min, t_max, ratio)


# verification bridge -----------------------------------------------------------------


@dataclass(frozen=True)
class OrderVerdict:
    n: int
    fitted: float
    standard_error: float
    formula: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        mark = "pass" if self.passed else "FAIL"
        return (f"a{self.n}: fitted {self.fitted:.6g} (+/- {self.standard_error:.2g}) "
                f"formula {self.formula:.6g} tol {self.tolerance:.2g} -> {mark}")


def _bc_family(label: str) -> str:
    label = label.lower()
    if label == "closed":
        return "closed"
    return "dirichlet" if label.startswith("dirichlet") else "mixed"


def verify_against_formula(fit: FitResult, reports: Sequence[CoefficientReport],
                           tolerances: Union[float, Mapping[int, float]]) -> tuple[bool, list]:
    """Compare fitted and formula coefficients order by order.

    Order ``n`` passes when ``|a_fit - a| <= tol_n max(1, |a|)``.  Returns the
    aggregate verdict and the per-order verdicts.
    """
    fam = _bc_family(fit.bc)
    verdicts = []
    for rep in reports:
        if rep.n not in fit.orders:
            raise InvalidComparisonError(f"order {rep.n} is not in the fit (orders {fit.orders})")
        rep_fam = "dirichlet" if rep.bc.kind is BCKind.DIRICHLET else "mixed"
        if fam != "closed" and fam != rep_fam:
            raise InvalidComparisonError(f"fit boundary condition {fit.bc!r} does not match "
                                         f"formula condition {rep.bc.label!r}")
        tol = tolerances if isinstance(tolerances, (int, float)) else tolerances[rep.n]
        got = fit.estimate(rep.n)
        ok = abs(got - rep.value) <= tol * max(1.0, abs(rep.value))
        verdicts.append(OrderVerdict(rep.n, got, fit.error(rep.n), rep.value, float(tol), ok))
    return all(v.passed for v in verdicts), verdicts
