"""Spectral resolutions of model manifolds and their heat traces."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import gammaincc

# lambda_max * t below this leaves a tail that is not negligible
TRUNCATION_GUARD = 30.0


class IncompleteSpectrumError(ValueError):
    """A spectrum does not reach far enough for the requested operation."""


class TruncationError(IncompleteSpectrumError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralResolution:
    """Sorted eigenvalues with multiplicities and the domain data needed to interpret them.

    ``complete_to`` is the largest value up to which every eigenvalue is present with
    full multiplicity (it defaults to the largest retained eigenvalue).
    """

    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    source: str
    m: int
    volume: float
    boundary_volume: float
    bc: str
    mesh: Optional[float] = None
    complete_to: Optional[float] = None

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float).ravel()
        mult = np.asarray(self.multiplicities).ravel()
        if lam.shape != mult.shape:
            raise ValueError("eigenvalues and multiplicities differ in length")
        if lam.size == 0:
            raise ValueError("empty spectrum")
        if not np.all(np.isfinite(lam)):
            raise ValueError("non-finite eigenvalue")
        if np.any(mult < 1) or np.any(mult != np.round(mult)):
            raise ValueError("multiplicities must be positive integers")
        order = np.argsort(lam, kind="stable")
        lam, mult = lam[order], mult[order].astype(np.int64)
        # merge exactly repeated values
        uniq, inverse = np.unique(lam, return_inverse=True)
        if uniq.size != lam.size:
            mult = np.bincount(inverse, weights=mult).astype(np.int64)
            lam = uniq
        if not self.bc.startswith("robin") and lam[0] < -1e-8 * max(1.0, abs(lam[-1])):
            raise ValueError(f"negative eigenvalue {lam[0]} for {self.bc} conditions")
        lam.setflags(write=False)
        mult.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "multiplicities", mult)
        if self.complete_to is None:
            object.__setattr__(self, "complete_to", float(lam[-1]))

    @property
    def count(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def expanded(self) -> np.ndarray:
        return np.repeat(self.eigenvalues, self.multiplicities)

    def counting(self, lam: float) -> int:
        """``N(lam)``: eigenvalues ``<= lam`` counted with multiplicity."""
        return int(self.multiplicities[self.eigenvalues <= lam].sum())

    def weyl_count(self, lam: float) -> float:
        """Leading Weyl term ``Vol omega_m lam^(m/2) / (2 pi)^m``."""
        omega = math.pi ** (self.m / 2) / math.gamma(self.m / 2 + 1)
        return self.volume * omega * max(lam, 0.0) ** (self.m / 2) / (2 * math.pi) ** self.m

    def weyl_ratio(self) -> float:
        """``N(lam_max) / Weyl(lam_max)``; close to 1 for a large complete spectrum."""
        return self.counting(self.lambda_max) / self.weyl_count(self.lambda_max)

    def truncated(self, cutoff: float) -> "SpectralResolution":
        keep = self.eigenvalues <= cutoff
        if not keep.any():
            raise IncompleteSpectrumError("cutoff below the lowest eigenvalue")
        return replace(self, eigenvalues=self.eigenvalues[keep],
                       multiplicities=self.multiplicities[keep],
                       complete_to=min(self.complete_to, cutoff))

    def same_as(self, other: "SpectralResolution") -> bool:
        return (np.array_equal(self.eigenvalues, other.eigenvalues)
                and np.array_equal(self.multiplicities, other.multiplicities)
                and (self.source, self.m, self.volume, self.boundary_volume, self.bc,
                     self.mesh, self.complete_to)
                == (other.source, other.m, other.volume, other.boundary_volume, other.bc,
                    other.mesh, other.complete_to))

    def metadata(self) -> dict:
        return {"m": self.m, "Vol": self.volume, "Vol_boundary": self.boundary_volume,
                "bc": self.bc, "source": self.source, "mesh": self.mesh,
                "complete_to": self.complete_to}


# exact spectra ------------------------------------------------------------------


def interval_spectrum(length: float, bc: str, count: int) -> SpectralResolution:
    """``-d^2/dx^2`` on ``[0, length]``: ``(n pi / length)^2``, with 0 for Neumann."""
    if length <= 0 or count < 1:
        raise ValueError("length and count must be positive")
    bc = bc.lower()
    if bc == "dirichlet":
        n = np.arange(1, count + 1)
    elif bc == "neumann":
        n = np.arange(0, count)
    else:
        raise ValueError(f"interval spectrum supports dirichlet/neumann, not {bc!r}")
    lam = (n * math.pi / length) ** 2
    return SpectralResolution(lam, np.ones(count, dtype=np.int64), "exact", 1, length, 2.0, bc)


def circle_spectrum(circumference: float, count: int) -> SpectralResolution:
    """Circle of the given length; ``count`` frequency levels ``0 .. count-1``."""
    if circumference <= 0 or count < 1:
        raise ValueError("circumference and count must be positive")
    n = np.arange(count)
    lam = (2 * math.pi * n / circumference) ** 2
    mult = np.where(n == 0, 1, 2)
    return SpectralResolution(lam, mult, "exact", 1, circumference, 0.0, "closed")


def sphere_spectrum(l_max: int) -> SpectralResolution:
    """Unit round 2-sphere: ``l (l + 1)`` with multiplicity ``2 l + 1``."""
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    l = np.arange(l_max + 1)
    return SpectralResolution(l * (l + 1.0), 2 * l + 1, "exact", 2, 4 * math.pi, 0.0, "closed")


def product_spectrum(s1: SpectralResolution, s2: SpectralResolution,
                     cutoff: float) -> SpectralResolution:
    """Spectrum of the product manifold, complete up to ``cutoff``."""
    for a, b in ((s1, s2), (s2, s1)):
        if cutoff - b.eigenvalues[0] > a.complete_to:
            raise IncompleteSpectrumError(
                f"cutoff {cutoff} needs eigenvalues up to {cutoff - b.eigenvalues[0]}, "
                f"but one factor is only complete to {a.complete_to}")
    lam = s1.eigenvalues[:, None] + s2.eigenvalues[None, :]
    mult = s1.multiplicities[:, None] * s2.multiplicities[None, :]
    keep = lam <= cutoff
    bcs = {s1.bc, s2.bc} - {"closed"}
    bc = "closed" if not bcs else "+".join(sorted(bcs))
    return SpectralResolution(
        lam[keep], mult[keep], "product", s1.m + s2.m, s1.volume * s2.volume,
        s1.volume * s2.boundary_volume + s1.boundary_volume * s2.volume, bc,
        complete_to=float(cutoff))


# heat traces ----------------------------------------------------------------------


def weyl_tail(s: SpectralResolution, t: float) -> float:
    """Leading-order Weyl estimate of ``sum_{lam > lam_max} e^{-t lam}``."""
    return s.volume * (4 * math.pi * t) ** (-s.m / 2) * float(gammaincc(s.m / 2, t * s.lambda_max))


def heat_trace(s: SpectralResolution, t: float, tail_policy: str = "strict") -> float:
    """``sum_nu e^{-t lam_nu}`` over the retained modes.

    ``tail_policy``: ``"strict"`` raises :class:`TruncationError` unless
    ``lam_max t >= 30``; ``"weyl"`` adds :func:`weyl_tail` instead; ``"none"`` sums
    the retained modes without any check.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if tail_policy not in ("strict", "weyl", "none"):
        raise ValueError(f"unknown tail policy {tail_policy!r}")
    if tail_policy == "strict" and s.lambda_max * t < TRUNCATION_GUARD * (1 - 1e-12):
        raise TruncationError(
            f"lambda_max * t = {s.lambda_max * t:.3g} < {TRUNCATION_GUARD}; "
            "use more modes, a larger t, or tail_policy='weyl'")
    terms = s.multiplicities * np.exp(-t * s.eigenvalues)
    total = math.fsum(terms.tolist())
    if tail_policy == "weyl":
        total += weyl_tail(s, t)
    return total


def heat_traces(s: SpectralResolution, ts, tail_policy: str = "strict") -> np.ndarray:
    return np.array([heat_trace(s, float(t), tail_policy) for t in np.atleast_1d(ts)])


def min_valid_t(s: SpectralResolution) -> float:
    """Smallest ``t`` accepted by the strict truncation guard."""
    return TRUNCATION_GUARD / s.lambda_max


# files -----------------------------------------------------------------------------


def write_spectrum(s: SpectralResolution, csv_path, sidecar_path=None) -> tuple[Path, Path]:
    """Write ``eigenvalue,multiplicity`` CSV plus a JSON metadata sidecar."""
    csv_path = Path(csv_path)
    sidecar_path = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eigenvalue", "multiplicity"])
        for lam, mult in zip(s.eigenvalues, s.multiplicities):
            writer.writerow([repr(float(lam)), int(mult)])
    sidecar_path.write_text(json.dumps(s.metadata(), indent=2))
    return csv_path, sidecar_path


def read_spectrum(csv_path, sidecar_path=None) -> SpectralResolution:
    csv_path = Path(csv_path)
    sidecar_path = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    with csv_path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["eigenvalue", "multiplicity"]:
            raise ValueError(f"{csv_path}: expected header 'eigenvalue,multiplicity'")
        rows = [(float(a), int(b)) for a, b in reader]
    meta = json.loads(sidecar_path.read_text())
    lam, mult = zip(*rows) if rows else ((), ())
    return SpectralResolution(
        np.array(lam), np.array(mult, dtype=np.int64), meta.get("source", "file"),
        int(meta["m"]), float(meta["Vol"]), float(meta["Vol_boundary"]), meta["bc"],
        mesh=meta.get("mesh"), complete_to=meta.get("complete_to"))
