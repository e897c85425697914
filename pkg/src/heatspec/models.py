"""Built-in model manifolds: geometry for the formulas, spectra for the fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .geometry import (BoundaryField, InteriorField, flat_field, interval_boundary,
                       round_boundary, straight_boundary, unit_sphere_field)
from .heat_coefficients import BCKind, BoundaryCondition
from .model_spectra import (TRUNCATION_GUARD, SpectralResolution, circle_spectrum,
                            disk_dirichlet_spectrum, interval_spectrum, product_spectrum,
                            richardson, sphere_spectrum, sturm_liouville_fd)


class UnsupportedModelError(ValueError):
    pass


@dataclass
class SpectrumParams:
    count: Optional[int] = None
    l_max: Optional[int] = None
    mesh: Optional[int] = None


@dataclass(frozen=True)
class Model:
    name: str
    m: int
    closed: bool
    interior: Callable[[], InteriorField]
    boundary: Callable[[], Optional[BoundaryField]]
    spectrum: Optional[Callable[[BoundaryCondition, SpectrumParams], SpectralResolution]]
    fit_n_max: int = 4
    fit_t_max: float = 0.05
    description: str = ""

    def check_bc(self, bc: BoundaryCondition) -> None:
        if self.closed and bc.kind is not BCKind.DIRICHLET and not bc.is_neumann:
            raise UnsupportedModelError(f"{self.name} has no boundary; Robin data is meaningless")


def _interval_spec(bc: BoundaryCondition, p: SpectrumParams) -> SpectralResolution:
    count = p.count or 400
    if bc.kind is BCKind.DIRICHLET:
        return interval_spectrum(math.pi, "dirichlet", count)
    if bc.is_neumann:
        return interval_spectrum(math.pi, "neumann", count)
    if bc.c2:
        raise UnsupportedModelError("the interval has kappa = 0; use --robin-s only")
    mesh = p.mesh or 2048
    coarse = sturm_liouville_fd(math.pi, "robin", mesh, count, s=bc.c1)
    fine = sturm_liouville_fd(math.pi, "robin", 2 * mesh, count, s=bc.c1)
    return richardson(coarse, fine)


def _cylinder_spec(bc: BoundaryCondition, p: SpectrumParams) -> SpectralResolution:
    if bc.kind is not BCKind.DIRICHLET and not bc.is_neumann:
        raise UnsupportedModelError("cylinder spectra are available for dirichlet/neumann only")
    count = p.count or 300
    a = interval_spectrum(math.pi, "dirichlet" if bc.kind is BCKind.DIRICHLET else "neumann", count)
    b = circle_spectrum(2 * math.pi, count)
    cutoff = min(a.complete_to + b.eigenvalues[0], b.complete_to + a.eigenvalues[0])
    return product_spectrum(a, b, cutoff)


def _disk_spec(bc: BoundaryCondition, p: SpectrumParams) -> SpectralResolution:
    if bc.kind is not BCKind.DIRICHLET:
        raise UnsupportedModelError("only the Dirichlet disk spectrum is available")
    return disk_dirichlet_spectrum(p.count or 5000)


def _circle_spec(bc, p: SpectrumParams) -> SpectralResolution:
    return circle_spectrum(2 * math.pi, p.count or 400)


def _torus_spec(bc, p: SpectrumParams) -> SpectralResolution:
    c = circle_spectrum(2 * math.pi, p.count or 300)
    return product_spectrum(c, c, c.complete_to)


def _sphere_spec(bc, p: SpectrumParams) -> SpectralResolution:
    return sphere_spectrum(p.l_max if p.l_max is not None else 300)


REGISTRY = {
    "interval": Model("interval", 1, False, lambda: flat_field(1, math.pi), interval_boundary,
                      _interval_spec, 4, 0.05, "[0, pi]"),
    "circle": Model("circle", 1, True, lambda: flat_field(1, 2 * math.pi), lambda: None,
                    _circle_spec, 2, 0.5, "circle of length 2 pi"),
    "cylinder": Model("cylinder", 2, False, lambda: flat_field(2, 2 * math.pi ** 2),
                      lambda: straight_boundary(2, 4 * math.pi), _cylinder_spec, 4, 0.05,
                      "[0, pi] x circle of length 2 pi"),
    "disk": Model("disk", 2, False, lambda: flat_field(2, math.pi), round_boundary,
                  _disk_spec, 4, 0.02, "unit disk"),
    "sphere": Model("sphere", 2, True, unit_sphere_field, lambda: None, _sphere_spec, 4, 0.05,
                    "unit round 2-sphere"),
    "flat-torus": Model("flat-torus", 2, True, lambda: flat_field(2, 4 * math.pi ** 2),
                        lambda: None, _torus_spec, 2, 0.5, "square torus of side 2 pi"),
    "hermitian-torus": Model("hermitian-torus", 6, True, None, lambda: None, None,
                             description="real 6-torus with the psi-twisted Hermitian metric"),
}


def get_model(name: str) -> Model:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnsupportedModelError(
            f"unknown model {name!r}; choose from {', '.join(REGISTRY)}") from None


def default_window(model: Model, s: SpectralResolution) -> tuple[float, float]:
    """``(30 / lambda_max, t_max)`` with the model's ladder-safe ``t_max``."""
    return TRUNCATION_GUARD / s.lambda_max, model.fit_t_max
