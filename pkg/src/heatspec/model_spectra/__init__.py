"""Model spectra, heat traces and discrete operators on the Hermitian torus."""

from .bessel import BesselZeroError, bessel_zeros, disk_dirichlet_spectrum
from .spectra import (TRUNCATION_GUARD, IncompleteSpectrumError, SpectralResolution,
                      TruncationError, circle_spectrum, heat_trace, heat_traces,
                      interval_spectrum, min_valid_t, product_spectrum, read_spectrum,
                      sphere_spectrum, weyl_tail, write_spectrum)
from .sturm import convergence_orders, richardson, sturm_liouville_fd
from .torus import (GridOperator, TrigTestFunction, hermitian_torus_box0,
                    hermitian_torus_delta0, operator_compare)
