"""Robin interval: finite-difference convergence and the fitted a2 against 2s/sqrt(pi)."""
import argparse
import math

import numpy as np
from scipy.optimize import brentq

from heatspec.geometry import flat_field, interval_boundary
from heatspec.heat_coefficients import BoundaryCondition, OperatorData, heat_coefficient
from heatspec.model_spectra import convergence_orders, sturm_liouville_fd
from heatspec.models import SpectrumParams, default_window, get_model
from heatspec.trace_fit import fit_spectrum, geometric_grid


def secular(lam, s):
    r = math.sqrt(abs(lam))
    if lam > 0:
        return (lam - s * s) * math.sin(r * math.pi) / r + 2 * s * math.cos(r * math.pi)
    if lam < 0:
        return (lam - s * s) * math.sinh(r * math.pi) / r + 2 * s * math.cosh(r * math.pi)
    return 2 * s - s * s * math.pi


def oracle(s, k, step=1e-2):
    grid = np.arange(-4.0, 60.0, step)
    vals = [secular(x, s) for x in grid]
    roots = [brentq(secular, a, b, args=(s,), xtol=1e-15)
             for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]) if fa * fb < 0]
    return np.array(roots[:k])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, nargs="+", default=[0.1, 0.5])
    args = ap.parse_args()
    model = get_model("interval")
    op = OperatorData.scalar_laplacian(1)
    for s in args.s:
        exact = oracle(s, 5)
        meshes = [256, 512, 1024, 2048, 4096]
        spectra = [sturm_liouville_fd(math.pi, "robin", n, 5, s=s) for n in meshes]
        print(f"s = {s}: oracle eigenvalues {np.array2string(exact, precision=8)}")
        print("  empirical orders (last halving):",
              np.array2string(convergence_orders(spectra, exact)[-1], precision=3))
        print(f"  lowest at n=4096: error {abs(spectra[-1].expanded()[0] - exact[0]):.2e}")
        bc = BoundaryCondition.robin(s)
        spec = model.spectrum(bc, SpectrumParams())
        fit = fit_spectrum(spec, 4, geometric_grid(*default_window(model, spec)))
        a2 = heat_coefficient(2, flat_field(1, math.pi), interval_boundary(), op, bc).value
        print(f"  a2 fitted {fit.estimate(2):.6f} +/- {fit.error(2):.1e}, formula {a2:.6f}")


if __name__ == "__main__":
    main()
