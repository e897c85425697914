"""Fit the Dirichlet disk heat trace and compare a0..a3 with the closed forms.

Also scans the number of Bessel modes to show how the usable window opens up.

    python3 scripts/verify_disk.py --counts 2500 5000 10000
"""
import argparse
import math
import time

from heatspec.geometry import flat_field, round_boundary
from heatspec.heat_coefficients import OperatorData, dirichlet_an
from heatspec.model_spectra import disk_dirichlet_spectrum
from heatspec.models import default_window, get_model
from heatspec.trace_fit import fit_spectrum, geometric_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--counts", type=int, nargs="+", default=[1000, 2500, 5000, 10000])
    ap.add_argument("--n-max", type=int, default=4)
    args = ap.parse_args()

    op = OperatorData.scalar_laplacian(2)
    exact = [dirichlet_an(n, flat_field(2, math.pi), round_boundary(), op).value for n in range(4)]
    print("formula   " + "  ".join(f"a{n}={v: .6f}" for n, v in enumerate(exact)))
    for count in args.counts:
        t0 = time.perf_counter()
        s = disk_dirichlet_spectrum(count)
        window = default_window(get_model("disk"), s)
        try:
            fit = fit_spectrum(s, args.n_max, geometric_grid(*window))
        except ValueError as exc:
            print(f"K={count:5d} window=[{window[0]:.2e}, {window[1]:.2e}] no usable window: {exc}")
            continue
        errs = [fit.estimate(n) - exact[n] for n in range(4)]
        print(f"K={count:5d} window=[{window[0]:.2e}, {window[1]:.2e}] "
              f"cond={fit.condition_number:.1e} "
              + " ".join(f"d{n}={e:+.1e}" for n, e in enumerate(errs))
              + f"  ({time.perf_counter() - t0:.2f} s)")


if __name__ == "__main__":
    main()
