import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatspec.model_spectra import convergence_orders, richardson, sturm_liouville_fd


def robin_secular(lam, s):
    """Entire function whose zeros are the Robin eigenvalues on [0, pi] (equal s at both ends)."""
    if lam > 0:
        r = math.sqrt(lam)
        return (lam - s * s) * math.sin(r * math.pi) / r + 2 * s * math.cos(r * math.pi)
    if lam < 0:
        r = math.sqrt(-lam)
        return (lam - s * s) * math.sinh(r * math.pi) / r + 2 * s * math.cosh(r * math.pi)
    return -s * s * math.pi + 2 * s


def secular_roots(s, lam_lo, lam_hi, k, step=1e-3):
    roots, a = [], lam_lo
    fa = robin_secular(a, s)
    while len(roots) < k and a < lam_hi:
        b = a + step
        fb = robin_secular(b, s)
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            lo, hi, flo = a, b, fa
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = robin_secular(mid, s)
                if (fm > 0) == (flo > 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
        a, fa = b, fb
    return np.array(roots)


# frozen from the secular-equation oracle above
FROZEN = {
    0.1: [-0.06713915378339907, 0.8685305316217222, 3.8717405164212457],
    0.5: [-0.4217519166920144, 0.25, 3.349720565784947],
}


@pytest.mark.parametrize("s", sorted(FROZEN))
def test_oracle_reproduces_frozen_roots(s):
    assert np.allclose(secular_roots(s, -2.0, 5.0, 3), FROZEN[s], atol=1e-10)


@pytest.mark.parametrize("s", sorted(FROZEN))
def test_robin_lowest_eigenvalue(s):
    lam = sturm_liouville_fd(math.pi, "robin", 4096, 3, s=s).expanded()
    assert abs(lam[0] - FROZEN[s][0]) <= 1e-6
    assert lam[0] < 0 < lam[1]


def test_robin_second_order_convergence():
    s = 0.1
    exact = secular_roots(s, -1.0, 30.0, 5)
    spectra = [sturm_liouville_fd(math.pi, "robin", n, 5, s=s) for n in (256, 512, 1024, 2048)]
    orders = convergence_orders(spectra, exact)
    assert np.all(orders[-1] >= 1.9)


def test_richardson_improves_robin():
    s = 0.5
    exact = secular_roots(s, -1.0, 30.0, 5)
    coarse = sturm_liouville_fd(math.pi, "robin", 1024, 5, s=s)
    fine = sturm_liouville_fd(math.pi, "robin", 2048, 5, s=s)
    rich = richardson(coarse, fine)
    assert np.all(np.abs(rich.expanded() - exact) < 0.05 * np.abs(fine.expanded() - exact))
    with pytest.raises(ValueError):
        richardson(fine, coarse)


@given(st.integers(16, 400), st.integers(1, 6))
@settings(max_examples=30)
def test_dirichlet_error_bound(n, k):
    lam = sturm_liouville_fd(math.pi, "dirichlet", n, k).expanded()
    h = math.pi / n
    j = np.arange(1, lam.size + 1)
    # the discrete symbol is exactly (4/h^2) sin^2(jh/2)
    assert np.allclose(lam, 4 / h ** 2 * np.sin(j * h / 2) ** 2, rtol=1e-11)
    assert np.all(np.abs(lam - j ** 2) <= h ** 2 * j ** 4 / 12 + 1e-10)


def test_neumann_zero_mode():
    lam = sturm_liouville_fd(math.pi, "neumann", 1000, 4).expanded()
    assert abs(lam[0]) <= 1e-8
    assert np.allclose(lam[1:], [1, 4, 9], rtol=1e-4)


def test_robin_zero_s_is_neumann():
    a = sturm_liouville_fd(math.pi, "robin", 300, 6, s=0.0).expanded()
    b = sturm_liouville_fd(math.pi, "neumann", 300, 6).expanded()
    assert np.allclose(a, b, atol=1e-12)


def test_asymmetric_robin_pair():
    # s = (0, s1) and (s1, 0) are mirror images
    a = sturm_liouville_fd(math.pi, "robin", 512, 5, s=(0.0, 0.3)).expanded()
    b = sturm_liouville_fd(math.pi, "robin", 512, 5, s=(0.3, 0.0)).expanded()
    assert np.allclose(a, b, atol=1e-10)


def test_variable_coefficients_by_change_of_variables():
    # constant p = c multiplies eigenvalues by c, constant w = c divides them
    base = sturm_liouville_fd(2.0, "dirichlet", 400, 4).expanded()
    scaled_p = sturm_liouville_fd(2.0, "dirichlet", 400, 4, p=lambda x: 3.0 + 0 * x).expanded()
    scaled_w = sturm_liouville_fd(2.0, "dirichlet", 400, 4, w=lambda x: 3.0 + 0 * x).expanded()
    assert np.allclose(scaled_p, 3 * base) and np.allclose(scaled_w, base / 3)


def test_liouville_transform_oracle():
    # p = w = e^{x}: substituting u = e^{-x/2} v gives -v'' + v/4 = lam v, so lam = (k pi/L)^2 + 1/4
    L = 1.5
    lam = sturm_liouville_fd(L, "dirichlet", 2000, 4, p=np.exp, w=np.exp).expanded()
    exact = (np.arange(1, 5) * math.pi / L) ** 2 + 0.25
    assert np.allclose(lam, exact, rtol=1e-5)


def test_bad_inputs():
    with pytest.raises(ValueError):
        sturm_liouville_fd(math.pi, "periodic", 100, 3)
    with pytest.raises(ValueError):
        sturm_liouville_fd(math.pi, "dirichlet", 2, 3)
    with pytest.raises(ValueError):
        sturm_liouville_fd(math.pi, "dirichlet", 100, 3, p=lambda x: -1 + 0 * x)
