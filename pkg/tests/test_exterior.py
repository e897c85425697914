import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heatspec.exterior import (AlternatingForm, ComplexStructure, FormError, PointMetric,
                               basis_keys, form_inner, form_norm2, hodge_star, kaehler_form,
                               pq_project, volume_form, wedge, wedge_power)

reals = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def random_form(rng, dim, deg, complex_=False):
    n = len(basis_keys(dim, deg))
    v = rng.standard_normal(n)
    if complex_:
        v = v + 1j * rng.standard_normal(n)
    return AlternatingForm.from_vector(dim, deg, v)


def random_metric(rng, dim):
    a = rng.standard_normal((dim, dim))
    return PointMetric(a @ a.T + dim * np.eye(dim))


def e(dim, *idx):
    return AlternatingForm.basis(dim, *idx)


# hand-computed values -----------------------------------------------------------


def test_volume_form_of_flat_six_torus():
    w = (e(6, 0, 1) ^ e(6, 2, 3)) ^ e(6, 4, 5)
    assert w.degree == 6 and w[(0, 1, 2, 3, 4, 5)] == 1


def test_wedge_of_one_forms_is_antisymmetric():
    assert (e(3, 0) ^ e(3, 1))[(0, 1)] == 1
    assert (e(3, 1) ^ e(3, 0))[(0, 1)] == -1
    assert (e(3, 0) ^ e(3, 0)).is_zero()


def test_basis_with_repeated_index_vanishes_and_unsorted_sign():
    assert AlternatingForm.basis(4, 1, 1).is_zero()
    assert AlternatingForm.basis(4, 2, 0, 1)[(0, 1, 2)] == 1   # (2,0,1) is an even permutation
    assert AlternatingForm.basis(4, 1, 0, 2)[(0, 1, 2)] == -1


def test_bad_keys_rejected():
    with pytest.raises(FormError):
        AlternatingForm(3, 2, {(0, 5): 1.0})
    with pytest.raises(FormError):
        AlternatingForm(3, 2, {(1, 0): 1.0})


def test_star_of_dx1dy1_on_flat_six_torus():
    g = PointMetric.identity(6)
    assert hodge_star(e(6, 0, 1), g).allclose(e(6, 2, 3, 4, 5))


def test_star_of_one_in_three_dimensions():
    g = PointMetric.identity(3)
    assert hodge_star(e(3, 0), g).allclose(e(3, 1, 2))
    assert hodge_star(e(3, 1), g).allclose(-e(3, 0, 2))
    assert hodge_star(AlternatingForm.scalar(3), g).allclose(volume_form(g))


def test_star_with_diagonal_metric():
    # g = diag(4, 1): |dx|^2 = 1/4 and vol = 2 dx^dy, so *dx = dy / 2
    g = PointMetric.diagonal([4.0, 1.0])
    star = hodge_star(e(2, 0), g)
    assert star.allclose(e(2, 1) * 0.5)
    assert np.isclose((e(2, 0) ^ star)[(0, 1)], form_norm2(e(2, 0), g) * g.sqrt_det)


def test_standard_complex_structure_and_dz():
    J = ComplexStructure.standard(1)
    dz = e(2, 0) + e(2, 1) * 1j
    assert pq_project(dz, J, 1, 0).allclose(dz)
    assert pq_project(dz, J, 0, 1).is_zero(1e-14)
    assert pq_project(dz.conj(), J, 0, 1).allclose(dz.conj())


def test_flat_kaehler_form():
    g = PointMetric.identity(6)
    omega = kaehler_form(g, ComplexStructure.standard(3))
    assert omega.allclose(e(6, 0, 1) + e(6, 2, 3) + e(6, 4, 5))
    # Omega^3 / 3! is the volume form
    assert wedge_power(omega, 3)[(0, 1, 2, 3, 4, 5)] == pytest.approx(6.0)


def test_complex_structure_must_square_to_minus_one():
    with pytest.raises(ValueError):
        ComplexStructure(np.eye(2))


# properties ----------------------------------------------------------------------


@given(st.integers(1, 6), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**31 - 1))
def test_graded_commutativity(dim, p, q, seed):
    if p + q > dim:
        return
    rng = np.random.default_rng(seed)
    a, b = random_form(rng, dim, p), random_form(rng, dim, q)
    assert wedge(a, b).allclose(wedge(b, a) * (-1) ** (p * q), atol=1e-10)


@given(st.integers(0, 2**31 - 1))
def test_wedge_associative_and_bilinear(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_form(rng, 5, d, True) for d in (1, 2, 1))
    assert ((a ^ b) ^ c).allclose(a ^ (b ^ c), atol=1e-10)
    b2 = random_form(rng, 5, 2, True)
    assert (a ^ (b + b2 * 2.5)).allclose((a ^ b) + (a ^ b2) * 2.5, atol=1e-10)


@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**31 - 1))
def test_star_defining_identity(dim, p, seed):
    p = p % (dim + 1)
    rng = np.random.default_rng(seed)
    g = random_metric(rng, dim)
    a, b = random_form(rng, dim, p, True), random_form(rng, dim, p, True)
    lhs = wedge(a, hodge_star(b.conj(), g))
    rhs = volume_form(g) * form_inner(a, b, g)
    assert lhs.allclose(rhs, atol=1e-9 * max(1.0, rhs.max_abs()))


@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**31 - 1))
def test_star_star_sign(dim, p, seed):
    p = p % (dim + 1)
    rng = np.random.default_rng(seed)
    g = random_metric(rng, dim)
    a = random_form(rng, dim, p)
    assert hodge_star(hodge_star(a, g), g).allclose(a * (-1) ** (p * (dim - p)), atol=1e-9)


@given(st.integers(0, 2**31 - 1))
def test_star_is_isometry(seed):
    rng = np.random.default_rng(seed)
    g = random_metric(rng, 4)
    a = random_form(rng, 4, 1)
    assert math.isclose(form_norm2(hodge_star(a, g), g), form_norm2(a, g), rel_tol=1e-9)


@given(st.integers(1, 3), st.integers(0, 6), st.integers(0, 2**31 - 1))
def test_type_projections_partition_unity(m_hat, deg, seed):
    dim = 2 * m_hat
    deg = deg % (dim + 1)
    rng = np.random.default_rng(seed)
    J = ComplexStructure.standard(m_hat)
    a = random_form(rng, dim, deg, True)
    parts = [pq_project(a, J, p, deg - p) for p in range(deg + 1)]
    total = AlternatingForm.zero(dim, deg)
    for p, part in enumerate(parts):
        total = total + part
        assert pq_project(part, J, p, deg - p).allclose(part, atol=1e-10)
    assert total.allclose(a, atol=1e-10)


@given(st.integers(0, 2**31 - 1))
def test_projection_types_are_mutually_orthogonal(seed):
    rng = np.random.default_rng(seed)
    J = ComplexStructure.standard(2)
    g = PointMetric.identity(4)
    a = random_form(rng, 4, 2, True)
    pieces = [pq_project(a, J, p, 2 - p) for p in range(3)]
    for x, y in itertools.combinations(pieces, 2):
        assert abs(form_inner(x, y, g)) < 1e-10


@given(st.lists(st.floats(0.2, 5.0), min_size=3, max_size=3))
def test_kaehler_form_scales_with_hermitian_blocks(h):
    g = PointMetric.diagonal([h[0], h[0], h[1], h[1], h[2], h[2]])
    J = ComplexStructure.standard(3)
    assert J.is_unitary(g)
    omega = kaehler_form(g, J)
    for a in range(3):
        assert omega[(2 * a, 2 * a + 1)] == pytest.approx(h[a])
