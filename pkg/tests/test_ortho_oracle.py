import cmath
import math

import numpy as np
import pytest

from wpkernel import (
    PrecisionError,
    compute_moments,
    ginibre_kernel_exact,
    kernel_oracle,
    make_elliptic_ginibre,
    make_ginibre,
    orthonormalize,
    pointwise_bound_check,
)
from wpkernel.ortho_oracle import kernel_oracle_diag
from wpkernel.scaled_numerics import quad_radial, quad_trapezoid_periodic


def rel_lc(a, b):
    return abs(cmath.exp(complex(a.log_mag - b.log_mag, a.arg - b.arg)) - 1.0)


@pytest.fixture(scope="module")
def gin():
    return make_ginibre()


@pytest.fixture(scope="module")
def ell():
    return make_elliptic_ginibre(1.0, 3.0)


@pytest.fixture(scope="module")
def gin_basis(gin):
    return orthonormalize(compute_moments(gin, 40, 39))


def test_ginibre_moments_closed_form(gin):
    gram = compute_moments(gin, 40, 40)
    diag = np.asarray(gram.moments)
    for j in range(41):
        expected = math.exp(math.lgamma(j + 1.0) - (j + 1) * math.log(40.0))
        assert diag[j] == pytest.approx(expected, rel=1e-10)
    assert gram.diagonal


def test_diagonal_orthonormalization(gin):
    basis = orthonormalize(compute_moments(gin, 40, 40))
    C = np.asarray(basis.coeffs)
    assert np.allclose(C, np.diag(np.diagonal(C)))
    for j in (0, 7, 23, 40):
        expected = math.exp(0.5 * ((j + 1) * math.log(40.0) - math.lgamma(j + 1.0)))
        assert C[j, j] == pytest.approx(expected, rel=1e-9)
        assert C[j, j] > 0
    assert basis.gram_residual < 1e-12


def test_oracle_matches_exact_kernel(gin_basis):
    rng = np.random.default_rng(7)
    for _ in range(20):
        z = complex(*rng.uniform(-1.4, 1.4, 2))
        w = complex(*rng.uniform(-1.4, 1.4, 2))
        ko = kernel_oracle(gin_basis, z, w)
        ke = ginibre_kernel_exact(40, z, w).value
        assert rel_lc(ko, ke) < 1e-8


def test_oracle_hermitian_and_reproducing(gin_basis, gin):
    z, w = 0.8 + 0.1j, -0.4 + 0.6j
    a = kernel_oracle(gin_basis, z, w)
    b = kernel_oracle(gin_basis, w, z)
    assert a.log_mag == pytest.approx(b.log_mag, abs=1e-13)
    assert a.arg == pytest.approx(-b.arg, abs=1e-13)
    # reproducing identity: integral of |K(z, .)|^2 equals K(z, z)
    basis30 = orthonormalize(compute_moments(gin, 30, 29))
    radial = quad_radial(1.0 + 12.0 / math.sqrt(30), 1.0 / math.sqrt(30))
    angular = quad_trapezoid_periodic(160)
    acc = 0.0
    for r, wr in zip(radial.nodes, radial.weights):
        ws = r * np.exp(1j * angular.nodes)
        vals = np.array([math.exp(2.0 * kernel_oracle(basis30, z, wv).log_mag)
                         for wv in ws])
        acc += wr * r * float(np.sum(angular.weights * vals)) / math.pi
    assert acc == pytest.approx(kernel_oracle_diag(basis30, z), rel=1e-6)


def test_elliptic_parity_structure(ell):
    gram = compute_moments(ell, 16, 12)
    mom = np.asarray(gram.moments)
    assert gram.parity
    for j in range(13):
        for k in range(13):
            if (j - k) % 2 == 1:
                assert mom[j, k] == 0.0
    assert np.max(np.abs(mom - mom.conj().T)) == 0.0  # mirrored assembly
    basis = orthonormalize(gram)
    C = np.asarray(basis.coeffs)
    for j in range(13):
        for k in range(13):
            if (j - k) % 2 == 1:
                assert C[j, k] == 0.0
    assert basis.gram_residual < 1e-8


def test_native_refuses_ill_conditioned(ell):
    gram = compute_moments(ell, 60, 59)
    assert gram.cond_estimate > 1e12
    with pytest.raises(PrecisionError):
        orthonormalize(gram)


def test_extended_small_cross_check(ell):
    # extended pipeline agrees with native where both are trustworthy
    native = orthonormalize(compute_moments(ell, 16, 12))
    extended = orthonormalize(compute_moments(ell, 16, 12, mode="extended", dps=40))
    z, w = 1.5, 1.1 + 0.4j
    a = kernel_oracle(native, z, w)
    b = kernel_oracle(extended, z, w)
    assert rel_lc(a, b) < 1e-7
    assert extended.gram_residual < 1e-20


def test_quadrature_refinement_stability(gin):
    base = orthonormalize(compute_moments(gin, 40, 39))
    fine = orthonormalize(compute_moments(gin, 40, 39, m_theta=512))
    z = 1.2
    a = kernel_oracle_diag(base, z)
    b = kernel_oracle_diag(fine, z)
    assert abs(a / b - 1.0) < 1e-8


def test_pointwise_bound_report():
    # top-degree envelope stays O(1) across a ladder at an exterior point
    for n in (20, 40, 80):
        report = pointwise_bound_check(n, [n - 1], [1.5])
        assert report.max_ratio <= 2.0
    # on the tau-boundary the amplitude runs at the n^{-1/4} scale
    n = 100
    j = 64
    tau = j / n
    report = pointwise_bound_check(n, [j], [math.sqrt(tau)])
    assert report.max_ratio <= 2.0 / n ** 0.25
    # deep interior point dominated trivially
    report = pointwise_bound_check(n, [10, 40], [0.0])
    assert report.max_ratio < 1.0


def test_degree_cannot_exceed_n(gin):
    from wpkernel.errors import DomainError

    with pytest.raises(DomainError):
        compute_moments(gin, 10, 11)
