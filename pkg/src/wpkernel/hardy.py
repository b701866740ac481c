"""Szego kernel, Hardy basis, and harmonic measure of the exterior domain.

For the exterior component U of the droplet complement with normalized
conformal map phi: U -> {|w| > 1}, the Hardy space of exterior-vanishing
holomorphic functions with boundary L^2 norm has orthonormal basis

    psi_j(z) = sqrt(phi'(z)) / (sqrt(2 pi) phi(z)^j),   j >= 1,

and reproducing kernel

    S(z, w) = (1/2pi) sqrt(phi'(z)) conj(sqrt(phi'(w)))
              / (phi(z) conj(phi(w)) - 1).

Harmonic measure of U at z has arclength density given by the conformal
pullback of the exterior Poisson kernel of the disc.  All boundary
integrals use the pullback parametrization p = chi(e^{i theta}) with
|dp| = |chi'| dtheta and the periodic trapezoid rule, which is spectrally
accurate on the analytic boundaries supplied by the potential module.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DomainError, PoleError
from .potential import AdmissiblePotential

_CL_U_TOL = 1e-8


def _require_cl_U(pot: AdmissiblePotential, z: complex, tol: float = _CL_U_TOL):
    mod = abs(pot.phi(z, 1.0))
    if mod < 1.0 - tol:
        raise DomainError(f"point {z} lies inside the droplet (|phi| = {mod:.6f} < 1)")
    return mod


def szego_kernel(pot: AdmissiblePotential, z: complex, w: complex) -> complex:
    """Closed-form Szego kernel S(z, w) on the closed exterior domain."""
    z = complex(z)
    w = complex(w)
    _require_cl_U(pot, z)
    _require_cl_U(pot, w)
    denom = pot.phi(z, 1.0) * pot.phi(w, 1.0).conjugate() - 1.0
    if abs(denom) < 1e-12:
        raise PoleError("phi(z) conj(phi(w)) = 1: Szego kernel pole")
    return pot.sqrt_dphi(z, 1.0) * pot.sqrt_dphi(w, 1.0).conjugate() / (2.0 * math.pi * denom)


def szego_basis(pot: AdmissiblePotential, j: int, z: complex) -> complex:
    """Orthonormal Hardy basis element psi_j(z), j >= 1; vanishes at infinity."""
    if j < 1:
        raise DomainError("basis indices start at j = 1")
    z = complex(z)
    _require_cl_U(pot, z)
    phi = pot.phi(z, 1.0)
    # phi^{-j} through the exponential to avoid overflow at large j
    inv_pow = cmath.exp(-j * cmath.log(phi))
    return pot.sqrt_dphi(z, 1.0) * inv_pow / math.sqrt(2.0 * math.pi)


def szego_kernel_series(pot: AdmissiblePotential, z: complex, w: complex,
                        terms: int = 200) -> complex:
    """Partial basis sum sum_{j<=terms} psi_j(z) conj(psi_j(w)).

    Converges geometrically to S(z, w) with ratio |phi(z) conj(phi(w))|^{-1}.
    """
    acc = 0j
    for j in range(1, terms + 1):
        acc += szego_basis(pot, j, z) * szego_basis(pot, j, w).conjugate()
    return acc


def harmonic_measure_density(pot: AdmissiblePotential, z: complex, p: complex) -> float:
    """Arclength density P_z(p) of harmonic measure of U at an interior z of U."""
    z = complex(z)
    p = complex(p)
    phi_z = pot.phi(z, 1.0)
    if abs(phi_z) <= 1.0 + 1e-12:
        raise DomainError("harmonic measure density needs z strictly in the exterior domain")
    phi_p = pot.phi(p, 1.0)
    dphi_p = pot.dphi(p, 1.0)
    return (abs(phi_z) ** 2 - 1.0) / (2.0 * math.pi * abs(phi_z - phi_p) ** 2) * abs(dphi_p)


def harmonic_measure_mass(pot: AdmissiblePotential, z: complex, nodes: int = 512) -> float:
    """Quadrature of P_z over the boundary; equals 1 for any exterior z."""
    _, wts, pts, speed = pot.boundary_grid(nodes, 1.0)
    dens = np.array([harmonic_measure_density(pot, z, p) for p in pts])
    return float(np.sum(wts * dens * speed))


def harmonic_measure_integral(pot: AdmissiblePotential, z: complex, f,
                              nodes: int = 512) -> complex:
    """omega_z(f) = integral of f against harmonic measure at z."""
    _, wts, pts, speed = pot.boundary_grid(nodes, 1.0)
    dens = np.array([harmonic_measure_density(pot, z, p) for p in pts])
    vals = np.array([f(p) for p in pts], dtype=complex)
    return complex(np.sum(wts * dens * speed * vals))


def szego_reproducing_check(pot: AdmissiblePotential, f_index: int, z: complex,
                            nodes: int = 512) -> float:
    """| <psi_f, S(., z)>_boundary - psi_f(z) |; zero by the reproducing property."""
    _, wts, pts, speed = pot.boundary_grid(nodes, 1.0)
    vals = np.array([
        szego_basis(pot, f_index, p) * szego_kernel(pot, p, z).conjugate() for p in pts
    ])
    integral = complex(np.sum(wts * speed * vals))
    return abs(integral - szego_basis(pot, f_index, z))


def szego_projection_of_constant(pot: AdmissiblePotential, z: complex,
                                 nodes: int = 512) -> float:
    """|<1, S(., z)>|; constants are orthogonal to the exterior Hardy space."""
    _, wts, pts, speed = pot.boundary_grid(nodes, 1.0)
    vals = np.array([szego_kernel(pot, p, z).conjugate() for p in pts])
    return abs(complex(np.sum(wts * speed * vals)))


def basis_gram_matrix(pot: AdmissiblePotential, j_max: int, nodes: int = 512) -> np.ndarray:
    """Boundary Gram matrix of psi_1..psi_jmax; identity up to quadrature error."""
    _, wts, pts, speed = pot.boundary_grid(nodes, 1.0)
    basis = np.array([[szego_basis(pot, j, p) for p in pts] for j in range(1, j_max + 1)])
    scaled = basis * (wts * speed)[None, :]
    return scaled @ basis.conj().T
