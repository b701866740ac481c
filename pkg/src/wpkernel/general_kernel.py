"""Szego-type kernel asymptotics for admissible potentials.

The reproducing kernel of the weighted polynomial space obeys, for z, w in
a shrinking neighbourhood of the closed exterior domain and
|phi(z) conj(phi(w)) - 1| >= eta,

    K_n(z,w) ~= sqrt(2 pi n)
                * e^{(n/2)(QQ(z) + conj(QQ(w))) - (n/2)(Q(z) + Q(w))}
                * e^{(1/2)(HH(z) + conj(HH(w)))}
                * (phi(z) conj(phi(w)))^n * S(z, w),

with S the exterior Szego kernel.  On the boundary the unimodular cocycle
c_n(z,w) carries all the oscillation and the modulus is
sqrt(2 pi n) LapQ(z)^{1/4} LapQ(w)^{1/4} |S(z,w)|.

The same data yields the quasipolynomials

    W#_{j,n}(z) = (n/2pi)^{1/4} e^{HH_t(z)/2} sqrt(phi_t'(z)) phi_t(z)^j
                  e^{(n/2) QQ_t(z)} e^{-(n/2) Q(z)},      t = j/n,

which approximate the weighted orthonormal polynomials for degrees near n;
summing their products over j >= n theta_n gives the tail kernel, a faithful
stand-in for the full kernel near the exterior.  The Gaussian belt density
for the Berezin measure and the decay diagnostics for low degrees complete
the desk-scale checks of this regime.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import BeltError, DomainError, RegimeError
from .hardy import harmonic_measure_density, szego_kernel
from .potential import AdmissiblePotential, BoundaryPoint, harmonic_extension
from .scaled_numerics import LogComplex, _norm_arg, lc_mul, lc_sum


@dataclass(frozen=True)
class SequenceCuts:
    """Degree and belt cutoffs used by the tail-kernel machinery."""

    n: int
    theta_n: float  # tail starts at degree n * theta_n
    delta_n: float  # belt half-width M sqrt(log log n / n)
    eps_n: float    # log n / sqrt(n)


def sequence_cuts(n: int, M: float = 1.0) -> SequenceCuts:
    if n < 3:
        raise DomainError("cut sequences need n >= 3 (log log n must be positive)")
    log_n = math.log(n)
    return SequenceCuts(
        n=n,
        theta_n=1.0 - log_n / math.sqrt(n),
        delta_n=M * math.sqrt(math.log(log_n) / n),
        eps_n=log_n / math.sqrt(n),
    )


@dataclass(frozen=True)
class KernelAsymptotic:
    n: int
    z: complex
    w: complex
    value: LogComplex
    regime: str          # "boundary" or "exterior_belt"
    beta_claimed: float  # decay exponent reported for the relative error


def _require_belt(pot: AdmissiblePotential, n: int, z: complex, label: str):
    cuts = sequence_cuts(n, pot.delta_M)
    d = pot.dist_to_exterior(z)
    if d > cuts.delta_n:
        raise RegimeError(
            f"{label} = {z} lies {d:.4f} inside the droplet; belt width is {cuts.delta_n:.4f}"
        )


def kernel_asymptotic(pot: AdmissiblePotential, n: int, z: complex, w: complex,
                      eta: float = 0.05, beta_claimed: float = 0.2) -> KernelAsymptotic:
    """Leading Szego-type approximation of K_n(z, w) in log-polar form."""
    z = complex(z)
    w = complex(w)
    _require_belt(pot, n, z, "z")
    _require_belt(pot, n, w, "w")
    phi_z = pot.phi(z, 1.0)
    phi_w = pot.phi(w, 1.0)
    prod = phi_z * phi_w.conjugate()
    if abs(prod - 1.0) < eta:
        raise RegimeError(
            f"|phi(z) conj(phi(w)) - 1| = {abs(prod - 1.0):.4f} < eta = {eta}"
        )
    expo = (
        0.5 * n * (pot.script_Q(z, 1.0) + pot.script_Q(w, 1.0).conjugate())
        - 0.5 * n * (float(pot.Q(z)) + float(pot.Q(w)))
        + 0.5 * (pot.script_H(z, 1.0) + pot.script_H(w, 1.0).conjugate())
    )
    s = szego_kernel(pot, z, w)
    log_mag = (
        0.5 * math.log(2.0 * math.pi * n)
        + expo.real
        + n * math.log(abs(prod))
        + math.log(abs(s))
    )
    arg = expo.imag + _norm_arg(n * math.atan2(prod.imag, prod.real)) + math.atan2(s.imag, s.real)
    boundary = abs(abs(phi_z) - 1.0) < 1e-9 and abs(abs(phi_w) - 1.0) < 1e-9
    return KernelAsymptotic(
        n=n, z=z, w=w,
        value=LogComplex(log_mag, arg),
        regime="boundary" if boundary else "exterior_belt",
        beta_claimed=beta_claimed,
    )


def cocycle(pot: AdmissiblePotential, n: int, z: complex, w: complex,
            boundary_tol: float = 1e-8) -> LogComplex:
    """Unimodular factor c_n(z, w) of the boundary correlation."""
    z = complex(z)
    w = complex(w)
    for pt, name in ((z, "z"), (w, "w")):
        if abs(abs(pot.phi(pt, 1.0)) - 1.0) > boundary_tol:
            raise DomainError(f"cocycle needs {name} on the boundary")
    prod = pot.phi(z, 1.0) * pot.phi(w, 1.0).conjugate()
    arg = (
        _norm_arg(n * math.atan2(prod.imag, prod.real))
        + 0.5 * n * (pot.script_Q(z, 1.0).imag - pot.script_Q(w, 1.0).imag)
        + 0.5 * (pot.script_H(z, 1.0).imag - pot.script_H(w, 1.0).imag)
    )
    return LogComplex(n * math.log(abs(prod)), _norm_arg(arg))


def boundary_correlation_modulus(pot: AdmissiblePotential, n: int,
                                 z: complex, w: complex) -> float:
    """sqrt(2 pi n) LapQ(z)^{1/4} LapQ(w)^{1/4} |S(z, w)| for distinct boundary points."""
    z = complex(z)
    w = complex(w)
    if abs(z - w) < 1e-12:
        raise DomainError("boundary correlation modulus is off-diagonal only")
    return (
        math.sqrt(2.0 * math.pi * n)
        * pot.laplacian(z) ** 0.25
        * pot.laplacian(w) ** 0.25
        * abs(szego_kernel(pot, z, w))
    )


@dataclass(frozen=True)
class BeltDensity:
    p: BoundaryPoint
    ell: float
    density: float  # per (arclength x normal length)


def berezin_belt_density(pot: AdmissiblePotential, n: int, z: complex,
                         p: BoundaryPoint, ell: float,
                         allow_outside_belt: bool = False) -> BeltDensity:
    """Gaussian belt density P_z(p) sqrt(4 n LapQ(p)/2pi) e^{-2 n LapQ(p) ell^2}."""
    cuts = sequence_cuts(n, pot.delta_M)
    if abs(ell) > cuts.delta_n and not allow_outside_belt:
        raise BeltError(
            f"|ell| = {abs(ell):.4f} exceeds the belt half-width {cuts.delta_n:.4f}"
        )
    lap = pot.laplacian(p.p)
    dens = (
        harmonic_measure_density(pot, z, p.p)
        * math.sqrt(4.0 * n * lap / (2.0 * math.pi))
        * math.exp(-2.0 * n * lap * ell * ell)
    )
    return BeltDensity(p=p, ell=ell, density=dens)


# ---------------------------------------------------------------------------
# Quasipolynomials and the tail kernel
# ---------------------------------------------------------------------------


def quasipolynomial(pot: AdmissiblePotential, n: int, j: int, z: complex,
                    tau_floor: float | None = None) -> LogComplex:
    """Closed-form approximate orthonormal weighted polynomial W#_{j,n}(z).

    tau(j) = j/n selects the droplet family member; callers that legitimately
    need tau below the potential's formal window (the tail sum does) pass an
    explicit tau_floor.
    """
    tau = j / n
    floor = pot.tau0 if tau_floor is None else tau_floor
    if tau < floor - 1e-12:
        raise DomainError(f"tau(j) = {tau:.4f} below the admissible floor {floor:.4f}")
    if tau > 1.0 + 1e-12:
        raise DomainError("degrees beyond n are not part of the space")
    sq = pot.script_Q(z, tau)
    sh = pot.script_H(z, tau)
    sdphi = pot.sqrt_dphi(z, tau)
    phi = pot.phi(z, tau)
    log_mag = (
        0.25 * math.log(n / (2.0 * math.pi))
        + 0.5 * sh.real
        + math.log(abs(sdphi))
        + j * math.log(abs(phi))
        + 0.5 * n * sq.real
        - 0.5 * n * float(pot.Q(z))
    )
    arg = (
        0.5 * sh.imag
        + math.atan2(sdphi.imag, sdphi.real)
        + _norm_arg(j * math.atan2(phi.imag, phi.real))
        + 0.5 * n * sq.imag
    )
    return LogComplex(log_mag, arg)


def tail_kernel(pot: AdmissiblePotential, n: int, z: complex, w: complex) -> LogComplex:
    """Sum of quasipolynomial products over the top degree range j >= n theta_n."""
    z = complex(z)
    w = complex(w)
    _require_belt(pot, n, z, "z")
    _require_belt(pot, n, w, "w")
    cuts = sequence_cuts(n, pot.delta_M)
    j_start = max(0, int(math.ceil(n * cuts.theta_n - 1e-9)))
    floor = max(pot.tau_floor, j_start / n)
    terms = []
    for j in range(j_start, n):
        wz = quasipolynomial(pot, n, j, z, tau_floor=floor)
        ww = quasipolynomial(pot, n, j, w, tau_floor=floor)
        terms.append(lc_mul(wz, ww.conj()))
    return lc_sum(terms)


def f_factor(pot: AdmissiblePotential, tau: float, z: complex) -> complex:
    """F_tau(z) = (phi_tau(z)/phi(z)) e^{(QQ_tau - QQ)(z) / (2 tau)}.

    Appears as the per-degree ratio in the tail sum; F_1 is identically 1
    and F_tau(inf) > 0.
    """
    z = complex(z)
    ratio = pot.phi(z, tau) / pot.phi(z, 1.0)
    diff = (pot.script_Q(z, tau) - pot.script_Q(z, 1.0)) / (2.0 * tau)
    return ratio * cmath.exp(diff)


@dataclass(frozen=True)
class LowDegreeReport:
    n: int
    z: complex
    j_cut: int
    max_scaled: float  # max_{j <= n theta_n} |W_{j,n}(z)| e^{(n/2)(Q - Qcheck)(z)}
    argmax_j: int


def _ginibre_obstacle(z: complex) -> float:
    """Obstacle function of Q = |z|^2 at mass 1: Q inside, 1 + log|z|^2 outside."""
    m = abs(z)
    return m * m if m <= 1.0 else 1.0 + 2.0 * math.log(m)


def lowdeg_bound_check(pot: AdmissiblePotential, n: int, z: complex) -> LowDegreeReport:
    """Scaled size of the discarded low-degree terms (Ginibre closed form).

    The weighted orthonormal polynomials of Q = |z|^2 are
    sqrt(n^{j+1}/j!) z^j e^{-n|z|^2/2}; degrees below n theta_n are
    uniformly exp(-c log^2 n) small near the exterior after removing the
    obstacle-function envelope.
    """
    if not getattr(pot, "name", "") == "ginibre":
        raise DomainError("closed-form low-degree check is specific to the Ginibre potential")
    z = complex(z)
    _require_belt(pot, n, z, "z")
    cuts = sequence_cuts(n, pot.delta_M)
    j_cut = int(math.floor(n * cuts.theta_n))
    envelope = 0.5 * n * (abs(z) ** 2 - _ginibre_obstacle(z))
    best = -math.inf
    best_j = 0
    log_abs_z = math.log(abs(z)) if z != 0 else -math.inf
    for j in range(j_cut + 1):
        log_w = (
            0.5 * ((j + 1) * math.log(n) - math.lgamma(j + 1.0))
            + j * log_abs_z
            - 0.5 * n * abs(z) ** 2
        )
        val = log_w + envelope
        if val > best:
            best = val
            best_j = j
    return LowDegreeReport(n=n, z=z, j_cut=j_cut,
                           max_scaled=math.exp(best) if best > -745 else 0.0,
                           argmax_j=best_j)


def ginibre_orthonormal_logabs(n: int, j: int, z: complex) -> float:
    """log |W_{j,n}(z)| for the Ginibre closed-form basis."""
    z = complex(z)
    log_abs_z = math.log(abs(z)) if z != 0 else -math.inf
    return (
        0.5 * ((j + 1) * math.log(n) - math.lgamma(j + 1.0))
        + j * log_abs_z
        - 0.5 * n * abs(z) ** 2
    )


def h_function(pot: AdmissiblePotential, z: complex, nodes: int = 512) -> complex:
    """Holomorphic h with Re h = -|phi'|^2/(4 LapQ) on the boundary, Im h(inf) = 0.

    Controls the Gaussian decay exponent of the per-degree tail ratios:
    log a_j ~= n (h(z) + conj(h(w))) (1 - j/n)^2 near j = n.
    """
    ext = harmonic_extension(
        pot, 1.0, lambda p: -abs(pot.dphi(p, 1.0)) ** 2 / (4.0 * pot.laplacian(p)),
        nodes=nodes,
    )
    return ext(complex(z))
