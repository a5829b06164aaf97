"""Closed-form single-photon results.

Decay rates for each frequency pair, the evolved density kernel for a
|1>-polarized Gaussian input, averaged pulse-intensity profiles, and the
frequency / polarization / total purities, all as explicit functions of
the dimensionless groups L/L_c and nu = omega0/kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DispersionProfile,
    FiberParameters,
    FrequencyGrid,
    PulseEnvelope,
    SinglePhotonDensity,
    make_dispersion,
)

__all__ = [
    "SingleDecayRates",
    "PurityReport",
    "decay_rates_single",
    "evolve_single_analytic",
    "intensity_profiles",
    "fitted_width",
    "purities",
    "purity_numeric",
]


@dataclass(frozen=True)
class SingleDecayRates:
    """Decay rates (units 1/length) at one frequency pair.

    lambda1 governs the trace part of the polarization block (frequency
    coherence), lambda2 the traceless part (polarization coherence).
    """

    lambda1: float
    lambda2: float


def decay_rates_single(profile: DispersionProfile, omega, omega_prime):
    """Decay rates for the kernel element at (omega, omega').

    lambda1 = (3 eta^2/4) (f - f')^2
    lambda2 = (eta^2/4) (3 f^2 + 3 f'^2 + 2 f f')

    Accepts scalars or arrays; arrays return arrays, scalars return a
    SingleDecayRates record.
    """
    f = profile(omega)
    fp = profile(omega_prime)
    e2 = profile.eta**2
    lam1 = 0.75 * e2 * (f - fp) ** 2
    lam2 = 0.25 * e2 * (3.0 * f**2 + 3.0 * fp**2 + 2.0 * f * fp)
    if np.ndim(lam1) == 0:
        return SingleDecayRates(lambda1=float(lam1), lambda2=float(lam2))
    return lam1, lam2


def evolve_single_analytic(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> SinglePhotonDensity:
    """Evolved kernel for the |1>-polarized Gaussian input at length L.

    rho_11 = (phi phi*/2)(e^{-lambda1 L} + e^{-lambda2 L})
    rho_00 = (phi phi*/2)(e^{-lambda1 L} - e^{-lambda2 L})
    rho_10 = rho_01 = 0

    l_over_lc is the propagation length in units of the decoherence
    length of ``params``.
    """
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    if dispersion is None:
        dispersion = make_dispersion(params)
    length = l_over_lc * params.decoherence_length
    phi = envelope.sampled(grid)
    outer = np.outer(phi, np.conj(phi))
    lam1, lam2 = decay_rates_single(dispersion, grid.nodes[:, None], grid.nodes[None, :])
    kernel = np.zeros((2, 2, grid.n, grid.n), dtype=np.complex128)
    kernel[0, 0] = 0.5 * outer * (np.exp(-lam1 * length) + np.exp(-lam2 * length))
    kernel[1, 1] = 0.5 * outer * (np.exp(-lam1 * length) - np.exp(-lam2 * length))
    return SinglePhotonDensity(kernel=kernel, grid=grid)


def intensity_profiles(params: FiberParameters, nu: float, l_over_lc: float, tau):
    """Ensemble-averaged output intensities <I(tau)>_1 and <I(tau)>_0.

    Valid for linear dispersion only. kappa = omega0/nu; tau is measured
    from the pulse center in the comoving frame. The overall constant is
    fixed so the L=0 total tau-integral equals 2*pi/kappa, matching the
    printed sqrt(pi/2) prefactors:

        <I>_{1,0} = sqrt(pi/2) * (T1 +- T2)
        T1 = exp[-k^2 t^2 / (2(1+6l))] / sqrt(1+6l)
        T2 = exp[-k^2 t^2 / (2(1+2l)) - 8(L/L_c)/(1+4l)] / sqrt((1+2l)(1+4l))

    with l = L/(L_c nu^2).
    """
    if params.sigma2 != 0.0:
        raise ValueError("intensity profiles are only defined for a linear dispersion profile")
    if nu <= 0:
        raise ValueError("nu must be positive")
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    kappa = params.omega0 / nu
    tau = np.asarray(tau, dtype=np.float64)
    ell = l_over_lc / nu**2
    kt2 = (kappa * tau) ** 2
    t1 = np.exp(-kt2 / (2.0 * (1.0 + 6.0 * ell))) / math.sqrt(1.0 + 6.0 * ell)
    t2 = np.exp(-kt2 / (2.0 * (1.0 + 2.0 * ell)) - 8.0 * l_over_lc / (1.0 + 4.0 * ell)) / math.sqrt(
        (1.0 + 2.0 * ell) * (1.0 + 4.0 * ell)
    )
    pref = math.sqrt(math.pi / 2.0)
    return pref * (t1 + t2), pref * (t1 - t2)


def fitted_width(tau, intensity) -> float:
    """Gaussian width w of a profile ~ exp(-tau^2/w^2), via second moments."""
    tau = np.asarray(tau, dtype=np.float64)
    intensity = np.asarray(intensity, dtype=np.float64)
    total = np.trapezoid(intensity, tau)
    second = np.trapezoid(tau**2 * intensity, tau)
    return math.sqrt(2.0 * second / total)


@dataclass(frozen=True)
class PurityReport:
    """Frequency, polarization and total purity at one length."""

    mu_omega: float
    mu_s: float
    mu_total: float


def purities(params: FiberParameters, nu: float, l_over_lc: float) -> PurityReport:
    """Closed-form purities of the evolved single-photon state.

    mu_omega = (1+6l)^(-1/2)
    mu_s     = (1/2)[1 + e^{-16(L/L_c)/(1+4l)} / (1+4l)]
    mu_total = (1/2)[(1+6l)^(-1/2) + e^{-16(L/L_c)/(1+4l)} / sqrt((1+2l)(1+4l))]

    with l = L/(L_c nu^2).
    """
    if params.sigma2 != 0.0:
        raise ValueError("purity closed forms are only defined for a linear dispersion profile")
    if nu <= 0:
        raise ValueError("nu must be positive")
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    ell = l_over_lc / nu**2
    damp = math.exp(-16.0 * l_over_lc / (1.0 + 4.0 * ell))
    mu_omega = 1.0 / math.sqrt(1.0 + 6.0 * ell)
    mu_s = 0.5 * (1.0 + damp / (1.0 + 4.0 * ell))
    mu_total = 0.5 * (
        1.0 / math.sqrt(1.0 + 6.0 * ell) + damp / math.sqrt((1.0 + 2.0 * ell) * (1.0 + 4.0 * ell))
    )
    return PurityReport(mu_omega=mu_omega, mu_s=mu_s, mu_total=mu_total)


def purity_numeric(density: SinglePhotonDensity, herm_tol: float = 1e-8) -> PurityReport:
    """Purities of a discretized kernel by weighted matrix algebra.

    The kernel is scaled by sqrt(w_i w_j) so that operator traces equal
    matrix traces; inputs that are not Hermitian to ``herm_tol`` are
    rejected.
    """
    k = density.kernel
    herm = np.max(np.abs(k - np.conj(np.transpose(k, (1, 0, 3, 2)))))
    if herm > herm_tol:
        raise ValueError(f"kernel is not Hermitian (deviation {herm:.3e})")
    m = density.as_weighted_matrix()
    mu_total = float(np.real(np.trace(m @ m)))

    n = density.grid.n
    blocks = m.reshape(2, n, 2, n)
    # frequency reduction: trace out polarization
    rho_omega = blocks[0, :, 0, :] + blocks[1, :, 1, :]
    mu_omega = float(np.real(np.sum(rho_omega * rho_omega.T)))
    # polarization reduction: quadrature trace over frequency
    rho_s = np.trace(blocks, axis1=1, axis2=3)
    mu_s = float(np.real(np.trace(rho_s @ rho_s)))
    return PurityReport(mu_omega=mu_omega, mu_s=mu_s, mu_total=mu_total)
