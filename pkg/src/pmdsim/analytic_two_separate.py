"""Closed-form results for two photons traversing separate fibers.

Covers the four decay rates of the coupled polarization elements with
their fixed eigenvectors, Bell-state kernel evolution, the polarization
decoherence factor chi with its negativity and critical length, and the
frequency negativity of the polarization-traced Gaussian kernel (closed
branches plus a discretized PPT eigensolve).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    BellLabel,
    DispersionProfile,
    FiberParameters,
    FrequencyGrid,
    PulseEnvelope,
    TwoPhotonDensity,
    make_dispersion,
)

__all__ = [
    "SeparateDecayRates",
    "SeparateNegativityReport",
    "PolarizationNegativity",
    "assemble_m2",
    "decay_rates_separate",
    "DECAY_EIGENVECTORS",
    "evolve_separate_singlet",
    "evolve_separate_bell",
    "evolve_separate_bell_pairs",
    "traced_frequency_kernel",
    "chi_factor",
    "chi_quadrature",
    "polarization_density_separate",
    "polarization_negativity_separate",
    "critical_length_pol",
    "critical_length_pol_limit",
    "frequency_negativity_separate",
    "frequency_negativity_grid",
    "critical_length_freq",
    "negativity_report_separate",
]

# Eigenvectors of the coupling matrix on (rho_1111, rho_1010, rho_0101,
# rho_0000); column i pairs with rate zeta_{i+1}. Frequency-independent.
DECAY_EIGENVECTORS = 0.5 * np.array(
    [
        [1.0, -1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, 1.0, 1.0],
    ]
)


@dataclass(frozen=True)
class SeparateDecayRates:
    """Rates zeta_1..zeta_4 (1/length) at one frequency quadruple.

    zeta_1 <= zeta_2, zeta_3 <= zeta_4 for same-sign profile values;
    zeta_1 vanishes exactly when f(w_A)=f(w_A') and f(w_B)=f(w_B').
    """

    zeta1: float
    zeta2: float
    zeta3: float
    zeta4: float

    @property
    def eigenvectors(self) -> np.ndarray:
        return DECAY_EIGENVECTORS


def assemble_m2(profile: DispersionProfile, omega_a, omega_b, omega_ap, omega_bp) -> np.ndarray:
    """Coupling matrix of the four diagonal-polarization kernel elements.

    Basis order (rho_1111, rho_1010, rho_0101, rho_0000); symmetric with
    eigenvalues {-zeta_i}.
    """
    fa, fb = float(profile(omega_a)), float(profile(omega_b))
    fap, fbp = float(profile(omega_ap)), float(profile(omega_bp))
    sq = fa**2 + fb**2 + fap**2 + fbp**2
    m1 = -3.0 * sq + 2.0 * fa * fap + 2.0 * fb * fbp
    m2 = 4.0 * fb * fbp
    m3 = 4.0 * fa * fap
    scale = profile.eta**2 / 4.0
    return scale * np.array(
        [
            [m1, m2, m3, 0.0],
            [m2, m1, 0.0, m3],
            [m3, 0.0, m1, m2],
            [0.0, m3, m2, m1],
        ]
    )


def decay_rates_separate(
    profile: DispersionProfile, omega_a, omega_b, omega_ap, omega_bp
) -> SeparateDecayRates:
    """Closed-form zeta rates at (w_A, w_B, w_A', w_B')."""
    fa, fb = float(profile(omega_a)), float(profile(omega_b))
    fap, fbp = float(profile(omega_ap)), float(profile(omega_bp))
    e2 = profile.eta**2
    zeta1 = 0.75 * e2 * ((fa - fap) ** 2 + (fb - fbp) ** 2)
    zeta2 = 0.25 * e2 * (3.0 * (fa - fap) ** 2 + 3.0 * fb**2 + 2.0 * fb * fbp + 3.0 * fbp**2)
    zeta3 = 0.25 * e2 * (3.0 * (fb - fbp) ** 2 + 3.0 * fa**2 + 2.0 * fa * fap + 3.0 * fap**2)
    zeta4 = 0.25 * e2 * (
        3.0 * fa**2 + 2.0 * fa * fap + 3.0 * fap**2 + 3.0 * fb**2 + 2.0 * fb * fbp + 3.0 * fbp**2
    )
    return SeparateDecayRates(zeta1=zeta1, zeta2=zeta2, zeta3=zeta3, zeta4=zeta4)


def _zeta_arrays(profile, wa, wb, wap, wbp):
    # vectorized zeta_1/zeta_4 for kernel assembly
    fa, fb = profile(wa), profile(wb)
    fap, fbp = profile(wap), profile(wbp)
    e2 = profile.eta**2
    z1 = 0.75 * e2 * ((fa - fap) ** 2 + (fb - fbp) ** 2)
    z4 = 0.25 * e2 * (
        3.0 * fa**2 + 2.0 * fa * fap + 3.0 * fap**2 + 3.0 * fb**2 + 2.0 * fb * fbp + 3.0 * fbp**2
    )
    return z1, z4


# index pattern of the six nonzero polarization elements for each Bell
# input: (sA, sB, sA', sB') with 0 = |1>, 1 = |0>
_DIAG_IDX = [(0, 0, 0, 0), (0, 1, 0, 1), (1, 0, 1, 0), (1, 1, 1, 1)]


def _bell_element_weights(bell: BellLabel):
    """Per-element weights (c1, c4) so element = phi phi* (c1 e1 + c4 e4),
    plus the coherence pair with its sign, e_i = exp(-zeta_i L)."""
    if bell in (BellLabel.SINGLET, BellLabel.TRIPLET0):
        diag = {
            (0, 0, 0, 0): (0.25, -0.25),
            (0, 1, 0, 1): (0.25, 0.25),
            (1, 0, 1, 0): (0.25, 0.25),
            (1, 1, 1, 1): (0.25, -0.25),
        }
        sign = -0.5 if bell is BellLabel.SINGLET else 0.5
        coh = {(0, 1, 1, 0): sign, (1, 0, 0, 1): sign}
    else:
        diag = {
            (0, 0, 0, 0): (0.25, 0.25),
            (0, 1, 0, 1): (0.25, -0.25),
            (1, 0, 1, 0): (0.25, -0.25),
            (1, 1, 1, 1): (0.25, 0.25),
        }
        sign = 0.5 if bell is BellLabel.TRIPLET_PLUS else -0.5
        coh = {(0, 0, 1, 1): sign, (1, 1, 0, 0): sign}
    return diag, coh


def evolve_separate_bell(
    envelope: PulseEnvelope,
    bell: BellLabel,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> TwoPhotonDensity:
    """Evolved two-photon kernel on the tensor grid for a Bell input.

    Only the trace set (four diagonal polarization elements) and one
    coherence pair are nonzero; the trace set relaxes through rates
    zeta_1/zeta_4 and the coherence pair decays at zeta_4. The kernel
    has zero projection on the remaining two decay eigenvectors.
    """
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    if dispersion is None:
        dispersion = make_dispersion(params)
    length = l_over_lc * params.decoherence_length
    phi = envelope.sampled_pair(grid)
    outer = np.einsum("ij,kl->ijkl", phi, np.conj(phi))
    w = grid.nodes
    z1, z4 = _zeta_arrays(
        dispersion,
        w[:, None, None, None],
        w[None, :, None, None],
        w[None, None, :, None],
        w[None, None, None, :],
    )
    e1 = np.exp(-z1 * length)
    e4 = np.exp(-z4 * length)
    n = grid.n
    kernel = np.zeros((2, 2, 2, 2, n, n, n, n), dtype=np.complex128)
    diag, coh = _bell_element_weights(bell)
    for idx, (c1, c4) in diag.items():
        kernel[idx] = outer * (c1 * e1 + c4 * e4)
    for idx, sign in coh.items():
        kernel[idx] = outer * (sign * e4)
    return TwoPhotonDensity(kernel=kernel, grid=grid)


def evolve_separate_singlet(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> TwoPhotonDensity:
    """Singlet-input kernel:

    rho_1111 = rho_0000 = (phi phi*/4)(e^{-z1 L} - e^{-z4 L})
    rho_1010 = rho_0101 = (phi phi*/4)(e^{-z1 L} + e^{-z4 L})
    rho_1001 = rho_0110 = -(phi phi*/2) e^{-z4 L}
    """
    return evolve_separate_bell(envelope, BellLabel.SINGLET, params, l_over_lc, grid, dispersion)


def evolve_separate_bell_pairs(
    envelope: PulseEnvelope,
    bell: BellLabel,
    params: FiberParameters,
    l_over_lc: float,
    pairs: np.ndarray,
    dispersion: DispersionProfile | None = None,
) -> TwoPhotonDensity:
    """Same kernel restricted to an explicit list of (w_A, w_B) pairs.

    pairs has shape (P, 2); the result kernel has shape (2,2,2,2,P,P)
    with no quadrature weights attached. Used for element-wise Monte
    Carlo comparisons.
    """
    if dispersion is None:
        dispersion = make_dispersion(params)
    length = l_over_lc * params.decoherence_length
    pairs = np.asarray(pairs, dtype=np.float64)
    phi = envelope.amplitude_pair(pairs[:, 0], pairs[:, 1])
    outer = np.outer(phi, np.conj(phi))
    z1, z4 = _zeta_arrays(
        dispersion,
        pairs[:, 0][:, None],
        pairs[:, 1][:, None],
        pairs[:, 0][None, :],
        pairs[:, 1][None, :],
    )
    e1 = np.exp(-z1 * length)
    e4 = np.exp(-z4 * length)
    p = pairs.shape[0]
    kernel = np.zeros((2, 2, 2, 2, p, p), dtype=np.complex128)
    diag, coh = _bell_element_weights(bell)
    for idx, (c1, c4) in diag.items():
        kernel[idx] = outer * (c1 * e1 + c4 * e4)
    for idx, sign in coh.items():
        kernel[idx] = outer * (sign * e4)
    return TwoPhotonDensity(kernel=kernel, pairs=pairs)


def traced_frequency_kernel(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> np.ndarray:
    """Polarization-traced frequency kernel phi phi* e^{-zeta_1 L}.

    Shape (n, n, n, n) over (w_A, w_B, w_A', w_B'). The same decay factor
    applies for every Bell input, which is the basis-independence of the
    frequency decoherence.
    """
    if dispersion is None:
        dispersion = make_dispersion(params)
    length = l_over_lc * params.decoherence_length
    phi = envelope.sampled_pair(grid)
    outer = np.einsum("ij,kl->ijkl", phi, np.conj(phi))
    w = grid.nodes
    z1, _ = _zeta_arrays(
        dispersion,
        w[:, None, None, None],
        w[None, :, None, None],
        w[None, None, :, None],
        w[None, None, None, :],
    )
    return outer * np.exp(-z1 * length)


def chi_factor(alpha: float, beta: float, omega0: float, l_over_lc: float) -> float:
    """Polarization decoherence factor for separate fibers.

    chi = exp[-16(L/L_c)/(1+2L/(beta^2 w0^2 L_c))]
          / sqrt[(1+2L/(alpha^2 w0^2 L_c))(1+2L/(beta^2 w0^2 L_c))]
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    a2 = (alpha * omega0) ** 2
    b2 = (beta * omega0) ** 2
    da = 1.0 + 2.0 * l_over_lc / a2
    db = 1.0 + 2.0 * l_over_lc / b2
    return math.exp(-16.0 * l_over_lc / db) / math.sqrt(da * db)


def chi_quadrature(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> float:
    """chi as the direct quadrature of |phi|^2 e^{-zeta_4(diag) L}."""
    if dispersion is None:
        dispersion = make_dispersion(params)
    length = l_over_lc * params.decoherence_length
    phi = envelope.sampled_pair(grid)
    wa = grid.nodes[:, None]
    wb = grid.nodes[None, :]
    _, z4 = _zeta_arrays(dispersion, wa, wb, wa, wb)
    val = np.einsum("i,j,ij->", grid.weights, grid.weights, np.abs(phi) ** 2 * np.exp(-z4 * length))
    return float(val)


def _tilted_gauss_ratio(quad: float, lin: float, half_width: float = 14.0, n_nodes: int = 4097) -> float:
    """∫ e^{-quad u^2 - lin u} du / ∫ e^{-quad u^2} du by quadrature."""
    sigma = 1.0 / math.sqrt(2.0 * quad)
    center = -lin / (2.0 * quad)
    lo = min(-half_width * sigma, center - half_width * sigma)
    hi = max(half_width * sigma, center + half_width * sigma)
    u = np.linspace(lo, hi, n_nodes)
    num = np.trapezoid(np.exp(-quad * u**2 - lin * u), u)
    den = math.sqrt(math.pi / quad)
    return float(num / den)


def polarization_density_separate(
    alpha: float, beta: float, omega0: float, l_over_lc: float
) -> np.ndarray:
    """4x4 polarization density of the evolved singlet by quadrature.

    Integrates the trace of the evolved kernel over frequency on axes
    rotated to the principal directions of |phi|^2, without using the
    closed form of chi. Basis order (|11>, |10>, |01>, |00>).
    """
    a2 = (alpha * omega0) ** 2
    b2 = (beta * omega0) ** 2
    ell = l_over_lc
    # zeta_4 L on the frequency diagonal, rotated coordinates u = x/omega0:
    # 8 ell [2 + 2 sqrt(2) s + s^2 + d^2] with |phi|^2 ~ e^{-4 b2 s^2 - 4 a2 d^2}
    i_s = _tilted_gauss_ratio(4.0 * b2 + 8.0 * ell, 16.0 * math.sqrt(2.0) * ell)
    i_d = _tilted_gauss_ratio(4.0 * a2 + 8.0 * ell, 0.0)
    # the ratio integrals above already divide by the untilted norms with
    # the respective quadratic coefficients; correct to the |phi|^2 norms
    i_s *= math.sqrt(4.0 * b2 / (4.0 * b2 + 8.0 * ell))
    i_d *= math.sqrt(4.0 * a2 / (4.0 * a2 + 8.0 * ell))
    j4 = math.exp(-16.0 * ell) * i_s * i_d
    rho = 0.25 * np.diag([1.0 - j4, 1.0 + j4, 1.0 + j4, 1.0 - j4]).astype(np.complex128)
    rho[1, 2] = rho[2, 1] = -0.5 * j4
    return rho


class PolarizationNegativity(NamedTuple):
    """Affine negativity value before and after clamping at zero."""

    raw: float
    value: float


def polarization_negativity_separate(chi: float) -> PolarizationNegativity:
    """N_s = 3 chi/4 - 1/4; the raw value locates the threshold."""
    if not 0.0 <= chi <= 1.0 + 1e-12:
        raise ValueError("chi must lie in [0, 1]")
    raw = 0.75 * chi - 0.25
    return PolarizationNegativity(raw=raw, value=max(0.0, raw))


def _bisect_decreasing(fn, target: float, rel_tol: float = 1e-12) -> float:
    """Root of fn(L)=target for fn strictly decreasing in L > 0, log bisection."""
    lo, hi = 1e-12, 1.0
    while fn(hi) > target:
        hi *= 4.0
        if hi > 1e18:
            raise RuntimeError("bisection bracket failure")
    while fn(lo) < target:
        lo /= 4.0
        if lo < 1e-30:
            raise RuntimeError("bisection bracket failure")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if fn(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * lo:
            break
    return math.sqrt(lo * hi)


def critical_length_pol(alpha: float, beta: float, omega0: float) -> float:
    """Length (in L_c units) where chi crosses 1/3 and N_s reaches zero."""
    return _bisect_decreasing(lambda l: chi_factor(alpha, beta, omega0, l), 1.0 / 3.0)


def critical_length_pol_limit(alpha: float, omega0: float) -> float:
    """beta -> infinity limit of the critical length: root of
    exp(-16 L/L_c)/sqrt(1+2L/(alpha^2 w0^2 L_c)) = 1/3."""
    a2 = (alpha * omega0) ** 2
    return _bisect_decreasing(
        lambda l: math.exp(-16.0 * l) / math.sqrt(1.0 + 2.0 * l / a2), 1.0 / 3.0
    )


def frequency_negativity_separate(alpha: float, beta: float, omega0: float, l_over_lc: float) -> float:
    """Closed-form frequency negativity of the polarization-traced kernel.

    With A = alpha*w0, B = beta*w0 and c = 3 L/L_c:
      A^2 > B^2 + c  ->  (A/sqrt(B^2+c) - 1)/2
      B^2 > A^2 + c  ->  (B/sqrt(A^2+c) - 1)/2
      otherwise 0 (no negative eigenvalues in the gap).
    """
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    a = alpha * omega0
    b = beta * omega0
    c = 3.0 * l_over_lc
    if a**2 > b**2 + c:
        return 0.5 * (a / math.sqrt(b**2 + c) - 1.0)
    if b**2 > a**2 + c:
        return 0.5 * (b / math.sqrt(a**2 + c) - 1.0)
    return 0.0


def critical_length_freq(alpha: float, beta: float, omega0: float) -> float:
    """Frequency disentanglement length |A^2 - B^2|/3 in units of L_c."""
    return abs((alpha * omega0) ** 2 - (beta * omega0) ** 2) / 3.0


def _mehler_spectrum(p: float, q: float, n_nodes: int, half_width: float | None) -> np.ndarray:
    """Eigenvalues of the kernel e^{-p(x-x')^2 - q(x+x')^2} discretized on
    a grid wide enough for every eigenfunction that carries weight.

    The eigenfunctions live on the scale (4pq)^{-1/4} and the k-th one
    reaches its classical turning point near sqrt(2k+1) of it, so the
    default window tracks the mode order needed for the eigenvalue ratio
    at hand instead of the bare kernel width. An explicit ``half_width``
    is taken in units of the kernel diagonal width 1/sqrt(8q).
    """
    sigma = 1.0 / math.sqrt(8.0 * q)
    if half_width is None:
        sigma_mode = (4.0 * p * q) ** -0.25
        ratio = abs(math.sqrt(p) - math.sqrt(q)) / (math.sqrt(p) + math.sqrt(q))
        if ratio < 1e-12:
            k_modes = 10.0
        else:
            k_modes = min(400.0, max(10.0, math.log(1e-5 * (1.0 - ratio)) / math.log(ratio)))
        x_max = max((math.sqrt(2.0 * k_modes + 1.0) + 4.0) * sigma_mode, 8.0 * sigma)
    else:
        x_max = half_width * sigma
    x = np.linspace(-x_max, x_max, n_nodes)
    w = np.full(n_nodes, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    diff = x[:, None] - x[None, :]
    summ = x[:, None] + x[None, :]
    kern = np.exp(-p * diff**2 - q * summ**2)
    sw = np.sqrt(w)
    mat = kern * sw[:, None] * sw[None, :]
    return np.linalg.eigvalsh(mat)


def frequency_negativity_grid(
    alpha: float,
    beta: float,
    omega0: float,
    l_over_lc: float,
    n_nodes: int = 128,
    half_width: float | None = None,
    cutoff: float = 1e-10,
) -> float:
    """Discretized PPT negativity of the traced frequency kernel.

    The partially transposed kernel factorizes exactly over coordinates
    rotated 45 degrees in the (w_A, w_B) plane, so the spectrum on the
    n_nodes^2 tensor grid is the outer product of two n_nodes-point 1-D
    spectra. Negativity counts the sign-mixed eigenvalue products after
    trace normalization.
    """
    a2 = (alpha * omega0) ** 2
    b2 = (beta * omega0) ** 2
    c = 3.0 * l_over_lc
    eig_s = _mehler_spectrum(a2 + c, b2, n_nodes, half_width)
    eig_d = _mehler_spectrum(b2 + c, a2, n_nodes, half_width)
    eig_s = eig_s / eig_s.sum()
    eig_d = eig_d / eig_d.sum()
    prod = np.outer(eig_s, eig_d).ravel()
    neg = prod[prod < -cutoff]
    return float(-neg.sum()) + 0.0


@dataclass(frozen=True)
class SeparateNegativityReport:
    """chi, both negativities and the two critical lengths (L_c units)."""

    chi: float
    n_s_raw: float
    n_s: float
    n_omega: float
    l_crit_pol: float
    l_crit_freq: float


def negativity_report_separate(
    alpha: float, beta: float, omega0: float, l_over_lc: float
) -> SeparateNegativityReport:
    chi = chi_factor(alpha, beta, omega0, l_over_lc)
    pol = polarization_negativity_separate(chi)
    return SeparateNegativityReport(
        chi=chi,
        n_s_raw=pol.raw,
        n_s=pol.value,
        n_omega=frequency_negativity_separate(alpha, beta, omega0, l_over_lc),
        l_crit_pol=critical_length_pol(alpha, beta, omega0),
        l_crit_freq=critical_length_freq(alpha, beta, omega0),
    )
