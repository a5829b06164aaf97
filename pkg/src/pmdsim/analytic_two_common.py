"""Closed-form results for a singlet pair sharing one fiber.

The six coupled polarization elements evolve under a 6x6 generator that
a fixed unitary block-diagonalizes into 2+1+3; the singlet only loads
the first 2x2 block, giving two rates xi_1 >= xi_2 >= 0 and amplitudes
v_1, v_2. Includes the polarization negativity (upsilon), the
equal-frequency decoherence-free point, long-length limits on the three
xi_2 = 0 manifolds, and the 2x2 partial-transpose submatrix witnesses
for correlated and anticorrelated frequency points.
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
    TwoPhotonDensity,
    make_dispersion,
)

__all__ = [
    "CommonFiberSpectrum",
    "CommonNegativityReport",
    "CommonPPTReport",
    "assemble_mprime",
    "block_unitary",
    "common_spectrum",
    "xi_rates",
    "v_factors",
    "common_singlet_elements",
    "evolve_common_singlet",
    "evolve_common_singlet_pairs",
    "traced_common_kernel",
    "common_singlet_trace",
    "upsilon_factor",
    "upsilon_quadrature",
    "polarization_negativity_common",
    "critical_length_common",
    "anticorrelated_g",
    "ppt_submatrix_tests",
]

_SQRT3 = math.sqrt(3.0)


def _profile_values(profile, wa, wb, wap, wbp):
    return profile(wa), profile(wb), profile(wap), profile(wbp)


def _first_block(fa, fb, fap, fbp):
    """Entries (a, b, c) of the first 2x2 block of the rotated generator,
    without the eta^2/4 scale."""
    sq = fa**2 + fb**2 + fap**2 + fbp**2
    a = -3.0 * ((fa - fb) ** 2 + (fap - fbp) ** 2)
    b = 2.0 * _SQRT3 * (fa - fb) * (fap - fbp)
    c = (
        -3.0 * sq
        - 2.0 * fa * fb
        - 2.0 * fap * fbp
        + 4.0 * (fa * fap + fb * fbp + fb * fap + fa * fbp)
    )
    return a, b, c


def assemble_mprime(profile: DispersionProfile, omega_a, omega_b, omega_ap, omega_bp) -> np.ndarray:
    """Generator of the six coupled elements (rho_1111, rho_1010,
    rho_0101, rho_0000, rho_1001, rho_0110), symmetric, eta^2/4 included."""
    fa, fb, fap, fbp = (float(x) for x in _profile_values(profile, omega_a, omega_b, omega_ap, omega_bp))
    sq = fa**2 + fb**2 + fap**2 + fbp**2
    cross = fa * fap + fb * fbp + fb * fap + fa * fbp
    m1 = -3.0 * sq - 2.0 * fa * fb - 2.0 * fap * fbp + 2.0 * cross
    m2 = -3.0 * sq + 2.0 * fa * fb + 2.0 * fap * fbp + 2.0 * (fa * fap + fb * fbp) - 2.0 * (fb * fap + fa * fbp)
    m3 = -3.0 * sq + 2.0 * fa * fb + 2.0 * fap * fbp - 2.0 * (fa * fap + fb * fbp) + 2.0 * (fb * fap + fa * fbp)
    m4 = 4.0 * fb * fbp
    m5 = 4.0 * fa * fap
    m6 = 4.0 * fb * fap
    m7 = 4.0 * fa * fbp
    m8 = 4.0 * fa * fb
    m9 = 4.0 * fap * fbp
    scale = profile.eta**2 / 4.0
    return scale * np.array(
        [
            [m1, m4, m5, 0.0, m6, m7],
            [m4, m2, 0.0, m5, -m9, -m8],
            [m5, 0.0, m2, m4, -m8, -m9],
            [0.0, m5, m4, m1, m7, m6],
            [m6, -m9, -m8, m7, m3, 0.0],
            [m7, -m8, -m9, m6, 0.0, m3],
        ]
    )


def block_unitary() -> np.ndarray:
    """Constant unitary whose conjugation block-diagonalizes the
    six-element generator into 2x2 + 1x1 + 3x3. Its first column is the
    singlet element pattern."""
    h = 0.5
    r3 = 1.0 / _SQRT3
    r6 = 1.0 / math.sqrt(6.0)
    r2 = 1.0 / math.sqrt(2.0)
    hr3 = 0.5 * r3
    return np.array(
        [
            [0.0, r3, -r6, 0.0, -r2, 0.0],
            [h, hr3, r6, 0.0, 0.0, -r2],
            [h, hr3, r6, 0.0, 0.0, r2],
            [0.0, r3, -r6, 0.0, r2, 0.0],
            [-h, hr3, r6, -r2, 0.0, 0.0],
            [-h, hr3, r6, r2, 0.0, 0.0],
        ]
    )


@dataclass(frozen=True)
class CommonFiberSpectrum:
    """Rotated-generator blocks (eta^2/4 scale excluded) and the two
    rates carried by the singlet, at one frequency quadruple."""

    v11_1: float
    v12_1: float
    v22_1: float
    v11_2: float
    v3: np.ndarray
    xi1: float
    xi2: float


def common_spectrum(
    profile: DispersionProfile, omega_a, omega_b, omega_ap, omega_bp
) -> CommonFiberSpectrum:
    fa, fb, fap, fbp = (float(x) for x in _profile_values(profile, omega_a, omega_b, omega_ap, omega_bp))
    a, b, c = _first_block(fa, fb, fap, fbp)
    sq = fa**2 + fb**2 + fap**2 + fbp**2
    cross = fa * fap + fb * fbp + fb * fap + fa * fbp
    v11_2 = -3.0 * sq - 2.0 * fa * fb - 2.0 * fap * fbp - 2.0 * cross
    v3_11 = -3.0 * sq + 2.0 * fa * fb + 2.0 * fap * fbp - 2.0 * (fa * fap + fb * fbp) + 2.0 * (
        fb * fap + fa * fbp
    )
    v3_22 = -3.0 * sq - 2.0 * fa * fb - 2.0 * fap * fbp + 2.0 * cross
    v3_33 = -3.0 * sq + 2.0 * fa * fb + 2.0 * fap * fbp + 2.0 * (fa * fap + fb * fbp) - 2.0 * (
        fb * fap + fa * fbp
    )
    v3_12 = 4.0 * (fb * fap - fa * fbp)
    v3_13 = 4.0 * (fa * fb - fap * fbp)
    v3_23 = 4.0 * (fb * fbp - fa * fap)
    v3 = np.array([[v3_11, v3_12, v3_13], [v3_12, v3_22, v3_23], [v3_13, v3_23, v3_33]])
    e2 = profile.eta**2
    disc = math.sqrt((a - c) ** 2 + 4.0 * b**2)
    xi1 = e2 / 8.0 * (-a - c + disc)
    xi2 = e2 / 8.0 * (-a - c - disc)
    return CommonFiberSpectrum(
        v11_1=a, v12_1=b, v22_1=c, v11_2=v11_2, v3=v3, xi1=xi1, xi2=xi2
    )


def xi_rates(profile: DispersionProfile, omega_a, omega_b, omega_ap, omega_bp):
    """Decay rates (xi_1, xi_2) of the singlet amplitudes, vectorized."""
    fa, fb, fap, fbp = _profile_values(profile, omega_a, omega_b, omega_ap, omega_bp)
    a, b, c = _first_block(fa, fb, fap, fbp)
    disc = np.sqrt((a - c) ** 2 + 4.0 * b**2)
    e2 = profile.eta**2
    return e2 / 8.0 * (-a - c + disc), e2 / 8.0 * (-a - c - disc)


def v_factors(profile: DispersionProfile, length: float, omega_a, omega_b, omega_ap, omega_bp):
    """Envelope-free amplitudes (v1, v2) at one or many quadruples.

    v1 weights the singlet pattern, v2 the identity-like pattern; the
    kernel element set is a fixed linear combination of the two. On the
    degenerate manifold where the first block is proportional to the
    identity, v1 = exp(-rate L) and v2 = 0 exactly.
    """
    fa, fb, fap, fbp = _profile_values(profile, omega_a, omega_b, omega_ap, omega_bp)
    a, b, c = _first_block(fa, fb, fap, fbp)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    disc = np.sqrt((a - c) ** 2 + 4.0 * b**2)
    scale = profile.eta**2 / 4.0
    xi1 = scale * 0.5 * (-a - c + disc)
    xi2 = scale * 0.5 * (-a - c - disc)
    e1 = np.exp(-xi1 * length)
    e2 = np.exp(-xi2 * length)
    magnitude = np.abs(a) + np.abs(c) + np.abs(b)
    degenerate = disc <= 1e-14 * np.maximum(magnitude, 1e-300)
    safe = np.where(degenerate, 1.0, disc)
    v1 = (e2 * (a - c + safe) + e1 * (c - a + safe)) / (2.0 * safe)
    v2 = b * (e2 - e1) / safe
    v1_deg = np.exp(scale * 0.5 * (a + c) * length)
    v1 = np.where(degenerate, v1_deg, v1)
    v2 = np.where(degenerate, 0.0, v2)
    return v1, v2


def common_singlet_elements(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    omega_a,
    omega_b,
    omega_ap,
    omega_bp,
    dispersion: DispersionProfile | None = None,
) -> dict:
    """The six nonzero kernel elements and the polarization trace at
    arbitrary quadruples (broadcastable arrays).

    Keys "1111", "1010", "0101", "0000", "1001", "0110", "traced".
    """
    if dispersion is None:
        dispersion = make_dispersion(params)
    length = l_over_lc * params.decoherence_length
    v1, v2 = v_factors(dispersion, length, omega_a, omega_b, omega_ap, omega_bp)
    phi = envelope.amplitude_pair(omega_a, omega_b) * np.conj(
        envelope.amplitude_pair(omega_ap, omega_bp)
    )
    diag = phi * v2 / _SQRT3
    plus = phi * (0.5 * v1 + v2 / (2.0 * _SQRT3))
    minus = phi * (-0.5 * v1 + v2 / (2.0 * _SQRT3))
    return {
        "1111": diag,
        "0000": diag,
        "1010": plus,
        "0101": plus,
        "1001": minus,
        "0110": minus,
        "traced": phi * (v1 + _SQRT3 * v2),
    }


_ELEMENT_INDEX = {
    "1111": (0, 0, 0, 0),
    "1010": (0, 1, 0, 1),
    "0101": (1, 0, 1, 0),
    "0000": (1, 1, 1, 1),
    "1001": (0, 1, 1, 0),
    "0110": (1, 0, 0, 1),
}


def evolve_common_singlet(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> TwoPhotonDensity:
    """Evolved singlet kernel on the tensor grid (renormalized envelope).

    Memory grows as 16 n^4; keep n modest and use the element evaluators
    for wide scans.
    """
    if dispersion is None:
        dispersion = make_dispersion(params)
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    length = l_over_lc * params.decoherence_length
    w = grid.nodes
    v1, v2 = v_factors(
        dispersion,
        length,
        w[:, None, None, None],
        w[None, :, None, None],
        w[None, None, :, None],
        w[None, None, None, :],
    )
    phi = envelope.sampled_pair(grid)
    outer = np.einsum("ij,kl->ijkl", phi, np.conj(phi))
    n = grid.n
    kernel = np.zeros((2, 2, 2, 2, n, n, n, n), dtype=np.complex128)
    diag = outer * (v2 / _SQRT3)
    plus = outer * (0.5 * v1 + v2 / (2.0 * _SQRT3))
    minus = outer * (-0.5 * v1 + v2 / (2.0 * _SQRT3))
    for key, val in (("1111", diag), ("0000", diag), ("1010", plus), ("0101", plus), ("1001", minus), ("0110", minus)):
        kernel[_ELEMENT_INDEX[key]] = val
    return TwoPhotonDensity(kernel=kernel, grid=grid)


def evolve_common_singlet_pairs(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    pairs: np.ndarray,
    dispersion: DispersionProfile | None = None,
) -> TwoPhotonDensity:
    """Evolved singlet kernel on an explicit (w_A, w_B) pair list,
    matching the Monte Carlo pair-form comparisons."""
    if dispersion is None:
        dispersion = make_dispersion(params)
    pairs = np.asarray(pairs, dtype=np.float64)
    elements = common_singlet_elements(
        envelope,
        params,
        l_over_lc,
        pairs[:, 0][:, None],
        pairs[:, 1][:, None],
        pairs[:, 0][None, :],
        pairs[:, 1][None, :],
        dispersion,
    )
    p = pairs.shape[0]
    kernel = np.zeros((2, 2, 2, 2, p, p), dtype=np.complex128)
    for key, idx in _ELEMENT_INDEX.items():
        kernel[idx] = elements[key]
    return TwoPhotonDensity(kernel=kernel, pairs=pairs)


def traced_common_kernel(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> np.ndarray:
    """Polarization-traced kernel (n,n,n,n) over (w_A, w_B, w_A', w_B')."""
    if dispersion is None:
        dispersion = make_dispersion(params)
    w = grid.nodes
    elements = common_singlet_elements(
        envelope,
        params,
        l_over_lc,
        w[:, None, None, None],
        w[None, :, None, None],
        w[None, None, :, None],
        w[None, None, None, :],
        dispersion,
    )
    traced = elements["traced"]
    # rescale from exact to grid-renormalized envelope
    raw = envelope.amplitude_pair(w[:, None], w[None, :])
    norm = np.einsum("i,j,ij->", grid.weights, grid.weights, np.abs(raw) ** 2)
    return traced / norm


def common_singlet_trace(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> float:
    """Quadrature trace of the evolved kernel without materializing it."""
    if dispersion is None:
        dispersion = make_dispersion(params)
    w = grid.nodes
    elements = common_singlet_elements(
        envelope,
        params,
        l_over_lc,
        w[:, None],
        w[None, :],
        w[:, None],
        w[None, :],
        dispersion,
    )
    raw = envelope.amplitude_pair(w[:, None], w[None, :])
    norm = np.einsum("i,j,ij->", grid.weights, grid.weights, np.abs(raw) ** 2)
    val = np.einsum("i,j,ij->", grid.weights, grid.weights, np.real(elements["traced"]))
    return float(val / norm)


def upsilon_factor(alpha: float, omega0: float, l_over_lc: float) -> float:
    """Common-fiber polarization decoherence factor
    1/sqrt(1 + 4L/(alpha^2 w0^2 L_c))."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if l_over_lc < 0:
        raise ValueError("length must be nonnegative")
    return 1.0 / math.sqrt(1.0 + 4.0 * l_over_lc / (alpha * omega0) ** 2)


def upsilon_quadrature(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> float:
    """upsilon as the quadrature of |phi|^2 e^{-2 eta^2 (f_A - f_B)^2 L}."""
    if dispersion is None:
        dispersion = make_dispersion(params)
    length = l_over_lc * params.decoherence_length
    phi = envelope.sampled_pair(grid)
    df = dispersion(grid.nodes[:, None]) - dispersion(grid.nodes[None, :])
    decay = np.exp(-2.0 * params.eta**2 * df**2 * length)
    return float(np.einsum("i,j,ij->", grid.weights, grid.weights, np.abs(phi) ** 2 * decay))


@dataclass(frozen=True)
class CommonPPTReport:
    """2x2 partial-transpose submatrix witnesses at (w_A, w_B).

    correlated_ratio < 1 certifies a negative partial transpose on the
    correlated points for every length. The anticorrelated witness
    beta^2 - alpha^2 - g(L) applies where g is defined; below the
    defining length the verdict is "inconclusive".
    """

    correlated_ratio: float
    correlated_entangled: bool
    anticorrelated_witness: float | None
    anticorrelated_verdict: str
    g_l: float | None


@dataclass(frozen=True)
class CommonNegativityReport:
    """upsilon, polarization negativity and critical length (L_c units)."""

    upsilon: float
    n_s_raw: float
    n_s: float
    l_crit_pol: float
    ppt: CommonPPTReport | None = None


def critical_length_common(alpha: float, omega0: float) -> float:
    """Polarization disentanglement length 2 alpha^2 w0^2 in L_c units."""
    return 2.0 * (alpha * omega0) ** 2


def polarization_negativity_common(
    alpha: float, omega0: float, l_over_lc: float
) -> CommonNegativityReport:
    upsilon = upsilon_factor(alpha, omega0, l_over_lc)
    raw = 0.75 * upsilon - 0.25
    return CommonNegativityReport(
        upsilon=upsilon,
        n_s_raw=raw,
        n_s=max(0.0, raw),
        l_crit_pol=critical_length_common(alpha, omega0),
    )


def anticorrelated_g(omega0: float, l_over_lc: float, delta_omega: float) -> float | None:
    """Threshold shift g(L) for the anticorrelated witness; None where the
    witness is undefined (exp[8 dw^2 L/(w0^2 L_c)] <= 3).

    Evaluated in decay form with e1 = exp(-8 dw^2 L/(w0^2 L_c)):
        g = -ln[(3 e1 - 1)^2 / 4] / (4 dw^2),
    which tends to ln(4)/(4 dw^2) at long length.
    """
    if delta_omega == 0:
        raise ValueError("delta_omega must be nonzero")
    dw2 = delta_omega**2
    x = 8.0 * dw2 * l_over_lc / omega0**2
    if x <= math.log(3.0):
        return None
    e1 = math.exp(-x)
    return -math.log(0.25 * (3.0 * e1 - 1.0) ** 2) / (4.0 * dw2)


def ppt_submatrix_tests(
    envelope: PulseEnvelope,
    params: FiberParameters,
    l_over_lc: float,
    omega_a: float,
    omega_b: float,
    dispersion: DispersionProfile | None = None,
) -> CommonPPTReport:
    """Both 2x2 partial-transpose witnesses at a frequency pair.

    The correlated branch extracts the points (w_A, w_B)/(w_B, w_A); its
    diagonal-to-off-diagonal product ratio is length-independent. The
    anticorrelated branch extracts (w_A, w_A)/(w_B, w_B); its closed
    threshold assumes the pair is symmetric about the carrier. Both
    verdicts are evaluated from the kernel elements themselves.
    """
    if not envelope.is_double:
        raise ValueError("submatrix tests need the double envelope variant")
    if omega_a == omega_b:
        raise ValueError("witness points must have distinct frequencies")
    if dispersion is None:
        dispersion = make_dispersion(params)
    dispersion.require_linear("the submatrix witness pair")

    def traced(wa, wb, wap, wbp):
        el = common_singlet_elements(
            envelope, params, l_over_lc, wa, wb, wap, wbp, dispersion
        )
        return float(np.real(el["traced"]))

    # partial transpose swaps the first and third kernel arguments
    def pt(x1, x2, x3, x4):
        return traced(x3, x2, x1, x4)

    a, b = omega_a, omega_b
    diag = pt(a, b, a, b) * pt(b, a, b, a)
    off = pt(a, b, b, a) * pt(b, a, a, b)
    ratio = diag / off
    correlated_entangled = off > diag

    d1 = pt(a, a, a, a)
    d2 = pt(b, b, b, b)
    o12 = pt(a, a, b, b)
    o21 = pt(b, b, a, a)
    anti_negative = abs(o12 * o21) > d1 * d2

    g = anticorrelated_g(envelope.omega0, l_over_lc, a - b)
    if g is None:
        witness = None
        verdict = "inconclusive"
    else:
        witness = envelope.beta**2 - envelope.alpha**2 - g
        verdict = "entangled" if anti_negative else "not-witnessed"
    return CommonPPTReport(
        correlated_ratio=ratio,
        correlated_entangled=correlated_entangled,
        anticorrelated_witness=witness,
        anticorrelated_verdict=verdict,
        g_l=g,
    )
