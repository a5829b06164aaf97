"""Shared domain types for photon decoherence in randomly birefringent fiber.

Everything downstream (closed-form solvers, the Monte Carlo engine, the
entanglement toolkit) works with the types defined here: fiber parameters
with their derived decoherence length, the frequency profile of the
birefringence coupling, truncated frequency grids with trapezoid weights,
Gaussian pulse envelopes (single photon and two-photon double Gaussian),
and discretized density kernels.

Internally the code uses natural units with c = 1. Nothing depends on the
absolute magnitudes of eta and gamma separately; every observable is a
function of the dimensionless groups L/L_c, nu = omega0/kappa, alpha*omega0
and beta*omega0, which is why :meth:`FiberParameters.dimensionless` is the
standard constructor for reproduction runs.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PAULI",
    "FiberParameters",
    "DispersionProfile",
    "make_dispersion",
    "FrequencyGrid",
    "make_grid",
    "PulseEnvelope",
    "BellLabel",
    "JonesVector",
    "SinglePhotonDensity",
    "TwoPhotonDensity",
    "input_single_state",
    "input_two_state",
]

# Pauli matrices in the (|1>, |0>) basis: index 0 is sigma_1.
PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True)
class FiberParameters:
    """Stochastic birefringence strength and dispersion coefficients.

    Parameters
    ----------
    eta : float
        Average birefringence strength per Stokes component,
        units length^(-1/2).
    gamma : float
        Linear coefficient of the frequency profile, units time/length.
    omega0 : float
        Carrier angular frequency, rad/time.
    sigma2 : float, optional
        Second-order (quadratic) dispersion coefficient, time^2/length.
    """

    eta: float
    gamma: float
    omega0: float
    sigma2: float = 0.0

    def __post_init__(self) -> None:
        if not (self.eta > 0):
            raise ValueError("eta must be positive")
        if not (self.gamma > 0):
            raise ValueError("gamma must be positive")
        if not (self.omega0 > 0):
            raise ValueError("omega0 must be positive")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")

    @property
    def decoherence_length(self) -> float:
        """L_c = 4 / (eta^2 gamma^2 omega0^2), the scale of every decay rate."""
        lc = 4.0 / (self.eta**2 * self.gamma**2 * self.omega0**2)
        if not math.isfinite(lc) or lc <= 0:
            raise ValueError("decoherence length is not finite and positive")
        return lc

    @classmethod
    def dimensionless(cls, omega0: float = 1.0, l_c: float = 1.0, sigma2: float = 0.0) -> "FiberParameters":
        """Fiber with gamma = 1 and eta chosen so the decoherence length is l_c.

        With the default l_c = 1 all lengths are measured in units of L_c,
        which matches the parameterization of every closed form.
        """
        eta = 2.0 / (omega0 * math.sqrt(l_c))
        return cls(eta=eta, gamma=1.0, omega0=omega0, sigma2=sigma2)


@dataclass(frozen=True)
class DispersionProfile:
    """Frequency profile f(omega) multiplying the stochastic Stokes vector.

    linear mode:    f(omega) = gamma * omega
    quadratic mode: f(omega) = gamma * omega + sigma2 * omega * (omega - omega0)

    Carries eta alongside the dispersion coefficients so that decay-rate
    functions need only the profile.
    """

    mode: str
    eta: float
    gamma: float
    sigma2: float
    omega0: float

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=np.float64)
        out = self.gamma * omega
        if self.mode == "quadratic":
            out = out + self.sigma2 * omega * (omega - self.omega0)
        return out

    @property
    def is_linear(self) -> bool:
        return self.mode == "linear" or self.sigma2 == 0.0

    @property
    def decoherence_length(self) -> float:
        return 4.0 / (self.eta**2 * self.gamma**2 * self.omega0**2)

    def require_linear(self, what: str) -> None:
        # closed forms derived for f(omega) = gamma*omega refuse to
        # mis-evaluate silently on a quadratic profile
        if not self.is_linear:
            raise ValueError(f"{what} is only defined for a linear dispersion profile")


def make_dispersion(params: FiberParameters, mode: str = "linear") -> DispersionProfile:
    """Build the dispersion profile f(omega) from fiber parameters."""
    if mode not in ("linear", "quadratic"):
        raise ValueError(f"unknown dispersion mode {mode!r}")
    return DispersionProfile(
        mode=mode, eta=params.eta, gamma=params.gamma, sigma2=params.sigma2, omega0=params.omega0
    )


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency grid with trapezoid quadrature weights."""

    nodes: np.ndarray
    weights: np.ndarray
    omega0: float
    half_width: float = 0.0

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ValueError("grid needs at least 3 nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise ValueError("grid weights must be positive")

    @property
    def n(self) -> int:
        return self.nodes.size

    @classmethod
    def from_nodes(cls, nodes, omega0: float) -> "FrequencyGrid":
        """Grid on explicit nodes; weights from the trapezoid rule."""
        nodes = np.asarray(nodes, dtype=np.float64)
        w = np.empty_like(nodes)
        w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
        w[0] = 0.5 * (nodes[1] - nodes[0])
        w[-1] = 0.5 * (nodes[-1] - nodes[-2])
        return cls(nodes=nodes, weights=w, omega0=omega0)


def make_grid(envelope: "PulseEnvelope", n_nodes: int = 64, half_width: float = 6.0) -> FrequencyGrid:
    """Uniform grid centered on omega0 covering +-half_width envelope widths.

    Parameters
    ----------
    envelope : PulseEnvelope
        Sets the width unit (kappa for the single variant, the per-axis
        standard scale for the double variant).
    n_nodes : int
        Number of nodes; fewer than 16 triggers a resolution warning.
    half_width : float
        Half extent in envelope widths; at least 3.
    """
    if n_nodes < 3:
        raise ValueError("n_nodes must be at least 3")
    if half_width < 3:
        raise ValueError("half_width must be at least 3 envelope widths")
    if n_nodes < 16:
        warnings.warn(f"{n_nodes} nodes is too coarse to resolve the envelope", stacklevel=2)
    w = envelope.width
    nodes = np.linspace(envelope.omega0 - half_width * w, envelope.omega0 + half_width * w, n_nodes)
    return FrequencyGrid.from_nodes(nodes, envelope.omega0)


@dataclass(frozen=True)
class PulseEnvelope:
    """Gaussian frequency envelope, single-photon or two-photon variant.

    single: phi(w) = (2/(kappa^2 pi))^(1/4) exp[-(w-omega0)^2/kappa^2]
    double: phi(wA,wB) = sqrt(4 alpha beta/pi)
            * exp[-alpha^2 (wA-wB)^2 - beta^2 (wA+wB-2 omega0)^2]

    alpha > beta is frequency-correlated, beta > alpha anticorrelated.
    """

    omega0: float
    kappa: float | None = None
    alpha: float | None = None
    beta: float | None = None

    @classmethod
    def single(cls, kappa: float, omega0: float) -> "PulseEnvelope":
        if kappa <= 0:
            raise ValueError("kappa must be positive")
        return cls(omega0=omega0, kappa=kappa)

    @classmethod
    def double(cls, alpha: float, beta: float, omega0: float) -> "PulseEnvelope":
        if alpha <= 0 or beta <= 0:
            raise ValueError("alpha and beta must be positive")
        return cls(omega0=omega0, alpha=alpha, beta=beta)

    @property
    def is_single(self) -> bool:
        return self.kappa is not None

    @property
    def is_double(self) -> bool:
        return self.alpha is not None

    @property
    def width(self) -> float:
        """Per-axis width unit used for grid truncation."""
        if self.is_single:
            return self.kappa
        # std of the single-photon marginal of |phi|^2 along either axis
        return 0.25 * math.sqrt(1.0 / self.alpha**2 + 1.0 / self.beta**2)

    def amplitude(self, omega):
        """Exact (untruncated) single-variant amplitude."""
        if not self.is_single:
            raise ValueError("amplitude() needs the single-photon variant")
        omega = np.asarray(omega, dtype=np.float64)
        norm = (2.0 / (self.kappa**2 * math.pi)) ** 0.25
        return norm * np.exp(-((omega - self.omega0) ** 2) / self.kappa**2)

    def amplitude_pair(self, omega_a, omega_b):
        """Exact (untruncated) double-variant amplitude."""
        if not self.is_double:
            raise ValueError("amplitude_pair() needs the double-photon variant")
        omega_a = np.asarray(omega_a, dtype=np.float64)
        omega_b = np.asarray(omega_b, dtype=np.float64)
        norm = math.sqrt(4.0 * self.alpha * self.beta / math.pi)
        return norm * np.exp(
            -(self.alpha**2) * (omega_a - omega_b) ** 2
            - self.beta**2 * (omega_a + omega_b - 2.0 * self.omega0) ** 2
        )

    def sampled(self, grid: FrequencyGrid) -> np.ndarray:
        """Single-variant amplitude on the grid, renormalized on the truncated support."""
        phi = self.amplitude(grid.nodes)
        norm = np.sum(grid.weights * np.abs(phi) ** 2)
        return phi / math.sqrt(norm)

    def sampled_pair(self, grid: FrequencyGrid) -> np.ndarray:
        """Double-variant amplitude on the tensor grid, renormalized."""
        phi = self.amplitude_pair(grid.nodes[:, None], grid.nodes[None, :])
        norm = np.einsum("i,j,ij->", grid.weights, grid.weights, np.abs(phi) ** 2)
        return phi / math.sqrt(norm)


class BellLabel(enum.Enum):
    SINGLET = "singlet"
    TRIPLET0 = "triplet0"
    TRIPLET_PLUS = "tripletPlus"
    TRIPLET_MINUS = "tripletMinus"

    def amplitudes(self) -> np.ndarray:
        """Polarization amplitudes c[s_A, s_B] in the (|1>, |0>) basis."""
        r = 1.0 / math.sqrt(2.0)
        c = np.zeros((2, 2), dtype=np.complex128)
        if self is BellLabel.SINGLET:
            c[0, 1] = r
            c[1, 0] = -r
        elif self is BellLabel.TRIPLET0:
            c[0, 1] = r
            c[1, 0] = r
        elif self is BellLabel.TRIPLET_PLUS:
            c[0, 0] = r
            c[1, 1] = r
        else:
            c[0, 0] = r
            c[1, 1] = -r
        return c


@dataclass(frozen=True)
class JonesVector:
    """Polarization amplitudes (c1, c0) per frequency node."""

    c1: np.ndarray
    c0: np.ndarray

    def norms(self) -> np.ndarray:
        return np.abs(self.c1) ** 2 + np.abs(self.c0) ** 2


@dataclass
class SinglePhotonDensity:
    """Discretized single-photon density kernel rho_ss'(w_i, w_j).

    kernel has shape (2, 2, n, n) with polarization indices first;
    index 0 is |1>, index 1 is |0>.
    """

    kernel: np.ndarray
    grid: FrequencyGrid
    stats: object | None = None

    def validate(self, atol: float = 1e-8, psd_tol: float = -1e-10) -> None:
        """Assert hermiticity, unit quadrature trace and weighted positivity."""
        k = self.kernel
        herm = k - np.conj(np.transpose(k, (1, 0, 3, 2)))
        if np.max(np.abs(herm)) > atol:
            raise ValueError("density kernel is not Hermitian")
        if abs(self.quad_trace() - 1.0) > atol:
            raise ValueError("density kernel trace differs from 1")
        m = self.as_weighted_matrix()
        eig = np.linalg.eigvalsh(m)
        if eig.min() < psd_tol:
            raise ValueError(f"weighted operator has negative eigenvalue {eig.min():.3e}")

    def quad_trace(self) -> float:
        w = self.grid.weights
        diag = np.einsum("ssii,i->", self.kernel, w)
        return float(np.real(diag))

    def as_weighted_matrix(self) -> np.ndarray:
        """(2n x 2n) matrix scaled by sqrt(w_i w_j), composite index (s, i)."""
        sw = np.sqrt(self.grid.weights)
        m = self.kernel * sw[None, None, :, None] * sw[None, None, None, :]
        n = self.grid.n
        return np.transpose(m, (0, 2, 1, 3)).reshape(2 * n, 2 * n)


@dataclass
class TwoPhotonDensity:
    """Discretized two-photon density kernel.

    Grid form: kernel shape (2, 2, 2, 2, n, n, n, n) indexed
    [s_A, s_B, s_A', s_B', w_A, w_B, w_A', w_B'] on a shared per-axis grid.
    Pair form (Monte Carlo comparisons): kernel shape (2, 2, 2, 2, P, P)
    on an explicit list of (w_A, w_B) pairs, without quadrature weights.
    """

    kernel: np.ndarray
    grid: FrequencyGrid | None = None
    pairs: np.ndarray | None = None
    stats: object | None = None

    def quad_trace(self) -> float:
        if self.grid is None:
            raise ValueError("trace needs a quadrature grid, not a pair list")
        w = self.grid.weights
        diag = np.einsum("ababijij,i,j->", self.kernel, w, w)
        return float(np.real(diag))

    def as_weighted_matrix(self) -> np.ndarray:
        """Dense matrix over composite index (s_A, s_B, w_A, w_B), sqrt(w)-scaled."""
        if self.grid is None:
            raise ValueError("weighted matrix needs a quadrature grid")
        sw = np.sqrt(self.grid.weights)
        n = self.grid.n
        k = self.kernel * sw[None, None, None, None, :, None, None, None]
        k = k * sw[None, None, None, None, None, :, None, None]
        k = k * sw[None, None, None, None, None, None, :, None]
        k = k * sw[None, None, None, None, None, None, None, :]
        m = np.transpose(k, (0, 1, 4, 5, 2, 3, 6, 7)).reshape(4 * n * n, 4 * n * n)
        return m

    def validate(self, atol: float = 1e-8) -> None:
        k = self.kernel
        herm = k - np.conj(np.transpose(k, (2, 3, 0, 1, 6, 7, 4, 5)))
        if np.max(np.abs(herm)) > atol:
            raise ValueError("two-photon kernel is not Hermitian")
        if self.grid is not None and abs(self.quad_trace() - 1.0) > atol:
            raise ValueError("two-photon kernel trace differs from 1")


def input_single_state(envelope: PulseEnvelope, grid: FrequencyGrid) -> SinglePhotonDensity:
    """Pure input state polarized along |1> with the given envelope."""
    if not envelope.is_single:
        raise ValueError("single-photon input needs the single envelope variant")
    phi = envelope.sampled(grid)
    kernel = np.zeros((2, 2, grid.n, grid.n), dtype=np.complex128)
    kernel[0, 0] = np.outer(phi, np.conj(phi))
    return SinglePhotonDensity(kernel=kernel, grid=grid)


def input_two_state(envelope: PulseEnvelope, bell: BellLabel, grid: FrequencyGrid) -> TwoPhotonDensity:
    """Bell-state polarization x double-Gaussian frequency input kernel."""
    if not envelope.is_double:
        raise ValueError("two-photon input needs the double envelope variant")
    c = bell.amplitudes()
    phi = envelope.sampled_pair(grid)
    pol = np.einsum("ab,cd->abcd", c, np.conj(c))
    freq = np.einsum("ij,kl->ijkl", phi, np.conj(phi))
    kernel = np.einsum("abcd,ijkl->abcdijkl", pol, freq)
    return TwoPhotonDensity(kernel=kernel, grid=grid)
