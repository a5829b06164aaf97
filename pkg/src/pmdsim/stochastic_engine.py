"""Monte Carlo engine: quantum trajectories under sampled birefringence.

Each trajectory draws piecewise-constant Stokes vectors for its fiber,
applies exact per-segment SU(2) maps to the polarization amplitudes at
every frequency node, and the ensemble average of the pure-state kernels
estimates the density kernel together with elementwise standard errors.

Reproducibility contract: results are a pure function of (seed,
n_trajectories) and are bit-identical for any worker count. Trajectory t
reads counter-based streams keyed by (seed, t) (two streams, 2t and
2t+1, when two independent fibers are involved), and chunk partials are
reduced in fixed order with compensated summation.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    BellLabel,
    DispersionProfile,
    FiberParameters,
    FrequencyGrid,
    JonesVector,
    PulseEnvelope,
    SinglePhotonDensity,
    TwoPhotonDensity,
    make_dispersion,
)

__all__ = [
    "MCStats",
    "BirefringenceRealization",
    "TrajectoryConfig",
    "backend_name",
    "sample_realization",
    "evolve_single",
    "ensemble_single",
    "ensemble_two",
]

from . import _mc_fallback

_requested = os.environ.get("PMDSIM_MC_BACKEND", "auto").lower()
if _requested == "python":
    _backend = _mc_fallback
elif _requested in ("auto", "cython"):
    try:
        from . import _mc as _backend  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise
        _backend = _mc_fallback
else:
    raise RuntimeError(f"unknown PMDSIM_MC_BACKEND value {_requested!r}")


def backend_name() -> str:
    """Active trajectory-kernel backend: "cython" or "python"."""
    return _backend.BACKEND


# The analytic decay rates use the one-sided delta-correlation convention
# (the correlation integral over z' >= z counts the delta peak in full).
# Matching them with piecewise-constant segments of length dz requires a
# per-component variance of 2 eta^2 / dz, not eta^2 / dz.
_NOISE_VARIANCE_FACTOR = 2.0

# accumulation chunk: fixed so the reduction order never depends on the
# worker count
_CHUNK = 64

_ROTATION_WARN_RAD = 0.5


@dataclass(frozen=True)
class TrajectoryConfig:
    """Monte Carlo controls.

    dz=None picks min(L/256, L_c/512). An explicit dz must satisfy
    dz <= L/32. The seed is mandatory; there is no wall-clock default.
    """

    n_trajectories: int
    seed: int
    dz: float | None = None
    parallelism: int = 1

    def __post_init__(self) -> None:
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be at least 1")
        if not isinstance(self.seed, (int, np.integer)):
            raise ValueError("seed must be an integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.dz is not None and self.dz <= 0:
            raise ValueError("dz must be positive")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")


@dataclass(frozen=True)
class BirefringenceRealization:
    """One fiber's piecewise-constant Stokes vectors b^(k)."""

    segment_length: float
    segments: np.ndarray
    total_length: float


@dataclass(frozen=True)
class MCStats:
    """Elementwise standard errors of the ensemble-mean kernel."""

    n: int
    se_re: np.ndarray
    se_im: np.ndarray


def _resolve_dz(cfg: TrajectoryConfig, length: float, params: FiberParameters) -> float:
    if cfg.dz is not None:
        if cfg.dz > length / 32.0 * (1.0 + 1e-12):
            raise ValueError("dz must be at most L/32")
        return cfg.dz
    return min(length / 256.0, params.decoherence_length / 512.0)


def _segmentation(length: float, dz: float):
    n_seg = max(1, math.ceil(length / dz - 1e-12))
    return n_seg, length / n_seg


def _stream_noise(params: FiberParameters, n_seg: int, dz_eff: float, seed: int, stream_id: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, stream_id], dtype=np.uint64)))
    std = params.eta * math.sqrt(_NOISE_VARIANCE_FACTOR / dz_eff)
    return rng.standard_normal((n_seg, 3)) * std


def _warn_rotation(max_f: float, params: FiberParameters, dz_eff: float) -> None:
    typical_b = 2.0 * math.sqrt(2.0 / math.pi) * params.eta * math.sqrt(
        _NOISE_VARIANCE_FACTOR / dz_eff
    )
    angle = 0.5 * max_f * typical_b * dz_eff
    if angle > _ROTATION_WARN_RAD:
        warnings.warn(
            f"typical per-segment rotation {angle:.2f} rad exceeds "
            f"{_ROTATION_WARN_RAD}; reduce dz",
            stacklevel=3,
        )


def sample_realization(
    params: FiberParameters, length: float, cfg: TrajectoryConfig, stream_id: int = 0
) -> BirefringenceRealization:
    """Draw one fiber realization, a pure function of (seed, stream_id).

    All segments share one effective length L/ceil(L/dz) <= dz so the
    per-segment variance matches the white-noise normalization exactly.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    if length == 0.0:
        return BirefringenceRealization(0.0, np.zeros((0, 3)), 0.0)
    dz = _resolve_dz(cfg, length, params)
    n_seg, dz_eff = _segmentation(length, dz)
    segments = _stream_noise(params, n_seg, dz_eff, int(cfg.seed), stream_id)
    return BirefringenceRealization(dz_eff, segments, length)


def evolve_single(
    jones: JonesVector,
    omegas: np.ndarray,
    realization: BirefringenceRealization,
    profile: DispersionProfile,
) -> JonesVector:
    """Propagate per-node Jones amplitudes through one realization."""
    omegas = np.asarray(omegas, dtype=np.float64)
    c = np.stack(
        [
            np.broadcast_to(jones.c1, omegas.shape),
            np.broadcast_to(jones.c0, omegas.shape),
        ],
        axis=-1,
    )[None].astype(np.complex128)
    c = np.ascontiguousarray(c)
    if realization.segments.shape[0]:
        noise = np.ascontiguousarray(realization.segments[None])
        f = np.ascontiguousarray(profile(omegas))
        _backend.evolve_single_batch(c, noise, f, realization.segment_length)
    return JonesVector(c1=c[0, :, 0], c0=c[0, :, 1])


def _chunk_bounds(n: int):
    return [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]


def _kahan_reduce(partials):
    """Sum per-chunk (m1, m2, s) triples in list order, compensated."""
    sums = [np.zeros_like(p) for p in partials[0]]
    comps = [np.zeros_like(p) for p in partials[0]]
    for triple in partials:
        for s, c, x in zip(sums, comps, triple):
            y = x - c
            t = s + y
            np.copyto(c, (t - s) - y)
            np.copyto(s, t)
    return sums


def _moment_partials(v: np.ndarray):
    m1 = v.T @ np.conj(v)
    w = v * v
    m2 = w.T @ np.conj(w)
    absq = np.abs(v) ** 2
    s = absq.T @ absq
    return m1, m2, s


def _stats_from_moments(m1, m2, s, n: int):
    mean = m1 / n
    sum_re2 = 0.5 * (np.real(m2) + s)
    sum_im2 = 0.5 * (s - np.real(m2))
    if n > 1:
        var_re = np.maximum(sum_re2 - n * np.real(mean) ** 2, 0.0) / (n - 1)
        var_im = np.maximum(sum_im2 - n * np.imag(mean) ** 2, 0.0) / (n - 1)
    else:
        var_re = np.zeros_like(sum_re2)
        var_im = np.zeros_like(sum_im2)
    return mean, np.sqrt(var_re / n), np.sqrt(var_im / n)


def _run_chunks(worker, n: int, parallelism: int):
    bounds = _chunk_bounds(n)
    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            partials = list(pool.map(worker, bounds))
    else:
        partials = [worker(b) for b in bounds]
    return _kahan_reduce(partials)


def ensemble_single(
    envelope: PulseEnvelope,
    params: FiberParameters,
    length: float,
    cfg: TrajectoryConfig,
    grid: FrequencyGrid,
    dispersion: DispersionProfile | None = None,
) -> SinglePhotonDensity:
    """Ensemble-averaged single-photon density kernel with standard errors.

    Hermitian and unit-trace by construction (each trajectory is a pure
    norm-preserving state).
    """
    if dispersion is None:
        dispersion = make_dispersion(params)
    if length < 0:
        raise ValueError("length must be nonnegative")
    f = np.ascontiguousarray(dispersion(grid.nodes))
    n = grid.n
    if length > 0:
        dz = _resolve_dz(cfg, length, params)
        n_seg, dz_eff = _segmentation(length, dz)
        _warn_rotation(float(np.max(np.abs(f))), params, dz_eff)
    else:
        n_seg, dz_eff = 0, 0.0
    seed = int(cfg.seed)

    def worker(bounds):
        lo, hi = bounds
        nb = hi - lo
        c = np.zeros((nb, n, 2), dtype=np.complex128)
        c[:, :, 0] = 1.0
        if n_seg:
            noise = np.empty((nb, n_seg, 3))
            for i, t in enumerate(range(lo, hi)):
                noise[i] = _stream_noise(params, n_seg, dz_eff, seed, t)
            _backend.evolve_single_batch(c, noise, f, dz_eff)
        v = np.ascontiguousarray(c.transpose(0, 2, 1).reshape(nb, 2 * n))
        return _moment_partials(v)

    m1, m2, s = _run_chunks(worker, cfg.n_trajectories, cfg.parallelism)
    mean, se_re, se_im = _stats_from_moments(m1, m2, s, cfg.n_trajectories)

    phi = envelope.sampled(grid)
    pp = np.outer(phi, np.conj(phi))
    scale = np.abs(pp)

    def to_kernel(mat):
        return np.transpose(mat.reshape(2, n, 2, n), (0, 2, 1, 3))

    kernel = to_kernel(mean) * pp[None, None]
    stats = MCStats(
        n=cfg.n_trajectories,
        se_re=to_kernel(se_re) * scale[None, None],
        se_im=to_kernel(se_im) * scale[None, None],
    )
    return SinglePhotonDensity(kernel=kernel, grid=grid, stats=stats)


def ensemble_two(
    envelope: PulseEnvelope,
    bell: BellLabel,
    params: FiberParameters,
    length: float,
    cfg: TrajectoryConfig,
    pairs: np.ndarray,
    mode: str = "separate",
    dispersion: DispersionProfile | None = None,
) -> TwoPhotonDensity:
    """Two-photon ensemble kernel on an explicit (w_A, w_B) pair list.

    mode "separate" draws independent realizations for the two fibers
    (streams 2t and 2t+1); mode "common" applies one realization
    (stream t) to both photons.
    """
    if mode not in ("separate", "common"):
        raise ValueError(f"unknown mode {mode!r}")
    if dispersion is None:
        dispersion = make_dispersion(params)
    if length < 0:
        raise ValueError("length must be nonnegative")
    pairs = np.asarray(pairs, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("pairs must have shape (P, 2)")
    n_pairs = pairs.shape[0]
    f_a = np.ascontiguousarray(dispersion(pairs[:, 0]))
    f_b = np.ascontiguousarray(dispersion(pairs[:, 1]))
    if length > 0:
        dz = _resolve_dz(cfg, length, params)
        n_seg, dz_eff = _segmentation(length, dz)
        _warn_rotation(float(max(np.max(np.abs(f_a)), np.max(np.abs(f_b)))), params, dz_eff)
    else:
        n_seg, dz_eff = 0, 0.0
    seed = int(cfg.seed)
    c_in = bell.amplitudes()

    def worker(bounds):
        lo, hi = bounds
        nb = hi - lo
        c = np.empty((nb, n_pairs, 2, 2), dtype=np.complex128)
        c[:] = c_in[None, None]
        if n_seg:
            if mode == "separate":
                noise_a = np.empty((nb, n_seg, 3))
                noise_b = np.empty((nb, n_seg, 3))
                for i, t in enumerate(range(lo, hi)):
                    noise_a[i] = _stream_noise(params, n_seg, dz_eff, seed, 2 * t)
                    noise_b[i] = _stream_noise(params, n_seg, dz_eff, seed, 2 * t + 1)
            else:
                noise_a = np.empty((nb, n_seg, 3))
                for i, t in enumerate(range(lo, hi)):
                    noise_a[i] = _stream_noise(params, n_seg, dz_eff, seed, t)
                noise_b = noise_a
            _backend.evolve_two_batch(c, noise_a, noise_b, f_a, f_b, dz_eff)
        v = np.ascontiguousarray(c.transpose(0, 2, 3, 1).reshape(nb, 4 * n_pairs))
        return _moment_partials(v)

    m1, m2, s = _run_chunks(worker, cfg.n_trajectories, cfg.parallelism)
    mean, se_re, se_im = _stats_from_moments(m1, m2, s, cfg.n_trajectories)

    phi = envelope.amplitude_pair(pairs[:, 0], pairs[:, 1])
    pp = np.outer(phi, np.conj(phi))
    scale = np.abs(pp)

    def to_kernel(mat):
        t = mat.reshape(2, 2, n_pairs, 2, 2, n_pairs)
        return np.transpose(t, (0, 1, 3, 4, 2, 5))

    kernel = to_kernel(mean) * pp[None, None, None, None]
    stats = MCStats(
        n=cfg.n_trajectories,
        se_re=to_kernel(se_re) * scale[None, None, None, None],
        se_im=to_kernel(se_im) * scale[None, None, None, None],
    )
    return TwoPhotonDensity(kernel=kernel, pairs=pairs, stats=stats)
