"""Pure NumPy trajectory kernels.

Drop-in replacements for the compiled extension: same signatures, same
noise consumption, same floating-point semantics at the level the
engine's tests require. Vectorized over the trajectory batch and the
frequency axis; the segment loop stays in Python.
"""

from __future__ import annotations

import numpy as np

__all__ = ["evolve_single_batch", "evolve_two_batch", "BACKEND"]

BACKEND = "python"


def _su2_components(half, axis):
    """Components of exp(-i theta n.sigma/2) for per-row axes.

    half: (B, m) half angles; axis: (B, 3). Returns u11, u12, u21, u22
    with shape (B, m).
    """
    ct = np.cos(half)
    st = np.sin(half)
    n1 = axis[:, 0][:, None]
    n2 = axis[:, 1][:, None]
    n3 = axis[:, 2][:, None]
    u11 = ct - 1j * st * n3
    u12 = -st * n2 - 1j * st * n1
    u21 = st * n2 - 1j * st * n1
    u22 = ct + 1j * st * n3
    return u11, u12, u21, u22


def _axes(b):
    norm = np.sqrt(np.sum(b * b, axis=1))
    safe = np.where(norm > 0.0, norm, 1.0)
    return norm, b / safe[:, None]


def evolve_single_batch(c: np.ndarray, noise: np.ndarray, f: np.ndarray, dz: float) -> None:
    """Advance a batch of single-photon trajectories through all segments.

    c: (B, n, 2) complex Jones amplitudes per node, updated in place.
    noise: (B, S, 3) birefringence draws; f: (n,) profile values.
    """
    n_seg = noise.shape[1]
    for k in range(n_seg):
        norm, axis = _axes(noise[:, k, :])
        half = 0.5 * dz * f[None, :] * norm[:, None]
        u11, u12, u21, u22 = _su2_components(half, axis)
        c1 = c[:, :, 0]
        c0 = c[:, :, 1]
        d1 = u11 * c1 + u12 * c0
        d0 = u21 * c1 + u22 * c0
        c[:, :, 0] = d1
        c[:, :, 1] = d0


def evolve_two_batch(
    c: np.ndarray,
    noise_a: np.ndarray,
    noise_b: np.ndarray,
    f_a: np.ndarray,
    f_b: np.ndarray,
    dz: float,
) -> None:
    """Advance two-photon trajectories; photon A and B unitaries act on
    the left and right polarization index respectively.

    c: (B, P, 2, 2) complex amplitudes per (w_A, w_B) pair, in place.
    noise_a/noise_b: (B, S, 3); pass the same array for a common fiber.
    """
    n_seg = noise_a.shape[1]
    for k in range(n_seg):
        norm_a, axis_a = _axes(noise_a[:, k, :])
        norm_b, axis_b = _axes(noise_b[:, k, :])
        a11, a12, a21, a22 = _su2_components(0.5 * dz * f_a[None, :] * norm_a[:, None], axis_a)
        b11, b12, b21, b22 = _su2_components(0.5 * dz * f_b[None, :] * norm_b[:, None], axis_b)
        c00 = c[:, :, 0, 0]
        c01 = c[:, :, 0, 1]
        c10 = c[:, :, 1, 0]
        c11 = c[:, :, 1, 1]
        d00 = a11 * c00 + a12 * c10
        d01 = a11 * c01 + a12 * c11
        d10 = a21 * c00 + a22 * c10
        d11 = a21 * c01 + a22 * c11
        c[:, :, 0, 0] = d00 * b11 + d01 * b12
        c[:, :, 0, 1] = d00 * b21 + d01 * b22
        c[:, :, 1, 0] = d10 * b11 + d11 * b12
        c[:, :, 1, 1] = d10 * b21 + d11 * b22
