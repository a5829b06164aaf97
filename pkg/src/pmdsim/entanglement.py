"""Generic entanglement and mixedness toolkit for discretized kernels.

Operates on dense weighted operators: kernels scaled by sqrt(w_i w_j) so
that operator algebra (traces, spectra, norms) equals matrix algebra.
Nothing here knows about closed forms; these routines are the
independent check on every analytic negativity in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import SinglePhotonDensity, TwoPhotonDensity

__all__ = [
    "WeightedOperator",
    "from_single_density",
    "from_two_density",
    "from_frequency_kernel",
    "partial_transpose",
    "negativity",
    "reduce",
    "ppt_submatrix",
    "apply_factor_unitary",
]


@dataclass(frozen=True)
class WeightedOperator:
    """Dense operator over a composite index split into tensor factors.

    dims: size of each factor, row-major composite order.
    parties: bipartition label per factor (e.g. "A"/"B"); partial
        transposition acts on all factors sharing a label.
    kinds: "pol" or "freq" per factor; partial traces act on kinds.
    """

    matrix: np.ndarray
    dims: tuple
    parties: tuple
    kinds: tuple

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix)
        d = int(np.prod(self.dims))
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dims {self.dims}")
        if not (len(self.dims) == len(self.parties) == len(self.kinds)):
            raise ValueError("dims, parties and kinds must have equal length")

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def require_hermitian(self, tol: float = 1e-10) -> None:
        err = self.hermiticity_error()
        scale = max(1.0, float(np.max(np.abs(self.matrix))))
        if err > tol * scale:
            raise ValueError(f"operator is not Hermitian (deviation {err:.3e})")


def from_single_density(density: SinglePhotonDensity) -> WeightedOperator:
    return WeightedOperator(
        matrix=density.as_weighted_matrix(),
        dims=(2, density.grid.n),
        parties=("pol", "freq"),
        kinds=("pol", "freq"),
    )


def from_two_density(density: TwoPhotonDensity) -> WeightedOperator:
    n = density.grid.n
    return WeightedOperator(
        matrix=density.as_weighted_matrix(),
        dims=(2, 2, n, n),
        parties=("A", "B", "A", "B"),
        kinds=("pol", "pol", "freq", "freq"),
    )


def from_frequency_kernel(kernel: np.ndarray, grid) -> WeightedOperator:
    """Weighted operator from a polarization-traced kernel (n,n,n,n) over
    (w_A, w_B, w_A', w_B')."""
    n = grid.n
    sw = np.sqrt(grid.weights)
    k = kernel * sw[:, None, None, None] * sw[None, :, None, None]
    k = k * sw[None, None, :, None] * sw[None, None, None, :]
    return WeightedOperator(
        matrix=k.reshape(n * n, n * n),
        dims=(n, n),
        parties=("A", "B"),
        kinds=("freq", "freq"),
    )


def _as_tensor(op: WeightedOperator) -> np.ndarray:
    return op.matrix.reshape(op.dims + op.dims)


def partial_transpose(op: WeightedOperator, party: str = "A") -> WeightedOperator:
    """Swap row and column indices of every factor labeled ``party``."""
    if party not in op.parties:
        raise ValueError(f"party {party!r} not present in {op.parties}")
    k = len(op.dims)
    t = _as_tensor(op)
    perm = list(range(2 * k))
    for i, label in enumerate(op.parties):
        if label == party:
            perm[i], perm[k + i] = perm[k + i], perm[i]
    d = int(np.prod(op.dims))
    return WeightedOperator(
        matrix=np.transpose(t, perm).reshape(d, d),
        dims=op.dims,
        parties=op.parties,
        kinds=op.kinds,
    )


def negativity(op: WeightedOperator, party: str = "A", cutoff: float = 1e-10) -> float:
    """Entanglement negativity across the ``party`` bipartition.

    Sum of |negative eigenvalues| of the partial transpose, with a small
    cutoff suppressing discretization noise. A trace-norm evaluation via
    singular values runs alongside and must agree with the raw
    eigenvalue sum to 1e-9, otherwise the input is rejected.
    """
    op.require_hermitian()
    pt = partial_transpose(op, party)
    eigs = np.linalg.eigvalsh(pt.matrix)
    raw = float(-np.sum(eigs[eigs < 0.0]))
    sv = scipy.linalg.svdvals(pt.matrix)
    via_norm = 0.5 * (float(np.sum(sv)) - pt.trace)
    if abs(raw - via_norm) > 1e-9 * max(1.0, abs(raw)):
        raise ValueError(
            f"negativity mismatch between eigenvalue sum ({raw!r}) and "
            f"trace norm ({via_norm!r})"
        )
    return float(-np.sum(eigs[eigs < -cutoff]))


def reduce(op: WeightedOperator, keep: str) -> WeightedOperator:
    """Partial trace keeping only factors of kind ``keep``.

    keep is "polarization"/"pol" or "frequency"/"freq"; the quadrature
    weights folded into the matrix make the frequency trace a plain
    matrix partial trace.
    """
    kind = {"polarization": "pol", "frequency": "freq", "pol": "pol", "freq": "freq"}.get(keep)
    if kind is None:
        raise ValueError(f"unknown reduction target {keep!r}")
    k = len(op.dims)
    t = _as_tensor(op)
    keep_idx = [i for i in range(k) if op.kinds[i] == kind]
    if not keep_idx:
        raise ValueError(f"no factors of kind {kind!r} to keep")
    for i in reversed([i for i in range(k) if op.kinds[i] != kind]):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    dims = tuple(op.dims[i] for i in keep_idx)
    d = int(np.prod(dims))
    return WeightedOperator(
        matrix=t.reshape(d, d),
        dims=dims,
        parties=tuple(op.parties[i] for i in keep_idx),
        kinds=tuple(op.kinds[i] for i in keep_idx),
    )


def ppt_submatrix(op: WeightedOperator, i: int, j: int, party: str = "A"):
    """Principal 2x2 of the partial transpose at composite indices (i, j).

    Returns (submatrix, negative_verdict): the verdict is True when the
    off-diagonal product exceeds the diagonal product in magnitude,
    which certifies a negative eigenvalue of the partial transpose.
    """
    d = op.matrix.shape[0]
    if not (0 <= i < d and 0 <= j < d) or i == j:
        raise ValueError(f"submatrix indices ({i}, {j}) out of range for dimension {d}")
    pt = partial_transpose(op, party).matrix
    sub = np.array([[pt[i, i], pt[i, j]], [pt[j, i], pt[j, j]]])
    verdict = bool(np.abs(sub[0, 1] * sub[1, 0]) > np.real(sub[0, 0] * sub[1, 1]))
    return sub, verdict


def apply_factor_unitary(op: WeightedOperator, u: np.ndarray, factor: int) -> WeightedOperator:
    """Conjugate one tensor factor by a unitary (test helper)."""
    k = len(op.dims)
    if op.dims[factor] != u.shape[0]:
        raise ValueError("unitary dimension does not match factor")
    t = _as_tensor(op)
    t = np.tensordot(u, t, axes=([1], [factor]))
    t = np.moveaxis(t, 0, factor)
    t = np.tensordot(np.conj(u), t, axes=([1], [k + factor]))
    t = np.moveaxis(t, 0, k + factor)
    d = int(np.prod(op.dims))
    return WeightedOperator(matrix=t.reshape(d, d), dims=op.dims, parties=op.parties, kinds=op.kinds)
