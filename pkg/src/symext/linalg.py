"""Dense complex matrix kernel.

All tensor-product bookkeeping uses the big-endian convention: the first
subsystem is the most significant index.  Matrices are plain ``numpy``
arrays; nothing here mutates its inputs.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-12


class DimensionError(ValueError):
    """Subsystem dimensions do not match the matrix they describe."""


class NotHermitianError(ValueError):
    """A matrix expected to be Hermitian is not, within tolerance."""


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product ``a ⊗ b`` with ``a`` as the most significant factor."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1))
    for m in mats:
        out = np.kron(out, m)
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    side = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (side, side):
        raise DimensionError(
            f"matrix of shape {m.shape} does not match dims {dims} (side {side})"
        )
    return dims


def _check_subset(idx: Iterable[int], n: int, what: str) -> list[int]:
    out = sorted({int(i) for i in idx})
    if any(i < 0 or i >= n for i in out):
        raise DimensionError(f"{what} indices {out} out of range for {n} subsystems")
    return out


def permute_systems(m: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Conjugate ``m`` by the subsystem permutation unitary ``U_perm``.

    ``U_perm |i_0 ... i_{n-1}> = |i_{perm^-1(0)} ... i_{perm^-1(n-1)}>``, i.e.
    input factor ``p`` lands at output position ``perm[p]``.  For a swap,
    ``permute_systems(kron(a, b), (da, db), (1, 0)) == kron(b, a)``.
    """
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise DimensionError(f"{perm} is not a permutation of {n} subsystems")
    src = list(np.argsort(perm))
    t = m.reshape(dims + dims)
    t = t.transpose(src + [n + p for p in src])
    side = m.shape[0]
    return t.reshape(side, side)


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept factors stay in their original relative order.
    """
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = _check_subset(keep, n, "keep")
    if not keep:
        raise DimensionError("keep must name at least one subsystem")
    drop = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # move traced factors to the end so einsum can contract them pairwise
    order = keep + drop
    t = t.transpose(order + [n + i for i in order])
    dk = int(np.prod([dims[i] for i in keep]))
    dd = int(np.prod([dims[i] for i in drop])) if drop else 1
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def partial_transpose(
    m: np.ndarray, dims: Sequence[int], transposed: Iterable[int]
) -> np.ndarray:
    """Transpose the listed subsystems in the computational basis."""
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    sel = set(_check_subset(transposed, n, "transposed"))
    axes = list(range(2 * n))
    for i in sel:
        axes[i], axes[n + i] = n + i, i
    t = m.reshape(dims + dims).transpose(axes)
    return t.reshape(m.shape)


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    if m.size == 0:
        return True
    scale = np.max(np.abs(m))
    return bool(np.max(np.abs(m - m.conj().T)) <= rtol * max(scale, 1e-300))


def check_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    m = np.asarray(m)
    if not is_hermitian(m, rtol):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
        dev = np.max(np.abs(m - m.conj().T))
        raise NotHermitianError(f"matrix is not Hermitian: max |M - M^dagger| = {dev:.3e}")
    return m


def eig_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Non-Hermitian input is rejected rather than symmetrized.
    """
    m = check_hermitian(m, rtol)
    return np.linalg.eigh(m)


def min_eig(m: np.ndarray, rtol: float = 1e-9) -> float:
    return float(eig_hermitian(m, rtol)[0][0])


def trace_norm(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"trace norm needs a square matrix, got {m.shape}")
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m)))
