"""Symmetric subspace S^k(C^d) in the occupation-number basis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product

import numpy as np

from .linalg import DimensionError, kron_all, permute_systems

# amplitudes in C^(d^k); guards against accidental huge tensor powers
MAX_AMPLITUDES = 2**20


class SizeCapError(ValueError):
    """Requested tensor power exceeds the configured amplitude cap."""


def sym_dim(d: int, k: int) -> int:
    """Dimension of the symmetric subspace of ``(C^d)^{⊗k}``: binom(k+d-1, d-1)."""
    if d < 1 or k < 0:
        raise ValueError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    return math.comb(k + d - 1, d - 1)


def occupations(d: int, k: int) -> list[tuple[int, ...]]:
    """All occupation vectors (n_1, ..., n_d) with sum k, in descending lexicographic order.

    The first vector is (k, 0, ..., 0), i.e. the column for |0...0>.
    """

    def rec(slots: int, left: int) -> list[tuple[int, ...]]:
        if slots == 1:
            return [(left,)]
        return [(n,) + rest for n in range(left, -1, -1) for rest in rec(slots - 1, left - n)]

    return rec(d, k)


@dataclass(frozen=True)
class SymmetricSpace:
    d: int
    k: int
    basis: tuple[tuple[int, ...], ...]
    isometry: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=64)
def _build(d: int, k: int) -> SymmetricSpace:
    basis = tuple(occupations(d, k))
    col = {occ: j for j, occ in enumerate(basis)}
    v = np.zeros((d**k, len(basis)))
    for flat, word in enumerate(product(range(d), repeat=k)):
        occ = tuple(word.count(a) for a in range(d))
        v[flat, col[occ]] = 1.0
    v /= np.sqrt(v.sum(axis=0))
    v.setflags(write=False)
    return SymmetricSpace(d, k, basis, v)


def sym_isometry(d: int, k: int, max_amplitudes: int = MAX_AMPLITUDES) -> SymmetricSpace:
    """Real isometry from S^k(C^d) into (C^d)^{⊗k}.

    Column j is the normalized uniform superposition of all words whose
    letter counts equal ``basis[j]``.
    """
    if d < 1 or k < 1:
        raise ValueError(f"need d >= 1 and k >= 1, got d={d}, k={k}")
    if d**k > max_amplitudes:
        raise SizeCapError(f"d^k = {d}^{k} exceeds the cap of {max_amplitudes} amplitudes")
    return _build(d, k)


def symmetrizer(d: int, k: int) -> np.ndarray:
    """Projector (1/k!) Σ_π U_π onto S^k(C^d), by explicit permutation sum."""
    out = np.zeros((d**k, d**k))
    for perm in permutations(range(k)):
        out += _permutation_unitary(d, k, perm)
    return out / math.factorial(k)


def _permutation_unitary(d: int, k: int, perm) -> np.ndarray:
    n = d**k
    t = np.eye(n).reshape((d,) * k + (n,))
    src = list(np.argsort(perm))
    return t.transpose(src + [k]).reshape(n, n)


def transposition_unitary(d: int, k: int, i: int, j: int) -> np.ndarray:
    perm = list(range(k))
    perm[i], perm[j] = perm[j], perm[i]
    return _permutation_unitary(d, k, perm)


def lift(x: np.ndarray, dims, levels, max_amplitudes: int = MAX_AMPLITUDES) -> np.ndarray:
    """Map an operator on ⊗_i S^{k_i}(A_i) to ⊗_i A_i^{⊗k_i}.

    The output is ordered factor by factor: all copies of A_1, then all
    copies of A_2, and so on.
    """
    dims = tuple(int(d) for d in dims)
    levels = tuple(int(k) for k in levels)
    if len(dims) != len(levels):
        raise DimensionError(f"{len(levels)} levels given for {len(dims)} subsystems")
    side = int(np.prod([sym_dim(d, k) for d, k in zip(dims, levels)]))
    x = np.asarray(x)
    if x.shape != (side, side):
        raise DimensionError(f"compressed operator has shape {x.shape}, expected side {side}")
    full = int(np.prod([d**k for d, k in zip(dims, levels)]))
    if full > max_amplitudes:
        raise SizeCapError(f"lifted space has {full} amplitudes, cap is {max_amplitudes}")
    v = kron_all(sym_isometry(d, k).isometry for d, k in zip(dims, levels))
    return v @ x @ v.T


def copy_dims(dims, levels) -> list[int]:
    """Subsystem dimensions of the lifted space, one entry per copy."""
    return [d for d, k in zip(dims, levels) for _ in range(k)]


def first_copies(levels) -> list[int]:
    """Positions of the first copy of each factor in the lifted ordering."""
    out, pos = [], 0
    for k in levels:
        out.append(pos)
        pos += k
    return out


def swap_copies(m: np.ndarray, dims, levels, factor: int, a: int, b: int) -> np.ndarray:
    """Exchange copies ``a`` and ``b`` of one factor in a lifted operator."""
    cd = copy_dims(dims, levels)
    start = first_copies(levels)[factor]
    perm = list(range(len(cd)))
    perm[start + a], perm[start + b] = perm[start + b], perm[start + a]
    return permute_systems(m, cd, perm)
