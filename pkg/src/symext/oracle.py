"""Brute-force cross-checks for the compressed hierarchy.

None of this shares construction code with :mod:`symext.dps`: the
extension SDP here lives on the full tensor power and imposes bosonic
symmetry through explicit transposition constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from . import sdp
from .linalg import partial_transpose, permute_systems, trace_norm
from .states import DensityMatrix, random_pure_product

PPT_EXACT_DIMS = {(2, 2), (2, 3), (3, 2)}
FULL_SPACE_CAP = 2**12

SEPARABLE = "separable"
ENTANGLED = "entangled"


@dataclass
class OracleResult:
    verdict: str
    margin: float
    method: str
    details: dict = field(default_factory=dict)


def ppt_exact_separability(rho: DensityMatrix) -> OracleResult:
    """Peres-Horodecki decision, only where it is exact (2x2, 2x3, 3x2)."""
    if rho.dims not in PPT_EXACT_DIMS:
        raise ValueError(
            f"PPT decides separability only for dims {sorted(PPT_EXACT_DIMS)}, got {rho.dims}"
        )
    pt = partial_transpose(rho.matrix, rho.dims, [1])
    lo = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    return OracleResult(SEPARABLE if lo >= -1e-10 else ENTANGLED, lo, "ppt-exact")


def ppt_threshold(family, lo: float, hi: float, xtol: float = 1e-12) -> float:
    """Root of the minimum partial-transpose eigenvalue along a one-parameter family."""
    from scipy.optimize import brentq

    def f(t):
        rho = family(t)
        pt = partial_transpose(rho.matrix, rho.dims, [rho.n_parties - 1])
        return float(np.linalg.eigvalsh(pt)[0])

    return brentq(f, lo, hi, xtol=xtol)


# --- uncompressed extension SDP -------------------------------------------------


def _embed_coeff(h: np.ndarray) -> np.ndarray:
    re, im = h.real, h.imag
    return sdp.svec(0.5 * np.block([[re, -im], [im, re]]))


def _swap_matrix(copy_dims: list[int], i: int) -> np.ndarray:
    """Permutation matrix exchanging tensor positions i and i+1."""
    total = int(np.prod(copy_dims))
    u = np.zeros((total, total))
    for col, idx in enumerate(np.ndindex(*copy_dims)):
        idx = list(idx)
        idx[i], idx[i + 1] = idx[i + 1], idx[i]
        u[np.ravel_multi_index(idx, copy_dims), col] = 1.0
    return u


def uncompressed_extendibility(
    rho: DensityMatrix,
    levels,
    opts: sdp.SolverOptions | None = None,
    cap: int = FULL_SPACE_CAP,
    tol: float = 1e-5,
) -> OracleResult:
    """Minimal white-noise fraction λ* for a bosonic extension on the full tensor power."""
    dims, levels = rho.dims, tuple(int(k) for k in levels)
    if len(levels) != len(dims):
        raise ValueError(f"{len(levels)} levels for {len(dims)} parties")
    copy_dims = [d for d, k in zip(dims, levels) for _ in range(k)]
    total = int(np.prod(copy_dims))
    if total > cap:
        raise ValueError(f"full space dimension {total} exceeds the oracle cap {cap}")
    big_d = rho.dim
    starts = np.cumsum((0,) + levels[:-1])
    n_rest = len(copy_dims) - len(dims)
    blk = sdp.svec_len(2 * total)
    rows, rhs = [], []

    # move the kept copies to the front so H ⊗ I can be built with a plain kron
    front = list(starts) + [i for i in range(len(copy_dims)) if i not in set(starts)]
    reordered = [copy_dims[i] for i in front]
    rest = np.eye(total // big_d)

    # marginal equalities in the elementary Hermitian basis of D×D
    for a in range(big_d):
        for b in range(a, big_d):
            for part in ("re", "im") if a != b else ("re",):
                h = np.zeros((big_d, big_d), dtype=complex)
                if part == "re":
                    h[a, b] = h[b, a] = 1.0
                else:
                    h[a, b], h[b, a] = 1j, -1j
                full = np.kron(h, rest)
                if n_rest:
                    full = permute_systems(full, reordered, front)
                row = np.zeros(blk + 1)
                row[:blk] = _embed_coeff(full)
                # tr(h (ρ - I/D))
                row[-1] = np.trace(h @ (rho.matrix - np.eye(big_d) / big_d)).real
                rows.append(row)
                rhs.append(np.trace(h @ rho.matrix).real)

    # bosonic support: (U - I) X = 0 for adjacent swaps inside each factor
    for s, k in zip(starts, levels):
        for j in range(k - 1):
            swap = _swap_matrix(copy_dims, s + j)
            u = swap - np.eye(total)
            partner = np.argmax(swap, axis=1)
            # row a of U - I is minus row partner[a]; fixed points give zero rows
            for a in np.flatnonzero(np.arange(total) < partner):
                for b in range(total):
                    f = np.zeros((total, total), dtype=complex)
                    f[b, :] = u[a, :]  # tr(f X) = ((U - I) X)[a, b]
                    for g in (f, -1j * f):
                        h = 0.5 * (g + g.conj().T)
                        row = np.zeros(blk + 1)
                        row[:blk] = _embed_coeff(h)
                        rows.append(row)
                        rhs.append(0.0)

    # unit trace
    row = np.zeros(blk + 1)
    row[:blk] = _embed_coeff(np.eye(total, dtype=complex))
    rows.append(row)
    rhs.append(1.0)

    c = np.zeros(blk + 1)
    c[-1] = 1.0
    prob = sdp.SdpProblem([2 * total], 1, c, np.array(rows), np.array(rhs))
    sol = sdp.solve(prob, opts)
    details = {"sdp_status": sol.status, "iterations": sol.iterations, "rows": len(rhs),
               "rows_kept": sol.info.get("rows_kept")}
    if sol.status != sdp.OPTIMAL:
        return OracleResult("INCONCLUSIVE", math.nan, "uncompressed-sdp", details)
    lam = float(sol.x_scalar[0])
    x = sdp.recover_hermitian(sol.x_blocks[0])
    details["extension"] = x
    verdict = "EXTENDIBLE" if lam <= tol else "NOT_EXTENDIBLE"
    return OracleResult(verdict, lam, "uncompressed-sdp", details)


# --- nearest separable state ------------------------------------------------------


@dataclass
class NearestSeparable:
    frobenius: float
    trace: float
    sigma: np.ndarray
    history: list[float]
    iterations: int


def _seesaw(g: np.ndarray, dims, rng, sweeps: int = 30) -> tuple[np.ndarray, float]:
    """Approximately minimize <φ|G|φ> over pure product vectors."""
    vecs = []
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        vecs.append(v / np.linalg.norm(v))
    n = len(dims)
    t = g.reshape(tuple(dims) * 2)
    val = math.inf
    for _ in range(sweeps):
        for j in range(n):
            op = _effective(t, vecs, j, n)
            w, v = np.linalg.eigh(op)
            vecs[j] = v[:, 0]
            new = float(w[0])
        if val - new < 1e-13:
            val = new
            break
        val = new
    phi = vecs[0]
    for v in vecs[1:]:
        phi = np.kron(phi, v)
    return phi, val


def _effective(t: np.ndarray, vecs, j: int, n: int) -> np.ndarray:
    """<others| G |others> as a d_j × d_j matrix."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    bra = letters[:n]
    ket = letters[n:2 * n]
    ops = [t]
    subs = [bra + ket]
    for i in range(n):
        if i == j:
            continue
        ops += [vecs[i].conj(), vecs[i]]
        subs += [bra[i], ket[i]]
    out = bra[j] + ket[j]
    return np.einsum(",".join(subs) + "->" + out, *ops)


def nearest_separable_estimate(
    rho: DensityMatrix,
    samples: int = 8,
    seed=0,
    max_iter: int = 5000,
    gap_tol: float = 1e-10,
) -> NearestSeparable:
    """Upper bound on the distance from ρ to the separable set.

    Fully corrective conditional gradient on ‖σ - ρ‖_F² over mixtures of pure
    product states; each linear step keeps the best of ``samples`` seeded
    see-saw restarts.  Distances are those of the best mixture found.
    """
    rng = np.random.default_rng(seed)
    dims, r = rho.dims, rho.matrix
    atoms = [random_pure_product(dims, rng)]
    w = np.ones(1)
    sigma = np.outer(atoms[0], atoms[0].conj())
    hist = [float(np.linalg.norm(sigma - r))]
    it = 0
    for it in range(1, max_iter + 1):
        grad = 2 * (sigma - r)
        best, bval = None, math.inf
        for _ in range(samples):
            phi, val = _seesaw(grad, dims, rng)
            if val < bval:
                best, bval = phi, val
        fw_gap = float(np.trace(grad @ sigma).real) - bval
        if fw_gap <= gap_tol:
            break
        atoms.append(best)
        w = _reweight(atoms, r)
        keep = w > 1e-14
        atoms = [a for a, k in zip(atoms, keep) if k]
        w = w[keep] / w[keep].sum()
        sigma = sum(wi * np.outer(a, a.conj()) for wi, a in zip(w, atoms))
        hist.append(min(hist[-1], float(np.linalg.norm(sigma - r))))
    return NearestSeparable(
        frobenius=float(np.linalg.norm(sigma - r)),
        trace=trace_norm(sigma - r),
        sigma=sigma,
        history=hist,
        iterations=it,
    )


def _reweight(atoms, r: np.ndarray) -> np.ndarray:
    """Simplex-constrained least squares for the mixture weights."""
    cols = [np.outer(a, a.conj()).ravel() for a in atoms]
    a = np.array(cols).T
    a = np.vstack([a.real, a.imag])
    rhs = np.concatenate([r.ravel().real, r.ravel().imag])
    big = 1e3
    a = np.vstack([a, big * np.ones(len(atoms))])
    rhs = np.append(rhs, big)
    w, _ = nnls(a, rhs, maxiter=50 * len(atoms) + 100)
    return w / w.sum()
