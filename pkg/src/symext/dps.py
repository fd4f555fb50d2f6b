"""Symmetric-extension hierarchy as a noise-robustness SDP.

For a state ρ on A_1 ⊗ ... ⊗ A_N and levels (k_1, ..., k_N) we solve

    minimize λ  over  X ⪰ 0 on ⊗_i S^{k_i}(A_i),  λ ≥ 0
    subject to  tr X = 1,
                L(X) + λ (ρ - I/D) = ρ,
                PT_c(X) ⪰ 0  for every requested cut c,

where L lifts X into ⊗_i A_i^{⊗k_i} and keeps one copy of each factor.
λ* = 0 means ρ itself has the extension; otherwise the equality
multipliers give a witness W with tr(Wρ) = -λ* that is nonnegative on
every extendible state.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import sdp
from .linalg import partial_transpose
from .states import DensityMatrix, make_family
from .symmetric import MAX_AMPLITUDES, SizeCapError, sym_dim, sym_isometry

log = logging.getLogger(__name__)

EXTENDIBLE = "EXTENDIBLE"
NOT_EXTENDIBLE = "NOT_EXTENDIBLE"
INCONCLUSIVE = "INCONCLUSIVE"

WITNESS_TOL = 1e-7
# compressed-variable side; beyond this the dense solver is not usable anyway
MAX_COMPRESSED_SIDE = 256


@dataclass(frozen=True)
class ExtensionSpec:
    """Extension levels, PPT cuts (0-based factor sets) and solver settings.

    A cut ``{i, ...}`` partially transposes those factors of the compressed
    variable; the complementary set describes the same constraint.
    """

    levels: tuple[int, ...]
    ppt_cuts: tuple[frozenset[int], ...] = ()
    tol: float = 1e-5
    solver: sdp.SolverOptions = field(default_factory=sdp.SolverOptions)

    def __post_init__(self):
        levels = tuple(int(k) for k in self.levels)
        if not levels or any(k < 1 for k in levels):
            raise ValueError(f"levels must be positive integers, got {self.levels}")
        object.__setattr__(self, "levels", levels)
        cuts = []
        for cut in self.ppt_cuts:
            cut = frozenset(int(i) for i in cut)
            if not cut or len(cut) >= len(levels) or min(cut) < 0 or max(cut) >= len(levels):
                raise ValueError(f"PPT cut {sorted(cut)} is not a proper bipartition of {len(levels)} factors")
            cuts.append(cut)
        object.__setattr__(self, "ppt_cuts", tuple(cuts))

    def check_dims(self, dims: Sequence[int]) -> None:
        if len(dims) != len(self.levels):
            raise ValueError(f"{len(self.levels)} levels given for a state with {len(dims)} parties")


@dataclass
class Witness:
    operator: np.ndarray
    value_on_state: float
    lifted_min_eig: float
    ppt_max_eig: float = -math.inf

    @property
    def valid(self) -> bool:
        return (
            self.value_on_state < 0
            and self.lifted_min_eig >= -WITNESS_TOL
            and self.ppt_max_eig <= WITNESS_TOL
        )


@dataclass
class Verdict:
    status: str
    lambda_star: float
    witness: Witness | None = None
    diagnostics: dict = field(default_factory=dict)


# --- operator bases -----------------------------------------------------------


@lru_cache(maxsize=32)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis of d×d matrices, shape (d², d, d)."""
    out = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1.0
        out.append(m)
    r = 1 / math.sqrt(2)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = r
            out.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[i, j], m[j, i] = -1j * r, 1j * r
            out.append(m)
    b = np.array(out)
    b.setflags(write=False)
    return b


@lru_cache(maxsize=32)
def _factor_adjoints(d: int, k: int) -> np.ndarray:
    """V^T (g ⊗ I) V for every basis element g acting on the first of k copies."""
    v = sym_isometry(d, k).isometry
    rest = np.eye(d ** (k - 1))
    out = np.array([v.T @ np.kron(g, rest) @ v for g in hermitian_basis(d)])
    out.setflags(write=False)
    return out


def product_basis(dims: Sequence[int]) -> np.ndarray:
    """Tensor products of per-factor Hermitian bases; orthonormal on ⊗ A_i."""
    out = np.ones((1, 1, 1), dtype=complex)
    for d in dims:
        b = hermitian_basis(d)
        out = np.einsum("aij,bkl->abikjl", out, b).reshape(
            out.shape[0] * b.shape[0], out.shape[1] * d, out.shape[2] * d
        )
    return out


def marginal_adjoints(dims: Sequence[int], levels: Sequence[int]) -> np.ndarray:
    """L†(G) on the compressed space for every product basis element G."""
    out = np.ones((1, 1, 1), dtype=complex)
    for d, k in zip(dims, levels):
        f = _factor_adjoints(d, k)
        out = np.einsum("aij,bkl->abikjl", out, f).reshape(
            out.shape[0] * f.shape[0], out.shape[1] * f.shape[1], out.shape[2] * f.shape[2]
        )
    return out


def marginal(x: np.ndarray, dims: Sequence[int], levels: Sequence[int]) -> np.ndarray:
    """L(X): lift a compressed operator and keep one copy of each factor."""
    adj = marginal_adjoints(dims, levels)
    coeffs = np.einsum("aij,ji->a", adj, x)  # tr(L†(G_a) X)
    return np.einsum("a,aij->ij", coeffs, product_basis(dims))


def apply_adjoint(w: np.ndarray, dims: Sequence[int], levels: Sequence[int]) -> np.ndarray:
    """L†(W) for a Hermitian W on ⊗ A_i."""
    basis = product_basis(dims)
    coeffs = np.einsum("aij,ji->a", basis, w).real
    return np.einsum("a,aij->ij", coeffs, marginal_adjoints(dims, levels))


def _coeff_stack(h: np.ndarray) -> np.ndarray:
    """svec of hermitian_coeff for a stack of Hermitian matrices."""
    re, im = h.real, h.imag
    return sdp.svec(0.5 * np.block([[re, -im], [im, re]]))


def compressed_dims(dims, levels) -> tuple[int, ...]:
    return tuple(sym_dim(d, k) for d, k in zip(dims, levels))


# --- SDP construction ---------------------------------------------------------


@dataclass
class ExtensionSdp:
    problem: sdp.SdpProblem
    dims: tuple[int, ...]
    levels: tuple[int, ...]
    cuts: tuple[frozenset[int], ...]
    n_marginal: int
    side: int


def build_extension_sdp(rho: DensityMatrix, spec: ExtensionSpec) -> ExtensionSdp:
    dims = rho.dims
    spec.check_dims(dims)
    for d, k in zip(dims, spec.levels):
        if d**k > MAX_AMPLITUDES:
            raise SizeCapError(f"{d}^{k} amplitudes exceed the cap of {MAX_AMPLITUDES}")
    cdims = compressed_dims(dims, spec.levels)
    n = int(np.prod(cdims))
    if n > MAX_COMPRESSED_SIDE:
        raise SizeCapError(f"compressed variable side {n} exceeds {MAX_COMPRESSED_SIDE}")
    big_d = rho.dim
    cuts = spec.ppt_cuts
    nb = len(cuts) + 1
    blk = sdp.svec_len(2 * n)

    basis = product_basis(dims)
    adj = marginal_adjoints(dims, spec.levels)
    rho_m = rho.matrix
    shifted = rho_m - np.eye(big_d) / big_d
    g_rho = np.einsum("aij,ji->a", basis, rho_m).real
    g_shift = np.einsum("aij,ji->a", basis, shifted).real

    rows, rhs = [], []
    # marginal equalities, one per basis element
    a = np.zeros((big_d**2, nb * blk + 1))
    a[:, :blk] = _coeff_stack(adj)
    a[:, -1] = g_shift
    rows.append(a)
    rhs.append(g_rho)
    # trace normalization
    a = np.zeros((1, nb * blk + 1))
    a[0, :blk] = _coeff_stack(np.eye(n)[None].astype(complex))
    rows.append(a)
    rhs.append(np.ones(1))
    # Z_c - PT_c(X) = 0 in the standard Hermitian basis of the compressed space
    if cuts:
        hb = hermitian_basis(n)
        for c, cut in enumerate(cuts):
            pts = np.array([partial_transpose(h, cdims, cut) for h in hb])
            a = np.zeros((n * n, nb * blk + 1))
            a[:, :blk] = -_coeff_stack(pts)
            a[:, (c + 1) * blk:(c + 2) * blk] = _coeff_stack(hb)
            rows.append(a)
            rhs.append(np.zeros(n * n))

    c_vec = np.zeros(nb * blk + 1)
    c_vec[-1] = 1.0
    prob = sdp.SdpProblem([2 * n] * nb, 1, c_vec, np.vstack(rows), np.concatenate(rhs))
    return ExtensionSdp(prob, dims, spec.levels, cuts, big_d**2, n)


# --- verdicts -----------------------------------------------------------------


def extract_witness(sol: sdp.SdpSolution, rho: DensityMatrix, ext: ExtensionSdp) -> Witness:
    """Witness W = -(Y + tI) from the marginal and trace multipliers, scaled to ‖W‖∞ = 1."""
    dims, levels, n = ext.dims, ext.levels, ext.side
    m = ext.n_marginal
    y = sol.y
    basis = product_basis(dims)
    w = -(np.einsum("a,aij->ij", y[:m], basis) + y[m] * np.eye(rho.dim))
    w = 0.5 * (w + w.conj().T)
    scale = float(np.max(np.abs(np.linalg.eigvalsh(w))))
    if scale == 0.0:
        return Witness(w, 0.0, 0.0)
    w = w / scale

    lifted = apply_adjoint(w, dims, levels)
    cdims = compressed_dims(dims, levels)
    ppt_max = -math.inf
    if ext.cuts:
        hb = hermitian_basis(n)
        pos = m + 1
        for cut in ext.cuts:
            u = np.einsum("a,aij->ij", y[pos:pos + n * n], hb) / scale
            pos += n * n
            lifted = lifted + partial_transpose(u, cdims, cut)
            ppt_max = max(ppt_max, float(np.linalg.eigvalsh(u)[-1]))
    lifted = 0.5 * (lifted + lifted.conj().T)
    return Witness(
        operator=w,
        value_on_state=float(np.trace(w @ rho.matrix).real),
        lifted_min_eig=float(np.linalg.eigvalsh(lifted)[0]),
        ppt_max_eig=ppt_max,
    )


def check_extendible(rho: DensityMatrix, spec: ExtensionSpec) -> Verdict:
    t0 = time.perf_counter()
    ext = build_extension_sdp(rho, spec)
    sol = sdp.solve(ext.problem, spec.solver)
    diag = {
        "sdp_status": sol.status,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "gap": sol.gap,
        "iterations": sol.iterations,
        "variable_side": ext.side,
    }
    if sol.status != sdp.OPTIMAL:
        diag["wall_time"] = time.perf_counter() - t0
        return Verdict(INCONCLUSIVE, math.nan, None, diag)
    lam = float(sol.x_scalar[0])
    diag["dual_objective"] = sol.dual_objective
    if lam <= spec.tol:
        status, wit = EXTENDIBLE, None
    elif lam <= 10 * spec.tol:
        status, wit = INCONCLUSIVE, None
    else:
        wit = extract_witness(sol, rho, ext)
        status = NOT_EXTENDIBLE if wit.valid else INCONCLUSIVE
        if not wit.valid:
            log.warning("witness failed validation: %s", wit)
    diag["wall_time"] = time.perf_counter() - t0
    return Verdict(status, lam, wit, diag)


# --- threshold scan -------------------------------------------------------------


class NonMonotoneError(RuntimeError):
    """Extendibility did not flip exactly once along the scanned parameter."""


def threshold_scan(
    family: str | Callable[[float], DensityMatrix],
    param_range: tuple[float, float],
    spec: ExtensionSpec,
    dims: Sequence[int] | None = None,
    width: float = 1e-3,
    grid: int = 5,
) -> float:
    """Bisect the family parameter at which the verdict flips to NOT extendible.

    The family must become more entangled as the parameter increases.
    Returns the upper end if every scanned state is extendible, the lower
    end if none is.
    """
    if callable(family):
        make = family
    else:
        params = {} if dims is None else {"d": dims[0]}
        key = "F" if family == "isotropic" else "p"
        make = lambda t: make_family(family, {**params, key: t})  # noqa: E731

    def extendible(t: float) -> bool:
        v = check_extendible(make(t), spec)
        if v.status == INCONCLUSIVE and math.isnan(v.lambda_star):
            raise RuntimeError(f"solver did not converge at parameter {t}")
        return v.lambda_star <= spec.tol

    lo, hi = param_range
    pts = np.linspace(lo, hi, grid)
    flags = [extendible(t) for t in pts]
    flips = [i for i in range(grid - 1) if flags[i] != flags[i + 1]]
    if not flips:
        return float(hi if flags[0] else lo)
    if len(flips) > 1 or not flags[0]:
        raise NonMonotoneError(f"verdict pattern along {family}: {flags}")
    lo, hi = pts[flips[0]], pts[flips[0] + 1]
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if extendible(mid):
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))
