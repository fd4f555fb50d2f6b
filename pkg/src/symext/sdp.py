"""Small dense semidefinite programs in standard form.

    minimize    c^T x
    subject to  A x = b,   x in K

K is a product of real symmetric PSD blocks (stored as scaled
half-vectorizations, ``svec``) followed by one nonnegative orthant block.
The dual is ``max b^T y  s.t.  c - A^T y = s in K``.

The solver is a primal-dual interior-point method on the homogeneous
self-dual embedding, so a single run ends in an optimal pair or in a
certificate of primal or dual infeasibility.  Search directions use
Nesterov-Todd scaling with a Mehrotra predictor-corrector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .linalg import check_hermitian

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


# --- symmetric-matrix vectorization ------------------------------------------


def svec_len(n: int) -> int:
    return n * (n + 1) // 2


def _tri(n: int):
    iu, ju = np.triu_indices(n)
    scale = np.where(iu == ju, 1.0, SQRT2)
    return iu, ju, scale


def svec(m: np.ndarray) -> np.ndarray:
    """Scaled upper-triangle vectorization; preserves the trace inner product.

    Works on a stack of matrices along leading axes.
    """
    n = m.shape[-1]
    iu, ju, scale = _tri(n)
    return m[..., iu, ju] * scale


def smat(v: np.ndarray, n: int) -> np.ndarray:
    iu, ju, scale = _tri(n)
    out = np.zeros(v.shape[:-1] + (n, n))
    vals = v / scale
    out[..., iu, ju] = vals
    out[..., ju, iu] = vals
    return out


# --- Hermitian <-> real symmetric ----------------------------------------------


def hermitian_embed(h: np.ndarray) -> np.ndarray:
    """Real symmetric embedding [[Re H, -Im H], [Im H, Re H]].

    The embedding has the spectrum of ``h`` with every multiplicity doubled.
    """
    h = check_hermitian(np.asarray(h, dtype=complex))
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def hermitian_coeff(g: np.ndarray) -> np.ndarray:
    """Coefficient block ``C`` with ``<C, embed(X)> = tr(g X)`` for Hermitian g, X."""
    g = np.asarray(g, dtype=complex)
    re, im = g.real, g.imag
    return 0.5 * np.block([[re, -im], [im, re]])


def recover_hermitian(y: np.ndarray) -> np.ndarray:
    """Hermitian matrix whose embedding is the J-average of real symmetric ``y``.

    PSD ``y`` gives PSD output, and ``<hermitian_coeff(g), y> = tr(g X)``.
    """
    n = y.shape[0] // 2
    y11, y12, y21, y22 = y[:n, :n], y[:n, n:], y[n:, :n], y[n:, n:]
    return 0.5 * (y11 + y22) + 0.5j * (y21 - y12)


# --- problem / solution ---------------------------------------------------------


@dataclass
class SdpProblem:
    """Standard-form SDP over PSD blocks plus a nonnegative scalar block."""

    blocks: list[int]
    n_scalar: int
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.blocks = [int(n) for n in self.blocks]
        if any(n < 1 for n in self.blocks):
            raise ValueError(f"PSD block sizes must be >= 1, got {self.blocks}")
        if self.n_scalar < 0:
            raise ValueError("scalar block length must be nonnegative")
        self.c = np.asarray(self.c, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.A = np.asarray(self.A, dtype=float).reshape(len(self.b), -1)
        if self.A.shape[1] != self.n_vars or self.c.shape != (self.n_vars,):
            raise ValueError(
                f"A has {self.A.shape[1]} columns and c has {self.c.size} entries, "
                f"but the cone has {self.n_vars} coordinates"
            )

    @property
    def n_vars(self) -> int:
        return sum(svec_len(n) for n in self.blocks) + self.n_scalar

    @property
    def n_eq(self) -> int:
        return len(self.b)

    def slices(self) -> list[slice]:
        out, pos = [], 0
        for n in self.blocks:
            out.append(slice(pos, pos + svec_len(n)))
            pos += svec_len(n)
        out.append(slice(pos, pos + self.n_scalar))
        return out

    def unpack(self, v: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        sl = self.slices()
        mats = [smat(v[s], n) for s, n in zip(sl, self.blocks)]
        return mats, v[sl[-1]].copy()

    def pack(self, mats, scalars=()) -> np.ndarray:
        parts = [svec(np.asarray(m, dtype=float)) for m in mats]
        parts.append(np.asarray(scalars, dtype=float).reshape(-1))
        return np.concatenate(parts) if parts else np.zeros(0)


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 100
    ray_tol: float = 1e-7
    cert_tol: float = 1e-8
    step_fraction: float = 0.98
    rank_tol: float = 1e-9


@dataclass
class SdpSolution:
    status: str
    x_blocks: list[np.ndarray]
    x_scalar: np.ndarray
    y: np.ndarray
    s_blocks: list[np.ndarray]
    s_scalar: np.ndarray
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int
    primal_objective: float = math.nan
    dual_objective: float = math.nan
    info: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.primal_residual, self.dual_residual, self.gap)


OPTIMAL = "optimal"
PRIMAL_INFEASIBLE = "primal_infeasible"
DUAL_INFEASIBLE = "dual_infeasible"
MAX_ITER = "max_iter"


# --- presolve -------------------------------------------------------------------


def _independent_rows(A: np.ndarray, b: np.ndarray, rank_tol: float) -> tuple[np.ndarray, float]:
    """Indices of a maximal independent row set, and the inconsistency of the rest.

    The second value is the largest |b_dep - C b_keep| over dependent rows
    written as combinations ``C`` of the kept ones.
    """
    if A.shape[0] == 0:
        return np.zeros(0, dtype=int), 0.0
    r, piv = sla.qr(A.T, mode="r", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros(0, dtype=int), float(np.max(np.abs(b), initial=0.0))
    rank = int(np.sum(diag > rank_tol * diag[0]))
    keep, dep = piv[:rank], piv[rank:]
    if dep.size == 0:
        return np.sort(keep), 0.0
    comb = sla.solve_triangular(r[:rank, :rank], r[:rank, rank:])
    mismatch = float(np.max(np.abs(b[dep] - comb.T @ b[keep])))
    return np.sort(keep), mismatch


def max_eig_blocks(p: SdpProblem, v: np.ndarray) -> float:
    """Largest 'eigenvalue' of a cone vector: max over block eigenvalues and scalars."""
    mats, sc = p.unpack(v)
    vals = [np.linalg.eigvalsh(m)[-1] for m in mats]
    if sc.size:
        vals.append(sc.max())
    return float(max(vals)) if vals else -math.inf


def verify_primal_certificate(p: SdpProblem, y: np.ndarray, tol: float = 1e-8) -> bool:
    """Check A^T y ⪯ 0 blockwise (to ``tol``) and b^T y > 0, after scaling b^T y = 1."""
    by = float(p.b @ y)
    if not by > 0:
        return False
    return max_eig_blocks(p, p.A.T @ (y / by)) <= tol


def verify_dual_certificate(p: SdpProblem, x: np.ndarray, tol: float = 1e-8) -> bool:
    """Check x ⪰ 0, A x = 0 and c^T x < 0, after scaling c^T x = -1."""
    cx = float(p.c @ x)
    if not cx < 0:
        return False
    x = x / -cx
    return (
        -max_eig_blocks(p, -x) >= -tol
        and np.linalg.norm(p.A @ x) <= tol * (1 + np.linalg.norm(p.A))
    )


# --- cone helpers ---------------------------------------------------------------


class _Cone:
    def __init__(self, p: SdpProblem):
        self.blocks = p.blocks
        self.sl = p.slices()
        self.n_scalar = p.n_scalar
        self.nu = sum(self.blocks) + self.n_scalar

    def identity(self) -> np.ndarray:
        parts = [svec(np.eye(n)) for n in self.blocks] + [np.ones(self.n_scalar)]
        return np.concatenate(parts)

    def mats(self, v):
        return [smat(v[s], n) for s, n in zip(self.sl, self.blocks)]


def _factor(m: np.ndarray) -> np.ndarray:
    """Some F with F F^T = m; Cholesky, or an eigen-square-root when that fails."""
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(m)
        if w[-1] <= 0:
            raise
        return v * np.sqrt(np.clip(w, w[-1] * 1e-30, None))


class _Scaling:
    """Nesterov-Todd scaling point for each block at the current iterate."""

    def __init__(self, cone: _Cone, x: np.ndarray, s: np.ndarray):
        self.cone = cone
        self.g, self.ginv, self.lam, self.w = [], [], [], []
        for sl, n in zip(cone.sl, cone.blocks):
            X, S = smat(x[sl], n), smat(s[sl], n)
            lx, ls = _factor(X), _factor(S)
            u, sig, vt = np.linalg.svd(ls.T @ lx)
            g = lx @ vt.T / np.sqrt(sig)
            self.g.append(g)
            self.ginv.append(np.linalg.inv(g))
            self.lam.append(sig)
            self.w.append(g @ g.T)
        ssl = cone.sl[-1]
        xs, ss = x[ssl], s[ssl]
        self.lam_s = np.sqrt(xs * ss)
        self.w_s = np.sqrt(xs / ss)

    def apply_w(self, v: np.ndarray) -> np.ndarray:
        """v -> W v W blockwise (w^2 v on scalars); v may be a stack of rows."""
        out = np.empty_like(v)
        for sl, n, w in zip(self.cone.sl, self.cone.blocks, self.w):
            m = smat(v[..., sl], n)
            out[..., sl] = svec(w @ m @ w)
        ssl = self.cone.sl[-1]
        out[..., ssl] = v[..., ssl] * self.w_s**2
        return out

    def scaled(self, dx: np.ndarray, ds: np.ndarray):
        """Scaled-frame directions G^-1 dX G^-T and G^T dS G."""
        tx, ts = [], []
        for sl, n, g, gi in zip(self.cone.sl, self.cone.blocks, self.g, self.ginv):
            tx.append(gi @ smat(dx[sl], n) @ gi.T)
            ts.append(g.T @ smat(ds[sl], n) @ g)
        ssl = self.cone.sl[-1]
        tx.append(dx[ssl] / self.w_s)
        ts.append(ds[ssl] * self.w_s)
        return tx, ts

    def comp_rhs(self, target: float, corr=None) -> np.ndarray:
        """Right-hand side r with dx + W ds W = r from λ∘(x̃+s̃) = target·e − λ² − corr."""
        parts = []
        for i, (g, lam) in enumerate(zip(self.g, self.lam)):
            r = -np.diag(lam**2)
            r[np.diag_indices_from(r)] += target
            if corr is not None:
                r = r - corr[i]
            z = 2.0 * r / (lam[:, None] + lam[None, :])
            parts.append(svec(g @ z @ g.T))
        r = target - self.lam_s**2
        if corr is not None:
            r = r - corr[-1]
        parts.append(self.w_s * r / self.lam_s)
        return np.concatenate(parts)


def _max_step(cone: _Cone, v: np.ndarray, dv: np.ndarray) -> float:
    alpha = math.inf
    for sl, n in zip(cone.sl, cone.blocks):
        li = np.linalg.inv(_factor(smat(v[sl], n)))
        ev = np.linalg.eigvalsh(li @ smat(dv[sl], n) @ li.T)[0]
        if ev < 0:
            alpha = min(alpha, -1.0 / ev)
    ssl = cone.sl[-1]
    neg = dv[ssl] < 0
    if np.any(neg):
        alpha = min(alpha, float(np.min(-v[ssl][neg] / dv[ssl][neg])))
    return alpha


def _jordan(tx, ts):
    out = [0.5 * (a @ b + b @ a) for a, b in zip(tx[:-1], ts[:-1])]
    out.append(tx[-1] * ts[-1])
    return out


# --- main solver ----------------------------------------------------------------


def solve(p: SdpProblem, opts: SolverOptions | None = None) -> SdpSolution:
    """Solve ``p``; the returned status is one of optimal, primal_infeasible,
    dual_infeasible or max_iter (never an exception for non-convergence)."""
    opts = opts or SolverOptions()
    m_full = p.n_eq
    keep, mismatch = _independent_rows(p.A, p.b, opts.rank_tol)
    A, b, c = p.A[keep], p.b[keep], p.c

    # rows dropped as dependent must still be consistent with the kept ones
    if mismatch > 1e3 * opts.rank_tol * (1 + np.linalg.norm(p.b)):
        x0 = np.linalg.lstsq(A, b, rcond=None)[0] if len(keep) else np.zeros(p.n_vars)
        r = p.b - p.A @ x0
        y = r - np.linalg.lstsq(p.A.T, p.A.T @ r, rcond=None)[0]
        if verify_primal_certificate(p, y, opts.cert_tol):
            return _infeasible_result(p, PRIMAL_INFEASIBLE, y=y / (p.b @ y), iters=0)

    cone = _Cone(p)
    e = cone.identity()
    x, s = e.copy(), e.copy()
    y = np.zeros(len(b))
    tau = kappa = 1.0
    nb, nc = 1 + np.linalg.norm(b), 1 + np.linalg.norm(c)
    status, it = MAX_ITER, 0
    res = (math.inf, math.inf, math.inf)

    for it in range(opts.max_iter + 1):
        # residuals of the homogeneous system
        rp = b * tau - A @ x
        rd = c * tau - A.T @ y - s
        rg = kappa + c @ x - b @ y
        mu = (x @ s + tau * kappa) / (cone.nu + 1)

        pobj, dobj = c @ x / tau, b @ y / tau
        pres = np.linalg.norm(rp) / tau / nb
        dres = np.linalg.norm(rd) / tau / nc
        gap = max(abs(pobj - dobj), x @ s / tau**2) / (1 + abs(pobj) + abs(dobj))
        res = (pres, dres, gap)
        if max(res) <= opts.tol:
            status = OPTIMAL
            break

        by, cx = b @ y, c @ x
        if by > 0 and np.linalg.norm(A.T @ y + s) / by <= opts.ray_tol:
            yf = _expand(y, keep, m_full)
            if verify_primal_certificate(p, yf, opts.cert_tol):
                status = PRIMAL_INFEASIBLE
                break
        if cx < 0 and np.linalg.norm(A @ x) / -cx <= opts.ray_tol:
            if verify_dual_certificate(p, x, opts.cert_tol):
                status = DUAL_INFEASIBLE
                break
        if it == opts.max_iter:
            break

        try:
            sc = _Scaling(cone, x, s)
            kkt = _Kkt(A, b, c, sc, tau, kappa)
        except np.linalg.LinAlgError:
            log.debug("scaling breakdown at iteration %d", it)
            break

        # predictor
        d_aff = kkt.solve(rp, rd, rg, sc.comp_rhs(0.0), -tau * kappa, eta=1.0)
        a_aff = _step(cone, x, s, tau, kappa, d_aff, 1.0)
        dx, dy, ds, dt, dk = d_aff
        mu_aff = (
            (x + a_aff * dx) @ (s + a_aff * ds) + (tau + a_aff * dt) * (kappa + a_aff * dk)
        ) / (cone.nu + 1)
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        # corrector
        tx, ts = sc.scaled(dx, ds)
        corr = _jordan(tx, ts)
        d = kkt.solve(
            rp, rd, rg,
            sc.comp_rhs(sigma * mu, corr),
            sigma * mu - tau * kappa - dt * dk,
            eta=1.0 - sigma,
        )
        alpha = _step(cone, x, s, tau, kappa, d, opts.step_fraction)
        dx, dy, ds, dt, dk = d
        x, y, s = x + alpha * dx, y + alpha * dy, s + alpha * ds
        tau, kappa = tau + alpha * dt, kappa + alpha * dk
        log.debug("it %d mu %.2e res %s alpha %.3f sigma %.3f", it, mu, res, alpha, sigma)

    yf = _expand(y, keep, m_full)
    if status == PRIMAL_INFEASIBLE:
        return _infeasible_result(p, status, y=yf / (p.b @ yf), s=s / (p.b @ yf), iters=it)
    if status == DUAL_INFEASIBLE:
        return _infeasible_result(p, status, x=x / -(p.c @ x), iters=it)
    xs, ys, ss = x / tau, yf / tau, s / tau
    xm, xsc = p.unpack(xs)
    sm, ssc = p.unpack(ss)
    return SdpSolution(
        status=status,
        x_blocks=xm, x_scalar=xsc, y=ys, s_blocks=sm, s_scalar=ssc,
        primal_residual=res[0], dual_residual=res[1], gap=res[2],
        iterations=it,
        primal_objective=float(c @ xs), dual_objective=float(b @ ys[keep]),
        info={"tau": tau, "kappa": kappa, "rows_kept": len(keep)},
    )


def _expand(y, keep, m):
    out = np.zeros(m)
    out[keep] = y
    return out


def _infeasible_result(p, status, x=None, y=None, s=None, iters=0):
    zero = np.zeros(p.n_vars)
    x = zero if x is None else x
    y = np.zeros(p.n_eq) if y is None else y
    s = -(p.A.T @ y) if s is None else s
    xm, xsc = p.unpack(x)
    sm, ssc = p.unpack(s)
    return SdpSolution(
        status=status, x_blocks=xm, x_scalar=xsc, y=y, s_blocks=sm, s_scalar=ssc,
        primal_residual=math.inf, dual_residual=math.inf, gap=math.inf, iterations=iters,
    )


def _step(cone, x, s, tau, kappa, d, frac):
    dx, _, ds, dt, dk = d
    a = min(_max_step(cone, x, dx), _max_step(cone, s, ds))
    if dt < 0:
        a = min(a, -tau / dt)
    if dk < 0:
        a = min(a, -kappa / dk)
    return min(1.0, frac * a)


class _Kkt:
    """Reduced Newton system of the embedding, factored once per iteration."""

    def __init__(self, A, b, c, sc: _Scaling, tau, kappa):
        self.A, self.b, self.c, self.sc = A, b, c, sc
        self.tau, self.kappa = tau, kappa
        wa = sc.apply_w(A)
        m = A @ wa.T
        m = 0.5 * (m + m.T)
        self.chol = self.lu = None
        if len(b):
            try:
                self.chol = sla.cho_factor(m, lower=True)
            except np.linalg.LinAlgError:
                # loses definiteness to roundoff near degenerate optima
                self.lu = sla.lu_factor(m)
        self.wc = sc.apply_w(c)
        self.q = self._msolve(A @ self.wc + b)
        self.dx1 = sc.apply_w(A.T @ self.q - c)
        self.denom = b @ self.q - c @ self.dx1 + kappa / tau

    def _msolve(self, r):
        if self.chol is not None:
            return sla.cho_solve(self.chol, r)
        if self.lu is not None:
            return sla.lu_solve(self.lu, r)
        return np.zeros(0)

    def solve(self, rp, rd, rg, r4, r5, eta):
        """Direction for target residual reduction ``eta``; see module docstring."""
        A, b, c, sc = self.A, self.b, self.c, self.sc
        r1, r2, r3 = eta * rp, -eta * rd, eta * rg
        wr2 = sc.apply_w(r2)
        pvec = self._msolve(r1 - A @ wr2 - A @ r4)
        dx0 = sc.apply_w(r2 + A.T @ pvec) + r4
        dtau = (r3 - b @ pvec + c @ dx0 + r5 / self.tau) / self.denom
        dy = pvec + self.q * dtau
        dx = dx0 + self.dx1 * dtau
        ds = -A.T @ dy + c * dtau - r2
        dkappa = (r5 - self.kappa * dtau) / self.tau
        return dx, dy, ds, dtau, dkappa
