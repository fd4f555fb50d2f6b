"""Closed-form distance bounds and resource estimates for the hierarchy.

Logarithms inside the LOCC/Frobenius bounds are base 2.  Every report
carries that choice, and any other caveat, in ``BoundReport.caveats``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .symmetric import sym_dim

TRACE = "trace"
TRACE_PPT = "trace_ppt"
LOCC = "locc"
FROBENIUS = "frobenius"
NORMS = (TRACE, TRACE_PPT, LOCC, FROBENIUS)

LOCC_PREFACTOR = 1.0 / (8.0 * math.log(2.0))
FROBENIUS_FACTOR = math.sqrt(153.0)

LOG_BASE_NOTE = "logarithms are base 2"
PPT_CONSTANT_NOTE = "leading constant unspecified: value is the bare sum of (|A_i|/k_i)^2"
PPT_CUTS_NOTE = (
    "only whole-factor PPT cuts are enforced by the solver; the half-split cuts "
    "S^(k/2):S^(k/2) in the bound's hypothesis are not"
)
SAME_INDEX_NOTE = "term i uses log|A_i| instead of log|A_{i+1}|"
FROBENIUS_NOTE = "Frobenius value is sqrt(153) times the LOCC value"


def normalize_norm(kind: str) -> str:
    kind = kind.replace("-", "_").lower()
    if kind not in NORMS:
        raise ValueError(f"unknown norm {kind!r}; expected one of {', '.join(NORMS)}")
    return kind


def _finite(x) -> bool:
    return x is not None and math.isfinite(x)


def two_particle_delta(kind: str, dim_a=None, dim_b=None, k: float = 1) -> float:
    """Distance from the k-extendible set (extension on A) to the separable set.

    ``trace`` and ``trace_ppt`` need ``dim_a``; ``locc`` and ``frobenius``
    need ``dim_b``.  Pass ``None`` or ``math.inf`` for an unbounded side.
    """
    kind = normalize_norm(kind)
    if not k > 0:
        raise ValueError(f"extension level must be positive, got {k}")
    if kind in (TRACE, TRACE_PPT):
        if not _finite(dim_a):
            raise ValueError(f"{kind} bound needs a finite |A|")
        return 4.0 * dim_a / k if kind == TRACE else (dim_a / k) ** 2
    if not _finite(dim_b):
        raise ValueError(f"{kind} bound needs a finite |B|")
    if dim_b < 1:
        raise ValueError(f"|B| must be >= 1, got {dim_b}")
    locc = LOCC_PREFACTOR * math.sqrt(math.log2(dim_b) / k)
    return locc if kind == LOCC else FROBENIUS_FACTOR * locc


@dataclass
class BoundReport:
    value: float
    terms: list[float]
    norm: str
    levels: tuple[int, ...] = ()
    dimension_count: int | None = None
    log2_runtime: float | None = None
    caveats: list[str] = field(default_factory=list)


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ValueError(f"need at least two positive local dimensions, got {dims}")
    return dims


def multiparty_bound_levels(dims: Sequence[int], levels: Sequence[int], kind: str = TRACE) -> BoundReport:
    """Sum over i < N of δ(|A_i|, ∞, k_i) for a bound depending only on |A|."""
    dims = _check_dims(dims)
    levels = tuple(int(k) for k in levels)
    if len(levels) != len(dims) or any(k < 1 for k in levels):
        raise ValueError(f"need one positive level per party, got {levels} for dims {dims}")
    kind = normalize_norm(kind)
    if kind not in (TRACE, TRACE_PPT):
        raise ValueError(f"{kind} bounds depend on |B|; use the product-schedule bound")
    terms = [two_particle_delta(kind, dims[i], None, levels[i]) for i in range(len(dims) - 1)]
    caveats = [PPT_CONSTANT_NOTE, PPT_CUTS_NOTE] if kind == TRACE_PPT else []
    space = search_space(dims, levels)
    return BoundReport(
        value=math.fsum(terms), terms=terms, norm=kind, levels=levels,
        dimension_count=space.variable_dim, log2_runtime=space.log2_runtime, caveats=caveats,
    )


def implied_levels(ells: Sequence[int]) -> tuple[int, ...]:
    """(ℓ_1⋯ℓ_{N-1}, ℓ_2⋯ℓ_{N-1}, ..., ℓ_{N-1}, 1)."""
    out = [1]
    for ell in reversed(ells):
        out.append(out[-1] * int(ell))
    return tuple(reversed(out))


def ells_from_levels(levels: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`implied_levels`; levels must be a product schedule."""
    levels = tuple(int(k) for k in levels)
    if levels[-1] != 1:
        raise ValueError(f"product schedules end with level 1, got {levels}")
    ells = []
    for a, b in zip(levels, levels[1:]):
        if a % b:
            raise ValueError(f"levels {levels} are not of the form ℓ_i ℓ_(i+1) ⋯ ℓ_(N-1)")
        ells.append(a // b)
    return tuple(ells)


def multiparty_bound_schedule(
    dims: Sequence[int], ells: Sequence[int], kind: str = LOCC, convention: str = "next"
) -> BoundReport:
    """Sum over i < N of δ(∞, |A_{i+1}|, ℓ_i) at levels k_i = ℓ_i ⋯ ℓ_{N-1}.

    ``convention="same"`` puts |A_i| under the logarithm of term i instead.
    """
    dims = _check_dims(dims)
    ells = tuple(int(e) for e in ells)
    if len(ells) != len(dims) - 1 or any(e < 1 for e in ells):
        raise ValueError(f"need N-1 = {len(dims) - 1} positive schedule entries, got {ells}")
    kind = normalize_norm(kind)
    if kind not in (LOCC, FROBENIUS):
        raise ValueError(f"{kind} bounds depend on |A|; use the per-factor bound")
    if convention not in ("next", "same"):
        raise ValueError(f"unknown index convention {convention!r}")
    shift = 1 if convention == "next" else 0
    terms = [two_particle_delta(kind, None, dims[i + shift], ells[i]) for i in range(len(ells))]
    caveats = [LOG_BASE_NOTE]
    if kind == FROBENIUS:
        caveats.append(FROBENIUS_NOTE)
    if convention == "same":
        caveats.append(SAME_INDEX_NOTE)
    levels = implied_levels(ells)
    space = search_space(dims, levels)
    return BoundReport(
        value=math.fsum(terms), terms=terms, norm=kind, levels=levels,
        dimension_count=space.variable_dim, log2_runtime=space.log2_runtime, caveats=caveats,
    )


def definetti_bound(dim_a: int, n: float, big_n: float, k: float, kind: str = LOCC) -> float:
    """Distance of permutation-invariant marginals from i.i.d. mixtures.

    LOCC uses (N-1) sqrt(log|A|) / k^(1/(2N)) + 2n²/N; other norms use
    (N-1) δ(∞, |A|, k^(1/N)) + 2n²/N.
    """
    if not (0 < n <= big_n <= k):
        raise ValueError(f"need 0 < n <= N <= k, got n={n}, N={big_n}, k={k}")
    kind = normalize_norm(kind)
    tail = 2.0 * n * n / big_n
    if kind == LOCC:
        head = (big_n - 1) * math.sqrt(math.log2(dim_a)) / k ** (1.0 / (2.0 * big_n))
    else:
        head = (big_n - 1) * two_particle_delta(kind, None, dim_a, k ** (1.0 / big_n))
    return head + tail


# --- resources ------------------------------------------------------------------


@dataclass
class SearchSpace:
    variable_dim: int
    real_variables: int
    log2_runtime: float
    dimension_bound_expr: int


def dimension_bound_expr(d: int, k: int, n_parties: int = 2) -> int:
    """d (k+1)^((d-1)(N-1)); for two parties this is d (k+1)^(d-1)."""
    return d * (k + 1) ** ((d - 1) * (n_parties - 1))


def search_space(dims: Sequence[int], levels: Sequence[int]) -> SearchSpace:
    """Size of the extension variable and a runtime estimate.

    ``log2_runtime`` models an interior-point solve as cubic in the number
    of real variables (the variable dimension squared).
    """
    dims = tuple(int(d) for d in dims)
    levels = tuple(int(k) for k in levels)
    if len(dims) != len(levels):
        raise ValueError(f"{len(levels)} levels for {len(dims)} parties")
    side = math.prod(sym_dim(d, k) for d, k in zip(dims, levels))
    real_vars = side * side
    d_max = max(dims)
    k_max = max(levels)
    return SearchSpace(
        variable_dim=side,
        real_variables=real_vars,
        log2_runtime=3.0 * math.log2(real_vars) if real_vars > 1 else 0.0,
        dimension_bound_expr=dimension_bound_expr(d_max, k_max, len(dims)),
    )


def trace_runtime_exponent(d: int, n_parties: int, eps: float) -> float:
    """d N log(dN/ε): the exponent of the trace-norm runtime, up to constants."""
    return d * n_parties * math.log(d * n_parties / eps)


def locc_runtime_exponent(dims: Sequence[int], eps: float) -> float:
    """ε^(-2(N-1)) N^(2N-1) ∏ log|A_i|: the LOCC/Frobenius runtime exponent, up to constants."""
    n = len(dims)
    return eps ** (-2 * (n - 1)) * n ** (2 * n - 1) * math.prod(math.log2(d) for d in dims)


def log2_variable_bound_schedule(dims: Sequence[int], ells: Sequence[int]) -> float:
    """log2 of |A_N| |A_{N-1}|^ℓ_{N-1} ⋯ |A_1|^(ℓ_1⋯ℓ_{N-1}), using |S^k(A)| ≤ |A|^k."""
    levels = implied_levels(ells)
    return sum(k * math.log2(d) for d, k in zip(dims, levels))


def levels_for_trace_error(d: int, n_parties: int, eps: float) -> int:
    """Smallest common level with 4 (N-1) d / k ≤ ε."""
    if not eps > 0:
        raise ValueError("error target must be positive")
    return math.ceil(4 * (n_parties - 1) * d / eps)


def ell_for_error(
    dims: Sequence[int],
    n_parties: int,
    eps: float,
    kind: str = LOCC,
    convention: str = "next",
    raw: bool = False,
) -> tuple:
    """Schedule ℓ_i = (N-1)² ε⁻² log|A_{i+1}| / (8 ln 2)², rounded up.

    The resulting product-schedule bound is at most ε.  With ``raw=True``
    the unrounded values are returned.
    """
    if not eps > 0:
        raise ValueError("error target must be positive")
    dims = tuple(int(d) for d in dims)
    if len(dims) == 1:
        dims = dims * n_parties
    if len(dims) != n_parties:
        raise ValueError(f"{len(dims)} dimensions given for N = {n_parties}")
    kind = normalize_norm(kind)
    if kind not in (LOCC, FROBENIUS):
        raise ValueError(f"no schedule formula for {kind}")
    factor = FROBENIUS_FACTOR**2 if kind == FROBENIUS else 1.0
    shift = 1 if convention == "next" else 0
    vals = [
        factor * LOCC_PREFACTOR**2 * (n_parties - 1) ** 2 * math.log2(dims[i + shift]) / eps**2
        for i in range(n_parties - 1)
    ]
    if raw:
        return tuple(vals)
    # guard against 1.0000000000000002-style round-up
    return tuple(max(1, math.ceil(v - 1e-12 * max(v, 1.0))) for v in vals)
