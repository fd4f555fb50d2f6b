"""Density matrices: validation, standard families, random sampling and files.

Werner convention
-----------------
For two qubits ``werner(p) = p |Ψ-><Ψ-| + (1 - p) I/4``, entangled iff
p > 1/3.  For local dimension d > 2 the projector form is used,
``werner(p, d) = p P_anti / dim(anti) + (1 - p) P_sym / dim(sym)``, which is
entangled iff p > 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .linalg import kron_all, partial_transpose, permute_systems

STATE_TOL = 1e-9

FAMILIES = ("bell", "ghz", "w", "isotropic", "werner", "tiles", "product", "max_mixed")


class InvariantError(ValueError):
    """A matrix violates a density-matrix invariant."""

    def __init__(self, invariant: str, amount: float, detail: str = ""):
        self.invariant = invariant
        self.amount = amount
        msg = f"{invariant} invariant violated by {amount:.3e}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class StateFormatError(ValueError):
    """Malformed state or witness file."""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        validate(m, dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_parties(self) -> int:
        return len(self.dims)


def validate(m: np.ndarray, dims: Sequence[int], tol: float = STATE_TOL) -> None:
    """Raise InvariantError naming the first violated invariant."""
    side = int(np.prod(dims)) if len(dims) else 0
    if len(dims) == 0 or any(d < 1 for d in dims):
        raise InvariantError("dims", float(len(dims)), f"invalid subsystem dimensions {tuple(dims)}")
    if m.shape != (side, side):
        raise InvariantError(
            "dimension", abs(m.shape[0] - side),
            f"matrix shape {m.shape} does not match dims {tuple(dims)} (side {side})",
        )
    scale = max(float(np.max(np.abs(m))), 1e-300)
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > tol * scale:
        raise InvariantError("hermitian", herm, "matrix differs from its conjugate transpose")
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > tol:
        raise InvariantError("trace", abs(tr - 1.0), f"trace is {tr!r}, expected 1")
    lo = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if lo < -tol:
        raise InvariantError("psd", -lo, f"minimum eigenvalue is {lo!r}")


def repair(m: np.ndarray) -> np.ndarray:
    """Nearest-ish valid state: Hermitian part, negative eigenvalues clipped, unit trace."""
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise InvariantError("psd", float(-np.min(np.linalg.eigvalsh(h))), "nothing left after clipping")
    out = (v * w) @ v.conj().T
    return out / np.trace(out).real


# --- families -------------------------------------------------------------------


def _ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def max_entangled(d: int) -> np.ndarray:
    return sum(np.kron(_ket(d, i), _ket(d, i)) for i in range(d)) / math.sqrt(d)


def isotropic(fidelity: float, d: int = 2) -> DensityMatrix:
    """F |Φ><Φ| + (1 - F)(I - |Φ><Φ|)/(d² - 1); fidelity with |Φ> equals F."""
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {fidelity}")
    phi = _proj(max_entangled(d))
    rest = (np.eye(d * d) - phi) / (d * d - 1)
    return DensityMatrix((d, d), fidelity * phi + (1 - fidelity) * rest)


def werner(p: float, d: int = 2) -> DensityMatrix:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {p}")
    if d == 2:
        psi = (np.kron(_ket(2, 0), _ket(2, 1)) - np.kron(_ket(2, 1), _ket(2, 0))) / math.sqrt(2)
        return DensityMatrix((2, 2), p * _proj(psi) + (1 - p) * np.eye(4) / 4)
    n = d * d
    swap = np.eye(n).reshape(d, d, n).transpose(1, 0, 2).reshape(n, n)
    p_sym = 0.5 * (np.eye(d * d) + swap)
    p_anti = 0.5 * (np.eye(d * d) - swap)
    m = p * p_anti / (d * (d - 1) / 2) + (1 - p) * p_sym / (d * (d + 1) / 2)
    return DensityMatrix((d, d), m)


def tiles() -> DensityMatrix:
    """Bound-entangled 3x3 state from the 'tiles' unextendible product basis."""
    k = [_ket(3, i) for i in range(3)]
    s2 = math.sqrt(2)
    vecs = [
        np.kron(k[0], (k[0] - k[1]) / s2),
        np.kron((k[0] - k[1]) / s2, k[2]),
        np.kron(k[2], (k[1] - k[2]) / s2),
        np.kron((k[1] - k[2]) / s2, k[0]),
        np.kron(sum(k) / math.sqrt(3), sum(k) / math.sqrt(3)),
    ]
    m = np.eye(9) - sum(_proj(v) for v in vecs)
    return DensityMatrix((3, 3), m / 4)


def ghz(n: int = 3, d: int = 2) -> DensityMatrix:
    v = sum(kron_all(_ket(d, i)[:, None] for _ in range(n))[:, 0] for i in range(d)) / math.sqrt(d)
    return DensityMatrix((d,) * n, _proj(v))


def w_state(n: int = 3) -> DensityMatrix:
    v = np.zeros(2**n, dtype=complex)
    for i in range(n):
        v[1 << (n - 1 - i)] = 1.0
    return DensityMatrix((2,) * n, _proj(v / math.sqrt(n)))


def make_family(name: str, params: dict | None = None) -> DensityMatrix:
    """Build a named test state.

    Recognised parameters: ``d`` (local dimension), ``n`` (parties),
    ``dims`` (explicit dimensions), ``F``/``p`` (mixing parameter).
    """
    params = dict(params or {})
    d = int(params.get("d", 2))
    n = int(params.get("n", 2))
    dims = tuple(params["dims"]) if "dims" in params else None
    if name == "bell":
        return isotropic(1.0, d)
    if name == "ghz":
        return ghz(int(params.get("n", 3)), d)
    if name == "w":
        return w_state(int(params.get("n", 3)))
    if name == "isotropic":
        return isotropic(float(params.get("F", params.get("p", 1.0))), d)
    if name == "werner":
        return werner(float(params.get("p", params.get("F", 1.0))), d)
    if name == "tiles":
        return tiles()
    if name == "product":
        dims = dims or (d,) * n
        m = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
        m[0, 0] = 1.0
        return DensityMatrix(dims, m)
    if name == "max_mixed":
        dims = dims or ((d,) if "n" not in params else (d,) * n)
        side = int(np.prod(dims))
        return DensityMatrix(dims, np.eye(side) / side)
    raise ValueError(f"unknown state family {name!r}; known: {', '.join(FAMILIES)}")


# --- separable states -------------------------------------------------------------


@dataclass(frozen=True)
class SeparableDecomposition:
    weights: np.ndarray
    # terms[i][j] is the unit vector of party j in term i
    terms: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.terms) or len(w) == 0:
            raise ValueError("need one weight per term and at least one term")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must be a probability vector, sum is {w.sum()!r}")
        for term in self.terms:
            for v in term:
                if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                    raise ValueError("local vectors must have unit norm")
        object.__setattr__(self, "weights", w)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.terms[0])


def assemble_separable(decomp: SeparableDecomposition) -> DensityMatrix:
    side = int(np.prod(decomp.dims))
    m = np.zeros((side, side), dtype=complex)
    for w, term in zip(decomp.weights, decomp.terms):
        v = term[0]
        for u in term[1:]:
            v = np.kron(v, u)
        m += w * _proj(v)
    return DensityMatrix(decomp.dims, m)


def _random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_separable(dims, terms: int, seed) -> tuple[DensityMatrix, SeparableDecomposition]:
    if terms < 1:
        raise ValueError("need at least one term")
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(terms))
    w = w / w.sum()
    vecs = tuple(tuple(_random_unit(rng, d) for d in dims) for _ in range(terms))
    decomp = SeparableDecomposition(w, vecs)
    return assemble_separable(decomp), decomp


def random_density(dims, seed) -> DensityMatrix:
    """Hilbert-Schmidt random state G G† / tr(G G†)."""
    rng = np.random.default_rng(seed)
    side = int(np.prod(dims))
    g = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
    m = g @ g.conj().T
    return DensityMatrix(tuple(dims), m / np.trace(m).real)


def random_pure_product(dims, rng: np.random.Generator) -> np.ndarray:
    v = np.ones(1, dtype=complex)
    for d in dims:
        v = np.kron(v, _random_unit(rng, d))
    return v


def is_permutation_invariant(rho: DensityMatrix, tol: float = 1e-10) -> bool:
    """True iff ρ is invariant under conjugation by every adjacent transposition."""
    dims = rho.dims
    if len(set(dims)) != 1:
        raise ValueError(f"permutation invariance needs equal local dimensions, got {dims}")
    n = len(dims)
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = i + 1, i
        dev = np.max(np.abs(permute_systems(rho.matrix, dims, perm) - rho.matrix))
        if dev > tol:
            return False
    return True


def ppt_min_eigs(rho: DensityMatrix) -> dict[tuple[int, ...], float]:
    """Minimum partial-transpose eigenvalue for every bipartition (side containing party 0 kept)."""
    n = rho.n_parties
    out = {}
    for mask in range(1, 2 ** (n - 1)):
        side = tuple(i for i in range(1, n) if mask >> (i - 1) & 1)
        pt = partial_transpose(rho.matrix, rho.dims, side)
        out[side] = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    return out


# --- file format ------------------------------------------------------------------

STATE_MAGIC = "QSTATE 1"
WITNESS_MAGIC = "QWIT 1"


def _format_matrix(dims, m: np.ndarray, magic: str, comment: str = "") -> str:
    lines = [magic]
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append("dims: " + " ".join(str(d) for d in dims))
    for row in m:
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse(text: str, magic: str) -> tuple[tuple[int, ...], np.ndarray]:
    raw = text.split("\n")
    content = [(i + 1, _strip(l)) for i, l in enumerate(raw)]
    content = [(n, l) for n, l in content if l]
    if not content:
        raise StateFormatError(f"empty file, expected {magic!r}", 1)
    n0, first = content[0]
    if first != magic:
        raise StateFormatError(f"expected header {magic!r}, found {first!r}", n0)
    if len(content) < 2 or not content[1][1].startswith("dims:"):
        ln = content[1][0] if len(content) > 1 else n0 + 1
        raise StateFormatError("expected 'dims: d1 d2 ...'", ln)
    ln, dline = content[1]
    dims = []
    for tok in dline[5:].split():
        try:
            d = int(tok)
        except ValueError:
            raise StateFormatError(f"bad dimension {tok!r}", ln, raw[ln - 1].find(tok) + 1) from None
        if d < 1:
            raise StateFormatError(f"dimension must be positive, got {d}", ln, raw[ln - 1].find(tok) + 1)
        dims.append(d)
    if not dims:
        raise StateFormatError("no dimensions given", ln)
    side = int(np.prod(dims))
    rows = content[2:]
    if len(rows) != side:
        raise StateFormatError(
            f"dimension mismatch: dims {tuple(dims)} need {side} rows, found {len(rows)}",
            rows[-1][0] if rows else ln,
        )
    m = np.empty((side, side), dtype=complex)
    for r, (ln, line) in enumerate(rows):
        toks = line.split()
        if len(toks) != 2 * side:
            raise StateFormatError(
                f"dimension mismatch: expected {2 * side} numbers, found {len(toks)}", ln
            )
        vals = []
        col = 0
        src = raw[ln - 1]
        for tok in toks:
            col = src.find(tok, col)
            try:
                vals.append(float(tok))
            except ValueError:
                raise StateFormatError(f"bad number {tok!r}", ln, col + 1) from None
            col += len(tok)
        vals = np.asarray(vals)
        m[r] = vals[0::2] + 1j * vals[1::2]
    return tuple(dims), m


def save_state(rho: DensityMatrix, path, comment: str = "") -> None:
    Path(path).write_text(_format_matrix(rho.dims, rho.matrix, STATE_MAGIC, comment), encoding="utf-8")


def load_state(path, repair_invalid: bool = False) -> DensityMatrix:
    dims, m = _parse(Path(path).read_text(encoding="utf-8"), STATE_MAGIC)
    if repair_invalid:
        m = repair(m)
    return DensityMatrix(dims, m)


def save_witness(dims, w: np.ndarray, path, comment: str = "") -> None:
    Path(path).write_text(_format_matrix(dims, np.asarray(w), WITNESS_MAGIC, comment), encoding="utf-8")


def load_witness(path) -> tuple[tuple[int, ...], np.ndarray]:
    dims, m = _parse(Path(path).read_text(encoding="utf-8"), WITNESS_MAGIC)
    scale = max(float(np.max(np.abs(m))), 1e-300)
    if np.max(np.abs(m - m.conj().T)) > STATE_TOL * scale:
        raise InvariantError("hermitian", float(np.max(np.abs(m - m.conj().T))), "witness must be Hermitian")
    return dims, m
