"""Density operators on H_A (x) H_B and entanglement diagnostics.

Partial transposes act on the B factor in the flat layout a * n_B + b.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import subspaces as sub
from .errors import DimensionMismatch, RankMismatch, ZeroVector
from .sections import ProductSpace, SectionVector, product_coherent_unit
from .subspaces import Subspace

DEFAULT_RESTARTS = 32
DEFAULT_MAX_ITERS = 500
DEFAULT_RESIDUAL_TOL = 1e-6
MAX_BASIS_CONDITION = 1e6


@dataclass(frozen=True, eq=False)
class StateOperator:
    """Hermitian PSD operator with unit trace, or the zero operator."""

    product: ProductSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.product.dim
        if m.shape != (n, n):
            raise DimensionMismatch(f"state matrix {m.shape} on a space of dimension {n}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    @property
    def rank(self) -> int:
        if self.is_zero:
            return 0
        ev = np.linalg.eigvalsh(self.matrix)
        return int(np.sum(ev > 1e-9 * ev[-1]))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def rho_from_subspace(s: Subspace, product: ProductSpace) -> StateOperator:
    """Trace-normalized projector onto ``s``; the zero operator when ``s = 0``."""
    if s.ambient_dim != product.dim:
        raise DimensionMismatch(f"subspace in C^{s.ambient_dim}, product has dimension {product.dim}")
    if s.rank == 0:
        return StateOperator(product, np.zeros((product.dim, product.dim), dtype=complex))
    return StateOperator(product, s.projector / s.rank)


def pure_state(v, product: ProductSpace) -> StateOperator:
    c = v.coeffs if isinstance(v, SectionVector) else np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(c)
    if nrm == 0:
        raise ZeroVector("pure state of the zero vector")
    c = c / nrm
    return StateOperator(product, np.outer(c, c.conj()))


def partial_transpose(matrix: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    n_a, n_b = dims
    t = np.asarray(matrix).reshape(n_a, n_b, n_a, n_b)
    return t.transpose(0, 3, 2, 1).reshape(n_a * n_b, n_a * n_b)


def partial_transpose_min_eig(rho: StateOperator) -> float:
    """Smallest eigenvalue of the B-partial transpose; 0.0 for the zero operator."""
    if rho.is_zero:
        return 0.0
    pt = partial_transpose(rho.matrix, rho.product.dims)
    pt = (pt + pt.conj().T) / 2
    return float(np.linalg.eigvalsh(pt)[0])


def schmidt_values(v, product: ProductSpace) -> np.ndarray:
    c = v.coeffs if isinstance(v, SectionVector) else np.asarray(v, dtype=complex)
    if c.shape != (product.dim,):
        raise DimensionMismatch(f"vector of length {c.size} on a product of dimension {product.dim}")
    if np.linalg.norm(c) == 0:
        raise ZeroVector("Schmidt values of the zero vector")
    return np.linalg.svd(c.reshape(product.dims), compute_uv=False)


def schmidt_rank(v, product: ProductSpace, tol: float = 1e-10) -> int:
    s = schmidt_values(v, product)
    return int(np.sum(s > tol * s[0]))


@dataclass
class Extraction:
    """Outcome of :func:`extract_product_basis`.

    ``vectors`` holds the accepted product vectors u (x) w (flat, unit norm),
    ``factors`` the pairs (u, w). ``best_residual`` is the smallest residual
    reached in the round that stopped the search (the failing round when
    ``success`` is false).
    """

    success: bool
    vectors: list[np.ndarray]
    factors: list[tuple[np.ndarray, np.ndarray]]
    residuals: list[float]
    best_residual: float
    condition_number: float
    weights: list[float]
    reconstruction_error: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def to_json(self) -> dict:
        return {
            "success": bool(self.success),
            "accepted": len(self.vectors),
            "max_residual": float(self.max_residual),
            "best_residual": float(self.best_residual),
            "condition_number": float(self.condition_number),
            "weights": [float(w) for w in self.weights],
            "reconstruction_error": float(self.reconstruction_error),
        }


def _top_vector(m: np.ndarray) -> np.ndarray:
    u, _, _ = np.linalg.svd(m, full_matrices=False)
    return u[:, 0]


def _best_product(tensors: np.ndarray, rng: np.random.Generator, restarts: int,
                  max_iters: int, residual_tol: float):
    """Alternating maximization of ||P(u (x) w)||^2 over unit u, w.

    ``tensors[j]`` is the j-th frame vector reshaped to n_A x n_B, so the
    overlap is sum_j |u^H C_j conj(w)|^2. Returns the best (u, w, residual);
    the first restart that reaches ``residual_tol`` ends the search.
    """
    _, n_a, n_b = tensors.shape
    stop_gap = (residual_tol * 1e-2) ** 2
    best = None
    for _ in range(restarts):
        w = rng.standard_normal(n_b) + 1j * rng.standard_normal(n_b)
        w /= np.linalg.norm(w)
        prev = -1.0
        for _ in range(max_iters):
            u = _top_vector(np.einsum("jab,b->aj", tensors, w.conj()))
            h = np.einsum("jab,a->bj", tensors, u.conj())
            w = _top_vector(h)
            overlap = float(np.linalg.norm(h.conj().T @ w) ** 2)
            if 1.0 - overlap < stop_gap or overlap - prev < 1e-15:
                break
            prev = overlap
        resid = float(np.sqrt(max(0.0, 1.0 - overlap)))
        if best is None or resid < best[2]:
            best = (u, w, resid)
        if resid < residual_tol:
            break
    return best


def extract_product_basis(s: Subspace, product: ProductSpace, rng: np.random.Generator,
                          restarts: int = DEFAULT_RESTARTS, max_iters: int = DEFAULT_MAX_ITERS,
                          residual_tol: float = DEFAULT_RESIDUAL_TOL) -> Extraction:
    """Greedy search for a basis of ``s`` made of product vectors.

    Each round finds a unit u (x) w closest to ``s``, accepts it when its
    distance to ``s`` is below ``residual_tol`` and removes the direction of
    its projection from ``s``. The accepted vectors are therefore nearly
    orthonormal, and on success the normalized projector onto ``s`` is
    approximately the uniform mixture of them.
    """
    if s.ambient_dim != product.dim:
        raise DimensionMismatch(f"subspace in C^{s.ambient_dim}, product has dimension {product.dim}")
    n_a, n_b = product.dims
    frame = s.frame
    vectors, factors, residuals = [], [], []
    best_residual = 0.0
    while frame.shape[1] > 0:
        tensors = frame.T.reshape(frame.shape[1], n_a, n_b)
        u, w, _ = _best_product(tensors, rng, restarts, max_iters, residual_tol)
        v = np.kron(u, w)
        coords = frame.conj().T @ v
        resid = float(np.linalg.norm(v - frame @ coords))
        # residual against the original subspace, not only the deflated remainder
        resid = max(resid, float(np.linalg.norm(v - s.project(v))))
        best_residual = resid
        if resid >= residual_tol:
            break
        vectors.append(v)
        factors.append((u, w))
        residuals.append(resid)
        q, _, _ = np.linalg.svd(coords[:, None], full_matrices=True)
        frame = frame @ q[:, 1:]

    if vectors:
        sv = np.linalg.svd(np.stack(vectors, axis=1), compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    else:
        cond = 1.0 if s.rank == 0 else float("inf")
    success = len(vectors) == s.rank and cond < MAX_BASIS_CONDITION
    weights, recon = [], float("nan")
    if success and vectors:
        weights = [1.0 / s.rank] * s.rank
        mix = sum(np.outer(v, v.conj()) for v in vectors) / s.rank
        recon = float(np.linalg.norm(mix - s.projector / s.rank))
    elif success:
        recon = 0.0
    return Extraction(success, vectors, factors, residuals, best_residual, cond, weights, recon)


def covariant_symbol(sigma: StateOperator, point) -> float:
    """<(x,y)| sigma |(x,y)> for the unit product coherent vector at ``point``."""
    c = product_coherent_unit(sigma.product, point).coeffs
    return float(np.vdot(c, sigma.matrix @ c).real)


def projector_distance(rho1: StateOperator | np.ndarray, rho2: StateOperator | np.ndarray) -> float:
    a = rho1.matrix if isinstance(rho1, StateOperator) else np.asarray(rho1)
    b = rho2.matrix if isinstance(rho2, StateOperator) else np.asarray(rho2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"operators of shapes {a.shape} and {b.shape}")
    return float(np.linalg.norm(a - b))


def fidelity_rank1(rho: StateOperator, v) -> float:
    """|<v, w>|^2 where w spans the range of the rank-one state ``rho``."""
    if rho.rank != 1:
        raise RankMismatch(f"fidelity_rank1 needs a rank-one state, got rank {rho.rank}")
    c = v.coeffs if isinstance(v, SectionVector) else np.asarray(v, dtype=complex)
    c = c / np.linalg.norm(c)
    _, vecs = np.linalg.eigh(rho.matrix)
    return float(abs(np.vdot(c, vecs[:, -1])) ** 2)


def range_subspace(rho: StateOperator, rank_tol: float = sub.DEFAULT_RANK_TOL) -> Subspace:
    return sub.from_columns(rho.matrix, rank_tol)
