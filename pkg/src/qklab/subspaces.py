"""Linear subspaces of C^n held as orthonormal frames.

Ranks are decided from singular values relative to the largest one. A
singular value falling in the band ``[rank_tol * GUARD_BELOW, rank_tol *
GUARD_ABOVE]`` means the rank decision is not trustworthy; such results carry
``ill_conditioned=True`` and the flag propagates through every derived
subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyList, ZeroSubspace

DEFAULT_RANK_TOL = 1e-9
DEFAULT_EQUALITY_TOL = 1e-8
ABS_RANK_FLOOR = 1e-12
GUARD_BELOW = 1e-4
GUARD_ABOVE = 1e2


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient_dim: int
    frame: np.ndarray = field(repr=False)
    tol_used: float = DEFAULT_RANK_TOL
    ill_conditioned: bool = False

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=complex)
        if f.ndim != 2 or f.shape[0] != self.ambient_dim:
            raise DimensionMismatch(f"frame shape {f.shape} for ambient dimension {self.ambient_dim}")
        if f.shape[1] > self.ambient_dim:
            raise DimensionMismatch("more frame vectors than the ambient dimension")
        f.setflags(write=False)
        object.__setattr__(self, "frame", f)

    @property
    def rank(self) -> int:
        return self.frame.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        return self.frame @ (self.frame.conj().T @ v)

    def __repr__(self) -> str:
        flag = ", ill_conditioned" if self.ill_conditioned else ""
        return f"Subspace(rank={self.rank}, ambient_dim={self.ambient_dim}{flag})"

    def to_json(self, with_frame: bool = False) -> dict:
        out = {"ambient_dim": int(self.ambient_dim), "rank": int(self.rank)}
        if with_frame:
            out["frame"] = [[[float(z.real), float(z.imag)] for z in col] for col in self.frame.T]
        return out


def zero(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))


def full(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, np.eye(ambient_dim, dtype=complex))


def _orth(columns: np.ndarray, rank_tol: float) -> tuple[np.ndarray, bool]:
    if columns.shape[1] == 0:
        return columns, False
    u, s, _ = np.linalg.svd(columns, full_matrices=False)
    smax = s[0] if s.size else 0.0
    if smax <= ABS_RANK_FLOOR:
        return columns[:, :0], False
    rel = s / smax
    rank = int(np.sum(s > max(rank_tol * smax, ABS_RANK_FLOOR)))
    ill = bool(np.any((rel >= rank_tol * GUARD_BELOW) & (rel <= rank_tol * GUARD_ABOVE)))
    return u[:, :rank], ill


def from_spanning(vectors, ambient_dim: int, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Orthonormal frame for the span of ``vectors`` (an iterable of 1-D vectors)."""
    vecs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    for v in vecs:
        if v.shape != (ambient_dim,):
            raise DimensionMismatch(f"vector of length {v.size} in ambient dimension {ambient_dim}")
    cols = np.stack(vecs, axis=1) if vecs else np.zeros((ambient_dim, 0), dtype=complex)
    frame, ill = _orth(cols, rank_tol)
    return Subspace(ambient_dim, frame, rank_tol, ill)


def from_columns(matrix, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    m = np.asarray(matrix, dtype=complex)
    frame, ill = _orth(m, rank_tol)
    return Subspace(m.shape[0], frame, rank_tol, ill)


def _check_common(spaces: Sequence[Subspace]) -> int:
    n = spaces[0].ambient_dim
    for s in spaces[1:]:
        if s.ambient_dim != n:
            raise DimensionMismatch(f"ambient dimensions {n} and {s.ambient_dim} differ")
    return n


def complement(s: Subspace) -> Subspace:
    n = s.ambient_dim
    if s.rank == 0:
        return Subspace(n, np.eye(n, dtype=complex), s.tol_used, s.ill_conditioned)
    u, _, _ = np.linalg.svd(s.frame, full_matrices=True)
    return Subspace(n, u[:, s.rank:], s.tol_used, s.ill_conditioned)


def sum(spaces: Iterable[Subspace], rank_tol: float | None = None) -> Subspace:  # noqa: A001
    spaces = list(spaces)
    if not spaces:
        raise EmptyList("sum of an empty list of subspaces")
    n = _check_common(spaces)
    tol = rank_tol if rank_tol is not None else max(s.tol_used for s in spaces)
    cols = np.concatenate([s.frame for s in spaces], axis=1)
    frame, ill = _orth(cols, tol)
    return Subspace(n, frame, tol, ill or any(s.ill_conditioned for s in spaces))


def intersect(spaces: Iterable[Subspace], rank_tol: float | None = None) -> Subspace:
    """Intersection computed as the complement of the sum of complements."""
    spaces = list(spaces)
    if not spaces:
        raise EmptyList("intersection of an empty list of subspaces")
    _check_common(spaces)
    return complement(sum([complement(s) for s in spaces], rank_tol))


def tensor(a: Subspace, b: Subspace) -> Subspace:
    """Span of all u (x) w; the Kronecker product of orthonormal frames is orthonormal."""
    n = a.ambient_dim * b.ambient_dim
    frame = np.kron(a.frame, b.frame) if a.rank and b.rank else np.zeros((n, 0), dtype=complex)
    return Subspace(n, frame, max(a.tol_used, b.tol_used), a.ill_conditioned or b.ill_conditioned)


def distance(s1: Subspace, s2: Subspace) -> float:
    """Frobenius norm of the difference of the orthogonal projectors."""
    _check_common([s1, s2])
    return float(np.linalg.norm(s1.projector - s2.projector))


def equal(s1: Subspace, s2: Subspace, tol: float = DEFAULT_EQUALITY_TOL) -> tuple[bool, float]:
    dist = distance(s1, s2)
    return dist <= tol, dist


def principal_angles(s1: Subspace, s2: Subspace) -> np.ndarray:
    """Principal angles in radians, ascending; min(r1, r2) of them."""
    _check_common([s1, s2])
    if s1.rank == 0 or s2.rank == 0:
        raise ZeroSubspace("principal angles need two nonzero subspaces")
    cosines = np.linalg.svd(s1.frame.conj().T @ s2.frame, compute_uv=False)
    return np.arccos(np.clip(cosines, 0.0, 1.0))


def containment_residual(big: Subspace, small: Subspace) -> float:
    _check_common([big, small])
    if small.rank == 0:
        return 0.0
    resid = small.frame - big.project(small.frame)
    return float(np.max(np.linalg.norm(resid, axis=0)))


def contains(big: Subspace, small: Subspace, tol: float = DEFAULT_EQUALITY_TOL) -> tuple[bool, float]:
    r = containment_residual(big, small)
    return r <= tol, r


def max_cross_gram(s1: Subspace, s2: Subspace) -> float:
    """Largest |<u, v>| over frame vectors; zero iff the subspaces are orthogonal."""
    _check_common([s1, s2])
    if s1.rank == 0 or s2.rank == 0:
        return 0.0
    return float(np.max(np.abs(s1.frame.conj().T @ s2.frame)))


def random_subspace(ambient_dim: int, rank: int, rng: np.random.Generator,
                    inside: Subspace | None = None) -> Subspace:
    """Haar-like random subspace, optionally drawn inside ``inside``."""
    host = inside.frame if inside is not None else np.eye(ambient_dim, dtype=complex)
    if rank > host.shape[1]:
        raise DimensionMismatch(f"rank {rank} exceeds host rank {host.shape[1]}")
    g = rng.standard_normal((host.shape[1], rank)) + 1j * rng.standard_normal((host.shape[1], rank))
    return from_columns(host @ g)
