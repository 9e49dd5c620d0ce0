"""Holomorphic sections of O(k) over CP^d and of the external product bundle.

A section of O(k) is a homogeneous polynomial of degree k in d+1 variables.
The space carries the Fischer pairing <z^a, z^b> = delta_ab * a!, so the
rescaled monomials e_a = z^a / sqrt(a!) form an orthonormal basis and a
section is stored by its coordinates in that basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb, factorial, prod

import numpy as np

from .errors import DimensionMismatch, InvalidModel
from .projective import ProjectivePoint


def multi_indices(d: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of length d+1 summing to k, lexicographically descending."""
    def rec(n_vars: int, total: int):
        if n_vars == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in rec(n_vars - 1, total - first):
                yield (first,) + rest

    return tuple(rec(d + 1, k))


@dataclass(frozen=True)
class SectionSpace:
    """H^0(CP^d, O(k)) with its monomial orthonormal basis."""

    d: int
    k: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise InvalidModel(f"projective dimension must be >= 1, got {self.d!r}")
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InvalidModel(f"degree must be >= 1 (very ample), got {self.k!r}")

    @cached_property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return multi_indices(self.d, self.k)

    @property
    def dim(self) -> int:
        return comb(self.d + self.k, self.k)

    @cached_property
    def exponents(self) -> np.ndarray:
        return np.array(self.basis, dtype=int)

    @cached_property
    def factorials(self) -> np.ndarray:
        """alpha! for every basis multi-index, as floats."""
        return np.array([prod(factorial(a) for a in alpha) for alpha in self.basis], dtype=float)

    def _coords(self, x) -> np.ndarray:
        v = x.coords if isinstance(x, ProjectivePoint) else np.asarray(x, dtype=complex)
        if v.shape != (self.d + 1,):
            raise DimensionMismatch(f"point has {v.shape[0]} coordinates, space expects {self.d + 1}")
        return v

    def monomials(self, x) -> np.ndarray:
        """x^alpha for every basis multi-index (no normalization)."""
        v = self._coords(x)
        return np.prod(v[None, :] ** self.exponents, axis=1)

    def basis_values(self, x) -> np.ndarray:
        """e_alpha(x) = x^alpha / sqrt(alpha!)."""
        return self.monomials(x) / np.sqrt(self.factorials)

    def to_json(self) -> dict:
        return {"d": int(self.d), "k": int(self.k)}


def space(d: int, k: int) -> SectionSpace:
    return SectionSpace(d, k)


@dataclass(frozen=True)
class ProductSpace:
    """H_A (x) H_B with the flat index (a, b) -> a * dim_B + b."""

    space_a: SectionSpace
    space_b: SectionSpace

    @property
    def dims(self) -> tuple[int, int]:
        return self.space_a.dim, self.space_b.dim

    @property
    def dim(self) -> int:
        return self.space_a.dim * self.space_b.dim

    def index(self, a: int, b: int) -> int:
        n_a, n_b = self.dims
        if not (0 <= a < n_a and 0 <= b < n_b):
            raise IndexError(f"({a}, {b}) outside {n_a} x {n_b}")
        return a * n_b + b

    def unindex(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return divmod(i, self.space_b.dim)

    def to_json(self) -> dict:
        return {"d1": self.space_a.d, "k1": self.space_a.k, "d2": self.space_b.d, "k2": self.space_b.k}


def product_space(d1: int, k1: int, d2: int, k2: int) -> ProductSpace:
    return ProductSpace(SectionSpace(d1, k1), SectionSpace(d2, k2))


@dataclass(frozen=True, eq=False)
class SectionVector:
    """Coordinates of a section in the orthonormal basis of ``space``."""

    space: SectionSpace | ProductSpace
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.shape != (self.space.dim,):
            raise DimensionMismatch(f"{c.size} coefficients for a space of dimension {self.space.dim}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> "SectionVector":
        return SectionVector(self.space, self.coeffs / self.norm())

    def inner(self, other: "SectionVector") -> complex:
        """<self, other>, conjugate-linear in ``self``."""
        if other.space != self.space:
            raise DimensionMismatch("sections live in different spaces")
        return complex(np.vdot(self.coeffs, other.coeffs))


def _as_coeffs(space, s) -> np.ndarray:
    if isinstance(s, SectionVector):
        if s.space != space:
            raise DimensionMismatch("section belongs to a different space")
        return s.coeffs
    c = np.asarray(s, dtype=complex).ravel()
    if c.shape != (space.dim,):
        raise DimensionMismatch(f"{c.size} coefficients for a space of dimension {space.dim}")
    return c


def eval_vector(sp: SectionSpace, x) -> SectionVector:
    """Phi_x with <Phi_x, s> = s(x) for every section s."""
    return SectionVector(sp, np.conj(sp.basis_values(x)))


def coherent_unit(sp: SectionSpace, x) -> SectionVector:
    """Unit coherent vector |x> = Phi_x / ||Phi_x||."""
    return eval_vector(sp, x).normalized()


def evaluate(sp: SectionSpace | ProductSpace, s, x) -> complex:
    """Value of the section at x (a point, or a pair (x, y) on a product)."""
    c = _as_coeffs(sp, s)
    if isinstance(sp, ProductSpace):
        px, py = x
        mat = c.reshape(sp.dims)
        return complex(sp.space_a.basis_values(px) @ mat @ sp.space_b.basis_values(py))
    return complex(sp.basis_values(x) @ c)


def bergman(sp: SectionSpace | ProductSpace, x, y) -> complex:
    """Reproducing kernel K(x, y) = sum_j conj(theta_j(x)) theta_j(y).

    On unit lifts of CP^d this is (conj(x) . y)^k / k!; on a product space the
    kernel factorizes. Note K(x, y) = Phi_x(y) = <Phi_y, Phi_x>.
    """
    if isinstance(sp, ProductSpace):
        (xa, xb), (ya, yb) = x, y
        return bergman(sp.space_a, xa, ya) * bergman(sp.space_b, xb, yb)
    return complex(np.vdot(sp.basis_values(x), sp.basis_values(y)))


def product_eval_vector(ps: ProductSpace, point) -> SectionVector:
    """Phi_(x,y) = Phi_x (x) Phi_y in the flat product index."""
    x, y = point
    return SectionVector(ps, np.kron(eval_vector(ps.space_a, x).coeffs, eval_vector(ps.space_b, y).coeffs))


def product_coherent_unit(ps: ProductSpace, point) -> SectionVector:
    return product_eval_vector(ps, point).normalized()
