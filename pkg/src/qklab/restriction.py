"""Kernels of the restriction maps to finite point sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import subspaces as sub
from .errors import DimensionMismatch, EmptySubset
from .projective import ProjectivePoint, canonical_lift
from .sections import ProductSpace, SectionSpace, eval_vector, product_eval_vector
from .subspaces import DEFAULT_RANK_TOL, Subspace

Side = Literal["factor_A", "factor_B", "product"]
DEDUP_TOL = 1e-12


def _as_point(p) -> ProjectivePoint:
    return p if isinstance(p, ProjectivePoint) else canonical_lift(p)


def _same(p: ProjectivePoint, q: ProjectivePoint) -> bool:
    return p.dim == q.dim and np.max(np.abs(p.coords - q.coords)) <= DEDUP_TOL


@dataclass(frozen=True, eq=False)
class FiniteSubset:
    """A nonempty finite set of points on one factor or on the product.

    Product points are ``(x, y)`` pairs. Points are canonicalized and
    duplicates (equal canonical lifts) are dropped, keeping first occurrence.
    """

    side: Side
    points: tuple

    def __post_init__(self):
        if self.side not in ("factor_A", "factor_B", "product"):
            raise ValueError(f"unknown side {self.side!r}")
        pts = []
        for p in self.points:
            if self.side == "product":
                x, y = p
                q = (_as_point(x), _as_point(y))
                dup = any(_same(q[0], r[0]) and _same(q[1], r[1]) for r in pts)
            else:
                q = _as_point(p)
                dup = any(_same(q, r) for r in pts)
            if not dup:
                pts.append(q)
        if not pts:
            raise EmptySubset("restriction subsets must be nonempty")
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def factor_subset(points, side: Side = "factor_A") -> FiniteSubset:
    return FiniteSubset(side, tuple(points))


def product_subset(points) -> FiniteSubset:
    return FiniteSubset("product", tuple(points))


def grid(u: FiniteSubset, v: FiniteSubset) -> FiniteSubset:
    """The product set U x V."""
    return product_subset([(x, y) for x in u for y in v])


def union(subsets) -> FiniteSubset:
    subsets = list(subsets)
    if not subsets:
        raise EmptySubset("union of no subsets")
    return product_subset([p for s in subsets for p in s])


def _coerce(points, side: Side) -> FiniteSubset:
    if isinstance(points, FiniteSubset):
        return points
    return FiniteSubset(side, tuple(points))


def eval_vectors(space, subset: FiniteSubset) -> list[np.ndarray]:
    if isinstance(space, ProductSpace):
        if subset.side != "product":
            raise DimensionMismatch("product space needs a subset of product points")
        return [product_eval_vector(space, p).coeffs for p in subset]
    if subset.side == "product":
        raise DimensionMismatch("factor space needs a subset of factor points")
    return [eval_vector(space, p).coeffs for p in subset]


def kernel_perp(space: SectionSpace | ProductSpace, subset, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """ker(R)^perp, the span of the evaluation vectors at the points."""
    side = "product" if isinstance(space, ProductSpace) else "factor_A"
    subset = _coerce(subset, side)
    return sub.from_spanning(eval_vectors(space, subset), space.dim, rank_tol)


def kernel_of_restriction(space: SectionSpace | ProductSpace, subset,
                          rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Sections vanishing at every point of ``subset``."""
    return sub.complement(kernel_perp(space, subset, rank_tol))


def product_kernel(product: ProductSpace, subset, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    if not isinstance(product, ProductSpace):
        raise DimensionMismatch("product_kernel needs a ProductSpace")
    return kernel_of_restriction(product, _coerce(subset, "product"), rank_tol)
