"""Exact linear algebra over the Gaussian rationals Q(i).

Sections are written in monomial coordinates (coefficients of z^alpha), so
evaluation rows are x^alpha and every entry stays in Q(i). Orthogonal
complements use the Fischer pairing <u, v> = sum conj(u_alpha) v_alpha alpha!,
which is the orthonormal-basis pairing with the sqrt(alpha!) scalings folded
into integer weights. Row reduction is done by sympy's ``DomainMatrix``.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial, prod

import numpy as np
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import DimensionMismatch, IrrationalInput, TooManyProducts
from .sections import ProductSpace, SectionSpace

MAX_DENOMINATOR = 10**6
MAX_AMBIENT = 64
MAX_POINTS = 64

ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)


def _rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, numbers.Real):
        xf = float(x)
        if not np.isfinite(xf):
            raise IrrationalInput(f"non-finite coordinate {x!r}")
        frac = Fraction(repr(xf)).limit_denominator(MAX_DENOMINATOR)
        if float(frac) != xf:
            raise IrrationalInput(f"{xf!r} is not a rational with denominator <= {MAX_DENOMINATOR}")
        return frac
    raise IrrationalInput(f"cannot read {x!r} as a rational number")


def gaussian_rational(z):
    """Convert a number, complex, or (re, im) pair to an element of Q(i).

    A float is accepted when it is the double nearest to a rational with
    denominator at most ``MAX_DENOMINATOR``; anything else raises
    :class:`IrrationalInput`.
    """
    if isinstance(z, type(ONE)):
        return z
    if isinstance(z, (tuple, list)) and len(z) == 2:
        re, im = z
    elif isinstance(z, numbers.Complex) and not isinstance(z, numbers.Real):
        re, im = z.real, z.imag
    else:
        re, im = z, 0
    return QQ_I(_rational(re), _rational(im))


def conj(z):
    return QQ_I(z.x, -z.y)


def exact_matrix(rows) -> DomainMatrix:
    rows = [[gaussian_rational(v) for v in r] for r in rows]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), QQ_I)


def exact_kernel(m: DomainMatrix | list) -> tuple[int, list[list]]:
    """Exact nullity and a basis of the nullspace (from the RREF)."""
    if not isinstance(m, DomainMatrix):
        m = exact_matrix(m)
    basis = m.nullspace().to_list() if m.shape[1] else []
    return len(basis), basis


def exact_rank(rows: list[list], ncols: int) -> int:
    if not rows:
        return 0
    return DomainMatrix(rows, (len(rows), ncols), QQ_I).rank()


@dataclass(frozen=True)
class ExactSubspace:
    """Row basis of a subspace of Q(i)^n with diagonal Fischer weights."""

    weights: tuple[int, ...]
    basis: list = field(default_factory=list, compare=False)

    @property
    def ambient_dim(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return len(self.basis)


def _row_basis(rows: list[list], n: int) -> list[list]:
    if not rows:
        return []
    red, pivots = DomainMatrix(rows, (len(rows), n), QQ_I).rref()
    return red.to_list()[: len(pivots)]


def span(rows, weights) -> ExactSubspace:
    return ExactSubspace(tuple(weights), _row_basis([list(r) for r in rows], len(weights)))


def full(weights) -> ExactSubspace:
    n = len(weights)
    return ExactSubspace(tuple(weights), [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])


def nullspace_of(constraints: list[list], weights) -> ExactSubspace:
    n = len(weights)
    if not constraints:
        return full(weights)
    _, basis = exact_kernel(DomainMatrix(constraints, (len(constraints), n), QQ_I))
    return ExactSubspace(tuple(weights), basis)


def _pairing_rows(s: ExactSubspace) -> list[list]:
    """Rows r with r . u = <b, u> for each basis vector b."""
    return [[conj(b) * QQ_I(w, 0) for b, w in zip(row, s.weights)] for row in s.basis]


def complement(s: ExactSubspace) -> ExactSubspace:
    return nullspace_of(_pairing_rows(s), s.weights)


def intersect(spaces: list[ExactSubspace]) -> ExactSubspace:
    weights = spaces[0].weights
    rows = [r for s in spaces for r in _pairing_rows(complement(s))]
    return nullspace_of(rows, weights)


def add(spaces: list[ExactSubspace]) -> ExactSubspace:
    weights = spaces[0].weights
    return span([r for s in spaces for r in s.basis], weights)


def tensor(a: ExactSubspace, b: ExactSubspace) -> ExactSubspace:
    weights = tuple(wa * wb for wa, wb in iproduct(a.weights, b.weights))
    rows = [[x * y for x, y in iproduct(ra, rb)] for ra in a.basis for rb in b.basis]
    return ExactSubspace(weights, rows)


def contains(big: ExactSubspace, small: ExactSubspace) -> bool:
    return exact_rank(big.basis + small.basis, big.ambient_dim) == big.dim


def space_weights(sp: SectionSpace) -> tuple[int, ...]:
    return tuple(prod(factorial(a) for a in alpha) for alpha in sp.basis)


def product_weights(ps: ProductSpace) -> tuple[int, ...]:
    return tuple(wa * wb for wa, wb in iproduct(space_weights(ps.space_a), space_weights(ps.space_b)))


def _monomial_row(sp: SectionSpace, x) -> list:
    coords = [gaussian_rational(c) for c in x]
    if len(coords) != sp.d + 1:
        raise DimensionMismatch(f"point with {len(coords)} coordinates on CP^{sp.d}")
    row = []
    for alpha in sp.basis:
        v = ONE
        for c, a in zip(coords, alpha):
            for _ in range(a):
                v = v * c
        row.append(v)
    return row


def factor_kernel(sp: SectionSpace, points) -> ExactSubspace:
    """Sections of ``sp`` vanishing at every (rational-lift) point."""
    return nullspace_of([_monomial_row(sp, x) for x in points], space_weights(sp))


def product_kernel(ps: ProductSpace, points) -> ExactSubspace:
    rows = []
    for x, y in points:
        ra, rb = _monomial_row(ps.space_a, x), _monomial_row(ps.space_b, y)
        rows.append([a * b for a, b in iproduct(ra, rb)])
    return nullspace_of(rows, product_weights(ps))


def _raw(point):
    """Raw lift coordinates; a canonical ProjectivePoint is irrational in general."""
    if hasattr(point, "coords"):
        return list(point.coords)
    return list(point)


@dataclass
class ExactCertificate:
    lhs_dim: int
    rhs_dim: int
    h_dims: dict[str, int]
    k_dims: dict[str, int]
    summand_dims: dict[str, int]
    contained: bool
    verdict: str

    def to_json(self) -> dict:
        return {
            "lhs_dim": self.lhs_dim,
            "rhs_dim": self.rhs_dim,
            "H_dims": dict(self.h_dims),
            "K_dims": dict(self.k_dims),
            "summand_dims": dict(self.summand_dims),
            "contained": self.contained,
            "verdict": self.verdict,
        }


def subset_label(s: tuple[int, ...]) -> str:
    return "{" + ",".join(str(j) for j in s) + "}"


def certify_union(ps: ProductSpace, pairs) -> ExactCertificate:
    """Exact adjudication of the union decomposition.

    ``pairs`` is a list of (U_points, V_points) with Gaussian-rational lifts.
    """
    n = len(pairs)
    if n > 12:
        raise TooManyProducts(f"{n} products exceed the 2^12 summand cap")
    if ps.dim > MAX_AMBIENT:
        raise DimensionMismatch(f"exact oracle is capped at ambient dimension {MAX_AMBIENT}")
    all_points = [(_raw(x), _raw(y)) for u, v in pairs for x in u for y in v]
    if len(all_points) > MAX_POINTS:
        raise DimensionMismatch(f"exact oracle is capped at {MAX_POINTS} points")
    ker_u = [factor_kernel(ps.space_a, [_raw(x) for x in u]) for u, _ in pairs]
    ker_v = [factor_kernel(ps.space_b, [_raw(y) for y in v]) for _, v in pairs]
    perp_v = [complement(k) for k in ker_v]
    lhs = product_kernel(ps, all_points)

    h_dims, k_dims, summand_dims, summands = {}, {}, {}, []
    for mask in range(2**n):
        s = tuple(j + 1 for j in range(n) if mask >> j & 1)
        h = intersect([ker_u[j - 1] for j in s]) if s else full(space_weights(ps.space_a))
        k = intersect([perp_v[j] if (j + 1) in s else ker_v[j] for j in range(n)])
        t = tensor(h, k)
        label = subset_label(s)
        h_dims[label], k_dims[label], summand_dims[label] = h.dim, k.dim, t.dim
        summands.append(t)
    rhs = add(summands)
    contained = contains(lhs, rhs)
    if contained and rhs.dim == lhs.dim:
        verdict = "equal"
    elif contained:
        verdict = "strict_containment"
    else:
        verdict = "not_contained"
    return ExactCertificate(lhs.dim, rhs.dim, h_dims, k_dims, summand_dims, contained, verdict)


def is_gaussian_rational(points) -> bool:
    try:
        for p in points:
            for c in _raw(p):
                gaussian_rational(c)
    except IrrationalInput:
        return False
    return True
