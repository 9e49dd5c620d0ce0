"""Points of complex projective space, root finding on CP^1 and zero-set sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSection, DimensionMismatch, ZeroForm, ZeroVector

COORD_EPS = 1e-14
ROOT_CLUSTER_RTOL = 1e-4
MAX_SLICE_RETRIES = 32


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of CP^d stored as its canonical unit-norm lift.

    The first coordinate with modulus above ``COORD_EPS`` is real and positive.
    Build instances with :func:`canonical_lift` rather than directly.
    """

    coords: np.ndarray

    @property
    def dim(self) -> int:
        return self.coords.shape[0] - 1

    def distance(self, other: "ProjectivePoint") -> float:
        """Fubini-Study chordal distance sqrt(1 - |<x, y>|^2)."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"CP^{self.dim} vs CP^{other.dim}")
        overlap = abs(np.vdot(self.coords, other.coords))
        return float(np.sqrt(max(0.0, 1.0 - overlap**2)))

    def __repr__(self) -> str:
        body = ":".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.coords)
        return f"ProjectivePoint[{body}]"


def canonical_lift(v) -> ProjectivePoint:
    """Return the canonical unit lift of the projective class of ``v``."""
    v = np.asarray(v, dtype=complex).ravel()
    if v.size < 2:
        raise DimensionMismatch("a projective point needs at least two coordinates")
    mags = np.abs(v)
    nonzero = np.flatnonzero(mags > COORD_EPS)
    if nonzero.size == 0:
        raise ZeroVector("all coordinates are numerically zero")
    lead = v[nonzero[0]]
    w = v * (np.conj(lead) / abs(lead))
    w = w / np.linalg.norm(w)
    # exact zero imaginary part on the pivot keeps lifts bit-stable under re-lifting
    w[nonzero[0]] = abs(w[nonzero[0]])
    w.setflags(write=False)
    return ProjectivePoint(w)


def random_point(d: int, rng: np.random.Generator) -> ProjectivePoint:
    """Fubini-Study uniform point of CP^d (normalized complex Gaussian)."""
    if d < 1:
        raise DimensionMismatch(f"projective dimension must be >= 1, got {d}")
    z = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
    return canonical_lift(z)


def _evaluate_binary_form(coeffs: np.ndarray, u: np.ndarray) -> complex:
    k = coeffs.size - 1
    j = np.arange(k + 1)
    return complex(np.sum(coeffs * u[0] ** (k - j) * u[1] ** j))


def roots_on_cp1(coeffs) -> list[tuple[ProjectivePoint, int]]:
    """Projective zeros of the binary form sum_j c_j u0^(k-j) u1^j.

    Finite roots come from the companion-matrix eigenvalues of the
    dehomogenized polynomial p(t) = sum_j c_j t^j at [1:t]; vanishing top
    coefficients become the root [0:1] with the matching multiplicity.
    Nearby eigenvalues are merged into one root of higher multiplicity.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    k = c.size - 1
    if k < 1:
        raise ZeroForm("a binary form needs degree >= 1")
    scale = np.max(np.abs(c))
    if scale <= COORD_EPS:
        raise ZeroForm("form is numerically identically zero")
    small = np.abs(c) <= COORD_EPS * scale
    m_inf = 0
    while m_inf <= k and small[k - m_inf]:
        m_inf += 1
    out: list[tuple[ProjectivePoint, int]] = []
    if m_inf:
        out.append((canonical_lift([0.0, 1.0]), m_inf))
    deg = k - m_inf
    if deg > 0:
        # np.roots builds the companion matrix of the monic-normalized polynomial
        ts = np.roots(c[: deg + 1][::-1])
        for t, mult in _cluster(ts):
            out.append((canonical_lift([1.0, t]), mult))
    return out


def _cluster(ts: np.ndarray) -> list[tuple[complex, int]]:
    remaining = sorted(ts.tolist(), key=lambda z: (z.real, z.imag))
    groups: list[list[complex]] = []
    for t in remaining:
        for g in groups:
            centre = np.mean(g)
            if abs(t - centre) <= ROOT_CLUSTER_RTOL * max(1.0, abs(centre)):
                g.append(t)
                break
        else:
            groups.append([t])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def sample_zero_points(s0, product, count: int, rng: np.random.Generator,
                       return_multiplicity: bool = False):
    """Sample ``count`` points of the zero set of a product section.

    ``s0`` holds coordinates in the orthonormal product basis of ``product``
    (a :class:`~qklab.sections.ProductSpace`). The second factor must be CP^1:
    a random ``x`` is drawn, the binary form ``s0(x, .)`` is solved, and one
    of its distinct roots is chosen at random. When the first factor is also
    CP^1 the roles alternate between draws so that zero-set components of the
    form ``{x0} x CP^1`` are reached as well.

    With ``return_multiplicity`` each entry is ``(x, y, multiplicity)`` where
    the multiplicity is that of the chosen root within its slice.
    """
    space_a, space_b = product.space_a, product.space_b
    if space_b.d != 1:
        raise DimensionMismatch("zero-set sampling needs the second factor to be CP^1")
    coeffs = np.asarray(s0, dtype=complex).reshape(space_a.dim, space_b.dim)
    norm = np.linalg.norm(coeffs)
    if norm <= COORD_EPS:
        raise ZeroVector("s0 is the zero section")
    both_lines = space_a.d == 1
    samples = []
    for i in range(count):
        slice_in_x = both_lines and i % 2 == 1
        for _ in range(MAX_SLICE_RETRIES):
            if slice_in_x:
                y = random_point(1, rng)
                form = coeffs @ space_b.basis_values(y) / np.sqrt(space_a.factorials)
            else:
                x = random_point(space_a.d, rng)
                form = space_a.basis_values(x) @ coeffs / np.sqrt(space_b.factorials)
            if np.max(np.abs(form)) <= 1e-10 * norm:
                continue
            roots = roots_on_cp1(form)
            point, mult = roots[int(rng.integers(len(roots)))]
            if slice_in_x:
                x = point
            else:
                y = point
            break
        else:
            raise DegenerateSection(
                f"s0 vanished identically on {MAX_SLICE_RETRIES} sampled slices")
        samples.append((x, y, mult) if return_multiplicity else (x, y))
    return samples
