"""End-to-end experiments on kernels of restriction maps.

Each ``run_*`` function returns a JSON-ready report dict with a ``status``,
a list of named ``checks`` (measured value against tolerance) and a
``passed`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exact
from . import subspaces as sub
from .errors import DependentCoherentStates, DimensionMismatch, IrrationalInput, TooManyProducts
from .projective import canonical_lift, random_point, sample_zero_points
from .restriction import FiniteSubset, kernel_of_restriction, kernel_perp, product_kernel
from .sections import ProductSpace, SectionVector, product_coherent_unit, product_eval_vector
from .states import (
    covariant_symbol,
    extract_product_basis,
    fidelity_rank1,
    partial_transpose_min_eig,
    projector_distance,
    rho_from_subspace,
    schmidt_values,
)
from .subspaces import Subspace

MAX_PRODUCTS = 12
PPT_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-8
SYMBOL_TOL = 1e-12
FIDELITY_TOL = 1e-8


@dataclass(frozen=True)
class Tolerances:
    rank_tol: float = sub.DEFAULT_RANK_TOL
    equality_tol: float = sub.DEFAULT_EQUALITY_TOL
    residual_tol: float = 1e-6

    def to_json(self) -> dict:
        return {"rank_tol": self.rank_tol, "equality_tol": self.equality_tol, "residual_tol": self.residual_tol}


@dataclass
class UnionScenario:
    """Lambda = union over j of U_j x V_j.

    ``pairs`` holds raw lifts (coordinate sequences or ProjectivePoints). Raw
    lifts are kept so the exact oracle can work with rational coordinates.
    """

    product: ProductSpace
    pairs: list[tuple[list, list]]
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a union scenario needs at least one product U x V")
        # validates nonemptiness and dimensions early
        self.u_sets()
        self.v_sets()

    @property
    def n(self) -> int:
        return len(self.pairs)

    def u_sets(self) -> list[FiniteSubset]:
        out = []
        for u, _ in self.pairs:
            s = FiniteSubset("factor_A", tuple(u))
            if any(p.dim != self.product.space_a.d for p in s):
                raise DimensionMismatch(f"U points must lie in CP^{self.product.space_a.d}")
            out.append(s)
        return out

    def v_sets(self) -> list[FiniteSubset]:
        out = []
        for _, v in self.pairs:
            s = FiniteSubset("factor_B", tuple(v))
            if any(p.dim != self.product.space_b.d for p in s):
                raise DimensionMismatch(f"V points must lie in CP^{self.product.space_b.d}")
            out.append(s)
        return out

    def lambda_set(self) -> FiniteSubset:
        return FiniteSubset("product", tuple((x, y) for u, v in zip(self.u_sets(), self.v_sets())
                                             for x in u for y in v))

    def raw_points(self) -> list:
        return [p for u, v in self.pairs for p in list(u) + list(v)]


@dataclass
class DecompositionSummand:
    subset: tuple[int, ...]
    h_part: Subspace
    k_part: Subspace
    tensor: Subspace

    @property
    def label(self) -> str:
        return exact.subset_label(self.subset)


def _check(name: str, measured: float, tol: float, passed: bool | None = None, relation: str = "<=") -> dict:
    ok = (measured <= tol) if passed is None else passed
    return {"name": name, "passed": bool(ok), "measured": float(measured), "tolerance": float(tol),
            "relation": relation}


def predicted_product_kernel(ker_u: Subspace, ker_v: Subspace, product: ProductSpace) -> Subspace:
    """H_A (x) ker V  plus  ker U (x) (ker V)^perp."""
    n_a, n_b = product.dims
    if ker_u.ambient_dim != n_a or ker_v.ambient_dim != n_b:
        raise DimensionMismatch("kernels do not match the factor dimensions")
    a1 = sub.tensor(sub.full(n_a), ker_v)
    a2 = sub.tensor(ker_u, sub.complement(ker_v))
    return sub.sum([a1, a2])


def _factor_kernels(scenario: UnionScenario):
    tol = scenario.tolerances.rank_tol
    sa, sb = scenario.product.space_a, scenario.product.space_b
    ker_u = [kernel_of_restriction(sa, u, tol) for u in scenario.u_sets()]
    ker_v = [kernel_of_restriction(sb, v, tol) for v in scenario.v_sets()]
    return ker_u, ker_v


def _status(equal_ok: bool, contained_ok: bool, flagged: bool) -> str:
    if equal_ok:
        return "equal"
    if flagged:
        return "ill_conditioned"
    return "strict_containment" if contained_ok else "ill_conditioned"


def run_product_check(scenario: UnionScenario) -> dict:
    """Direct kernel on U x V against the two-summand prediction."""
    if scenario.n != 1:
        raise ValueError("a product check takes exactly one pair (U, V)")
    tol = scenario.tolerances
    ps = scenario.product
    (ker_u,), (ker_v,) = _factor_kernels(scenario)
    lam = scenario.lambda_set()
    direct = product_kernel(ps, lam, tol.rank_tol)
    predicted = predicted_product_kernel(ker_u, ker_v, ps)
    eq_ok, dist = sub.equal(direct, predicted, tol.equality_tol)
    direct_perp = kernel_perp(ps, lam, tol.rank_tol)
    tensor_perp = sub.tensor(sub.complement(ker_u), sub.complement(ker_v))
    perp_ok, perp_dist = sub.equal(direct_perp, tensor_perp, tol.equality_tol)
    flagged = any(s.ill_conditioned for s in (direct, predicted, direct_perp, tensor_perp))
    status = _status(eq_ok and perp_ok, True, flagged)
    if not (eq_ok and perp_ok) and not flagged:
        status = "unequal"
    return {
        "experiment": "product_check",
        "status": status,
        "passed": bool(eq_ok and perp_ok),
        "ill_conditioned": flagged,
        "dims": {
            "H_A": ps.space_a.dim, "H_B": ps.space_b.dim, "product": ps.dim,
            "ker_U": ker_u.rank, "ker_V": ker_v.rank,
            "direct_kernel": direct.rank, "predicted_kernel": predicted.rank,
            "points": len(lam),
        },
        "distances": {"kernel": dist, "kernel_perp_tensor": perp_dist},
        "checks": [
            _check("kernel_equals_prediction", dist, tol.equality_tol),
            _check("kernel_perp_is_tensor", perp_dist, tol.equality_tol),
        ],
    }


def predicted_union_decomposition(scenario: UnionScenario) -> list[DecompositionSummand]:
    """One summand H_S (x) K_S per subset S of {1..n}, ordered by bitmask."""
    n = scenario.n
    if n > MAX_PRODUCTS:
        raise TooManyProducts(f"{n} products exceed the cap of {MAX_PRODUCTS}")
    ker_u, ker_v = _factor_kernels(scenario)
    perp_v = [sub.complement(k) for k in ker_v]
    n_a = scenario.product.space_a.dim
    out = []
    for mask in range(2**n):
        s = tuple(j + 1 for j in range(n) if mask >> j & 1)
        h = sub.intersect([ker_u[j - 1] for j in s]) if s else sub.full(n_a)
        k = sub.intersect([perp_v[j] if (j + 1) in s else ker_v[j] for j in range(n)])
        out.append(DecompositionSummand(s, h, k, sub.tensor(h, k)))
    return out


def summand_orthogonality(summands: Sequence[DecompositionSummand]) -> float:
    """Largest cross-Gram entry between K_S and K_S' over S != S'."""
    worst = 0.0
    for i, a in enumerate(summands):
        for b in summands[i + 1:]:
            worst = max(worst, sub.max_cross_gram(a.k_part, b.k_part))
    return worst


def certify(scenario: UnionScenario) -> dict:
    """Exact certificate as a JSON dict, or a dict explaining why none exists."""
    try:
        return exact.certify_union(scenario.product, scenario.pairs).to_json()
    except IrrationalInput as exc:
        return {"available": False, "reason": f"irrational input: {exc}"}
    except (DimensionMismatch, TooManyProducts) as exc:
        return {"available": False, "reason": str(exc)}


def run_union_check(scenario: UnionScenario, exact_oracle: bool | None = None) -> dict:
    """Direct kernel of the union against the predicted direct sum.

    The exact certificate is attached when equality fails, or always when
    ``exact_oracle`` is true; ``exact_oracle=False`` suppresses it.
    """
    tol = scenario.tolerances
    ps = scenario.product
    lam = scenario.lambda_set()
    lhs = product_kernel(ps, lam, tol.rank_tol)
    summands = predicted_union_decomposition(scenario)
    rhs = sub.sum([s.tensor for s in summands])
    resid = max(sub.containment_residual(lhs, s.tensor) for s in summands)
    ortho = summand_orthogonality(summands)
    eq_ok, dist = sub.equal(lhs, rhs, tol.equality_tol)
    flagged = lhs.ill_conditioned or rhs.ill_conditioned
    contained_ok = resid <= tol.equality_tol
    status = _status(eq_ok, contained_ok, flagged)
    report = {
        "experiment": "union_check",
        "status": status,
        "passed": bool(eq_ok and contained_ok and ortho < ORTHOGONALITY_TOL),
        "ill_conditioned": flagged,
        "dims": {
            "product": ps.dim, "n": scenario.n, "points": len(lam),
            "lhs": lhs.rank, "rhs": rhs.rank,
            "H": {s.label: s.h_part.rank for s in summands},
            "K": {s.label: s.k_part.rank for s in summands},
            "summands": {s.label: s.tensor.rank for s in summands},
        },
        "distances": {"equality": dist, "containment_residual": resid, "k_orthogonality": ortho},
        "checks": [
            _check("summands_contained_in_kernel", resid, tol.equality_tol),
            _check("summand_K_orthogonality", ortho, ORTHOGONALITY_TOL),
            _check("kernel_equals_decomposition", dist, tol.equality_tol),
        ],
    }
    if exact_oracle or (exact_oracle is None and not eq_ok):
        report["exact_certificate"] = certify(scenario)
    return report


def _state_diagnostics(s: Subspace, ps: ProductSpace, rng: np.random.Generator, tol: Tolerances) -> dict:
    rho = rho_from_subspace(s, ps)
    ppt = partial_transpose_min_eig(rho)
    ext = extract_product_basis(s, ps, rng, residual_tol=tol.residual_tol)
    return {
        "rank": s.rank,
        "trace": rho.trace,
        "zero_state": rho.is_zero,
        "pt_min_eig": ppt,
        "ppt": ppt >= -PPT_TOL,
        "extraction": ext.to_json(),
    }


def run_separability_report(target, product: ProductSpace | None = None,
                            rng: np.random.Generator | None = None,
                            tolerances: Tolerances | None = None) -> dict:
    """PPT witness and product-basis certificate for rho_ker and rho_ker_perp.

    ``target`` is a :class:`UnionScenario` or a product :class:`FiniteSubset`.
    """
    if isinstance(target, UnionScenario):
        ps, lam, tol = target.product, target.lambda_set(), target.tolerances
        seed = target.seed
    else:
        if product is None:
            raise ValueError("a bare point set needs the product space")
        ps, lam, tol, seed = product, target, tolerances or Tolerances(), 0
    rng = rng if rng is not None else np.random.default_rng(seed)
    ker = product_kernel(ps, lam, tol.rank_tol)
    perp = sub.complement(ker)
    k_diag = _state_diagnostics(ker, ps, rng, tol)
    p_diag = _state_diagnostics(perp, ps, rng, tol)
    checks = [
        _check("ppt_kernel", -k_diag["pt_min_eig"], PPT_TOL),
        _check("ppt_kernel_perp", -p_diag["pt_min_eig"], PPT_TOL),
        _check("product_basis_kernel", k_diag["extraction"]["max_residual"], tol.residual_tol,
               passed=k_diag["extraction"]["success"]),
        _check("product_basis_kernel_perp", p_diag["extraction"]["max_residual"], tol.residual_tol,
               passed=p_diag["extraction"]["success"]),
    ]
    passed = all(c["passed"] for c in checks)
    if passed:
        status = "separable_certified"
    elif not (k_diag["ppt"] and p_diag["ppt"]):
        status = "entangled_witnessed"
    else:
        status = "undecided"
    return {
        "experiment": "separability",
        "status": status,
        "passed": passed,
        "dims": {"product": ps.dim, "points": len(lam)},
        "kernel": k_diag,
        "kernel_perp": p_diag,
        "checks": checks,
    }


def random_unit_section(product: ProductSpace, rng: np.random.Generator) -> SectionVector:
    z = rng.standard_normal(product.dim) + 1j * rng.standard_normal(product.dim)
    return SectionVector(product, z / np.linalg.norm(z))


def _kernel_dims_sequence(ps: ProductSpace, points, rank_tol: float) -> list[int]:
    vecs = [product_eval_vector(ps, p).coeffs for p in points]
    return [ps.dim - sub.from_spanning(vecs[:i], ps.dim, rank_tol).rank for i in range(1, len(vecs) + 1)]


def run_zero_set_recovery(s0, product: ProductSpace, rng: np.random.Generator,
                          sample_count: int | None = None,
                          tolerances: Tolerances | None = None) -> dict:
    """Recover span{s0} as the kernel of the restriction to sampled zeros of s0.

    With ``sample_count=None`` the run starts with dim(product) samples and
    doubles (up to four times that) while the kernel rank exceeds one.
    """
    tol = tolerances or Tolerances()
    c = s0.coeffs if isinstance(s0, SectionVector) else np.asarray(s0, dtype=complex).ravel()
    if c.shape != (product.dim,):
        raise DimensionMismatch(f"s0 has {c.size} coefficients, product has dimension {product.dim}")
    c = c / np.linalg.norm(c)
    adaptive = sample_count is None
    target = product.dim if adaptive else int(sample_count)
    cap = 4 * target
    samples = sample_zero_points(c, product, target, rng, return_multiplicity=True)
    while True:
        pts = [(x, y) for x, y, _ in samples]
        ker = product_kernel(product, FiniteSubset("product", tuple(pts)), tol.rank_tol)
        if not adaptive or ker.rank <= 1 or len(samples) >= cap:
            break
        extra = min(len(samples), cap - len(samples))
        samples += sample_zero_points(c, product, extra, rng, return_multiplicity=True)

    pts = [(x, y) for x, y, _ in samples]
    max_value = max(abs(complex(product.space_a.basis_values(x) @ c.reshape(product.dims)
                                @ product.space_b.basis_values(y))) for x, y in pts)
    non_reduced = any(m > 1 for _, _, m in samples)
    rho = rho_from_subspace(ker, product)
    ext = extract_product_basis(ker, product, rng, residual_tol=tol.residual_tol)
    fidelity = fidelity_rank1(rho, c) if ker.rank == 1 else None
    recovered = ker.rank == 1 and fidelity is not None and fidelity >= 1 - FIDELITY_TOL
    if recovered:
        status = "recovered"
    elif non_reduced:
        status = "boundary_non_reduced"
    else:
        status = "not_recovered"
    schmidt = schmidt_values(c, product)
    checks = [
        _check("zero_samples_vanish", max_value, 1e-9),
        _check("kernel_rank_one", float(ker.rank), 1.0, passed=ker.rank == 1, relation="=="),
    ]
    if fidelity is not None:
        checks.append(_check("fidelity", 1 - fidelity, FIDELITY_TOL))
    return {
        "experiment": "zero_set",
        "status": status,
        "passed": status in ("recovered", "boundary_non_reduced"),
        "ill_conditioned": ker.ill_conditioned,
        "dims": {"product": product.dim, "samples": len(samples), "kernel": ker.rank},
        "kernel_dims_sequence": _kernel_dims_sequence(product, pts, tol.rank_tol),
        "fidelity": fidelity,
        "non_reduced_zero_set": non_reduced,
        "schmidt_values": [float(v) for v in schmidt],
        "pt_min_eig_kernel": partial_transpose_min_eig(rho),
        "pt_min_eig_kernel_perp": partial_transpose_min_eig(rho_from_subspace(sub.complement(ker), product)),
        "max_abs_s0_on_samples": max_value,
        "kernel_extraction": ext.to_json(),
        "checks": checks,
    }


def run_covariant_recovery(points, product: ProductSpace, rng: np.random.Generator,
                           tolerances: Tolerances | None = None, probes: int = 100) -> dict:
    """sigma = normalized projector onto the complement of span{|x_i, y_i>}.

    The kernel of the restriction to the chosen points must have sigma's
    range; the covariant symbol vanishes at the points.
    """
    tol = tolerances or Tolerances()
    pts = [(canonical_lift(x) if not hasattr(x, "coords") else x,
            canonical_lift(y) if not hasattr(y, "coords") else y) for x, y in points]
    m = len(pts)
    units = [product_coherent_unit(product, p).coeffs for p in pts]
    span = sub.from_spanning(units, product.dim, tol.rank_tol)
    if span.rank < m:
        raise DependentCoherentStates(f"{m} coherent vectors span only rank {span.rank}")
    if m >= product.dim:
        raise DependentCoherentStates(f"{m} points leave an empty range for sigma in dimension {product.dim}")
    ran_sigma = sub.complement(span)
    sigma = rho_from_subspace(ran_sigma, product)
    at_points = [covariant_symbol(sigma, p) for p in pts]
    ker = product_kernel(product, FiniteSubset("product", tuple(pts)), tol.rank_tol)
    rho_ker = rho_from_subspace(ker, product)
    proj_dist = projector_distance(ker.projector, ran_sigma.projector)
    state_dist = projector_distance(rho_ker, sigma)
    off = [covariant_symbol(sigma, (random_point(product.space_a.d, rng), random_point(product.space_b.d, rng)))
           for _ in range(probes)]
    max_at = max(abs(v) for v in at_points)
    checks = [
        _check("symbol_vanishes_at_points", max_at, SYMBOL_TOL),
        _check("symbol_nonnegative", -min(off), SYMBOL_TOL),
        _check("kernel_projector_equals_range", proj_dist, tol.equality_tol),
    ]
    return {
        "experiment": "covariant",
        "status": "recovered" if all(c["passed"] for c in checks) else "not_recovered",
        "passed": all(c["passed"] for c in checks),
        "dims": {"product": product.dim, "points": m, "kernel": ker.rank, "range_sigma": ran_sigma.rank},
        "symbol_at_points": at_points,
        "symbol_random_min": float(min(off)),
        "symbol_random_median": float(np.median(off)),
        "distances": {"projector": proj_dist, "state": state_dist},
        "checks": checks,
    }


def _sum_distributivity_instance(rng: np.random.Generator, tol: float) -> float:
    n = int(rng.integers(4, 21))
    a = int(rng.integers(1, n))
    b = int(rng.integers(1, n - a + 1))
    big_w = sub.random_subspace(n, a, rng)
    big_v = sub.random_subspace(n, b, rng)
    m = int(rng.integers(1, 5))

    def family(host: Subspace, r: int):
        common = sub.random_subspace(n, int(rng.integers(0, r + 1)), rng, inside=host)
        out = []
        for _ in range(m):
            extra = sub.random_subspace(n, int(rng.integers(0, r - common.rank + 1)), rng, inside=host)
            out.append(sub.sum([common, extra]))
        return out

    ws, vs = family(big_w, a), family(big_v, b)
    lhs = sub.intersect([sub.sum([w, v]) for w, v in zip(ws, vs)])
    rhs = sub.sum([sub.intersect(ws), sub.intersect(vs)])
    return sub.distance(lhs, rhs)


def _tensor_distributivity_instance(rng: np.random.Generator) -> float:
    na = int(rng.integers(2, 7))
    nb = int(rng.integers(1, 5))
    m = int(rng.integers(1, 5))
    common = sub.random_subspace(na, int(rng.integers(0, na + 1)), rng)
    vs = []
    for _ in range(m):
        extra = sub.random_subspace(na, int(rng.integers(0, na - common.rank + 1)), rng)
        vs.append(sub.sum([common, extra]))
    w = sub.random_subspace(nb, int(rng.integers(1, nb + 1)), rng)
    lhs = sub.intersect([sub.tensor(v, w) for v in vs])
    rhs = sub.tensor(sub.intersect(vs), w)
    return sub.distance(lhs, rhs)


def counterexample_dims() -> dict:
    """(H1+H2) & (H1+H3) versus H1 + (H2 & H3) in C^2, float and exact."""
    h1 = sub.from_spanning([[1, 0]], 2)
    h2 = sub.from_spanning([[0, 1]], 2)
    h3 = sub.from_spanning([[1, 1]], 2)
    lhs = sub.intersect([sub.sum([h1, h2]), sub.sum([h1, h3])])
    rhs = sub.sum([h1, sub.intersect([h2, h3])])
    w = (1, 1)
    e1, e2, e3 = (exact.span([[exact.gaussian_rational(c) for c in v]], w) for v in ([1, 0], [0, 1], [1, 1]))
    ex_lhs = exact.intersect([exact.add([e1, e2]), exact.add([e1, e3])])
    ex_rhs = exact.add([e1, exact.intersect([e2, e3])])
    return {"float": {"lhs": lhs.rank, "rhs": rhs.rank}, "exact": {"lhs": ex_lhs.dim, "rhs": ex_rhs.dim}}


def run_lemma_probes(seed: int, trials: int, tol: float = 1e-9) -> dict:
    """Random instances of the two distributivity lemmas plus the C^2 counterexample."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    a1 = [_sum_distributivity_instance(np.random.default_rng([seed, 1, t]), tol) for t in range(trials)]
    l32 = [_tensor_distributivity_instance(np.random.default_rng([seed, 2, t])) for t in range(trials)]
    ce = counterexample_dims()
    ce_ok = ce["float"] == {"lhs": 2, "rhs": 1} and ce["exact"] == {"lhs": 2, "rhs": 1}
    checks = [
        _check("sum_distributes_over_intersection", max(a1), tol),
        _check("tensor_distributes_over_intersection", max(l32), tol),
        _check("counterexample_dims", 0.0 if ce_ok else 1.0, 0.0, passed=ce_ok, relation="=="),
    ]
    return {
        "experiment": "lemmas",
        "status": "equal" if all(c["passed"] for c in checks) else "unequal",
        "passed": all(c["passed"] for c in checks),
        "trials": trials,
        "lemma_sum": {"failures": int(sum(d > tol for d in a1)), "max_distance": max(a1)},
        "lemma_tensor": {"failures": int(sum(d > tol for d in l32)), "max_distance": max(l32)},
        "counterexample": ce,
        "checks": checks,
    }
