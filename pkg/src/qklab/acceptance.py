"""Acceptance criteria runner shared by the test suite and ``qklab selftest``.

Every criterion returns a :class:`CriterionResult`. Trials are independent
jobs whose generators are keyed by (seed, criterion, trial index), so
results do not depend on the thread count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import exact
from . import subspaces as sub
from .lab import (
    Tolerances,
    UnionScenario,
    counterexample_dims,
    predicted_union_decomposition,
    random_unit_section,
    run_covariant_recovery,
    run_lemma_probes,
    run_product_check,
    run_separability_report,
    run_union_check,
    run_zero_set_recovery,
)
from .projective import random_point
from .restriction import product_kernel
from .sections import SectionSpace, SectionVector, eval_vector, product_space, space

DEGREES = (1, 2, 3)
DIMS = (1, 2)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.name}: {_summary(self.detail)}"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}


def _summary(detail: dict) -> str:
    parts = []
    for k, v in detail.items():
        if isinstance(v, (dict, list)):
            continue
        parts.append(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}")
    return ", ".join(parts)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QKLAB_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable[[int], object], count: int, threads: int | None = None) -> list:
    """Map ``fn`` over trial indices; output order is the index order."""
    threads = threads or thread_count()
    if threads == 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def _rng(seed: int, criterion: int, trial: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, criterion, trial])


def random_model(rng: np.random.Generator):
    d1, d2 = (int(rng.choice(DIMS)) for _ in range(2))
    k1, k2 = (int(rng.choice(DEGREES)) for _ in range(2))
    return product_space(d1, k1, d2, k2)


def _random_points(rng, sp: SectionSpace, count: int | None = None):
    count = count if count is not None else int(rng.integers(1, sp.dim + 1))
    return [random_point(sp.d, rng) for _ in range(count)]


def random_product_scenario(rng: np.random.Generator, tolerances: Tolerances | None = None) -> UnionScenario:
    ps = random_model(rng)
    pair = (_random_points(rng, ps.space_a), _random_points(rng, ps.space_b))
    return UnionScenario(ps, [pair], tolerances or Tolerances())


def random_union_scenario(rng: np.random.Generator, max_n: int = 3, shared: str | None = None,
                          tolerances: Tolerances | None = None) -> UnionScenario:
    """Union of n <= max_n random products; ``shared`` in {None, "U", "V"} reuses one factor set."""
    ps = random_model(rng)
    n = int(rng.integers(1, max_n + 1)) if shared is None else int(rng.integers(2, max_n + 1))
    u_common, v_common = _random_points(rng, ps.space_a), _random_points(rng, ps.space_b)
    pairs = []
    for _ in range(n):
        u = u_common if shared == "U" else _random_points(rng, ps.space_a)
        v = v_common if shared == "V" else _random_points(rng, ps.space_b)
        pairs.append((u, v))
    return UnionScenario(ps, pairs, tolerances or Tolerances())


def generic_probe() -> UnionScenario:
    ps = product_space(1, 1, 1, 1)
    return UnionScenario(ps, [([[1, 0]], [[1, 0]]), ([[0, 1]], [[1, 1]])])



# criterion 1 ---------------------------------------------------------------

def product_scenarios(seed: int, count: int = 200) -> list[UnionScenario]:
    return [random_product_scenario(_rng(seed, 1, t)) for t in range(count)]


def criterion_1(seed: int = 0, count: int = 200, time_limit: float = 60.0) -> CriterionResult:
    start = time.perf_counter()
    reports = parallel_map(lambda t: run_product_check(random_product_scenario(_rng(seed, 1, t))), count)
    elapsed = time.perf_counter() - start
    kernel = max(r["distances"]["kernel"] for r in reports)
    perp = max(r["distances"]["kernel_perp_tensor"] for r in reports)
    passed = kernel < 1e-8 and perp < 1e-8 and elapsed < time_limit
    return CriterionResult(1, "product kernel decomposition", passed, {
        "trials": count, "max_kernel_distance": kernel, "max_perp_tensor_distance": perp,
        "seconds": round(elapsed, 2), "flagged": sum(r["ill_conditioned"] for r in reports)})


# criterion 2 ---------------------------------------------------------------

def union_scenarios(seed: int, count: int = 200) -> list[UnionScenario]:
    return [random_union_scenario(_rng(seed, 2, t)) for t in range(count)]


def criterion_2(seed: int = 0, count: int = 200) -> CriterionResult:
    reports = parallel_map(lambda t: run_union_check(random_union_scenario(_rng(seed, 2, t)), exact_oracle=False),
                           count)
    resid = max(r["distances"]["containment_residual"] for r in reports)
    ortho = max(r["distances"]["k_orthogonality"] for r in reports)
    statuses = [r["status"] for r in reports]
    return CriterionResult(2, "union containment and K orthogonality", resid < 1e-8 and ortho < 1e-8, {
        "trials": count, "max_containment_residual": resid, "max_cross_gram": ortho,
        "equal": statuses.count("equal"), "strict_containment": statuses.count("strict_containment"),
        "ill_conditioned": statuses.count("ill_conditioned")})


# criterion 3 ---------------------------------------------------------------

def reducible_scenarios(seed: int, count: int = 50) -> list[UnionScenario]:
    return ([random_union_scenario(_rng(seed, 3, t), shared="V") for t in range(count)]
            + [random_union_scenario(_rng(seed, 3, count + t), shared="U") for t in range(count)])


def criterion_3(seed: int = 0, count: int = 50) -> CriterionResult:
    scenarios = reducible_scenarios(seed, count)
    reports = parallel_map(lambda i: run_union_check(scenarios[i], exact_oracle=False), len(scenarios))
    dist = [r["distances"]["equality"] for r in reports]
    shared_v, shared_u = max(dist[:count]), max(dist[count:])
    return CriterionResult(3, "union equality on reducible families", max(dist) < 1e-8, {
        "trials": len(dist), "max_distance_shared_V": shared_v, "max_distance_shared_U": shared_u,
        "failures_shared_V": sum(d >= 1e-8 for d in dist[:count]),
        "failures_shared_U": sum(d >= 1e-8 for d in dist[count:])})


# criterion 4 ---------------------------------------------------------------

def criterion_4() -> CriterionResult:
    report = run_union_check(generic_probe(), exact_oracle=True)
    cert = report["exact_certificate"]
    dims = report["dims"]
    passed = (dims["lhs"] == 2 and dims["rhs"] == 0 and report["status"] == "strict_containment"
              and cert.get("lhs_dim") == 2 and cert.get("rhs_dim") == 0
              and cert.get("verdict") == "strict_containment")
    return CriterionResult(4, "generic two-product probe", passed, {
        "lhs": dims["lhs"], "rhs": dims["rhs"], "status": report["status"],
        "exact_lhs": cert.get("lhs_dim"), "exact_rhs": cert.get("rhs_dim"), "exact_verdict": cert.get("verdict")})


# criterion 5 ---------------------------------------------------------------

def _separability_summary(scenario: UnionScenario, rng) -> dict:
    r = run_separability_report(scenario, rng=rng)
    return {
        "pt_ker": r["kernel"]["pt_min_eig"], "pt_perp": r["kernel_perp"]["pt_min_eig"],
        "ext_ker": r["kernel"]["extraction"]["success"], "ext_perp": r["kernel_perp"]["extraction"]["success"],
        "res_ker": r["kernel"]["extraction"]["max_residual"],
        "res_perp": r["kernel_perp"]["extraction"]["max_residual"],
    }


def _separability_ok(s: dict) -> bool:
    return (s["pt_ker"] >= -1e-10 and s["pt_perp"] >= -1e-10 and s["ext_ker"] and s["ext_perp"]
            and s["res_ker"] < 1e-6 and s["res_perp"] < 1e-6)


def criterion_5(seed: int = 0, counts: tuple[int, int, int] = (200, 200, 50)) -> CriterionResult:
    groups = {
        "product": product_scenarios(seed, counts[0]),
        "union": union_scenarios(seed, counts[1]),
        "reducible": reducible_scenarios(seed, counts[2]),
    }
    detail: dict = {}
    failures: dict[str, list[int]] = {}
    worst_pt = 0.0
    all_ok = True
    for g, (name, scenarios) in enumerate(groups.items()):
        sums = parallel_map(lambda i: _separability_summary(scenarios[i], _rng(seed, 50 + g, i)), len(scenarios))
        bad = [i for i, s in enumerate(sums) if not _separability_ok(s)]
        failures[name] = bad
        detail[f"{name}_failures"] = len(bad)
        # failures carrying a negative partial transpose are genuine entanglement, not search misses
        detail[f"{name}_pt_witnessed"] = sum(min(sums[i]["pt_ker"], sums[i]["pt_perp"]) < -1e-10 for i in bad)
        detail[f"{name}_trials"] = len(scenarios)
        worst_pt = min([worst_pt] + [min(s["pt_ker"], s["pt_perp"]) for s in sums])
        all_ok &= not bad
    probe = run_separability_report(generic_probe(), rng=_rng(seed, 55))
    probe_ok = probe["kernel"]["extraction"]["success"]
    detail["probe_kernel_extraction"] = probe_ok
    detail["min_pt_eigenvalue"] = worst_pt
    detail["failing_indices"] = failures
    return CriterionResult(5, "separability of kernel states", all_ok and probe_ok, detail)


# criterion 6 ---------------------------------------------------------------

def bell_section():
    ps = product_space(1, 1, 1, 1)
    c = np.zeros(ps.dim, dtype=complex)
    # basis order (1,0),(0,1) on each factor: z0 w1 at (0,1), z1 w0 at (1,0)
    c[ps.index(0, 1)] = 1 / np.sqrt(2)
    c[ps.index(1, 0)] = -1 / np.sqrt(2)
    return ps, c


def non_reduced_probe():
    ps = product_space(1, 2, 1, 2)
    c = np.zeros(ps.dim, dtype=complex)
    c[ps.index(0, 0)] = 1.0
    return ps, c


def non_reduced_exact_rank() -> int:
    """Exact kernel dimension for rational samples on both zero-set components."""
    ps, _ = non_reduced_probe()
    pts = [([0, 1], [a, 1]) for a in (0, 1, 2, 3, -1)] + [([a, 1], [0, 1]) for a in (0, 1, 2, 3, -1)]
    pts += [([0, 1], [1, b]) for b in (2, 5)] + [([1, b], [0, 1]) for b in (2, 5)]
    return exact.product_kernel(ps, pts).dim


def criterion_6(seed: int = 0, per_degree: int = 20) -> CriterionResult:
    detail: dict = {}
    ok = True
    for k in (1, 2, 3):
        ps = product_space(1, k, 1, k)

        def one(t, ps=ps, k=k):
            rng = _rng(seed, 60 + k, t)
            return run_zero_set_recovery(random_unit_section(ps, rng), ps, rng)
        reports = parallel_map(one, per_degree)
        worst = min((r["fidelity"] if r["fidelity"] is not None else 0.0) for r in reports)
        ranks_ok = all(r["dims"]["kernel"] == 1 for r in reports)
        detail[f"min_fidelity_k{k}"] = worst
        ok &= ranks_ok and worst >= 1 - 1e-8

    ps, c = bell_section()
    bell = run_zero_set_recovery(c, ps, _rng(seed, 64))
    ext_ok = bell["kernel_extraction"]["success"]
    bell_ok = bell["dims"]["kernel"] == 1 and abs(bell["pt_min_eig_kernel"] + 0.5) < 1e-8 and not ext_ok
    detail["bell_pt_min_eig"] = bell["pt_min_eig_kernel"]
    detail["bell_extraction_success"] = ext_ok

    ps, c = non_reduced_probe()
    nr = run_zero_set_recovery(c, ps, _rng(seed, 66))
    exact_rank = non_reduced_exact_rank()
    nr_ok = nr["dims"]["kernel"] == 4 and exact_rank == 4 and nr["status"] == "boundary_non_reduced"
    detail["non_reduced_rank"] = nr["dims"]["kernel"]
    detail["non_reduced_exact_rank"] = exact_rank
    detail["non_reduced_status"] = nr["status"]
    return CriterionResult(6, "zero-set recovery", ok and bell_ok and nr_ok, detail)


# criterion 7 ---------------------------------------------------------------

def criterion_7(seed: int = 0) -> CriterionResult:
    detail: dict = {}
    ok = True
    for bideg in ((1, 1), (2, 1)):
        ps = product_space(1, bideg[0], 1, bideg[1])
        for m in (1, 2, 3):
            rng = _rng(seed, 7, 10 * bideg[0] + m)
            pts = [(random_point(1, rng), random_point(1, rng)) for _ in range(m)]
            r = run_covariant_recovery(pts, ps, rng)
            key = f"({bideg[0]},{bideg[1]})_m{m}"
            detail[key] = {"symbol_at_points": max(abs(v) for v in r["symbol_at_points"]),
                           "symbol_min": r["symbol_random_min"], "projector_distance": r["distances"]["projector"]}
            ok &= (detail[key]["symbol_at_points"] < 1e-12 and r["symbol_random_min"] >= -1e-12
                   and r["distances"]["projector"] < 1e-8)
    worst = max(v["projector_distance"] for v in detail.values())
    detail["max_projector_distance"] = worst
    return CriterionResult(7, "covariant symbol recovery", ok, detail)


# criterion 8 ---------------------------------------------------------------

def criterion_8(seed: int = 0, trials: int = 100) -> CriterionResult:
    r = run_lemma_probes(seed, trials)
    ce = counterexample_dims()
    return CriterionResult(8, "distributivity lemmas", r["passed"], {
        "trials": trials, "max_sum_distance": r["lemma_sum"]["max_distance"],
        "max_tensor_distance": r["lemma_tensor"]["max_distance"],
        "counterexample": f"{ce['exact']['lhs']} vs {ce['exact']['rhs']}"})


# criterion 9 ---------------------------------------------------------------

def _small_gaussian_point(rng, d: int) -> list[complex]:
    while True:
        re = rng.integers(-3, 4, size=d + 1)
        im = rng.integers(-2, 3, size=d + 1)
        if np.any(re) or np.any(im):
            return [complex(int(a), int(b)) for a, b in zip(re, im)]


def rational_union_scenario(rng: np.random.Generator, max_ambient: int = 36) -> UnionScenario:
    while True:
        ps = random_model(rng)
        if ps.dim <= max_ambient:
            break
    n = int(rng.integers(1, 4))
    pairs = []
    for _ in range(n):
        u = [_small_gaussian_point(rng, ps.space_a.d) for _ in range(int(rng.integers(1, ps.space_a.dim + 1)))]
        v = [_small_gaussian_point(rng, ps.space_b.d) for _ in range(int(rng.integers(1, ps.space_b.dim + 1)))]
        pairs.append((u, v))
    return UnionScenario(ps, pairs)


def oracle_agreement(scenario: UnionScenario) -> dict:
    """Compare float and exact dims of lhs, rhs and every H_S, K_S."""
    ps = scenario.product
    lhs = product_kernel(ps, scenario.lambda_set(), scenario.tolerances.rank_tol)
    summands = predicted_union_decomposition(scenario)
    rhs = sub.sum([s.tensor for s in summands])
    cert = exact.certify_union(ps, scenario.pairs)
    float_dims = {"lhs": lhs.rank, "rhs": rhs.rank,
                  "H": {s.label: s.h_part.rank for s in summands},
                  "K": {s.label: s.k_part.rank for s in summands}}
    exact_dims = {"lhs": cert.lhs_dim, "rhs": cert.rhs_dim, "H": cert.h_dims, "K": cert.k_dims}
    flagged = (lhs.ill_conditioned or rhs.ill_conditioned
               or any(s.h_part.ill_conditioned or s.k_part.ill_conditioned for s in summands))
    agree = float_dims == exact_dims
    return {"agree": agree, "flagged": flagged, "ok": agree or flagged,
            "float": float_dims, "exact": exact_dims, "ambient": ps.dim}


def criterion_9(seed: int = 0, count: int = 50) -> CriterionResult:
    results = parallel_map(lambda t: oracle_agreement(rational_union_scenario(_rng(seed, 9, t))), count)
    silent = [i for i, r in enumerate(results) if not r["ok"]]
    return CriterionResult(9, "float vs exact oracle dims", not silent, {
        "trials": count, "agree": sum(r["agree"] for r in results),
        "flagged": sum(r["flagged"] for r in results), "silent_disagreements": len(silent),
        "max_ambient": max(r["ambient"] for r in results)})


# criterion 10 --------------------------------------------------------------

def polynomial_value(sp: SectionSpace, coeffs, x) -> complex:
    """s(x) term by term from the exponents; independent of the basis_values path."""
    total = 0j
    for c, alpha in zip(coeffs, sp.basis):
        term = complex(c) / math.sqrt(math.prod(math.factorial(a) for a in alpha))
        for xi, a in zip(x, alpha):
            term *= complex(xi) ** a
        total += term
    return total


def reproducing_error(rng: np.random.Generator) -> float:
    sp = space(int(rng.integers(1, 4)), int(rng.integers(1, 5)))
    s = SectionVector(sp, rng.standard_normal(sp.dim) + 1j * rng.standard_normal(sp.dim))
    x = random_point(sp.d, rng)
    return abs(np.vdot(eval_vector(sp, x).coeffs, s.coeffs) - polynomial_value(sp, s.coeffs, x.coords))


def criterion_10(seed: int = 0, count: int = 500) -> CriterionResult:
    errs = [reproducing_error(_rng(seed, 10, t)) for t in range(count)]
    return CriterionResult(10, "reproducing property", max(errs) < 1e-10,
                           {"trials": count, "max_error": float(max(errs))})


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: lambda seed=0: criterion_4(),
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def run_all(seed: int = 0, numbers=None) -> list[CriterionResult]:
    return [CRITERIA[n](seed=seed) for n in (numbers or sorted(CRITERIA))]
