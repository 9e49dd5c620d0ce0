import numpy as np
import pytest
from numpy.testing import assert_allclose

from qklab import subspaces as sub
from qklab.acceptance import bell_section, generic_probe, non_reduced_exact_rank, non_reduced_probe
from qklab.errors import DependentCoherentStates, TooManyProducts
from qklab.lab import (
    UnionScenario,
    counterexample_dims,
    predicted_product_kernel,
    predicted_union_decomposition,
    random_unit_section,
    run_covariant_recovery,
    run_lemma_probes,
    run_product_check,
    run_separability_report,
    run_union_check,
    run_zero_set_recovery,
)
from qklab.projective import random_point
from qklab.restriction import kernel_of_restriction, product_kernel
from qklab.sections import product_space, space

PS11 = product_space(1, 1, 1, 1)


def antipodal():
    return UnionScenario(PS11, [([[1, 0]], [[1, 0]]), ([[0, 1]], [[0, 1]])])


def test_predicted_product_kernel_examples():
    ku = kernel_of_restriction(space(1, 1), [[1, 0]])
    kv = kernel_of_restriction(space(1, 1), [[1, 0]])
    pred = predicted_product_kernel(ku, kv, PS11)
    assert pred.rank == 3
    assert sub.equal(pred, product_kernel(PS11, [([1, 0], [1, 0])]))[0]
    assert predicted_product_kernel(sub.zero(2), sub.full(2), PS11).rank == 4
    assert predicted_product_kernel(sub.zero(2), sub.zero(2), PS11).rank == 0


def test_product_check_examples(rng):
    r = run_product_check(UnionScenario(PS11, [([[1, 0]], [[1, 0]])]))
    assert r["passed"] and r["status"] == "equal" and r["dims"]["predicted_kernel"] == 3
    ps = product_space(2, 2, 1, 3)
    u = [random_point(2, rng) for _ in range(ps.space_a.dim)]
    r = run_product_check(UnionScenario(ps, [(u, [random_point(1, rng)])]))
    assert r["dims"]["ker_U"] == 0 and r["passed"]
    assert r["dims"]["predicted_kernel"] == ps.space_a.dim * (ps.space_b.dim - 1)


def test_union_decomposition_shapes():
    sc = UnionScenario(PS11, [([[1, 0]], [[1, 2]])])
    summands = predicted_union_decomposition(sc)
    assert [s.label for s in summands] == ["{}", "{1}"]
    assert summands[0].h_part.rank == 2
    pred = predicted_product_kernel(summands[1].h_part, summands[0].k_part, PS11)
    assert sub.equal(sub.sum([s.tensor for s in summands]), pred)[0]
    summands = predicted_union_decomposition(antipodal())
    assert [s.label for s in summands] == ["{}", "{1}", "{2}", "{1,2}"]
    assert [s.tensor.rank for s in summands] == [0, 1, 1, 0]
    for s in summands:
        assert s.tensor.rank == s.h_part.rank * s.k_part.rank


def test_too_many_products():
    sc = UnionScenario(PS11, [([[1, j]], [[1, 0]]) for j in range(13)])
    with pytest.raises(TooManyProducts):
        predicted_union_decomposition(sc)


def test_union_check_antipodal_and_reducible(rng):
    r = run_union_check(antipodal())
    assert r["status"] == "equal" and r["passed"]
    assert "exact_certificate" not in r
    ps = product_space(2, 2, 1, 2)
    v = [random_point(1, rng)]
    sc = UnionScenario(ps, [([random_point(2, rng)], v), ([random_point(2, rng) for _ in range(2)], v)])
    r = run_union_check(sc)
    assert r["status"] == "equal" and r["distances"]["equality"] < 1e-8


def test_union_check_generic_probe():
    r = run_union_check(generic_probe())
    assert r["status"] == "strict_containment" and not r["passed"]
    assert (r["dims"]["lhs"], r["dims"]["rhs"]) == (2, 0)
    assert r["distances"]["containment_residual"] < 1e-8
    cert = r["exact_certificate"]
    assert (cert["lhs_dim"], cert["rhs_dim"], cert["verdict"]) == (2, 0, "strict_containment")
    failed = [c for c in r["checks"] if not c["passed"]]
    assert [c["name"] for c in failed] == ["kernel_equals_decomposition"]
    assert failed[0]["measured"] > failed[0]["tolerance"]


def test_shared_u_family_is_not_reducible():
    # U1 = U2 gives Lambda = U x (V1 u V2), yet the union formula drops the kernel entirely
    sc = UnionScenario(PS11, [([[1, 0]], [[1, 0]]), ([[1, 0]], [[1, 1]])])
    r = run_union_check(sc)
    assert r["status"] == "strict_containment"
    assert r["exact_certificate"]["lhs_dim"] == 2 and r["exact_certificate"]["rhs_dim"] == 0
    # the product formula with the merged V set is still right
    assert run_product_check(UnionScenario(PS11, [([[1, 0]], [[1, 0], [1, 1]])]))["passed"]


def test_separability_examples(rng):
    sc = UnionScenario(product_space(1, 2, 1, 2), [([random_point(1, rng)], [random_point(1, rng) for _ in range(2)])])
    r = run_separability_report(sc)
    assert r["status"] == "separable_certified"
    r = run_separability_report(generic_probe())
    assert r["kernel"]["extraction"]["success"]
    assert r["kernel"]["rank"] == 2


def test_two_point_union_is_entangled():
    # two generic points: both states are entangled, witnessed by the partial transpose
    sc = UnionScenario(PS11, [([[1, 0]], [[1, 0]]), ([[1, 1]], [[1, 2]])])
    r = run_separability_report(sc)
    assert r["status"] == "entangled_witnessed"
    assert r["kernel"]["pt_min_eig"] < -0.05 and r["kernel_perp"]["pt_min_eig"] < -0.05


def test_zero_set_singlet(rng):
    ps, c = bell_section()
    r = run_zero_set_recovery(c, ps, rng, sample_count=3)
    assert r["status"] == "recovered" and r["fidelity"] >= 1 - 1e-8
    assert_allclose(r["pt_min_eig_kernel"], -0.5, atol=1e-8)
    assert not r["kernel_extraction"]["success"]
    # the complement is the symmetric subspace, which is PPT
    assert r["pt_min_eig_kernel_perp"] > 0.1
    assert r["kernel_dims_sequence"][:3] == [3, 2, 1]


def test_zero_set_generic_bidegree_22(rng):
    ps = product_space(1, 2, 1, 2)
    for _ in range(5):
        r = run_zero_set_recovery(random_unit_section(ps, rng), ps, rng, sample_count=12)
        assert r["dims"]["kernel"] == 1 and r["fidelity"] >= 1 - 1e-8
        assert r["max_abs_s0_on_samples"] < 1e-9


def test_zero_set_non_reduced_boundary(rng):
    ps, c = non_reduced_probe()
    r = run_zero_set_recovery(c, ps, rng)
    assert r["dims"]["kernel"] == 4
    assert r["status"] == "boundary_non_reduced" and r["passed"]
    assert r["non_reduced_zero_set"]
    assert non_reduced_exact_rank() == 4


def test_covariant_examples(rng):
    ps = product_space(1, 2, 1, 1)
    x = (random_point(1, rng), random_point(1, rng))
    r = run_covariant_recovery([x], ps, rng)
    assert r["passed"] and r["distances"]["projector"] < 1e-10
    assert r["dims"]["range_sigma"] == ps.dim - 1
    pts = [(random_point(1, rng), random_point(1, rng)) for _ in range(2)]
    r = run_covariant_recovery(pts, PS11, rng)
    assert r["distances"]["state"] < 1e-8
    with pytest.raises(DependentCoherentStates):
        run_covariant_recovery([x, x], ps, rng)


def test_lemma_probes_and_counterexample():
    r = run_lemma_probes(seed=4, trials=30)
    assert r["passed"]
    assert counterexample_dims() == {"float": {"lhs": 2, "rhs": 1}, "exact": {"lhs": 2, "rhs": 1}}
    with pytest.raises(ValueError):
        run_lemma_probes(seed=0, trials=0)


def test_reports_are_deterministic():
    a = run_separability_report(generic_probe(), rng=np.random.default_rng(3))
    b = run_separability_report(generic_probe(), rng=np.random.default_rng(3))
    assert a == b
