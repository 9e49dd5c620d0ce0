import numpy as np
import pytest
from numpy.testing import assert_allclose

from qklab import subspaces as sub
from qklab.errors import DimensionMismatch, EmptySubset
from qklab.projective import canonical_lift, random_point
from qklab.restriction import (
    FiniteSubset,
    factor_subset,
    grid,
    kernel_of_restriction,
    kernel_perp,
    product_kernel,
    product_subset,
)
from qklab.sections import SectionVector, evaluate, product_eval_vector, product_space, space


def _span(vectors, n):
    return sub.from_spanning(vectors, n)


def test_finite_subset_dedup_and_empty():
    s = factor_subset([[1, 0], [2, 0], [0, 1j], [0, 1]])
    assert len(s) == 2
    with pytest.raises(EmptySubset):
        factor_subset([])
    p = product_subset([([1, 0], [1, 1]), ([3, 0], [2, 2])])
    assert len(p) == 1
    assert len(grid(factor_subset([[1, 0], [0, 1]]), factor_subset([[1, 1]], "factor_B"))) == 2


def test_factor_kernel_examples(rng):
    sp = space(1, 2)
    k = kernel_of_restriction(sp, [[1, 0]])
    assert k.rank == 2
    assert sub.equal(k, _span([[0, 1, 0], [0, 0, 1]], 3))[0]
    k = kernel_of_restriction(sp, [[1, 0], [0, 1]])
    assert sub.equal(k, _span([[0, 1, 0]], 3))[0]
    for _ in range(20):
        assert kernel_of_restriction(sp, [random_point(1, rng) for _ in range(3)]).rank == 0


def test_product_kernel_examples():
    ps = product_space(1, 1, 1, 1)
    assert product_kernel(ps, [([1, 0], [1, 0])]).rank == 3
    k = product_kernel(ps, [([1, 0], [1, 0]), ([0, 1], [0, 1])])
    # span{z0 w1, z1 w0}
    assert sub.equal(k, _span([[0, 1, 0, 0], [0, 0, 1, 0]], 4))[0]


def test_generic_points_kill_everything(rng):
    ps = product_space(2, 1, 1, 2)
    pts = [(random_point(2, rng), random_point(1, rng)) for _ in range(ps.dim)]
    assert product_kernel(ps, pts).rank == 0
    assert kernel_perp(ps, pts).rank == ps.dim


def test_kernel_vanishes_and_rank_matches_brute_force(rng):
    # oracle: the kernel is exactly the set of sections vanishing at the points,
    # and its dimension is dim minus the rank of the raw evaluation matrix
    for d, k, m in [(1, 3, 2), (2, 2, 4), (2, 3, 7), (3, 2, 5)]:
        sp = space(d, k)
        pts = [random_point(d, rng) for _ in range(m)]
        ker = kernel_of_restriction(sp, pts)
        rows = np.array([[np.prod(p.coords ** np.array(a)) for a in sp.basis] for p in pts])
        assert ker.rank == sp.dim - np.linalg.matrix_rank(rows)
        for col in ker.frame.T:
            assert max(abs(evaluate(sp, SectionVector(sp, col), p)) for p in pts) < 1e-12


def test_kernel_perp_singletons(rng):
    sp = space(2, 2)
    x = random_point(2, rng)
    kp = kernel_perp(sp, [x])
    assert kp.rank == 1
    ps = product_space(2, 2, 1, 1)
    y = random_point(1, rng)
    lhs = kernel_perp(ps, [(x, y)])
    rhs = sub.tensor(kp, kernel_perp(space(1, 1), [y]))
    assert sub.distance(lhs, rhs) < 1e-10
    assert_allclose(abs(np.vdot(lhs.frame[:, 0], product_eval_vector(ps, (x, y)).normalized().coeffs)), 1)


def test_side_mismatch():
    with pytest.raises(DimensionMismatch):
        kernel_perp(product_space(1, 1, 1, 1), FiniteSubset("factor_A", ([1, 0],)))
    with pytest.raises(DimensionMismatch):
        kernel_perp(space(1, 1), product_subset([([1, 0], [1, 0])]))


def test_lift_independence():
    sp = space(1, 3)
    a = kernel_of_restriction(sp, [[1, 2], [3j, 1]])
    b = kernel_of_restriction(sp, [canonical_lift([2, 4]), [-6, 2j]])
    assert sub.equal(a, b)[0]


def test_kernel_projectors_sum_to_identity(rng):
    # the identity holds for the projections; the normalized states differ by their traces
    ps = product_space(1, 2, 2, 1)
    pts = [(random_point(1, rng), random_point(2, rng)) for _ in range(4)]
    ker, perp = product_kernel(ps, pts), kernel_perp(ps, pts)
    assert_allclose(ker.projector + perp.projector, np.eye(ps.dim), atol=1e-12)
    assert ker.rank + perp.rank == ps.dim
