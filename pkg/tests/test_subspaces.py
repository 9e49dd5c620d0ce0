import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qklab import subspaces as sub
from qklab.errors import DimensionMismatch, ZeroSubspace

seeds = st.integers(0, 2**32 - 1)


def _rand(rng, n, r):
    return sub.random_subspace(n, r, rng)


def _frame_ok(s):
    g = s.frame.conj().T @ s.frame
    return s.rank == 0 or np.max(np.abs(g - np.eye(s.rank))) < 1e-12


def test_from_spanning_examples():
    assert sub.from_spanning([[1, 0], [2, 0]], 2).rank == 1
    assert sub.from_spanning([], 2).rank == 0
    assert sub.from_spanning([[1, 0], [0, 1], [1, 1]], 2).rank == 2


def test_complement_examples():
    c = sub.complement(sub.from_spanning([[1, 0]], 2))
    assert sub.equal(c, sub.from_spanning([[0, 1]], 2))[0]
    assert sub.complement(sub.zero(3)).rank == 3
    assert sub.complement(sub.full(3)).rank == 0


@given(seeds, st.integers(1, 12))
def test_complement_rank_identity(seed, n):
    rng = np.random.default_rng(seed)
    s = _rand(rng, n, int(rng.integers(0, n + 1)))
    c = sub.complement(s)
    assert s.rank + c.rank == n
    assert _frame_ok(s) and _frame_ok(c)
    if s.rank and c.rank:
        assert sub.max_cross_gram(s, c) < 1e-12


def test_intersect_counterexample():
    h1, h2, h3 = (sub.from_spanning([v], 2) for v in ([1, 0], [0, 1], [1, 1]))
    assert sub.intersect([sub.sum([h1, h2]), sub.sum([h1, h3])]).rank == 2
    assert sub.sum([h1, sub.intersect([h2, h3])]).rank == 1


def test_intersect_examples(rng):
    s = _rand(rng, 5, 3)
    assert sub.equal(sub.intersect([s, s]), s)[0]
    for _ in range(20):
        assert sub.intersect([_rand(rng, 2, 1), _rand(rng, 2, 1)]).rank == 0


@given(seeds)
def test_grassmann_formula(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 10))
    common = _rand(rng, n, int(rng.integers(0, n // 2 + 1)))
    a = sub.sum([common, _rand(rng, n, int(rng.integers(0, n // 2 + 1)))])
    b = sub.sum([common, _rand(rng, n, int(rng.integers(0, n // 2 + 1)))])
    assert sub.sum([a, b]).rank == a.rank + b.rank - sub.intersect([a, b]).rank


def test_sum_examples(rng):
    assert sub.sum([sub.from_spanning([[1, 0]], 2), sub.from_spanning([[0, 1]], 2)]).rank == 2
    s = _rand(rng, 4, 2)
    assert sub.equal(sub.sum([s, sub.zero(4)]), s)[0]


def test_tensor_examples(rng):
    a, b = _rand(rng, 3, 2), _rand(rng, 4, 1)
    t = sub.tensor(a, b)
    assert t.ambient_dim == 12 and t.rank == 2
    assert sub.tensor(a, sub.zero(4)).rank == 0
    # projector of a tensor product is the Kronecker product of projectors
    assert_allclose(t.projector, np.kron(a.projector, b.projector), atol=1e-13)


@given(seeds)
def test_tensor_distributes_over_intersection(seed):
    rng = np.random.default_rng(seed)
    na, nb = int(rng.integers(2, 6)), int(rng.integers(1, 4))
    common = _rand(rng, na, int(rng.integers(0, na)))
    vs = [sub.sum([common, _rand(rng, na, int(rng.integers(0, na - common.rank + 1)))]) for _ in range(3)]
    w = _rand(rng, nb, int(rng.integers(1, nb + 1)))
    lhs = sub.intersect([sub.tensor(v, w) for v in vs])
    assert sub.distance(lhs, sub.tensor(sub.intersect(vs), w)) < 1e-9


def test_equal_examples(rng):
    s = _rand(rng, 5, 2)
    ok, d = sub.equal(s, s)
    assert ok and d < 1e-12
    ok, d = sub.equal(sub.from_spanning([[1, 0]], 2), sub.from_spanning([[0, 1]], 2))
    assert not ok and abs(d - np.sqrt(2)) < 1e-14
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    mixed = sub.from_columns(s.frame @ q)
    assert sub.equal(s, mixed)[0]


def test_equal_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        sub.equal(sub.full(2), sub.full(3))


def test_principal_angles_examples(rng):
    s = _rand(rng, 4, 2)
    assert_allclose(sub.principal_angles(s, s), 0, atol=1e-7)
    e0, e1 = sub.from_spanning([[1, 0]], 2), sub.from_spanning([[0, 1]], 2)
    assert_allclose(sub.principal_angles(e0, e1), [np.pi / 2])
    assert_allclose(sub.principal_angles(e0, sub.from_spanning([[1, 1]], 2)), [np.pi / 4])
    with pytest.raises(ZeroSubspace):
        sub.principal_angles(e0, sub.zero(2))


def test_contains_examples(rng):
    a, b = _rand(rng, 6, 2), _rand(rng, 6, 3)
    assert sub.contains(sub.full(6), a)[0]
    assert not sub.contains(sub.zero(6), a)[0]
    assert sub.contains(sub.sum([a, b]), a)[0]


def test_rank_decision_and_conditioning_flag():
    # a direction at relative scale 1e-11 sits inside the guard band
    s = sub.from_spanning([[1, 0, 0], [0, 1e-11, 0]], 3)
    assert s.rank == 1 and s.ill_conditioned
    clean = sub.from_spanning([[1, 0, 0], [0, 1e-3, 0]], 3)
    assert clean.rank == 2 and not clean.ill_conditioned
    # the flag survives further operations
    assert sub.complement(s).ill_conditioned
    assert sub.sum([s, clean]).ill_conditioned
