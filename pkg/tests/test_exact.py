from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qklab import exact
from qklab.acceptance import oracle_agreement, rational_union_scenario
from qklab.errors import DimensionMismatch, IrrationalInput, TooManyProducts
from qklab.sections import product_space, space


def test_exact_kernel_examples():
    assert exact.exact_kernel([[1, 0, 0, 0]])[0] == 3
    n, basis = exact.exact_kernel([[1, 0, 0, 0], [0, 0, 1, 1]])
    assert n == 2
    # each basis vector satisfies both rows exactly
    for b in basis:
        assert b[0] == exact.ZERO and b[2] + b[3] == exact.ZERO
    assert exact.exact_kernel([[0, 0, 0]] * 2)[0] == 3


def test_gaussian_rational_rule():
    assert exact.gaussian_rational(0.5) == exact.QQ_I(Fraction(1, 2), 0)
    assert exact.gaussian_rational(1 / 3 + 2j) == exact.QQ_I(Fraction(1, 3), 2)
    assert exact.gaussian_rational([3, -1]) == exact.QQ_I(3, -1)
    with pytest.raises(IrrationalInput):
        exact.gaussian_rational(np.sqrt(2))
    with pytest.raises(IrrationalInput):
        exact.gaussian_rational(float("nan"))


@given(st.integers(0, 2**32 - 1))
def test_exact_complement_dimension(seed):
    rng = np.random.default_rng(seed)
    sp = space(int(rng.integers(1, 3)), int(rng.integers(1, 4)))
    rows = [[complex(int(a), int(b)) for a, b in rng.integers(-2, 3, size=(sp.dim, 2))]
            for _ in range(int(rng.integers(1, sp.dim + 1)))]
    s = exact.span([[exact.gaussian_rational(v) for v in r] for r in rows], exact.space_weights(sp))
    assert s.dim + exact.complement(s).dim == sp.dim
    assert exact.intersect([s, exact.complement(s)]).dim == 0


def test_certify_examples():
    ps = product_space(1, 1, 1, 1)
    probe = exact.certify_union(ps, [([[1, 0]], [[1, 0]]), ([[0, 1]], [[1, 1]])])
    assert (probe.lhs_dim, probe.rhs_dim, probe.verdict) == (2, 0, "strict_containment")
    assert probe.contained
    antipodal = exact.certify_union(ps, [([[1, 0]], [[1, 0]]), ([[0, 1]], [[0, 1]])])
    assert (antipodal.lhs_dim, antipodal.rhs_dim, antipodal.verdict) == (2, 2, "equal")
    assert [antipodal.summand_dims[k] for k in ("{}", "{1}", "{2}", "{1,2}")] == [0, 1, 1, 0]
    single = exact.certify_union(product_space(2, 2, 1, 2), [([[1, 2, 0], [0, 1, 1j]], [[1, 3]])])
    assert single.verdict == "equal"


def test_certify_json_integers():
    ps = product_space(1, 1, 1, 1)
    js = exact.certify_union(ps, [([[1, 0]], [[1, 0]])]).to_json()
    assert set(js) >= {"lhs_dim", "rhs_dim", "H_dims", "K_dims", "summand_dims", "verdict"}
    assert all(isinstance(v, int) for v in js["H_dims"].values())


def test_certify_caps_and_irrational():
    ps = product_space(1, 1, 1, 1)
    with pytest.raises(IrrationalInput):
        exact.certify_union(ps, [([[1, np.sqrt(2)]], [[1, 0]])])
    with pytest.raises(TooManyProducts):
        exact.certify_union(ps, [([[1, 0]], [[1, 0]])] * 13)
    with pytest.raises(DimensionMismatch):
        exact.certify_union(product_space(2, 3, 2, 3), [([[1, 0, 0]], [[1, 0, 0]])])


def test_float_pipeline_agrees_with_oracle():
    for t in range(10):
        r = oracle_agreement(rational_union_scenario(np.random.default_rng([11, t])))
        assert r["agree"] or r["flagged"]
