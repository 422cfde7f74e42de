import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nbinv import (
    GLPair,
    MatrixAlgebra,
    ScalarMatrixAlgebra,
    SwapAlgebra,
    UnitizedHTAlgebra,
    WienerAlgebra,
    build_elimination_pair,
    from_scalars,
    identity,
    matrix,
    nest,
    pad_matrix,
    unnest,
)
from nbinv.errors import (
    BadDimension,
    DimensionMismatch,
    OddDimension,
    ParseError,
    PivotNotUnit,
    SingularToWorkingPrecision,
)
from nbinv.matrix import (
    check_gl_equivalence,
    direct_sum_identity,
    dumps,
    interchange_pair,
    loads,
    mat_mul,
    mat_norm,
    matrix_from_json,
    matrix_to_json,
    permutation,
    reciprocal_condition,
    replay,
)

from conftest import random_scalar_matrix

M2 = ScalarMatrixAlgebra(2)
S1 = ScalarMatrixAlgebra(1)
seeds = st.integers(0, 2**32 - 1)


def test_sum_norm_examples():
    assert mat_norm(identity(S1, 2)) == 2
    assert mat_norm(MatrixAlgebra(S1, 3).zero()) == 0
    assert mat_norm(from_scalars([[3, 0], [0, 4j]])) == pytest.approx(7)


@given(seed=seeds)
def test_sum_norm_is_entry_sum_and_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    for base in (M2, WienerAlgebra(4), UnitizedHTAlgebra(6), SwapAlgebra()):
        t, s = MatrixAlgebra(base, 3).random(rng), MatrixAlgebra(base, 3).random(rng)
        assert t.norm() == pytest.approx(sum(t[j, k].norm() for j in range(3) for k in range(3)))
        assert (t * s).norm() <= t.norm() * s.norm() * (1 + 1e-12)


def test_identity_and_block_swap(rng):
    t = random_scalar_matrix(rng, 3)
    assert (t * t.algebra.unit() - t).norm() == 0
    a, b, c, d = (M2.random(rng) for _ in range(4))
    swap = matrix([[M2.zero(), M2.unit()], [M2.unit(), M2.zero()]])
    out = mat_mul(swap, matrix([[c, d], [a, b]]))
    assert (out - matrix([[a, b], [c, d]])).norm() == 0


@given(seed=seeds)
def test_product_matches_flattening(seed):
    rng = np.random.default_rng(seed)
    t, s = random_scalar_matrix(rng, 2), random_scalar_matrix(rng, 2)
    assert np.abs((t * s).flatten() - t.flatten() @ s.flatten()).max() < 1e-12


def test_mismatched_sizes_rejected():
    with pytest.raises(DimensionMismatch):
        mat_mul(identity(M2, 2), identity(M2, 3))
    with pytest.raises(BadDimension):
        matrix([[M2.unit(), M2.unit()]])


def test_gl_equivalence(rng):
    t = random_scalar_matrix(rng, 2, k=1)
    a, b, c, d = t[0, 0], t[0, 1], t[1, 0], t[1, 1]
    ident = GLPair.identity(t.algebra)
    assert check_gl_equivalence(t, t, ident, 1e-12)
    pair = interchange_pair(t, rows=(0, 1))
    assert check_gl_equivalence(t, matrix([[c, d], [a, b]]), pair, 1e-12)
    v, w = random_scalar_matrix(rng, 2, shift=3), random_scalar_matrix(rng, 2, shift=3)
    t = random_scalar_matrix(rng, 2)
    vi = t.algebra.element(t.algebra.invert(v.payload))
    wi = t.algebra.element(t.algebra.invert(w.payload))
    pair = GLPair(v, w, vi, wi)
    s = v * t * w
    assert check_gl_equivalence(t, s, pair, 1e-10)
    bump = s.replace(0, 0, s[0, 0] + M2.scalar(1e-9))
    assert not check_gl_equivalence(t, bump, pair, 1e-10)
    assert max(pair.residuals()) < 1e-10


def test_swapping_twice_is_identity(rng):
    t = random_scalar_matrix(rng, 4)
    p = permutation(M2, 4, 1, 3)
    assert (p * p - identity(M2, 4)).norm() == 0
    pair = interchange_pair(t, rows=(1, 3), cols=(0, 2))
    assert (pair.apply(pair.apply(t)) - t).norm() == 0


def test_pad_examples():
    assert (pad_matrix(identity(M2, 3), 4) - identity(M2, 4)).norm() == 0
    p = pad_matrix(from_scalars([[2]]), 2)
    assert (p - from_scalars([[2, 0], [0, 1]])).norm() == 0
    inv = p.algebra.element(p.algebra.invert(p.payload))
    assert (inv - pad_matrix(from_scalars([[0.5]]), 2)).norm() < 1e-15


def test_pad_commutes_with_inverse_and_product(rng):
    t = random_scalar_matrix(rng, 3, shift=2)
    inv = t.algebra.element(t.algebra.invert(t.payload))
    p = pad_matrix(t)
    assert p.n == 4
    p_inv = p.algebra.element(p.algebra.invert(p.payload))
    assert (p_inv - pad_matrix(inv)).norm() < 1e-10
    s = random_scalar_matrix(rng, 3)
    assert (pad_matrix(t) * pad_matrix(s) - pad_matrix(t * s)).norm() < 1e-12
    with pytest.raises(BadDimension):
        pad_matrix(t, 2)


def test_pad_preserves_invertibility_both_ways(rng):
    sing = from_scalars([[1, 2, 0], [2, 4, 0], [0, 0, 1]])
    assert not sing.is_invertible() and not pad_matrix(sing).is_invertible()
    t = random_scalar_matrix(rng, 3, shift=2)
    assert t.is_invertible() and pad_matrix(t).is_invertible()


def test_nest_roundtrip_and_product(rng):
    assert (nest(identity(S1, 4)) - identity(MatrixAlgebra(S1, 2), 2)).norm() == 0
    t, s = random_scalar_matrix(rng, 4, k=1), random_scalar_matrix(rng, 4, k=1)
    assert (unnest(nest(t)) - t).norm() == 0
    assert (unnest(nest(t) * nest(s)) - t * s).norm() < 1e-12
    assert np.array_equal(nest(t).flatten(), t.flatten())
    with pytest.raises(OddDimension):
        nest(random_scalar_matrix(rng, 3))


def test_nest_preserves_invertibility(rng):
    sing = from_scalars(np.outer([1, 2, 3, 4], [1, 0, 1, 0]).tolist())
    assert not sing.is_invertible() and not nest(sing).is_invertible()
    t = random_scalar_matrix(rng, 4, shift=3)
    assert t.is_invertible() and nest(t).is_invertible()


def test_elimination_pair_examples(rng):
    ident = identity(M2, 3)
    pair = build_elimination_pair(ident)
    assert (pair.left - ident).norm() == 0 and (pair.right - ident).norm() == 0
    b, c, d = (S1.random(rng) for _ in range(3))
    t = matrix([[S1.unit(), b], [c, d]])
    pair = build_elimination_pair(t)
    assert (pair.left - matrix([[S1.unit(), S1.zero()], [-c, S1.unit()]])).norm() == 0
    assert (pair.right - matrix([[S1.unit(), -b], [S1.zero(), S1.unit()]])).norm() == 0
    s = pair.apply(t)
    assert (s - matrix([[S1.unit(), S1.zero()], [S1.zero(), d - c * b]])).norm() < 1e-14
    assert check_gl_equivalence(t, s, pair, 1e-12)


def test_elimination_pair_clears_row_and_column(rng):
    t = random_scalar_matrix(rng, 4).replace(0, 0, M2.unit())
    s = build_elimination_pair(t).apply(t)
    assert all(s[0, k].norm() < 1e-12 and s[k, 0].norm() < 1e-12 for k in range(1, 4))
    with pytest.raises(PivotNotUnit):
        build_elimination_pair(t.replace(0, 0, M2.scalar(2)))


def test_direct_sum_and_replay(rng):
    t = random_scalar_matrix(rng, 2)
    big = direct_sum_identity(t, 4)
    assert big[0, 0].norm() == 1 and (big.minor(2) - t).norm() == 0
    pair = interchange_pair(t, rows=(0, 1))
    assert (replay(t, [pair, pair]) - t).norm() == 0
    emb = pair.embed_lower_right(3)
    assert (emb.left.minor() - pair.left).norm() == 0


def test_dense_oracle_rejects_singular():
    t = from_scalars([[1, 2], [2, 4]])
    with pytest.raises(SingularToWorkingPrecision):
        t.algebra.invert(t.payload)
    assert reciprocal_condition(np.zeros((2, 2))) == 0.0


@given(seed=seeds)
def test_serialization_roundtrip_is_byte_identical(seed):
    rng = np.random.default_rng(seed)
    t = random_scalar_matrix(rng, int(rng.integers(1, 5)), k=int(rng.integers(1, 4)))
    text = dumps(t)
    assert dumps(loads(text)) == text
    assert np.array_equal(loads(text).flatten(), t.flatten())


def test_serialization_other_instances(rng):
    for base in (WienerAlgebra(3), UnitizedHTAlgebra(4), SwapAlgebra(), MatrixAlgebra(M2, 2)):
        t = MatrixAlgebra(base, 2).random(rng)
        back = matrix_from_json(json.loads(json.dumps(matrix_to_json(t))))
        assert back.algebra == t.algebra and (back - t).norm() == 0


@pytest.mark.parametrize("text", [
    "{not json",
    json.dumps({"n": 2}),
    json.dumps({"n": 2, "instance": {"kind": "nope"}, "entries": []}),
    json.dumps({"n": 1, "instance": {"kind": "scalar", "k": 2}, "entries": [[[[1, 0]]]]}),
    json.dumps({"n": 2, "instance": {"kind": "scalar", "k": 1}, "entries": [[[[1, 0]]]]}),
])
def test_malformed_documents(text):
    with pytest.raises(ParseError):
        loads(text)
