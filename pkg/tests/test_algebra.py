import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nbinv import (
    ScalarMatrixAlgebra,
    SwapAlgebra,
    UnitizedHTAlgebra,
    WienerAlgebra,
    approximate_by_invertibles,
    gelfand_radius,
    neumann_inverse,
    symmetric_witness_check,
)
from nbinv.errors import AlgebraMismatch, NoInvolution, NotConvergent

M2 = ScalarMatrixAlgebra(2)
INSTANCES = [ScalarMatrixAlgebra(2), ScalarMatrixAlgebra(3, "sum"), WienerAlgebra(8),
             UnitizedHTAlgebra(12), SwapAlgebra()]
seeds = st.integers(0, 2**32 - 1)


def arr(x):
    return M2.from_array(np.asarray(x, dtype=complex))


# -- algebra laws on every instance ----------------------------------------

@pytest.mark.parametrize("alg", INSTANCES, ids=repr)
@given(seed=seeds)
def test_norm_axioms(alg, seed):
    rng = np.random.default_rng(seed)
    a, b = alg.random(rng), alg.random(rng)
    lam = complex(*rng.normal(size=2))
    assert (a * b).norm() <= a.norm() * b.norm() * (1 + 1e-12) + 1e-14
    assert (a + b).norm() <= a.norm() + b.norm() + 1e-12
    assert math.isclose((a * lam).norm(), abs(lam) * a.norm(), rel_tol=1e-12)
    assert alg.unit().norm() >= 1.0
    assert alg.zero().norm() == 0.0


@pytest.mark.parametrize("alg", INSTANCES, ids=repr)
@given(seed=seeds)
def test_ring_laws(alg, seed):
    rng = np.random.default_rng(seed)
    a, b, c = alg.random(rng), alg.random(rng), alg.random(rng)
    scale = 1 + a.norm() * b.norm() * c.norm()
    assert ((a * b) * c - a * (b * c)).norm() <= 1e-12 * scale
    assert (a * (b + c) - (a * b + a * c)).norm() <= 1e-12 * scale
    assert (a * alg.unit() - a).norm() <= 1e-14 * (1 + a.norm())


@pytest.mark.parametrize("alg", INSTANCES, ids=repr)
@given(seed=seeds)
def test_involution_laws(alg, seed):
    rng = np.random.default_rng(seed)
    a, b = alg.random(rng), alg.random(rng)
    scale = 1 + a.norm() * b.norm()
    assert (a.star().star() - a).norm() <= 1e-14 * scale
    assert ((a * b).star() - b.star() * a.star()).norm() <= 1e-12 * scale
    assert ((a + b).star() - (a.star() + b.star())).norm() <= 1e-14 * scale
    assert a.star().norm() <= alg.involution_bound * a.norm() * (1 + 1e-12)


@pytest.mark.parametrize("alg", [WienerAlgebra(8), UnitizedHTAlgebra(12)], ids=repr)
@given(seed=seeds)
def test_embedding_constant(alg, seed):
    a = alg.random(np.random.default_rng(seed))
    assert a.embed().norm() <= alg.embedding_constant * a.norm() * (1 + 1e-12)


def test_elements_are_immutable_and_typed():
    a = M2.unit()
    with pytest.raises(AttributeError):
        a.payload = None
    with pytest.raises(AlgebraMismatch):
        a + ScalarMatrixAlgebra(3).unit()
    assert (arr([[1, 1], [0, 1]]) ** 3 - arr([[1, 3], [0, 1]])).norm() < 1e-14


# -- neumann_inverse --------------------------------------------------------

def test_neumann_unit():
    assert (neumann_inverse(M2.unit()) - M2.unit()).norm() == 0


def test_neumann_half_unit():
    s = ScalarMatrixAlgebra(1)
    assert abs(neumann_inverse(s.scalar(0.5)).payload[0, 0] - 2) < 1e-8


def test_neumann_nilpotent_terminates():
    n = arr([[0, 1], [0, 0]])
    out = neumann_inverse(M2.unit() - n)
    assert (out - (M2.unit() + n)).norm() < 1e-14


def test_neumann_matches_dense_inverse(rng):
    x = M2.random(rng)
    x = x * (0.6 / x.norm())
    out = neumann_inverse(M2.unit() - x, tol=1e-12)
    assert np.abs(out.payload - np.linalg.inv(np.eye(2) - x.payload)).max() < 1e-10


def test_neumann_divergence():
    with pytest.raises(NotConvergent):
        neumann_inverse(M2.scalar(4.0))


# -- gelfand_radius ---------------------------------------------------------

def test_radius_unit():
    assert abs(gelfand_radius(M2.unit()).estimate - 1) < 1e-12


def test_radius_nilpotent():
    assert gelfand_radius(arr([[0, 1], [0, 0]])).estimate == 0.0


def test_radius_against_eigenvalues():
    a = arr([[0, 2], [0.5, 0]])
    rho = np.abs(np.linalg.eigvals(a.payload)).max()
    assert abs(gelfand_radius(a).estimate - rho) <= 0.02


def test_radius_report_invariants(rng):
    for _ in range(20):
        a = M2.random(rng)
        rep = gelfand_radius(a, 256)
        rho = np.abs(np.linalg.eigvals(a.payload)).max()
        assert 0 <= rep.estimate <= a.norm() + 1e-9
        assert abs(rep.estimate - rho) <= 0.05 * max(1, rho)
        assert rep.powers == [2 ** j for j in range(1, 9)]


def test_radius_no_overflow():
    rep = gelfand_radius(M2.scalar(1e3) + arr([[0, 1], [0, 0]]), 1024)
    assert abs(rep.estimate - 1e3) / 1e3 < 0.02


# -- approximate_by_invertibles --------------------------------------------

def test_approximants_of_invertible_are_constant():
    a = arr([[1, 2], [3, 4]])
    assert all(x is a for x in approximate_by_invertibles(a, 5))


def test_approximants_of_zero():
    s = ScalarMatrixAlgebra(1)
    seq = approximate_by_invertibles(s.zero(), 6)
    for j, x in enumerate(seq, 1):
        assert abs(abs(x.payload[0, 0]) - 1 / j) < 1e-15


def test_approximants_of_singular_matrix_are_invertible():
    m3 = ScalarMatrixAlgebra(3)
    a = m3.from_array(np.array([[1, 2, 3], [4, 5, 6], [7, 8, 9]], dtype=complex))
    seq = approximate_by_invertibles(a, 12)
    for j, x in enumerate(seq, 1):
        assert abs(np.linalg.det(x.payload)) > 1e-12
        assert (x - a).norm() <= 1 / j + 1e-12


# -- symmetric_witness_check -----------------------------------------------

def test_witness_of_zero_is_unit():
    chk = symmetric_witness_check(M2.zero())
    assert chk.ok and (chk.witness - M2.unit()).norm() < 1e-15


def test_scalar_matrices_are_symmetric(rng):
    for _ in range(50):
        a = M2.random(rng, 3.0)
        chk = symmetric_witness_check(a)
        b = np.eye(2) + a.payload.conj().T @ a.payload
        assert chk.ok and np.linalg.eigvalsh(b).min() >= 1 - 1e-12


def test_swap_witness_fails():
    sw = SwapAlgebra()
    a = sw.pair(2, -0.5)
    assert np.allclose((a.star() * a).payload, [-1, -1])
    assert not symmetric_witness_check(a).ok


def test_witness_needs_involution():
    from nbinv.instances import CircleAlgebra

    class Plain(CircleAlgebra):
        has_involution = False

    with pytest.raises(NoInvolution):
        symmetric_witness_check(Plain(3).unit())
