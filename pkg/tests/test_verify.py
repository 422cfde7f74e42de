import csv
import io
import json

import numpy as np
import pytest

from nbinv import MatrixAlgebra, ScalarMatrixAlgebra, UnitizedHTAlgebra, WienerAlgebra, identity, matrix
from nbinv.errors import NoEmbedding, NoInvolution
from nbinv.instances import CircleAlgebra
from nbinv.verify import (
    check_involution_bound,
    check_inverse_closed_pair,
    check_srp_matrix_lift,
    check_symmetric_lift,
    inverse_closed_trial,
    outcomes_jsonl,
    random_matrix,
    replay,
    run_trials,
    sigma_min,
    summarize,
    summary_csv,
    symmetric_trial,
    trial_seed,
)
from nbinv.algebra import symmetric_witness_check


def grid_radius(t):
    """Largest eigenvalue modulus of the 2 x 2 symbol over the grid."""
    alg = t.base
    vals = np.array([[alg.values(t[j, k].payload) for k in range(t.n)] for j in range(t.n)])
    return max(np.abs(np.linalg.eigvals(vals[:, :, g])).max() for g in range(vals.shape[2]))


def test_trial_seeds_are_stable_and_distinct():
    assert trial_seed(3, 5) == trial_seed(3, 5)
    assert len({trial_seed(0, i) for i in range(200)}) == 200


@pytest.mark.parametrize("kind", ["general", "hermitian", "upper", "inessential_lower"])
def test_random_matrix_kinds(rng, kind):
    for alg in (ScalarMatrixAlgebra(2), WienerAlgebra(6), UnitizedHTAlgebra(8)):
        t = random_matrix(alg, 3, rng, kind)
        assert sigma_min(t) > 1e-3
        if kind == "hermitian":
            assert t.is_hermitian(1e-14)
        if kind == "upper":
            assert t.is_upper_triangular(0)
        if kind == "inessential_lower":
            assert all(alg.inessential(t[j, k].payload) for j in range(3) for k in range(j))


# -- spectral radius --------------------------------------------------------

def test_srp_identity():
    rep = check_srp_matrix_lift(identity(WienerAlgebra(8), 2))
    assert abs(rep.estimate_a - 1) < 1e-12 and abs(rep.estimate_b - 1) < 1e-12


def test_srp_diagonal_wiener():
    w = WienerAlgebra()
    t = matrix([[w.from_coefficients({0: 2, 1: 1}), w.zero()], [w.zero(), w.unit()]])
    rep = check_srp_matrix_lift(t)
    assert abs(rep.estimate_a - 3) <= 0.15 and abs(rep.estimate_b - 3) <= 0.15


def test_srp_random_wiener_against_grid(rng):
    w = WienerAlgebra(16)
    for _ in range(10):
        t = MatrixAlgebra(w, 2).random(rng)
        rep = check_srp_matrix_lift(t)
        r = grid_radius(t)
        assert rep.discrepancy <= 0.05 * max(1, rep.estimate_b)
        assert abs(rep.estimate_b - r) <= 0.05 * max(1, r)


def test_srp_needs_embedding():
    class Bare(CircleAlgebra):
        def ambient(self):
            return None

    with pytest.raises(NoEmbedding):
        check_srp_matrix_lift(identity(Bare(3), 2))


# -- inverse closedness ---------------------------------------------------------

def test_inverse_closed_identity():
    assert check_inverse_closed_pair(identity(ScalarMatrixAlgebra(2), 2)).passed


def test_inverse_closed_wiener(rng):
    w = WienerAlgebra(16)
    t = random_matrix(w, 2, rng)
    det = w.values(t[0, 0].payload) * w.values(t[1, 1].payload) - w.values(t[0, 1].payload) * w.values(
        t[1, 0].payload)
    assert np.abs(det).min() > 0
    o = check_inverse_closed_pair(t, spec={"name": "wiener", "degree": 16})
    assert o.passed and "prop4" in o.detail


def test_inverse_closed_kernels(rng):
    h = UnitizedHTAlgebra(16)
    t = matrix([[h.make(4, rng.normal(size=(16, 16))), h.make(0.5, rng.normal(size=(16, 16)))],
                [h.make(0.5, rng.normal(size=(16, 16))), h.make(4, rng.normal(size=(16, 16)))]])
    o = check_inverse_closed_pair(t, spec={"name": "ht", "grid": 16})
    assert o.passed and o.residual <= 1e-6


def test_inverse_closed_failure_is_recorded_not_raised():
    t = matrix([[ScalarMatrixAlgebra(1).from_array(1), ScalarMatrixAlgebra(1).from_array(2)],
                [ScalarMatrixAlgebra(1).from_array(2), ScalarMatrixAlgebra(1).from_array(4)]])
    o = check_inverse_closed_pair(t, spec={"name": "scalar", "k": 1}, seed=9)
    assert not o.passed and o.inputs["matrix"]["n"] == 2 and o.seed == 9


def test_failures_replay_identically():
    # a tolerance no engine path can meet forces a recorded failure
    spec = {"name": "scalar", "k": 2}
    first = inverse_closed_trial(spec, 3, trial_seed(1, 4), tol=1e-30)
    again = replay(first, spec, tol=1e-30)
    assert not first.passed and first.to_json() == again.to_json()


def test_scanner_mixed_instances():
    specs = [{"name": "scalar", "k": 2}, {"name": "wiener", "degree": 8}, {"name": "ht", "grid": 8},
             {"name": "swap"}]
    out = run_trials("inverse_closed", specs, [2, 3], 32, master=11)
    assert len(out) == 32 and all(o.passed for o in out)
    assert {o.n for o in out} == {2, 3}


# -- symmetry -------------------------------------------------------------------

def test_symmetric_zero_and_random_matrix():
    assert symmetric_witness_check(MatrixAlgebra(ScalarMatrixAlgebra(2), 3).zero()).ok
    assert symmetric_trial({"name": "scalar", "k": 2}, 2, 0).passed


def test_symmetric_lift_scalar():
    out = []
    for n in (1, 2, 3, 4):
        out += check_symmetric_lift({"name": "scalar", "k": 2}, n, 25, seed=n)
    assert len(out) == 100 and all(o.passed for o in out)


def test_symmetric_lift_control_records_failure():
    out = check_symmetric_lift({"name": "swap"}, 2, 4, seed=0)
    assert not out[0].passed and "witness" in out[0].detail
    assert out[0].inputs is not None


def test_symmetric_needs_involution(monkeypatch):
    from nbinv import verify

    class Plain(CircleAlgebra):
        has_involution = False

    monkeypatch.setattr(verify, "make_algebra", lambda name, **kw: Plain(3))
    with pytest.raises(NoInvolution):
        check_symmetric_lift({"name": "plain"}, 2, 1, 0)
    with pytest.raises(NoInvolution):
        check_involution_bound(Plain(3), 3)


# -- involution bound -------------------------------------------------------------

def test_involution_bound_values():
    assert check_involution_bound(ScalarMatrixAlgebra(3), 50) == pytest.approx(1, rel=1e-12)
    assert check_involution_bound(WienerAlgebra(8), 50) == pytest.approx(1, rel=1e-12)
    h = UnitizedHTAlgebra(16)
    assert check_involution_bound(h, 50) <= h.involution_bound


# -- reports ---------------------------------------------------------------------

def test_summary_and_streams():
    out = run_trials("srp", [{"name": "wiener", "degree": 8}], [2], 6, master=2, n_max=256)
    rows = summarize(out)
    assert rows[0]["trials"] == 6 and rows[0]["passes"] == 6
    assert rows[0]["seed_of_worst"] in {o.seed for o in out}
    parsed = list(csv.DictReader(io.StringIO(summary_csv(rows))))
    assert parsed[0]["property"] == "srp"
    lines = outcomes_jsonl(out).splitlines()
    assert len(lines) == 6 and json.loads(lines[0])["property"] == "srp"
