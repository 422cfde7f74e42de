"""Randomized experiments on the shipped algebra instances.

Each trial is a pure function of ``(instance spec, n, seed)``, so a failure
can be replayed from the seed recorded in its :class:`ExperimentOutcome`.
Per-trial seeds derive from the master seed and the trial index, which
makes results independent of scheduling.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .algebra import Algebra, SpectralReport, gelfand_radius, symmetric_witness_check
from .engine import METHODS, InversionCertificate, oracle_invert
from .errors import NBInvError, NoEmbedding, NoInvolution, NotConvergent, NotSupported
from .instances import ScalarMatrixAlgebra, UnitizedHTAlgebra, make_algebra
from .matrix import Matrix, MatrixAlgebra, diagonal, matrix, matrix_to_json

SHIFTS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
SIGMA_FLOOR = 1e-3


def trial_seed(master: int, index: int) -> int:
    """Seed of trial ``index`` under ``master``; stable across runs and schedules."""
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1, np.uint64)[0])


def instance_label(spec: dict) -> str:
    params = ",".join(f"{k}={v}" for k, v in sorted(spec.items()) if k != "name")
    return f"{spec['name']}({params})" if params else spec["name"]


def build_instance(spec: dict) -> Algebra:
    params = {k: v for k, v in spec.items() if k != "name"}
    return make_algebra(spec["name"], **params)


# ---------------------------------------------------------------------------
# random matrices
# ---------------------------------------------------------------------------

def sigma_min(t: Matrix) -> float:
    """Smallest singular value of the flattened ambient image of ``t``."""
    a = t.embed().flatten() if t.algebra.ambient() is not None else t.flatten()
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def _well_posed(t: Matrix) -> bool:
    if sigma_min(t) <= SIGMA_FLOOR:
        return False
    chars = t.algebra.characters(t.payload)
    return chars is None or np.linalg.svd(chars, compute_uv=False)[-1] > SIGMA_FLOOR


def _raw(alg: Algebra, n: int, rng: np.random.Generator, kind: str) -> Matrix:
    ma = MatrixAlgebra(alg, n)
    x = ma.random(rng)
    if kind == "general":
        return x
    if kind == "hermitian":
        return (x + x.star()) * 0.5
    zero = alg.zero()
    rows = [list(r) for r in x.rows]
    for j in range(n):
        for k in range(j):
            if kind == "upper":
                rows[j][k] = zero
            elif kind == "inessential_lower":
                if isinstance(alg, UnitizedHTAlgebra):
                    rows[j][k] = alg.element(alg.random_kernel_payload(rng))
                elif not alg.inessential(rows[j][k].payload):
                    rows[j][k] = zero
            else:
                raise ValueError(f"unknown matrix kind {kind!r}")
    return matrix(rows, alg)


def random_matrix(alg: Algebra, n: int, rng: np.random.Generator, kind: str = "general") -> Matrix:
    """Gaussian matrix of the given kind, shifted by ``c I`` until well conditioned.

    ``kind`` is ``general``, ``hermitian``, ``upper`` or ``inessential_lower``.
    The shift ``c`` runs through 0, 1/2, 1, 2, 4, ... until the flattened
    ambient image has smallest singular value above 1e-3 (and, for unitized
    kernels, the scalar-part matrix as well).
    """
    x = _raw(alg, n, rng, kind)
    one = x.algebra.unit()
    for c in SHIFTS:
        y = x + one * c if c else x
        if _well_posed(y):
            return y
    raise NotConvergent("no shift made the random matrix well conditioned")


# ---------------------------------------------------------------------------
# outcomes
# ---------------------------------------------------------------------------

@dataclass
class ExperimentOutcome:
    property: str
    instance: str
    n: int
    seed: int
    passed: bool
    residual: float
    detail: str = ""
    index: int = -1
    inputs: dict | None = None
    certificate: dict | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("certificate")
        if not math.isfinite(out["residual"]):
            out["residual"] = str(out["residual"])
        return out


def _outcome(prop, spec, n, seed, passed, residual, detail="", t: Matrix | None = None, **extra):
    return ExperimentOutcome(
        prop, instance_label(spec), n, seed, bool(passed), float(residual), detail,
        inputs=None if passed or t is None else {"spec": spec, "matrix": matrix_to_json(t)},
        **extra,
    )


# ---------------------------------------------------------------------------
# spectral radius preservation
# ---------------------------------------------------------------------------

def check_srp_matrix_lift(t: Matrix, n_max: int = 1024, label: str = "") -> SpectralReport:
    """Gelfand estimates of ``r(t)`` in M_n(A) and in M_n(B) for the declared ambient B."""
    if t.algebra.ambient() is None:
        raise NoEmbedding(f"{t.base!r} declares no ambient algebra")
    ra = gelfand_radius(t, n_max, label)
    rb = gelfand_radius(t.embed(), n_max, label)
    ra.estimate_b = rb.estimate_a
    ra.discrepancy = abs(ra.estimate_a - rb.estimate_a)
    ra.converged = ra.converged and rb.converged
    return ra


def srp_trial(spec: dict, n: int, seed: int, tol: float = 0.05, n_max: int = 1024) -> ExperimentOutcome:
    alg = build_instance(spec)
    t = MatrixAlgebra(alg, n).random(np.random.default_rng(seed))
    rep = check_srp_matrix_lift(t, n_max)
    bound = tol * max(1.0, rep.estimate_b)
    return _outcome("srp", spec, n, seed, rep.discrepancy <= bound, rep.discrepancy,
                    f"r_A={rep.estimate_a:.6g} r_B={rep.estimate_b:.6g}", t)


# ---------------------------------------------------------------------------
# inverse closedness of the matrix lift
# ---------------------------------------------------------------------------

# matrix kind and engine path per instance for n >= 3; n = 2 always uses prop4
SCAN_KIND = {"wiener": "hermitian", "ht": "inessential_lower"}


def default_path(t: Matrix) -> str:
    if t.n == 2:
        return "prop4"
    if t.algebra.symmetric and t.is_hermitian():
        return "hermitian"
    return "thm6"


def check_inverse_closed_pair(t: Matrix, engine_path: str | None = None, tol: float = 1e-6,
                              spec: dict | None = None, seed: int = -1) -> ExperimentOutcome:
    """Invert ``t`` in M_n(B) by the oracle and recover the inverse in M_n(A) by the engine.

    Passes iff the engine certifies a residual within ``tol`` and its inverse,
    embedded in B, lies within ``tol (1 + |X_B|)`` of the oracle inverse.
    Failures are recorded, never raised.
    """
    spec = spec or {"name": t.base.kind}
    path = engine_path or default_path(t)
    prop = "inverse_closed"
    try:
        xb = oracle_invert(t.embed())
    except NBInvError as exc:
        return _outcome(prop, spec, t.n, seed, False, math.inf, f"oracle in B failed: {exc}", t)
    try:
        cert: InversionCertificate = METHODS[path](t, tol)
    except NBInvError as exc:
        return _outcome(prop, spec, t.n, seed, False, math.inf,
                        f"{path}: {type(exc).__name__}: {exc}", t)
    dist = (cert.inverse.embed() - xb).norm()
    ok = cert.residual <= tol and dist <= tol * (1.0 + xb.norm())
    return _outcome(prop, spec, t.n, seed, ok, max(cert.residual, dist / (1.0 + xb.norm())),
                    f"{path} via {cert.path}", t, certificate=cert.to_json())


def inverse_closed_trial(spec: dict, n: int, seed: int, tol: float = 1e-6) -> ExperimentOutcome:
    alg = build_instance(spec)
    kind = "general" if n == 2 else SCAN_KIND.get(spec["name"], "general")
    t = random_matrix(alg, n, np.random.default_rng(seed), kind)
    return check_inverse_closed_pair(t, tol=tol, spec=spec, seed=seed)


# ---------------------------------------------------------------------------
# symmetry of the matrix lift
# ---------------------------------------------------------------------------

def witness_matrix(alg: Algebra, n: int) -> Matrix:
    """Diagonal lift of the instance's symmetry witness."""
    w = alg.symmetry_witness()
    if w is None:
        raise NotSupported(f"{alg!r} has no symmetry witness")
    return diagonal([alg.element(w)] * n)


def symmetric_trial(spec: dict, n: int, seed: int, tol: float = 1e-10,
                    witness: bool = False) -> ExperimentOutcome:
    """Is ``I + T* T`` invertible for random (or witness) ``T``?

    Over scalar matrices the smallest eigenvalue of ``I + T* T`` must also be
    at least ``1 - tol``.
    """
    alg = build_instance(spec)
    if not alg.has_involution:
        raise NoInvolution(f"{alg!r} declares no involution")
    t = witness_matrix(alg, n) if witness else MatrixAlgebra(alg, n).random(np.random.default_rng(seed))
    chk = symmetric_witness_check(t)
    ok, residual, detail = chk.ok, chk.residual, chk.detail
    if ok and isinstance(alg, ScalarMatrixAlgebra):
        b = t.algebra.unit() + t.star() * t
        lo = float(np.linalg.eigvalsh(b.flatten()).min())
        ok = lo >= 1.0 - tol
        residual, detail = max(0.0, 1.0 - lo), f"min eigenvalue {lo:.12g}"
    if witness:
        detail = "witness lift; " + detail
    return _outcome("symmetric", spec, n, seed, ok, residual, detail, t)


def check_symmetric_lift(spec: dict, n: int, trials: int, seed: int,
                         tol: float = 1e-10) -> list[ExperimentOutcome]:
    """Random symmetry trials; a non-symmetric instance starts with its witness lift."""
    alg = build_instance(spec)
    if not alg.has_involution:
        raise NoInvolution(f"{alg!r} declares no involution")
    use_witness = not alg.symmetric and alg.symmetry_witness() is not None
    out = []
    for i in range(trials):
        o = symmetric_trial(spec, n, trial_seed(seed, i), tol, witness=use_witness and i == 0)
        o.index = i
        out.append(o)
    return out


# ---------------------------------------------------------------------------
# involution bound
# ---------------------------------------------------------------------------

def check_involution_bound(alg: Algebra, samples: int, seed: int = 0) -> float:
    """Largest observed ``|a*| / |a|`` over random samples."""
    if not alg.has_involution:
        raise NoInvolution(f"{alg!r} declares no involution")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        a = alg.random(rng)
        na = a.norm()
        if na > 0:
            worst = max(worst, a.star().norm() / na)
    return worst


def involution_trial(spec: dict, n: int, seed: int, tol: float = 1e-9, samples: int = 20) -> ExperimentOutcome:
    alg = build_instance(spec)
    ratio = check_involution_bound(alg, samples, seed)
    bound = alg.involution_bound
    ok = bound is not None and ratio <= bound * (1.0 + tol)
    return _outcome("involution_bound", spec, 1, seed, ok, ratio, f"declared M={bound}")


TRIALS: dict[str, Callable[..., ExperimentOutcome]] = {
    "srp": srp_trial,
    "inverse_closed": inverse_closed_trial,
    "symmetric": symmetric_trial,
    "involution_bound": involution_trial,
}


def replay(outcome: ExperimentOutcome, spec: dict, **opts) -> ExperimentOutcome:
    """Rerun the trial that produced ``outcome``."""
    again = TRIALS[outcome.property](spec, outcome.n, outcome.seed, **opts)
    again.index = outcome.index
    return again


# ---------------------------------------------------------------------------
# suites and reports
# ---------------------------------------------------------------------------

def run_trials(prop: str, specs: list[dict], sizes: list[int], trials: int, master: int,
               halt_on_failure: bool = False, **opts) -> list[ExperimentOutcome]:
    """Round-robin over instances and sizes; trial ``i`` uses ``trial_seed(master, i)``."""
    fn = TRIALS[prop]
    out = []
    for i in range(trials):
        spec = specs[i % len(specs)]
        n = sizes[(i // len(specs)) % len(sizes)]
        o = fn(spec, n, trial_seed(master, i), **opts)
        o.index = i
        out.append(o)
        if halt_on_failure and not o.passed:
            break
    return out


def summarize(outcomes: Iterable[ExperimentOutcome]) -> list[dict]:
    rows: dict[str, dict] = {}
    for o in outcomes:
        r = rows.setdefault(o.property, {"property": o.property, "trials": 0, "passes": 0,
                                         "worst_residual": -math.inf, "seed_of_worst": None})
        r["trials"] += 1
        r["passes"] += o.passed
        if o.residual > r["worst_residual"] or r["seed_of_worst"] is None:
            r["worst_residual"], r["seed_of_worst"] = o.residual, o.seed
    return list(rows.values())


def summary_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    cols = ["property", "trials", "passes", "worst_residual", "seed_of_worst"]
    if rows and "verdict" in rows[0]:
        cols.append("verdict")
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def outcomes_jsonl(outcomes: Iterable[ExperimentOutcome]) -> str:
    return "".join(json.dumps(o.to_json(), sort_keys=True) + "\n" for o in outcomes)


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
