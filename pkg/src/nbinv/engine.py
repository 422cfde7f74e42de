"""Constructive inversion of matrices over a Banach algebra.

Four constructive routes plus a dense oracle:

* :func:`invert_upper_triangular` - back substitution, ``s_12 = -s_11 t_12 s_22``.
* :func:`invert_two_by_two` - 2 x 2 elimination through the factor
  ``[[lam a, 1], [1, 0]]`` where ``a t_11 = 1``, falling back to a limit of
  perturbed matrices when no entry is invertible.
* :func:`invert_essentially_triangular` - recursive elimination for matrices
  whose below-diagonal entries are inessential, with a row interchange and a
  vanishing pivot shift ``lam_m`` when the leading pivot is singular.
* :func:`invert_hermitian_symmetric` - hermitian matrices over a symmetric
  *-algebra: pad to a power of two, nest into 2 x 2 blocks, recurse.
* :func:`oracle_invert` - flatten to one scalar matrix and invert densely.

Every route returns an :class:`InversionCertificate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .algebra import Element
from .errors import (
    ApproximationStalled,
    DiagonalNotInvertible,
    InversionError,
    MaskViolation,
    NoInvolution,
    NotHermitian,
    NotInvertible,
    NotInvertibleInAmbient,
    NotSupported,
    NotSymmetricAlgebra,
    NotTriangular,
    ResidualTooLarge,
    SingularToWorkingPrecision,
)
from .matrix import (
    GLPair,
    Matrix,
    MatrixAlgebra,
    build_elimination_pair,
    diagonal,
    direct_sum_identity,
    interchange_pair,
    matrix,
    matrix_to_json,
    nest,
    next_power_of_two,
    pad_matrix,
    replay,
    unnest,
)

Inverter = Callable[[Element], Element]

DIRECT, INTERCHANGE, LIMIT = "direct", "interchange", "perturbed-limit"
_RANK = {DIRECT: 0, INTERCHANGE: 1, LIMIT: 2}


def _combine(*paths: str) -> str:
    return max(paths, key=_RANK.__getitem__)


def default_inverter(x: Element) -> Element:
    return x.inverse()


@dataclass
class PivotStrategy:
    """How the shift ``lam`` and the vanishing sequence ``lam_m`` are chosen.

    ``rule="spectral"`` puts ``lam = eps e^(i theta)`` at the angle farthest
    from the negated spectrum of the entry; ``rule="random"`` draws the angle
    from a generator seeded by ``(seed, attempt)``.  Sizes follow
    ``eps_m = decay ** m``.
    """

    rule: str = "spectral"
    retry_budget: int = 32
    decay: float = 0.5
    max_terms: int = 64
    angles: int = 64
    seed: int = 0
    refine_steps: int = 6

    def eps(self, m: int) -> float:
        return self.decay ** m

    def _angle_shift(self, x: Element, eps: float, attempt: int) -> complex:
        if self.rule == "spectral" and attempt == 0:
            try:
                return x.algebra.shift_for(x.payload, eps, self.angles)
            except NotSupported:
                pass
        rng = np.random.default_rng([self.seed, attempt])
        return eps * complex(np.exp(2j * np.pi * rng.random()))

    def shift(self, x: Element, eps: float, inverter: Inverter) -> tuple[complex, Element]:
        """Verified ``lam`` of modulus ``eps`` with ``lam + x`` invertible, and that inverse."""
        one = x.algebra.unit()
        for attempt in range(self.retry_budget):
            lam = self._angle_shift(x, eps, attempt)
            inv = try_invert(inverter, x + one * lam)
            if inv is not None:
                return lam, inv
        raise ApproximationStalled(f"no admissible shift of size {eps:g} after {self.retry_budget} tries")

    def choose_lambda(self, x: Element, inverter: Inverter) -> tuple[complex, Element]:
        """First admissible ``lam`` along the schedule 1/2, 1/4, ..."""
        for m in range(1, self.retry_budget + 1):
            try:
                return self.shift(x, self.eps(m), inverter)
            except ApproximationStalled:
                continue
        raise ApproximationStalled("no admissible lambda")


@dataclass
class InversionCertificate:
    """Record of one inversion.

    ``factors`` act on ``base`` as ``X -> V X W`` in order and produce
    ``reduced``.  ``base`` is the input itself unless a limit was taken (then
    it is the last perturbed matrix) or the matrix was padded and nested.
    """

    input: Matrix
    inverse: Matrix
    base: Matrix
    reduced: Matrix
    factors: list[GLPair]
    path: str
    method: str = ""
    tolerance: float = 0.0
    residual_left: float = math.nan
    residual_right: float = math.nan
    limit_terms: int = 0
    perturbation: float = 0.0
    refinement_steps: int = 0
    padded_to: int | None = None
    nest_depth: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def residual(self) -> float:
        return max(self.residual_left, self.residual_right)

    @property
    def perturbed(self) -> bool:
        return self.base is not self.input

    def replay(self) -> Matrix:
        return replay(self.base, self.factors)

    def to_json(self, include_matrices: bool | None = None) -> dict:
        if include_matrices is None:
            include_matrices = self.input.algebra.scalar_backed
        out = {
            "method": self.method,
            "path": self.path,
            "n": self.input.n,
            "tolerance": self.tolerance,
            "residual_left": self.residual_left,
            "residual_right": self.residual_right,
            "limit_terms": self.limit_terms,
            "perturbation": self.perturbation,
            "refinement_steps": self.refinement_steps,
            "padded_to": self.padded_to,
            "nest_depth": self.nest_depth,
            "notes": list(self.notes),
            "factors": [f.to_json(include_matrices) for f in self.factors],
        }
        if include_matrices:
            out["input"] = matrix_to_json(self.input)
            out["inverse"] = matrix_to_json(self.inverse)
            out["reduced"] = matrix_to_json(self.reduced)
        return out


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def residuals(t: Matrix, x: Matrix) -> tuple[float, float]:
    """``(|X T - I|, |T X - I|)`` in the sum norm."""
    one = t.algebra.unit()
    return (x * t - one).norm(), (t * x - one).norm()


def try_invert(inverter: Inverter, x: Element, polish: int = 3) -> Element | None:
    """Inverse of ``x`` through ``inverter`` if it exists and verifies, else ``None``.

    Intermediate inverses are accepted on the backward-error test
    ``r <= tol |x| |y|`` as long as ``r < 1/2``, which already proves
    invertibility; a few Newton steps are tried first.  The strict absolute
    test is applied once, to the final inverse.
    """
    alg = x.algebra
    if isinstance(alg, MatrixAlgebra) and not alg.is_invertible(x.payload):
        return None
    try:
        y = inverter(x)
    except (NotInvertible, InversionError):
        return None
    one = alg.unit()

    def res(y):
        return max((x * y - one).norm(), (y * x - one).norm())

    r = res(y)
    for _ in range(polish):
        if not (alg.tol < r < 0.5):
            break
        cand = y + y * (one - x * y)
        rc = res(cand)
        if not rc < r:
            break
        y, r = cand, rc
    if r <= alg.tol or (r < 0.5 and r <= alg.tol * x.norm() * y.norm()):
        return y
    return None


def refine(t: Matrix, x: Matrix, max_steps: int) -> tuple[Matrix, int]:
    """Newton-Schulz steps ``X <- X + X (I - T X)`` while the residual drops."""
    one = t.algebra.unit()
    res = max(residuals(t, x))
    steps = 0
    while steps < max_steps and res > 1e-15:
        cand = x + x * (one - t * x)
        r = max(residuals(t, cand))
        if not r < res:
            break
        x, res, steps = cand, r, steps + 1
    return x, steps


def check_ambient(t: Matrix) -> None:
    """Raise :class:`NotInvertibleInAmbient` when the embedded matrix is singular.

    Silently passes for instances without an ambient embedding or flattening.
    """
    amb = t.algebra.ambient()
    if amb is None:
        return
    try:
        ok = amb.is_invertible(t.algebra.embed_payload(t.payload))
    except NotSupported:
        return
    if not ok:
        raise NotInvertibleInAmbient("matrix is singular in the ambient algebra")


def _finalize(cert: InversionCertificate, tol: float, method: str, refine_steps: int = 6) -> InversionCertificate:
    t, x = cert.input, cert.inverse
    left, right = residuals(t, x)
    steps = 0
    if max(left, right) > tol:
        x, steps = refine(t, x, refine_steps)
        left, right = residuals(t, x)
    cert = replace(cert, inverse=x, method=method, tolerance=tol, residual_left=left,
                   residual_right=right, refinement_steps=cert.refinement_steps + steps)
    if cert.residual > tol:
        raise ResidualTooLarge(f"{method}: residual {cert.residual:.3g} exceeds {tol:g}")
    return cert


def _limit(t: Matrix, term: Callable[[int], InversionCertificate], strategy: PivotStrategy,
           tol: float, what: str) -> InversionCertificate:
    """Inverse of ``t`` as the limit of inverses of perturbed matrices.

    Each term is polished against ``t`` before the Cauchy test: successive
    inverses within ``tol / 4`` and residual below ``tol``.
    """
    prev = None
    for m in range(1, strategy.max_terms + 1):
        try:
            cert_m = term(m)
        except (NotInvertible, InversionError):
            prev = None
            continue
        x, steps = refine(t, cert_m.inverse, strategy.refine_steps)
        res = max(residuals(t, x))
        if prev is not None and (x - prev).norm() < tol / 4 and res < tol:
            return replace(
                cert_m, input=t, inverse=x, path=LIMIT, limit_terms=m,
                perturbation=(cert_m.base - t).norm() if cert_m.base.algebra == t.algebra else math.nan,
                refinement_steps=steps,
                notes=cert_m.notes + [f"{what}: accepted after {m} terms"],
            )
        prev = x
    raise ApproximationStalled(f"{what}: inverses failed the Cauchy test within {strategy.max_terms} terms")


# ---------------------------------------------------------------------------
# upper triangular
# ---------------------------------------------------------------------------

def invert_upper_triangular(t: Matrix, entry_inverter: Inverter | None = None,
                            tol: float | None = None) -> Matrix:
    """Back substitution for an upper triangular matrix with invertible diagonal.

    ``s_jj = t_jj^-1`` and ``s_jk = -s_jj sum_{j<l<=k} t_jl s_lk``; for
    ``n = 2`` this is ``s_12 = -s_11 t_12 s_22``.
    """
    inverter = entry_inverter or default_inverter
    tol = t.algebra.tol if tol is None else tol
    n, base = t.n, t.base
    for j in range(n):
        for k in range(j):
            if t[j, k].norm() > tol:
                raise NotTriangular(f"entry ({j + 1},{k + 1}) has norm {t[j, k].norm():.3g}")
    d = []
    for j in range(n):
        inv = try_invert(inverter, t[j, j])
        if inv is None:
            raise DiagonalNotInvertible(j + 1)
        d.append(inv)
    zero = base.zero()
    s = [[zero] * n for _ in range(n)]
    for j in range(n - 1, -1, -1):
        s[j][j] = d[j]
        for k in range(j + 1, n):
            acc = t[j, j + 1] * s[j + 1][k]
            for l in range(j + 2, k + 1):
                acc = acc + t[j, l] * s[l][k]
            s[j][k] = -(d[j] * acc)
    return matrix(s, base)


def triangular_certificate(t: Matrix, tol: float | None = None,
                           entry_inverter: Inverter | None = None) -> InversionCertificate:
    tol = t.algebra.tol if tol is None else tol
    x = invert_upper_triangular(t, entry_inverter, tol)
    cert = InversionCertificate(t, x, t, t, [], DIRECT)
    return _finalize(cert, tol, "triangular")


# ---------------------------------------------------------------------------
# 2 x 2
# ---------------------------------------------------------------------------

_SEARCH = ((0, 0), (1, 0), (0, 1), (1, 1))


def _two_by_two_direct(t: Matrix, pos: tuple[int, int], a: Element, strategy: PivotStrategy,
                       inverter: Inverter) -> InversionCertificate:
    """Elimination when entry ``pos`` has the left inverse ``a``."""
    rows = (0, 1) if pos[0] == 1 else None
    cols = (0, 1) if pos[1] == 1 else None
    pairs: list[GLPair] = []
    tp = t
    if rows or cols:
        swap = interchange_pair(t, rows, cols)
        pairs.append(swap)
        tp = swap.apply(t)
    base = t.base
    one, zero = base.unit(), base.zero()
    alg = t.algebra
    eye = alg.unit()

    lam, _ = strategy.choose_lambda(tp[1, 0], inverter)
    la = a * lam
    v = matrix([[la, one], [one, zero]], base)
    v_inv = matrix([[zero, one], [one, -la]], base)
    r = v * tp
    r11_inv = try_invert(inverter, r[0, 0])
    if r11_inv is None:
        raise NotInvertibleInAmbient("shifted pivot lost invertibility")
    c = tp[0, 0] * r11_inv
    w = matrix([[one, zero], [-c, one]], base)
    w_inv = matrix([[one, zero], [c, one]], base)
    s = w * r
    tri = s.replace(1, 0, zero)
    try:
        s_inv = invert_upper_triangular(tri, inverter, tol=math.inf)
    except DiagonalNotInvertible as exc:
        raise NotInvertibleInAmbient(
            f"Schur complement (diagonal {exc.index}) is singular, so the matrix is not invertible") from exc
    x = s_inv * w * v
    if pairs:
        x = pairs[0].right * x * pairs[0].left
    pairs += [GLPair(v, eye, v_inv, eye, f"pivot exchange, lambda={lam:.6g}"),
              GLPair(w, eye, w_inv, eye, "clear (2,1)")]
    path = INTERCHANGE if rows or cols else DIRECT
    return InversionCertificate(t, x, t, replay(t, pairs), pairs, path)


def _shift_approximant(x: Element, eps: float, strategy: PivotStrategy, inverter: Inverter) -> Element:
    lam, _ = strategy.shift(x, eps, inverter)
    return x + x.algebra.unit() * lam


def _two_by_two(t: Matrix, strategy: PivotStrategy, inverter: Inverter, tol: float,
                approximant: Callable[[Element, float], Element] | None = None,
                closure_only: bool = False) -> InversionCertificate:
    search = _SEARCH[:1] if closure_only else _SEARCH
    for pos in search:
        a = try_invert(inverter, t[pos])
        if a is not None:
            return _two_by_two_direct(t, pos, a, strategy, inverter)
    approximant = approximant or (lambda x, e: _shift_approximant(x, e, strategy, inverter))

    def term(m):
        a_m = approximant(t[0, 0], strategy.eps(m))
        inv = try_invert(inverter, a_m)
        if inv is None:
            raise NotInvertible("approximant not invertible")
        return _two_by_two_direct(t.replace(0, 0, a_m), (0, 0), inv, strategy, inverter)

    return _limit(t, term, strategy, tol, "pivot approximation")


def invert_two_by_two(t: Matrix, strategy: PivotStrategy | None = None, tol: float | None = None,
                      entry_inverter: Inverter | None = None) -> InversionCertificate:
    """Invert a 2 x 2 matrix by the pivot-exchange elimination.

    An invertible entry is brought to position (1,1) by interchanges; the
    factor ``[[lam a, 1], [1, 0]]`` (``a t_11 = 1``) then makes the pivot
    ``lam + t_21`` invertible and one more elimination leaves an upper
    triangular matrix.  With no invertible entry, ``t_11`` is replaced by
    nearby invertibles and the limit of the inverses is taken.
    """
    if t.n != 2:
        raise ValueError("expected a 2 x 2 matrix")
    strategy = strategy or PivotStrategy()
    tol = t.algebra.tol if tol is None else tol
    check_ambient(t)
    cert = _two_by_two(t, strategy, entry_inverter or default_inverter, tol)
    return _finalize(cert, tol, "prop4", strategy.refine_steps)


# ---------------------------------------------------------------------------
# recursive elimination with inessential lower part
# ---------------------------------------------------------------------------

def _lower_mask(n: int) -> list[list[bool]]:
    return [[j > k for k in range(n)] for j in range(n)]


def _validate_mask(t: Matrix, mask) -> None:
    base = t.base
    for j in range(t.n):
        for k in range(j):
            if not mask[j][k]:
                raise MaskViolation(f"below-diagonal entry ({j + 1},{k + 1}) is not flagged inessential")
            if not base.inessential(t[j, k].payload):
                raise MaskViolation(f"entry ({j + 1},{k + 1}) fails the inessential proxy of {base!r}")


def _prepend(pair: GLPair, sub: InversionCertificate, t: Matrix) -> InversionCertificate:
    """Certificate for ``t`` from one for ``pair.apply(t)``."""
    x = pair.right * sub.inverse * pair.left
    base = t if not sub.perturbed else pair.undo(sub.base)
    factors = [pair] + sub.factors
    return InversionCertificate(t, x, base, replay(base, factors), factors,
                                _combine(sub.path, INTERCHANGE), notes=list(sub.notes))


def _first_case(t: Matrix, inv11: Element, strategy, inverter, tol) -> InversionCertificate:
    """Normalise an invertible pivot, clear row and column 1, recurse on the minor."""
    n, base = t.n, t.base
    eye = t.algebra.unit()
    one = base.unit()
    norm_l = diagonal([inv11] + [one] * (n - 1))
    norm_inv = diagonal([t[0, 0]] + [one] * (n - 1))
    normalise = GLPair(norm_l, eye, norm_inv, eye, "normalise pivot")
    t1 = norm_l * t
    elim = build_elimination_pair(t1, tol=max(t.algebra.tol, 1e-6))
    s = elim.apply(t1)
    child = _eliminate(s.minor(), strategy, inverter, tol)
    x = elim.right * direct_sum_identity(child.inverse, n) * elim.left * norm_l
    factors = [normalise, elim] + [p.embed_lower_right(n) for p in child.factors]
    if child.perturbed:
        rows = [list(s.rows[0])] + [[s[j, 0]] + list(child.base.rows[j - 1]) for j in range(1, n)]
        s_m = matrix(rows, base)
        base_t = normalise.undo(elim.undo(s_m))
    else:
        base_t = t
    return InversionCertificate(t, x, base_t, replay(base_t, factors), factors, child.path,
                                notes=list(child.notes))


def _eliminate(t: Matrix, strategy: PivotStrategy, inverter: Inverter, tol: float) -> InversionCertificate:
    n = t.n
    if n == 1:
        inv = try_invert(inverter, t[0, 0])
        if inv is None:
            raise NotInvertibleInAmbient("1 x 1 block is not invertible")
        return InversionCertificate(t, matrix([[inv]], t.base), t, t, [], DIRECT)
    _validate_mask(t, _lower_mask(n))
    if n == 2:
        return _two_by_two(t, strategy, inverter, tol)
    inv11 = try_invert(inverter, t[0, 0])
    if inv11 is not None:
        return _first_case(t, inv11, strategy, inverter, tol)
    swap = interchange_pair(t, rows=(0, 1))
    r = swap.apply(t)
    r11_inv = try_invert(inverter, r[0, 0])
    if r11_inv is not None:
        return _prepend(swap, _first_case(r, r11_inv, strategy, inverter, tol), t)
    one = t.base.unit()

    def term(m):
        lam, inv = strategy.shift(r[0, 0], strategy.eps(m), inverter)
        r_m = r.replace(0, 0, r[0, 0] + one * lam)
        return _prepend(swap, _first_case(r_m, inv, strategy, inverter, tol), t)

    return _limit(t, term, strategy, tol, "pivot shift lambda_m")


def invert_essentially_triangular(t: Matrix, inessential_mask=None, strategy: PivotStrategy | None = None,
                                  tol: float | None = None,
                                  entry_inverter: Inverter | None = None) -> InversionCertificate:
    """Recursive elimination for matrices with inessential entries below the diagonal.

    ``inessential_mask[j][k]`` flags entries claimed inessential; every
    below-diagonal entry must be flagged and pass the instance proxy, else
    :class:`MaskViolation`.  With an invertible pivot the first row and column
    are cleared and the minor is inverted recursively.  Otherwise rows 1 and 2
    are interchanged and the new pivot is shifted by ``lam_m -> 0``; the
    inverse is the limit over ``m``.
    """
    n = t.n
    strategy = strategy or PivotStrategy()
    tol = t.algebra.tol if tol is None else tol
    mask = _lower_mask(n) if inessential_mask is None else inessential_mask
    if len(mask) != n or any(len(row) != n for row in mask):
        raise MaskViolation("mask shape does not match the matrix")
    _validate_mask(t, mask)
    check_ambient(t)
    cert = _eliminate(t, strategy, inverter := entry_inverter or default_inverter, tol)
    return _finalize(cert, tol, "thm6", strategy.refine_steps)


# ---------------------------------------------------------------------------
# hermitian matrices over a symmetric *-algebra
# ---------------------------------------------------------------------------

def _imaginary_shift(x: Element, eps: float) -> Element:
    # a hermitian element of a symmetric algebra has real spectrum
    return x + x.algebra.unit() * (1j * eps)


def _block_inverter(strategy: PivotStrategy, tol: float) -> Inverter:
    """Entry inverter for nested blocks: hermitian blocks recurse, others use 2 x 2 elimination."""

    def inv(x: Element) -> Element:
        alg = x.algebra
        if not isinstance(alg, MatrixAlgebra):
            return x.inverse()
        if not alg.is_invertible(x.payload):
            raise NotInvertible("block is singular")
        if x.n == 1:
            return matrix([[x[0, 0].inverse()]], x.base)
        if x.is_hermitian() and alg.symmetric:
            y = _hermitian(x, strategy, tol).inverse
        else:
            top = nest(x) if x.n > 2 else x
            sub = _two_by_two(top, strategy, inv, tol)
            y = unnest(sub.inverse) if x.n > 2 else sub.inverse
        return refine(x, y, strategy.refine_steps)[0]

    return inv


def _hermitian(t: Matrix, strategy: PivotStrategy, tol: float) -> InversionCertificate:
    m = t.n
    if m == 1:
        inv = try_invert(default_inverter, t[0, 0])
        if inv is None:
            raise NotInvertibleInAmbient("hermitian entry is not invertible")
        return InversionCertificate(t, matrix([[inv]], t.base), t, t, [], DIRECT)
    size = next_power_of_two(m)
    padded = pad_matrix(t, size) if size != m else t
    top = nest(padded) if size > 2 else padded
    inverter = _block_inverter(strategy, tol)
    sub = _two_by_two(top, strategy, inverter, tol, approximant=_imaginary_shift, closure_only=True)
    y = unnest(sub.inverse) if size > 2 else sub.inverse
    notes = list(sub.notes)
    if size != m:
        notes.append(f"padded {m} -> {size}")
    depth = size.bit_length() - 2
    if depth:
        notes.append(f"nested to 2 x 2 blocks, depth {depth}")
    return InversionCertificate(
        t, y.block(m) if size != m else y, sub.base, sub.reduced, sub.factors, sub.path,
        limit_terms=sub.limit_terms, perturbation=sub.perturbation,
        padded_to=size if size != m else None, nest_depth=depth, notes=notes,
    )


def invert_hermitian_symmetric(t: Matrix, strategy: PivotStrategy | None = None,
                               tol: float | None = None) -> InversionCertificate:
    """Invert a hermitian matrix over a symmetric *-algebra.

    Size 2: the hermitian pivot is the limit of the invertibles
    ``t_11 + i eps``, so the 2 x 2 elimination applies.  Size m: pad to the
    next power of two with unit diagonal fill, nest into 2 x 2 blocks and
    recurse; the inverse is the top-left block of the padded inverse.
    """
    alg = t.algebra
    strategy = strategy or PivotStrategy()
    tol = alg.tol if tol is None else tol
    if not alg.has_involution:
        raise NoInvolution(f"{t.base!r} declares no involution")
    if not alg.symmetric:
        raise NotSymmetricAlgebra(f"{t.base!r} is not declared symmetric")
    if not t.is_hermitian(tol):
        raise NotHermitian("matrix differs from its adjoint")
    check_ambient(t)
    return _finalize(_hermitian(t, strategy, tol), tol, "hermitian", strategy.refine_steps)


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def oracle_invert(t: Matrix) -> Matrix:
    """Flatten to one scalar matrix, invert with partial pivoting, reshape back."""
    try:
        return t.algebra.element(t.algebra.invert(t.payload))
    except NotSupported as exc:
        raise NotSupported("oracle needs a scalar- or grid-backed instance") from exc


def oracle_certificate(t: Matrix, tol: float | None = None) -> InversionCertificate:
    tol = t.algebra.tol if tol is None else tol
    cert = InversionCertificate(t, oracle_invert(t), t, t, [], DIRECT)
    return _finalize(cert, tol, "oracle")


METHODS = {
    "triangular": lambda t, tol: triangular_certificate(t, tol),
    "prop4": lambda t, tol: invert_two_by_two(t, tol=tol),
    "thm6": lambda t, tol: invert_essentially_triangular(t, tol=tol),
    "hermitian": lambda t, tol: invert_hermitian_symmetric(t, tol=tol),
    "oracle": lambda t, tol: oracle_certificate(t, tol),
}


def invert(t: Matrix, method: str = "thm6", tol: float | None = None) -> InversionCertificate:
    """Dispatch by method name (``triangular``, ``prop4``, ``thm6``, ``hermitian``, ``oracle``)."""
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}") from None
    return fn(t, tol)
