"""Square matrices over an algebra, with the sum norm.

``MatrixAlgebra(base, n)`` is itself an :class:`~nbinv.algebra.Algebra`, so
``MatrixAlgebra(MatrixAlgebra(A, m), 2)`` is a legitimate algebra and
:func:`nest` / :func:`unnest` move between the two views of the same matrix.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lapack, lu_factor

from .algebra import Algebra, Element, algebra_from_json, register
from .errors import (
    BadDimension,
    DimensionMismatch,
    NotInvertible,
    NotSupported,
    OddDimension,
    ParseError,
    PivotNotUnit,
    SingularToWorkingPrecision,
    ZeroScalarPart,
)


def reciprocal_condition(a: np.ndarray) -> float:
    """LAPACK estimate of ``1 / cond_1(a)`` from an LU factorization; 0 if singular."""
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, _ = lu_factor(a, check_finite=False)
    if not np.all(np.isfinite(lu)) or np.any(np.diag(lu) == 0):
        return 0.0
    rc, info = lapack.zgecon(lu, np.abs(a).sum(axis=0).max(), norm="1")
    return float(rc) if info == 0 else 0.0


@register("matrix")
class MatrixAlgebra(Algebra):
    """M_n(A) with ``|T| = sum_jk |t_jk|_A``."""

    def __init__(self, base: Algebra, n: int):
        if n < 1:
            raise BadDimension("matrix size must be positive")
        self.base, self.n = base, int(n)
        self.tol = base.tol
        self.has_involution = base.has_involution
        self.symmetric = base.symmetric
        self.involution_bound = base.involution_bound
        self.embedding_constant = base.embedding_constant
        self.scalar_backed = base.scalar_backed
        self.grid_backed = base.grid_backed
        self._key = ("matrix", self.n, base.key)

    @property
    def key(self):
        return self._key

    def describe(self):
        return {"kind": "matrix", "n": self.n, "base": self.base.describe()}

    @classmethod
    def from_description(cls, desc):
        return cls(algebra_from_json(desc["base"]), int(desc["n"]))

    def element(self, payload) -> "Matrix":
        return Matrix(self, payload)

    def _build(self, f) -> tuple:
        return tuple(tuple(f(j, k) for k in range(self.n)) for j in range(self.n))

    # payload = n-tuple of n-tuples of base Elements
    def unit_payload(self):
        one, zero = self.base.unit(), self.base.zero()
        return self._build(lambda j, k: one if j == k else zero)

    def zero_payload(self):
        zero = self.base.zero()
        return self._build(lambda j, k: zero)

    def add(self, p, q):
        return self._build(lambda j, k: p[j][k] + q[j][k])

    def neg(self, p):
        return self._build(lambda j, k: -p[j][k])

    def scale(self, p, c):
        return self._build(lambda j, k: p[j][k] * c)

    def mul(self, p, q):
        n = self.n

        def entry(j, k):
            acc = p[j][0] * q[0][k]
            for l in range(1, n):
                acc = acc + p[j][l] * q[l][k]
            return acc

        return self._build(entry)

    def norm(self, p):
        return float(sum(x.norm() for row in p for x in row))

    def star(self, p):
        return self._build(lambda j, k: p[k][j].star())

    def flatten(self, p):
        return np.block([[x.flatten() for x in row] for row in p])

    def _block_size(self) -> int:
        return self.base.flatten(self.base.unit_payload()).shape[0]

    def unflatten(self, m, scalars=None, **hints):
        b = self._block_size()
        m = np.asarray(m)
        if m.shape != (b * self.n, b * self.n):
            raise DimensionMismatch(f"expected {(b * self.n,) * 2}, got {m.shape}")

        def entry(j, k):
            blk = m[j * b:(j + 1) * b, k * b:(k + 1) * b]
            extra = {} if scalars is None else {"scalar": scalars[j][k]}
            return self.base.element(self.base.unflatten(blk, **extra))

        return self._build(entry)

    def characters(self, p) -> np.ndarray | None:
        chars = [[self.base.character(x.payload) for x in row] for row in p]
        if any(c is None for row in chars for c in row):
            return None
        return np.array(chars, dtype=complex)

    def invert(self, p, tol=None):
        """Dense inversion of the flattened matrix (LU with partial pivoting)."""
        a = self.flatten(p)
        try:
            x = np.linalg.inv(a)
        except np.linalg.LinAlgError as exc:
            raise SingularToWorkingPrecision(str(exc)) from exc
        if not np.all(np.isfinite(x)):
            raise SingularToWorkingPrecision("non-finite inverse")
        rc = 1.0 / (np.abs(a).sum(axis=0).max() * np.abs(x).sum(axis=0).max())
        if rc <= 1e-14:
            raise SingularToWorkingPrecision(f"reciprocal condition {rc:.3g}")
        chars = self.characters(p)
        scal = None
        if chars is not None:
            # the entrywise character is multiplicative on M_n, so it fixes
            # the scalar parts of the inverse
            if np.linalg.svd(chars, compute_uv=False)[-1] <= 1e-12 * max(1.0, np.abs(chars).max()):
                raise ZeroScalarPart("scalar-part matrix is singular")
            scal = np.linalg.inv(chars)
        return self.unflatten(x, scalars=scal)

    def is_invertible(self, p):
        try:
            a = self.flatten(p)
        except NotSupported:
            return super().is_invertible(p)
        return reciprocal_condition(a) > self.rcond

    def spectrum(self, p):
        return np.linalg.eigvals(self.flatten(p))

    def random_payload(self, rng, scale=1.0):
        return self._build(lambda j, k: self.base.random(rng, scale))

    def ambient(self):
        amb = self.base.ambient()
        return None if amb is None else MatrixAlgebra(amb, self.n)

    def embed_payload(self, p):
        return self._build(lambda j, k: p[j][k].embed())

    def inessential(self, p):
        return all(self.base.inessential(x.payload) for row in p for x in row)

    def payload_to_json(self, p):
        return [[x.to_json() for x in row] for row in p]

    def payload_from_json(self, obj):
        if len(obj) != self.n or any(len(row) != self.n for row in obj):
            raise DimensionMismatch(f"expected {self.n}x{self.n} entries")
        return self._build(lambda j, k: self.base.element(self.base.payload_from_json(obj[j][k])))


class Matrix(Element):
    """Element of :class:`MatrixAlgebra` with entry access (0-based)."""

    __slots__ = ()

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def base(self) -> Algebra:
        return self.algebra.base

    @property
    def rows(self) -> tuple:
        return self.payload

    def __getitem__(self, jk) -> Element:
        j, k = jk
        return self.payload[j][k]

    def _mismatch(self, other):
        return DimensionMismatch(f"{self.algebra!r} vs {other.algebra!r}")

    def replace(self, j: int, k: int, value: Element) -> "Matrix":
        rows = [list(r) for r in self.payload]
        rows[j][k] = value
        return matrix(rows, self.base)

    def minor(self, start: int = 1) -> "Matrix":
        """Lower-right block obtained by deleting the first ``start`` rows and columns."""
        return matrix([r[start:] for r in self.payload[start:]], self.base)

    def block(self, size: int) -> "Matrix":
        """Top-left ``size x size`` block."""
        return matrix([r[:size] for r in self.payload[:size]], self.base)

    def is_upper_triangular(self, tol: float | None = None) -> bool:
        tol = self.algebra.tol if tol is None else tol
        return all(self[j, k].norm() <= tol for j in range(self.n) for k in range(j))


def matrix(rows: Sequence[Sequence[Element]], base: Algebra | None = None) -> Matrix:
    """Build a matrix from nested sequences of elements sharing one algebra."""
    rows = [list(r) for r in rows]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise BadDimension("matrix must be square and non-empty")
    base = base or rows[0][0].algebra
    for r in rows:
        for x in r:
            if x.algebra is not base and x.algebra != base:
                raise DimensionMismatch(f"entry in {x.algebra!r}, expected {base!r}")
    return Matrix(MatrixAlgebra(base, n), tuple(tuple(r) for r in rows))


def from_scalars(rows, k: int = 1, base: Algebra | None = None) -> Matrix:
    """Matrix over M_k(C) from nested lists of numbers (k = 1) or k x k arrays."""
    from .instances import ScalarMatrixAlgebra

    base = base or ScalarMatrixAlgebra(k)
    return matrix([[base.from_array(np.asarray(x, dtype=complex)) for x in r] for r in rows], base)


def identity(base: Algebra, n: int) -> Matrix:
    return MatrixAlgebra(base, n).unit()


def zeros(base: Algebra, n: int) -> Matrix:
    return MatrixAlgebra(base, n).zero()


def diagonal(entries: Sequence[Element]) -> Matrix:
    base = entries[0].algebra
    zero = base.zero()
    n = len(entries)
    return matrix([[entries[j] if j == k else zero for k in range(n)] for j in range(n)], base)


def mat_norm(t: Matrix) -> float:
    return t.norm()


def mat_mul(t: Matrix, s: Matrix) -> Matrix:
    if t.algebra != s.algebra:
        raise DimensionMismatch(f"{t.algebra!r} vs {s.algebra!r}")
    return t * s


def flatten(t: Matrix) -> np.ndarray:
    return t.flatten()


# ---------------------------------------------------------------------------
# GL_n equivalence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GLPair:
    """Invertible left and right factors with their certified inverses."""

    left: Matrix
    right: Matrix
    left_inv: Matrix
    right_inv: Matrix
    label: str = ""

    def apply(self, t: Matrix) -> Matrix:
        return self.left * t * self.right

    def undo(self, s: Matrix) -> Matrix:
        return self.left_inv * s * self.right_inv

    def residuals(self) -> tuple[float, float, float, float]:
        one = self.left.algebra.unit()
        return (
            (self.left * self.left_inv - one).norm(),
            (self.left_inv * self.left - one).norm(),
            (self.right * self.right_inv - one).norm(),
            (self.right_inv * self.right - one).norm(),
        )

    def embed_lower_right(self, n: int) -> "GLPair":
        """Direct sum ``I_(n-m) (+) pair`` for a pair acting on an m x m block."""
        f = lambda x: direct_sum_identity(x, n)
        return GLPair(f(self.left), f(self.right), f(self.left_inv), f(self.right_inv), self.label)

    def to_json(self, include_matrices: bool = False) -> dict:
        out = {
            "label": self.label,
            "n": self.left.n,
            "left_norm": self.left.norm(),
            "right_norm": self.right.norm(),
        }
        if include_matrices:
            out["left"] = matrix_to_json(self.left)
            out["right"] = matrix_to_json(self.right)
        return out

    @staticmethod
    def identity(alg: MatrixAlgebra, label: str = "identity") -> "GLPair":
        one = alg.unit()
        return GLPair(one, one, one, one, label)


def permutation(base: Algebra, n: int, i: int, j: int) -> Matrix:
    """Self-inverse permutation matrix exchanging indices ``i`` and ``j``."""
    one, zero = base.unit(), base.zero()
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return matrix([[one if perm[r] == c else zero for c in range(n)] for r in range(n)], base)


def interchange_pair(t: Matrix, rows: tuple[int, int] | None = None, cols: tuple[int, int] | None = None) -> GLPair:
    """Row and/or column interchange realised as a GL pair (each factor self-inverse)."""
    one = t.algebra.unit()
    p = permutation(t.base, t.n, *rows) if rows else one
    q = permutation(t.base, t.n, *cols) if cols else one
    parts = ([f"rows {rows[0] + 1}<->{rows[1] + 1}"] if rows else []) + (
        [f"cols {cols[0] + 1}<->{cols[1] + 1}"] if cols else [])
    return GLPair(p, q, p, q, "interchange " + ", ".join(parts))


def check_gl_equivalence(t: Matrix, s: Matrix, pair: GLPair, tol: float) -> bool:
    """True iff ``|V T W - S| <= tol``."""
    if not (t.algebra == s.algebra == pair.left.algebra == pair.right.algebra):
        raise DimensionMismatch("equivalence check needs matching dimensions")
    return (pair.apply(t) - s).norm() <= tol


def replay(t: Matrix, pairs: Iterable[GLPair]) -> Matrix:
    for p in pairs:
        t = p.apply(t)
    return t


def build_elimination_pair(t: Matrix, tol: float | None = None) -> GLPair:
    """Factors clearing the first row and column of ``t`` around a unit pivot.

    ``V`` has ``-t_j1`` below the diagonal in column 1 and ``W`` has ``-t_1k``
    right of the diagonal in row 1; inverses flip those signs.
    """
    tol = t.algebra.tol if tol is None else tol
    base, n = t.base, t.n
    one, zero = base.unit(), base.zero()
    if (t[0, 0] - one).norm() > tol:
        raise PivotNotUnit(f"pivot differs from the unit by {(t[0, 0] - one).norm():.3g}")

    def lower(sign):
        return matrix([[one if j == k else (sign * t[j, 0] if k == 0 else zero) for k in range(n)]
                       for j in range(n)], base)

    def upper(sign):
        return matrix([[one if j == k else (sign * t[0, k] if j == 0 else zero) for k in range(n)]
                       for j in range(n)], base)

    return GLPair(lower(-1), upper(-1), lower(1), upper(1), "eliminate first row and column")


# ---------------------------------------------------------------------------
# padding and nesting
# ---------------------------------------------------------------------------

def next_power_of_two(m: int) -> int:
    return 1 << max(0, (m - 1).bit_length())


def pad_matrix(t: Matrix, size: int | None = None) -> Matrix:
    """Embed ``t`` as the top-left block of a ``size x size`` matrix with unit fill.

    ``size`` defaults to the next power of two.
    """
    m = t.n
    size = next_power_of_two(m) if size is None else size
    if size < m:
        raise BadDimension(f"cannot pad a {m}x{m} matrix to {size}")
    one, zero = t.base.unit(), t.base.zero()
    rows = [[t[j, k] if j < m and k < m else (one if j == k else zero) for k in range(size)]
            for j in range(size)]
    return matrix(rows, t.base)


def direct_sum_identity(t: Matrix, size: int) -> Matrix:
    """``I_(size-m) (+) t``: place ``t`` in the lower-right corner."""
    m = t.n
    off = size - m
    if off < 0:
        raise BadDimension(f"cannot embed a {m}x{m} matrix in {size}")
    one, zero = t.base.unit(), t.base.zero()
    rows = [[t[j - off, k - off] if j >= off and k >= off else (one if j == k else zero)
             for k in range(size)] for j in range(size)]
    return matrix(rows, t.base)


def nest(t: Matrix) -> Matrix:
    """View a 2m x 2m matrix over A as a 2 x 2 matrix over M_m(A)."""
    if t.n % 2:
        raise OddDimension(f"cannot nest odd size {t.n}")
    m = t.n // 2
    inner = MatrixAlgebra(t.base, m)

    def blk(r, c):
        return inner.element(tuple(tuple(t[j, k] for k in range(c * m, (c + 1) * m))
                                   for j in range(r * m, (r + 1) * m)))

    return matrix([[blk(0, 0), blk(0, 1)], [blk(1, 0), blk(1, 1)]], inner)


def unnest(t: Matrix) -> Matrix:
    """Inverse of :func:`nest`."""
    inner = t.base
    if not isinstance(inner, MatrixAlgebra):
        raise NotSupported("entries are not matrices")
    m = inner.n
    rows = []
    for r in range(t.n):
        for j in range(m):
            rows.append([t[r, c][j, k] for c in range(t.n) for k in range(m)])
    return matrix(rows, inner.base)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def matrix_to_json(t: Matrix) -> dict:
    return {"n": t.n, "instance": t.base.describe(), "entries": t.algebra.payload_to_json(t.payload)}


def matrix_from_json(obj) -> Matrix:
    try:
        base = algebra_from_json(obj["instance"])
        alg = MatrixAlgebra(base, int(obj["n"]))
        return alg.element(alg.payload_from_json(obj["entries"]))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, NotSupported) as exc:
        raise ParseError(f"malformed matrix document: {exc}") from exc


def dumps(t: Matrix) -> str:
    return json.dumps(matrix_to_json(t), sort_keys=True, separators=(",", ":"))


def loads(text: str) -> Matrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return matrix_from_json(obj)
