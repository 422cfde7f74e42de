"""Abstract unital Banach algebras and the element-level procedures built on them.

An :class:`Algebra` is a descriptor: it owns the arithmetic on raw payloads
(numpy arrays, tuples, ...) and the instance parameters.  An :class:`Element`
pairs a payload with its descriptor and gives it operator syntax.  Concrete
instances live in :mod:`nbinv.instances`; square matrices over any algebra
live in :mod:`nbinv.matrix` and are themselves algebras, so nesting works.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from numbers import Number
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (
    AlgebraMismatch,
    NoInvolution,
    NotConvergent,
    NotInvertible,
    NotSupported,
    Overflow,
)

_REGISTRY: dict[str, Callable[[dict], "Algebra"]] = {}


def register(kind: str):
    """Class decorator making ``kind`` loadable through :func:`algebra_from_json`."""

    def deco(cls):
        _REGISTRY[kind] = cls.from_description
        cls.kind = kind
        return cls

    return deco


def algebra_from_json(desc: dict) -> "Algebra":
    try:
        factory = _REGISTRY[desc["kind"]]
    except (KeyError, TypeError) as exc:
        raise NotSupported(f"unknown algebra description {desc!r}") from exc
    return factory(desc)


class Algebra(ABC):
    """Descriptor of a unital normed algebra over the complex numbers.

    Subclasses implement the payload primitives.  Optional capabilities
    (involution, flattening to a finite scalar matrix, an ambient algebra)
    raise :class:`NotSupported` unless overridden.
    """

    kind = "abstract"
    tol = 1e-8
    has_involution = False
    symmetric = False
    involution_bound: float | None = None
    embedding_constant: float | None = None
    scalar_backed = False
    grid_backed = False
    # relative singular-value floor below which an element counts as singular
    rcond = 1e-12

    # -- identity -----------------------------------------------------------
    @property
    @abstractmethod
    def key(self) -> tuple:
        """Hashable identity used for compatibility checks."""

    def __eq__(self, other):
        return isinstance(other, Algebra) and (self is other or self.key == other.key)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}{self.key[1:]}"

    # -- payload primitives -------------------------------------------------
    @abstractmethod
    def unit_payload(self) -> Any: ...

    @abstractmethod
    def zero_payload(self) -> Any: ...

    @abstractmethod
    def add(self, p, q): ...

    @abstractmethod
    def mul(self, p, q): ...

    @abstractmethod
    def scale(self, p, c: complex): ...

    @abstractmethod
    def norm(self, p) -> float: ...

    def neg(self, p):
        return self.scale(p, -1.0)

    def star(self, p):
        raise NoInvolution(f"{self!r} declares no involution")

    def invert(self, p, tol: float | None = None):
        raise NotSupported(f"{self!r} has no inversion routine")

    def flatten(self, p) -> np.ndarray:
        raise NotSupported(f"{self!r} cannot be flattened to a scalar matrix")

    def unflatten(self, m: np.ndarray, **hints):
        raise NotSupported(f"{self!r} cannot be rebuilt from a scalar matrix")

    def character(self, p) -> complex | None:
        """A unital multiplicative functional, when the instance has a canonical one."""
        return None

    def random_payload(self, rng: np.random.Generator, scale: float = 1.0):
        raise NotSupported(f"{self!r} has no sampler")

    def ambient(self) -> "Algebra | None":
        return None

    def embed_payload(self, p):
        raise NotSupported(f"{self!r} declares no ambient embedding")

    def inessential(self, p) -> bool:
        """Computable stand-in for membership in the inessential ideal."""
        return False

    def symmetry_witness(self):
        """Payload of an element ``a`` with ``1 + a*a`` singular, if one is known."""
        return None

    # -- serialization ------------------------------------------------------
    @abstractmethod
    def describe(self) -> dict: ...

    @classmethod
    def from_description(cls, desc: dict) -> "Algebra":
        raise NotSupported(cls.__name__)

    @abstractmethod
    def payload_to_json(self, p) -> Any: ...

    @abstractmethod
    def payload_from_json(self, obj) -> Any: ...

    # -- derived helpers ----------------------------------------------------
    def element(self, payload) -> "Element":
        return Element(self, payload)

    def unit(self) -> "Element":
        return self.element(self.unit_payload())

    def zero(self) -> "Element":
        return self.element(self.zero_payload())

    def scalar(self, c: complex) -> "Element":
        return self.element(self.scale(self.unit_payload(), c))

    def random(self, rng: np.random.Generator, scale: float = 1.0) -> "Element":
        return self.element(self.random_payload(rng, scale))

    def spectrum(self, p) -> np.ndarray:
        """Spectrum computed from the flattened representation."""
        return np.linalg.eigvals(self.flatten(p))

    def is_invertible(self, p) -> bool:
        """Cheap invertibility decision from the flattened representation."""
        try:
            m = self.flatten(p)
        except NotSupported:
            try:
                self.invert(p)
            except NotInvertible:
                return False
            return True
        s = np.linalg.svd(m, compute_uv=False)
        return bool(s.size and s[-1] > self.rcond * max(s[0], 1e-300))

    def try_inverse(self, p):
        """Return the inverse payload, or ``None`` when the instance routine fails."""
        try:
            q = self.invert(p)
        except NotInvertible:
            return None
        one = self.unit_payload()
        r = max(
            self.norm(self.add(self.mul(p, q), self.neg(one))),
            self.norm(self.add(self.mul(q, p), self.neg(one))),
        )
        return q if r <= self.tol else None

    def shift_for(self, p, eps: float, angles: int = 64) -> complex:
        """Complex number of modulus ``eps`` placed as far as possible from ``-spectrum(p)``.

        Angle zero is preferred whenever it is tied for best.
        """
        spec = np.asarray(self.spectrum(p)).ravel()
        if spec.size == 0:
            return complex(eps)
        cands = eps * np.exp(2j * np.pi * np.arange(angles) / angles)
        dist = np.min(np.abs(cands[:, None] + spec[None, :]), axis=1)
        best = np.flatnonzero(dist >= dist.max() * (1 - 1e-12))[0]
        return complex(cands[best])

    def invertible_approximants(self, p, eps: Sequence[float]) -> list:
        """Invertible payloads ``p + lambda_j * 1`` with ``|lambda_j| = eps[j]``.

        The plain real shift is used when it verifies; otherwise the shift is
        rotated away from the negated spectrum.
        """
        one = self.unit_payload()
        out = []
        for e in eps:
            q = self.add(p, self.scale(one, e))
            if self.try_inverse(q) is None:
                try:
                    lam = self.shift_for(p, e)
                except NotSupported as exc:
                    raise NotSupported(f"{self!r} cannot verify a shift") from exc
                q = self.add(p, self.scale(one, lam))
                if self.try_inverse(q) is None:
                    raise NotSupported(f"no verified shift of size {e} for {self!r}")
            out.append(q)
        return out


def _is_scalar(x) -> bool:
    return isinstance(x, Number) or (isinstance(x, np.generic) and np.isscalar(x))


class Element:
    """Immutable value of a unital algebra; arithmetic is delegated to the descriptor."""

    __slots__ = ("algebra", "payload")

    def __init__(self, algebra: Algebra, payload):
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "payload", payload)

    def __setattr__(self, name, value):
        raise AttributeError("elements are immutable")

    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"cannot combine element with {type(other).__name__}")
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise self._mismatch(other)

    def _mismatch(self, other):
        return AlgebraMismatch(f"{self.algebra!r} vs {other.algebra!r}")

    def _wrap(self, payload):
        return self.algebra.element(payload)

    def __add__(self, other):
        if _is_scalar(other):
            other = self.algebra.scalar(other)
        self._same(other)
        return self._wrap(self.algebra.add(self.payload, other.payload))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(self.algebra.neg(self.payload))

    def __sub__(self, other):
        if _is_scalar(other):
            other = self.algebra.scalar(other)
        self._same(other)
        return self._wrap(self.algebra.add(self.payload, self.algebra.neg(other.payload)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return self._wrap(self.algebra.scale(self.payload, complex(other)))
        self._same(other)
        return self._wrap(self.algebra.mul(self.payload, other.payload))

    def __rmul__(self, other):
        if _is_scalar(other):
            return self._wrap(self.algebra.scale(self.payload, complex(other)))
        return NotImplemented

    def __truediv__(self, c):
        if not _is_scalar(c):
            return NotImplemented
        return self._wrap(self.algebra.scale(self.payload, 1.0 / complex(c)))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.algebra.unit(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def norm(self) -> float:
        return float(self.algebra.norm(self.payload))

    def star(self) -> "Element":
        return self._wrap(self.algebra.star(self.payload))

    def inverse(self, tol: float | None = None) -> "Element":
        return self._wrap(self.algebra.invert(self.payload, tol))

    def flatten(self) -> np.ndarray:
        return self.algebra.flatten(self.payload)

    def embed(self) -> "Element":
        amb = self.algebra.ambient()
        if amb is None:
            raise NotSupported(f"{self.algebra!r} declares no ambient algebra")
        return amb.element(self.algebra.embed_payload(self.payload))

    def is_invertible(self) -> bool:
        return self.algebra.is_invertible(self.payload)

    def distance(self, other: "Element") -> float:
        return (self - other).norm()

    def is_hermitian(self, tol: float | None = None) -> bool:
        tol = self.algebra.tol if tol is None else tol
        return self.distance(self.star()) <= tol * (1.0 + self.norm())

    def to_json(self):
        return self.algebra.payload_to_json(self.payload)

    def __repr__(self):
        return f"Element({self.algebra!r}, {self.payload!r})"


# ---------------------------------------------------------------------------
# element-level procedures
# ---------------------------------------------------------------------------

def _two_sided_residual(a: Element, s: Element) -> tuple[float, float]:
    one = a.algebra.unit()
    return (a * s - one).norm(), (s * a - one).norm()


def neumann_inverse(a: Element, tol: float | None = None, max_terms: int = 500) -> Element:
    """Invert ``a`` by summing the geometric series in ``1 - a``.

    The series is summed until both one-sided residuals, scaled by the
    size of the partial sum, are within ``tol``.
    Divergence (terms growing past 1e8) or an exhausted budget raises
    :class:`NotConvergent`.
    """
    tol = a.algebra.tol if tol is None else tol
    one = a.algebra.unit()
    x = one - a
    s, power = one, x
    for _ in range(max_terms + 1):
        pn = power.norm()
        if not math.isfinite(pn) or pn > 1e8:
            raise NotConvergent(f"series diverges (|1 - a| = {x.norm():.3g})")
        if pn <= tol:
            left, right = _two_sided_residual(a, s)
            # the error in s is about |s| times the residual
            if max(left, right) * max(1.0, s.norm()) <= tol:
                return s
        s = s + power
        power = power * x
    raise NotConvergent(f"tolerance {tol:g} unmet after {max_terms} terms")


@dataclass
class SpectralReport:
    """Spectral-radius estimates from the norm sequence ``|a^N|^(1/N)``."""

    label: str
    powers: list[int] = field(default_factory=list)
    log_norms: list[float] = field(default_factory=list)
    estimate_a: float = 0.0
    estimate_b: float | None = None
    norm: float = 0.0
    converged: bool = True
    discrepancy: float | None = None

    @property
    def rhos(self) -> list[float]:
        return [math.exp(l / n) if l > -math.inf else 0.0 for n, l in zip(self.powers, self.log_norms)]

    @property
    def estimate(self) -> float:
        return self.estimate_a

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "powers": self.powers,
            "rhos": self.rhos,
            "estimate_a": self.estimate_a,
            "estimate_b": self.estimate_b,
            "norm": self.norm,
            "converged": self.converged,
            "discrepancy": self.discrepancy,
        }


def gelfand_radius(a: Element, n_max: int = 1024, label: str = "") -> SpectralReport:
    """Estimate the spectral radius from ``|a^N|^(1/N)``, ``N = 2, 4, ..., n_max``.

    Powers are formed by repeated squaring of ``a / |a|`` with the scale kept
    in log space, so nothing overflows.  The final estimate multiplies
    ``|a^n_max|^(1/n_max)`` by the clamped correction
    ``(|a^n_max| / |a^(n_max/2)|^2)^(1/n_max)``.
    """
    if n_max < 4 or n_max & (n_max - 1):
        raise ValueError("n_max must be a power of two and at least 4")
    na = a.norm()
    if not math.isfinite(na):
        raise Overflow("element norm is not finite")
    report = SpectralReport(label=label, norm=na)
    log_n = math.log(na) if na > 0 else -math.inf
    y = a / na if na > 0 else a
    logs = {1: log_n}
    n = 1
    while n < n_max:
        if log_n == -math.inf:
            n *= 2
            logs[n] = -math.inf
            continue
        z = y * y
        nz = z.norm()
        if not math.isfinite(nz):
            raise Overflow("normalised power overflowed")
        n *= 2
        if nz == 0.0:
            log_n = -math.inf
        else:
            log_n = 2 * log_n + math.log(nz)
            y = z / nz
        logs[n] = log_n
    report.powers = [k for k in sorted(logs) if k >= 2]
    report.log_norms = [logs[k] for k in report.powers]
    top, half = logs[n_max], logs[n_max // 2]
    if top == -math.inf:
        report.estimate_a = 0.0
        return report
    corr = math.exp((top - 2 * half) / n_max)
    corr = min(max(corr, 0.5), 2.0)
    report.estimate_a = math.exp(top / n_max) * corr
    rhos = report.rhos
    report.converged = abs(rhos[-1] - rhos[-2]) <= 1e-2 * max(rhos[-1], 1e-300)
    return report


def approximate_by_invertibles(
    a: Element, m: int, schedule: Callable[[int], float] | None = None
) -> list[Element]:
    """Invertible elements converging to ``a``.

    ``schedule(j)`` gives the perturbation size of term ``j`` (1-based); the
    default is ``1/j``.  An invertible ``a`` yields the constant sequence.
    """
    alg = a.algebra
    if alg.try_inverse(a.payload) is not None:
        return [a] * m
    schedule = schedule or (lambda j: 1.0 / j)
    eps = [float(schedule(j)) for j in range(1, m + 1)]
    return [alg.element(q) for q in alg.invertible_approximants(a.payload, eps)]


@dataclass
class SymmetryWitness:
    ok: bool
    witness: Element | None
    residual: float
    detail: str = ""


def symmetric_witness_check(a: Element) -> SymmetryWitness:
    """Decide whether ``1 + a*a`` is invertible, returning its inverse as witness."""
    alg = a.algebra
    if not alg.has_involution:
        raise NoInvolution(f"{alg!r} declares no involution")
    b = alg.unit() + a.star() * a
    try:
        w = b.inverse()
    except NotInvertible as exc:
        return SymmetryWitness(False, None, residual=b.norm(), detail=f"1 + a*a not invertible: {exc}")
    left, right = _two_sided_residual(b, w)
    res = max(left, right)
    if res > alg.tol:
        return SymmetryWitness(False, None, residual=res, detail="inverse residual above tolerance")
    return SymmetryWitness(True, w, residual=res)
