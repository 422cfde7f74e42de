"""Concrete algebra instances.

========================  ==========================  =====================
instance                   ambient algebra             involution
========================  ==========================  =====================
``ScalarMatrixAlgebra``    itself                      conjugate transpose
``WienerAlgebra``          ``CircleAlgebra``           reversed conjugate
``UnitizedHTAlgebra``      dense operators (l-inf)     kernel adjoint
``SwapAlgebra``            itself                      (x, y) -> (y*, x*)
========================  ==========================  =====================
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import circulant

from .algebra import Algebra, Element, register
from .errors import (
    DegreeMismatch,
    GridMismatch,
    NotInvertible,
    NotSupported,
    SingularToWorkingPrecision,
    ZeroScalarPart,
)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _pairs(a: np.ndarray):
    """Complex array -> nested lists of ``[re, im]`` pairs."""
    if a.ndim == 0:
        z = complex(a)
        return [z.real, z.imag]
    return [_pairs(x) for x in a]


def _unpairs(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise ValueError("expected [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _gaussian(rng: np.random.Generator, shape, scale=1.0) -> np.ndarray:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


# ---------------------------------------------------------------------------
# scalar matrices M_k(C)
# ---------------------------------------------------------------------------

@register("scalar")
class ScalarMatrixAlgebra(Algebra):
    """k x k complex matrices; ``k = 1`` gives the complex numbers."""

    scalar_backed = True
    has_involution = True
    symmetric = True
    embedding_constant = 1.0
    NORMS = ("spectral", "sum", "linf")

    def __init__(self, k: int = 1, norm: str = "spectral", tol: float = 1e-8):
        if k < 1:
            raise ValueError("k must be positive")
        if norm not in self.NORMS:
            raise ValueError(f"norm must be one of {self.NORMS}")
        self.k, self.norm_kind, self.tol = int(k), norm, tol
        # conjugate transpose preserves the spectral and sum norms; row sums
        # become column sums under linf, bounded by k times the original
        self.involution_bound = float(self.k) if norm == "linf" else 1.0
        self._key = ("scalar", self.k, norm)

    @property
    def key(self):
        return self._key

    def describe(self):
        return {"kind": "scalar", "k": self.k, "norm": self.norm_kind}

    @classmethod
    def from_description(cls, desc):
        return cls(k=int(desc.get("k", 1)), norm=desc.get("norm", "spectral"))

    def unit_payload(self):
        return _frozen(np.eye(self.k))

    def zero_payload(self):
        return _frozen(np.zeros((self.k, self.k)))

    def add(self, p, q):
        return _frozen(p + q)

    def mul(self, p, q):
        return _frozen(p @ q)

    def scale(self, p, c):
        return _frozen(c * p)

    def norm(self, p):
        if self.norm_kind == "spectral":
            return float(np.linalg.norm(p, 2)) if self.k > 1 else float(abs(p[0, 0]))
        if self.norm_kind == "sum":
            return float(np.abs(p).sum())
        return float(np.abs(p).sum(axis=1).max())

    def star(self, p):
        return _frozen(p.conj().T)

    def invert(self, p, tol=None):
        s = np.linalg.svd(p, compute_uv=False)
        if s[-1] <= self.rcond * max(s[0], 1e-300):
            raise NotInvertible(f"smallest singular value {s[-1]:.3g}")
        return _frozen(np.linalg.inv(p))

    def flatten(self, p):
        return np.array(p)

    def unflatten(self, m, **hints):
        return _frozen(m)

    def random_payload(self, rng, scale=1.0):
        return _frozen(_gaussian(rng, (self.k, self.k), scale))

    def ambient(self):
        return self

    def embed_payload(self, p):
        return p

    def inessential(self, p):
        # finite dimension: every spectrum is finite
        return True

    def payload_to_json(self, p):
        return _pairs(np.asarray(p))

    def payload_from_json(self, obj):
        a = _unpairs(obj)
        if a.shape != (self.k, self.k):
            raise ValueError(f"expected a {self.k}x{self.k} payload, got shape {a.shape}")
        return _frozen(a)

    def from_array(self, a) -> Element:
        return self.element(_frozen(np.reshape(a, (self.k, self.k))))


def scalars(tol: float = 1e-8) -> ScalarMatrixAlgebra:
    return ScalarMatrixAlgebra(1, tol=tol)


# ---------------------------------------------------------------------------
# Wiener algebra and continuous functions on the circle
# ---------------------------------------------------------------------------

@register("circle")
class CircleAlgebra(Algebra):
    """Functions sampled on ``G`` equally spaced points of the circle, sup norm."""

    grid_backed = True
    has_involution = True
    symmetric = True
    involution_bound = 1.0
    embedding_constant = 1.0

    def __init__(self, size: int, tol: float = 1e-6):
        self.size, self.tol = int(size), tol
        self._key = ("circle", self.size)

    @property
    def key(self):
        return self._key

    def describe(self):
        return {"kind": "circle", "size": self.size}

    @classmethod
    def from_description(cls, desc):
        return cls(int(desc["size"]))

    def unit_payload(self):
        return _frozen(np.ones(self.size))

    def zero_payload(self):
        return _frozen(np.zeros(self.size))

    def add(self, p, q):
        return _frozen(p + q)

    def mul(self, p, q):
        return _frozen(p * q)

    def scale(self, p, c):
        return _frozen(c * p)

    def norm(self, p):
        return float(np.abs(p).max())

    def star(self, p):
        return _frozen(p.conj())

    def invert(self, p, tol=None):
        m = np.abs(p)
        if m.min() <= self.rcond * max(m.max(), 1e-300):
            raise NotInvertible("function vanishes on the grid")
        return _frozen(1.0 / p)

    def flatten(self, p):
        return np.diag(p)

    def unflatten(self, m, **hints):
        return _frozen(np.diag(m))

    def spectrum(self, p):
        return np.array(p)

    def ambient(self):
        return self

    def embed_payload(self, p):
        return p

    def inessential(self, p):
        return not np.any(p)

    def payload_to_json(self, p):
        return _pairs(np.asarray(p))

    def payload_from_json(self, obj):
        return _frozen(_unpairs(obj))


@register("wiener")
class WienerAlgebra(Algebra):
    """Fourier coefficient sequences ``c_q``, ``|q| <= d``, with the l1 norm.

    Indices are taken modulo ``G = 2d + 1`` so the product (convolution) is
    exactly associative; the algebra is the group algebra of the cyclic group
    of order ``G``.  Its characters are evaluations at the ``G`` grid points,
    which is the embedding into :class:`CircleAlgebra`.
    """

    grid_backed = True
    has_involution = True
    symmetric = True
    involution_bound = 1.0
    embedding_constant = 1.0

    def __init__(self, degree: int = 64, tol: float = 1e-6, oversample: int = 8, band: int = 3):
        if degree < 1:
            raise ValueError("degree must be positive")
        self.degree, self.tol, self.oversample, self.band = int(degree), tol, int(oversample), int(band)
        self.size = 2 * self.degree + 1
        self._key = ("wiener", self.degree)
        self._circle = CircleAlgebra(self.size, tol=tol)

    @property
    def key(self):
        return self._key

    def describe(self):
        return {"kind": "wiener", "degree": self.degree}

    @classmethod
    def from_description(cls, desc):
        return cls(int(desc.get("degree", 64)))

    # natural order (-d..d) <-> FFT order
    def values(self, p) -> np.ndarray:
        """Samples at ``t_g = 2 pi g / G``."""
        return self.size * np.fft.ifft(np.fft.ifftshift(p))

    def from_values(self, v) -> np.ndarray:
        return _frozen(np.fft.fftshift(np.fft.fft(v)) / self.size)

    def evaluate(self, p, t) -> np.ndarray:
        """Evaluate the trigonometric polynomial at arbitrary angles."""
        q = np.arange(-self.degree, self.degree + 1)
        return np.exp(1j * np.outer(np.atleast_1d(t), q)) @ p

    def coefficient(self, p, q: int) -> complex:
        return complex(p[q + self.degree])

    def from_coefficients(self, coeffs: dict[int, complex]) -> Element:
        c = np.zeros(self.size, dtype=complex)
        for q, v in coeffs.items():
            if abs(q) > self.degree:
                raise DegreeMismatch(f"index {q} exceeds degree {self.degree}")
            c[q + self.degree] = v
        return self.element(_frozen(c))

    def unit_payload(self):
        return self.from_coefficients({0: 1.0}).payload

    def zero_payload(self):
        return _frozen(np.zeros(self.size))

    def add(self, p, q):
        return _frozen(p + q)

    def mul(self, p, q):
        return wiener_mul_payload(self, p, q)

    def scale(self, p, c):
        return _frozen(c * p)

    def norm(self, p):
        return float(np.abs(p).sum())

    def star(self, p):
        return _frozen(np.conj(p[::-1]))

    def invert(self, p, tol=None):
        v = self.values(p)
        m = np.abs(v)
        if m.min() <= self.rcond * max(m.max(), 1e-300):
            raise NotInvertible("symbol vanishes on the grid")
        return self.from_values(1.0 / v)

    def flatten(self, p):
        # multiplication operator on coefficient vectors, in FFT order
        return circulant(np.fft.ifftshift(p))

    def unflatten(self, m, **hints):
        return _frozen(np.fft.fftshift(np.asarray(m)[:, 0]))

    def spectrum(self, p):
        return self.values(p)

    def random_payload(self, rng, scale=1.0):
        c = np.zeros(self.size, dtype=complex)
        b = min(self.band, self.degree)
        q = np.arange(-b, b + 1)
        c[q + self.degree] = _gaussian(rng, q.size, scale) / (1.0 + np.abs(q)) ** 2
        return _frozen(c)

    def ambient(self):
        return self._circle

    def embed_payload(self, p):
        return _frozen(self.values(p))

    def inessential(self, p):
        # no computable membership test; only zero is claimed
        return not np.any(p)

    def invertible_approximants(self, p, eps):
        # lift the modulus of the symbol by eps on the grid, keeping its phase
        v = self.values(p)
        m = np.abs(v)
        phase = np.where(m > 0, v / np.where(m > 0, m, 1), 1.0)
        return [self.from_values(v + e * phase) for e in eps]

    def payload_to_json(self, p):
        return _pairs(np.asarray(p))

    def payload_from_json(self, obj):
        a = _unpairs(obj)
        if a.shape != (self.size,):
            raise DegreeMismatch(f"expected {self.size} coefficients, got {a.shape}")
        return _frozen(a)


def wiener_mul_payload(alg: WienerAlgebra, p, q):
    """Cyclic convolution of coefficient vectors ordered ``-d..d``."""
    d = alg.degree
    full = np.convolve(p, q)  # exponents -2d..2d
    out = full[d:3 * d + 1].copy()
    out[d + 1:] += full[:d]  # exponents below -d wrap up by G
    out[:d] += full[3 * d + 1:]  # exponents above d wrap down by G
    return _frozen(out)


def wiener_mul(f: Element, g: Element) -> Element:
    """Product of two Wiener elements (coefficient convolution)."""
    if not isinstance(f.algebra, WienerAlgebra) or f.algebra != g.algebra:
        raise DegreeMismatch(f"{f.algebra!r} vs {g.algebra!r}")
    return f * g


def wiener_inverse(f: Element, tol: float | None = None) -> Element:
    """Invert a Wiener element through its reciprocal on an oversampled grid.

    Raises :class:`NotInvertible` if the symbol comes within
    ``sqrt(eps) * |f|`` of zero on the oversampled grid.
    """
    alg = f.algebra
    if not isinstance(alg, WienerAlgebra):
        raise DegreeMismatch(f"not a Wiener element: {alg!r}")
    tol = alg.tol if tol is None else tol
    d = alg.degree
    big = alg.oversample * alg.size
    padded = np.zeros(big, dtype=complex)
    padded[:d + 1] = f.payload[d:]
    padded[big - d:] = f.payload[:d]
    vals = big * np.fft.ifft(padded)
    if np.abs(vals).min() <= np.sqrt(np.finfo(float).eps) * max(f.norm(), 1e-300):
        raise NotInvertible("symbol vanishes (or nearly) on the oversampled grid")
    recip = np.fft.fft(1.0 / vals) / big
    c = np.concatenate([recip[big - d:], recip[:d + 1]])
    s = alg.element(_frozen(c))
    one = alg.unit()
    # Newton polish in the algebra removes the truncation error
    for _ in range(8):
        r = one - f * s
        if r.norm() <= tol * 1e-3:
            break
        s = s + s * r
    if (f * s - one).norm() > tol:
        raise NotInvertible("reciprocal did not reach the requested residual")
    return s


# ---------------------------------------------------------------------------
# Hille-Tamarkin kernels and their unitization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HTKernel:
    """Kernel samples ``K[i, j] = K(y_i, y_j)`` on a quadrature grid."""

    points: np.ndarray
    weights: np.ndarray
    samples: np.ndarray

    @classmethod
    def uniform(cls, samples, m: int | None = None) -> "HTKernel":
        samples = np.asarray(samples, dtype=complex)
        m = samples.shape[0] if m is None else m
        pts = (np.arange(m) + 0.5) / m
        return cls(pts, np.full(m, 1.0 / m), samples)

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    def norm(self) -> float:
        """``max_i sum_j |K(i, j)| mu_j``."""
        return float((np.abs(self.samples) @ self.weights).max())

    def operator(self) -> np.ndarray:
        return self.samples * self.weights[None, :]

    def apply(self, f) -> np.ndarray:
        return self.samples @ (self.weights * np.asarray(f))

    def compose(self, other: "HTKernel") -> "HTKernel":
        return ht_compose(self, other)

    def adjoint(self) -> "HTKernel":
        # adjoint in L2(mu): K*(x, y) = conj K(y, x)
        return HTKernel(self.points, self.weights, self.samples.conj().T)

    def to_json(self) -> dict:
        return {
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
            "samples": _pairs(self.samples),
        }

    @classmethod
    def from_json(cls, obj) -> "HTKernel":
        return cls(np.asarray(obj["points"], float), np.asarray(obj["weights"], float), _unpairs(obj["samples"]))


def ht_compose(k1: HTKernel, k2: HTKernel) -> HTKernel:
    """Kernel of ``T_K1 T_K2``: ``sum_l K1(i, l) K2(l, j) mu_l``."""
    if k1.samples.shape != k2.samples.shape or not np.array_equal(k1.weights, k2.weights):
        raise GridMismatch("kernels live on different grids")
    return HTKernel(k1.points, k1.weights, (k1.samples * k1.weights[None, :]) @ k2.samples)


@register("ht")
class UnitizedHTAlgebra(Algebra):
    """Elements ``c I + T_K`` on a uniform grid of ``m`` points in [0, 1].

    The norm is ``|c| + |||K|||_inf``.  The ambient algebra is the dense
    ``m x m`` operator algebra with the l-infinity operator norm.
    """

    grid_backed = True
    has_involution = True
    symmetric = False
    embedding_constant = 1.0

    def __init__(self, grid: int = 128, tol: float = 1e-6):
        self.m, self.tol = int(grid), tol
        self.points = (np.arange(self.m) + 0.5) / self.m
        self.weights = np.full(self.m, 1.0 / self.m)
        # column sums of |K| are at most m times the largest row sum
        self.involution_bound = float(self.m)
        self._key = ("ht", self.m)
        self._ambient = ScalarMatrixAlgebra(self.m, norm="linf", tol=tol)

    @property
    def key(self):
        return self._key

    def describe(self):
        return {"kind": "ht", "grid": self.m}

    @classmethod
    def from_description(cls, desc):
        return cls(int(desc.get("grid", 128)))

    def kernel(self, p) -> HTKernel:
        return HTKernel(self.points, self.weights, p[1])

    def make(self, c: complex, samples) -> Element:
        k = _frozen(np.broadcast_to(np.asarray(samples, dtype=complex), (self.m, self.m)))
        return self.element((complex(c), k))

    def unit_payload(self):
        return (1.0 + 0j, _frozen(np.zeros((self.m, self.m))))

    def zero_payload(self):
        return (0j, _frozen(np.zeros((self.m, self.m))))

    def add(self, p, q):
        return (p[0] + q[0], _frozen(p[1] + q[1]))

    def scale(self, p, c):
        return (c * p[0], _frozen(c * p[1]))

    def mul(self, p, q):
        c1, k1 = p
        c2, k2 = q
        return (c1 * c2, _frozen(c1 * k2 + c2 * k1 + (k1 * self.weights[None, :]) @ k2))

    def norm(self, p):
        return float(abs(p[0]) + (np.abs(p[1]) @ self.weights).max())

    def star(self, p):
        return (complex(np.conj(p[0])), _frozen(p[1].conj().T))

    def invert(self, p, tol=None):
        return ht_unitized_inverse(self.element(p), tol).payload

    def flatten(self, p):
        return p[0] * np.eye(self.m) + p[1] * self.weights[None, :]

    def unflatten(self, m, scalar=None, **hints):
        if scalar is None:
            raise NotSupported("the scalar part is needed to split an operator into c I + T_K")
        k = (np.asarray(m) - scalar * np.eye(self.m)) / self.weights[None, :]
        return (complex(scalar), _frozen(k))

    def character(self, p):
        return complex(p[0])

    def random_payload(self, rng, scale=1.0):
        return (complex(_gaussian(rng, (), scale)), _frozen(_gaussian(rng, (self.m, self.m), scale)))

    def random_kernel_payload(self, rng, scale=1.0):
        return (0j, _frozen(_gaussian(rng, (self.m, self.m), scale)))

    def ambient(self):
        return self._ambient

    def embed_payload(self, p):
        return _frozen(self.flatten(p))

    def inessential(self, p):
        # a pure kernel operator is compact-like; anything with scalar part is not
        return p[0] == 0

    def payload_to_json(self, p):
        return {"c": [p[0].real, p[0].imag], "kernel": _pairs(np.asarray(p[1]))}

    def payload_from_json(self, obj):
        c = complex(obj["c"][0], obj["c"][1])
        k = _unpairs(obj["kernel"])
        if k.shape != (self.m, self.m):
            raise GridMismatch(f"expected a {self.m}x{self.m} kernel, got {k.shape}")
        return (c, _frozen(k))


def ht_unitized_inverse(u: Element, tol: float | None = None) -> Element:
    """Invert ``c I + T_K`` and split the result back into ``c^-1 I + T_K'``.

    The scalar part of the inverse is forced to ``1/c`` because ``c I + T_K
    -> c`` is multiplicative; the remainder of the dense inverse is read off
    as the kernel ``K'``.
    """
    alg = u.algebra
    if not isinstance(alg, UnitizedHTAlgebra):
        raise GridMismatch(f"not a unitized kernel element: {alg!r}")
    tol = alg.tol if tol is None else tol
    c, _ = u.payload
    if c == 0:
        raise ZeroScalarPart("zero scalar part: the inverse cannot lie in the unitized algebra")
    a = alg.flatten(u.payload)
    try:
        x = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise SingularToWorkingPrecision(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularToWorkingPrecision("non-finite inverse")
    rc = 1.0 / (np.abs(a).sum(axis=1).max() * np.abs(x).sum(axis=1).max())
    if rc <= 1e-14:
        raise SingularToWorkingPrecision(f"reciprocal condition {rc:.3g}")
    inv = alg.element(alg.unflatten(x, scalar=1.0 / c))
    if not np.isfinite(alg.kernel(inv.payload).norm()):
        raise SingularToWorkingPrecision("kernel part of the inverse is not finite")
    one = alg.unit()
    if max((u * inv - one).norm(), (inv * u - one).norm()) > tol:
        raise SingularToWorkingPrecision("inverse residual above tolerance")
    return inv


# ---------------------------------------------------------------------------
# non-symmetric control
# ---------------------------------------------------------------------------

@register("swap")
class SwapAlgebra(Algebra):
    """C^2 with componentwise product and the involution ``(x, y)* = (conj y, conj x)``.

    Not symmetric: ``a = (2, -1/2)`` gives ``1 + a*a = 0``.
    """

    scalar_backed = True
    has_involution = True
    symmetric = False
    involution_bound = 1.0
    embedding_constant = 1.0

    def __init__(self, tol: float = 1e-8):
        self.tol = tol

    @property
    def key(self):
        return ("swap",)

    def describe(self):
        return {"kind": "swap"}

    @classmethod
    def from_description(cls, desc):
        return cls()

    def pair(self, x, y) -> Element:
        return self.element(_frozen([x, y]))

    def unit_payload(self):
        return _frozen([1.0, 1.0])

    def zero_payload(self):
        return _frozen([0.0, 0.0])

    def add(self, p, q):
        return _frozen(p + q)

    def mul(self, p, q):
        return _frozen(p * q)

    def scale(self, p, c):
        return _frozen(c * p)

    def norm(self, p):
        return float(np.abs(p).max())

    def star(self, p):
        return _frozen([np.conj(p[1]), np.conj(p[0])])

    def invert(self, p, tol=None):
        m = np.abs(p)
        if m.min() <= self.rcond * max(m.max(), 1e-300):
            raise NotInvertible("a component vanishes")
        return _frozen(1.0 / p)

    def flatten(self, p):
        return np.diag(p)

    def unflatten(self, m, **hints):
        return _frozen(np.diag(m))

    def spectrum(self, p):
        return np.array(p)

    def random_payload(self, rng, scale=1.0):
        return _frozen(_gaussian(rng, 2, scale))

    def ambient(self):
        return self

    def embed_payload(self, p):
        return p

    def inessential(self, p):
        return True

    def symmetry_witness(self):
        return _frozen([2.0, -0.5])

    def payload_to_json(self, p):
        return _pairs(np.asarray(p))

    def payload_from_json(self, obj):
        a = _unpairs(obj)
        if a.shape != (2,):
            raise ValueError("swap payload must be two [re, im] pairs")
        return _frozen(a)


def inessential_proxy(algebra: Algebra, a: Element) -> bool:
    """Instance-specific stand-in for membership in the inessential ideal."""
    if a.algebra != algebra:
        raise NotSupported(f"element of {a.algebra!r} checked against {algebra!r}")
    return bool(algebra.inessential(a.payload))


def make_algebra(name: str, **params) -> Algebra:
    """Build an instance from a short name used by configs and the CLI."""
    builders = {
        "scalar": lambda: ScalarMatrixAlgebra(int(params.get("k", 2)), params.get("norm", "spectral")),
        "wiener": lambda: WienerAlgebra(int(params.get("degree", 64)), band=int(params.get("band", 3))),
        "ht": lambda: UnitizedHTAlgebra(int(params.get("grid", 128))),
        "swap": lambda: SwapAlgebra(),
    }
    try:
        return builders[name]()
    except KeyError:
        raise NotSupported(f"unknown instance {name!r}") from None
