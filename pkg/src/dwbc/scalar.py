"""Scalar backends and the three Boltzmann weights of the six-vertex model.

Every spectral parameter enters in exponentiated form,

    t = exp(lambda),   s = exp(mu),   q = exp(gamma),

so the trigonometric weights

    a(lambda) = sinh(lambda + gamma) = (t*q - 1/(t*q)) / 2
    b(lambda) = sinh(lambda)         = (t - 1/t) / 2
    c         = sinh(gamma)          = (q - 1/q) / 2

become rational functions of (t, q).  On the exact backend (arbitrary
precision rationals) every model identity is therefore decidable by exact
comparison; the float backend evaluates the same expressions in complex
double precision and compares up to a relative tolerance.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence


class DomainError(ValueError):
    """Invalid scalar or parameter input (zero where nonzero is required, etc.)."""


class GenericityError(DomainError):
    """Two spectral parameters collide where a b(lambda_m - lambda_n) denominator appears."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class SingularityError(DomainError):
    """A specific denominator factor vanishes; the message names the factor."""

    def __init__(self, message: str, factor: str | None = None):
        super().__init__(message)
        self.factor = factor


class CapError(DomainError):
    """Requested lattice size exceeds a configured cost cap."""


def weight_a(u, q):
    """a-weight sinh(lambda + gamma) with u = exp(lambda), q = exp(gamma)."""
    if u == 0 or q == 0:
        raise DomainError("weight_a requires nonzero u and q")
    uq = u * q
    return (uq - 1 / uq) / 2


def weight_b(u):
    """b-weight sinh(lambda) with u = exp(lambda)."""
    if u == 0:
        raise DomainError("weight_b requires nonzero u")
    return (u - 1 / u) / 2


def weight_c(q):
    """c-weight sinh(gamma) with q = exp(gamma); constant in lambda."""
    if q == 0:
        raise DomainError("weight_c requires nonzero q")
    return (q - 1 / q) / 2


class ExactBackend:
    """Arbitrary-precision rational scalars (`fractions.Fraction`).

    Fractions are always stored reduced with positive denominator, so equality
    is exact and canonical.
    """

    name = "exact"

    def scalar(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, str)):
            return Fraction(value)
        if isinstance(value, float):
            raise DomainError(
                "exact backend does not accept floats; pass 'p/q' strings or Fractions"
            )
        raise DomainError(f"cannot coerce {value!r} to an exact scalar")

    def is_zero(self, x) -> bool:
        return x == 0

    def eq(self, x, y) -> bool:
        return x == y

    def to_json(self, x) -> str:
        return str(x)

    def from_json(self, doc) -> Fraction:
        return self.scalar(doc)


class FloatBackend:
    """Complex double-precision scalars with relative-tolerance comparison."""

    name = "float"

    def __init__(self, tol: float = 1e-9):
        # residuals of the largest verification sums are O(L! * L^2) terms wide
        self.tol = tol

    def scalar(self, value) -> complex:
        if isinstance(value, complex):
            return value
        if isinstance(value, (int, float, Fraction)):
            return complex(value)
        if isinstance(value, str):
            return complex(Fraction(value))
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return complex(float(value[0]), float(value[1]))
        raise DomainError(f"cannot coerce {value!r} to a float scalar")

    def from_spectral(self, value) -> complex:
        """Exponentiate a raw spectral parameter (lambda, mu or gamma) once."""
        return cmath.exp(complex(value))

    def is_zero(self, x) -> bool:
        return abs(x) <= self.tol

    def eq(self, x, y) -> bool:
        return abs(x - y) <= self.tol * max(1.0, abs(x), abs(y))

    def to_json(self, x) -> list[float]:
        z = complex(x)
        return [z.real, z.imag]

    def from_json(self, doc) -> complex:
        return self.scalar(doc)


EXACT = ExactBackend()
FLOAT = FloatBackend()


def get_backend(name: str, tol: float | None = None):
    if name == "exact":
        return EXACT
    if name == "float":
        return FloatBackend(tol) if tol is not None else FLOAT
    raise DomainError(f"unknown backend {name!r}")


@dataclass(frozen=True)
class ParamSet:
    """Spectral data of an L x L lattice: t_i = e^{lambda_i}, s_j = e^{mu_j}, q = e^{gamma}."""

    t: tuple
    s: tuple
    q: Any
    backend: Any = EXACT

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(self.t))
        object.__setattr__(self, "s", tuple(self.s))
        if len(self.t) != len(self.s) or not self.t:
            raise DomainError("t and s must be nonempty lists of equal length L")
        for name, vals in (("t", self.t), ("s", self.s)):
            for k, v in enumerate(vals):
                if v == 0:
                    raise DomainError(f"{name}[{k}] must be nonzero")
        if self.q == 0:
            raise DomainError("q must be nonzero")
        if self.backend.eq(self.q * self.q, self.backend.scalar(1)):
            raise DomainError("q^2 = 1 makes the c-weight vanish; the model degenerates")

    @property
    def L(self) -> int:
        return len(self.t)

    @classmethod
    def build(cls, t: Sequence, s: Sequence, q, backend=EXACT) -> "ParamSet":
        sc = backend.scalar
        return cls(tuple(sc(v) for v in t), tuple(sc(v) for v in s), sc(q), backend)

    @classmethod
    def from_spectral(cls, lambdas: Sequence, mus: Sequence, gamma, backend=None) -> "ParamSet":
        """Float-backend ingestion of raw lambda/mu/gamma; exponentiates once."""
        backend = backend or FLOAT
        if not isinstance(backend, FloatBackend):
            raise DomainError("raw spectral parameters require the float backend")
        ex = backend.from_spectral
        return cls(tuple(ex(v) for v in lambdas), tuple(ex(v) for v in mus), ex(gamma), backend)

    def generic_violation(self) -> tuple[int, int] | None:
        """First pair (m, n), 1-based, with t_m = +-t_n, or None if generic."""
        eq = self.backend.eq
        for m in range(self.L):
            for n in range(m + 1, self.L):
                if eq(self.t[m], self.t[n]) or eq(self.t[m], -self.t[n]):
                    return (m + 1, n + 1)
        return None

    def is_generic(self) -> bool:
        return self.generic_violation() is None

    def require_generic(self):
        pair = self.generic_violation()
        if pair is not None:
            m, n = pair
            raise GenericityError(
                f"t_{m} = +-t_{n} ({self.t[m - 1]} vs {self.t[n - 1]}): "
                f"b(lambda_{m} - lambda_{n}) vanishes in a denominator",
                pair=pair,
            )

    def with_t(self, index: int, value) -> "ParamSet":
        """Copy with t[index] (0-based) replaced."""
        t = list(self.t)
        t[index] = value
        return replace(self, t=tuple(t))

    def drop(self, index: int) -> "ParamSet":
        """Copy with t[index] and s[index] removed (size L-1)."""
        t = self.t[:index] + self.t[index + 1:]
        s = self.s[:index] + self.s[index + 1:]
        return replace(self, t=t, s=s)

    def weight_c(self):
        return weight_c(self.q)

    def to_json(self) -> dict:
        bk = self.backend
        return {
            "L": self.L,
            "backend": bk.name,
            "q": bk.to_json(self.q),
            "t": [bk.to_json(v) for v in self.t],
            "s": [bk.to_json(v) for v in self.s],
        }

    @classmethod
    def from_json(cls, doc: dict, backend=None) -> "ParamSet":
        backend = backend or get_backend(doc.get("backend", "exact"))
        return cls(
            tuple(backend.from_json(v) for v in doc["t"]),
            tuple(backend.from_json(v) for v in doc["s"]),
            backend.from_json(doc["q"]),
            backend,
        )


@dataclass(frozen=True)
class PartitionValue:
    """A partition-function value tagged with its provenance."""

    value: Any
    L: int
    method: str
    backend: str
    condition: float | None = field(default=None, compare=False)


def as_scalar(v):
    """Unwrap a PartitionValue (or pass a bare scalar through)."""
    return v.value if isinstance(v, PartitionValue) else v
