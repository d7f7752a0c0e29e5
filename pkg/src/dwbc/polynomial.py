"""Polynomial structure of Z: exact reconstruction and the leading coefficient.

In the ratio variables x_i = (t_i / s_i)^2 the partition function factors as

    Z = Zpoly(x_1, ..., x_L) / prod_i x_i^{(L-1)/2}

with Zpoly of degree at most L-1 in each variable separately.  Working with
the square roots r_i = t_i / s_i (positive branch) keeps everything rational:
the prefactor is prod_i r_i^{L-1} and the grid nodes are squares of rational
node values.

``reconstruct_poly_part`` recovers Zpoly by exact Newton interpolation on a
tensor grid, one axis at a time, and cross-checks a held-out point.  The
coefficient of (x_1 ... x_L)^{L-1} must equal

    (q - 1/q)^L * qfac / 2^{L^2},    qfac = prod_{k=1}^{L} (1 + q^2 + ... + q^{2(k-1)})

independently of the mu values; ``leading_coeff_report`` performs that
comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from .scalar import DomainError, ParamSet, as_scalar

ZProvider = Callable[[ParamSet], Any]

RECONSTRUCT_SIZE_CAP = 4

# denominators for the r-node ladder k/scale; advanced on grid collision
NODE_SCALES = (7, 11, 13, 17, 19, 23, 29, 31)


class InterpolationError(RuntimeError):
    """Reconstructed polynomial failed its held-out evaluation check."""


@dataclass
class MultiPoly:
    """Sparse multivariate polynomial: exponent tuple -> coefficient.

    Zero coefficients are never stored, so equality of coefficient maps is
    equality of polynomials.
    """

    arity: int
    coeffs: dict

    def __post_init__(self):
        self.coeffs = {
            tuple(e): c for e, c in self.coeffs.items() if c != 0
        }
        for e in self.coeffs:
            if len(e) != self.arity or any(k < 0 for k in e):
                raise ValueError(f"bad exponent vector {e} for arity {self.arity}")

    @classmethod
    def constant(cls, arity: int, value) -> "MultiPoly":
        return cls(arity, {(0,) * arity: value})

    def coeff(self, exponents: Sequence[int]):
        return self.coeffs.get(tuple(exponents), 0)

    def degree(self, var: int) -> int:
        """Largest exponent of variable ``var``; 0 for the zero polynomial."""
        return max((e[var] for e in self.coeffs), default=0)

    def evaluate(self, point: Sequence):
        total = 0
        for e, c in self.coeffs.items():
            term = c
            for v, k in zip(point, e):
                if k:
                    term = term * v**k
            total = total + term
        return total

    def substitute(self, var: int, value) -> "MultiPoly":
        """Replace variable ``var`` by a scalar; the result does not involve it."""
        out: dict = {}
        for e, c in self.coeffs.items():
            c2 = c * value ** e[var] if e[var] else c
            key = e[:var] + (0,) + e[var + 1:]
            out[key] = out.get(key, 0) + c2
        return MultiPoly(self.arity, out)

    def derivative(self, var: int) -> "MultiPoly":
        out: dict = {}
        for e, c in self.coeffs.items():
            if e[var] == 0:
                continue
            key = e[:var] + (e[var] - 1,) + e[var + 1:]
            out[key] = out.get(key, 0) + c * e[var]
        return MultiPoly(self.arity, out)

    def map_coeffs(self, fn) -> "MultiPoly":
        return MultiPoly(self.arity, {e: fn(e, c) for e, c in self.coeffs.items()})

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.arity, out)

    def scale(self, factor) -> "MultiPoly":
        return MultiPoly(self.arity, {e: c * factor for e, c in self.coeffs.items()})

    def to_json_doc(self, backend) -> list[dict]:
        return [
            {"exponents": list(e), "value": backend.to_json(c)}
            for e, c in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_json_doc(cls, doc: list[dict], arity: int, backend) -> "MultiPoly":
        return cls(arity, {tuple(row["exponents"]): backend.from_json(row["value"]) for row in doc})


def q_factorial(L: int, q):
    """Product of the partial geometric sums 1, 1+q^2, ..., 1+...+q^{2(L-1)}."""
    if L < 1:
        raise DomainError("q-factorial order must be >= 1")
    one = q / q
    total = one
    for k in range(1, L + 1):
        partial = one * 0
        power = one
        for _ in range(k):
            partial = partial + power
            power = power * q * q
        total = total * partial
    return total


def newton_power_coeffs(nodes: Sequence, values: Sequence) -> list:
    """Exact one-dimensional interpolation: nodes/values -> power-basis coefficients."""
    n = len(nodes)
    dd = list(values)
    for k in range(1, n):
        for i in range(n - 1, k - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - k])
    coeffs = [0 * dd[0] for _ in range(n)]
    for k in range(n - 1, -1, -1):
        new = [0 * dd[0] for _ in range(n)]
        for d in range(n - 1):
            new[d + 1] = new[d + 1] + coeffs[d]
            new[d] = new[d] - nodes[k] * coeffs[d]
        new[0] = new[0] + dd[k]
        coeffs = new
    return coeffs


def _grid_collision(r_nodes, s, q, backend, extra=()) -> bool:
    """True if any grid point would violate a denominator predicate.

    Checks r*s_i = +-r'*s_j (pair-ratio denominators) and q*r*s_i = +-s_j
    (a-weight zeros, needed by recursion-based providers) over all node pairs
    and distinct axes, plus the same tests against held-out candidates.
    """
    eq = backend.eq
    L = len(s)
    node_pool = list(r_nodes) + list(extra)
    for i in range(L):
        for j in range(L):
            for r in node_pool:
                for rp in node_pool:
                    if i == j:
                        continue
                    ti, tj = r * s[i], rp * s[j]
                    if eq(ti, tj) or eq(ti, -tj):
                        return True
            for r in node_pool:
                if eq(q * r * s[i], s[j]) or eq(q * r * s[i], -s[j]):
                    return True
    return False


def _choose_nodes(n: int, s, q, backend):
    """Node ladder k/scale plus a held-out node, rescaled until collision-free."""
    for scale in NODE_SCALES:
        nodes = [backend.scalar(Fraction(k, scale)) for k in range(1, n + 1)]
        held = backend.scalar(Fraction(n + 1, scale))
        if not _grid_collision(nodes, s, q, backend, extra=(held,)):
            return nodes, held
    raise DomainError("could not find a collision-free interpolation grid")


def reconstruct_poly_part(
    s: Sequence,
    q,
    z_provider: ZProvider,
    backend,
    degree: int | None = None,
    size_cap: int = RECONSTRUCT_SIZE_CAP,
) -> MultiPoly:
    """Recover the polynomial part of Z in the variables x_i = (t_i/s_i)^2.

    Evaluates the provider on a tensor grid t_i = r * s_i over rational nodes
    r, multiplies by the prefactor prod r_i^{L-1}, and interpolates one axis
    at a time.  ``degree`` defaults to L-1; passing a larger value fits extra
    coefficients, which must come out zero (degree-bound checks).

    Raises InterpolationError if the result disagrees with the provider at a
    held-out grid-off point.
    """
    s = tuple(s)
    L = len(s)
    if L > size_cap:
        raise DomainError(f"reconstruction is capped at L <= {size_cap} (grid has L^L points)")
    deg = L - 1 if degree is None else degree
    r_nodes, r_held = _choose_nodes(deg + 1, s, q, backend)
    x_nodes = [r * r for r in r_nodes]

    def z_scaled(r_values):
        t = tuple(r * si for r, si in zip(r_values, s))
        value = as_scalar(z_provider(ParamSet(t, s, q, backend)))
        for r in r_values:
            value = value * r ** (L - 1)
        return value

    # tensor of prefactor-scaled values, keyed by node-index tuples
    from itertools import product as _product

    table = {
        combo: z_scaled([r_nodes[k] for k in combo])
        for combo in _product(range(deg + 1), repeat=L)
    }
    # values -> power coefficients, one axis at a time
    for axis in range(L):
        grouped: dict = {}
        for key, v in table.items():
            rest = key[:axis] + key[axis + 1:]
            grouped.setdefault(rest, {})[key[axis]] = v
        table = {}
        for rest, column in grouped.items():
            coeffs = newton_power_coeffs(x_nodes, [column[k] for k in range(deg + 1)])
            for e, c in enumerate(coeffs):
                if c != 0:
                    table[rest[:axis] + (e,) + rest[axis:]] = c
    poly = MultiPoly(L, table)

    held_point = [r_held] * L
    expected = z_scaled(held_point)
    got = poly.evaluate([r * r for r in held_point])
    if not backend.eq(got, expected):
        raise InterpolationError(
            f"held-out check failed: interpolant gives {got}, provider gives {expected}"
        )
    return poly


def leading_coeff_report(poly: MultiPoly, q, L: int, backend) -> dict:
    """Compare the top corner coefficient against (q - 1/q)^L qfac / 2^{L^2}."""
    coeff = poly.coeff((L - 1,) * L)
    expected = (q - 1 / q) ** L * q_factorial(L, q) / backend.scalar(2) ** (L * L)
    matches = backend.eq(coeff, expected)
    report = {
        "matches": matches,
        "coefficient": coeff,
        "expected": expected,
    }
    if not matches and expected != 0:
        report["ratio"] = coeff / expected
    return report
