"""Functional-equation engine for the domain-wall partition function.

The partition function at size L satisfies one linear functional identity in
L + 2 spectral variables lambda_0, ..., lambda_{L+1}: a weighted sum of Z
over L-element sublists of the variables vanishes identically,

    sum_i  M_i   Z(lambda_1 ... ^lambda_i ... lambda_{L+1})
  + sum_{i<j} N_{ji} Z(lambda_0, lambda_1 ... ^lambda_i ... ^lambda_j ... lambda_{L+1}) = 0,

with explicit coefficients built from the a/b/c weights (``coeff_drop_one``
and ``coeff_drop_two`` below).  At the special anchor point

    lambda_0 = mu_1,   lambda_{L+1} = mu_1 - gamma

all single-drop coefficients with i <= L vanish and the identity collapses,
via the size-lowering recurrence at lambda_1 = mu_1, to an L-term relation
that determines Z(size L) from Z(size L-1).  ``eval_recursion`` iterates
that relation down to the one-site value Z = c.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .scalar import (
    DomainError,
    ParamSet,
    PartitionValue,
    SingularityError,
    as_scalar,
    weight_a,
    weight_b,
    weight_c,
)

ZProvider = Callable[[ParamSet], Any]


@dataclass(frozen=True)
class ExtendedParams:
    """A ParamSet extended by the two auxiliary spectral variables.

    ``lam`` holds L + 2 exponentiated values indexed 0..L+1; indices 1..L are
    the lattice variables, 0 and L+1 the auxiliary ones.
    """

    lam: tuple
    s: tuple
    q: Any
    backend: Any

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(self.lam))
        object.__setattr__(self, "s", tuple(self.s))
        if len(self.lam) != len(self.s) + 2:
            raise DomainError("need L + 2 lambda values for an L-column lattice")
        for k, v in enumerate(self.lam):
            if v == 0:
                raise DomainError(f"lambda_{k} must be nonzero")

    @property
    def L(self) -> int:
        return len(self.s)

    @classmethod
    def extend(cls, params: ParamSet, t0, t_top) -> "ExtendedParams":
        return cls((t0,) + params.t + (t_top,), params.s, params.q, params.backend)

    @classmethod
    def at_special_point(cls, params: ParamSet) -> "ExtendedParams":
        """Anchor lambda_0 = mu_1 and lambda_{L+1} = mu_1 - gamma."""
        return cls.extend(params, params.s[0], params.s[0] / params.q)

    def base_params(self) -> ParamSet:
        return ParamSet(self.lam[1:-1], self.s, self.q, self.backend)

    def sub_params(self, indices: Sequence[int]) -> ParamSet:
        """ParamSet whose lambda list is ``lam[k] for k in indices``."""
        return ParamSet(tuple(self.lam[k] for k in indices), self.s, self.q, self.backend)

    def require_pairwise_generic(self):
        """Every b(lambda_a - lambda_b) denominator class must be nonzero."""
        eq = self.backend.eq
        for a in range(len(self.lam)):
            for b in range(a + 1, len(self.lam)):
                if eq(self.lam[a], self.lam[b]) or eq(self.lam[a], -self.lam[b]):
                    raise SingularityError(
                        f"b(lambda_{a} - lambda_{b}) = 0 at "
                        f"lambda_{a} = {self.lam[a]}, lambda_{b} = {self.lam[b]}",
                        factor=f"b(lambda_{a} - lambda_{b})",
                    )

    def is_special_point(self) -> bool:
        eq = self.backend.eq
        return eq(self.lam[0], self.s[0]) and eq(self.lam[-1], self.s[0] / self.q)


def _ab_ratio(ext: ExtendedParams, a: int, b: int):
    """a(lambda_a - lambda_b) / b(lambda_a - lambda_b)."""
    u = ext.lam[a] / ext.lam[b]
    den = weight_b(u)
    if den == 0:
        raise SingularityError(
            f"b(lambda_{a} - lambda_{b}) = 0", factor=f"b(lambda_{a} - lambda_{b})"
        )
    return weight_a(u, ext.q) / den


def _c_over_b(ext: ExtendedParams, a: int, b: int):
    """c / b(lambda_a - lambda_b)."""
    den = weight_b(ext.lam[a] / ext.lam[b])
    if den == 0:
        raise SingularityError(
            f"b(lambda_{a} - lambda_{b}) = 0", factor=f"b(lambda_{a} - lambda_{b})"
        )
    return weight_c(ext.q) / den


def coeff_drop_one(ext: ExtendedParams, i: int):
    """Weight of the term where lambda_i (1 <= i <= L+1) is removed."""
    L = ext.L
    if not 1 <= i <= L + 1:
        raise DomainError(f"single-drop index must lie in 1..{L + 1}")
    q, lam, s = ext.q, ext.lam, ext.s
    first = _c_over_b(ext, i, 0)
    for sl in s:
        first = first * weight_a(lam[0] / sl, q) * weight_b(lam[i] / sl)
    second = _c_over_b(ext, 0, i)
    for sl in s:
        second = second * weight_a(lam[i] / sl, q) * weight_b(lam[0] / sl)
    for k in range(1, L + 2):
        if k == i:
            continue
        first = first * _ab_ratio(ext, i, k) * _ab_ratio(ext, k, 0)
        second = second * _ab_ratio(ext, 0, k) * _ab_ratio(ext, k, i)
    return first + second


def coeff_drop_two(ext: ExtendedParams, j: int, i: int):
    """Weight of the term where lambda_i and lambda_j (i < j) are removed and lambda_0 enters."""
    L = ext.L
    if not 1 <= i < j <= L + 1:
        raise DomainError(f"double-drop indices need 1 <= i < j <= {L + 1}")
    q, lam, s = ext.q, ext.lam, ext.s
    first = _c_over_b(ext, 0, j) * _c_over_b(ext, i, 0) * _ab_ratio(ext, j, i)
    for sl in s:
        first = first * weight_a(lam[i] / sl, q) * weight_b(lam[j] / sl)
    second = _c_over_b(ext, 0, i) * _c_over_b(ext, j, 0) * _ab_ratio(ext, i, j)
    for sl in s:
        second = second * weight_a(lam[j] / sl, q) * weight_b(lam[i] / sl)
    for m in range(1, L + 2):
        if m in (i, j):
            continue
        first = first * _ab_ratio(ext, j, m) * _ab_ratio(ext, m, i)
        second = second * _ab_ratio(ext, i, m) * _ab_ratio(ext, m, j)
    return first + second


@dataclass(frozen=True)
class CoefficientTable:
    """All functional-identity coefficients at one extended point."""

    drop_one: dict
    drop_two: dict

    @classmethod
    def build(cls, ext: ExtendedParams) -> "CoefficientTable":
        L = ext.L
        one = {i: coeff_drop_one(ext, i) for i in range(1, L + 2)}
        two = {
            (j, i): coeff_drop_two(ext, j, i)
            for i in range(1, L + 2)
            for j in range(i + 1, L + 2)
        }
        return cls(one, two)


def functional_residual(ext: ExtendedParams, z_provider: ZProvider, with_scale: bool = False):
    """Left-hand side of the functional identity; exactly zero for a true Z.

    With ``with_scale`` also returns the sum of term magnitudes, the natural
    yardstick for float-backend residuals.
    """
    L = ext.L
    table = CoefficientTable.build(ext)
    total = 0 * ext.backend.scalar(1)
    scale = 0.0
    for i in range(1, L + 2):
        indices = [k for k in range(1, L + 2) if k != i]
        term = table.drop_one[i] * as_scalar(z_provider(ext.sub_params(indices)))
        total = total + term
        scale += abs(term)
    for (j, i), coeff in table.drop_two.items():
        indices = [0] + [k for k in range(1, L + 2) if k not in (i, j)]
        term = coeff * as_scalar(z_provider(ext.sub_params(indices)))
        total = total + term
        scale += abs(term)
    return (total, scale) if with_scale else total


def special_point_coeffs(ext: ExtendedParams):
    """Closed forms of the surviving coefficients at the anchor point.

    Returns ``(pivot, drops)``: the coefficient of the undropped Z and, for
    each j in 1..L, the coefficient of the term missing lambda_j.  Equal to
    ``coeff_drop_one(L+1)`` and ``coeff_drop_two(L+1, j)`` specialized to
    lambda_0 = mu_1, lambda_{L+1} = mu_1 - gamma.
    """
    if not ext.is_special_point():
        raise DomainError(
            "special-point coefficients require lambda_0 = mu_1 and lambda_{L+1} = mu_1 - gamma"
        )
    return _special_coeffs(ext.base_params())


def _special_coeffs(params: ParamSet):
    L, q = params.L, params.q
    t, s = params.t, params.s
    c = weight_c(q)
    sign = 1 if (L + 1) % 2 == 0 else -1
    pivot = sign * c * c
    for j in range(1, L):
        pivot = pivot * weight_a(s[0] / s[j], q) * weight_a(s[j] / s[0], q)
    drops = []
    dsign = -sign
    for j in range(L):
        m = dsign * c * c
        for k in range(1, L):
            m = m * weight_a(s[k] / s[0], q) * weight_a(t[j] / s[k], q)
        for k in range(L):
            if k == j:
                continue
            den_a = weight_a(t[k] / s[0], q)
            if den_a == 0:
                raise SingularityError(
                    f"a(lambda_{k + 1} - mu_1) = 0", factor=f"a(lambda_{k + 1} - mu_1)"
                )
            u = t[k] / t[j]
            den_b = weight_b(u)
            if den_b == 0:
                raise SingularityError(
                    f"b(lambda_{k + 1} - lambda_{j + 1}) = 0",
                    factor=f"b(lambda_{k + 1} - lambda_{j + 1})",
                )
            m = m * weight_b(t[k] / s[0]) / den_a * weight_a(u, q) / den_b
        drops.append(m)
    return pivot, drops


def eval_recursion(params: ParamSet) -> PartitionValue:
    """Z built by iterating the anchored functional identity down to one site.

    Each level expresses Z(size L) through the L partition functions with one
    lambda removed and the leading mu dropped; the base case is Z = c.
    """
    value = _recursion_value(params)
    return PartitionValue(value, params.L, "recursion", params.backend.name)


def _recursion_value(params: ParamSet):
    L, q = params.L, params.q
    c = weight_c(q)
    if L == 1:
        return c
    pivot, drops = _special_coeffs(params)
    if pivot == 0:
        raise SingularityError(
            "pivot coefficient vanishes: some a(mu_1 - mu_j) = 0",
            factor="a(mu_1 - mu_j)",
        )
    t, s = params.t, params.s
    mu_factor = params.backend.scalar(1)
    for k in range(1, L):
        mu_factor = mu_factor * weight_a(s[0] / s[k], q)
    total = 0 * c
    for j in range(L):
        pref = mu_factor
        for k in range(L):
            if k != j:
                pref = pref * weight_a(t[k] / s[0], q)
        sub = ParamSet(t[:j] + t[j + 1:], s[1:], q, params.backend)
        total = total + pref * drops[j] / pivot * _recursion_value(sub)
    return -c * total


def recurrence_residual(params: ParamSet, z_provider: ZProvider):
    """Residual of the size-lowering recurrence at lambda_1 = mu_1.

    Sets t_1 := s_1 internally, then compares Z(size L) against
    c * prod_{j>=2} a(lambda_j - mu_1) a(mu_1 - mu_j) * Z(size L-1) on the
    truncated lists.  Zero for any correct evaluator.
    """
    L, q = params.L, params.q
    pinned = params.with_t(0, params.s[0])
    lhs = as_scalar(z_provider(pinned))
    if L == 1:
        return lhs - weight_c(q)
    factor = weight_c(q)
    for j in range(1, L):
        factor = factor * weight_a(params.t[j] / params.s[0], q)
        factor = factor * weight_a(params.s[0] / params.s[j], q)
    sub = ParamSet(params.t[1:], params.s[1:], q, params.backend)
    rhs = factor * as_scalar(z_provider(sub))
    return lhs - rhs
