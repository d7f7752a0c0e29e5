"""Operator and differential form of the functional identity on the polynomial part.

Substituting a scalar for one variable of a polynomial of degree <= m in that
variable can be written as a truncated Taylor series,

    p(.., alpha, ..) = sum_{k=0}^{m} (alpha - x_i)^k / k!  d^k p / d x_i^k,

which turns the functional identity into a linear partial differential
equation of order 2(L-1) once Z's polynomial part is used.

Normalization matters here.  The functional identity mixes lambda values
with *different* mu pairings, so the ratio variables x_i = (t_i/s_i)^2 do not
admit a slot-independent substitution value.  The plain squares y_i = t_i^2
do: rescaling the reconstructed polynomial to the y variables (an exact
per-coefficient operation, ``rescale_to_square_vars``) and scaling each
identity coefficient by prod y_k^{(1-L)/2} = prod t_k^{1-L} over the
untouched indices makes every term of the operator equation literally equal
to the corresponding term of the functional identity.  Both residuals below
are therefore exactly zero on the exact backend.
"""

from __future__ import annotations

import math
from typing import Any

from .funceq import CoefficientTable, ExtendedParams
from .polynomial import MultiPoly


class TruncationError(ValueError):
    """Taylor order below the polynomial degree in the substituted variable."""


def apply_substitution(poly: MultiPoly, var: int, value) -> MultiPoly:
    """Replace variable ``var`` by a scalar value (exact, idempotent)."""
    return poly.substitute(var, value)


def taylor_terms(poly: MultiPoly, var: int, value, order: int) -> MultiPoly:
    """sum_{k<=order} (value - x_var)^k / k! * d^k poly / d x_var^k, as a polynomial.

    No degree check; used directly for truncation experiments.
    """
    out = MultiPoly(poly.arity, {})
    d = poly
    for k in range(order + 1):
        kfac = math.factorial(k)
        acc: dict = {}
        for e, c in d.coeffs.items():
            # (value - x_var)^k expanded binomially
            for j in range(k + 1):
                key = e[:var] + (e[var] + j,) + e[var + 1:]
                contrib = c * math.comb(k, j) * value ** (k - j) * (-1) ** j
                acc[key] = acc.get(key, 0) + contrib / kfac
        out = out + MultiPoly(poly.arity, acc)
        d = d.derivative(var)
    return out


def apply_taylor_substitution(poly: MultiPoly, var: int, value, order: int) -> MultiPoly:
    """Substitution via the truncated Taylor series; requires order >= degree.

    With the truncation condition satisfied the result is independent of
    x_var and coincides with ``apply_substitution`` coefficient for
    coefficient.
    """
    deg = poly.degree(var)
    if order < deg:
        raise TruncationError(
            f"Taylor order {order} is below the degree {deg} in variable {var}; "
            "the truncated expansion would not reproduce the substitution"
        )
    return taylor_terms(poly, var, value, order)


def rescale_to_square_vars(poly: MultiPoly, s) -> MultiPoly:
    """Convert the ratio-variable polynomial to the plain-square variables y_i = t_i^2.

    If P satisfies Z = P(x) / prod x_i^{(L-1)/2} with x_i = (t_i/s_i)^2, the
    returned polynomial Q satisfies Z = Q(y) / prod y_i^{(L-1)/2}; the maps
    agree up to the exact per-coefficient factor prod s_i^{L-1-2 e_i}.
    """
    L = poly.arity
    s = tuple(s)

    def fn(e, c):
        for i in range(L):
            power = L - 1 - 2 * e[i]
            c = c * s[i] ** power
        return c

    return poly.map_coeffs(fn)


def scaled_coefficient_table(ext: ExtendedParams) -> tuple[dict, dict]:
    """Identity coefficients scaled to polynomial level in the square variables.

    Single-drop coefficient i is multiplied by prod_{j in 1..L+1, j != i}
    t_j^{1-L}; double-drop (j, i) by prod_{k in 0..L+1, k not in {i, j}}
    t_k^{1-L}.
    """
    L = ext.L
    table = CoefficientTable.build(ext)
    lam = ext.lam
    one = ext.backend.scalar(1)

    def lam_scale(indices) -> Any:
        out = one
        for k in indices:
            out = out * lam[k] ** (1 - L)
        return out

    drop_one = {
        i: coeff * lam_scale(k for k in range(1, L + 2) if k != i)
        for i, coeff in table.drop_one.items()
    }
    drop_two = {
        (j, i): coeff * lam_scale(k for k in range(0, L + 2) if k not in (i, j))
        for (j, i), coeff in table.drop_two.items()
    }
    return drop_one, drop_two


def _square_point(ext: ExtendedParams):
    y = [v * v for v in ext.lam]
    return y[1:-1], y[0], y[-1]


def operator_residual(ext: ExtendedParams, square_poly: MultiPoly):
    """Residual of the substitution-operator form of the functional identity.

    ``square_poly`` is the polynomial part in the y = t^2 variables; the
    operator replaces variable slots by the auxiliary values y_0 and y_{L+1}
    and the whole expression is evaluated at y_i = t_i^2.  Exactly zero when
    the polynomial is the true partition function's.
    """
    L = ext.L
    if square_poly.arity != L:
        raise ValueError("polynomial arity does not match lattice size")
    drop_one, drop_two = scaled_coefficient_table(ext)
    point, y0, y_top = _square_point(ext)
    total = 0 * ext.backend.scalar(1)
    for (j, i), coeff in drop_two.items():
        if j == L + 1:
            sub = apply_substitution(square_poly, i - 1, y0)
        else:
            sub = apply_substitution(
                apply_substitution(square_poly, i - 1, y0), j - 1, y_top
            )
        total = total + coeff * sub.evaluate(point)
    for i, coeff in drop_one.items():
        if i == L + 1:
            total = total + coeff * square_poly.evaluate(point)
        else:
            sub = apply_substitution(square_poly, i - 1, y_top)
            total = total + coeff * sub.evaluate(point)
    return total


def pde_residual(ext: ExtendedParams, square_poly: MultiPoly, order: int | None = None):
    """Residual of the differential form, of order 2(L-1) in the y variables.

    Expands every substitution through ``taylor_terms`` with the given
    truncation order (default L-1, the per-variable degree bound) and
    evaluates at y_i = t_i^2.  Equals ``operator_residual`` term for term
    whenever the order bound is satisfied; lowering ``order`` breaks the
    equality.
    """
    L = ext.L
    if square_poly.arity != L:
        raise ValueError("polynomial arity does not match lattice size")
    m = L - 1 if order is None else order
    drop_one, drop_two = scaled_coefficient_table(ext)
    point, y0, y_top = _square_point(ext)

    # successive derivatives in each variable, up to order m
    def derivative_ladder(poly, var):
        ladder = [poly]
        for _ in range(m):
            ladder.append(ladder[-1].derivative(var))
        return ladder

    total = 0 * ext.backend.scalar(1)
    for (j, i), coeff in drop_two.items():
        if j == L + 1:
            for k, dk in enumerate(derivative_ladder(square_poly, i - 1)):
                factor = (y0 - point[i - 1]) ** k
                total = total + coeff * factor * dk.evaluate(point) / math.factorial(k)
        else:
            for k, dk in enumerate(derivative_ladder(square_poly, i - 1)):
                for l, dkl in enumerate(derivative_ladder(dk, j - 1)):
                    factor = (y0 - point[i - 1]) ** k * (y_top - point[j - 1]) ** l
                    total = total + (
                        coeff * factor * dkl.evaluate(point)
                        / (math.factorial(k) * math.factorial(l))
                    )
    for i, coeff in drop_one.items():
        if i == L + 1:
            total = total + coeff * square_poly.evaluate(point)
        else:
            for k, dk in enumerate(derivative_ladder(square_poly, i - 1)):
                factor = (y_top - point[i - 1]) ** k
                total = total + coeff * factor * dk.evaluate(point) / math.factorial(k)
    return total
