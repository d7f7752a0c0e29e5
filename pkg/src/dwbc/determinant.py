"""Izergin-type determinant evaluation, gated on oracle agreement.

The determinant closed form is not part of the core development here; it is
taken from the standard domain-wall literature as an optional cross-check:

    Z = prod_{i,j} a_ij b_ij / ( prod_{i<j} b(lambda_i - lambda_j)
                                 prod_{i<j} b(mu_j - mu_i) ) * det M,
    M_ij = c / (a_ij b_ij),     a_ij = a(lambda_i - mu_j), b_ij = b(lambda_i - mu_j).

Because the formula is sourced externally, it only enters agreement checks
after ``determinant_gate`` has confirmed exact equality with the B-product
oracle on a battery of random rational points.  A failed gate marks the
method unavailable rather than silently wrong.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .scalar import (
    FloatBackend,
    ParamSet,
    PartitionValue,
    SingularityError,
    weight_a,
    weight_b,
    weight_c,
)

GATE_SIZES = (1, 2, 3, 4)
GATE_POINTS = 25
GATE_SEED = 20107


class DeterminantUnavailableError(RuntimeError):
    """The determinant formula failed its oracle-equality gate."""


def exact_det(matrix: list[list]) -> object:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [row[:] for row in matrix]
    n = len(m)
    sign = 1
    det = None
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot_row is None:
            return 0 * matrix[0][0]
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            sign = -sign
        pivot = m[col][col]
        det = pivot if det is None else det * pivot
        for r in range(col + 1, n):
            f = m[r][col] / pivot
            for c in range(col, n):
                m[r][c] = m[r][c] - f * m[col][c]
    return det if sign == 1 else -det


def _require_nonsingular(params: ParamSet):
    eq = params.backend.eq
    t, s, q = params.t, params.s, params.q
    L = params.L
    params.require_generic()
    for i in range(L):
        for j in range(i + 1, L):
            if eq(s[i], s[j]) or eq(s[i], -s[j]):
                raise SingularityError(
                    f"b(mu_{j + 1} - mu_{i + 1}) = 0", factor=f"b(mu_{j + 1} - mu_{i + 1})"
                )
    for i in range(L):
        for j in range(L):
            if eq(t[i], s[j]) or eq(t[i], -s[j]):
                raise SingularityError(
                    f"b(lambda_{i + 1} - mu_{j + 1}) = 0",
                    factor=f"b(lambda_{i + 1} - mu_{j + 1})",
                )
            if eq(q * t[i], s[j]) or eq(q * t[i], -s[j]):
                raise SingularityError(
                    f"a(lambda_{i + 1} - mu_{j + 1}) = 0",
                    factor=f"a(lambda_{i + 1} - mu_{j + 1})",
                )


def izergin_determinant(params: ParamSet) -> PartitionValue:
    """Evaluate the determinant closed form (no gate; see eval_determinant)."""
    _require_nonsingular(params)
    L, q = params.L, params.q
    t, s = params.t, params.s
    c = weight_c(q)
    a_tab = [[weight_a(ti / sj, q) for sj in s] for ti in t]
    b_tab = [[weight_b(ti / sj) for sj in s] for ti in t]
    prefactor = params.backend.scalar(1)
    for i in range(L):
        for j in range(L):
            prefactor = prefactor * a_tab[i][j] * b_tab[i][j]
    for i in range(L):
        for j in range(i + 1, L):
            prefactor = prefactor / (weight_b(t[i] / t[j]) * weight_b(s[j] / s[i]))
    kernel = [[c / (a_tab[i][j] * b_tab[i][j]) for j in range(L)] for i in range(L)]
    if isinstance(params.backend, FloatBackend):
        det = complex(np.linalg.det(np.array(kernel, dtype=complex)))
    else:
        det = exact_det(kernel)
    return PartitionValue(prefactor * det, L, "determinant", params.backend.name)


_GATE_RESULT: bool | None = None


def determinant_gate(
    det_fn: Callable[[ParamSet], PartitionValue] = izergin_determinant,
    n_points: int = GATE_POINTS,
    seed: int = GATE_SEED,
    sizes: tuple[int, ...] = GATE_SIZES,
) -> bool:
    """Exact oracle-equality gate for the externally sourced determinant formula."""
    import random

    from .sampling import random_params
    from .vertex import oracle_z_bproduct

    rng = random.Random(seed)
    checked = 0
    while checked < n_points:
        for L in sizes:
            p = random_params(L, rng)
            if det_fn(p).value != oracle_z_bproduct(p).value:
                return False
            checked += 1
    return True


def eval_determinant(params: ParamSet) -> PartitionValue:
    """Gated determinant evaluation; raises if the gate has failed."""
    global _GATE_RESULT
    if _GATE_RESULT is None:
        _GATE_RESULT = determinant_gate()
    if not _GATE_RESULT:
        raise DeterminantUnavailableError(
            "determinant formula failed its oracle-equality gate; method unavailable"
        )
    return izergin_determinant(params)
