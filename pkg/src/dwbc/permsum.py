"""Partition function as a sum over the permutation group.

For a permutation (i_1, ..., i_L) of 1..L the summand is

    F = c^L * prod_n [ prod_{j>n} a(lambda_{i_n} - mu_j) ]
              * [ prod_{j<n} b(lambda_{i_n} - mu_j) ]
        * prod_{n<m} a(lambda_{i_m} - lambda_{i_n}) / b(lambda_{i_m} - lambda_{i_n})

and Z is the sum of F over all L! permutations.  Only differences of lambdas
appear in denominators, so the one genericity requirement is t_m != +-t_n;
in particular coincident mu values need no limiting procedure at all.

Enumeration is lexicographic with deterministic rank ranges, so the sum can
be chunked and reduced in parallel.  The L^2 weight factors and the L^2
pair ratios are cached once; each summand is then a product of O(L^2)
cached scalars.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from itertools import islice, permutations
from typing import Iterator, NamedTuple

import numpy as np

from .scalar import (
    CapError,
    FloatBackend,
    ParamSet,
    PartitionValue,
    weight_a,
    weight_b,
    weight_c,
)

MAX_SIZE_EXACT = 8
MAX_SIZE_FLOAT = 11
DEFAULT_CHUNK = 100_000

# float-backend guard: |b(lambda_m - lambda_n)| below this fraction of the
# largest pair magnitude triggers a conditioning warning instead of a silent
# huge ratio
NEAR_COINCIDENT_REL = 1e-12


class PermsumConditionWarning(UserWarning):
    """Float-backend evaluation is ill-conditioned (near-coincident lambdas)."""


class PermTerm(NamedTuple):
    permutation: tuple[int, ...]
    value: object


# --- permutation enumeration -------------------------------------------------


def identity_perm(L: int) -> tuple[int, ...]:
    return tuple(range(1, L + 1))


def perm_rank(p: tuple[int, ...]) -> int:
    """Lexicographic rank of a permutation of 1..L."""
    L = len(p)
    remaining = sorted(p)
    rank = 0
    for n, v in enumerate(p):
        k = remaining.index(v)
        rank += k * math.factorial(L - 1 - n)
        remaining.pop(k)
    return rank


def perm_unrank(rank: int, L: int) -> tuple[int, ...]:
    """Inverse of perm_rank."""
    if not 0 <= rank < math.factorial(L):
        raise ValueError(f"rank {rank} out of range for S_{L}")
    remaining = list(range(1, L + 1))
    out = []
    for n in range(L):
        f = math.factorial(L - 1 - n)
        k, rank = divmod(rank, f)
        out.append(remaining.pop(k))
    return tuple(out)


def next_permutation(p: tuple[int, ...]) -> tuple[int, ...] | None:
    """Lexicographic successor, or None at the last permutation."""
    a = list(p)
    i = len(a) - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return None
    j = len(a) - 1
    while a[j] <= a[i]:
        j -= 1
    a[i], a[j] = a[j], a[i]
    a[i + 1:] = reversed(a[i + 1:])
    return tuple(a)


def iter_perm_range(L: int, start: int, stop: int) -> Iterator[tuple[int, ...]]:
    """Permutations of 1..L with lexicographic ranks in [start, stop)."""
    if start >= stop:
        return
    p = perm_unrank(start, L)
    for _ in range(stop - start):
        yield p
        p = next_permutation(p)
        if p is None:
            break


def lex_block(L: int, start: int, stop: int) -> np.ndarray:
    """Block of lexicographic permutations as a (stop-start, L) array of 0-based values.

    Vectorized factorial-number-system decode of the rank range; used by the
    float fast path.
    """
    ranks = np.arange(start, stop, dtype=np.int64)
    B = ranks.size
    out = np.empty((B, L), dtype=np.int64)
    avail = np.tile(np.arange(L, dtype=np.int64), (B, 1))
    rem = ranks
    for pos in range(L):
        f = math.factorial(L - 1 - pos)
        digit = rem // f
        rem = rem % f
        out[:, pos] = np.take_along_axis(avail, digit[:, None], axis=1)[:, 0]
        width = L - pos
        if width > 1:
            idx = np.arange(width - 1, dtype=np.int64)[None, :]
            sel = idx + (idx >= digit[:, None])
            avail = np.take_along_axis(avail[:, :width], sel, axis=1)
    return out


# --- factor caches and single terms ------------------------------------------


def _position_weights(params: ParamSet):
    """W[v][n]: product of a-weights right of position n and b-weights left of it."""
    L, q = params.L, params.q
    a_tab = [[weight_a(ti / sj, q) for sj in params.s] for ti in params.t]
    b_tab = [[weight_b(ti / sj) for sj in params.s] for ti in params.t]
    W = []
    for v in range(L):
        row = []
        for n in range(L):
            w = params.backend.scalar(1)
            for j in range(n + 1, L):
                w = w * a_tab[v][j]
            for j in range(n):
                w = w * b_tab[v][j]
            row.append(w)
        W.append(row)
    return W


def _pair_ratios(params: ParamSet):
    """rho[m][n] = a(lambda_m - lambda_n) / b(lambda_m - lambda_n) for m != n."""
    L, q = params.L, params.q
    rho = [[None] * L for _ in range(L)]
    for m in range(L):
        for n in range(L):
            if m != n:
                u = params.t[m] / params.t[n]
                rho[m][n] = weight_a(u, q) / weight_b(u)
    return rho


def term_value(params: ParamSet, p: tuple[int, ...]):
    """The summand for one permutation, recomputed from scratch.

    Kept independent of the cached reduction path so the two can be checked
    against each other.
    """
    params.require_generic()
    L, q = params.L, params.q
    if sorted(p) != list(range(1, L + 1)):
        raise ValueError(f"{p!r} is not a permutation of 1..{L}")
    t, s = params.t, params.s
    out = weight_c(q) ** L
    for n in range(L):
        tv = t[p[n] - 1]
        for j in range(n + 1, L):
            out = out * weight_a(tv / s[j], q)
        for j in range(n):
            out = out * weight_b(tv / s[j])
    for n in range(L):
        for m in range(n + 1, L):
            u = t[p[m] - 1] / t[p[n] - 1]
            out = out * weight_a(u, q) / weight_b(u)
    return out


def perm_terms(params: ParamSet) -> Iterator[PermTerm]:
    """All (permutation, summand) pairs in lexicographic order, via the factor cache."""
    params.require_generic()
    L = params.L
    W = _position_weights(params)
    rho = _pair_ratios(params)
    cL = weight_c(params.q) ** L
    for p in permutations(range(L)):
        v = cL
        for n in range(L):
            v = v * W[p[n]][n]
        for n in range(L):
            for m in range(n + 1, L):
                v = v * rho[p[m]][p[n]]
        yield PermTerm(tuple(x + 1 for x in p), v)


# --- full evaluation ----------------------------------------------------------


def _exact_chunk(args):
    W, rho, cL, L, start, stop = args
    total = 0 * cL
    for p in iter_perm_range(L, start, stop):
        v = cL
        for n in range(L):
            v = v * W[p[n] - 1][n]
        for n in range(L):
            for m in range(n + 1, L):
                v = v * rho[p[m] - 1][p[n] - 1]
        total = total + v
    return total


def _float_chunk(args):
    W, rho, cL, L, start, stop = args
    P = lex_block(L, start, stop)
    vals = np.full(P.shape[0], cL, dtype=complex)
    for n in range(L):
        vals *= W[P[:, n], n]
    for n in range(L):
        for m in range(n + 1, L):
            vals *= rho[P[:, m], P[:, n]]
    return vals.sum(), float(np.abs(vals).sum())


def _chunk_ranges(total: int, chunk: int):
    return [(start, min(start + chunk, total)) for start in range(0, total, chunk)]


def _warn_if_near_coincident(params: ParamSet):
    L = params.L
    pair_b = {}
    for m in range(L):
        for n in range(m + 1, L):
            pair_b[(m + 1, n + 1)] = abs(weight_b(params.t[m] / params.t[n]))
    if not pair_b:
        return
    scale = max(pair_b.values())
    worst = min(pair_b, key=pair_b.get)
    if pair_b[worst] < NEAR_COINCIDENT_REL * scale:
        ratio = abs(weight_a(params.t[worst[0] - 1] / params.t[worst[1] - 1], params.q))
        est = ratio / pair_b[worst] if pair_b[worst] else math.inf
        warnings.warn(
            f"lambda_{worst[0]} and lambda_{worst[1]} nearly coincide; "
            f"pair-ratio magnitude ~{est:.3e} will amplify roundoff",
            PermsumConditionWarning,
        )


def eval_permsum(
    params: ParamSet,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    size_cap: int | None = None,
) -> PartitionValue:
    """Z as the L!-term permutation sum, reduced over deterministic rank ranges.

    Exact-backend results are independent of chunking and thread count.  On
    the float backend the chunk partial sums are combined in rank order, and a
    conditioning estimate (sum of |term| over |sum|) is attached to the result.
    """
    L = params.L
    is_float = isinstance(params.backend, FloatBackend)
    cap = size_cap if size_cap is not None else (MAX_SIZE_FLOAT if is_float else MAX_SIZE_EXACT)
    if L > cap:
        raise CapError(
            f"permutation sum at L = {L} has {math.factorial(L):,} terms "
            f"(cap {cap} on the {params.backend.name} backend); "
            "raise size_cap explicitly to force it"
        )
    params.require_generic()
    total_terms = math.factorial(L)
    cL = weight_c(params.q) ** L

    if is_float:
        _warn_if_near_coincident(params)
        W = np.array(_position_weights(params), dtype=complex)
        rho_list = _pair_ratios(params)
        rho = np.array(
            [[rho_list[m][n] if m != n else 0.0 for n in range(L)] for m in range(L)],
            dtype=complex,
        )
        jobs = [(W, rho, complex(cL), L, a, b) for a, b in _chunk_ranges(total_terms, chunk_size)]
        if threads > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(_float_chunk, jobs))
        else:
            results = [_float_chunk(j) for j in jobs]
        value = sum(r[0] for r in results)
        abs_sum = sum(r[1] for r in results)
        condition = abs_sum / abs(value) if value != 0 else math.inf
        return PartitionValue(value, L, "permsum", params.backend.name, condition=condition)

    W = _position_weights(params)
    rho = _pair_ratios(params)
    jobs = [(W, rho, cL, L, a, b) for a, b in _chunk_ranges(total_terms, chunk_size)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(_exact_chunk, jobs))
    else:
        partials = [_exact_chunk(j) for j in jobs]
    value = partials[0]
    for v in partials[1:]:
        value = value + v
    return PartitionValue(value, L, "permsum", params.backend.name)


def eval_permsum_homogeneous(params: ParamSet, **kwargs) -> PartitionValue:
    """Permutation sum with all mu equal: the same formula, no limit needed.

    Coincident s values are legal in the summand (only lambda differences sit
    in denominators), so this just validates homogeneity and evaluates.
    """
    eq = params.backend.eq
    for j, sj in enumerate(params.s[1:], start=2):
        if not eq(sj, params.s[0]):
            raise ValueError(
                f"s_{j} = {sj} differs from s_1 = {params.s[0]}; "
                "homogeneous evaluation requires all mu equal"
            )
    out = eval_permsum(params, **kwargs)
    return PartitionValue(out.value, out.L, "permsum_homog", out.backend, condition=out.condition)
