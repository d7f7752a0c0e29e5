"""Seeded random generic parameter draws.

Points are small positive rationals n/d with 1 <= n, d <= 50, rejection
sampled until every denominator predicate used anywhere in the package holds:

* q nonzero, q^2 != 1;
* t values pairwise non-(+-)equal (pair-ratio denominators);
* s values pairwise non-(+-)equal and q s_i != +-s_j (mu-difference weights);
* t_i != +-s_j and q t_i != +-s_j (lambda-mu weights, both a and b nonzero).

The same rational draws feed both backends, so a float run evaluates the
float image of the exact point for the same seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .funceq import ExtendedParams
from .scalar import EXACT, FloatBackend, ParamSet

MAX_DRAW_ATTEMPTS = 100_000


def _rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def random_rational(rng: random.Random, max_int: int = 50) -> Fraction:
    return Fraction(rng.randint(1, max_int), rng.randint(1, max_int))


def _pairwise_ok(values) -> bool:
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] == values[j] or values[i] == -values[j]:
                return False
    return True


def _cross_ok(lams, mus, q) -> bool:
    for t in lams:
        for s in mus:
            if t == s or t == -s or q * t == s or q * t == -s:
                return False
    return True


def _mu_ok(mus, q) -> bool:
    if not _pairwise_ok(mus):
        return False
    for i, si in enumerate(mus):
        for j, sj in enumerate(mus):
            if i != j and (q * si == sj or q * si == -sj):
                return False
    return True


def _convert(params_exact: ParamSet, backend) -> ParamSet:
    if backend is EXACT or backend.name == "exact":
        return params_exact
    sc = backend.scalar
    return ParamSet(
        tuple(sc(float(v)) for v in params_exact.t),
        tuple(sc(float(v)) for v in params_exact.s),
        sc(float(params_exact.q)),
        backend,
    )


def random_params(L: int, seed_or_rng, backend=EXACT, homogeneous: bool = False) -> ParamSet:
    """A fully generic random ParamSet; with ``homogeneous`` all s_j coincide."""
    rng = _rng(seed_or_rng)
    for _ in range(MAX_DRAW_ATTEMPTS):
        q = random_rational(rng)
        if q == 1:
            continue
        t = [random_rational(rng) for _ in range(L)]
        if homogeneous:
            s = [random_rational(rng)] * L
            if not (_pairwise_ok(t) and _cross_ok(t, s[:1], q)):
                continue
        else:
            s = [random_rational(rng) for _ in range(L)]
            if not (_pairwise_ok(t) and _mu_ok(s, q) and _cross_ok(t, s, q)):
                continue
        exact = ParamSet(tuple(t), tuple(s), q, EXACT)
        return _convert(exact, backend)
    raise RuntimeError("rejection sampling failed to find a generic point")


def random_extended(L: int, seed_or_rng, backend=EXACT) -> ExtendedParams:
    """Random generic extended point: L + 2 lambda values plus the mu list."""
    rng = _rng(seed_or_rng)
    for _ in range(MAX_DRAW_ATTEMPTS):
        q = random_rational(rng)
        if q == 1:
            continue
        lam = [random_rational(rng) for _ in range(L + 2)]
        s = [random_rational(rng) for _ in range(L)]
        if not (_pairwise_ok(lam) and _mu_ok(s, q) and _cross_ok(lam, s, q)):
            continue
        exact = ExtendedParams(tuple(lam), tuple(s), q, EXACT)
        if backend is EXACT or backend.name == "exact":
            return exact
        sc = backend.scalar
        return ExtendedParams(
            tuple(sc(float(v)) for v in exact.lam),
            tuple(sc(float(v)) for v in exact.s),
            sc(float(exact.q)),
            backend,
        )
    raise RuntimeError("rejection sampling failed to find a generic extended point")


def random_special_extended(L: int, seed_or_rng, backend=EXACT) -> ExtendedParams:
    """Random generic base point anchored at lambda_0 = mu_1, lambda_{L+1} = mu_1 - gamma."""
    params = random_params(L, seed_or_rng, backend)
    return ExtendedParams.at_special_point(params)


def _float_backend_of(backend) -> bool:
    return isinstance(backend, FloatBackend)
