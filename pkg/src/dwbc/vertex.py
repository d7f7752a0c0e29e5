"""Definitional machinery: L-matrix, monodromy blocks, and brute-force oracles.

Two independent oracles for the domain-wall partition function live here:

* ``oracle_z_bproduct`` builds Z = <0bar| B(lambda_1) ... B(lambda_L) |0> by
  successive matrix-free applications of the monodromy B-block to the
  ferromagnetic vacuum.
* ``oracle_z_icecount`` enumerates six-vertex arrow configurations on the
  L x L lattice directly (row-by-row transfer over boundary-compatible row
  states) and sums per-vertex weight products.

Spin-index convention, used everywhere: bit k of a state index encodes site
k+1, ``|0>`` is index 0 (all bits clear) and ``|0bar>`` is index 2^L - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any, Sequence

from .scalar import (
    CapError,
    DomainError,
    ParamSet,
    PartitionValue,
    weight_a,
    weight_b,
    weight_c,
)

ICE_SIZE_CAP = 6
NAIVE_ICE_SIZE_CAP = 3
DENSE_SIZE_CAP = 3


@dataclass(frozen=True)
class LMatrix:
    """The 4 x 4 vertex-weight matrix at argument u = exp(lambda), deformation q.

    Nonzero entries sit at (0,0), (1,1), (1,2), (2,1), (2,2), (3,3) with values
    a, b, c, c, b, a in the basis |aux, site> = |00>, |01>, |10>, |11>.
    """

    u: Any
    q: Any

    @property
    def a(self):
        return weight_a(self.u, self.q)

    @property
    def b(self):
        return weight_b(self.u)

    @property
    def c(self):
        return weight_c(self.q)

    def matrix(self) -> list[list]:
        a, b, c = self.a, self.b, self.c
        z = 0 * a
        return [
            [a, z, z, z],
            [z, b, c, z],
            [z, c, b, z],
            [z, z, z, a],
        ]


def vacuum(L: int, backend) -> list:
    """The all-spins-up state |0> as a dense 2^L vector."""
    one = backend.scalar(1)
    vec = [0 * one] * (1 << L)
    vec[0] = one
    return vec


def covacuum_index(L: int) -> int:
    """Index of |0bar> (all bits set)."""
    return (1 << L) - 1


def _apply_diag(vec, bit, lo, hi):
    # site operator diag(lo, hi): lo on cleared bit, hi on set bit
    return [(hi if i & bit else lo) * v for i, v in enumerate(vec)]


def _apply_flip(vec, bit, c, to_set):
    # c * sigma^-(site) when to_set, else c * sigma^+(site)
    zero = 0 * vec[0]
    out = [zero] * len(vec)
    if to_set:
        for i in range(len(vec)):
            if i & bit:
                out[i] = c * vec[i ^ bit]
    else:
        for i in range(len(vec)):
            if not i & bit:
                out[i] = c * vec[i ^ bit]
    return out


def _vec_add(x, y):
    return [a + b for a, b in zip(x, y)]


_BLOCK_INDEX = {"A": (0, 0), "B": (0, 1), "C": (1, 0), "D": (1, 1)}


class MonodromyBlocks:
    """The four operator blocks A, B, C, D of the row monodromy at argument t.

    The monodromy is the ordered product of single-site L-matrices with
    arguments t/s_1, ..., t/s_L.  ``apply`` contracts it against a state
    matrix-free at O(L * 2^L) scalar cost; ``dense_block`` materializes a
    block as a full 2^L x 2^L matrix (test oracle, small L only).
    """

    def __init__(self, params: ParamSet, lam):
        if lam == 0:
            raise DomainError("monodromy argument must be nonzero")
        self.params = params
        self.lam = lam
        q = params.q
        self._site = [
            (weight_a(lam / sk, q), weight_b(lam / sk), weight_c(q)) for sk in params.s
        ]

    def apply(self, block: str, vec: Sequence) -> list:
        """Apply one monodromy block to a dense 2^L state vector."""
        row, col = _BLOCK_INDEX[block]
        L = self.params.L
        if len(vec) != 1 << L:
            raise DomainError(f"state vector must have length 2^{L}")
        # fold site factors from the rightmost; aux column index fixed to `col`
        upper = None  # partial contraction with left aux index 0
        lower = None  # ... with left aux index 1
        for k in range(L - 1, -1, -1):
            a, b, c = self._site[k]
            bit = 1 << k
            if upper is None:
                src = {col: list(vec)}
            else:
                src = {0: upper, 1: lower}
            new_upper = None
            new_lower = None
            if 0 in src:
                new_upper = _apply_diag(src[0], bit, a, b)
                new_lower = _apply_flip(src[0], bit, c, to_set=False)
            if 1 in src:
                contrib_u = _apply_flip(src[1], bit, c, to_set=True)
                contrib_l = _apply_diag(src[1], bit, b, a)
                new_upper = contrib_u if new_upper is None else _vec_add(new_upper, contrib_u)
                new_lower = contrib_l if new_lower is None else _vec_add(new_lower, contrib_l)
            upper, lower = new_upper, new_lower
        return upper if row == 0 else lower

    def highest_weight_eigenvalue(self):
        """Eigenvalue of the A block on |0>: the product of all a-weights."""
        out = self.params.backend.scalar(1)
        for a, _, _ in self._site:
            out = out * a
        return out

    def _site_dense(self, k: int) -> list[list]:
        """Dense L-matrix factor for site k on the 2^{L+1} space aux x quantum."""
        L = self.params.L
        a, b, c = self._site[k]
        dim = 2 << L
        zero = 0 * a
        local = {
            (0, 0): [[a, zero], [zero, b]],
            (0, 1): [[zero, zero], [c, zero]],
            (1, 0): [[zero, c], [zero, zero]],
            (1, 1): [[b, zero], [zero, a]],
        }
        bit = 1 << k
        mat = [[zero] * dim for _ in range(dim)]
        for g_out, g_in in product((0, 1), repeat=2):
            op = local[(g_out, g_in)]
            for st in range(1 << L):
                m = 1 if st & bit else 0
                for m_out in (0, 1):
                    w = op[m_out][m]
                    if w == zero:
                        continue
                    st_out = (st & ~bit) | (bit if m_out else 0)
                    mat[(g_out << L) + st_out][(g_in << L) + st] = w
        return mat

    def dense_block(self, block: str) -> list[list]:
        """Materialize one block as a dense 2^L x 2^L matrix (L <= DENSE_SIZE_CAP)."""
        L = self.params.L
        if L > DENSE_SIZE_CAP:
            raise CapError(f"dense monodromy is capped at L <= {DENSE_SIZE_CAP}")
        full = self._site_dense(0)
        for k in range(1, L):
            full = mat_mul(full, self._site_dense(k))
        row, col = _BLOCK_INDEX[block]
        n = 1 << L
        return [[full[(row << L) + i][(col << L) + j] for j in range(n)] for i in range(n)]


def build_monodromy(params: ParamSet, lam) -> MonodromyBlocks:
    return MonodromyBlocks(params, lam)


def oracle_z_bproduct(params: ParamSet) -> PartitionValue:
    """Z as <0bar| B(lambda_1) ... B(lambda_L) |0>, by successive B applications."""
    vec = vacuum(params.L, params.backend)
    for lam in reversed(params.t):
        vec = MonodromyBlocks(params, lam).apply("B", vec)
    return PartitionValue(vec[covacuum_index(params.L)], params.L, "bproduct", params.backend.name)


# --- ice-rule enumeration ---------------------------------------------------
#
# Edge variables: horizontal aux values grow 0 -> 1 left to right, vertical
# site values grow 0 -> 1 bottom to top.  The six admissible local states
# (left, right, below, above) and their weight classes:
#
#   a: (0,0,0,0) (1,1,1,1)    b: (0,0,1,1) (1,1,0,0)    c: (0,1,0,1) (1,0,1,0)
#
# subject to the flux rule  right = left + above - below.  Domain-wall
# boundaries fix left = 0, right = 1 on every row and below = 0 / above = 1
# on the bottom / top rows.

_VERTEX_CLASS = {
    (0, 0, 0, 0): "a",
    (1, 1, 1, 1): "a",
    (0, 0, 1, 1): "b",
    (1, 1, 0, 0): "b",
    (0, 1, 0, 1): "c",
    (1, 0, 1, 0): "c",
}


def _row_weight_tables(params: ParamSet, lam, override):
    """Per-column (a, b, c) weights for a row with spectral argument lam."""
    if override is not None:
        wa, wb, wc = override
        return [(wa, wb, wc)] * params.L
    q = params.q
    return [(weight_a(lam / sj, q), weight_b(lam / sj), weight_c(q)) for sj in params.s]


def _row_transfer(below, weights, L):
    """Sum over admissible row configurations above a fixed row state.

    Returns a dict mapping each reachable above-state tuple to its amplitude.
    """
    out = {}
    for above in product((0, 1), repeat=L):
        g = 0
        w = None
        for j in range(L):
            g_right = g + above[j] - below[j]
            if g_right not in (0, 1):
                w = None
                break
            cls = _VERTEX_CLASS.get((g, g_right, below[j], above[j]))
            if cls is None:
                w = None
                break
            wa, wb, wc = weights[j]
            factor = wa if cls == "a" else wb if cls == "b" else wc
            w = factor if w is None else w * factor
            g = g_right
        if w is not None and g == 1:
            out[above] = w
    return out


def oracle_z_icecount(
    params: ParamSet, override_weights=None, size_cap: int = ICE_SIZE_CAP
) -> PartitionValue:
    """Z by direct enumeration of ice-rule configurations with domain-wall boundaries.

    ``override_weights=(wa, wb, wc)`` replaces the per-vertex weights by
    constants; with (1, 1, 1) the result is the bare configuration count.
    """
    L = params.L
    if L > size_cap:
        raise CapError(
            f"ice-rule enumeration is capped at L <= {size_cap} "
            f"(state space grows super-exponentially); got L = {L}"
        )
    zero = 0 * params.backend.scalar(1)
    states = {(0,) * L: params.backend.scalar(1)}
    # bottom row is adjacent to |0>, i.e. carries the last spectral argument
    for lam in reversed(params.t):
        weights = _row_weight_tables(params, lam, override_weights)
        new: dict = {}
        for below, amp in states.items():
            for above, w in _row_transfer(below, weights, L).items():
                acc = new.get(above)
                new[above] = amp * w if acc is None else acc + amp * w
        states = new
    value = states.get((1,) * L, zero)
    return PartitionValue(value, L, "icecount", params.backend.name)


def ice_naive_scan(params: ParamSet, override_weights=None) -> PartitionValue:
    """All-configurations scan over free interior edges (its own small-L oracle)."""
    L = params.L
    if L > NAIVE_ICE_SIZE_CAP:
        raise CapError(f"naive ice scan is capped at L <= {NAIVE_ICE_SIZE_CAP}")
    zero = 0 * params.backend.scalar(1)
    tables = [
        _row_weight_tables(params, lam, override_weights) for lam in reversed(params.t)
    ]
    n_h = L * (L - 1)  # interior horizontal edges
    n_v = L * (L - 1)  # interior vertical edges
    total = zero
    for bits in range(1 << (n_h + n_v)):
        h = [[0] * (L + 1) for _ in range(L)]
        v = [[0] * L for _ in range(L + 1)]
        for i in range(L):
            h[i][L] = 1
        for j in range(L):
            v[L][j] = 1
        k = 0
        for i in range(L):
            for j in range(1, L):
                h[i][j] = (bits >> k) & 1
                k += 1
        for i in range(1, L):
            for j in range(L):
                v[i][j] = (bits >> k) & 1
                k += 1
        w = params.backend.scalar(1)
        ok = True
        for i in range(L):
            for j in range(L):
                cls = _VERTEX_CLASS.get((h[i][j], h[i][j + 1], v[i][j], v[i + 1][j]))
                if cls is None:
                    ok = False
                    break
                wa, wb, wc = tables[i][j]
                w = w * (wa if cls == "a" else wb if cls == "b" else wc)
            if not ok:
                break
        if ok:
            total = total + w
    return PartitionValue(total, L, "ice_naive", params.backend.name)


# --- consistency checks ------------------------------------------------------


def mat_mul(x: list[list], y: list[list]) -> list[list]:
    """Dense matrix product over any scalar ring."""
    n, m, p = len(x), len(y), len(y[0])
    out = []
    for i in range(n):
        row = []
        xi = x[i]
        for j in range(p):
            acc = xi[0] * y[0][j]
            for k in range(1, m):
                acc = acc + xi[k] * y[k][j]
            row.append(acc)
        out.append(row)
    return out


def _embed_two_site(mat4, legs: tuple[int, int], zero):
    """Embed a 4x4 two-site operator into the 8x8 three-site space."""
    out = [[zero] * 8 for _ in range(8)]
    third = ({0, 1, 2} - set(legs)).pop()
    for i in range(8):
        ib = [(i >> 2) & 1, (i >> 1) & 1, i & 1]
        for j in range(8):
            jb = [(j >> 2) & 1, (j >> 1) & 1, j & 1]
            if ib[third] != jb[third]:
                continue
            r = (ib[legs[0]] << 1) | ib[legs[1]]
            cidx = (jb[legs[0]] << 1) | jb[legs[1]]
            out[i][j] = mat4[r][cidx]
    return out


def check_yang_baxter(u, v, q, backend) -> Any:
    """Max-norm residual of the cubic vertex-consistency identity on C^2 x C^2 x C^2.

    Arguments u = exp(lambda), v = exp(mu) are measured from the third
    rapidity, so the three L-matrix arguments are u/v, u and v.
    """
    if u == 0 or v == 0 or q == 0:
        raise DomainError("yang-baxter check requires nonzero u, v, q")
    zero = 0 * backend.scalar(1)
    l12 = _embed_two_site(LMatrix(u / v, q).matrix(), (0, 1), zero)
    l13 = _embed_two_site(LMatrix(u, q).matrix(), (0, 2), zero)
    l23 = _embed_two_site(LMatrix(v, q).matrix(), (1, 2), zero)
    lhs = mat_mul(mat_mul(l12, l13), l23)
    rhs = mat_mul(mat_mul(l23, l13), l12)
    res = zero
    for i in range(8):
        for j in range(8):
            d = abs(lhs[i][j] - rhs[i][j])
            if d > res:
                res = d
    return res


def check_b_commutativity(params: ParamSet, lam1, lam2) -> Any:
    """Max-norm of the commutator of two B-operators over the full state basis."""
    L = params.L
    b1 = MonodromyBlocks(params, lam1)
    b2 = MonodromyBlocks(params, lam2)
    one = params.backend.scalar(1)
    res = 0 * one
    for k in range(1 << L):
        e = [0 * one] * (1 << L)
        e[k] = one
        w12 = b1.apply("B", b2.apply("B", e))
        w21 = b2.apply("B", b1.apply("B", e))
        for x, y in zip(w12, w21):
            d = abs(x - y)
            if d > res:
                res = d
    return res
