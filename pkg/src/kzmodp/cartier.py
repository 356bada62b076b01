"""Partitions, Schur polynomials, and the Cartier decomposition of Phi_p W_J.

Write delta = (r-1, ..., 1, 0).  The part of Phi_p W_J in which every t-exponent
is p - 1 mod p can be written as

    (t_1 ... t_r)^(p-1) * prod_{i<j} (t_i^p - t_j^p) * sum_a c_J^(a)(z) s_a(t^p),

and c_J^(a) is the coefficient of the monomial t^y with y_i = (a_i + r - i) p + p - 1.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .arith import PrimePair
from .errors import CertificationError, InvalidInput
from .kzcore import (
    _EXPLICIT_LIMIT,
    ModelParams,
    OrbitVectorPoly,
    SplitExtractor,
    Subset,
    VectorPoly,
    construct_solution,
    default_max_terms,
    phi_times_weight,
    subsets,
)
from .mpoly import MPoly

__all__ = [
    "CartierTable",
    "Partition",
    "cartier_decompose",
    "cartier_row",
    "partition_count",
    "rows_agree",
    "dominates",
    "enumerate_partitions",
    "kostka",
    "partition_to_tuple",
    "schur",
    "schur_integer",
    "schur_monomial_expansion",
    "target_exponents",
    "tuple_to_partition",
    "verify_reconstruction",
    "verify_round_trip",
]

Partition = tuple[int, ...]
IntPoly = dict[tuple[int, ...], int]


def enumerate_partitions(d: int, r: int) -> list[Partition]:
    """A(d): weakly decreasing r-tuples with d >= a_1 and a_r >= 0, lex descending."""
    if d < 0 or r < 0:
        raise InvalidInput("d and r must be nonnegative")
    return list(itertools.combinations_with_replacement(range(d, -1, -1), r))


def _check_partition(a: Sequence[int]) -> Partition:
    a = tuple(int(x) for x in a)
    if any(x < 0 for x in a) or any(x < y for x, y in zip(a, a[1:])):
        raise InvalidInput(f"{a} is not a partition")
    return a


def partition_to_tuple(a: Sequence[int]) -> tuple[int, ...]:
    """a -> L = (a_1 + r, a_2 + r - 1, ..., a_r + 1)."""
    a = _check_partition(a)
    r = len(a)
    return tuple(x + r - i for i, x in enumerate(a))


def tuple_to_partition(L: Sequence[int]) -> Partition:
    r = len(L)
    return _check_partition(tuple(l - (r - i) for i, l in enumerate(L)))


def target_exponents(a: Sequence[int], p: int) -> tuple[int, ...]:
    """y_i = (a_i + r - i) p + p - 1 (i counted from 1)."""
    return tuple(l * p - 1 for l in partition_to_tuple(a))


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    """a >= b in dominance order (equal sizes, partial sums of a never smaller)."""
    a, b = list(a), list(b)
    width = max(len(a), len(b))
    a += [0] * (width - len(a))
    b += [0] * (width - len(b))
    if sum(a) != sum(b):
        return False
    return all(x >= y for x, y in zip(itertools.accumulate(a), itertools.accumulate(b)))


# integer polynomials in r variables as {exponent tuple: coefficient}


def _int_mul(f: IntPoly, g: IntPoly) -> IntPoly:
    out: IntPoly = {}
    for ea, ca in f.items():
        for eb, cb in g.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _complete_homogeneous(k: int, r: int) -> IntPoly:
    if k < 0:
        return {}
    out = {}
    for combo in itertools.combinations_with_replacement(range(r), k):
        e = [0] * r
        for i in combo:
            e[i] += 1
        out[tuple(e)] = 1
    return out


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


@lru_cache(maxsize=256)
def schur_integer(a: Partition) -> IntPoly:
    """s_a in len(a) variables over the integers, by the Jacobi-Trudi determinant."""
    a = _check_partition(a)
    r = len(a)
    if r == 0:
        return {(): 1}
    h = {k: _complete_homogeneous(k, r) for k in range(-r, a[0] + r + 1)} if a else {}
    out: IntPoly = {}
    for perm in itertools.permutations(range(r)):
        term: IntPoly = {(0,) * r: _perm_sign(perm)}
        for i in range(r):
            term = _int_mul(term, h[a[i] - i + perm[i]])
            if not term:
                break
        for e, c in term.items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def schur(a: Sequence[int], r: int, p: int) -> MPoly:
    """s_a(t_1..t_r) mod p as a t-only polynomial."""
    a = _check_partition(a)
    if len(a) > r:
        if any(a[r:]):
            return MPoly.zero(p, r, 0)
        a = a[:r]
    a = a + (0,) * (r - len(a))
    return MPoly.from_terms(p, r, 0, schur_integer(a))


def schur_monomial_expansion(a: Sequence[int]) -> dict[Partition, int]:
    """Kostka numbers K_{a,b}: s_a = sum_b K_{a,b} m_b over partitions b of |a|."""
    a = _check_partition(a)
    return {e: c for e, c in schur_integer(a).items()
            if all(x >= y for x, y in zip(e, e[1:]))}


def kostka(a: Sequence[int], b: Sequence[int]) -> int:
    a = _check_partition(a)
    b = _check_partition(tuple(b) + (0,) * (len(a) - len(b)))
    return schur_monomial_expansion(a).get(b, 0)


# the decomposition


@dataclass
class CartierTable:
    """c_J^(a)(z) for a in A(extent), one vector over J per partition."""

    pair: PrimePair
    params: ModelParams
    extent: int
    rows: dict[Partition, VectorPoly] = field(default_factory=dict)

    def entry(self, J: Sequence[int], a: Sequence[int]) -> MPoly:
        return self.rows[_check_partition(a)].component(J)

    def partitions(self) -> list[Partition]:
        return enumerate_partitions(self.extent, self.params.r)

    def nonzero_partitions(self) -> list[Partition]:
        return [a for a in self.partitions() if not self.rows[a].is_zero]


def _alternant_entry(ex: SplitExtractor, J: Subset, y: Sequence[int]) -> MPoly:
    """sum_sigma sgn(sigma) [t^(y o sigma)] (Phi_p / prod_i (t_i - z_{j_i}))."""
    r = len(y)
    identity = tuple(range(r))
    out = MPoly.zero(ex.pair.p, 0, ex.params.n)
    for perm in itertools.permutations(range(r)):
        coeff = ex.term(J, identity, [y[perm[i]] for i in range(r)])
        out = out + coeff if _perm_sign(perm) > 0 else out - coeff
    return out


def _read_cartier(filtered: MPoly, p: int) -> dict[Partition, MPoly]:
    """Coefficients at strictly decreasing exponents ((a + delta) p + p - 1)."""
    r = filtered.r
    out: dict[Partition, MPoly] = {}
    seen = set()
    for exps, _ in filtered.terms():
        y = exps[:r]
        if y in seen or any(u <= v for u, v in zip(y, y[1:])):
            continue
        seen.add(y)
        a = tuple((u + 1) // p - 1 - (r - 1 - i) for i, u in enumerate(y))
        out[a] = filtered.coeff_extract(y)
    return out


def _congruent_part(f: MPoly, p: int) -> MPoly:
    """Terms of f whose t-exponents are all p - 1 mod p."""
    exps = f.exponents()
    keep = ((exps[:, : f.r] % p) == p - 1).all(axis=1)
    return MPoly.from_arrays(p, f.r, f.n, exps[keep], f.coefs[keep])


def verify_round_trip(pair: PrimePair, params: ModelParams, J: Sequence[int], *,
                      max_terms: int | None = None) -> bool:
    """Expand Phi_p W_J in full and check its decomposition against Schur polynomials.

    The congruent part must be skew-symmetric in t, and must equal the sum of
    c_J^(a)(z) s_a(t^p) prod_{i<j}(t_i^p - t_j^p) (t_1...t_r)^(p-1) over the
    partitions read off from it.  Meant for small cases only.
    """
    p, r, n = pair.p, params.r, params.n
    part = _congruent_part(phi_times_weight(pair, params, J, max_terms=max_terms), p)
    if not part.is_symmetric_in_t(-1):
        return False
    vand = MPoly.constant(p, 1, r, 0)
    for i, j in itertools.combinations(range(r), 2):
        vand = vand * (MPoly.variable(p, r, 0, i) - MPoly.variable(p, r, 0, j))
    shift = [p - 1] * r
    rebuilt = MPoly.zero(p, r, n)
    for a, coeff in _read_cartier(part, p).items():
        basis = (schur(a, r, p) * vand).inflate(p).mul_monomial(shift)
        rebuilt = rebuilt + MPoly.join(basis, coeff)
    return rebuilt == part


def _check_type1(pair: PrimePair) -> None:
    if not pair.is_type1:
        raise InvalidInput(f"({pair.p}, {pair.q}) is a type-2 pair; the decomposition needs c odd")


def cartier_row(pair: PrimePair, params: ModelParams, a: Sequence[int], *,
                mode: str = "auto", max_terms: int | None = None) -> VectorPoly:
    """The vector (c_J^(a))_J by alternating sums over t-permutations.

    Each entry is sum_sigma sgn(sigma) [t^(y o sigma)] of Phi_p / prod_i (t_i - z_{j_i}),
    which equals [t^y](Phi_p W_J) because Phi_p is skew-symmetric (c odd).
    mode "orbit" computes the J0 entry only and renames, as construct_solution does.
    """
    params.validate(pair)
    _check_type1(pair)
    a = _check_partition(a)
    if len(a) != params.r:
        raise InvalidInput(f"partition must have {params.r} parts")
    if mode not in ("auto", "direct", "orbit"):
        raise InvalidInput(f"unknown mode {mode!r}")
    max_terms = default_max_terms() if max_terms is None else max_terms
    p, n, r = pair.p, params.n, params.r
    y = target_exponents(a, p)
    ex = SplitExtractor(pair, params, [max(y)] * r, max_terms)
    J0 = tuple(range(1, r + 1))
    base = _alternant_entry(ex, J0, y)
    all_J = subsets(n, r)
    if mode == "auto":
        mode = "direct" if len(all_J) * len(base) <= _EXPLICIT_LIMIT else "orbit"
    if mode == "orbit":
        return OrbitVectorPoly(p, n, r, base)
    entries = {J0: base}
    for J in all_J:
        if J != J0:
            entries[J] = _alternant_entry(ex, J, y)
    return VectorPoly(p, n, r, entries)


def cartier_decompose(pair: PrimePair, params: ModelParams, *, extent: int | None = None,
                      method: str = "alternant", max_terms: int | None = None,
                      mode: str = "auto") -> CartierTable:
    """The table c_J^(a) for a in A(extent), extent defaulting to kg - 1.

    method "alternant" builds each row with cartier_row.  method "expand" expands
    Phi_p W_J in full, keeps the congruent part, and reads each coefficient at
    t^y directly; it is meant for small cases.
    """
    params.validate(pair)
    _check_type1(pair)
    if method not in ("alternant", "expand"):
        raise InvalidInput(f"unknown method {method!r}")
    extent = pair.k * params.g - 1 if extent is None else extent
    if extent < 0:
        raise InvalidInput("extent must be nonnegative")
    max_terms = default_max_terms() if max_terms is None else max_terms
    p, n, r = pair.p, params.n, params.r
    table = CartierTable(pair, params, extent)
    parts = table.partitions()
    if method == "alternant":
        for a in parts:
            table.rows[a] = cartier_row(pair, params, a, mode=mode, max_terms=max_terms)
        return table
    entries: dict[Partition, dict[Subset, MPoly]] = {a: {} for a in parts}
    for J in subsets(n, r):
        part = _congruent_part(phi_times_weight(pair, params, J, max_terms=max_terms), p)
        for a in parts:
            entries[a][J] = part.coeff_extract(target_exponents(a, p))
    for a in parts:
        table.rows[a] = VectorPoly(p, n, r, entries[a])
    return table


def rows_agree(row: VectorPoly, sol: VectorPoly) -> bool:
    """Componentwise equality; two orbit vectors agree iff their bases do."""
    if isinstance(row, OrbitVectorPoly) and isinstance(sol, OrbitVectorPoly):
        return row.base == sol.base
    return all(row.component(J) == sol.component(J) for J in row.subsets())


def verify_reconstruction(pair: PrimePair, params: ModelParams, *, extent: int | None = None,
                          table: CartierTable | None = None, solve=None,
                          max_terms: int | None = None) -> bool:
    """c_J^(a) equals the J-component of I^(a_1 + r, ..., a_r + 1) for every a and J.

    ``solve`` maps a tuple L to its solution (defaults to construct_solution).
    Raises CertificationError naming the first disagreeing partition.
    """
    if table is None:
        table = cartier_decompose(pair, params, extent=extent, max_terms=max_terms)
    if solve is None:
        def solve(L):
            return construct_solution(pair, params, L, max_terms=max_terms)
    for a in table.partitions():
        if not rows_agree(table.rows[a], solve(partition_to_tuple(a))):
            raise CertificationError(a, "Cartier coefficients differ from the solution")
    return True


def partition_count(d: int, r: int) -> int:
    """|A(d)| by the closed form, for comparison with enumeration."""
    return comb(d + r, r)
