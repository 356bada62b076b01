"""Leading terms of solutions, their predicted shape, and rank certification.

Monomials are ordered lexicographically with z_1 > z_2 > ... > z_n.  Basis
vectors V_J are ordered by comparing J as ascending tuples, smaller tuple
meaning larger vector, so V_(1..r) is the largest.  The leading index of a
vector is therefore the smallest J in its support.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .arith import PrimePair, binom_mod_p
from .errors import CertificationError, InvalidInput
from .kzcore import (
    ModelParams,
    OrbitVectorPoly,
    Subset,
    VectorPoly,
    casimir_on_constants,
    construct_solution,
    is_admissible,
    orbit_permutation,
)

__all__ = [
    "LeadingData",
    "RankCertificate",
    "TupleCertificate",
    "certify_rank",
    "check_eigen",
    "leading_index",
    "leading_term",
    "predict_index",
    "predict_leading",
]


@dataclass(frozen=True)
class LeadingData:
    exponents: tuple[int, ...]
    # nonzero entries only; predicted data carries just the leading-index entry
    coefficient: Mapping[Subset, int]
    leading_index: Subset

    def to_json(self) -> dict:
        return {
            "exponents": list(self.exponents),
            "leading_index": list(self.leading_index),
            "coefficient": [{"J": list(J), "coef": c} for J, c in sorted(self.coefficient.items())],
        }


def leading_index(coeffs: Mapping[Subset, int]) -> Subset:
    support = [J for J, c in coeffs.items() if c]
    if not support:
        raise InvalidInput("the zero vector has no leading index")
    return min(support)


def _orbit_leading_exponents(v: OrbitVectorPoly, J: Subset) -> tuple[int, ...]:
    """Lex-largest exponent vector of component J without building it."""
    base = v.base
    inverse = [0] * v.n
    for i, s in enumerate(orbit_permutation(J, v.n)):
        inverse[s] = i
    cand = np.arange(len(base))
    out = []
    for s in range(v.n):
        vals = base.field(inverse[s])[cand]
        top = int(vals.max())
        out.append(top)
        cand = cand[vals == top]
    return tuple(out)


def leading_term(v: VectorPoly) -> LeadingData:
    """Lex-largest z-monomial over all components and its coefficient vector."""
    if v.is_zero:
        raise InvalidInput("the zero vector has no leading term")
    if isinstance(v, OrbitVectorPoly):
        best = max(_orbit_leading_exponents(v, J) for J in v.subsets())
        coeffs = {}
        for J in v.subsets():
            perm = orbit_permutation(J, v.n)
            c = v.base.coefficient([best[perm[i]] for i in range(v.n)])
            if c:
                coeffs[J] = c
    else:
        best = max(f.lex_leading()[0] for _, f in v.items())
        coeffs = {J: c for J, f in v.items() if (c := f.coefficient(best))}
    return LeadingData(tuple(best), coeffs, leading_index(coeffs))


def _offsets(pair: PrimePair, params: ModelParams, L: Sequence[int]) -> list[int]:
    """v_i = nM + (r - i)c - l_i p: the length of the i-th run of z-factors."""
    n, r = params.n, params.r
    return [n * pair.M + (r - i) * pair.c - l * pair.p for i, l in enumerate(L, start=1)]


def _require_admissible(pair: PrimePair, params: ModelParams, L: Sequence[int]) -> tuple[int, ...]:
    L = tuple(int(x) for x in L)
    if not is_admissible(pair, params, L):
        raise InvalidInput(f"{L} is not admissible for {params}")
    if not params.degree_bound_holds(pair):
        raise InvalidInput(f"M - g < 0 for {params}")
    return L


def predict_index(pair: PrimePair, params: ModelParams, L: Sequence[int]) -> Subset:
    """The m_i with (m_i - 1)M <= v_i < m_i M."""
    L = _require_admissible(pair, params, L)
    return tuple(v // pair.M + 1 for v in _offsets(pair, params, L))


def predict_leading(pair: PrimePair, params: ModelParams, L: Sequence[int]) -> LeadingData:
    """Predicted exponents, leading index, and the coefficient entry at that index."""
    L = _require_admissible(pair, params, L)
    M, p = pair.M, pair.p
    offsets = _offsets(pair, params, L)
    index = tuple(v // M + 1 for v in offsets)
    # the i-th run covers z_1^M ... z_{m_i - 1}^M z_{m_i}^{e_i}
    exps = tuple(sum(min(max(v - (s - 1) * M, 0), M) for v in offsets)
                 for s in range(1, params.n + 1))
    entry = 1
    for v, m in zip(offsets, index):
        e = v - (m - 1) * M
        entry = entry * (-1) ** e * binom_mod_p(M - 1, e, p)
    return LeadingData(exps, {index: entry % p}, index)


def check_eigen(ld: LeadingData, pair: PrimePair, params: ModelParams) -> bool:
    """sum_{l > j} (Omega_jl - 1/2) C = q d_j C for j < n, and d_n = 0 mod p."""
    p, n = pair.p, params.n
    d = ld.exponents
    if len(d) != n:
        raise InvalidInput(f"need {n} exponents")
    if d[-1] % p:
        return False
    C = {J: c % p for J, c in ld.coefficient.items() if c % p}
    for j in range(1, n):
        acc: dict[Subset, int] = {}
        for ell in range(j + 1, n + 1):
            for K, x in casimir_on_constants(j, ell, C, p).items():
                acc[K] = (acc.get(K, 0) + x) % p
        lam = pair.q * d[j - 1] % p
        want = {J: lam * c % p for J, c in C.items()}
        keys = set(acc) | set(want)
        if any(acc.get(K, 0) % p != want.get(K, 0) for K in keys):
            return False
    return True


@dataclass
class TupleCertificate:
    L: tuple[int, ...]
    leading: LeadingData
    predicted: LeadingData
    eigen: bool

    def to_json(self) -> dict:
        return {"L": list(self.L), "leading": self.leading.to_json(),
                "predicted_entry": self.predicted.coefficient[self.predicted.leading_index],
                "eigen": self.eigen}


@dataclass
class RankCertificate:
    pair: PrimePair
    params: ModelParams
    tuples: list[TupleCertificate] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.tuples)

    @property
    def basis(self) -> list[tuple[int, ...]]:
        return [t.L for t in self.tuples]


def certify_tuple(pair: PrimePair, params: ModelParams, L: Sequence[int],
                  v: VectorPoly) -> TupleCertificate:
    """Compare one solution's leading term with the prediction; raise on mismatch."""
    L = tuple(L)
    if v.is_zero:
        raise CertificationError(L, "solution is zero")
    got = leading_term(v)
    want = predict_leading(pair, params, L)
    if got.exponents != want.exponents:
        raise CertificationError(L, f"leading exponents {got.exponents} != predicted {want.exponents}")
    if got.leading_index != want.leading_index:
        raise CertificationError(
            L, f"leading index {got.leading_index} != predicted {want.leading_index}")
    entry = got.coefficient.get(want.leading_index, 0)
    if entry != want.coefficient[want.leading_index]:
        raise CertificationError(
            L, f"leading entry {entry} != predicted {want.coefficient[want.leading_index]}")
    return TupleCertificate(L, got, want, check_eigen(got, pair, params))


def certify_rank(pair: PrimePair, params: ModelParams, *,
                 solve: Callable[[tuple[int, ...]], VectorPoly] | None = None,
                 max_terms: int | None = None) -> RankCertificate:
    """Certify that the admissible solutions are independent over F_p[z].

    Every admissible solution must be nonzero with the predicted leading term,
    and the leading indices must be pairwise distinct.  ``solve`` maps a tuple
    to its solution (defaults to construct_solution).
    """
    params.validate(pair)
    if not pair.is_type1:
        raise InvalidInput(f"({pair.p}, {pair.q}) is a type-2 pair; nothing is certified")
    if solve is None:
        def solve(L):
            return construct_solution(pair, params, L, max_terms=max_terms)
    cert = RankCertificate(pair, params)
    seen: dict[Subset, tuple[int, ...]] = {}
    for L in params.admissible_tuples(pair):
        tc = certify_tuple(pair, params, L, solve(L))
        idx = tc.leading.leading_index
        if idx in seen:
            raise CertificationError(L, f"leading index {idx} repeats that of {seen[idx]}")
        seen[idx] = L
        cert.tuples.append(tc)
    if cert.rank != params.expected_rank(pair):
        raise CertificationError(params, f"rank {cert.rank} != {params.expected_rank(pair)}")
    return cert
