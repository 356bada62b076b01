"""p-hypergeometric solutions of the sl2 KZ equations modulo p, and their checks.

A solution lives in the weight space of W^{(x)n} spanned by the basis vectors
V_J, where J is the set of tensor positions carrying the lowering weight w_2.
Subsets are 1-based sorted tuples throughout.
"""

from __future__ import annotations

import itertools
import os
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from math import comb

import numpy as np

from .arith import PrimePair, binom_mod_p, inv_mod
from .errors import CertificationError, InvalidInput
from .mpoly import MPoly, extract_product

Subset = tuple[int, ...]

DEFAULT_MAX_TERMS = 10**7
# below this many stored terms a solution keeps every component explicitly
_EXPLICIT_LIMIT = 5 * 10**5


def default_max_terms() -> int:
    env = os.environ.get("KZMODP_MAX_TERMS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InvalidInput(f"KZMODP_MAX_TERMS must be an integer, got {env!r}") from None
        if value <= 0:
            raise InvalidInput("KZMODP_MAX_TERMS must be positive")
        return value
    return DEFAULT_MAX_TERMS


def subsets(n: int, r: int) -> list[Subset]:
    """All r-subsets of {1..n} in ascending lex order."""
    return list(itertools.combinations(range(1, n + 1), r))


def _check_subset(J: Sequence[int], n: int, r: int | None = None) -> Subset:
    J = tuple(sorted(int(j) for j in J))
    if len(set(J)) != len(J) or any(not 1 <= j <= n for j in J):
        raise InvalidInput(f"{J} is not a subset of 1..{n}")
    if r is not None and len(J) != r:
        raise InvalidInput(f"{J} does not have {r} elements")
    return J


@dataclass(frozen=True)
class ModelParams:
    n: int
    r: int
    g: int

    @classmethod
    def for_pair(cls, pair: PrimePair, *, r: int, g: int | None = None,
                 n: int | None = None) -> ModelParams:
        """Fill in whichever of n and g is missing from n = q*g + 2r - 1 and validate."""
        if r < 1:
            raise InvalidInput("r must be at least 1")
        if g is None and n is None:
            raise InvalidInput("give g or n")
        if g is None:
            g, rem = divmod(n - 2 * r + 1, pair.q)
            if rem:
                raise InvalidInput(f"n={n} is not of the form {pair.q}*g + {2 * r - 1}")
        if n is None:
            n = pair.q * g + 2 * r - 1
        params = cls(n, r, g)
        params.validate(pair)
        return params

    def validate(self, pair: PrimePair) -> None:
        if self.r < 1 or self.g < 1:
            raise InvalidInput("r and g must be positive")
        if self.n != pair.q * self.g + 2 * self.r - 1:
            raise InvalidInput(
                f"n={self.n} must equal q*g + 2r - 1 = {pair.q * self.g + 2 * self.r - 1}")
        if self.n < 2 * self.r:
            raise InvalidInput(f"n={self.n} < 2r: no singular vectors")
        if not self.degree_bound_holds(pair):
            raise InvalidInput(f"M - g = {pair.M - self.g} < 0")

    def degree_bound_holds(self, pair: PrimePair) -> bool:
        return pair.M - self.g >= 0

    def max_index(self, pair: PrimePair) -> int:
        """Largest entry kg + r - 1 an admissible tuple may have."""
        return pair.k * self.g + self.r - 1

    def admissible_tuples(self, pair: PrimePair) -> list[tuple[int, ...]]:
        """Strictly decreasing tuples with entries in 1..kg+r-1, lex descending."""
        top = self.max_index(pair)
        return list(itertools.combinations(range(top, 0, -1), self.r))

    def expected_rank(self, pair: PrimePair) -> int:
        return comb(self.max_index(pair), self.r)


def is_admissible(pair: PrimePair, params: ModelParams, L: Sequence[int]) -> bool:
    L = tuple(L)
    return (len(L) == params.r and all(a > b for a, b in zip(L, L[1:]))
            and L[-1] >= 1 and L[0] <= params.max_index(pair))


def _check_L(params: ModelParams, L: Sequence[int]) -> tuple[int, ...]:
    L = tuple(int(x) for x in L)
    if len(L) != params.r:
        raise InvalidInput(f"L must have {params.r} entries, got {len(L)}")
    if any(x < 1 for x in L):
        raise InvalidInput("entries of L must be positive")
    return L


def solution_degree(pair: PrimePair, params: ModelParams, L: Sequence[int]) -> int:
    """Total z-degree of a nonzero solution component."""
    n, r = params.n, params.r
    return comb(r, 2) * pair.c + r * (n * pair.M - 1) - sum(l * pair.p - 1 for l in L)


# ---------------------------------------------------------------------------
# vectors


class VectorPoly:
    """Vector of z-polynomials indexed by r-subsets; absent subsets are zero."""

    symmetric = False

    def __init__(self, p: int, n: int, r: int, components: Mapping[Subset, MPoly] | None = None):
        self.p, self.n, self.r = p, n, r
        self._components: dict[Subset, MPoly] = {}
        for J, f in (components or {}).items():
            J = _check_subset(J, n, r)
            if (f.p, f.r, f.n) != (p, 0, n):
                raise InvalidInput(f"component {J} is not a z-polynomial mod {p} in {n} variables")
            if not f.is_zero:
                self._components[J] = f

    @classmethod
    def from_constants(cls, p: int, n: int, r: int, coeffs: Mapping[Subset, int]) -> VectorPoly:
        return cls(p, n, r, {J: MPoly.constant(p, c, 0, n) for J, c in coeffs.items()})

    def subsets(self) -> list[Subset]:
        return subsets(self.n, self.r)

    def component(self, J: Sequence[int]) -> MPoly:
        J = _check_subset(J, self.n, self.r)
        f = self._components.get(J)
        return f if f is not None else MPoly.zero(self.p, 0, self.n)

    __getitem__ = component

    def items(self) -> Iterator[tuple[Subset, MPoly]]:
        """Nonzero components in ascending J order."""
        for J in sorted(self._components):
            yield J, self._components[J]

    @property
    def is_zero(self) -> bool:
        return not self._components

    def support(self) -> list[Subset]:
        return sorted(self._components)

    def materialize(self) -> VectorPoly:
        return self

    def max_component_size(self) -> int:
        return max((len(f) for _, f in self.items()), default=0)

    def _binary(self, other: VectorPoly, op: Callable[[MPoly, MPoly], MPoly]) -> VectorPoly:
        if (self.p, self.n, self.r) != (other.p, other.n, other.r):
            raise InvalidInput("incompatible vectors")
        keys = set(self.support()) | set(other.support())
        return VectorPoly(self.p, self.n, self.r,
                          {J: op(self.component(J), other.component(J)) for J in keys})

    def __add__(self, other: VectorPoly) -> VectorPoly:
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other: VectorPoly) -> VectorPoly:
        return self._binary(other, lambda a, b: a - b)

    def scale(self, c: int) -> VectorPoly:
        return VectorPoly(self.p, self.n, self.r, {J: f.scale(c) for J, f in self.items()})

    def mul_poly(self, f: MPoly) -> VectorPoly:
        """Multiply every component by the z-polynomial f."""
        return VectorPoly(self.p, self.n, self.r, {J: g * f for J, g in self.items()})

    def rename_z(self, perm: Mapping[int, int] | Sequence[int]) -> VectorPoly:
        """Apply the permutation s -> perm[s] (1-based) to z-variables and subsets alike."""
        perm = _perm_list(perm, self.n)
        mapping = [perm[s] - 1 for s in range(1, self.n + 1)]
        out = {}
        for J, f in self.items():
            out[tuple(sorted(perm[j] for j in J))] = f.rename(mapping)
        return VectorPoly(self.p, self.n, self.r, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorPoly):
            return NotImplemented
        if (self.p, self.n, self.r) != (other.p, other.n, other.r):
            return False
        return all(self.component(J) == other.component(J) for J in self.subsets())

    __hash__ = None

    def __repr__(self) -> str:
        return (f"{type(self).__name__}(p={self.p}, n={self.n}, r={self.r}, "
                f"components={len(self.support())})")


def _perm_list(perm, n: int) -> list[int]:
    if isinstance(perm, Mapping):
        full = [0] + [perm.get(s, s) for s in range(1, n + 1)]
    else:
        full = [0] + list(perm)
    if sorted(full[1:]) != list(range(1, n + 1)):
        raise InvalidInput("not a permutation of 1..n")
    return full


def orbit_permutation(J: Subset, n: int) -> list[int]:
    """0-based z-renaming sending 1..r onto J and the rest onto the complement, in order."""
    r = len(J)
    rest = [s for s in range(1, n + 1) if s not in J]
    target = list(J) + rest
    return [target[i] - 1 for i in range(n)]


class OrbitVectorPoly(VectorPoly):
    """S_n-equivariant vector stored through its component at J0 = (1..r).

    The component at J is the J0 component with z_i renamed to z_{pi(i)}, where
    pi sends 1..r onto J and the complement of J0 onto the complement of J, both
    in increasing order.  Construction checks that the base is invariant under
    permutations fixing J0, which makes the choice of pi irrelevant.
    """

    symmetric = True

    def __init__(self, p: int, n: int, r: int, base: MPoly, *, check: bool = True):
        super().__init__(p, n, r)
        if (base.p, base.r, base.n) != (p, 0, n):
            raise InvalidInput("base must be a z-polynomial")
        self.base = base
        if check and not self.stabilizer_invariant():
            raise CertificationError("orbit base", "not invariant under the stabilizer of J0")

    @property
    def J0(self) -> Subset:
        return tuple(range(1, self.r + 1))

    def stabilizer_invariant(self) -> bool:
        n, r = self.n, self.r
        for a in itertools.chain(range(r - 1), range(r, n - 1)):
            mapping = list(range(n))
            mapping[a], mapping[a + 1] = a + 1, a
            if self.base.rename(mapping) != self.base:
                return False
        return True

    def component(self, J: Sequence[int]) -> MPoly:
        J = _check_subset(J, self.n, self.r)
        if J == self.J0:
            return self.base
        return self.base.rename(orbit_permutation(J, self.n))

    __getitem__ = component

    def permuted_keys(self, J: Subset) -> np.ndarray:
        """Unsorted keys of component J (cheaper than building it)."""
        return self.base.permuted_keys(orbit_permutation(J, self.n))

    def items(self) -> Iterator[tuple[Subset, MPoly]]:
        if self.base.is_zero:
            return
        for J in self.subsets():
            yield J, self.component(J)

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero

    def support(self) -> list[Subset]:
        return [] if self.base.is_zero else self.subsets()

    def max_component_size(self) -> int:
        return len(self.base)

    def materialize(self) -> VectorPoly:
        return VectorPoly(self.p, self.n, self.r, dict(self.items()))


# ---------------------------------------------------------------------------
# master polynomial and weight functions


def _t_diff_power(p: int, r: int, n: int, i: int, v: int, e: int, caps=None) -> MPoly:
    """(x_i - x_v)^e for global variable indices i (a t-variable) and v."""
    terms = {}
    for a in range(e + 1):
        exps = [0] * (r + n)
        exps[i] += e - a
        exps[v] += a
        c = binom_mod_p(e, a, p) * (-1) ** a
        if c % p and (caps is None or all(cp is None or x <= cp for x, cp in zip(exps, caps))):
            terms[tuple(exps)] = c
    return MPoly.from_terms(p, r, n, terms)


def _vandermonde_power(pair: PrimePair, r: int, n: int, caps=None, max_terms=None) -> MPoly:
    out = MPoly.constant(pair.p, 1, r, n)
    for i, j in itertools.combinations(range(r), 2):
        out = out.mul(_t_diff_power(pair.p, r, n, i, j, pair.c, caps), caps, max_terms)
    return out


def _exponent_table(pair: PrimePair, params: ModelParams, J: Subset | None,
                    sigma: Sequence[int] | None) -> list[list[int]]:
    """Exponent of (t_i - z_s); t_i loses one at z_{J[sigma[i]]}."""
    table = [[pair.M] * params.n for _ in range(params.r)]
    if J is not None:
        for i in range(params.r):
            table[i][J[sigma[i]] - 1] -= 1
    return table


def _factor_product(pair: PrimePair, params: ModelParams, table, zs: Iterable[int], *,
                    vandermonde: bool, caps=None, max_terms=None) -> MPoly:
    p, r, n = pair.p, params.r, params.n
    out = (_vandermonde_power(pair, r, n, caps, max_terms) if vandermonde
           else MPoly.constant(p, 1, r, n))
    for s in zs:
        factor = MPoly.constant(p, 1, r, n)
        for i in range(r):
            factor = factor.mul(_t_diff_power(p, r, n, i, r + s, table[i][s], caps), caps)
        out = out.mul(factor, caps, max_terms)
    return out


def master_polynomial(pair: PrimePair, params: ModelParams, *, max_terms: int | None = None) -> MPoly:
    """prod_{i<j} (t_i - t_j)^c prod_{i,s} (t_i - z_s)^M over F_p."""
    params.validate(pair)
    max_terms = default_max_terms() if max_terms is None else max_terms
    table = _exponent_table(pair, params, None, None)
    return _factor_product(pair, params, table, range(params.n), vandermonde=True,
                           max_terms=max_terms)


def phi_times_weight(pair: PrimePair, params: ModelParams, J: Sequence[int], *,
                     caps=None, max_terms: int | None = None) -> MPoly:
    """Phi_p * W_J as a polynomial: one decremented product per permutation, summed."""
    params.validate(pair)
    J = _check_subset(J, params.n, params.r)
    max_terms = default_max_terms() if max_terms is None else max_terms
    out = MPoly.zero(pair.p, params.r, params.n)
    for sigma in itertools.permutations(range(params.r)):
        table = _exponent_table(pair, params, J, sigma)
        out = out + _factor_product(pair, params, table, range(params.n), vandermonde=True,
                                    caps=caps, max_terms=max_terms)
    return out


class SplitExtractor:
    """Computes t-coefficients of the decremented products Phi_p / prod_i (t_i - z_{J[sigma(i)]}).

    The z-factors are split into two halves built with t-degree caps; the
    halves share no z-variable, so a product coefficient is a dense block
    convolution.  Half products only depend on which decrements fall into
    them, so they are cached.
    """

    def __init__(self, pair: PrimePair, params: ModelParams, caps: Sequence[int],
                 max_terms: int):
        self.pair, self.params = pair, params
        self.max_terms = max_terms
        self.caps = list(caps) + [None] * params.n
        split = params.n // 2
        self.halves = (tuple(range(split)), tuple(range(split, params.n)))
        self._cache: dict = {}

    def _half(self, which: int, table) -> MPoly:
        zs = self.halves[which]
        key = (which, tuple(tuple(row[s] for s in zs) for row in table))
        if key not in self._cache:
            self._cache[key] = _factor_product(
                self.pair, self.params, table, zs, vandermonde=(which == 1),
                caps=self.caps, max_terms=self.max_terms)
        return self._cache[key]

    def term(self, J: Subset, sigma: Sequence[int], target: Sequence[int]) -> MPoly:
        """[t^target] of Phi_p / prod_i (t_i - z_{J[sigma[i]]})."""
        table = _exponent_table(self.pair, self.params, J, sigma)
        return extract_product(self._half(0, table), self._half(1, table), target,
                               self.max_terms)

    def weighted(self, J: Subset, target: Sequence[int]) -> MPoly:
        """[t^target] (Phi_p W_J)."""
        out = MPoly.zero(self.pair.p, 0, self.params.n)
        for sigma in itertools.permutations(range(self.params.r)):
            out = out + self.term(J, sigma, target)
        return out


def construct_solution(pair: PrimePair, params: ModelParams, L: Sequence[int], *,
                       mode: str = "auto", method: str = "split",
                       max_terms: int | None = None, verify_orbit: bool = False) -> VectorPoly:
    """The vector I^(L) whose J-component is [t^(l_i p - 1)] Phi_p W_J.

    mode "direct" stores every component; "orbit" stores the J0 component
    only, which is exact because Phi_p is symmetric in z and W_J is W_J0 with
    z renamed (the base is checked for invariance under the stabilizer of J0;
    verify_orbit also recomputes every other component); "auto" picks
    "direct" when the total size is modest.  method "expand"
    builds Phi_p W_J in full before extracting and is meant for small cases.
    """
    params.validate(pair)
    L = _check_L(params, L)
    if mode not in ("auto", "direct", "orbit"):
        raise InvalidInput(f"unknown mode {mode!r}")
    if method not in ("split", "expand"):
        raise InvalidInput(f"unknown method {method!r}")
    max_terms = default_max_terms() if max_terms is None else max_terms
    p, n, r = pair.p, params.n, params.r
    target = [l * p - 1 for l in L]

    if method == "expand":
        def compute(J: Subset) -> MPoly:
            caps = target + [None] * n
            return phi_times_weight(pair, params, J, caps=caps,
                                    max_terms=max_terms).coeff_extract(target)
    else:
        extractor = SplitExtractor(pair, params, target, max_terms)

        def compute(J: Subset) -> MPoly:
            return extractor.weighted(J, target)

    J0 = tuple(range(1, r + 1))
    base = compute(J0)
    all_J = subsets(n, r)
    if mode == "auto":
        mode = "direct" if len(all_J) * len(base) <= _EXPLICIT_LIMIT else "orbit"
    if mode == "direct":
        comps = {J0: base}
        for J in all_J:
            if J != J0:
                comps[J] = compute(J)
        return VectorPoly(p, n, r, comps)

    # the stabilizer check is what lets the checks use one J per orbit
    vec = OrbitVectorPoly(p, n, r, base)
    if verify_orbit:
        for J in all_J:
            if J != J0 and compute(J) != vec.component(J):
                raise CertificationError(J, "component differs from the renamed J0 component")
    return vec


# ---------------------------------------------------------------------------
# the operator Omega - 1/2


def casimir_matrix(p: int) -> np.ndarray:
    """(Omega - 1/2) on W (x) W over F_p, basis w_a (x) w_b at index 2a + b (w_1 -> 0)."""
    half = inv_mod(2, p)
    e = np.array([[0, 1], [0, 0]], dtype=np.int64)
    f = np.array([[0, 0], [1, 0]], dtype=np.int64)
    h = np.array([[1, 0], [0, -1]], dtype=np.int64)
    omega = half * np.kron(h, h) + np.kron(e, f) + np.kron(f, e)
    return (omega - half * np.eye(4, dtype=np.int64)) % p


def _casimir_entries(m: int, j: int, J: Subset, mat: np.ndarray) -> list[tuple[Subset, int]]:
    """Image of V_J under (Omega_mj - 1/2) as (subset, coefficient) pairs."""
    a, b = int(m in J), int(j in J)
    col = 2 * a + b
    rest = [x for x in J if x not in (m, j)]
    out = []
    for row in range(4):
        c = int(mat[row, col])
        if c:
            na, nb = divmod(row, 2)
            out.append((tuple(sorted(rest + [m] * na + [j] * nb)), c))
    return out


def casimir_minus_half(m: int, j: int, v: VectorPoly) -> VectorPoly:
    """Apply Omega_{mj} - 1/2 to v, acting in tensor positions m and j (1-based)."""
    n = v.n
    if m == j or not (1 <= m <= n and 1 <= j <= n):
        raise InvalidInput(f"need distinct positions in 1..{n}, got {m}, {j}")
    mat = casimir_matrix(v.p)
    acc: dict[Subset, MPoly] = {}
    for J, f in v.items():
        for K, c in _casimir_entries(m, j, J, mat):
            acc[K] = acc[K] + f.scale(c) if K in acc else f.scale(c)
    return VectorPoly(v.p, n, v.r, acc)


def casimir_on_constants(m: int, j: int, coeffs: Mapping[Subset, int], p: int) -> dict[Subset, int]:
    """Omega_{mj} - 1/2 on a constant vector given as {J: coefficient}."""
    mat = casimir_matrix(p)
    out: dict[Subset, int] = {}
    for J, x in coeffs.items():
        for K, c in _casimir_entries(m, j, tuple(J), mat):
            out[K] = (out.get(K, 0) + c * x) % p
    return {K: x for K, x in out.items() if x}


# ---------------------------------------------------------------------------
# checks


def check_singular(v: VectorPoly, params: ModelParams | None = None) -> bool:
    """Sum over j not in K of v_{K + j} vanishes for every (r-1)-subset K."""
    n, r = v.n, v.r
    if params is not None and (params.n, params.r) != (n, r):
        raise InvalidInput("vector shape does not match params")
    if v.is_zero:
        return True
    Ks = [tuple(range(1, r))] if v.symmetric else list(itertools.combinations(range(1, n + 1), r - 1))
    for K in Ks:
        total = MPoly.zero(v.p, 0, n)
        for j in range(1, n + 1):
            if j not in K:
                total = total + v.component(tuple(sorted(K + (j,))))
        if not total.is_zero:
            return False
    return True


def _swap(J: Subset, m: int, j: int) -> Subset:
    return tuple(sorted(j if x == m else m if x == j else x for x in J))


def _kz_pairs(v: VectorPoly) -> list[tuple[int, Subset]]:
    if v.symmetric:
        J0 = tuple(range(1, v.r + 1))
        return [(1, J0), (v.r + 1, J0)]
    return [(m, J) for m in range(1, v.n + 1) for J in v.subsets()]


def _kz_divided(v: VectorPoly, qm: int, m: int, J: Subset, vJ: MPoly) -> bool:
    rhs = MPoly.zero(v.p, 0, v.n)
    for j in range(1, v.n + 1):
        if j == m or (m in J) == (j in J):
            continue
        numer = v.component(_swap(J, m, j)) - vJ
        quot, rem = numer.divide_by_difference(m - 1, j - 1)
        if not rem.is_zero:
            return False
        rhs = rhs + quot
    return vJ.partial_derivative(m - 1).scale(qm) == rhs


def _linear(p: int, n: int, a: int, b: int) -> MPoly:
    """z_a - z_b (1-based)."""
    return MPoly.from_terms(p, 0, n, {tuple(int(s == a - 1) for s in range(n)): 1,
                                      tuple(int(s == b - 1) for s in range(n)): -1})


def _kz_cleared(v: VectorPoly, qm: int, m: int, J: Subset, vJ: MPoly) -> bool:
    p, n = v.p, v.n
    diffs = {j: _linear(p, n, m, j) for j in range(1, n + 1) if j != m}
    full = MPoly.constant(p, 1, 0, n)
    for d in diffs.values():
        full = full * d
    lhs = full * vJ.partial_derivative(m - 1).scale(qm)
    rhs = MPoly.zero(p, 0, n)
    for j in diffs:
        if (m in J) == (j in J):
            continue
        others = MPoly.constant(p, 1, 0, n)
        for l, d in diffs.items():
            if l != j:
                others = others * d
        rhs = rhs + others * (v.component(_swap(J, m, j)) - vJ)
    return lhs == rhs


def check_kz(v: VectorPoly, pair: PrimePair, params: ModelParams | None = None, *,
             form: str = "divided") -> bool:
    """Exact check of q d_m v = sum_j (Omega_mj - 1/2) v / (z_m - z_j) over F_p.

    The component of (Omega_mj - 1/2) v at J is v_{J with m,j swapped} - v_J when
    exactly one of m, j lies in J, and zero otherwise.  form "divided" divides
    each numerator by z_m - z_j and requires zero remainders; form "cleared"
    multiplies through by prod_{j != m} (z_m - z_j).  The two are equivalent
    because the poles z_m = z_j are distinct.
    """
    if params is not None and (params.n, params.r) != (v.n, v.r):
        raise InvalidInput("vector shape does not match params")
    if form not in ("divided", "cleared"):
        raise InvalidInput(f"unknown form {form!r}")
    qm = pair.q % v.p
    check = _kz_divided if form == "divided" else _kz_cleared
    cache: dict[Subset, MPoly] = {}
    for m, J in _kz_pairs(v):
        if J not in cache:
            cache = {J: v.component(J)}
        if not check(v, qm, m, J, cache[J]):
            return False
    return True


def kz_residual(v: VectorPoly, pair: PrimePair, m: int) -> VectorPoly:
    """The vector q d_m v - sum_j (Omega_mj - 1/2) v / (z_m - z_j) when it is a polynomial.

    Raises CertificationError if some numerator is not divisible by z_m - z_j.
    """
    qm = pair.q % v.p
    out = {}
    for J in v.subsets():
        vJ = v.component(J)
        acc = vJ.partial_derivative(m - 1).scale(qm)
        for j in range(1, v.n + 1):
            if j == m or (m in J) == (j in J):
                continue
            quot, rem = (v.component(_swap(J, m, j)) - vJ).divide_by_difference(m - 1, j - 1)
            if not rem.is_zero:
                raise CertificationError((m, J, j), "numerator not divisible")
            acc = acc - quot
        out[J] = acc
    return VectorPoly(v.p, v.n, v.r, out)


def shifted_master_congruence(pair: PrimePair, params: ModelParams, d0: int,
                              d_vec: Sequence[int], *, max_terms: int | None = None) -> bool:
    """Phi with exponents c + d0 p and M + d_s p equals Phi times the Frobenius factors."""
    params.validate(pair)
    p, r, n = pair.p, params.r, params.n
    d_vec = list(d_vec)
    if len(d_vec) != n or d0 < 0 or min(d_vec, default=0) < 0:
        raise InvalidInput(f"need d0 >= 0 and {n} nonnegative shifts")
    max_terms = default_max_terms() if max_terms is None else max_terms

    shifted = MPoly.constant(p, 1, r, n)
    for i, j in itertools.combinations(range(r), 2):
        shifted = shifted.mul(_t_diff_power(p, r, n, i, j, pair.c + d0 * p), max_terms=max_terms)
    for s in range(n):
        for i in range(r):
            shifted = shifted.mul(_t_diff_power(p, r, n, i, r + s, pair.M + d_vec[s] * p),
                                  max_terms=max_terms)

    frob = master_polynomial(pair, params, max_terms=max_terms)
    for i, j in itertools.combinations(range(r), 2):
        frob = frob.mul(_t_diff_power(p, r, n, i, j, d0).inflate(p), max_terms=max_terms)
    for s in range(n):
        for i in range(r):
            frob = frob.mul(_t_diff_power(p, r, n, i, r + s, d_vec[s]).inflate(p),
                            max_terms=max_terms)
    return shifted == frob


# ---------------------------------------------------------------------------
# the singular subspace as a linear system


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p by Gaussian elimination."""
    a = np.array(matrix, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        pivots = np.flatnonzero(a[rank:, col])
        if pivots.size == 0:
            continue
        piv = rank + int(pivots[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        a[rank] = a[rank] * inv_mod(int(a[rank, col]), p) % p
        below = a[:, col].copy()
        below[rank] = 0
        nz = np.flatnonzero(below)
        if nz.size:
            a[nz] = (a[nz] - below[nz, None] * a[rank]) % p
        rank += 1
    return rank


def singular_system(n: int, r: int) -> tuple[np.ndarray, list[Subset], list[Subset]]:
    """Incidence matrix of the singular-vector equations: rows K, columns J."""
    Js = subsets(n, r)
    Ks = list(itertools.combinations(range(1, n + 1), r - 1))
    col = {J: i for i, J in enumerate(Js)}
    mat = np.zeros((len(Ks), len(Js)), dtype=np.int64)
    for a, K in enumerate(Ks):
        for j in range(1, n + 1):
            if j not in K:
                mat[a, col[tuple(sorted(K + (j,)))]] = 1
    return mat, Ks, Js


def singular_space_dimension(n: int, r: int, p: int) -> int:
    """Dimension over F_p of the space of singular vectors of weight n - 2r."""
    if r == 0:
        return 1
    mat, _, Js = singular_system(n, r)
    return len(Js) - rank_mod_p(mat, p)


__all__ = [
    "DEFAULT_MAX_TERMS",
    "ModelParams",
    "OrbitVectorPoly",
    "SplitExtractor",
    "Subset",
    "VectorPoly",
    "casimir_matrix",
    "casimir_minus_half",
    "casimir_on_constants",
    "check_kz",
    "check_singular",
    "construct_solution",
    "default_max_terms",
    "is_admissible",
    "kz_residual",
    "master_polynomial",
    "orbit_permutation",
    "phi_times_weight",
    "rank_mod_p",
    "shifted_master_congruence",
    "singular_space_dimension",
    "singular_system",
    "solution_degree",
    "subsets",
]
