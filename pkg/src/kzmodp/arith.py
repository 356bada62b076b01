"""Prime-field helpers and classification of prime pairs (p, q)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidInput

__all__ = [
    "PrimePair",
    "binom_mod_p",
    "classify_pair",
    "inv_mod",
    "is_prime",
    "primes_in_range",
]


def is_prime(n: int) -> bool:
    """Deterministic trial division; intended for n below ~10**12."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def primes_in_range(lo: int, hi: int) -> list[int]:
    return [n for n in range(max(lo, 2), hi) if is_prime(n)]


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


@lru_cache(maxsize=32)
def _factorials(p: int) -> tuple[list[int], list[int]]:
    fact = [1] * p
    for i in range(1, p):
        fact[i] = fact[i - 1] * i % p
    inv = [1] * p
    inv[p - 1] = pow(fact[p - 1], p - 2, p)
    for i in range(p - 1, 0, -1):
        inv[i - 1] = inv[i] * i % p
    return fact, inv


def binom_mod_p(a: int, b: int, p: int) -> int:
    """C(a, b) mod p by Lucas' theorem (product over base-p digits)."""
    if a < 0 or b < 0:
        raise InvalidInput("binomial arguments must be nonnegative")
    if b > a:
        return 0
    fact, inv = _factorials(p)
    result = 1
    while b:
        ai, bi = a % p, b % p
        if bi > ai:
            return 0
        result = result * fact[ai] % p * inv[bi] % p * inv[ai - bi] % p
        a //= p
        b //= p
    return result


@dataclass(frozen=True)
class PrimePair:
    """A pair of primes p > q with the derived constants k, M, c.

    ``k`` is the least positive integer with q | kp - 1.  For type-1 pairs
    (k <= q/2) ``M`` and ``c`` are the least positive residues of -1/q and
    2/q mod p, with 2M + c = p.  Type-2 pairs keep the least positive
    residues too, but nothing downstream is certified for them.
    """

    p: int
    q: int
    k: int
    pair_type: int
    M: int
    c: int

    @property
    def is_type1(self) -> bool:
        return self.pair_type == 1

    @property
    def inv2(self) -> int:
        return inv_mod(2, self.p)

    @property
    def q_mod_p(self) -> int:
        return self.q % self.p


def classify_pair(p: int, q: int) -> PrimePair:
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if not is_prime(q):
        raise InvalidInput(f"{q} is not prime")
    if p <= q:
        raise InvalidInput(f"need p > q, got p={p}, q={q}")
    # q is tiny, a linear scan is fine
    k = next(k for k in range(1, q) if (k * p - 1) % q == 0)
    pair_type = 1 if 2 * k <= q else 2
    M, rem_m = divmod(k * p - 1, q)
    c, rem_c = divmod((q - 2 * k) * p + 2, q)
    assert rem_m == 0 and rem_c == 0
    if c <= 0:
        # type 2: the closed form is nonpositive, keep the least positive residue
        c += p
    return PrimePair(p=p, q=q, k=k, pair_type=pair_type, M=M, c=c)
