"""Sparse polynomials over F_p in a t-block and a z-block of variables.

Variables are ordered t_1, ..., t_r, z_1, ..., z_n.  Each term is stored as a
packed integer key holding one fixed-width bit field per exponent, with t_1 in
the most significant field.  Integer order on keys is therefore lex order on
exponent vectors, and terms are kept sorted by descending key.

The t-block and the z-block each use a uniform field width, so permuting
variables inside a block never changes the layout.  When the fields no longer
fit in 63 bits the keys fall back to Python integers (object arrays).
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInput, SizeGuardError

__all__ = [
    "MPoly",
    "ZPoly",
    "coeff_extract",
    "extract_product",
    "lex_leading",
    "mul",
    "partial_derivative",
    "power",
    "symmetrize_check",
]

_MIN_BITS = 4
_MAX_KEY_BITS = 63
# rows materialized per chunk in products
_BLOCK = 1 << 22
_FLOAT_EXACT = 1 << 53


def _bits(maxexp: int) -> int:
    return max(_MIN_BITS, int(maxexp).bit_length())


def _shifts(r: int, n: int, tbits: int, zbits: int) -> list[int]:
    zs = [(n - 1 - s) * zbits for s in range(n)]
    ts = [n * zbits + (r - 1 - i) * tbits for i in range(r)]
    return ts + zs


def _key_dtype(r: int, n: int, tbits: int, zbits: int):
    return np.int64 if r * tbits + n * zbits <= _MAX_KEY_BITS else object


def _encode(exps: np.ndarray, r: int, n: int, tbits: int, zbits: int) -> np.ndarray:
    exps = np.asarray(exps)
    if exps.ndim != 2 or exps.shape[1] != r + n:
        raise InvalidInput(f"exponent rows must have length {r + n}")
    if exps.size and exps.min() < 0:
        raise InvalidInput("exponents must be nonnegative")
    if r + n == 0:
        return np.zeros(exps.shape[0], dtype=np.int64)
    dtype = _key_dtype(r, n, tbits, zbits)
    weights = np.array([1 << s for s in _shifts(r, n, tbits, zbits)], dtype=dtype)
    return exps.astype(dtype) @ weights


def _field(keys: np.ndarray, shift: int, bits: int) -> np.ndarray:
    out = (keys >> shift) & ((1 << bits) - 1)
    return out.astype(np.int64) if out.dtype == object else out


def _decode(keys: np.ndarray, r: int, n: int, tbits: int, zbits: int) -> np.ndarray:
    widths = [tbits] * r + [zbits] * n
    cols = [_field(keys, s, w) for s, w in zip(_shifts(r, n, tbits, zbits), widths)]
    if not cols:
        return np.zeros((len(keys), 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def _widths(r: int, n: int, tbits: int, zbits: int) -> list[int]:
    return [tbits] * r + [zbits] * n


def _repack(keys: np.ndarray, r: int, n: int, old: tuple[int, int], new: tuple[int, int],
            mapping: Sequence[int] | None = None) -> np.ndarray:
    """Move every field to a new layout (and optionally a new variable slot)."""
    old_sh, old_w = _shifts(r, n, *old), _widths(r, n, *old)
    new_sh = _shifts(r, n, *new)
    dtype = _key_dtype(r, n, *new)
    out = np.zeros(keys.size, dtype=dtype)
    for v in range(r + n):
        f = _field(keys, old_sh[v], old_w[v])
        if dtype == object:
            f = f.astype(object)
        out += f << new_sh[v if mapping is None else mapping[v]]
    return out


def _empty(dtype=np.int64) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros(0, dtype=dtype), np.zeros(0, dtype=np.int64)


def _canon(keys: np.ndarray, coefs: np.ndarray, p: int, runs: bool = False):
    """Sort by descending key, add up duplicates, reduce mod p, drop zeros.

    ``runs`` signals input made of a few sorted runs, where a merge sort wins.
    """
    if keys.size == 0:
        return _empty(keys.dtype)
    # duplicates are summed, so stability is irrelevant
    order = np.argsort(-keys, kind="stable" if runs else "quicksort")
    keys = keys[order]
    coefs = coefs[order]
    new = np.empty(keys.size, dtype=bool)
    new[0] = True
    np.not_equal(keys[1:], keys[:-1], out=new[1:])
    if new.all():
        coefs = coefs % p
    else:
        idx = np.flatnonzero(new)
        keys = keys[idx]
        coefs = np.add.reduceat(coefs, idx) % p
    keep = coefs != 0
    if not keep.all():
        keys, coefs = keys[keep], coefs[keep]
    return keys, coefs


def _merge(pieces: list[tuple[np.ndarray, np.ndarray]], p: int):
    pieces = [pc for pc in pieces if pc[0].size]
    if not pieces:
        return _empty()
    if len(pieces) == 1:
        return pieces[0]
    keys = np.concatenate([pc[0] for pc in pieces])
    coefs = np.concatenate([pc[1] for pc in pieces])
    return _canon(keys, coefs, p, runs=True)


class MPoly:
    """Immutable sparse polynomial over F_p in variables (t_1..t_r, z_1..z_n)."""

    __slots__ = ("p", "r", "n", "tbits", "zbits", "keys", "coefs", "_bmax")

    def __init__(self, p, r, n, keys, coefs, tbits=_MIN_BITS, zbits=_MIN_BITS):
        # internal constructor: keys/coefs must already be canonical
        self.p = p
        self.r = r
        self.n = n
        self.tbits = tbits
        self.zbits = zbits
        self.keys = keys
        self.coefs = coefs
        self._bmax = None

    # -- construction -------------------------------------------------

    @staticmethod
    def _check_modulus(p: int) -> None:
        if not 2 <= p < (1 << 31):
            raise InvalidInput(f"modulus {p} outside supported range [2, 2**31)")

    @classmethod
    def zero(cls, p: int, r: int = 0, n: int = 0) -> MPoly:
        cls._check_modulus(p)
        keys, coefs = _empty(_key_dtype(r, n, _MIN_BITS, _MIN_BITS))
        return cls(p, r, n, keys, coefs)

    @classmethod
    def from_arrays(cls, p: int, r: int, n: int, exps, coefs) -> MPoly:
        cls._check_modulus(p)
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, r + n)
        coefs = np.asarray(coefs, dtype=object if exps.shape[0] == 0 else None)
        coefs = np.array([int(c) % p for c in coefs], dtype=np.int64) if coefs.dtype == object \
            else coefs.astype(np.int64) % p
        if exps.shape[0] != coefs.shape[0]:
            raise InvalidInput("exponent and coefficient counts differ")
        tmax = int(exps[:, :r].max()) if r and exps.size else 0
        zmax = int(exps[:, r:].max()) if n and exps.size else 0
        tb, zb = _bits(tmax), _bits(zmax)
        keys = _encode(exps, r, n, tb, zb)
        keys, coefs = _canon(keys, coefs, p)
        return cls(p, r, n, keys, coefs, tb, zb)

    @classmethod
    def from_terms(cls, p: int, r: int, n: int, terms) -> MPoly:
        """Build from a mapping or iterable of ``(exponent tuple, coefficient)``."""
        items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        if not items:
            return cls.zero(p, r, n)
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), r + n)
        coefs = np.array([int(c) % p for _, c in items], dtype=np.int64)
        return cls.from_arrays(p, r, n, exps, coefs)

    @classmethod
    def constant(cls, p: int, value: int, r: int = 0, n: int = 0) -> MPoly:
        return cls.from_terms(p, r, n, {(0,) * (r + n): value})

    @classmethod
    def monomial(cls, p: int, exps: Sequence[int], coef: int = 1, r: int = 0, n: int | None = None) -> MPoly:
        n = len(exps) - r if n is None else n
        return cls.from_terms(p, r, n, {tuple(exps): coef})

    @classmethod
    def variable(cls, p: int, r: int, n: int, v: int) -> MPoly:
        e = [0] * (r + n)
        e[v] = 1
        return cls.monomial(p, e, 1, r, n)

    def _like(self, keys, coefs, tbits=None, zbits=None) -> MPoly:
        return MPoly(self.p, self.r, self.n, keys, coefs,
                     self.tbits if tbits is None else tbits,
                     self.zbits if zbits is None else zbits)

    # -- basic queries --------------------------------------------------

    @property
    def nvars(self) -> int:
        return self.r + self.n

    def __len__(self) -> int:
        return int(self.keys.size)

    @property
    def is_zero(self) -> bool:
        return self.keys.size == 0

    def exponents(self) -> np.ndarray:
        return _decode(self.keys, self.r, self.n, self.tbits, self.zbits)

    def terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in descending lex order."""
        exps = self.exponents()
        return [(tuple(int(x) for x in row), int(c)) for row, c in zip(exps, self.coefs)]

    def to_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms())

    def field(self, v: int) -> np.ndarray:
        """Exponents of variable v (0-based, t-block first) for every term."""
        return _field(self.keys, self._shift(v), self.tbits if v < self.r else self.zbits)

    def _shift(self, v: int) -> int:
        return _shifts(self.r, self.n, self.tbits, self.zbits)[v]

    def degrees(self) -> tuple[int, ...]:
        """Per-variable degrees (0 for the zero polynomial)."""
        if self.is_zero:
            return (0,) * self.nvars
        return tuple(int(self.field(v).max()) for v in range(self.nvars))

    def block_max(self) -> tuple[int, int]:
        """Largest exponent in the t-block and in the z-block."""
        if self._bmax is None:
            d = self.degrees()
            self._bmax = (max(d[: self.r], default=0), max(d[self.r:], default=0))
        return self._bmax

    def total_degrees(self) -> np.ndarray:
        out = np.zeros(len(self), dtype=np.int64)
        for v in range(self.nvars):
            out += self.field(v)
        return out

    def total_degree(self) -> int:
        return -1 if self.is_zero else int(self.total_degrees().max())

    def is_homogeneous(self) -> bool:
        if self.is_zero:
            return True
        d = self.total_degrees()
        return bool((d == d[0]).all())

    def _check(self, other: MPoly) -> None:
        if not isinstance(other, MPoly):
            raise TypeError(f"expected MPoly, got {type(other).__name__}")
        if (self.p, self.r, self.n) != (other.p, other.r, other.n):
            raise InvalidInput(
                f"incompatible polynomials: (p, r, n) = {(self.p, self.r, self.n)} "
                f"vs {(other.p, other.r, other.n)}")

    # -- layout -----------------------------------------------------------

    def relayout(self, tbits: int, zbits: int) -> MPoly:
        """Same polynomial with wider bit fields; order is preserved, no sort."""
        if (tbits, zbits) == (self.tbits, self.zbits):
            return self
        tmax, zmax = self.block_max()
        if tmax >= (1 << tbits) or zmax >= (1 << zbits):
            raise InvalidInput("target layout too narrow")
        keys = _repack(self.keys, self.r, self.n, (self.tbits, self.zbits), (tbits, zbits))
        out = self._like(keys, self.coefs, tbits, zbits)
        out._bmax = self._bmax
        return out

    @staticmethod
    def _common(a: MPoly, b: MPoly, tmax: int = 0, zmax: int = 0):
        tb = max(a.tbits, b.tbits, _bits(tmax))
        zb = max(a.zbits, b.zbits, _bits(zmax))
        return a.relayout(tb, zb), b.relayout(tb, zb)

    # -- ring operations ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, MPoly):
            return NotImplemented
        if (self.p, self.r, self.n) != (other.p, other.r, other.n) or len(self) != len(other):
            return False
        a, b = MPoly._common(self, other)
        return bool(np.array_equal(a.keys, b.keys) and np.array_equal(a.coefs, b.coefs))

    __hash__ = None

    def __neg__(self) -> MPoly:
        return self._like(self.keys, (-self.coefs) % self.p)

    def __add__(self, other: MPoly) -> MPoly:
        self._check(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        a, b = MPoly._common(self, other)
        keys, coefs = _merge([(a.keys, a.coefs), (b.keys, b.coefs)], self.p)
        return a._like(keys, coefs)

    def __sub__(self, other: MPoly) -> MPoly:
        self._check(other)
        return self + (-other)

    def scale(self, c: int) -> MPoly:
        c %= self.p
        if c == 0:
            return MPoly.zero(self.p, self.r, self.n)
        return self._like(self.keys, self.coefs * c % self.p)

    def __mul__(self, other) -> MPoly:
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        return self.mul(other)

    def __rmul__(self, other) -> MPoly:
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        return NotImplemented

    def _cap_mask(self, keys: np.ndarray, caps) -> np.ndarray | None:
        if caps is None:
            return None
        caps = list(caps)
        if len(caps) != self.nvars:
            raise InvalidInput(f"caps must have length {self.nvars}")
        shifts = _shifts(self.r, self.n, self.tbits, self.zbits)
        widths = [self.tbits] * self.r + [self.zbits] * self.n
        mask = np.ones(keys.size, dtype=bool)
        for v, cap in enumerate(caps):
            if cap is not None:
                mask &= _field(keys, shifts[v], widths[v]) <= cap
        return mask

    def mul(self, other: MPoly, caps: Sequence[int | None] | None = None,
            max_terms: int | None = None) -> MPoly:
        """Product over F_p; terms exceeding ``caps[v]`` in variable v are dropped."""
        self._check(other)
        if self.is_zero or other.is_zero:
            return MPoly.zero(self.p, self.r, self.n)
        (ta, za), (tb, zb) = self.block_max(), other.block_max()
        a, b = MPoly._common(self, other, ta + tb, za + zb)
        if len(a) < len(b):
            a, b = b, a
        rows = max(1, _BLOCK // len(b))
        p = self.p
        pieces: list = []
        pending = 0
        for start in range(0, len(a), rows):
            ka = a.keys[start:start + rows]
            ca = a.coefs[start:start + rows]
            keys = (ka[:, None] + b.keys[None, :]).ravel()
            coefs = (ca[:, None] * b.coefs[None, :]).ravel() % p
            mask = a._cap_mask(keys, caps)
            if mask is not None:
                keys, coefs = keys[mask], coefs[mask]
            pieces.append(_canon(keys, coefs, p))
            pending += pieces[-1][0].size
            if pending > 4 * _BLOCK and len(pieces) > 1:
                pieces = [_merge(pieces, p)]
                pending = pieces[0][0].size
                if max_terms is not None and pending > max_terms:
                    raise SizeGuardError("product", pending, max_terms)
        keys, coefs = _merge(pieces, p)
        if max_terms is not None and keys.size > max_terms:
            raise SizeGuardError("product", int(keys.size), max_terms)
        return a._like(keys, coefs)

    def pow(self, e: int, caps: Sequence[int | None] | None = None,
            max_terms: int | None = None) -> MPoly:
        """``self**e`` by repeated squaring; caps are applied at every step."""
        if e < 0:
            raise InvalidInput("negative exponent")
        result = MPoly.constant(self.p, 1, self.r, self.n)
        base = self
        while e:
            if e & 1:
                result = result.mul(base, caps, max_terms)
            e >>= 1
            if e:
                base = base.mul(base, caps, max_terms)
        return result

    def __pow__(self, e: int) -> MPoly:
        return self.pow(e)

    def mul_monomial(self, exps: Sequence[int], coef: int = 1) -> MPoly:
        if self.is_zero or coef % self.p == 0:
            return MPoly.zero(self.p, self.r, self.n)
        exps = list(exps)
        tmax, zmax = self.block_max()
        et = max(exps[: self.r], default=0)
        ez = max(exps[self.r:], default=0)
        a = self.relayout(max(self.tbits, _bits(tmax + et)), max(self.zbits, _bits(zmax + ez)))
        shift = int(_encode(np.array([exps]), self.r, self.n, a.tbits, a.zbits)[0])
        return a._like(a.keys + shift, a.coefs * coef % self.p)

    @classmethod
    def join(cls, tpart: MPoly, zpart: MPoly) -> MPoly:
        """The product f(t) g(z) of a t-only and a z-only polynomial."""
        if tpart.n or zpart.r or tpart.p != zpart.p:
            raise InvalidInput("join needs a t-only and a z-only polynomial over one field")
        p, r, n = tpart.p, tpart.r, zpart.n
        if tpart.is_zero or zpart.is_zero:
            return cls.zero(p, r, n)
        tb, zb = tpart.tbits, zpart.zbits
        if _key_dtype(r, n, tb, zb) is object:
            return cls.from_terms(p, r, n, {
                et + ez: ct * cz for et, ct in tpart.terms() for ez, cz in zpart.terms()})
        # t-fields sit above every z-field, so the outer sum stays sorted
        keys = ((tpart.keys << (n * zb))[:, None] + zpart.keys[None, :]).ravel()
        coefs = (tpart.coefs[:, None] * zpart.coefs[None, :]).ravel() % p
        return cls(p, r, n, keys, coefs, tb, zb)

    # -- coefficient extraction and leading terms --------------------------

    def coeff_extract(self, target: Sequence[int]) -> MPoly:
        """The z-polynomial coefficient of t_1^{e_1} ... t_r^{e_r}."""
        target = list(target)
        if len(target) != self.r:
            raise InvalidInput(f"target must assign {self.r} t-exponents")
        if min(target, default=0) < 0:
            raise InvalidInput("target exponents must be nonnegative")
        zshift = self.n * self.zbits
        if any(x >= (1 << self.tbits) for x in target):
            return MPoly.zero(self.p, 0, self.n)
        tkey = 0
        for x in target:
            tkey = (tkey << self.tbits) | x
        sel = (self.keys >> zshift) == tkey
        keys = self.keys[sel] & ((1 << zshift) - 1)
        if keys.dtype == object and zshift <= _MAX_KEY_BITS:
            keys = keys.astype(np.int64)
        return MPoly(self.p, 0, self.n, keys, self.coefs[sel], _MIN_BITS, self.zbits)

    def coefficient(self, exps: Sequence[int]) -> int:
        """Coefficient of one monomial (binary search on the sorted keys)."""
        exps = [int(x) for x in exps]
        if len(exps) != self.nvars or min(exps, default=0) < 0:
            raise InvalidInput(f"need {self.nvars} nonnegative exponents")
        limits = _widths(self.r, self.n, self.tbits, self.zbits)
        if self.is_zero or any(x >= (1 << w) for x, w in zip(exps, limits)):
            return 0
        key = _encode(np.array([exps], dtype=np.int64), self.r, self.n, self.tbits, self.zbits)[0]
        if self.keys.dtype == object:
            hits = np.flatnonzero(self.keys == key)
            return int(self.coefs[hits[0]]) if hits.size else 0
        pos = int(np.searchsorted(-self.keys, -key))
        if pos < len(self) and self.keys[pos] == key:
            return int(self.coefs[pos])
        return 0

    def lex_leading(self) -> tuple[tuple[int, ...], int]:
        if self.is_zero:
            raise InvalidInput("the zero polynomial has no leading term")
        e = _decode(self.keys[:1], self.r, self.n, self.tbits, self.zbits)[0]
        return tuple(int(x) for x in e), int(self.coefs[0])

    # -- variable manipulation ----------------------------------------------

    def partial_derivative(self, v: int) -> MPoly:
        """Formal derivative with respect to variable index v (0-based, t-block first)."""
        if not 0 <= v < self.nvars:
            raise InvalidInput(f"variable index {v} out of range")
        shift = _shifts(self.r, self.n, self.tbits, self.zbits)[v]
        width = self.tbits if v < self.r else self.zbits
        e = _field(self.keys, shift, width)
        coefs = self.coefs * (e % self.p) % self.p
        keep = coefs != 0
        # subtracting a fixed field unit keeps the surviving keys sorted
        return self._like(self.keys[keep] - (1 << shift), coefs[keep])

    def permuted_keys(self, mapping: Sequence[int]) -> np.ndarray:
        """Keys (unsorted) after renaming variable i to variable mapping[i]."""
        mapping = list(mapping)
        if sorted(mapping) != list(range(self.nvars)):
            raise InvalidInput("mapping must be a permutation of the variables")
        if any((i < self.r) != (mapping[i] < self.r) for i in range(self.nvars)):
            raise InvalidInput("permutations may not mix the t- and z-blocks")
        layout = (self.tbits, self.zbits)
        return _repack(self.keys, self.r, self.n, layout, layout, mapping)

    def rename(self, mapping: Sequence[int]) -> MPoly:
        """Rename variable i to variable mapping[i] (a block-preserving permutation)."""
        keys = self.permuted_keys(mapping)
        order = np.argsort(-keys, kind="stable")
        out = self._like(keys[order], self.coefs[order])
        out._bmax = self._bmax
        return out

    def inflate(self, k: int) -> MPoly:
        """Multiply every exponent by k (so f(x) becomes f(x^k))."""
        if k < 1:
            raise InvalidInput("inflation factor must be positive")
        tmax, zmax = self.block_max()
        e = self.exponents() * k
        tb, zb = _bits(tmax * k), _bits(zmax * k)
        return self._like(_encode(e, self.r, self.n, tb, zb), self.coefs, tb, zb)

    def divide_by_difference(self, va: int, vb: int) -> tuple[MPoly, MPoly]:
        """Return (Q, R) with self = (x_va - x_vb) * Q + R and R free of x_va.

        R is self with x_va replaced by x_vb, so the division is exact iff R == 0.
        """
        if va == vb or not (0 <= va < self.nvars and 0 <= vb < self.nvars):
            raise InvalidInput("need two distinct variable indices")
        zero = MPoly.zero(self.p, self.r, self.n)
        if self.is_zero:
            return zero, zero
        p = self.p
        tmax, zmax = self.block_max()
        tb = _bits(2 * tmax) if va < self.r or vb < self.r else self.tbits
        zb = _bits(2 * zmax) if va >= self.r or vb >= self.r else self.zbits
        if _key_dtype(self.r, self.n, tb, zb) is object:
            return self._divide_slow(va, vb)
        wide = self.relayout(max(tb, self.tbits), max(zb, self.zbits))
        tb, zb = wide.tbits, wide.zbits
        shifts = _shifts(self.r, self.n, tb, zb)
        alpha = wide.field(va)
        s = alpha + wide.field(vb)
        # group terms by (rest of the monomial, alpha + beta): move alpha into the vb field
        gkey = wide.keys - (alpha << shifts[va]) + (alpha << shifts[vb])
        order = np.lexsort((-alpha, gkey))
        gkey = gkey[order]
        alpha = alpha[order]
        c = wide.coefs[order]
        first = np.empty(gkey.size, dtype=bool)
        first[0] = True
        np.not_equal(gkey[1:], gkey[:-1], out=first[1:])
        last = np.empty_like(first)
        last[:-1] = first[1:]
        last[-1] = True
        csum = np.cumsum(c)
        gid = np.cumsum(first) - 1
        starts = np.flatnonzero(first)
        before = (csum[starts] - c[starts])[gid]
        running = (csum - before) % p  # sum over terms with alpha >= current, same group
        rem_keys, rem_coefs = _canon(gkey[last], running[last], p)
        remainder = self._like(rem_keys, rem_coefs, tb, zb)
        nxt = np.zeros_like(alpha)
        nxt[:-1] = alpha[1:]
        nxt[last] = 0
        runlen = alpha - nxt
        total = int(runlen.sum())
        if total == 0:
            return zero, remainder
        src = np.repeat(np.arange(alpha.size), runlen)
        run_start = np.cumsum(runlen) - runlen
        i = alpha[src] - 1 - (np.arange(total) - run_start[src])
        # gkey holds s in the vb field; move (s - 1 - i) there and i into va
        qkeys = gkey[src] - ((1 + i) << shifts[vb]) + (i << shifts[va])
        qkeys, qcoefs = _canon(qkeys, running[src], p)
        return self._like(qkeys, qcoefs, tb, zb), remainder

    def _divide_slow(self, va: int, vb: int) -> tuple[MPoly, MPoly]:
        quot: dict = {}
        rem: dict = {}
        for exps, c in self.terms():
            a, b = exps[va], exps[vb]
            rest = list(exps)
            for i in range(a):
                rest[va], rest[vb] = i, a + b - 1 - i
                key = tuple(rest)
                quot[key] = quot.get(key, 0) + c
            rest[va], rest[vb] = 0, a + b
            key = tuple(rest)
            rem[key] = rem.get(key, 0) + c
        return (MPoly.from_terms(self.p, self.r, self.n, quot),
                MPoly.from_terms(self.p, self.r, self.n, rem))

    def is_symmetric_in_t(self, sign: int = 1) -> bool:
        """True iff every transposition of t-variables multiplies self by ``sign``."""
        if sign not in (1, -1):
            raise InvalidInput("sign must be +1 or -1")
        target = self if sign == 1 else -self
        for i, j in itertools.combinations(range(self.r), 2):
            mapping = list(range(self.nvars))
            mapping[i], mapping[j] = j, i
            if self.rename(mapping) != target:
                return False
        return True

    # -- text ------------------------------------------------------------

    def variable_names(self) -> list[str]:
        return [f"t{i + 1}" for i in range(self.r)] + [f"z{s + 1}" for s in range(self.n)]

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        names = self.variable_names()
        out = []
        for exps, c in self.terms():
            factors = [n if x == 1 else f"{n}^{x}" for n, x in zip(names, exps) if x]
            if not factors:
                out.append(str(c))
            elif c == 1:
                out.append("*".join(factors))
            else:
                out.append("*".join([str(c)] + factors))
        return " + ".join(out)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"MPoly(p={self.p}, r={self.r}, n={self.n}, terms={len(self)})"


#: A z-only polynomial is an MPoly with an empty t-block.
ZPoly = MPoly


def mul(a: MPoly, b: MPoly, caps=None, max_terms: int | None = None) -> MPoly:
    return a.mul(b, caps, max_terms)


def power(a: MPoly, e: int, caps=None, max_terms: int | None = None) -> MPoly:
    return a.pow(e, caps, max_terms)


def coeff_extract(a: MPoly, target: Sequence[int]) -> MPoly:
    return a.coeff_extract(target)


def lex_leading(a: MPoly) -> tuple[tuple[int, ...], int]:
    return a.lex_leading()


def symmetrize_check(a: MPoly, sign: int) -> bool:
    return a.is_symmetric_in_t(sign)


def partial_derivative(a: MPoly, v: int) -> MPoly:
    return a.partial_derivative(v)


def _zsupport(a: MPoly) -> set[int]:
    if a.is_zero:
        return set()
    return {s for s, d in enumerate(a.degrees()[a.r:]) if d}


def extract_product(a: MPoly, b: MPoly, target: Sequence[int],
                    max_terms: int | None = None) -> MPoly:
    """``coeff_extract(a * b, target)`` without forming the product.

    The coefficient is the convolution sum over y of [t^y]a * [t^(target-y)]b.
    When a and b involve disjoint z-variables every pair of z-monomials gives a
    distinct product monomial, so each block of the sum is a dense matrix
    product over the t-window.
    """
    a._check(b)
    target = np.asarray(list(target), dtype=np.int64)
    if target.size != a.r:
        raise InvalidInput(f"target must assign {a.r} t-exponents")
    p, r, n = a.p, a.r, a.n
    out_zero = MPoly.zero(p, 0, n)
    if a.is_zero or b.is_zero:
        return out_zero
    a, b = MPoly._common(a, b)
    ta = a.exponents()[:, :r]
    tb = b.exponents()[:, :r]
    ka = (ta <= target).all(axis=1)
    kb = (tb <= target).all(axis=1)
    zmask = (1 << (n * a.zbits)) - 1
    za, ca, ta = a.keys[ka] & zmask, a.coefs[ka], ta[ka]
    zb, cb, tb = b.keys[kb] & zmask, b.coefs[kb], tb[kb]
    if za.dtype == object and n * a.zbits <= _MAX_KEY_BITS:
        za, zb = za.astype(np.int64), zb.astype(np.int64)
    if za.size == 0 or zb.size == 0:
        return out_zero
    if _zsupport(a) & _zsupport(b) or za.dtype == object:
        return _extract_overlapping(a, b, target, max_terms)

    radix = target + 1
    weights = np.ones(r, dtype=np.int64)
    for i in range(r - 2, -1, -1):
        weights[i] = weights[i + 1] * radix[i + 1]
    code_a = ta @ weights
    code_b = (target - tb) @ weights
    sum_a = ta.sum(axis=1)
    sum_b = tb.sum(axis=1)
    total = int(target.sum())

    estimate = 0
    blocks = []
    for T in np.unique(sum_a):
        ia = np.flatnonzero(sum_a == T)
        ib = np.flatnonzero(sum_b == total - T)
        if ib.size == 0:
            continue
        cols = np.intersect1d(code_a[ia], code_b[ib])
        if cols.size == 0:
            continue
        ia = ia[np.isin(code_a[ia], cols)]
        ib = ib[np.isin(code_b[ib], cols)]
        rows_a, inv_a = np.unique(za[ia], return_inverse=True)
        rows_b, inv_b = np.unique(zb[ib], return_inverse=True)
        estimate += rows_a.size * rows_b.size
        blocks.append((ia, ib, cols, rows_a, inv_a, rows_b, inv_b))
    if max_terms is not None and estimate > max_terms:
        raise SizeGuardError("coefficient extraction", estimate, max_terms)

    pieces = []
    for ia, ib, cols, rows_a, inv_a, rows_b, inv_b in blocks:
        width = cols.size
        exact_float = width * (p - 1) ** 2 < _FLOAT_EXACT
        dtype = np.float64 if exact_float else np.int64
        A = np.zeros((rows_a.size, width), dtype=dtype)
        A[inv_a.ravel(), np.searchsorted(cols, code_a[ia])] = ca[ia]
        B = np.zeros((rows_b.size, width), dtype=dtype)
        B[inv_b.ravel(), np.searchsorted(cols, code_b[ib])] = cb[ib]
        step = max(1, _BLOCK // max(1, rows_b.size))
        for start in range(0, rows_a.size, step):
            block = _exact_matmul(A[start:start + step], B.T, p, exact_float)
            ii, jj = np.nonzero(block)
            if ii.size:
                pieces.append((rows_a[start + ii] + rows_b[jj], block[ii, jj]))
    if not pieces:
        return out_zero
    keys = np.concatenate([pc[0] for pc in pieces])
    coefs = np.concatenate([pc[1] for pc in pieces])
    keys, coefs = _canon(keys, coefs, p)
    return MPoly(p, 0, n, keys, coefs, _MIN_BITS, a.zbits)


def _exact_matmul(A: np.ndarray, Bt: np.ndarray, p: int, exact_float: bool) -> np.ndarray:
    if exact_float:
        return np.rint(A @ Bt).astype(np.int64) % p
    # keep every partial sum of products below 2**63
    width = A.shape[1]
    step = max(1, ((1 << 63) - 1) // ((p - 1) ** 2) - 1)
    out = np.zeros((A.shape[0], Bt.shape[1]), dtype=np.int64)
    for s in range(0, width, step):
        out = (out + A[:, s:s + step] @ Bt[s:s + step]) % p
    return out


def _extract_overlapping(a: MPoly, b: MPoly, target: np.ndarray,
                         max_terms: int | None) -> MPoly:
    r = a.r
    zshift = a.n * a.zbits
    result = MPoly.zero(a.p, 0, a.n)
    for tkey in np.unique(a.keys >> zshift):
        y = [int(x) for x in _decode(np.array([tkey << zshift], dtype=a.keys.dtype),
                                     r, a.n, a.tbits, a.zbits)[0, :r]]
        rest = [int(x) - yi for x, yi in zip(target, y)]
        if min(rest, default=0) < 0:
            continue
        fa = a.coeff_extract(y)
        fb = b.coeff_extract(rest)
        if not fb.is_zero:
            result = result + fa.mul(fb, max_terms=max_terms)
    return result
