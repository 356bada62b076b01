"""Slow reference implementations, written without any of the package's tricks.

Polynomials are plain ``{exponent tuple: coefficient}`` dicts.  Nothing here
prunes by caps, splits variables, or uses symmetry.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from math import comb

import numpy as np


def poly_add(f: dict, g: dict, p: int) -> dict:
    out = dict(f)
    for e, c in g.items():
        out[e] = (out.get(e, 0) + c) % p
    return {e: c for e, c in out.items() if c}


def poly_mul(f: dict, g: dict, p: int) -> dict:
    out: dict = {}
    for (e1, c1), (e2, c2) in itertools.product(f.items(), g.items()):
        e = tuple(a + b for a, b in zip(e1, e2))
        out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


def poly_pow(f: dict, k: int, nvars: int, p: int) -> dict:
    out = {(0,) * nvars: 1 % p}
    for _ in range(k):
        out = poly_mul(out, f, p)
    return out


def linear(i: int, j: int, nvars: int, p: int) -> dict:
    """x_i - x_j as a dict."""
    ei = tuple(int(v == i) for v in range(nvars))
    ej = tuple(int(v == j) for v in range(nvars))
    return {ei: 1, ej: p - 1}


def naive_binom(a: int, b: int, p: int) -> int:
    return comb(a, b) % p if 0 <= b <= a else 0


def naive_integrand(p: int, M: int, c: int, n: int, r: int, J, sigma) -> dict:
    """Phi_p / prod_i (t_i - z_{J[sigma(i)]}), by repeated multiplication of linear forms."""
    nv = r + n
    out = {(0,) * nv: 1}
    for i, j in itertools.combinations(range(r), 2):
        out = poly_mul(out, poly_pow(linear(i, j, nv, p), c, nv, p), p)
    for i in range(r):
        for s in range(n):
            e = M - (1 if J[sigma[i]] - 1 == s else 0)
            out = poly_mul(out, poly_pow(linear(i, r + s, nv, p), e, nv, p), p)
    return out


def naive_solution(p: int, q: int, n: int, r: int, L) -> dict:
    """{J: {z-exponents: coef}} for the p-integral of Phi_p W_J, zero components dropped."""
    k = next(k for k in range(1, q + 1) if (k * p - 1) % q == 0)
    M = (k * p - 1) // q
    c = ((q - 2 * k) * p + 2) // q
    target = tuple(l * p - 1 for l in L)
    out = {}
    for J in itertools.combinations(range(1, n + 1), r):
        comp: dict = {}
        for sigma in itertools.permutations(range(r)):
            for e, coef in naive_integrand(p, M, c, n, r, J, sigma).items():
                if e[:r] == target:
                    comp[e[r:]] = (comp.get(e[r:], 0) + coef) % p
        comp = {e: x for e, x in comp.items() if x}
        if comp:
            out[J] = comp
    return out, k, M, c


def naive_solution_json(p: int, q: int, n: int, r: int, L) -> str:
    """Canonical JSON built straight from the naive expansion."""
    sol, k, M, c = naive_solution(p, q, n, r, L)
    comps = [{"J": list(J), "terms": [{"exp": list(e), "coef": x}
                                      for e, x in sorted(sol[J].items(), reverse=True)]}
             for J in sorted(sol)]
    doc = {"p": p, "q": q, "k": k, "M": M, "c": c, "n": n, "r": r, "L": list(L),
           "zero": not sol, "components": comps}
    return json.dumps(doc, separators=(",", ":"))


def naive_casimir_minus_half() -> np.ndarray:
    """(Omega - 1/2) on C^2 (x) C^2 from the defining matrices, with exact fractions."""
    e = np.array([[0, 1], [0, 0]], dtype=object)
    f = np.array([[0, 0], [1, 0]], dtype=object)
    h = np.array([[1, 0], [0, -1]], dtype=object)
    omega = Fraction(1, 2) * np.kron(h, h) + np.kron(e, f) + np.kron(f, e)
    return omega - Fraction(1, 2) * np.eye(4, dtype=object)


def naive_singular_rank(n: int, r: int, p: int) -> int:
    """Rank over F_p of the singular-vector system by fraction-free elimination on lists."""
    Js = list(itertools.combinations(range(1, n + 1), r))
    Ks = list(itertools.combinations(range(1, n + 1), r - 1))
    rows = [[1 if set(K) <= set(J) else 0 for J in Js] for K in Ks]
    rank, col = 0, 0
    while rank < len(rows) and col < len(Js):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank
