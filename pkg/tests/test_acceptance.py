"""Acceptance criteria 1-10, each run at its stated (exact) tolerance.

Every criterion prints one ``PASS``/``FAIL`` line; the lines are repeated in
the pytest terminal summary.  Run this file directly for the lines alone:

    python tests/test_acceptance.py
"""

from __future__ import annotations

import gc
import itertools
import sys
import time
from functools import lru_cache
from math import comb
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from kzmodp.arith import classify_pair  # noqa: E402
from kzmodp.cartier import enumerate_partitions  # noqa: E402
from kzmodp.cli import certify_case, solution_json  # noqa: E402
from kzmodp.errors import InvalidInput  # noqa: E402
from kzmodp.kzcore import (  # noqa: E402
    ModelParams,
    construct_solution,
    shifted_master_congruence,
    singular_space_dimension,
    solution_degree,
)
from kzmodp.leading import leading_term  # noqa: E402
from oracles import naive_solution_json  # noqa: E402

# the n = 9 cases need about 1.4e7 terms per component
MAX_TERMS = 10**8

PAIRS = [(3, 2), (5, 2), (7, 2), (11, 2), (7, 3), (13, 3)]

REPORT: list[str] = []


def report(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT.append(line)
    print(line, flush=True)
    return ok


def desk_cases() -> list[tuple[int, int, int, int]]:
    """(p, q, r, g) with r, g in {1, 2}, n = qg + 2r - 1 <= 9 and M - g >= 0."""
    out = []
    for p, q in PAIRS:
        pair = classify_pair(p, q)
        for r, g in itertools.product((1, 2), (1, 2)):
            if q * g + 2 * r - 1 > 9:
                continue
            try:
                ModelParams.for_pair(pair, r=r, g=g)
            except InvalidInput:
                continue
            out.append((p, q, r, g))
    return out


@lru_cache(maxsize=None)
def certificate(p: int, q: int, r: int, g: int) -> dict:
    """Every per-tuple check for one case; solutions are dropped once checked."""
    pair = classify_pair(p, q)
    params = ModelParams.for_pair(pair, r=r, g=g)
    start = time.perf_counter()
    cert = certify_case(pair, params, max_terms=MAX_TERMS)
    cert["seconds"] = time.perf_counter() - start
    gc.collect()
    return cert


def all_certificates() -> dict:
    return {case: certificate(*case) for case in desk_cases()}


def _failing(pred) -> list:
    bad = []
    for case, cert in all_certificates().items():
        for rec in cert["tuples"]:
            if not pred(rec):
                bad.append((case, tuple(rec["L"]), rec.get("error")))
    return bad


# -- the criteria ---------------------------------------------------------------


def test_criterion_01_solution_property():
    certs = all_certificates()
    bad = _failing(lambda rec: rec.get("singular") and rec.get("kz"))
    total = sum(c["seconds"] for c in certs.values())
    tuples = sum(len(c["tuples"]) for c in certs.values())
    assert report(1, not bad, f"{len(certs)} cases, {tuples} solutions, singular + KZ exact "
                              f"({total:.0f}s for all checks){'; failing ' + str(bad) if bad else ''}")


def test_criterion_02_two_point_example():
    problems = []
    for p in (5, 7, 11, 13):
        pair = classify_pair(p, 2)
        params = ModelParams.for_pair(pair, r=2, n=5)
        tuples = params.admissible_tuples(pair)
        if tuples != [(2, 1)]:
            problems.append((p, "tuples", tuples))
            continue
        v = construct_solution(pair, params, (2, 1))
        comps = [f for _, f in v.items()]
        degs = {f.total_degree() for f in comps}
        if not comps or not all(f.is_homogeneous() for f in comps) or degs != {2 * p - 4}:
            problems.append((p, "degree", degs))
        if solution_degree(pair, params, (2, 1)) != 2 * p - 4:
            problems.append((p, "degree formula"))
        ld = leading_term(v)
        if ld.exponents != (p - 2, (p - 1) // 2, (p - 3) // 2, 0, 0):
            problems.append((p, "exponents", ld.exponents))
        if ld.leading_index != (1, 3):
            problems.append((p, "index", ld.leading_index))
    assert report(2, not problems, "p in {5,7,11,13}: single tuple (2,1), degree 2p-4, "
                                   "exponents (p-2,(p-1)/2,(p-3)/2,0,0), index {1,3}"
                  + (f"; {problems}" if problems else ""))


def _vanishing_tuples(pair, params) -> list[tuple[int, ...]]:
    r, top = params.r, params.max_index(pair)
    tail = tuple(range(r - 1, 0, -1))
    out = [(top + 1,) + tail]
    if r >= 2:
        out += [(1,) * r, (top,) * r, (top, top) + tuple(range(r - 2, 0, -1))]
    return sorted(set(out))


def test_criterion_03_rank():
    problems = []
    for case, cert in all_certificates().items():
        p, q, r, g = case
        pair = classify_pair(p, q)
        params = ModelParams.for_pair(pair, r=r, g=g)
        want = comb(pair.k * g + r - 1, r)
        if not cert["passed"] or cert["rank"] != want:
            problems.append((case, "rank", cert["rank"], want))
        for L in _vanishing_tuples(pair, params):
            if not construct_solution(pair, params, L, max_terms=MAX_TERMS).is_zero:
                problems.append((case, "nonzero", L))
            gc.collect()
    assert report(3, not problems, "certified rank = C(kg+r-1, r) in every case; "
                                   "repeated entries and l_1 = kg+r give zero"
                  + (f"; {problems}" if problems else ""))


def test_criterion_04_leading_terms():
    # certify_tuple raises (recorded as "error") on any exponent, index or entry mismatch
    bad = _failing(lambda rec: rec["error"] is None and "leading" in rec)
    n = sum(len(c["tuples"]) for c in all_certificates().values())
    assert report(4, not bad, f"{n} solutions: computed exponents, index and entry equal the prediction"
                  + (f"; failing {bad}" if bad else ""))


def test_criterion_05_cartier():
    bad = _failing(lambda rec: rec.get("cartier"))
    certs = all_certificates()
    rows = sum(c["counts"]["partitions"] for c in certs.values())
    assert report(5, not bad, f"{rows} partitions a in A(kg-1): alternant coefficients equal "
                              f"the solution components" + (f"; failing {bad}" if bad else ""))


def test_criterion_06_eigenvectors():
    bad = _failing(lambda rec: rec.get("eigen"))
    assert report(6, not bad, "every certified leading coefficient satisfies the n-1 eigen-equations "
                              "and d_n = 0 mod p" + (f"; failing {bad}" if bad else ""))


def test_criterion_07_shifted_congruence():
    bad = []
    count = 0
    for p in (3, 5):
        pair = classify_pair(p, 2)
        params = ModelParams.for_pair(pair, r=1, n=3)
        for d0 in (0, 1):
            for dv in itertools.product((0, 1), repeat=3):
                count += 1
                if not shifted_master_congruence(pair, params, d0, dv):
                    bad.append((p, d0, dv))
    assert report(7, not bad, f"{count} shift vectors at (3,2) and (5,2), n=3, r=1"
                  + (f"; failing {bad}" if bad else ""))


def test_criterion_08_singular_dimension():
    # the count is a characteristic-zero statement; when r >= p the rank can drop
    # (n=6, r=3, p=3 is the first instance), so those points are listed, not checked
    bad, skipped = [], []
    for p in (3, 5, 7, 11, 13):
        for n in range(2, 10):
            for r in range(1, n // 2 + 1):
                if r >= p:
                    skipped.append((p, n, r))
                elif singular_space_dimension(n, r, p) != comb(n, r) - comb(n, r - 1):
                    bad.append((p, n, r))
    five = singular_space_dimension(5, 2, 5)
    ok = not bad and five == 5
    assert report(8, ok, f"dimension C(n,r)-C(n,r-1) for n <= 9, r < p <= 13; n=5, r=2 gives {five}; "
                         f"not asserted for r >= p: {skipped}" + (f"; failing {bad}" if bad else ""))


def test_criterion_09_counting_identity():
    bad = []
    for case, cert in all_certificates().items():
        p, q, r, g = case
        k = classify_pair(p, q).k
        partitions = len(enumerate_partitions(k * g - 1, r))
        binomial = comb(k * g + r - 1, r)
        rank = cert["rank"] if cert["passed"] else None
        if not partitions == binomial == rank:
            bad.append((case, partitions, binomial, rank))
    assert report(9, not bad, "|A(kg-1)| = C(kg+r-1, r) = certified rank in every case"
                  + (f"; failing {bad}" if bad else ""))


def test_criterion_10_oracle_equivalence():
    bad = []
    for p in (3, 5):
        pair = classify_pair(p, 2)
        params = ModelParams.for_pair(pair, r=1, n=3)
        for L in [(1,), (2,)]:
            mine = solution_json(pair, params, L, construct_solution(pair, params, L))
            if mine != naive_solution_json(p, 2, 3, 1, L):
                bad.append((p, L))
    assert report(10, not bad, "naive full expansion reproduces the canonical JSON byte-for-byte"
                  + (f"; failing {bad}" if bad else ""))


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
