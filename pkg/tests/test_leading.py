from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kzmodp.arith import classify_pair
from kzmodp.errors import CertificationError, InvalidInput
from kzmodp.kzcore import ModelParams, VectorPoly, construct_solution
from kzmodp.leading import (
    LeadingData,
    certify_rank,
    certify_tuple,
    check_eigen,
    leading_term,
    predict_index,
    predict_leading,
)
from kzmodp.mpoly import MPoly


def model(p, q, r, g=None, n=None):
    pair = classify_pair(p, q)
    return pair, ModelParams.for_pair(pair, r=r, g=g, n=n)


def test_leading_of_single_component():
    z1 = MPoly.from_terms(5, 0, 4, {(1, 0, 0, 0): 1})
    ld = leading_term(VectorPoly(5, 4, 2, {(1, 3): z1}))
    assert ld.exponents == (1, 0, 0, 0) and ld.leading_index == (1, 3)


def test_zero_vector_has_no_leading_term():
    with pytest.raises(InvalidInput):
        leading_term(VectorPoly(5, 3, 1))


def test_small_example_leading_data():
    pair, params = model(5, 2, r=1, g=1)
    ld = leading_term(construct_solution(pair, params, (1,)))
    assert ld.exponents == (1, 0, 0)
    assert ld.leading_index == (1,)
    assert ld.coefficient[(1,)] == 4
    assert predict_index(pair, params, (1,)) == (1,)
    pred = predict_leading(pair, params, (1,))
    assert pred.exponents == (1, 0, 0) and pred.coefficient == {(1,): 4}


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_two_point_example(p):
    pair, params = model(p, 2, r=2, g=1)
    v = construct_solution(pair, params, (2, 1))
    ld = leading_term(v)
    want = (p - 2, (p - 1) // 2, (p - 3) // 2, 0, 0)
    assert ld.exponents == want
    assert ld.leading_index == (1, 3) == predict_index(pair, params, (2, 1))
    pred = predict_leading(pair, params, (2, 1))
    assert pred.exponents == want and pred.coefficient[(1, 3)] == ld.coefficient[(1, 3)]
    assert check_eigen(ld, pair, params)


def test_orbit_and_direct_leading_agree():
    pair, params = model(7, 3, r=2, g=1)
    a = leading_term(construct_solution(pair, params, (2, 1), mode="orbit"))
    b = leading_term(construct_solution(pair, params, (2, 1), mode="direct"))
    assert a == b


@pytest.mark.parametrize("p,q,r,g", [(5, 2, 1, 2), (7, 2, 2, 2), (7, 3, 1, 2), (13, 3, 1, 2), (11, 2, 2, 1)])
def test_predictions_on_every_tuple(p, q, r, g):
    pair, params = model(p, q, r=r, g=g)
    seen = set()
    for L in params.admissible_tuples(pair):
        pred = predict_leading(pair, params, L)
        idx = pred.leading_index
        assert pred.coefficient[idx] % p != 0
        assert all(idx[i] + 2 <= idx[i + 1] for i in range(r - 1))
        assert 1 <= idx[0] and idx[-1] < params.n
        assert idx not in seen
        seen.add(idx)
        tc = certify_tuple(pair, params, L, construct_solution(pair, params, L))
        assert tc.eigen


def test_predict_rejects_inadmissible():
    pair, params = model(5, 2, r=2, g=1)
    with pytest.raises(InvalidInput):
        predict_index(pair, params, (1, 1))


@pytest.mark.parametrize("p,q,r,g,basis", [
    (5, 2, 2, 1, [(2, 1)]),
    (5, 2, 1, 1, [(1,)]),
    (7, 2, 1, 3, [(3,), (2,), (1,)]),
])
def test_certify_rank(p, q, r, g, basis):
    pair, params = model(p, q, r=r, g=g)
    cert = certify_rank(pair, params)
    assert cert.rank == len(basis) and cert.basis == basis


def test_certify_rank_rejects_type2():
    pair = classify_pair(5, 3)
    with pytest.raises(InvalidInput):
        certify_rank(pair, ModelParams(5, 1, 1))


def test_certify_detects_wrong_solution():
    pair, params = model(5, 2, r=1, g=2)
    wrong = construct_solution(pair, params, (1,))
    with pytest.raises(CertificationError) as info:
        certify_rank(pair, params, solve=lambda L: wrong)
    assert info.value.item == (2,)


def test_eigen_small_example():
    pair, params = model(5, 2, r=1, g=1)
    ld = leading_term(construct_solution(pair, params, (1,)))
    assert check_eigen(ld, pair, params)
    shifted = LeadingData((1, 0, 1), ld.coefficient, ld.leading_index)
    assert not check_eigen(shifted, pair, params)
    tampered = LeadingData(ld.exponents, {**ld.coefficient, (1,): 1}, ld.leading_index)
    assert not check_eigen(tampered, pair, params)


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
                       st.integers(1, 6), min_size=1, max_size=4))
def test_leading_term_is_multiplicative(terms):
    # multiplying by a nonzero f shifts the exponents and scales the coefficient vector
    p = 7
    pair, params = model(p, 2, r=1, g=2)
    v = construct_solution(pair, params, (1,))
    f3 = MPoly.from_terms(p, 0, 3, terms)
    f = MPoly.from_terms(p, 0, params.n, {e + (0, 0): c for e, c in f3.terms()})
    if f.is_zero:
        return
    fe, fc = f.lex_leading()
    a, b = leading_term(v), leading_term(v.mul_poly(f))
    assert b.exponents == tuple(x + y for x, y in zip(a.exponents, fe))
    assert b.leading_index == a.leading_index
    assert b.coefficient == {J: c * fc % p for J, c in a.coefficient.items()}
