"""Closed-form characteristic polynomials against exact determinant oracles."""
import json
import random
from fractions import Fraction

import mpmath as mp
import pytest

from betaspec import (
    BetaParam,
    InvalidParameterError,
    LimitFunction,
    PoleError,
    PrecPoly,
    SizeLimitError,
    ZeroRootError,
    aux_matrix_symbolic,
    charpoly_closed_form,
    det_oracle,
    eval_limit,
    limit_derivative,
    poly_to_json,
    reverse_poly,
    shifted_matrix_symbolic,
    split_qr,
)

BETAS = [BetaParam.parse(s) for s in ("4/3", "3/2", "2", "3", "5")]


def test_degree_one_closed_form():
    for beta in BETAS:
        p = charpoly_closed_form(beta, 1)
        assert p.degree == 1
        assert p.coeffs == (1 - Fraction(1) / beta.value, Fraction(1))


@pytest.mark.parametrize("n", [1, 2, 5, 40])
def test_constant_term_rule(n):
    for beta in BETAS:
        p = charpoly_closed_form(beta, n)
        assert p.constant_term == 1 - Fraction(1) / beta.value
        assert p.leading_coeff == 1


def test_closed_form_matches_direct_2x2_expansion():
    # det(tI - B_2) = (t - b1 + 1)(t - b2) - (1 - b1)(-b2 - 1) expanded by hand
    beta = BetaParam.parse("2")
    b1, b2 = beta.inverse_powers(2)
    p = charpoly_closed_form(beta, 2)
    assert p.coeffs == (1 - b1, 1 - b1 - b2, Fraction(1))
    oracle = det_oracle(shifted_matrix_symbolic(beta, 2))
    assert oracle.coeffs == p.coeffs

    p3 = charpoly_closed_form(beta, 3)
    oracle3 = det_oracle(shifted_matrix_symbolic(beta, 3))
    assert oracle3.coeffs == p3.coeffs


@pytest.mark.parametrize("n", range(1, 9))
def test_oracle_equivalence_grid(n):
    for beta in BETAS:
        closed = charpoly_closed_form(beta, n)
        oracle = det_oracle(shifted_matrix_symbolic(beta, n))
        assert closed.coeffs == oracle.coeffs


@pytest.mark.parametrize("n", range(1, 11))
def test_aux_determinant_identity(n):
    det = det_oracle(aux_matrix_symbolic(n))
    sign = 1 if n % 2 == 0 else -1
    assert det.coeffs == tuple(Fraction(sign) for _ in range(n + 1))
    # spot values at random rational points
    rng = random.Random(1234 + n)
    for _ in range(5):
        t = Fraction(rng.randint(-50, 50), rng.randint(1, 40))
        expected = sign * sum(t ** i for i in range(n + 1))
        assert det.eval_exact(t) == expected


def test_oracle_base_case_and_limits():
    m1 = det_oracle(aux_matrix_symbolic(1))
    assert m1.coeffs == (Fraction(-1), Fraction(-1))
    with pytest.raises(SizeLimitError):
        det_oracle(aux_matrix_symbolic(13))
    with pytest.raises(InvalidParameterError):
        det_oracle([[(0, 1, 2)]])  # degree-2 entry rejected


def test_split_qr():
    beta = BetaParam.parse("2")
    q1, r1 = split_qr(beta, 1)
    assert q1.coeffs == (Fraction(1), Fraction(1))
    assert r1.coeffs == (Fraction(1, 2),)

    # enumerate the (i, j) double sum directly as the oracle for r_n
    def r_enumerated(bval, n):
        coeffs = [Fraction(0)] * n
        for i in range(1, n + 1):
            for j in range(0, n - i + 1):
                coeffs[i + j - 1] += Fraction(1) / bval ** i
        return tuple(coeffs)

    for n in (1, 2, 3, 7):
        q, r = split_qr(beta, n)
        assert r.coeffs == r_enumerated(Fraction(2), n)
        p = charpoly_closed_form(beta, n)
        diff = tuple(qc - rc for qc, rc in zip(q.coeffs, tuple(r.coeffs) + (Fraction(0),) * 2))
        assert diff == p.coeffs
        assert q.eval_exact(Fraction(1)) == n + 1

    _, r2 = split_qr(beta, 2)
    assert r2.coeffs == (Fraction(1, 2), Fraction(3, 4))


def test_reverse_poly():
    p = PrecPoly(coeffs=(Fraction(1, 2), Fraction(1)))
    rp = reverse_poly(p)
    assert rp.coeffs == (Fraction(1), Fraction(1, 2))
    q = charpoly_closed_form(BetaParam.parse("4/3"), 6)
    assert reverse_poly(reverse_poly(q)).coeffs == q.coeffs
    zero_const = charpoly_closed_form(BetaParam.parse("1"), 4)
    with pytest.raises(ZeroRootError):
        reverse_poly(zero_const)


def test_real_coefficients_for_real_beta():
    for beta in BETAS:
        assert charpoly_closed_form(beta, 12).is_real


def test_complex_beta_coefficients():
    beta = BetaParam.parse("1+1i")
    p = charpoly_closed_form(beta, 3)
    assert not p.is_real
    # constant term still 1 - 1/beta
    inv = beta.inverse_powers(1)[0]
    assert p.constant_term == 1 - inv


def test_limit_function_values():
    beta = BetaParam.parse("4/3")
    f = LimitFunction(tag="p", beta=beta)
    b = Fraction(4, 3)
    assert abs(eval_limit(f, 0) - float((b - 1) / b)) < 1e-70
    # single zero at beta - 1 for beta in (1, 2)
    assert abs(eval_limit(f, Fraction(1, 3))) < 1e-70
    ft = LimitFunction(tag="p_tilde", beta=beta)
    assert abs(eval_limit(ft, Fraction(1, 3))) < 1e-70
    with pytest.raises(PoleError):
        eval_limit(f, 1)
    with pytest.raises(InvalidParameterError):
        eval_limit(f, 2)  # outside the open unit disk
    with pytest.raises(InvalidParameterError):
        LimitFunction(tag="p", beta=BetaParam.parse("1"))


@pytest.mark.parametrize("tag", ["p", "p_tilde"])
@pytest.mark.parametrize("beta_s", ["4/3", "3/2", "9/5"])
def test_limit_derivative_finite_difference_oracle(tag, beta_s):
    # independent oracle: central finite differences at 300 bits
    beta = BetaParam.parse(beta_s)
    f = LimitFunction(tag=tag, beta=beta)
    for t in (Fraction(1, 10), Fraction(-2, 5), Fraction(beta_s) - 1):
        with mp.workprec(300):
            h = mp.mpf(2) ** -60
            tv = mp.mpf(t.numerator) / t.denominator
            fd = (eval_limit(f, tv + h, 300) - eval_limit(f, tv - h, 300)) / (2 * h)
        got = limit_derivative(f, t, 300)
        assert abs(got - fd) < 1e-25


def test_derivative_at_interior_zero_nonzero():
    # the limit functions have a simple zero at beta - 1: derivative nonzero,
    # equal to 1/(beta-2) and 1/((beta-2)(beta-1)) respectively
    for beta_s in ("4/3", "3/2", "9/5"):
        beta = BetaParam.parse(beta_s)
        b = Fraction(beta_s)
        z = b - 1
        dp = limit_derivative(LimitFunction(tag="p", beta=beta), z, 300)
        dpt = limit_derivative(LimitFunction(tag="p_tilde", beta=beta), z, 300)
        assert abs(dp - float(1 / (b - 2))) < 1e-60
        assert abs(dpt - float(1 / ((b - 2) * (b - 1)))) < 1e-60
        assert dp != 0 and dpt != 0


def test_pointwise_convergence_spot():
    beta = BetaParam.parse("3")
    f = LimitFunction(tag="p", beta=beta)
    errs = []
    for n in (10, 20, 40):
        p = charpoly_closed_form(beta, n)
        errs.append(abs(p.eval_mp(0.5, 512) - eval_limit(f, Fraction(1, 2), 512)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] / errs[0] < 0.5


def test_poly_json_schema():
    beta = BetaParam.parse("4/3")
    p = charpoly_closed_form(beta, 3)
    doc = json.loads(poly_to_json(p))
    assert doc["degree"] == 3
    assert doc["beta"] == "4/3"
    assert doc["exact"] is True
    assert doc["coeffs"][0] == "1/4"
    assert len(doc["coeffs"]) == 4


def test_precpoly_validation():
    with pytest.raises(InvalidParameterError):
        PrecPoly(coeffs=())
    with pytest.raises(InvalidParameterError):
        PrecPoly(coeffs=(Fraction(1), Fraction(0)))
