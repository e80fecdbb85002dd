"""Root engine: certified multiprecision roots against independent checks."""
import json
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from betaspec import (
    BetaParam,
    PrecPoly,
    RefinementFailureError,
    build_beta_matrix,
    charpoly_closed_form,
    optimal_match_distance,
    refine_real_root,
    reverse_poly,
    solve_all,
)

REFERENCE_N50 = "2.99999796124162120902813536126303334491749260835507"


def test_degree_one_closed_form():
    beta = BetaParam.parse("2")
    p = charpoly_closed_form(beta, 1)
    rs = solve_all(p, 30)
    assert len(rs.roots) == 1
    assert abs(rs.roots[0] - mp.mpf(-0.5)) == 0
    assert rs.residuals[0] == 0


def test_small_order_matches_dense_eigensolver():
    # independent oracle: LAPACK eigenvalues of the dense float64 matrix
    beta = BetaParam.parse("2")
    rs = solve_all(charpoly_closed_form(beta, 3), 30)
    ev = np.linalg.eigvals(build_beta_matrix(beta, 3).dense_numpy())
    assert optimal_match_distance(rs.roots, ev) < 1e-8


def test_reference_outlier_in_root_set():
    beta = BetaParam.parse("4/3")
    rs = solve_all(charpoly_closed_form(beta, 50), 50)
    reals = [z.real for z in rs.roots if abs(z.imag) < mp.mpf(10) ** -25 and z.real > 2]
    assert len(reals) == 1
    assert mp.nstr(reals[0], 51) == REFERENCE_N50


def test_residual_certificates_hold():
    beta = BetaParam.parse("3")
    rs = solve_all(charpoly_closed_form(beta, 20), 30)
    assert len(rs.roots) == 20
    assert all(r <= t for r, t in zip(rs.residuals, rs.thresholds))


def test_conjugate_closure_for_real_coefficients():
    beta = BetaParam.parse("4/3")
    rs = solve_all(charpoly_closed_form(beta, 21), 30)
    conj = [mp.conj(z) for z in rs.roots]
    assert optimal_match_distance(rs.roots, conj) < 1e-25


def test_determinism_identical_digit_strings():
    beta = BetaParam.parse("3")
    a = solve_all(charpoly_closed_form(beta, 17), 30)
    b = solve_all(charpoly_closed_form(beta, 17), 30)
    sa = [mp.nstr(z, 30) for z in a.roots]
    sb = [mp.nstr(z, 30) for z in b.roots]
    assert sa == sb
    assert a.precision_used == b.precision_used
    assert a.iterations == b.iterations


@pytest.mark.parametrize("n", [15, 50])
def test_reversed_roots_are_reciprocals(n):
    beta = BetaParam.parse("4/3")
    digits = 30
    p = charpoly_closed_form(beta, n)
    rs = solve_all(p, digits)
    rr = solve_all(reverse_poly(p), digits)
    with mp.workprec(300):
        recip = [1 / z for z in rs.roots]
    assert optimal_match_distance(rr.roots, recip) < 10 ** (-(digits - 2))
    # the smallest-modulus outlier of p maps to the largest of the reversal
    with mp.workprec(300):
        small = min(abs(z) for z in rs.roots)
        large = max(abs(z) for z in rr.roots)
        assert abs(small * large - 1) < 1e-20


def test_solve_inexact_coefficients():
    # mpf-coefficient polynomial (t - 1/4)(t - 4) built at 256 bits
    with mp.workprec(256):
        coeffs = (mp.mpf(1), -mp.mpf("4.25"), mp.mpf(1))
    p = PrecPoly(coeffs=coeffs, exact=False, prec=256)
    rs = solve_all(p, 30)
    with mp.workprec(300):
        got = sorted(z.real for z in rs.roots)
        assert abs(got[0] - mp.mpf(1) / 4) < 1e-29
        assert abs(got[1] - 4) < 1e-29


@pytest.mark.parametrize("beta_s,n", [("4/3", 30), ("3", 25), ("5", 12)])
def test_trace_and_determinant_identities(beta_s, n):
    beta = BetaParam.parse(beta_s)
    digits = 30
    rs = solve_all(charpoly_closed_form(beta, n), digits)
    inv = beta.inverse_powers(n)
    with mp.workprec(4 * digits):
        trace = mp.mpf(sum(inv).numerator) / sum(inv).denominator - 1
        s = sum(rs.roots)
        assert abs(s - trace) < mp.mpf(10) ** (-(digits - 4))
        prod = mp.mpc(1)
        for z in rs.roots:
            prod *= z
        det_ref = (-1) ** n * (1 - Fraction(1) / beta.value)
        assert abs(prod - mp.mpf(det_ref.numerator) / det_ref.denominator) \
            < mp.mpf(10) ** (-(digits - 4))


def test_complex_beta_roots():
    beta = BetaParam.parse("1+1i")
    rs = solve_all(charpoly_closed_form(beta, 8), 25)
    assert len(rs.roots) == 8
    assert all(r <= t for r, t in zip(rs.residuals, rs.thresholds))


def test_root_report_schema():
    beta = BetaParam.parse("3")
    rs = solve_all(charpoly_closed_form(beta, 4), 20)
    doc = json.loads(rs.as_json())
    assert doc["beta"] == "3"
    assert doc["n"] == 4
    assert doc["precision_bits"] >= 256
    assert len(doc["roots"]) == 4
    assert {"re", "im", "residual"} <= set(doc["roots"][0])


def test_refine_reference_value_from_seed():
    beta = BetaParam.parse("4/3")
    p = charpoly_closed_form(beta, 50)
    x = refine_real_root(p, 3.0, 50)
    assert mp.nstr(x, 51) == REFERENCE_N50


def test_refine_near_interior_limit():
    beta = BetaParam.parse("4/3")
    p = charpoly_closed_form(beta, 60)
    x = refine_real_root(p, Fraction(1, 3), 40)
    with mp.workprec(300):
        assert abs(x - mp.mpf(1) / 3) < 1e-10


def test_refine_degree_one_exact():
    beta = BetaParam.parse("2")
    p = charpoly_closed_form(beta, 1)
    assert refine_real_root(p, 100.0, 30) == mp.mpf(-0.5)


def test_refine_no_real_root_fails():
    p = PrecPoly(coeffs=(Fraction(1), Fraction(0), Fraction(1)))  # t^2 + 1
    with pytest.raises(RefinementFailureError):
        refine_real_root(p, 0.5, 20)


def test_sorted_by_argument():
    beta = BetaParam.parse("3")
    rs = solve_all(charpoly_closed_form(beta, 12), 25)
    with mp.workprec(rs.precision_used):
        args = []
        for z in rs.roots:
            if abs(z.imag) < mp.mpf(10) ** -12 * (1 + abs(z)):
                args.append(mp.mpf(0) if z.real >= 0 else +mp.pi)
            else:
                args.append(mp.atan2(z.imag, z.real))
        assert all(args[i] <= args[i + 1] for i in range(len(args) - 1))
