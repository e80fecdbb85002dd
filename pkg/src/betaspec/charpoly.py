"""Characteristic polynomials of the corrected shift family, in closed form.

For the order-n matrix with parameter beta, the characteristic polynomial
det(t*I - B) works out to::

    p_n(t) = sum_{j=0..n} t**j  -  sum_{i=1..n} sum_{j=0..n-i} t**(i+j-1) * beta**-i

Aggregating the double sum by powers of t gives the O(n) coefficient rule
implemented here: the coefficient of t**m for m < n is
``1 - sum_{i=1..m+1} beta**-i`` and the leading coefficient is 1.  The
constant term is ``1 - beta**-1``, so 0 is never an eigenvalue for beta > 1.

The geometric split q_n - r_n, the coefficient reversal t**n * p(1/t)
(which maps roots to reciprocals), and the two rational limit functions the
polynomials converge to inside the unit disk live here as well, together
with an exact fraction-free determinant oracle used to validate the closed
form on small orders.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .errors import (
    InvalidOrderError,
    InvalidParameterError,
    PoleError,
    SizeLimitError,
    ZeroRootError,
)
from .matrices import REAL_GT1, BetaParam, build_beta_matrix
from .numerics import (
    DEFAULT_PRECISION_BITS,
    QComplex,
    decimal_str,
    mpc_from,
    mpf_from,
    with_precision,
)

DET_ORACLE_MAX_ORDER = 12


@dataclass(frozen=True)
class PrecPoly:
    """Degree-indexed coefficient vector, exact or at a stated precision.

    ``coeffs`` runs low to high.  Exact polynomials hold Fraction or QComplex
    coefficients; inexact ones hold mpf/mpc created at ``prec`` bits.  When
    the polynomial is a characteristic polynomial of the family, ``beta``
    records the parameter so downstream reports can carry provenance.
    """

    coeffs: tuple
    exact: bool = True
    prec: int | None = None
    beta: BetaParam | None = None

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise InvalidParameterError("polynomial needs at least one coefficient")
        if not self.coeffs[-1]:
            raise InvalidParameterError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def constant_term(self):
        return self.coeffs[0]

    @property
    def leading_coeff(self):
        return self.coeffs[-1]

    @property
    def is_real(self) -> bool:
        for c in self.coeffs:
            if isinstance(c, QComplex) and not c.is_real:
                return False
            if isinstance(c, mp.mpc) and c.imag != 0:
                return False
        return True

    def coeffs_mp(self, real: bool | None = None) -> list:
        """Coefficients as mpf/mpc at the ambient precision."""
        if real is None:
            real = self.is_real
        conv = mpf_from if real else mpc_from
        return [conv(c) for c in self.coeffs]

    def eval_exact(self, t):
        """Horner evaluation over exact scalars."""
        if not self.exact:
            raise InvalidParameterError("eval_exact requires an exact polynomial")
        if isinstance(t, int):
            t = Fraction(t)
        acc = self.coeffs[-1] * (t * 0 + 1)
        for c in reversed(self.coeffs[:-1]):
            acc = acc * t + c
        return acc

    def eval_mp(self, t, bits: int = DEFAULT_PRECISION_BITS):
        """Horner evaluation at ``bits`` precision; complex t gives mpc."""
        with with_precision(bits):
            tv = mpc_from(t) if isinstance(t, (complex, mp.mpc, QComplex)) else mpf_from(t)
            cs = self.coeffs_mp(real=isinstance(tv, mp.mpf) and self.is_real)
            acc = cs[-1] * (tv * 0 + 1)
            for c in reversed(cs[:-1]):
                acc = acc * tv + c
            return acc

    def derivative(self) -> "PrecPoly":
        if self.degree == 0:
            raise InvalidParameterError("derivative of a constant is the zero polynomial")
        cs = tuple(self.coeffs[k] * k for k in range(1, len(self.coeffs)))
        return PrecPoly(coeffs=cs, exact=self.exact, prec=self.prec)


def charpoly_closed_form(beta: BetaParam, n: int) -> PrecPoly:
    """Characteristic polynomial of the order-n family member, O(n) exact.

    Coefficient of t**m is ``1 - (beta**-1 + ... + beta**-(m+1))`` for
    m = 0..n-1 and 1 for m = n, via prefix sums of the inverse powers.
    """
    if n < 1:
        raise InvalidOrderError(f"order must be >= 1, got {n}")
    inv_powers = beta.inverse_powers(n)
    coeffs = []
    s = inv_powers[0] * 0
    for m in range(n):
        s = s + inv_powers[m]
        coeffs.append(1 - s)
    coeffs.append(s * 0 + 1)
    return PrecPoly(coeffs=tuple(coeffs), exact=True, beta=beta)


def split_qr(beta: BetaParam, n: int) -> tuple[PrecPoly, PrecPoly]:
    """Geometric split (q_n, r_n) with q_n - r_n equal to the closed form.

    q_n has all coefficients 1 up to degree n; r_n has degree n-1 with
    coefficient of t**m equal to the prefix sum beta**-1 + ... + beta**-(m+1).
    """
    if n < 1:
        raise InvalidOrderError(f"order must be >= 1, got {n}")
    inv_powers = beta.inverse_powers(n)
    one = inv_powers[0] * 0 + 1
    q = PrecPoly(coeffs=tuple([one] * (n + 1)), exact=True)
    rc = []
    s = inv_powers[0] * 0
    for m in range(n):
        s = s + inv_powers[m]
        rc.append(s)
    r = PrecPoly(coeffs=tuple(rc), exact=True)
    return q, r


def reverse_poly(poly: PrecPoly) -> PrecPoly:
    """Coefficient reversal t**d * p(1/t); roots map to exact reciprocals.

    Rejects polynomials with constant term 0 (a zero root has no reciprocal).
    """
    if not poly.constant_term:
        raise ZeroRootError("cannot reverse a polynomial with constant term 0")
    return PrecPoly(coeffs=tuple(reversed(poly.coeffs)), exact=poly.exact,
                    prec=poly.prec)


def poly_to_json(poly: PrecPoly, digits: int = 30) -> str:
    """JSON export: degree, low-to-high coefficient strings, beta, exactness."""
    payload = {
        "degree": poly.degree,
        "coeffs": [str(c) if poly.exact else decimal_str(c, digits)
                   for c in poly.coeffs],
        "beta": str(poly.beta) if poly.beta is not None else None,
        "exact": poly.exact,
    }
    return json.dumps(payload)


# ---------------------------------------------------------------------------
# Exact determinant oracle (fraction-free elimination over Q[t])
# ---------------------------------------------------------------------------

class _RatPoly:
    """Minimal dense polynomial over Fraction for the determinant oracle."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        cs = [Fraction(x) for x in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        self.c = cs

    @property
    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return len(self.c) == 1 and self.c[0] == 0

    def __add__(self, other):
        a, b = self.c, other.c
        n = max(len(a), len(b))
        return _RatPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                         for i in range(n)])

    def __sub__(self, other):
        a, b = self.c, other.c
        n = max(len(a), len(b))
        return _RatPoly([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)
                         for i in range(n)])

    def __mul__(self, other):
        a, b = self.c, other.c
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return _RatPoly(out)

    def __neg__(self):
        return _RatPoly([-x for x in self.c])

    def divexact(self, other):
        """Exact polynomial division; the fraction-free recurrence guarantees
        divisibility, asserted here."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.c)
        div = other.c
        if len(rem) < len(div):
            if all(x == 0 for x in rem):
                return _RatPoly([0])
            raise InvalidParameterError("inexact polynomial division in oracle")
        out = [Fraction(0)] * (len(rem) - len(div) + 1)
        for k in range(len(out) - 1, -1, -1):
            q = rem[k + len(div) - 1] / div[-1]
            out[k] = q
            if q != 0:
                for j, dj in enumerate(div):
                    rem[k + j] -= q * dj
        if any(x != 0 for x in rem):
            raise InvalidParameterError("inexact polynomial division in oracle")
        return _RatPoly(out)


def _coerce_entry(x) -> _RatPoly:
    if isinstance(x, _RatPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return _RatPoly([x])
    if isinstance(x, (list, tuple)):
        return _RatPoly(list(x))
    raise InvalidParameterError(
        f"oracle entries must be rationals or coefficient sequences, got {type(x).__name__}"
    )


def symbolic_t() -> tuple:
    """The degree-1 entry (0, 1) representing the variable t for oracle input."""
    return (Fraction(0), Fraction(1))


def det_oracle(matrix: Sequence[Sequence]) -> PrecPoly:
    """Exact determinant of a small matrix with degree<=1 rational entries.

    Uses fraction-free (Bareiss) elimination over the polynomial ring Q[t]:
    every intermediate division is exact, so the result is the exact
    determinant polynomial.  Hard-limited to order 12; this is an oracle for
    validating closed forms, not a production determinant.
    """
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix):
        raise InvalidParameterError("oracle requires a nonempty square matrix")
    if n > DET_ORACLE_MAX_ORDER:
        raise SizeLimitError(
            f"determinant oracle limited to order {DET_ORACLE_MAX_ORDER}, got {n}"
        )
    a = [[_coerce_entry(x) for x in row] for row in matrix]
    for row in a:
        for entry in row:
            if entry.degree > 1:
                raise InvalidParameterError("oracle entries must have degree <= 1")
    sign = 1
    prev = _RatPoly([1])
    for k in range(n - 1):
        if a[k][k].is_zero():
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return _zero_poly()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.divexact(prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    if sign < 0:
        det = -det
    if det.is_zero():
        return _zero_poly()
    return PrecPoly(coeffs=tuple(det.c), exact=True)


def _zero_poly() -> PrecPoly:
    # degree-0 zero determinant; bypass the nonzero-leading check deliberately
    p = object.__new__(PrecPoly)
    object.__setattr__(p, "coeffs", (Fraction(0),))
    object.__setattr__(p, "exact", True)
    object.__setattr__(p, "prec", None)
    object.__setattr__(p, "beta", None)
    return p


def aux_matrix_symbolic(n: int) -> list[list[_RatPoly]]:
    """The bordered bidiagonal auxiliary matrix with symbolic t, oracle-ready."""
    if n < 1:
        raise InvalidOrderError(f"order must be >= 1, got {n}")
    t = _RatPoly([0, 1])
    one = _RatPoly([1])
    zero = _RatPoly([0])
    rows = [[zero] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = -one
        if i + 1 < n:
            rows[i][i + 1] = t
    for j in range(n - 1):
        rows[n - 1][j] = -t
    rows[n - 1][n - 1] = -one - t
    return rows


def shifted_matrix_symbolic(beta: BetaParam, n: int) -> list[list[_RatPoly]]:
    """t*I - B with symbolic t over exact rationals, oracle-ready."""
    if not beta.is_real:
        raise InvalidParameterError("symbolic shifted matrix requires real rational beta")
    dense = build_beta_matrix(beta, n).dense_exact()
    t = _RatPoly([0, 1])
    rows = []
    for i in range(n):
        row = [_RatPoly([-x]) for x in dense[i]]
        row[i] = row[i] + t
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Limit functions on the open unit disk
# ---------------------------------------------------------------------------

LIMIT_INTERIOR = "p"
LIMIT_RECIPROCAL = "p_tilde"


@dataclass(frozen=True)
class LimitFunction:
    """One of the two rational limits of the characteristic polynomials.

    ``p`` is the interior limit (beta - 1 - t) / ((1 - t) (beta - t));
    ``p_tilde`` is the limit of the reversed polynomials,
    (beta - 1 - t) / ((1 - t) (beta - 1)).  Both need real beta > 1 and are
    evaluated on the open unit disk away from poles; each has a single zero
    at beta - 1.
    """

    tag: str
    beta: BetaParam

    def __post_init__(self):
        if self.tag not in (LIMIT_INTERIOR, LIMIT_RECIPROCAL):
            raise InvalidParameterError(f"unknown limit function tag {self.tag!r}")
        self.beta.require_class([REAL_GT1], "limit function")


def _limit_point(fn: LimitFunction, t, bits: int):
    tv = mpc_from(t)
    b = mpf_from(fn.beta.real_value)
    pole_tol = mp.mpf(2) ** (-bits // 2)
    if abs(tv - 1) <= pole_tol:
        raise PoleError("t = 1 is a pole of the limit functions")
    if fn.tag == LIMIT_INTERIOR and abs(tv - b) <= pole_tol:
        raise PoleError("t = beta is a pole of the interior limit function")
    if abs(tv) >= 1:
        raise InvalidParameterError(
            f"limit functions are defined on the open unit disk, |t| = {mp.nstr(abs(tv), 8)}"
        )
    return tv, b


def eval_limit(fn: LimitFunction, t, bits: int = DEFAULT_PRECISION_BITS):
    """Closed-form value of the limit function at t (|t| < 1)."""
    with with_precision(bits):
        tv, b = _limit_point(fn, t, bits)
        num = b - 1 - tv
        if fn.tag == LIMIT_INTERIOR:
            return num / ((1 - tv) * (b - tv))
        return num / ((1 - tv) * (b - 1))


def limit_derivative(fn: LimitFunction, t, bits: int = DEFAULT_PRECISION_BITS):
    """Closed-form derivative of the limit function at t (|t| < 1).

    For the interior limit: ((beta-t)**2 - (beta-t) - (1-t)) / ((1-t)**2 (beta-t)**2);
    for the reversed limit: (beta-2) / ((1-t)**2 (beta-1)).  Both are validated
    against central finite differences in the test suite.
    """
    with with_precision(bits):
        tv, b = _limit_point(fn, t, bits)
        one_mt = 1 - tv
        if fn.tag == LIMIT_INTERIOR:
            bmt = b - tv
            return (bmt * bmt - bmt - one_mt) / (one_mt * one_mt * bmt * bmt)
        return (b - 2) / (one_mt * one_mt * (b - 1))
