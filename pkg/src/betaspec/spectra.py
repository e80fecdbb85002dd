"""Spectral analytics: clustering, outliers, singular values, distribution sums.

For real beta > 1 the eigenvalues of the family accumulate on the unit
circle.  For beta >= 2 no eigenvalue stays away from the circle as the order
grows; for beta in (1, 2) exactly two real positive outliers persist, with
limits beta - 1 (inside) and 1/(beta - 1) (outside).  This module measures
all of that on computed spectra: annulus partition counts, outlier tracking
with errors to the limits, singular values, averaged test-function sums
against the circle average (eigenvalues) or the constant 1 (singular
values), the quasi-normality gap, and the spectral-norm conditioning bound.

Pairing convention: the quasi-normality gap compares the full sorted lists
of singular values and eigenvalue moduli index by index over 1..n; that
paired-lists form is the concrete realization of comparing the two value
sets as distributions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath as mp
import numpy as np

from .errors import (
    ConvergenceFailureError,
    InconsistencyError,
    InvalidOrderError,
    InvalidParameterError,
    SingularityError,
    UnknownTestFunctionError,
)
from .charpoly import charpoly_closed_form
from .matrices import REAL_GT1, BetaParam
from .numerics import (
    DEFAULT_PRECISION_BITS,
    decimal_str,
    mpc_from,
    mpf_from,
    with_precision,
)
from .rootfind import RootSet, refine_real_root_reported, solve_all

DEFAULT_EIG_DIGITS = 30
OUTLIER_ANNULUS_EPS = 0.05
OUTLIER_VERIFY_MAX_ORDER = 150


@lru_cache(maxsize=128)
def eigenvalues(beta: BetaParam, n: int, target_digits: int = DEFAULT_EIG_DIGITS) -> RootSet:
    """All eigenvalues of the order-n member as certified polynomial roots.

    Results are cached per (beta, n, target_digits); RootSet is immutable, so
    sharing the cached object is safe.
    """
    return solve_all(charpoly_closed_form(beta, n), target_digits)


# ---------------------------------------------------------------------------
# Clustering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterReport:
    """Annulus partition of a spectrum around the unit circle."""

    epsilon: float
    inside_count: int
    outside_count: int
    outside_points: tuple
    n: int
    beta: BetaParam | None

    def as_json(self, digits: int = 20) -> str:
        return json.dumps({
            "n": self.n,
            "beta": str(self.beta) if self.beta is not None else None,
            "epsilon": self.epsilon,
            "inside_count": self.inside_count,
            "outside_count": self.outside_count,
            "outside_points": [
                {"re": decimal_str(z.real, digits), "im": decimal_str(z.imag, digits)}
                for z in self.outside_points
            ],
        })


def cluster_count(roots: RootSet, epsilon: float) -> ClusterReport:
    """Exact partition of the roots by the annulus test | |z| - 1 | <= eps."""
    if epsilon <= 0:
        raise InvalidParameterError("epsilon must be positive")
    with with_precision(roots.precision_used):
        eps = mpf_from(epsilon)
        outside = tuple(z for z in roots.roots if abs(abs(z) - 1) > eps)
    return ClusterReport(
        epsilon=epsilon,
        inside_count=roots.degree - len(outside),
        outside_count=len(outside),
        outside_points=outside,
        n=roots.n if roots.n is not None else roots.degree,
        beta=roots.beta,
    )


# ---------------------------------------------------------------------------
# Outlier tracking (beta in (1, 2))
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OutlierRecord:
    """The two real positive off-annulus eigenvalues and their limit errors.

    ``small`` tends to beta - 1 from the interior analysis, ``large`` to
    1/(beta - 1) from the reversed-polynomial analysis.  Either may be absent
    (None) with a ``diagnostic`` when the order is too small for the outliers
    to have separated from the circle cluster.  ``count_verified`` records
    whether a full spectrum solve confirmed that these are the only two
    annulus outliers.
    """

    n: int
    beta: BetaParam
    annulus_eps: float
    small: mp.mpf | None
    large: mp.mpf | None
    err_small: mp.mpf | None
    err_large: mp.mpf | None
    target_digits: int
    count_verified: bool
    diagnostic: str | None = None
    precision_used: int | None = None


def find_outliers(beta: BetaParam, n: int, target_digits: int,
                  annulus_eps: float = OUTLIER_ANNULUS_EPS,
                  verify: bool | None = None) -> OutlierRecord:
    """Locate and refine the two outliers for beta in (1, 2).

    Newton refinement is seeded at the limits beta - 1 and 1/(beta - 1).
    With ``verify`` true (default for n <= 150) a full moderate-precision
    solve confirms the annulus-outlier count; more than two outliers raises
    :class:`InconsistencyError`, since the theory allows at most two and a
    third signals solver failure.
    """
    beta.require_class([REAL_GT1], "outlier tracking")
    b = beta.real_value
    if not (1 < b < 2):
        raise InvalidParameterError(
            f"outlier tracking requires beta in (1, 2), got {b}")
    if n < 2:
        raise InvalidOrderError("outlier tracking requires n >= 2")
    if verify is None:
        verify = n <= OUTLIER_VERIFY_MAX_ORDER

    poly = charpoly_closed_form(beta, n)
    small_limit = b - 1
    large_limit = 1 / small_limit

    count_verified = False
    if verify:
        rs = eigenvalues(beta, n, DEFAULT_EIG_DIGITS)
        with with_precision(rs.precision_used):
            eps = mpf_from(annulus_eps)
            outs = [z for z in rs.roots if abs(abs(z) - 1) > eps]
            if len(outs) > 2:
                raise InconsistencyError(
                    f"{len(outs)} annulus outliers found for beta={beta}, n={n} "
                    f"at eps={annulus_eps}: at most two exist once the cluster "
                    "has formed, so either this order is below the clustering "
                    "onset for this beta or the solver failed")
            im_snap = mp.mpf(10) ** (-(rs.target_digits / 2))
            real_pos = [z for z in outs
                        if abs(z.imag) < im_snap * (1 + abs(z)) and z.real > 0]
            if len(outs) == 2 and len(real_pos) == 2:
                count_verified = True

    def _try(seed, limit):
        try:
            x, prec = refine_real_root_reported(poly, seed, target_digits)
        except Exception:
            return None, None, None
        with with_precision(max(DEFAULT_PRECISION_BITS, 4 * target_digits)):
            if x <= 0 or abs(abs(x) - 1) <= mpf_from(annulus_eps):
                return None, None, None
            err = abs(x - mpf_from(limit))
            return x, err, prec

    small, err_small, prec_s = _try(small_limit, small_limit)
    large, err_large, prec_l = _try(large_limit, large_limit)
    precs = [p for p in (prec_s, prec_l) if p is not None]
    diagnostic = None
    if small is None or large is None:
        missing = [name for name, v in (("small", small), ("large", large)) if v is None]
        diagnostic = (f"outlier(s) {', '.join(missing)} not separated from the "
                      f"annulus at eps={annulus_eps} for n={n}")
    return OutlierRecord(
        n=n, beta=beta, annulus_eps=annulus_eps,
        small=small, large=large,
        err_small=err_small, err_large=err_large,
        target_digits=target_digits,
        count_verified=count_verified,
        diagnostic=diagnostic,
        precision_used=max(precs) if precs else None,
    )


# ---------------------------------------------------------------------------
# Singular values
# ---------------------------------------------------------------------------

def hermitian_jacobi(matrix: Sequence[Sequence], bits: int = DEFAULT_PRECISION_BITS,
                     max_sweeps: int = 60) -> list:
    """Eigenvalues of a Hermitian matrix by cyclic two-sided Jacobi rotations.

    Runs at ``bits`` precision until the off-diagonal norm falls below
    2**-(bits-8) relative to the diagonal scale.  Returns eigenvalues in
    nondecreasing order.  Dense O(n^3) per sweep: intended for the small
    projected blocks and cross-check-sized matrices.
    """
    n = len(matrix)
    if n == 0 or any(len(r) != n for r in matrix):
        raise InvalidParameterError("jacobi eigensolve requires a square matrix")
    with with_precision(bits):
        a = [[mpc_from(x) for x in row] for row in matrix]
        if n == 1:
            return [a[0][0].real]
        tol = mp.mpf(2) ** (-(bits - 8))
        for _ in range(max_sweeps):
            off = mp.mpf(0)
            scale = mp.mpf(1)
            for p in range(n):
                scale = max(scale, abs(a[p][p]))
                for q in range(p + 1, n):
                    off = max(off, abs(a[p][q]))
            if off <= tol * scale:
                return sorted(a[i][i].real for i in range(n))
            thresh = tol * scale / n
            for p in range(n):
                for q in range(p + 1, n):
                    apq = a[p][q]
                    if abs(apq) <= thresh:
                        continue
                    app = a[p][p].real
                    aqq = a[q][q].real
                    phase = apq / abs(apq)
                    tau = (aqq - app) / (2 * abs(apq))
                    t = (1 if tau >= 0 else -1) / (abs(tau) + mp.sqrt(1 + tau * tau))
                    c = 1 / mp.sqrt(1 + t * t)
                    s = t * c
                    for k in range(n):
                        akp = a[k][p]
                        akq = a[k][q]
                        a[k][p] = c * akp - s * mp.conj(phase) * akq
                        a[k][q] = s * phase * akp + c * akq
                    for k in range(n):
                        apk = a[p][k]
                        aqk = a[q][k]
                        a[p][k] = c * apk - s * phase * aqk
                        a[q][k] = s * mp.conj(phase) * apk + c * aqk
        raise ConvergenceFailureError(
            f"jacobi eigensolve did not converge in {max_sweeps} sweeps")


def _gram_apply(w, c, x):
    """Apply B*B = diag(1,..,1,0) + w e^T + e w* + c e e^T to x, O(n)."""
    n = len(x)
    ex = sum(x)
    wx = sum(mp.conj(w[i]) * x[i] for i in range(n))
    out = [x[i] + w[i] * ex + wx + c * ex for i in range(n)]
    out[n - 1] -= x[n - 1]
    return out


def singular_values(beta: BetaParam, n: int, bits: int = DEFAULT_PRECISION_BITS,
                    method: str = "structured") -> list:
    """Singular values of the order-n member, sorted nonincreasing.

    Both methods are symmetric eigensolves of the Gram matrix B*B at working
    precision, finished by two-sided Jacobi:

    * ``structured`` (default): B*B differs from diag(1,...,1,0) by a rank-2
      correction spanned by the all-ones vector e and the shifted correction
      w, so the orthogonal complement of span{e, w, e_n} is an exact
      eigenspace with eigenvalue 1.  Jacobi runs on the projected block of
      size <= 3 -- O(n) total work, exact same spectrum as the dense solve.
    * ``jacobi``: dense cyclic Jacobi on B*B, kept as the independent route
      for cross-checks at small n (O(n^3) per sweep in mp arithmetic).
    """
    if n < 1:
        raise InvalidOrderError(f"order must be >= 1, got {n}")
    if method not in ("structured", "jacobi"):
        raise InvalidParameterError(f"unknown singular value method {method!r}")
    with with_precision(bits):
        inv_powers = beta.inverse_powers(n)
        u = [mpc_from(inv_powers[j]) - (1 if j == 0 else 0) for j in range(n)]
        if n == 1:
            return [abs(u[0])]

        if method == "jacobi":
            b_mat = [[mp.mpc(0)] * n for _ in range(n)]
            for s_ in range(n):
                for t_ in range(n):
                    b_mat[s_][t_] = u[s_] + (1 if s_ - t_ == 1 else 0)
            g = [[sum(mp.conj(b_mat[k][i]) * b_mat[k][j] for k in range(n))
                  for j in range(n)] for i in range(n)]
            evs = hermitian_jacobi(g, bits)
            return sorted((mp.sqrt(max(ev, mp.mpf(0))) for ev in evs), reverse=True)

        w = [u[j + 1] for j in range(n - 1)] + [mp.mpc(0)]
        c = sum(abs(x) ** 2 for x in u)
        e = [mp.mpc(1)] * n
        en = [mp.mpc(0)] * (n - 1) + [mp.mpc(1)]
        basis = []
        drop_tol = mp.mpf(2) ** (-(bits // 2))
        for vec in (e, w, en):
            v = list(vec)
            for b in basis:
                ip = sum(mp.conj(b[i]) * v[i] for i in range(n))
                v = [v[i] - ip * b[i] for i in range(n)]
            nrm = mp.sqrt(sum(abs(x) ** 2 for x in v))
            if nrm > drop_tol:
                basis.append([x / nrm for x in v])
        k = len(basis)
        images = [_gram_apply(w, c, b) for b in basis]
        block = [[sum(mp.conj(basis[i][t]) * images[j][t] for t in range(n))
                  for j in range(k)] for i in range(k)]
        evs = hermitian_jacobi(block, bits)
        sv = [mp.sqrt(max(ev, mp.mpf(0))) for ev in evs]
        return sorted(sv + [mp.mpf(1)] * (n - k), reverse=True)


# ---------------------------------------------------------------------------
# Distribution sums in the averaged (test-function) sense
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """Continuous compactly supported test function for distribution sums."""

    __test__ = False  # not a pytest collectible despite the name

    fid: str
    fn: Callable[[complex], float]
    description: str


def _radial_bump(z: complex, width: float = 0.5) -> float:
    r = abs(z)
    x = (r - 1.0) / width
    if abs(x) >= 1.0:
        return 0.0
    return (1.0 - x * x) ** 2


def _radial_plateau(r: float, flat: float = 4.0, zero: float = 5.0) -> float:
    if r <= flat:
        return 1.0
    if r >= zero:
        return 0.0
    return (zero - r) / (zero - flat)


def _arc_indicator(z: complex, half_width: float = np.pi / 2,
                   shoulder: float = 0.2) -> float:
    if z == 0:
        return 0.0
    theta = abs(np.angle(z))
    if theta <= half_width:
        ang = 1.0
    elif theta >= half_width + shoulder:
        ang = 0.0
    else:
        ang = (half_width + shoulder - theta) / shoulder
    return ang * _radial_plateau(abs(z))


def _re_moment(z: complex) -> float:
    return z.real * _radial_plateau(abs(z))


def _im_moment(z: complex) -> float:
    return z.imag * _radial_plateau(abs(z))


BUILTIN_TEST_FUNCTIONS = {
    "radial_bump": TestFunction(
        "radial_bump", _radial_bump,
        "C^1 bump in |z| centered on the unit circle, width 1/2"),
    "arc_indicator": TestFunction(
        "arc_indicator", _arc_indicator,
        "smoothed indicator of the arc |arg z| <= pi/2 with radial plateau"),
    "re_moment": TestFunction(
        "re_moment", _re_moment,
        "Re(z) truncated by a radial plateau (1 up to |z|=4, 0 beyond 5)"),
    "im_moment": TestFunction(
        "im_moment", _im_moment,
        "Im(z) truncated by a radial plateau (1 up to |z|=4, 0 beyond 5)"),
}

QUADRATURE_NODES = 4096


@dataclass(frozen=True)
class WeylReport:
    """Averaged test-function sum against its distribution reference."""

    fid: str
    kind: str
    n: int
    empirical_mean: float
    reference: float
    gap: float

    def as_json(self) -> str:
        return json.dumps({
            "f_id": self.fid, "kind": self.kind, "n": self.n,
            "empirical": repr(self.empirical_mean),
            "reference": repr(self.reference), "gap": repr(self.gap),
        })


def _resolve_test_function(fn) -> TestFunction:
    if isinstance(fn, TestFunction):
        return fn
    if isinstance(fn, str):
        try:
            return BUILTIN_TEST_FUNCTIONS[fn]
        except KeyError:
            raise UnknownTestFunctionError(
                f"unknown test function {fn!r}; built-ins: "
                f"{sorted(BUILTIN_TEST_FUNCTIONS)}") from None
    raise UnknownTestFunctionError(f"cannot resolve test function from {fn!r}")


def circle_average(fn) -> float:
    """Reference value (1/2pi) * integral of F(e^{i theta}) over [-pi, pi].

    Composite trapezoid with QUADRATURE_NODES nodes; for a periodic integrand
    this is the uniform node average, spectrally accurate for smooth F.
    """
    f = _resolve_test_function(fn)
    theta = -np.pi + 2 * np.pi * np.arange(QUADRATURE_NODES) / QUADRATURE_NODES
    vals = [f.fn(complex(np.cos(t), np.sin(t))) for t in theta]
    return float(np.mean(vals))


def weyl_sum(values: Sequence, fn, kind: str) -> WeylReport:
    """Averaged F over a spectrum against the distribution reference.

    ``kind='eigen'`` compares (1/n) sum F(lambda_i) to the unit-circle
    average of F; ``kind='singular'`` compares (1/n) sum F(sigma_i) to F(1).
    """
    if kind not in ("eigen", "singular"):
        raise InvalidParameterError(f"kind must be 'eigen' or 'singular', got {kind!r}")
    if len(values) == 0:
        raise InvalidParameterError("values must be nonempty")
    f = _resolve_test_function(fn)
    pts = [complex(v) for v in values]
    empirical = float(np.mean([f.fn(z) for z in pts]))
    reference = circle_average(f) if kind == "eigen" else float(f.fn(complex(1.0)))
    return WeylReport(fid=f.fid, kind=kind, n=len(values),
                      empirical_mean=empirical, reference=reference,
                      gap=abs(empirical - reference))


def quasi_normality_gap(beta: BetaParam, n: int,
                        bits: int = DEFAULT_PRECISION_BITS,
                        target_digits: int = DEFAULT_EIG_DIGITS) -> mp.mpf:
    """Mean index-paired gap between sorted singular values and |eigenvalues|.

    (1/n) * sum_i |sigma_i - |lambda_i|| with both lists sorted nonincreasing.
    Tends to 0 for |beta| >= 1 as the order grows (asymptotic normality of
    the sequence even though every single matrix is non-normal).
    """
    if beta.abs2() < 1:
        raise InvalidParameterError("quasi-normality gap requires |beta| >= 1")
    sv = singular_values(beta, n, bits)
    lam = eigenvalues(beta, n, target_digits)
    with with_precision(bits):
        moduli = sorted((abs(z) for z in lam.roots), reverse=True)
        total = mp.fsum(abs(sv[i] - moduli[i]) for i in range(n))
        return total / n


@dataclass(frozen=True)
class ConditionReport:
    kappa: mp.mpf
    bound: mp.mpf
    satisfied: bool


def condition_bound_check(beta: BetaParam, n: int,
                          bits: int = DEFAULT_PRECISION_BITS,
                          tol: float = 0.02) -> ConditionReport:
    """Spectral-norm conditioning against the [max(beta-1, 1/(beta-1))]^2 bound.

    kappa = sigma_max / sigma_min; satisfied when kappa >= (1 - tol) * bound.
    """
    beta.require_class([REAL_GT1], "conditioning bound")
    sv = singular_values(beta, n, bits)
    with with_precision(bits):
        smin = sv[-1]
        if smin == 0:
            raise SingularityError(
                "sigma_min = 0: the matrix is provably invertible, so this "
                "signals a computation failure")
        kappa = sv[0] / smin
        b = beta.real_value
        growth = max(b - 1, Fraction(1) / (b - 1))
        bound = mpf_from(growth * growth)
        return ConditionReport(kappa=kappa, bound=bound,
                               satisfied=bool(kappa >= (1 - mpf_from(tol)) * bound))


# ---------------------------------------------------------------------------
# Tabular exports
# ---------------------------------------------------------------------------

def cluster_csv(reports: Sequence[ClusterReport]) -> str:
    lines = ["n,beta,epsilon,inside_count,outside_count"]
    for r in reports:
        lines.append(f"{r.n},{r.beta},{r.epsilon},{r.inside_count},{r.outside_count}")
    return "\n".join(lines) + "\n"


def outlier_csv(records: Sequence[OutlierRecord], digits: int | None = None) -> str:
    lines = ["n,large,small,err_large,err_small"]
    for r in records:
        d = digits if digits is not None else r.target_digits
        fmt = lambda x: decimal_str(x, d) if x is not None else ""
        lines.append(f"{r.n},{fmt(r.large)},{fmt(r.small)},"
                     f"{fmt(r.err_large)},{fmt(r.err_small)}")
    return "\n".join(lines) + "\n"


def weyl_csv(reports: Sequence[WeylReport]) -> str:
    lines = ["n,f_id,kind,empirical,reference,gap"]
    for r in reports:
        lines.append(f"{r.n},{r.fid},{r.kind},{r.empirical_mean!r},"
                     f"{r.reference!r},{r.gap!r}")
    return "\n".join(lines) + "\n"
