"""Saddle-point location and the prefactor P(s,t).

The saddle point is the set of contour radii (q_j, r_k) for which the
log-integrand has no linear term, i.e. the matrix lambda_jk =
q_j r_k/(1 + q_j r_k) reproduces the margins: row sums s_j, column sums t_k.
The system is solved in the gauge-fixed variables (a_j, b_k),

    q_j = r (1+a_j)/(1 - r^2 a_j),   r_k = r (1+b_k)/(1 - r^2 b_k),
    r = sqrt(lambda/(1-lambda)),

by fixed-point iteration from a = b = 0:

    a_j <- (s_j - sbar)/(lambda n) - Zrow_j/n + Ztot/(2mn)
    b_k <- (t_k - tbar)/(lambda m) - Zcol_k/m + Ztot/(2mn)

with the exact coupling term

    Z_jk = a_j b_k (1 - r^2 - r^2 a_j - r^2 b_k) / (1 + r^2 a_j b_k).

The iteration uses the exact Z_jk, not its polynomial expansion: the
expansion exists for analysis, while the exact form converges on all
desk-scale instances and avoids a truncation choice.  The Ztot/(2mn) term
steers the iterate toward the gauge n*sum(a) = m*sum(b); for finite
instances the gauge holds only approximately and the defect is reported,
not re-normalized.

The prefactor is P = (2pi)^(-(m+n)) / Lambda with
Lambda = prod_jk lambda_jk^lambda_jk (1-lambda_jk)^(1-lambda_jk); the
entropy form and the product identity

    log P = -(m+n) log 2pi + sum log(1+q_j r_k)
            - sum s_j log q_j - sum t_k log r_k

must agree on a true saddle, which log_prefactor asserts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MarginPair, MarginStats, compute_stats
from .errors import (
    DegenerateDensity,
    IdentityViolation,
    NonConvergence,
    NumericalBlowup,
    OutOfRange,
)

DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 200
DENOM_FLOOR = 1e-9


@dataclass(frozen=True)
class SaddleSolution:
    """Converged saddle-point data for one instance."""

    a: np.ndarray          # (m,)
    b: np.ndarray          # (n,)
    r: float
    q: np.ndarray          # (m,) radii for the rows
    rr: np.ndarray         # (n,) radii for the columns
    lambda_jk: np.ndarray  # (m, n), entries in (0,1)
    A_jk: np.ndarray       # lambda_jk(1-lambda_jk)/2
    alpha_jk: np.ndarray   # A_jk - A
    beta_jk: np.ndarray    # lambda_jk(1-lam)(1-2lam)/6 - A3
    gamma_jk: np.ndarray   # lambda_jk(1-lam)(1-6lam+6lam^2)/24 - A4
    iterations: int
    residual: float        # max-norm defect of the margin equations
    gauge_defect: float    # |n sum(a) - m sum(b)|
    damped: bool

    @property
    def m(self):
        return self.a.shape[0]

    @property
    def n(self):
        return self.b.shape[0]


def _coupling(a, b, r2):
    """Exact Z_jk matrix; raises NumericalBlowup near the denominator zero."""
    outer = a[:, None] * b[None, :]
    denom = 1.0 + r2 * outer
    if np.any(np.abs(denom) < DENOM_FLOOR):
        raise NumericalBlowup("1 + r^2 a_j b_k too close to zero")
    return outer * (1.0 - r2 - r2 * a[:, None] - r2 * b[None, :]) / denom


def _lambda_matrix(a, b, r, r2):
    q = r * (1.0 + a) / (1.0 - r2 * a)
    rr = r * (1.0 + b) / (1.0 - r2 * b)
    qr = q[:, None] * rr[None, :]
    lam_jk = qr / (1.0 + qr)
    return q, rr, lam_jk


def solve_saddle(mp: MarginPair, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER) -> SaddleSolution:
    """Solve the margin equations by fixed-point iteration.

    Requires strict margins (0 < s_j < n, 0 < t_k < m) so that every
    lambda_jk can lie in (0,1).  Stops when the max-norm change of (a, b)
    drops below tol; on exhaustion, retries once with step damping 1/2
    before raising NonConvergence.  The returned residual is the physical
    defect of the margin equations (iterate stagnation is not equation
    satisfaction).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, n = mp.m, mp.n
    if any(v <= 0 or v >= n for v in mp.s) or any(v <= 0 or v >= m for v in mp.t):
        raise OutOfRange("solve_saddle requires 0 < s_j < n and 0 < t_k < m")
    stats = compute_stats(mp)
    lam = float(stats.lam)
    r = math.sqrt(lam / (1.0 - lam))
    r2 = r * r
    s = np.asarray(mp.s, dtype=float)
    t = np.asarray(mp.t, dtype=float)
    drive_a = (s - float(stats.sbar)) / (lam * n)
    drive_b = (t - float(stats.tbar)) / (lam * m)

    def iterate(damping):
        a = np.zeros(m)
        b = np.zeros(n)
        for it in range(1, max_iter + 1):
            Z = _coupling(a, b, r2)
            ztot = Z.sum()
            a_new = drive_a - Z.sum(axis=1) / n + ztot / (2 * m * n)
            b_new = drive_b - Z.sum(axis=0) / m + ztot / (2 * m * n)
            if damping != 1.0:
                a_new = a + damping * (a_new - a)
                b_new = b + damping * (b_new - b)
            delta = max(np.abs(a_new - a).max(), np.abs(b_new - b).max())
            a, b = a_new, b_new
            if delta < tol:
                return a, b, it
        return None

    damped = False
    result = iterate(1.0)
    if result is None:
        damped = True
        result = iterate(0.5)
    if result is None:
        raise NonConvergence(
            f"no convergence within {max_iter} iterations (plain and damped)",
            iterations=max_iter,
        )
    a, b, iterations = result

    q, rr, lam_jk = _lambda_matrix(a, b, r, r2)
    if np.any(lam_jk <= 0.0) or np.any(lam_jk >= 1.0):
        raise NumericalBlowup("lambda_jk left the interval (0,1)")
    residual = max(
        np.abs(lam_jk.sum(axis=1) - s).max(),
        np.abs(lam_jk.sum(axis=0) - t).max(),
    )
    A = lam * (1.0 - lam) / 2.0
    A3 = lam * (1.0 - lam) * (1.0 - 2.0 * lam) / 6.0
    A4 = lam * (1.0 - lam) * (1.0 - 6.0 * lam + 6.0 * lam * lam) / 24.0
    A_jk = lam_jk * (1.0 - lam_jk) / 2.0
    beta = lam_jk * (1.0 - lam_jk) * (1.0 - 2.0 * lam_jk) / 6.0 - A3
    gamma = lam_jk * (1.0 - lam_jk) * (1.0 - 6.0 * lam_jk + 6.0 * lam_jk**2) / 24.0 - A4
    return SaddleSolution(
        a=a, b=b, r=r, q=q, rr=rr, lambda_jk=lam_jk,
        A_jk=A_jk, alpha_jk=A_jk - A, beta_jk=beta, gamma_jk=gamma,
        iterations=iterations, residual=float(residual),
        gauge_defect=float(abs(n * a.sum() - m * b.sum())),
        damped=damped,
    )


def third_iterate_approx(stats: MarginStats, mp: MarginPair):
    """Closed-form third iterate (a3, b3) of the saddle iteration.

    Four explicit terms each; the remainder of order n^(-5/2) (up to
    polylogarithmic factors) is dropped.
    """
    lam = float(stats.lam)
    if lam in (0.0, 1.0):
        raise DegenerateDensity("third iterate needs 0 < lambda < 1")
    m, n = stats.m, stats.n
    R = float(stats.R)
    C = float(stats.C)
    one_m = 1.0 - lam
    ds = np.asarray(mp.s, dtype=float) - float(stats.sbar)
    dt = np.asarray(mp.t, dtype=float) - float(stats.tbar)
    a3 = (
        ds / (lam * n)
        + ds * C / (lam**2 * one_m * m**2 * n**2)
        + (1.0 - 2.0 * lam) * ds**2 * C / (lam**3 * one_m**2 * m**2 * n**3)
        - (1.0 - 2.0 * lam) * R * C / (2.0 * lam**3 * one_m**2 * m**3 * n**3)
    )
    b3 = (
        dt / (lam * m)
        + dt * R / (lam**2 * one_m * m**2 * n**2)
        + (1.0 - 2.0 * lam) * dt**2 * R / (lam**3 * one_m**2 * m**3 * n**2)
        - (1.0 - 2.0 * lam) * R * C / (2.0 * lam**3 * one_m**2 * m**3 * n**3)
    )
    return a3, b3


def log_prefactor(sol: SaddleSolution, mp: MarginPair, rel_tol=1e-8) -> float:
    """log P(s,t) computed two independent ways, asserted to agree.

    (i) entropy form over lambda_jk; (ii) the product identity in terms of
    the radii.  Disagreement beyond rel_tol signals a bad saddle solution
    and raises IdentityViolation.
    """
    m, n = sol.m, sol.n
    lam_jk = sol.lambda_jk
    base = -(m + n) * math.log(2.0 * math.pi)
    entropy = float(np.sum(lam_jk * np.log(lam_jk) + (1.0 - lam_jk) * np.log1p(-lam_jk)))
    form_i = base - entropy
    s = np.asarray(mp.s, dtype=float)
    t = np.asarray(mp.t, dtype=float)
    qr = sol.q[:, None] * sol.rr[None, :]
    form_ii = (
        base
        + float(np.sum(np.log1p(qr)))
        - float(s @ np.log(sol.q))
        - float(t @ np.log(sol.rr))
    )
    scale = max(abs(form_i), abs(form_ii), 1.0)
    if abs(form_i - form_ii) > rel_tol * scale:
        raise IdentityViolation(
            f"prefactor forms disagree: {form_i!r} vs {form_ii!r}"
        )
    return form_i


def _logbinom(N, K):
    return math.lgamma(N + 1) - math.lgamma(K + 1) - math.lgamma(N - K + 1)


def log_prefactor_approx(stats: MarginStats, mp: MarginPair) -> float:
    """Binomial-coefficient approximation of log P(s,t).

    Drops the n^(-1/2) (polylog-adjusted) remainder.  All binomials are
    evaluated by exact log-gamma; lambda*m*n is always the integer total
    sum(s), so no non-integral interpolation ever occurs in practice.
    """
    lam = float(stats.lam)
    if lam in (0.0, 1.0):
        raise DegenerateDensity("prefactor approximation needs 0 < lambda < 1")
    m, n = stats.m, stats.n
    A = float(stats.A)
    R = float(stats.R)
    C = float(stats.C)
    total = mp.total
    head = (
        0.5 * (m + n - 1) * math.log(A)
        + 0.5 * (n - 1) * math.log(m)
        + 0.5 * (m - 1) * math.log(n)
        - math.log(2.0)
        - 0.5 * (m + n + 1) * math.log(math.pi)
    )
    binoms = (
        -_logbinom(m * n, total)
        + sum(_logbinom(n, sj) for sj in mp.s)
        + sum(_logbinom(m, tk) for tk in mp.t)
    )
    return (
        head
        + binoms
        + (1.0 - 2.0 * A) / (24.0 * A) * (m / n + n / m)
        - R * C / (8.0 * A**2 * m**2 * n**2)
        - (1.0 - 4.0 * A) / (16.0 * A**2) * (R / n**2 + C / m**2)
    )
