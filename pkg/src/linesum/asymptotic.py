"""The headline dense-case estimate and its decomposition.

The estimate of the matrix count B(s,t) is

    binom(mn, L)^(-1) prod_j binom(n, s_j) prod_k binom(m, t_k)
        * exp(-1/2 (1 - R/(2Amn)) (1 - C/(2Amn)))

with L = lambda*m*n = sum(s), evaluated entirely in log space via exact
log-gamma.  It decomposes as N * P1 * P2 * E:

    N  = binom(mn, L)                  matrices with L ones
    P1 = N^(-1) prod binom(n, s_j)     probability of row sums s
    P2 = N^(-1) prod binom(m, t_k)     probability of column sums t
    E  = exp(...)                      measure of non-independence

The vanishing error term of the underlying theorem is dropped; it is
existential, so no finite-instance error bar is available and accuracy is
tested by trends, not absolute tolerances.  The estimate is returned even
when the applicability diagnostics fail (with a warning flag): empirically
the formula is accurate well beyond its proven range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import MarginPair, check_applicability, compute_stats
from .errors import DegenerateDensity, DomainError
from .saddle import _logbinom


@dataclass(frozen=True)
class LogEstimate:
    """Log-space estimate with its N*P1*P2*E decomposition."""

    log_value: float
    log_N: float
    log_P1: float
    log_P2: float
    log_E: float
    E_exponent: float
    applicability_pass: bool

    def components(self):
        return {
            "log_value": self.log_value,
            "log_N": self.log_N,
            "log_P1": self.log_P1,
            "log_P2": self.log_P2,
            "log_E": self.log_E,
            "E_exponent": self.E_exponent,
        }


def estimate_log_count(mp: MarginPair, a=0.3, eps=0.1) -> LogEstimate:
    """Evaluate the dense-case estimate of log B(s,t).

    a, eps parameterize the applicability diagnostic only; the estimate
    itself does not depend on them.
    """
    stats = compute_stats(mp)
    if stats.lam in (0, 1):
        raise DegenerateDensity(f"lambda={stats.lam} is degenerate")
    m, n = mp.m, mp.n
    A = float(stats.A)
    R = float(stats.R)
    C = float(stats.C)
    log_N = _logbinom(m * n, mp.total)
    log_P1 = sum(_logbinom(n, sj) for sj in mp.s) - log_N
    log_P2 = sum(_logbinom(m, tk) for tk in mp.t) - log_N
    E_exponent = -0.5 * (1.0 - R / (2.0 * A * m * n)) * (1.0 - C / (2.0 * A * m * n))
    report = check_applicability(stats, mp, a=a, eps=eps)
    return LogEstimate(
        log_value=log_N + log_P1 + log_P2 + E_exponent,
        log_N=log_N,
        log_P1=log_P1,
        log_P2=log_P2,
        log_E=E_exponent,
        E_exponent=E_exponent,
        applicability_pass=report.passes,
    )


def stirling_binom(N: int, x: float, d: float) -> float:
    """Stirling-type expansion of log binom(N, (x+d)N).

    Includes all displayed correction terms through fourth order in d,
    with X = x(1-x)/2; the remainder (of order d^5 N/X^4 + d/(X^2 N)
    + 1/(X^3 N^3)) is dropped.  Exists to validate the expansion against
    exact log-gamma, not as a production path.
    """
    if not (0.0 < x < 1.0) or not (0.0 < x + d < 1.0):
        raise DomainError("need 0 < x < 1 and 0 < x+d < 1")
    if N <= 0:
        raise DomainError("N must be a positive integer")
    X = 0.5 * x * (1.0 - x)
    main = (
        -N * ((x + d) * math.log(x) + (1.0 - x - d) * math.log(1.0 - x))
        - math.log(2.0)
        - 0.5 * math.log(math.pi * X * N)
    )
    corr = (
        -(1.0 - 2.0 * X) / (24.0 * X * N)
        - d * d * N / (4.0 * X)
        - (1.0 - 2.0 * x) * d / (4.0 * X)
        + (1.0 - 4.0 * X) * d * d / (16.0 * X * X)
        + (1.0 - 2.0 * x) * d**3 * N / (24.0 * X * X)
        - (1.0 - 6.0 * X) * d**4 * N / (96.0 * X**3)
    )
    return main + corr
