"""Problem instances and their derived statistics.

An instance is a pair of margin vectors (s, t): s has length m and holds the
prescribed row sums, t has length n and holds the prescribed column sums of an
m x n 0-1 matrix.  All derived scalars are kept as exact rationals
(fractions.Fraction) and converted to floats only by consumers; the downstream
series suffer large cancellation, so we avoid compounding rounding here.

Conventions:
    sbar = (sum s_j)/m,  tbar = (sum t_k)/n
    lambda = sbar/n = tbar/m            (density: fraction of ones)
    A   = lambda(1-lambda)/2
    A3  = lambda(1-lambda)(1-2 lambda)/6
    A4  = lambda(1-lambda)(1-6 lambda+6 lambda^2)/24
    R_l = sum_j (s_j - sbar)^l
    C_l = sum_k (tbar - t_k)^l          (note the flipped sign inside; for
                                         odd l this differs from the row-side
                                         convention, and both are exposed)
    R = R_2, C = C_2
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DegenerateDensity,
    DomainError,
    InvalidInstance,
    MarginMismatch,
    OutOfRange,
)


@dataclass(frozen=True)
class MarginPair:
    """The margin vectors (s, t) of a 0-1 matrix counting problem.

    Invariants (checked at construction): entries are non-negative integers,
    m, n >= 1, s_j <= n, t_k <= m, and sum(s) == sum(t).
    """

    s: tuple
    t: tuple

    def __post_init__(self):
        s = tuple(self.s)
        t = tuple(self.t)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        if len(s) < 1 or len(t) < 1:
            raise InvalidInstance("both margin vectors must be non-empty")
        for name, vec in (("s", s), ("t", t)):
            for v in vec:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise InvalidInstance(f"{name} entries must be integers, got {v!r}")
                if v < 0:
                    raise InvalidInstance(f"{name} entries must be non-negative, got {v}")
        m, n = len(s), len(t)
        if any(v > n for v in s):
            raise OutOfRange(f"row sum exceeds number of columns n={n}")
        if any(v > m for v in t):
            raise OutOfRange(f"column sum exceeds number of rows m={m}")
        if sum(s) != sum(t):
            raise MarginMismatch(f"sum(s)={sum(s)} != sum(t)={sum(t)}")

    @property
    def m(self):
        return len(self.s)

    @property
    def n(self):
        return len(self.t)

    @property
    def total(self):
        """Total number of ones in any matrix with these margins."""
        return sum(self.s)

    def transpose(self):
        return MarginPair(self.t, self.s)

    def to_json_dict(self):
        return {"s": list(self.s), "t": list(self.t)}

    @classmethod
    def from_json_dict(cls, obj):
        """Parse the instance schema {"s": [int...], "t": [int...]}.

        Validation is strict: extra keys are rejected.
        """
        if not isinstance(obj, dict):
            raise InvalidInstance("instance must be a JSON object")
        extra = set(obj) - {"s", "t"}
        if extra:
            raise InvalidInstance(f"unexpected keys in instance: {sorted(extra)}")
        if "s" not in obj or "t" not in obj:
            raise InvalidInstance('instance must have keys "s" and "t"')
        for key in ("s", "t"):
            if not isinstance(obj[key], list):
                raise InvalidInstance(f'"{key}" must be a list of integers')
        return cls(tuple(obj["s"]), tuple(obj["t"]))

    @classmethod
    def from_json(cls, text):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInstance(f"invalid JSON: {exc}") from exc
        return cls.from_json_dict(obj)


def strip_forced(mp: MarginPair):
    """Remove rows and columns whose entries are forced, iteratively.

    A row with s_j = 0 is all zeros and a row with s_j = n is all ones
    (symmetrically for columns); stripping them, and decrementing the
    crossing margins for all-ones lines, leaves a strictly interior core
    with the same matrix count.  Returns the core MarginPair, or None when
    every entry is forced (the instance has at most one matrix).
    """
    s = list(mp.s)
    t = list(mp.t)
    changed = True
    while changed and s and t:
        changed = False
        m, n = len(s), len(t)
        keep_rows = []
        for j, sj in enumerate(s):
            if sj == 0:
                changed = True
            elif sj == n:
                changed = True
                t = [tk - 1 for tk in t]
                if min(t) < 0:
                    raise InvalidInstance("forced all-ones row crosses an empty column")
            else:
                keep_rows.append(j)
        s = [s[j] for j in keep_rows]
        m = len(s)
        keep_cols = []
        for k, tk in enumerate(t):
            if tk == 0:
                changed = True
            elif tk == m:
                changed = True
                s = [sj - 1 for sj in s]
                if min(s) < 0:
                    raise InvalidInstance("forced all-ones column crosses an empty row")
            else:
                keep_cols.append(k)
        t = [t[k] for k in keep_cols]
    if not s or not t:
        return None
    return MarginPair(tuple(s), tuple(t))


@dataclass(frozen=True)
class MarginStats:
    """Exact rational statistics derived from a MarginPair."""

    m: int
    n: int
    sbar: Fraction
    tbar: Fraction
    lam: Fraction
    A: Fraction
    A3: Fraction
    A4: Fraction
    R2: Fraction
    R3: Fraction
    R4: Fraction
    C2: Fraction
    C3: Fraction
    C4: Fraction

    @property
    def R(self):
        return self.R2

    @property
    def C(self):
        return self.C2

    def row_moment(self, ell):
        """sum_j (s_j - sbar)^ell, the row-side convention."""
        return {2: self.R2, 3: self.R3, 4: self.R4}[ell]

    def col_moment(self, ell):
        """sum_k (tbar - t_k)^ell, sign convention as stored."""
        return {2: self.C2, 3: self.C3, 4: self.C4}[ell]

    def col_moment_plain(self, ell):
        """sum_k (t_k - tbar)^ell, i.e. the same convention as row_moment."""
        value = self.col_moment(ell)
        return value if ell % 2 == 0 else -value


def compute_stats(mp: MarginPair) -> MarginStats:
    """Compute all MarginStats fields in exact rational arithmetic."""
    m, n = mp.m, mp.n
    sbar = Fraction(sum(mp.s), m)
    tbar = Fraction(sum(mp.t), n)
    lam = sbar / n  # equals tbar/m because totals agree
    A = lam * (1 - lam) / 2
    A3 = lam * (1 - lam) * (1 - 2 * lam) / 6
    A4 = lam * (1 - lam) * (1 - 6 * lam + 6 * lam * lam) / 24
    R = {ell: sum((Fraction(v) - sbar) ** ell for v in mp.s) for ell in (2, 3, 4)}
    C = {ell: sum((tbar - Fraction(v)) ** ell for v in mp.t) for ell in (2, 3, 4)}
    return MarginStats(
        m=m, n=n, sbar=sbar, tbar=tbar, lam=lam, A=A, A3=A3, A4=A4,
        R2=R[2], R3=R[3], R4=R[4], C2=C[2], C3=C[3], C4=C[4],
    )


@dataclass(frozen=True)
class ApplicabilityReport:
    """Diagnostics for the dense-regime density condition.

    The density condition compares
        (1-2 lambda)^2/(8A) * (1 + 5m/6n + 5n/6m)
    against a*log(n).  The deviation ratios are dimensionless magnitudes
    max_j|s_j-sbar|/n^(1/2+eps) and max_k|t_k-tbar|/m^(1/2+eps); they are
    diagnostic only, since asymptotic hypotheses cannot be verified on a
    single instance.
    """

    lhs: float
    a_log_n: float
    passes: bool
    row_dev_ratio: float
    col_dev_ratio: float
    aspect_mn: float
    aspect_nm: float
    lhs_exact: Fraction = field(repr=False, default=None)


def check_applicability(stats: MarginStats, mp: MarginPair, a: float, eps: float) -> ApplicabilityReport:
    """Evaluate the density condition and deviation diagnostics.

    Raises DegenerateDensity when lambda is 0 or 1.
    """
    if stats.lam in (0, 1):
        raise DegenerateDensity(f"lambda={stats.lam} is degenerate")
    if a <= 0 or eps <= 0:
        raise DomainError("a and eps must be positive")
    m, n = stats.m, stats.n
    lhs_exact = (
        (1 - 2 * stats.lam) ** 2 / (8 * stats.A)
        * (1 + Fraction(5 * m, 6 * n) + Fraction(5 * n, 6 * m))
    )
    a_log_n = a * math.log(n)
    row_dev = max(abs(v - stats.sbar) for v in mp.s)
    col_dev = max(abs(v - stats.tbar) for v in mp.t)
    return ApplicabilityReport(
        lhs=float(lhs_exact),
        a_log_n=a_log_n,
        passes=float(lhs_exact) <= a_log_n,
        row_dev_ratio=float(row_dev) / n ** (0.5 + eps),
        col_dev_ratio=float(col_dev) / m ** (0.5 + eps),
        aspect_mn=m / n,
        aspect_nm=n / m,
        lhs_exact=lhs_exact,
    )
