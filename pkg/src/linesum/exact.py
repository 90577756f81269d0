"""Exact counting of 0-1 matrices with prescribed line sums.

Two independent routes:

* ``exact_count`` -- column-by-column dynamic programming over canonical
  residual states, with arbitrary-precision integers.  The state after
  placing some columns is (index of next column, multiset of residual row
  sums); completion counts depend only on that, so residuals are kept in
  sorted (descending) order and memoized.

* ``exact_count_bruteforce`` -- enumeration of all 2^(mn) matrices, used as
  the ground-truth oracle in tests.  The hot loop lives in the compiled
  kernel when available.

Feasibility is the classical majorization criterion: with t sorted in
descending order, sum_{k<=l} t_k <= sum_j min(s_j, l) for every l, together
with equal totals (the latter is a MarginPair invariant).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from . import _kernels
from .core import MarginPair
from .errors import ResourceLimit

DEFAULT_STATE_CAP = 10**8
BRUTEFORCE_CELL_CAP = 25


@dataclass(frozen=True)
class ExactCount:
    """An exact matrix count plus a DP size diagnostic."""

    value: int
    states_visited: int


def _gale_ryser(s, t):
    """Majorization check on raw vectors (totals assumed equal)."""
    t_desc = sorted(t, reverse=True)
    prefix = 0
    for ell in range(1, len(t_desc) + 1):
        prefix += t_desc[ell - 1]
        if prefix > sum(min(v, ell) for v in s):
            return False
    return True


def gale_ryser_feasible(mp: MarginPair) -> bool:
    """True iff at least one 0-1 matrix has the prescribed line sums."""
    return _gale_ryser(mp.s, mp.t)


def _class_choices(classes, budget):
    """Yield (coefficient, chosen_counts) for all admissible selections.

    classes is a list of (residual_value, multiplicity) with value > 0,
    sorted by descending value.  A selection picks c_v rows from each class
    with sum(c_v) == budget; its combinatorial weight is prod binom(n_v, c_v).
    """
    out = []

    def rec(idx, remaining, coeff, counts):
        if remaining == 0:
            out.append((coeff, counts + (0,) * (len(classes) - idx)))
            return
        if idx == len(classes):
            return
        # capacity pruning: can the remaining classes still absorb the budget?
        capacity = sum(mult for _, mult in classes[idx:])
        if capacity < remaining:
            return
        _, mult = classes[idx]
        for c in range(min(mult, remaining) + 1):
            rec(idx + 1, remaining - c, coeff * comb(mult, c), counts + (c,))

    rec(0, budget, 1, ())
    return out


def exact_count(mp: MarginPair, column_order="descending",
                state_cap=DEFAULT_STATE_CAP, memo=None) -> ExactCount:
    """Count matrices exactly by dynamic programming over residual states.

    column_order selects the processing order of the columns: "descending"
    (default; prunes infeasible branches earliest), "ascending", or "given".
    A shared memo dict may be passed in; entries are value-deterministic, so
    concurrent reuse is benign.  Raises ResourceLimit when the number of
    distinct states exceeds state_cap.
    """
    if column_order == "descending":
        cols = sorted(mp.t, reverse=True)
    elif column_order == "ascending":
        cols = sorted(mp.t)
    elif column_order == "given":
        cols = list(mp.t)
    else:
        raise ValueError(f"unknown column_order {column_order!r}")

    if memo is None:
        memo = {}
    n = len(cols)
    visited = 0

    def solve(idx, residuals):
        nonlocal visited
        if idx == n:
            return 1 if not residuals or residuals[0] == 0 else 0
        key = (idx, residuals)
        cached = memo.get(key)
        if cached is not None:
            return cached
        visited += 1
        if visited > state_cap:
            raise ResourceLimit(f"DP state cap {state_cap} exceeded")

        remaining_cols = cols[idx:]
        # early infeasibility pruning on the residual instance
        if residuals and residuals[0] > n - idx:
            memo[key] = 0
            return 0
        if not _gale_ryser(residuals, remaining_cols):
            memo[key] = 0
            return 0

        tk = cols[idx]
        # group rows by residual value; only positive residuals are choosable
        classes = []
        zeros = 0
        i = 0
        while i < len(residuals):
            v = residuals[i]
            j = i
            while j < len(residuals) and residuals[j] == v:
                j += 1
            if v > 0:
                classes.append((v, j - i))
            else:
                zeros += j - i
            i = j

        total = 0
        for coeff, counts in _class_choices(classes, tk):
            new_res = []
            for (v, mult), c in zip(classes, counts):
                new_res.extend([v] * (mult - c))
                new_res.extend([v - 1] * c)
            new_res.extend([0] * zeros)
            new_res.sort(reverse=True)
            total += coeff * solve(idx + 1, tuple(new_res))
        memo[key] = total
        return total

    value = solve(0, tuple(sorted(mp.s, reverse=True)))
    return ExactCount(value=value, states_visited=visited)


def exact_count_bruteforce(mp: MarginPair, chunk_bits=20) -> ExactCount:
    """Count by enumerating all 2^(mn) matrices and filtering on line sums.

    Only valid for m*n <= 25; used as the independent oracle for
    exact_count.  Matrices are encoded as mn-bit integers, row-major
    (bit j*n+k is entry (j,k)).
    """
    m, n = mp.m, mp.n
    cells = m * n
    if cells > BRUTEFORCE_CELL_CAP:
        raise ResourceLimit(f"m*n={cells} exceeds brute-force cap {BRUTEFORCE_CELL_CAP}")
    total = 1 << cells
    chunk = 1 << min(chunk_bits, cells)
    count = 0
    for lo in range(0, total, chunk):
        count += _kernels.bruteforce_count_range(lo, min(lo + chunk, total), m, n, mp.s, mp.t)
    return ExactCount(value=count, states_visited=total)


def random_feasible_margins(rng, m, n, density=0.5, strict=False):
    """Sample a realizable MarginPair by generating a random 0-1 matrix.

    With strict=True, rejection-sample until 0 < s_j < n and 0 < t_k < m
    for all j, k (needed by the saddle-point modules).
    """
    while True:
        mat = (rng.random((m, n)) < density).astype(int)
        s = tuple(int(v) for v in mat.sum(axis=1))
        t = tuple(int(v) for v in mat.sum(axis=0))
        if strict and (min(s) == 0 or max(s) == n or min(t) == 0 or max(t) == m):
            continue
        return MarginPair(s, t)
