"""Acceptance gate: one test per criterion, each emitting a pass/fail line.

The status lines are collected in conftest.ACCEPTANCE_LINES and printed in
the terminal summary, where pytest's output capture cannot swallow them.
"""

import math
import time

import numpy as np
import pytest

from linesum import (
    MarginPair,
    compute_stats,
    estimate_log_count,
    exact_count,
    exact_count_bruteforce,
    fbnd_check,
    ibnd_check,
    integrate_I,
    log_prefactor,
    solve_saddle,
    stirling_binom,
    third_iterate_approx,
    verify_identity,
)
from linesum.cli import main as cli_main
from linesum.exact import random_feasible_margins
from linesum.moments import MomentCoefficients, integrate_f_direct, mw3_estimate

FROZEN_5X5_COUNT = 2040  # one-time brute-force oracle, re-derived in criterion 2


def report(criterion, passed, detail=""):
    from conftest import ACCEPTANCE_LINES

    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(
        f"criterion {criterion:02d}: {status} {detail}".rstrip()
    )
    assert passed, f"criterion {criterion}: {detail}"


def random_margin_pair(rng, max_dim=5):
    """Random equal-total margins, mixed feasible/infeasible."""
    m = int(rng.integers(1, max_dim + 1))
    n = int(rng.integers(1, max_dim + 1))
    while True:
        s = tuple(int(v) for v in rng.integers(0, n + 1, m))
        t = tuple(int(v) for v in rng.integers(0, m + 1, n))
        if sum(s) == sum(t):
            return MarginPair(s, t)


def test_criterion_01_oracle_equivalence():
    rng = np.random.default_rng(20240901)
    start = time.monotonic()
    checked = 0
    ok = True
    for _ in range(500):
        mp = random_margin_pair(rng)
        if exact_count(mp).value != exact_count_bruteforce(mp).value:
            ok = False
            break
        checked += 1
    elapsed = time.monotonic() - start
    report(1, ok and elapsed < 60,
           f"({checked}/500 instances agree, {elapsed:.1f}s)")


def test_criterion_02_known_values():
    start = time.monotonic()
    v4 = exact_count(MarginPair((2,) * 4, (2,) * 4)).value
    oracle = exact_count_bruteforce(MarginPair((2,) * 5, (2,) * 5)).value
    v5 = exact_count(MarginPair((2,) * 5, (2,) * 5)).value
    elapsed = time.monotonic() - start
    ok = v4 == 90 and v5 == oracle == FROZEN_5X5_COUNT and elapsed < 120
    report(2, ok, f"(4x4={v4}, 5x5={v5}, oracle={oracle}, {elapsed:.1f}s)")


def test_criterion_03_identity():
    start = time.monotonic()
    shapes = {
        (2, 2): [((1, 1), (1, 1)), ((2, 1), (2, 1)), ((1, 2), (2, 1)),
                 ((2, 0), (1, 1))],
        (2, 3): [((2, 1), (1, 1, 1)), ((1, 2), (1, 1, 1)),
                 ((2, 2), (2, 1, 1)), ((2, 2), (1, 2, 1))],
    }
    worst = 0.0
    for choices in shapes.values():
        for s, t in choices:
            mp = MarginPair(s, t)
            exact = exact_count(mp).value
            res = verify_identity(mp, method="trapezoid", resolution=48)
            worst = max(worst, abs(res["PI"] - exact) / exact)
    trap_ok = worst < 1e-6

    mp3 = MarginPair((2, 2, 1), (2, 2, 1))
    sol = solve_saddle(mp3)
    P = math.exp(log_prefactor(sol, mp3))
    est = integrate_I(mp3, sol, method="monte_carlo", samples=10**8,
                      seed=20240903, threads=4)
    exact3 = exact_count(mp3).value
    sigma = P * est.error_estimate / 3.0
    mc_ok = (abs(P * est.value.real - exact3) <= 3.0 * sigma
             and sigma / exact3 < 1e-2)
    elapsed = time.monotonic() - start
    report(3, trap_ok and mc_ok and elapsed < 900,
           f"(trapezoid worst rel {worst:.1e}, MC dev "
           f"{abs(P * est.value.real - exact3) / sigma:.2f} sigma, "
           f"sigma/value {sigma / exact3:.1e}, {elapsed:.1f}s)")


def test_criterion_04_saddle_residual():
    rng = np.random.default_rng(20240904)
    start = time.monotonic()
    worst = 0.0
    ok = True
    for _ in range(100):
        m = int(rng.integers(2, 11))
        n = int(rng.integers(2, 11))
        mp = random_feasible_margins(rng, m, n, strict=True)
        sol = solve_saddle(mp)
        worst = max(worst, sol.residual)
        if sol.residual >= 1e-12:
            ok = False
        # raises IdentityViolation unless the two forms agree to 10 digits
        log_prefactor(sol, mp, rel_tol=1e-10)
    elapsed = time.monotonic() - start
    report(4, ok and elapsed < 30,
           f"(worst residual {worst:.1e}, forms agree to 10 digits, {elapsed:.1f}s)")


def test_criterion_05_asymptotic_trend():
    start = time.monotonic()
    errors = []
    bound_ok = True
    for n in (6, 8, 10, 12):
        mp = MarginPair((n // 2,) * n, (n // 2,) * n)
        log_exact = math.log(exact_count(mp).value)
        est = estimate_log_count(mp)
        errors.append(abs(est.log_value - log_exact))
        if log_exact > est.log_N + est.log_P1 + est.log_P2 + 1e-12:
            bound_ok = False
    decreasing = all(a > b for a, b in zip(errors, errors[1:]))
    elapsed = time.monotonic() - start
    report(5, decreasing and bound_ok and elapsed < 60,
           f"(|log err| {['%.4f' % e for e in errors]}, {elapsed:.1f}s)")


def test_criterion_06_third_iterate():
    mp = MarginPair((4, 4, 3, 3, 2, 2), (4, 4, 3, 3, 2, 2))
    sol = solve_saddle(mp)
    a3, b3 = third_iterate_approx(compute_stats(mp), mp)
    gap = max(np.abs(a3 - sol.a).max(), np.abs(b3 - sol.b).max())
    # frozen threshold, calibrated once at this size (measured 3.08e-3)
    report(6, gap < 5e-3, f"(max-norm gap {gap:.2e} < 5e-3)")


def test_criterion_07_mw3():
    start = time.monotonic()

    def coeffs(N, scale, seed):
        r = np.random.default_rng(seed)

        def c(shape):
            return (r.uniform(-1, 1, shape) + 1j * r.uniform(-1, 1, shape)) * scale

        return MomentCoefficients(N=N, Ahat=4.0, a=c((N,)), B=c((N,)),
                                  C=c((N, N)), E=c((N,)), F=c((N, N)),
                                  J=c((N,)), eps_hat=0.05)

    # zero-coefficient case against the closed Gaussian (erf) form
    from scipy.special import erf

    mc0 = MomentCoefficients.zeros(2, Ahat=4.0, eps_hat=0.05)
    L = mc0.half_width
    closed = (math.sqrt(math.pi / 8.0) * erf(math.sqrt(8.0) * L)) ** 2
    est0 = np.exp(mw3_estimate(mc0, tail_correction=True))
    gauss_ok = abs(est0 - closed) / closed < 1e-6

    defect_ok = True
    worst = 0.0
    for N in (1, 2, 3):
        mc = coeffs(N, 1e-2, 700 + N)
        est = np.exp(mw3_estimate(mc, tail_correction=True))
        direct = integrate_f_direct(mc, nodes_per_dim=81)
        defect = abs(est - direct) / abs(est)
        worst = max(worst, defect)
        if defect >= 1e-3:
            defect_ok = False

    scale_defects = []
    for scale in (1e-1, 1e-2, 1e-3):
        mc = coeffs(2, scale, 777)
        est = np.exp(mw3_estimate(mc, tail_correction=True))
        direct = integrate_f_direct(mc, nodes_per_dim=81)
        scale_defects.append(abs(est - direct) / abs(est))
    trend_ok = scale_defects[0] > scale_defects[1] > scale_defects[2]

    elapsed = time.monotonic() - start
    report(7, gauss_ok and defect_ok and trend_ok and elapsed < 600,
           f"(gaussian rel {abs(est0 - closed) / closed:.1e}, worst defect "
           f"{worst:.1e}, scaling {['%.1e' % d for d in scale_defects]}, "
           f"{elapsed:.1f}s)")


def test_criterion_08_bound_lemmas():
    rng = np.random.default_rng(20240908)
    z = rng.uniform(-math.pi, math.pi, 10_000)
    fb_ok = True
    for s, t in [((4, 4, 3, 3, 2, 2), (4, 4, 3, 3, 2, 2)),
                 ((2, 2, 1), (2, 2, 1)), ((1, 1), (1, 1))]:
        sol = solve_saddle(MarginPair(s, t))
        if not fbnd_check(sol, z):
            fb_ok = False
    ib_ok = ibnd_check([0.1, 1.0, 10.0, 100.0, 1e4])
    report(8, fb_ok and ib_ok,
           f"(fbnd on 10^4 z x 3 solutions: {fb_ok}, ibnd: {ib_ok})")


def test_criterion_09_stirling():
    cases = [(100, 0.5, 0.0, 1e-5), (10**4, 0.3, 0.0, 1e-9),
             (10**6, 0.3, 1e-4, 1e-6)]
    ok = True
    gaps = []
    for N, x, d, tol in cases:
        K = (x + d) * N
        exact = math.lgamma(N + 1) - math.lgamma(K + 1) - math.lgamma(N - K + 1)
        gap = abs(stirling_binom(N, x, d) - exact)
        gaps.append(gap)
        if gap >= tol:
            ok = False
    report(9, ok, f"(gaps {['%.1e' % g for g in gaps]})")


def test_criterion_10_cli_determinism(tmp_path, capsys):
    invocations = [
        ["feasible", "--s", "2,1", "--t", "1,1,1", "--seed", "5"],
        ["count-exact", "--s", "2,2,2,2", "--t", "2,2,2,2", "--seed", "5"],
        ["estimate", "--s", "3,3,3,3,3,3", "--t", "3,3,3,3,3,3", "--seed", "5"],
        ["saddle", "--s", "4,4,3,3,2,2", "--t", "4,4,3,3,2,2", "--seed", "5"],
        ["verify-integral", "--s", "2,1,1", "--t", "2,1,1",
         "--method", "monte_carlo", "--samples", "300000", "--seed", "5"],
        ["compare", "--s", "2,2,2,2", "--t", "2,2,2,2", "--seed", "5"],
        ["sweep", "--family", "semiregular", "--lambda", "0.5", "--n", "6,8",
         "--format", "csv", "--seed", "5"],
    ]
    ok = True
    for args in invocations:
        outs = []
        for threads in ("1", "8"):
            for _ in range(2):
                cli_main(args + ["--threads", threads])
                outs.append(capsys.readouterr().out)
        if len(set(outs)) != 1:
            ok = False
            break
    report(10, ok, f"({len(invocations)} commands byte-identical across "
                   "runs and --threads 1 vs 8)")
