import math

import numpy as np
import pytest

from linesum import (
    MarginPair,
    compute_stats,
    log_prefactor,
    log_prefactor_approx,
    solve_saddle,
    third_iterate_approx,
)
from linesum.errors import OutOfRange

FROZEN_6X6 = MarginPair((4, 4, 3, 3, 2, 2), (4, 4, 3, 3, 2, 2))


class TestSolveSaddle:
    def test_semiregular_trivial(self):
        mp = MarginPair((2,) * 4, (2,) * 4)
        sol = solve_saddle(mp)
        np.testing.assert_allclose(sol.a, 0.0, atol=1e-14)
        np.testing.assert_allclose(sol.b, 0.0, atol=1e-14)
        np.testing.assert_allclose(sol.lambda_jk, 0.5, atol=1e-14)
        assert sol.r == pytest.approx(1.0)

    def test_frozen_6x6(self):
        sol = solve_saddle(FROZEN_6X6)
        assert sol.residual < 1e-12
        assert sol.iterations <= 60
        np.testing.assert_allclose(
            sol.lambda_jk.sum(axis=1), FROZEN_6X6.s, rtol=0, atol=1e-12
        )
        np.testing.assert_allclose(
            sol.lambda_jk.sum(axis=0), FROZEN_6X6.t, rtol=0, atol=1e-12
        )

    def test_lambda_interior(self):
        sol = solve_saddle(FROZEN_6X6)
        assert np.all(sol.lambda_jk > 0.0)
        assert np.all(sol.lambda_jk < 1.0)

    def test_transpose_symmetry(self):
        mp = MarginPair((3, 2, 1), (2, 2, 1, 1))
        sol = solve_saddle(mp)
        sol_t = solve_saddle(mp.transpose())
        np.testing.assert_allclose(sol.lambda_jk, sol_t.lambda_jk.T, atol=1e-12)

    def test_rejects_non_strict(self):
        with pytest.raises(OutOfRange):
            solve_saddle(MarginPair((2, 1), (2, 1)))
        with pytest.raises(OutOfRange):
            solve_saddle(MarginPair((1, 0), (1, 0)))

    def test_rad2_identity(self):
        """lambda_jk / lambda = 1 + a_j + b_k + Z_jk on the converged point."""
        sol = solve_saddle(FROZEN_6X6)
        lam = float(compute_stats(FROZEN_6X6).lam)
        r2 = sol.r**2
        outer = sol.a[:, None] * sol.b[None, :]
        Z = (
            outer
            * (1.0 - r2 - r2 * sol.a[:, None] - r2 * sol.b[None, :])
            / (1.0 + r2 * outer)
        )
        rhs = 1.0 + sol.a[:, None] + sol.b[None, :] + Z
        np.testing.assert_allclose(sol.lambda_jk / lam, rhs, rtol=1e-10)

    def test_gauge_defect_small(self):
        sol = solve_saddle(FROZEN_6X6)
        # symmetric margins force n sum(a) = m sum(b) exactly
        assert sol.gauge_defect < 1e-10


class TestThirdIterate:
    def test_semiregular_zero(self):
        mp = MarginPair((3,) * 6, (3,) * 6)
        a3, b3 = third_iterate_approx(compute_stats(mp), mp)
        np.testing.assert_allclose(a3, 0.0, atol=1e-15)
        np.testing.assert_allclose(b3, 0.0, atol=1e-15)

    def test_frozen_threshold(self):
        # threshold calibrated once at this size and frozen
        sol = solve_saddle(FROZEN_6X6)
        a3, b3 = third_iterate_approx(compute_stats(FROZEN_6X6), FROZEN_6X6)
        gap = max(np.abs(a3 - sol.a).max(), np.abs(b3 - sol.b).max())
        assert gap < 5e-3


class TestPrefactor:
    def test_forms_agree_10_digits(self):
        sol = solve_saddle(FROZEN_6X6)
        # raises IdentityViolation if the entropy and product forms differ
        log_prefactor(sol, FROZEN_6X6, rel_tol=1e-10)

    def test_semiregular_closed_form(self):
        # lambda = 1/2 semiregular: Lambda = 2^(-mn)
        n = 4
        mp = MarginPair((2,) * n, (2,) * n)
        sol = solve_saddle(mp)
        expected = -2 * n * math.log(2 * math.pi) + n * n * math.log(2.0)
        assert log_prefactor(sol, mp) == pytest.approx(expected, abs=1e-12)

    def test_approx_close_at_frozen_margin(self):
        sol = solve_saddle(FROZEN_6X6)
        exact = log_prefactor(sol, FROZEN_6X6)
        approx = log_prefactor_approx(compute_stats(FROZEN_6X6), FROZEN_6X6)
        assert abs(exact - approx) < 0.05

    def test_approx_trend_semiregular(self):
        # remainder decays when the margins stay near-regular
        diffs = []
        for n in (6, 12, 24):
            mp = MarginPair((n // 2,) * n, (n // 2,) * n)
            sol = solve_saddle(mp)
            diffs.append(
                abs(log_prefactor(sol, mp) - log_prefactor_approx(compute_stats(mp), mp))
            )
        assert diffs[0] > diffs[1] > diffs[2]
