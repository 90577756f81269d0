import math

import numpy as np
import pytest

from linesum import (
    MarginPair,
    exact_count,
    fbnd_check,
    ibnd_check,
    integrand_F,
    integrate_I,
    log_prefactor,
    solve_saddle,
    verify_identity,
)
from linesum.errors import DomainError, ResourceLimit


@pytest.fixture(scope="module")
def sol_2x3():
    mp = MarginPair((2, 1), (1, 1, 1))
    return mp, solve_saddle(mp)


class TestIntegrand:
    def test_zero_angles(self, sol_2x3):
        _, sol = sol_2x3
        assert integrand_F(np.zeros(2), np.zeros(3), sol) == pytest.approx(1.0)

    def test_modulus_bounded(self, sol_2x3):
        _, sol = sol_2x3
        rng = np.random.default_rng(0)
        for _ in range(200):
            theta = rng.uniform(-math.pi, math.pi, 2)
            phi = rng.uniform(-math.pi, math.pi, 3)
            assert abs(integrand_F(theta, phi, sol)) <= 1.0 + 1e-12

    def test_conjugate_symmetry(self, sol_2x3):
        _, sol = sol_2x3
        rng = np.random.default_rng(1)
        theta = rng.uniform(-math.pi, math.pi, 2)
        phi = rng.uniform(-math.pi, math.pi, 3)
        f = integrand_F(theta, phi, sol)
        g = integrand_F(-theta, -phi, sol)
        assert g == pytest.approx(f.conjugate(), abs=1e-12)


class TestTrapezoid:
    def test_2x2_identity(self):
        mp = MarginPair((1, 1), (1, 1))
        sol = solve_saddle(mp)
        est = integrate_I(mp, sol, resolution=64)
        PI = math.exp(log_prefactor(sol, mp)) * est.value.real
        assert abs(PI - 2) / 2 < 1e-8

    def test_2x3_identity(self, sol_2x3):
        mp, sol = sol_2x3
        est = integrate_I(mp, sol, resolution=48)
        PI = math.exp(log_prefactor(sol, mp)) * est.value.real
        assert abs(PI - 3) / 3 < 1e-6

    def test_imaginary_below_error(self, sol_2x3):
        mp, sol = sol_2x3
        est = integrate_I(mp, sol, resolution=48)
        assert abs(est.value.imag) <= max(est.error_estimate, 1e-12)

    def test_resolution_self_consistency(self, sol_2x3):
        mp, sol = sol_2x3
        est = integrate_I(mp, sol, resolution=32)
        est2 = integrate_I(mp, sol, resolution=64)
        assert abs(est2.value - est.value) <= est.error_estimate + 1e-12

    def test_dimension_cap(self):
        mp = MarginPair((2, 2, 2, 1), (2, 2, 2, 1))
        sol = solve_saddle(mp)
        with pytest.raises(DomainError):
            integrate_I(mp, sol, method="trapezoid")

    def test_work_cap(self, sol_2x3):
        mp, sol = sol_2x3
        with pytest.raises(ResourceLimit):
            integrate_I(mp, sol, resolution=10**4)

    def test_unknown_method(self, sol_2x3):
        mp, sol = sol_2x3
        with pytest.raises(ValueError):
            integrate_I(mp, sol, method="simpson")


class TestMonteCarlo:
    def test_matches_exact_within_3sigma(self):
        mp = MarginPair((2, 2, 1), (2, 2, 1))
        sol = solve_saddle(mp)
        P = math.exp(log_prefactor(sol, mp))
        est = integrate_I(mp, sol, method="monte_carlo", samples=200_000, seed=7)
        assert abs(P * est.value.real - 5) <= P * est.error_estimate

    def test_thread_count_invariance(self):
        mp = MarginPair((2, 1, 1), (2, 1, 1))
        sol = solve_saddle(mp)
        one = integrate_I(mp, sol, method="monte_carlo", samples=300_000, seed=3, threads=1)
        eight = integrate_I(mp, sol, method="monte_carlo", samples=300_000, seed=3, threads=8)
        assert one.value == eight.value
        assert one.error_estimate == eight.error_estimate

    def test_disjoint_seeds_agree(self):
        mp = MarginPair((2, 1, 1), (2, 1, 1))
        sol = solve_saddle(mp)
        P = math.exp(log_prefactor(sol, mp))
        a = integrate_I(mp, sol, method="monte_carlo", samples=200_000, seed=10)
        b = integrate_I(mp, sol, method="monte_carlo", samples=200_000, seed=11)
        combined = P * (a.error_estimate + b.error_estimate)
        assert abs(P * a.value.real - P * b.value.real) <= combined


class TestVerifyIdentity:
    def test_forced_margins(self):
        for s, t in [((2, 1), (2, 1)), ((2, 0), (1, 1)), ((3, 1), (1, 1, 2))]:
            mp = MarginPair(s, t)
            res = verify_identity(mp, resolution=48)
            exact = exact_count(mp).value
            assert res["PI"] == pytest.approx(exact, rel=1e-10)

    def test_partial_reduction(self):
        mp = MarginPair((2, 2), (2, 1, 1))
        res = verify_identity(mp, resolution=64)
        assert res["PI"] == pytest.approx(2.0, rel=1e-8)


class TestBounds:
    def test_fbnd_on_frozen_solution(self):
        mp = MarginPair((4, 4, 3, 3, 2, 2), (4, 4, 3, 3, 2, 2))
        sol = solve_saddle(mp)
        rng = np.random.default_rng(9)
        z = rng.uniform(-math.pi, math.pi, 10_000)
        assert fbnd_check(sol, z)

    def test_fbnd_boundary_points(self, sol_2x3):
        _, sol = sol_2x3
        assert fbnd_check(sol, np.array([0.0, math.pi, -math.pi]))

    @pytest.mark.parametrize("c", [0.1, 1.0, 10.0, 100.0, 1e4])
    def test_ibnd(self, c):
        assert ibnd_check([c])

    def test_ibnd_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            ibnd_check([0.0])
