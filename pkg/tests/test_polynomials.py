import cmath
import math

import numpy as np
import pytest

from levelcurves.polynomials import (
    ComplexPoly,
    atypicality_degree,
    critical_spectrum,
    derivative,
    eval_poly,
    from_critical_points,
    match_unordered,
    roots,
    solve_theta_fiber,
    theta,
)

Z5_MINUS_1 = ComplexPoly((-1, 0, 0, 0, 0, 1))
Z2_MINUS_2Z = ComplexPoly((0, -2, 1))


class TestEval:
    def test_constant_term(self):
        assert eval_poly(Z5_MINUS_1, 0) == -1

    def test_direct_algebra(self):
        assert eval_poly(Z2_MINUS_2Z, 1) == -1

    def test_power_modulus(self):
        # |z^n| = eps on the circle of radius eps^(1/n)
        for n in (2, 3, 7):
            p = ComplexPoly((0,) * n + (1,))
            eps = 0.37
            z = eps ** (1.0 / n) * cmath.exp(0.8j)
            assert abs(abs(eval_poly(p, z)) - eps) < 1e-12


class TestDerivative:
    def test_basic(self):
        assert derivative(Z5_MINUS_1).coeffs == (0j, 0j, 0j, 0j, 5 + 0j)
        assert derivative(Z2_MINUS_2Z).coeffs == (-2 + 0j, 2 + 0j)

    def test_constant(self):
        assert derivative(ComplexPoly((7,))).coeffs == (0j,)


class TestRoots:
    def test_simple(self):
        rs = sorted(roots(Z2_MINUS_2Z), key=lambda rm: rm[0].real)
        assert [(complex(z), m) for z, m in rs] == [(0j, 1), (2 + 0j, 1)]

    def test_multiple(self):
        rs = roots(ComplexPoly((0, 0, 0, 0, 5)))
        assert len(rs) == 1 and rs[0][1] == 4 and abs(rs[0][0]) < 1e-8

    def test_pure_imaginary_pair(self):
        rs = roots(ComplexPoly((9 / 25, 0, 1)))
        locs = sorted(z.imag for z, _ in rs)
        assert abs(locs[0] + 0.6) < 1e-12 and abs(locs[1] - 0.6) < 1e-12

    def test_round_trip_random(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            u = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
            p = from_critical_points(u)
            crit = roots(derivative(p))
            flat = []
            for z, m in crit:
                flat.extend([z] * m)
            assert match_unordered(tuple(flat), tuple(u)) < 1e-7


class TestFromCriticalPoints:
    def test_all_zero(self):
        p = from_critical_points([0, 0, 0])
        assert p.coeffs == (0j, 0j, 0j, 0j, 1 + 0j)

    def test_single(self):
        assert from_critical_points([1]).coeffs == (0j, -2 + 0j, 1 + 0j)

    def test_pair(self):
        assert from_critical_points([-1, 1]).coeffs == (0j, -3 + 0j, 0j, 1 + 0j)

    def test_monic_vanishing_at_zero(self):
        rng = np.random.default_rng(1)
        u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        p = from_critical_points(u)
        assert p.coeffs[0] == 0
        assert abs(p.coeffs[-1] - 1) < 1e-14

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            from_critical_points([])


class TestTheta:
    def test_single(self):
        assert theta([1]) == (-1 + 0j,)

    def test_double_zero(self):
        assert theta([0, 0]) == (0j, 0j)

    def test_symmetric_pair(self):
        assert theta([-1, 1]) == (2 + 0j, -2 + 0j)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(2)
        u = list(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        v = theta(u)
        perm = [2, 0, 3, 1]
        v2 = theta([u[i] for i in perm])
        assert all(abs(v2[j] - v[perm[j]]) < 1e-12 for j in range(4))


class TestCriticalSpectrum:
    def test_quintic(self):
        spec = critical_spectrum(Z5_MINUS_1)
        assert spec.points == ((0j, 4),)
        assert spec.values == (-1 + 0j,) * 4

    def test_quadratic(self):
        spec = critical_spectrum(Z2_MINUS_2Z)
        assert spec.points[0][0] == 1 and spec.points[0][1] == 1
        assert spec.values == (-1 + 0j,)

    def test_tied_moduli_detected(self):
        spec = critical_spectrum(ComplexPoly((0, -3, 0, 1)))   # z^3 - 3z
        mods = [abs(v) for v in spec.values]
        assert abs(mods[0] - 2) < 1e-10 and abs(mods[1] - 2) < 1e-10
        assert atypicality_degree(spec.values) == 2


class TestAtypicality:
    def test_distinct(self):
        assert atypicality_degree([0.3, 0.5j, -0.9]) == 0

    def test_zero_first(self):
        assert atypicality_degree([0, 0.5, 0.9]) == 1

    def test_tie(self):
        assert atypicality_degree([0.2, 0.5, -0.5, 0.9]) == 3

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            atypicality_degree([0.9, 0.5])

    def test_all_zero(self):
        assert atypicality_degree([0, 0, 0]) == 3


class TestFiber:
    def test_degree_two(self):
        result = solve_theta_fiber([-1], n_starts=40, seed=0)
        found = sorted(round(u[0].real, 8) + 1j * round(u[0].imag, 8) for u in result.solutions)
        assert found == [-1, 1]

    def test_residuals(self):
        rng = np.random.default_rng(3)
        v = [0.2 * cmath.exp(0.3j), 0.7 * cmath.exp(2.1j)]
        result = solve_theta_fiber(v, n_starts=60, seed=1)
        assert result.solutions
        for u in result.solutions:
            w = theta(u)
            assert match_unordered(w, tuple(v)) < 1e-10

    def test_empty_never_fabricated(self):
        # no start converges with a zero budget
        result = solve_theta_fiber([0.5], n_starts=0, seed=0)
        assert result.solutions == []
        assert result.n_starts == 0
