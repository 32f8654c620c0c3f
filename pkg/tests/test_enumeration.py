import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from levelcurves.configuration import (
    canonical_code,
    critical_values_of,
    validate,
)
from levelcurves.enumeration import count_generic, enumerate_generic, riordan_sum
from levelcurves.polynomials import match_unordered


def random_generic_values(rng, n, lo=0.1, hi=0.9):
    while True:
        mods = np.sort(rng.uniform(lo, hi, n - 1))
        gaps = np.diff(mods, prepend=0.0)
        if np.min(gaps) < 0.25 / n:
            continue
        args = rng.uniform(0, 2 * math.pi, n - 1)
        return [m * cmath.exp(1j * a) for m, a in zip(mods, args)]


class TestCount:
    def test_closed_form(self):
        assert count_generic(2) == 1
        assert count_generic(3) == 1
        assert count_generic(4) == 4
        assert count_generic(5) == 25
        assert count_generic(6) == 216

    def test_small_rejected(self):
        with pytest.raises(ValueError):
            count_generic(1)


class TestRiordan:
    def test_hand_values(self):
        assert riordan_sum(1) == 1
        assert riordan_sum(2) == 4
        assert riordan_sum(3) == 25

    def test_half_terms_m3(self):
        # the m=3 sum splits as 8 + 4.5 + 4.5 + 8
        terms = [
            Fraction(math.comb(3, i), 2)
            * Fraction(i + 1) ** (i - 1)
            * Fraction(3 - i + 1) ** (3 - i - 1)
            for i in range(4)
        ]
        assert terms == [Fraction(8), Fraction(9, 2), Fraction(9, 2), Fraction(8)]

    def test_identity_range(self):
        for m in range(1, 11):
            assert riordan_sum(m) == (m + 2) ** (m - 1)


class TestEnumerate:
    def test_counts_match(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 4, 5):
            v = random_generic_values(rng, n)
            configs = enumerate_generic(v)
            assert len(configs) == count_generic(n)

    def test_all_valid_and_value_exact(self):
        rng = np.random.default_rng(1)
        v = random_generic_values(rng, 4)
        for cfg in enumerate_generic(v):
            assert validate(cfg) == []
            got = critical_values_of(cfg)
            assert match_unordered(tuple(got), tuple(v)) < 1e-12

    def test_only_single_simple_vertices(self):
        rng = np.random.default_rng(2)
        v = random_generic_values(rng, 5)
        for cfg in enumerate_generic(v):
            for _, node in cfg.walk():
                if not node.is_point():
                    g = node.member
                    assert g.n_vertices == 1
                    assert g.vertex_multiplicity(0) == 1

    def test_count_independent_of_vector(self):
        rng = np.random.default_rng(3)
        counts = set()
        for _ in range(4):
            v = random_generic_values(rng, 5)
            counts.add(len(enumerate_generic(v)))
        assert counts == {25}

    def test_atypical_rejected(self):
        with pytest.raises(ValueError):
            enumerate_generic([0.5, 0.5 * cmath.exp(1j)])
        with pytest.raises(ValueError):
            enumerate_generic([0.0, 0.5])

    def test_codes_distinct(self):
        rng = np.random.default_rng(4)
        v = random_generic_values(rng, 5)
        codes = [canonical_code(c).data for c in enumerate_generic(v)]
        assert len(codes) == len(set(codes))
