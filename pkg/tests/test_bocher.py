import cmath
import math

import numpy as np
import pytest

from levelcurves.bocher import (
    Disk,
    check_bocher,
    check_separation,
    convex_hull_contains,
    rational_critical_points,
)
from levelcurves.polynomials import ComplexPoly, from_critical_points
from levelcurves.tracer import Tract, critical_level_curves, find_level_seed, trace_level_component

from test_extraction import random_generic_poly


def unit_disk_points(rng, n, center=0j, radius=1.0):
    out = []
    while len(out) < n:
        z = complex(*rng.uniform(-1, 1, 2))
        if abs(z) <= 1:
            out.append(center + radius * z)
    return out


class TestRationalCriticalPoints:
    def test_cancellation_at_pole(self):
        # numerator root at the double pole cancels; only 0 remains critical
        crit = rational_critical_points([0, 0], [3, 3])
        assert len(crit) == 1 and abs(crit[0]) < 1e-9

    def test_polynomial_case(self):
        crit = rational_critical_points([-1, 1], [])
        assert len(crit) == 1 and abs(crit[0]) < 1e-9

    def test_disk_pair_instance(self):
        crit = rational_critical_points([1j, -1j], [5 + 1j, 5 - 1j])
        for z in crit:
            assert abs(z) <= 1 + 1e-9 or abs(z - 5) <= 1 + 1e-9

    def test_coincidence_rejected(self):
        with pytest.raises(ValueError):
            rational_critical_points([1.0], [1.0])


class TestBocherSuite:
    def test_examples(self):
        assert check_bocher([0, 0], [3, 3], Disk(0, 1.0), Disk(3, 1.0))[0]
        assert check_bocher([1j, -1j], [5 + 1j, 5 - 1j], Disk(0, 1.5), Disk(5, 1.5))[0]

    def test_randomized(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(1, 7))
            c1 = complex(*rng.uniform(-3, 3, 2))
            r1 = float(rng.uniform(0.4, 1.2))
            while True:
                c2 = complex(*rng.uniform(-3, 3, 2))
                r2 = float(rng.uniform(0.4, 1.2))
                if abs(c1 - c2) > r1 + r2 + 0.1:
                    break
            zeros = unit_disk_points(rng, n, c1, r1)
            poles = unit_disk_points(rng, n, c2, r2)
            ok, violators = check_bocher(zeros, poles, Disk(c1, r1), Disk(c2, r2))
            assert ok, violators

    def test_precondition_enforced(self):
        with pytest.raises(ValueError):
            check_bocher([5.0], [0.0], Disk(0, 1.0), Disk(0.5, 1.0))


class TestConvexHull:
    def test_random_polynomials(self):
        rng = np.random.default_rng(1)
        for _ in range(60):
            n = int(rng.integers(2, 7))
            zeros = [complex(*rng.uniform(-2, 2, 2)) for _ in range(n)]
            for w in rational_critical_points(zeros, []):
                assert convex_hull_contains(zeros, w, 1e-9)

    def test_segment_case(self):
        assert convex_hull_contains([-1, 1], 0.0)
        assert not convex_hull_contains([-1, 1], 0.5j)


class TestSeparation:
    def test_lemniscate_components(self):
        t = Tract.normalized(ComplexPoly((0, -2, 1)))
        a, _ = trace_level_component(t, find_level_seed(t, 0.09, 0.0, 1.0), 0.09)
        b, _ = trace_level_component(t, find_level_seed(t, 0.09, 2.0, 1.0), 0.09)
        w, graph = check_separation(t, a, b)
        assert abs(w - 1.0) < 1e-6

    def test_quintic_petals(self):
        t = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        z2 = cmath.exp(2j * math.pi / 5)
        a, _ = trace_level_component(t, find_level_seed(t, 0.45, 1.0, 1.0), 0.45)
        b, _ = trace_level_component(t, find_level_seed(t, 0.45, z2, z2), 0.45)
        w, _ = check_separation(t, a, b)
        assert abs(w) < 1e-6

    def test_symmetric_cubic(self):
        # critical points +-1 with opposite real values; small loops around
        # the outer zeros are separated by the curve through both
        t = Tract.normalized(ComplexPoly((0, -3, 0, 1)))
        s = math.sqrt(3)
        a, _ = trace_level_component(t, find_level_seed(t, 0.2, -s, -1.0), 0.2)
        b, _ = trace_level_component(t, find_level_seed(t, 0.2, s, 1.0), 0.2)
        w, _ = check_separation(t, a, b)
        assert abs(abs(w) - 1.0) < 1e-6

    def test_not_exterior_rejected(self):
        t = Tract.normalized(ComplexPoly((0, -2, 1)))
        a, _ = trace_level_component(t, find_level_seed(t, 0.09, 0.0, 1.0), 0.09)
        big, _ = trace_level_component(t, find_level_seed(t, 0.95, 1.0, 1j), 0.95)
        with pytest.raises(ValueError):
            check_separation(t, a, big)

    def test_critical_graph_pairs(self):
        # a tract with two sibling curves: realize a branching configuration
        from levelcurves.configuration import Configuration, config_point, figure_eight
        from levelcurves.realization import realize
        from levelcurves.tracer import point_in_polygon

        def leaf(v0):
            import cmath

            from levelcurves.configuration import norm_arg

            m = figure_eight(abs(v0), norm_arg(cmath.phase(v0)), (1, 1), 1, 1)
            return Configuration(m, {0: config_point(1), 2: config_point(1)}, {})

        cfg = Configuration(
            figure_eight(0.8, 2.5, (2, 2), 2, 2),
            {0: leaf(0.3 * 1j), 2: leaf(0.55 * (0.6 + 0.8j))},
            {0: 0, 2: 0},
        )
        res = realize(cfg, n_starts=300, seed=0)
        t = Tract.from_poly(res.poly)
        graphs = critical_level_curves(t)
        pairs = 0
        for i in range(len(graphs)):
            for j in range(i + 1, len(graphs)):
                a_pts = graphs[i].all_points()
                b_pts = graphs[j].all_points()
                if point_in_polygon(b_pts[0], a_pts) or point_in_polygon(a_pts[0], b_pts):
                    continue
                w, _ = check_separation(t, graphs[i], graphs[j])
                pairs += 1
        assert pairs >= 1
