import cmath
import math

import numpy as np
import pytest

from levelcurves.polynomials import ComplexPoly, eval_poly, from_critical_points
from levelcurves.tracer import (
    DegenerateCurveError,
    Tract,
    critical_level_curves,
    find_level_seed,
    local_edge_directions,
    point_in_polygon,
    trace_gradient_line,
    trace_level_component,
    winding_number,
)

TWO_PI = 2 * math.pi


def grid_contour_points(p, eps, box, n=400):
    """Brute-force oracle: grid points lying near the level set {|p| = eps}."""
    (x0, x1, y0, y1) = box
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    X, Y = np.meshgrid(xs, ys)
    Z = X + 1j * Y
    vals = np.abs(np.polyval(list(reversed(p.coeffs)), Z))
    mask = np.abs(vals - eps) < eps * 0.02
    return Z[mask]


class TestTract:
    def test_rejects_large_values(self):
        with pytest.raises(ValueError):
            Tract.from_poly(ComplexPoly((0, -2, 1)))    # critical value -1

    def test_normalized(self):
        t = Tract.normalized(ComplexPoly((0, -2, 1)))
        assert abs(t.spectrum.max_modulus - 0.9) < 1e-12
        assert abs(t.scale_applied - 1 / 0.9) < 1e-12


class TestLevelComponent:
    def test_circle(self):
        # |z^2| = 0.25 is the circle of radius 0.5
        t = Tract.from_poly(ComplexPoly((0, 0, 1)))
        chain, n = trace_level_component(t, 0.5, 0.25)
        assert n == 2
        assert all(abs(abs(z) - 0.5) < 1e-6 for z in chain)

    def test_two_components(self):
        # oracle: the 0.1-level of z^2-2z has two small loops around 0 and 2
        p = ComplexPoly((0, -2, 1))
        t = Tract.normalized(p)
        eps = 0.09
        pts = grid_contour_points(t.poly, eps, (-1, 3, -2, 2))
        assert (pts.real < 1).any() and (pts.real > 1).any()
        for center in (0.0, 2.0):
            seed = find_level_seed(t, eps, center, 1.0)
            chain, n = trace_level_component(t, seed, eps)
            assert n == 1
            near = [z for z in pts if abs(z - center) < 1]
            spread = max(min(abs(z - w) for w in chain) for z in near)
            assert spread < 0.05

    def test_quintic_outer(self):
        t = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        seed = find_level_seed(t, 0.95, 0.0, 1.0)
        chain, n = trace_level_component(t, seed, 0.95)
        assert n == 5


class TestLocalDirections:
    def test_node_of_lemniscate(self):
        angles, flags = local_edge_directions(ComplexPoly((0, -2, 1)), 1.0)
        assert len(angles) == 4
        # rays of Re((z-1)^2 / -1) = 0 sit at odd multiples of 45 degrees
        for a in angles:
            assert abs(math.sin(2 * a)) > 1 - 1e-9
        assert flags.count(True) == 2

    def test_quintic_center(self):
        angles, flags = local_edge_directions(ComplexPoly((-1, 0, 0, 0, 0, 1)), 0.0)
        assert len(angles) == 10
        gaps = np.diff(angles + [angles[0] + TWO_PI])
        assert np.allclose(gaps, math.pi / 5, atol=1e-9)

    def test_count_formula(self):
        rng = np.random.default_rng(5)
        for k in (1, 2, 3):
            u = [0.3 + 0.1j] * k + list(rng.standard_normal(2) + 1j * rng.standard_normal(2))
            p = from_critical_points(u)
            angles, _ = local_edge_directions(p, 0.3 + 0.1j)
            assert len(angles) == 2 * (k + 1)

    def test_degenerate_zero_value(self):
        with pytest.raises(DegenerateCurveError):
            local_edge_directions(ComplexPoly((0, 0, 1)), 0.0)


class TestCriticalCurves:
    def test_lemniscate(self):
        t = Tract.normalized(ComplexPoly((0, -2, 1)))
        graphs = critical_level_curves(t)
        assert len(graphs) == 1
        g = graphs[0]
        m = g.member
        assert m.n_vertices == 1
        assert abs(m.vertex_args[0] - math.pi) < 1e-9
        assert len(m.edge_marks) == 2 and m.edge_marks == (1, 1)
        assert sorted(m.face_z.values()) == [1, 1]
        # distinguished points at 1 +- sqrt(2), where the polynomial is positive
        pts = sorted(e.crossings[0].real for e in g.edges)
        assert abs(pts[0] - (1 - math.sqrt(2))) < 1e-6
        assert abs(pts[1] - (1 + math.sqrt(2))) < 1e-6

    def test_quintic_rose(self):
        t = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        graphs = critical_level_curves(t)
        assert len(graphs) == 1
        m = graphs[0].member
        assert m.n_vertices == 1 and m.vertex_multiplicity(0) == 4
        assert m.n_darts == 10 and len(m.edge_marks) == 5
        assert sorted(m.face_z.values()) == [1] * 5
        assert sum(m.edge_marks) == 5

    def test_pure_power_has_no_curves(self):
        t = Tract.from_poly(ComplexPoly((0, 0, 0, 1)))
        assert critical_level_curves(t) == []

    def test_argument_principle_on_petals(self):
        # every bounded face's boundary winds once per enclosed zero
        rng = np.random.default_rng(11)
        for _ in range(5):
            u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            p = from_critical_points(u)
            try:
                t = Tract.normalized(p)
                graphs = critical_level_curves(t)
            except Exception:
                continue
            for g in graphs:
                for key, orbit in g.member.bounded_faces().items():
                    total = sum(g.edges[d >> 1].delta for d in orbit)
                    poly = g.face_polygon(key)
                    z = sum(m for w, m in t.zeros if point_in_polygon(w, poly))
                    assert abs(total - TWO_PI * z) < 1e-6


class TestWinding:
    def test_quintic_levels(self):
        t = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        seed = find_level_seed(t, 0.95, 0.0, 1.0)
        chain, _ = trace_level_component(t, seed, 0.95)
        assert winding_number(t, chain[:-1]) == 5
        z1 = cmath.exp(2j * math.pi / 5)
        seed2 = find_level_seed(t, 0.45, z1, z1)
        petal, _ = trace_level_component(t, seed2, 0.45)
        assert winding_number(t, petal[:-1]) == 1

    def test_square(self):
        t = Tract.from_poly(ComplexPoly((0, 0, 1)))
        chain, _ = trace_level_component(t, 0.6, 0.36)
        assert winding_number(t, chain[:-1]) == 2


class TestGradientLines:
    def test_radial_for_square(self):
        t = Tract.from_poly(ComplexPoly((0, 0, 1)))
        line = trace_gradient_line(t, 0.5, outward=True, target_modulus=1.0)
        assert line.end_kind == "level"
        assert all(abs(z.imag) < 1e-9 for z in line.points)
        assert abs(line.points[-1] - 1.0) < 1e-9

    def test_lemniscate_to_boundary(self):
        t = Tract.normalized(ComplexPoly((0, -2, 1)))
        start = 1 + math.sqrt(2)
        line = trace_gradient_line(t, start, outward=True, target_modulus=1.0)
        assert line.end_kind == "level"
        z = line.points[-1]
        assert abs(abs(eval_poly(t.poly, z)) - 1.0) < 1e-9
        assert abs(cmath.phase(eval_poly(t.poly, z))) < 1e-8

    def test_petal_to_root_of_unity(self):
        t = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        g = critical_level_curves(t)[0]
        for e in g.edges:
            start = e.crossings[0]
            line = trace_gradient_line(t, start, outward=False)
            assert line.end_kind == "zero"
            assert abs(abs(line.end_point) - 1.0) < 1e-9
        # arg stays fixed along the descent
        assert all(
            abs(cmath.phase(eval_poly(t.poly, z))) < 1e-6
            for z in line.points[1:-1]
        )

    def test_gradient_lines_do_not_cross(self):
        t = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        g = critical_level_curves(t)[0]
        lines = []
        for e in g.edges:
            line = trace_gradient_line(t, e.crossings[0], outward=False)
            lines.append(line.points[:-1])
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                dmin = min(abs(a - b) for a in lines[i] for b in lines[j])
                assert dmin > 1e-3


class TestAnnulusWinding:
    def test_constant_winding_per_annulus(self):
        # between consecutive critical moduli every level curve of the same
        # annular component winds the same number of times
        t = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        outer = [winding_number(t, trace_level_component(t, find_level_seed(t, eps, 0.0, 1.0), eps)[0][:-1])
                 for eps in (0.92, 0.95, 0.98)]
        assert outer == [5, 5, 5]
        z1 = cmath.exp(2j * math.pi / 5)
        petal = [winding_number(t, trace_level_component(t, find_level_seed(t, eps, z1, z1), eps)[0][:-1])
                 for eps in (0.3, 0.45, 0.6)]
        assert petal == [1, 1, 1]


class TestTracedGraphInvariants:
    def test_type_invariants_on_random_tracts(self):
        rng = np.random.default_rng(77)
        checked = 0
        while checked < 4:
            n = int(rng.integers(3, 6))
            u = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
            p = from_critical_points(u)
            try:
                t = Tract.normalized(p)
                graphs = critical_level_curves(t)
            except Exception:
                continue
            for g in graphs:
                m = g.member
                outer = set(m.face_orbit(m.outer_anchor))
                for rot in m.rotation:
                    assert len(rot) % 2 == 0 and len(rot) >= 4
                for e in range(len(m.edge_marks)):
                    assert ((2 * e) in outer) + ((2 * e + 1) in outer) == 1
                for key in m.face_z:
                    crossings = m.face_crossings(key)
                    assert len(crossings) == m.face_z[key]
                # level held along every sampled edge point
                for edge in g.edges:
                    for z in edge.points[2:-2]:
                        assert abs(abs(eval_poly(t.poly, z)) - g.level) < 1e-6 * g.level
            checked += 1
