"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.
"""

import cmath
import math
import time

import numpy as np
import pytest

from levelcurves.bocher import (
    Disk,
    check_bocher,
    check_separation,
    convex_hull_contains,
    rational_critical_points,
)
from levelcurves.configuration import (
    Configuration,
    canonical_code,
    config_point,
    critical_values_of,
    equals,
    figure_eight,
    norm_arg,
    quantize_arg,
    rose,
    scatter_perturb,
    sorted_value_vector,
    validate,
)
from levelcurves.enumeration import count_generic, enumerate_generic, riordan_sum
from levelcurves.extraction import extract_configuration
from levelcurves.polynomials import (
    ComplexPoly,
    atypicality_degree,
    critical_spectrum,
    eval_poly,
    from_critical_points,
    match_unordered,
)
from levelcurves.realization import fiber_configurations, realize
from levelcurves.tracer import (
    Tract,
    critical_level_curves,
    find_level_seed,
    point_in_polygon,
    trace_level_component,
    winding_number,
)

from test_enumeration import random_generic_values
from test_extraction import compose_affine, random_generic_poly


def _report(num, name, elapsed, budget):
    print(f"PASS criterion {num}: {name} ({elapsed:.1f}s / budget {budget:.0f}s)")
    assert elapsed < budget


class TestAcceptance:
    def test_criterion_01_counting(self):
        t0 = time.time()
        rng = np.random.default_rng(100)
        expected = {2: 1, 3: 1, 4: 4, 5: 25, 6: 216}
        for n, want in expected.items():
            assert count_generic(n) == want
            for _ in range(10):
                v = random_generic_values(rng, n)
                assert len(enumerate_generic(v)) == want
        _report(1, "generic configuration counts", time.time() - t0, 60)

    def test_criterion_02_riordan_identity(self):
        t0 = time.time()
        for m in range(1, 11):
            assert riordan_sum(m) == (m + 2) ** (m - 1)
        assert riordan_sum(3) == 25
        _report(2, "symmetric-sum identity", time.time() - t0, 1)

    def test_criterion_03_fiber_vs_enumeration(self):
        t0 = time.time()
        rng = np.random.default_rng(103)
        v = random_generic_values(rng, 4)
        found = fiber_configurations(v, n_starts=260, seed=0)
        enum_codes = {canonical_code(c).data for c in enumerate_generic(v)}
        assert len(found) == 4 and len(enum_codes) == 4
        assert set(found) == enum_codes
        _report(3, "fiber classes equal enumerated classes (n=4)", time.time() - t0, 300)

    def test_criterion_04_round_trip(self):
        t0 = time.time()
        rng = np.random.default_rng(104)
        for case in range(25):
            n = int(rng.integers(2, 6))
            p = random_generic_poly(rng, n)
            tract = Tract.normalized(p)
            cfg = extract_configuration(tract)
            res = realize(cfg, n_starts=400, seed=case)
            back = extract_configuration(Tract.from_poly(res.poly))
            assert canonical_code(back).data == canonical_code(cfg).data
        _report(4, "extract-realize-extract round trips", time.time() - t0, 600)

    def test_criterion_05_forward_invariance(self):
        t0 = time.time()
        rng = np.random.default_rng(105)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            p = random_generic_poly(rng, n)
            tract = Tract.normalized(p)
            cfg = extract_configuration(tract)
            a = rng.uniform(0.3, 1.5) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            b = complex(*rng.uniform(-0.6, 0.6, 2))
            scaled = ComplexPoly(tuple(np.array(p.coeffs) / tract.scale_applied))
            cfg2 = extract_configuration(Tract.from_poly(compose_affine(scaled, a, b)))
            assert canonical_code(cfg).data == canonical_code(cfg2).data
        _report(5, "configuration invariance under affine maps", time.time() - t0, 300)

    def test_criterion_06_quintic_structure(self):
        t0 = time.time()
        tract = Tract.normalized(ComplexPoly((-1, 0, 0, 0, 0, 1)))
        graphs = critical_level_curves(tract)
        assert len(graphs) == 1
        m = graphs[0].member
        assert m.n_vertices == 1
        assert m.vertex_multiplicity(0) == 4
        assert m.n_darts == 10
        assert sorted(m.face_z.values()) == [1, 1, 1, 1, 1]
        bag = m.outer_crossings()
        assert len(bag) == 5
        seed = find_level_seed(tract, 0.95, 0.0, 1.0)
        chain, _ = trace_level_component(tract, seed, 0.95)
        assert winding_number(tract, chain[:-1]) == 5
        z1 = cmath.exp(2j * math.pi / 5)
        petal, _ = trace_level_component(
            tract, find_level_seed(tract, 0.45, z1, z1), 0.45
        )
        assert winding_number(tract, petal[:-1]) == 1
        _report(6, "quintic critical-curve structure", time.time() - t0, 10)

    def test_criterion_07_bocher_suite(self):
        t0 = time.time()
        rng = np.random.default_rng(107)

        def disk_points(center, radius, count):
            out = []
            while len(out) < count:
                z = complex(*rng.uniform(-1, 1, 2))
                if abs(z) <= 1:
                    out.append(center + radius * z)
            return out

        for _ in range(200):
            n = int(rng.integers(1, 7))
            c1 = complex(*rng.uniform(-3, 3, 2))
            r1 = float(rng.uniform(0.4, 1.3))
            while True:
                c2 = complex(*rng.uniform(-3, 3, 2))
                r2 = float(rng.uniform(0.4, 1.3))
                if abs(c1 - c2) > r1 + r2 + 0.1:
                    break
            ok, violators = check_bocher(
                disk_points(c1, r1, n), disk_points(c2, r2, n), Disk(c1, r1), Disk(c2, r2)
            )
            assert ok, violators
        for _ in range(200):
            n = int(rng.integers(2, 7))
            zeros = [complex(*rng.uniform(-2, 2, 2)) for _ in range(n)]
            for w in rational_critical_points(zeros, []):
                assert convex_hull_contains(zeros, w, 1e-9)
        _report(7, "disk and hull critical-point bounds", time.time() - t0, 60)

    def test_criterion_08_separation(self):
        t0 = time.time()
        rng = np.random.default_rng(108)
        tracts = []
        while len(tracts) < 10:
            n = int(rng.integers(3, 6))
            tracts.append(Tract.normalized(random_generic_poly(rng, n)))
        # draw further tracts uniformly over configuration classes so that
        # branching structures (mutually exterior siblings) actually occur
        made = 0
        attempt = 0
        while made < 10:
            attempt += 1
            n = int(rng.integers(4, 6))
            v = random_generic_values(rng, n)
            classes = enumerate_generic(v)
            cfg = classes[int(rng.integers(0, len(classes)))]
            try:
                res = realize(cfg, n_starts=400, seed=1000 + attempt)
            except Exception:
                continue
            tracts.append(Tract.from_poly(res.poly))
            made += 1
        pairs = 0
        for tract in tracts:
            graphs = critical_level_curves(tract)
            for i in range(len(graphs)):
                for j in range(i + 1, len(graphs)):
                    a_pts = graphs[i].all_points()
                    b_pts = graphs[j].all_points()
                    if point_in_polygon(b_pts[0], a_pts) or point_in_polygon(
                        a_pts[0], b_pts
                    ):
                        continue
                    w, _ = check_separation(tract, graphs[i], graphs[j])
                    pairs += 1
        assert pairs >= 3, f"only {pairs} mutually exterior pairs exercised"
        _report(8, f"separation located for {pairs} exterior pairs", time.time() - t0, 300)

    def test_criterion_09_scattering(self):
        t0 = time.time()
        nu = 0.02
        instances = []

        # multiple zeros, bare and nested (splitting a zero: first kind)
        for k in (2, 3, 4, 5):
            instances.append(config_point(k))
        nested = Configuration(
            figure_eight(0.5, 1.0, (2, 1), 2, 1),
            {0: config_point(2), 2: config_point(1)},
            {},
        )
        instances.append(nested)

        # enumerated configurations with a zeroed value (first kind) and with
        # two sibling levels tied (second kind)
        rng = np.random.default_rng(109)
        for n in (3, 4, 5):
            v = random_generic_values(rng, n)
            for cfg in enumerate_generic(v):
                zeroed = _zeroed_variant(cfg)
                if zeroed is not None:
                    instances.append(zeroed)
                tied = _tied_variant(cfg)
                if tied is not None:
                    instances.append(tied)

        # tied multi-vertex curves (third kind): roses and a two-vertex chain
        for petals in (3, 4, 5):
            member = rose(0.8, 1.2, (1,) * petals)
            instances.append(
                Configuration(member, {k: config_point(1) for k in member.face_z}, {})
            )
        from test_configuration import pretzel_config

        instances.append(pretzel_config(level=0.8))

        exercised = 0
        for cfg in instances:
            assert validate(cfg) == []
            before = sorted_value_vector(cfg)
            degree = atypicality_degree(before)
            assert degree >= 1
            out = scatter_perturb(cfg, nu)
            assert validate(out) == []
            after = sorted_value_vector(out)
            assert atypicality_degree(after) < degree
            assert len(after) == len(before)
            assert match_unordered(tuple(before), tuple(after)) < nu
            exercised += 1
        assert exercised >= 20
        _report(
            9,
            f"scattering over {exercised} degenerate configurations",
            time.time() - t0,
            60,
        )

    def test_criterion_10_worked_example(self):
        t0 = time.time()
        # critical value sampled from (1/.6)(z^2 + 9/25) e^z at z = -0.2
        z = -0.2
        v0 = (1 / 0.6) * (z * z + 9 / 25) * math.exp(z)
        assert abs(v0) < 1
        p = ComplexPoly((v0, 0, 1))
        tract = Tract.from_poly(p)
        cfg = extract_configuration(tract)

        # the unique configuration with this single critical value
        arg = norm_arg(cmath.phase(v0))
        marks = (0, 0) if quantize_arg(arg) == 0 else (1, 1)
        member = figure_eight(abs(v0), arg, marks, 1, 1)
        expected = Configuration(
            member, {0: config_point(1), 2: config_point(1)}, {}
        )
        assert equals(cfg, expected)

        # any other tract with the same single critical value is equivalent
        q = ComplexPoly((9 + v0, -6, 1))         # (z-3)^2 + v0
        cfg_q = extract_configuration(Tract.from_poly(q))
        assert equals(cfg, cfg_q)
        _report(10, "single-value tract equivalence", time.time() - t0, 10)


def _zeroed_variant(cfg):
    """Replace a deepest two-petal curve by a double zero, degrading a value."""
    target = None
    for path, node in cfg.walk():
        if node.is_point():
            continue
        kids = list(node.children.values())
        if all(k.is_point() and k.member.Z == 1 for k in kids) and node.member.Z() == 2:
            target = path
    if target is None or target == ():
        return None
    out = cfg.replaced(target, config_point(2))
    parent = out.at(target[:-1])
    parent.offsets.pop(target[-1], None)
    return out if validate(out) == [] else None


def _tied_variant(cfg):
    """Tie the levels of two incomparable curves, creating a modulus tie."""
    graphs = [
        (path, node)
        for path, node in cfg.walk()
        if not node.is_point()
    ]
    for i in range(len(graphs)):
        for j in range(len(graphs)):
            if i == j:
                continue
            pa, a = graphs[i]
            pb, b = graphs[j]
            if pa[: len(pb)] == pb or pb[: len(pa)] == pa:
                continue        # comparable: one contains the other
            member = b.member
            retuned = Configuration(
                type(member)(
                    level=a.member.level,
                    rotation=member.rotation,
                    vertex_args=member.vertex_args,
                    edge_marks=member.edge_marks,
                    face_z=member.face_z,
                    outer_anchor=member.outer_anchor,
                ),
                dict(b.children),
                dict(b.offsets),
            )
            out = cfg.replaced(pb, retuned)
            if validate(out) == [] and atypicality_degree(sorted_value_vector(out)) >= 1:
                return out
    return None
