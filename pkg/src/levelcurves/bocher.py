"""Critical-point location checks for rational functions, and curve separation.

A rational map with all zeros in one disk and all poles in a disjoint disk
keeps its critical points inside the two disks; for polynomials (empty pole
list) this specializes to the convex-hull bound.  Separation locates, for two
mutually exterior level curves of a tract, a critical level curve holding
them in different bounded faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polynomials import ComplexPoly, roots
from .tracer import EmbeddedLevelGraph, Tract, critical_level_curves, point_in_polygon

DISK_RTOL = 1e-9


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return abs(z - self.center) <= self.radius * (1.0 + slack)

    def intersects(self, other: "Disk") -> bool:
        return abs(self.center - other.center) < self.radius + other.radius


def _poly_from_roots(points):
    prod = np.array([1.0 + 0j])
    for w in points:
        prod = np.convolve(prod, np.array([-w, 1.0 + 0j]))
    return ComplexPoly(tuple(prod))


def rational_critical_points(zeros, poles, tol: float = 1e-12):
    """Finite critical points of prod(z - zeros) / prod(z - poles).

    Numerator roots of the derivative that cancel against poles are dropped;
    a shared zero and pole is rejected as degenerate.  An empty pole list is
    the polynomial case.
    """
    zeros = [complex(z) for z in zeros]
    poles = [complex(w) for w in poles]
    for z in zeros:
        for w in poles:
            if abs(z - w) < 1e-12 * (1 + abs(z)):
                raise ValueError("zero and pole coincide; the map is degenerate")
    p = _poly_from_roots(zeros)
    q = _poly_from_roots(poles)
    pc = np.array(p.coeffs)
    qc = np.array(q.coeffs)

    def deriv(c):
        return np.array([k * c[k] for k in range(1, len(c))]) if len(c) > 1 else np.array([0j])

    lhs = np.convolve(deriv(pc), qc)
    rhs = np.convolve(pc, deriv(qc))
    width = max(len(lhs), len(rhs))
    num = np.zeros(width, dtype=complex)
    num[: len(lhs)] += lhs
    num[: len(rhs)] -= rhs
    num = np.trim_zeros(num, "b")
    if len(num) <= 1:
        return []
    found = roots(ComplexPoly(tuple(num)), tol)
    out = []
    for z, m in found:
        # roots sitting at poles are cancellation artifacts of the quotient
        if any(abs(z - w) < 1e-6 * (1 + abs(w)) for w in poles):
            continue
        out.extend([z] * m)
    return out


def check_bocher(zeros, poles, disk1: Disk, disk2: Disk):
    """Verify that every critical point lies in the two prescribed disks.

    Returns (True, []) on success, or (False, violators) with the critical
    points found outside and their distances to the nearer disk.
    """
    if poles and disk1.intersects(disk2):
        raise ValueError("the two disks must be disjoint")
    for z in zeros:
        if not disk1.contains(z, DISK_RTOL):
            raise ValueError("all zeros must lie in the first disk")
    for w in poles:
        if not disk2.contains(w, DISK_RTOL):
            raise ValueError("all poles must lie in the second disk")
    crit = rational_critical_points(zeros, poles)
    violators = []
    for z in crit:
        if disk1.contains(z, DISK_RTOL) or (poles and disk2.contains(z, DISK_RTOL)):
            continue
        d = min(
            abs(z - disk1.center) - disk1.radius,
            (abs(z - disk2.center) - disk2.radius) if poles else math.inf,
        )
        violators.append((z, d))
    return (not violators), violators


def convex_hull_contains(points, z: complex, slack: float = 1e-9) -> bool:
    """Membership of z in the convex hull of the points, with a slack margin."""
    pts = [complex(p) for p in points]
    if len(pts) == 1:
        return abs(z - pts[0]) <= slack
    if len(pts) == 2:
        a, b = pts
        ab = b - a
        t = ((z - a) / ab).real if ab != 0 else 0.0
        t = min(1.0, max(0.0, t))
        return abs(z - (a + t * ab)) <= slack * (1 + abs(ab))
    arr = np.array([[p.real, p.imag] for p in pts])
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(arr)
    except QhullError:
        # collinear points: fall back to the segment test on the extremes
        far = max(pts, key=lambda p: abs(p - pts[0]))
        return convex_hull_contains([pts[0], far], z, slack)
    scale = 1.0 + float(np.max(np.abs(arr)))
    for eq in hull.equations:
        if eq[0] * z.real + eq[1] * z.imag + eq[2] > slack * scale:
            return False
    return True


def _curve_points(curve):
    if isinstance(curve, EmbeddedLevelGraph):
        return curve.all_points()
    return list(curve)


def _mutually_exterior(a_pts, b_pts):
    return not point_in_polygon(b_pts[0], a_pts) and not point_in_polygon(a_pts[0], b_pts)


def check_separation(tract: Tract, curve_a, curve_b):
    """A critical level curve holding two mutually exterior curves apart.

    Scans the critical level curves of the tract for one with the two inputs
    in different bounded faces; returns (vertex, graph).  Existence is
    guaranteed, so not finding one signals a tracing failure.
    """
    a_pts = _curve_points(curve_a)
    b_pts = _curve_points(curve_b)
    if not _mutually_exterior(a_pts, b_pts):
        raise ValueError("curves are not mutually exterior")
    ra, rb = a_pts[0], b_pts[0]
    for graph in critical_level_curves(tract):
        face_of_a = face_of_b = None
        for key in graph.member.face_z:
            poly = graph.face_polygon(key)
            if point_in_polygon(ra, poly):
                face_of_a = key
            if point_in_polygon(rb, poly):
                face_of_b = key
        if face_of_a is not None and face_of_b is not None and face_of_a != face_of_b:
            return graph.vertex_locations[0], graph
    raise RuntimeError(
        "no separating critical level curve found; the tracing is inconsistent"
    )
