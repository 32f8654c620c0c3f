"""Numerical tracing of level curves and gradient lines of a polynomial tract.

The tract of a polynomial p is the sublevel region {|p| < 1}; it is connected
with a single smooth boundary curve whenever every critical value has modulus
below one.  Level sets {|p| = eps} are traced by a predictor-corrector scheme
driven by the argument of p; the curves through critical points are assembled
into embedded graphs with rotation systems, faces, zero counts, and
distinguished points (where p is positive real).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .polynomials import (
    ComplexPoly,
    CriticalSpectrum,
    critical_spectrum,
    derivative,
    eval_poly,
    roots,
)
from .configuration import GraphMember, norm_arg

TWO_PI = 2.0 * math.pi

HIT_TOL = 1e-9          # local-model tolerance defining the vertex-hit radius
TUBE_RTOL = 1e-8        # relative modulus tolerance kept along a traced curve
MAX_DTHETA = TWO_PI / 256.0
LEVEL_TIE_RTOL = 1e-9   # critical values within this relative gap share a level


class TracingError(RuntimeError):
    """Numerical tracing failed; carries the location of the failure."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class DegenerateCurveError(ValueError):
    """The level curve through the point degenerates to the point itself."""


@dataclass(frozen=True)
class Tract:
    """A polynomial restricted to its unit sublevel region."""

    poly: ComplexPoly
    spectrum: CriticalSpectrum
    zeros: tuple      # ((location, multiplicity), ...)
    scale_applied: float = 1.0

    @classmethod
    def from_poly(cls, p: ComplexPoly, tol: float = 1e-12) -> "Tract":
        spec = critical_spectrum(p, tol)
        if spec.max_modulus >= 1.0:
            raise ValueError(
                "tract requires every critical value inside the unit disk; "
                f"max modulus is {spec.max_modulus:.6f} (use Tract.normalized)"
            )
        return cls(poly=p, spectrum=spec, zeros=tuple(roots(p, tol)))

    @classmethod
    def normalized(cls, p: ComplexPoly, target: float = 0.9, tol: float = 1e-12) -> "Tract":
        """Rescale p so its largest critical-value modulus becomes ``target``."""
        spec = critical_spectrum(p, tol)
        if spec.max_modulus < 1.0:
            return cls(poly=p, spectrum=spec, zeros=tuple(roots(p, tol)))
        s = spec.max_modulus / target
        q = p.scaled(1.0 / s)
        spec_q = critical_spectrum(q, tol)
        return cls(
            poly=q, spectrum=spec_q, zeros=tuple(roots(q, tol)), scale_applied=s
        )

    def dp(self) -> ComplexPoly:
        return derivative(self.poly)

    def feature_points(self):
        """Critical points and zeros: the features steps must resolve."""
        return [z for z, _ in self.spectrum.points] + [z for z, _ in self.zeros]

    def geometry_span(self) -> float:
        pts = self.feature_points()
        if len(pts) < 2:
            return 1.0
        span = max(
            abs(pts[i] - pts[j])
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
        )
        return max(span, 1e-6)


@dataclass
class CriticalVertex:
    location: complex
    multiplicity: int
    arg: float              # a(x) in [0, 2*pi)
    value: complex          # p at the vertex
    rays: list              # 2(k+1) ray angles, ascending in [0, 2*pi)
    outgoing: list          # per ray, True when the argument increases outward
    r_hit: float


@dataclass
class TracedEdge:
    start: tuple            # (vertex index, ray index)
    end: tuple
    points: list            # chain in the increasing-argument direction
    theta_start: float      # unwrapped argument at the start vertex
    theta_end: float
    crossings: list         # refined positions where p is positive real

    @property
    def delta(self) -> float:
        return self.theta_end - self.theta_start


@dataclass
class EmbeddedLevelGraph:
    """One critical level curve with geometry and combinatorial structure."""

    level: float
    member: GraphMember
    vertex_locations: tuple
    vertices: list              # CriticalVertex records
    edges: list                 # TracedEdge per member edge id
    dart_rays: list             # ray angle per dart

    def face_polygon(self, key: int):
        pts = []
        for d in self.member.face_orbit(key):
            chain = self.edges[d >> 1].points
            pts.extend(chain if d % 2 == 0 else list(reversed(chain)))
        return pts

    def all_points(self):
        out = []
        for e in self.edges:
            out.extend(e.points)
        return out

    def representative_point(self) -> complex:
        return self.vertex_locations[0]

    def crossing_position(self, item) -> complex:
        """Planar position of a distinguished-point identity of the member."""
        kind = item[0]
        if kind == "v":
            return self.vertex_locations[self.member._vm()[item[1]]]
        _, e, i = item
        return self.edges[e].crossings[i]


def point_in_polygon(z: complex, polygon) -> bool:
    """Even-odd containment test, rotated to dodge axis degeneracies."""
    rot = cmath.exp(0.37123j)
    zz = z * rot
    px, py = zz.real, zz.imag
    inside = False
    n = len(polygon)
    for i in range(n):
        a = polygon[i] * rot
        b = polygon[(i + 1) % n] * rot
        if (a.imag > py) != (b.imag > py):
            t = (py - a.imag) / (b.imag - a.imag)
            x = a.real + t * (b.real - a.real)
            if x > px:
                inside = not inside
    return inside


def signed_area(polygon) -> float:
    total = 0.0
    n = len(polygon)
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        total += a.real * b.imag - b.real * a.imag
    return 0.5 * total


# ---------------------------------------------------------------------------
# local structure at a critical point
# ---------------------------------------------------------------------------


def _leading_local_coefficient(p: ComplexPoly, w: complex, k: int) -> complex:
    """Coefficient c of the local model p(z) ~ p(w) + c (z-w)^(k+1)."""
    d = p
    for _ in range(k + 1):
        d = derivative(d)
    return eval_poly(d, w) / math.factorial(k + 1)


def local_edge_directions(p: ComplexPoly, w: complex):
    """Tangent directions of the level curve through a critical point w.

    Returns (rays, outgoing) with 2(k+1) ray angles in counterclockwise order
    and, per ray, whether the argument of p increases when leaving w along it.
    """
    pw = eval_poly(p, w)
    dp = derivative(p)
    if abs(eval_poly(dp, w)) > 1e-6 * (1 + abs(w)) * max(abs(c) for c in p.coeffs):
        raise ValueError("not a critical point")
    k = 0
    d = dp
    scale = max(abs(c) for c in p.coeffs)
    while abs(eval_poly(d, w)) < 1e-7 * scale and k < p.degree:
        k += 1
        d = derivative(d)
    if abs(pw) < 1e-12 * scale:
        raise DegenerateCurveError(
            "the level curve through a zero-value critical point is the point itself"
        )
    c = _leading_local_coefficient(p, w, k)
    gamma = cmath.phase(c / pw)
    rays = []
    for j in range(2 * (k + 1)):
        phi = (math.pi / 2.0 + j * math.pi - gamma) / (k + 1.0)
        rays.append((phi % TWO_PI, j % 2 == 0))
    rays.sort(key=lambda t: t[0])
    angles = [a for a, _ in rays]
    flags = [f for _, f in rays]
    return angles, flags


def _vertex_record(p: ComplexPoly, w: complex, k: int) -> CriticalVertex:
    pw = eval_poly(p, w)
    c = _leading_local_coefficient(p, w, k)
    angles, flags = local_edge_directions(p, w)
    r_hit = (HIT_TOL * abs(pw) / abs(c)) ** (1.0 / (k + 1.0))
    return CriticalVertex(
        location=w,
        multiplicity=k,
        arg=norm_arg(cmath.phase(pw)),
        value=pw,
        rays=angles,
        outgoing=flags,
        r_hit=r_hit,
    )


# ---------------------------------------------------------------------------
# predictor-corrector marching
# ---------------------------------------------------------------------------


def _correct(p, dp, z, target, max_iter=8):
    """Newton-correct z onto p(z) = target; returns None on failure."""
    for _ in range(max_iter):
        f = eval_poly(p, z) - target
        if abs(f) < 1e-14 * (1 + abs(target)):
            return z
        d = eval_poly(dp, z)
        if d == 0:
            return None
        z = z - f / d
    f = eval_poly(p, z) - target
    return z if abs(f) < 1e-12 * (1 + abs(target)) else None


def _march_edge(tract, eps, vertices, v_start, ray_index, ds_max, max_steps=400_000):
    """Trace one edge from an outgoing ray until some vertex of the level is hit.

    Returns (v_end, end_ray_index, chain, theta_start, theta_end, crossings).
    """
    p, dp = tract.poly, tract.dp()
    features = tract.feature_points()
    vertex = vertices[v_start]
    w = vertex.location
    phi = vertex.rays[ray_index]
    direction = cmath.exp(1j * phi)

    z = w + vertex.r_hit * direction
    corrected = _correct(p, dp, z, eps * cmath.exp(1j * cmath.phase(eval_poly(p, z))))
    if corrected is not None:
        z = corrected
    # unwrapped argument; starts at the vertex argument plus a tiny advance
    theta0 = vertex.arg
    theta = theta0 + _wrap_pm(cmath.phase(eval_poly(p, z)) - vertex.arg)
    chain = [w, z]
    thetas = [theta0, theta]

    armed = False
    steps = 0
    while steps < max_steps:
        steps += 1
        dmin, nearest = min(
            ((abs(z - vv.location), i) for i, vv in enumerate(vertices)),
            key=lambda t: t[0],
        )
        if not armed and (nearest != v_start or dmin > 3.0 * vertex.r_hit):
            armed = True
        if armed and dmin < vertices[nearest].r_hit:
            return _finish_edge(
                tract, eps, vertices, nearest, z, chain, thetas, theta0
            )
        dpz = eval_poly(dp, z)
        if dpz == 0:
            raise TracingError("derivative vanished away from known vertices", z)
        # resolve nearby features, but never step across the hit radius of the
        # vertex being approached
        dfeat = min(abs(z - f) for f in features)
        step_cap = max(0.45 * min(dmin, dfeat), 0.5 * vertices[nearest].r_hit)
        ds = min(ds_max, step_cap)
        dtheta = min(MAX_DTHETA, ds * abs(dpz) / eps)
        while True:
            theta_new = theta + dtheta
            pred = z + 1j * eps * cmath.exp(1j * theta) / dpz * dtheta
            corr = _correct(p, dp, pred, eps * cmath.exp(1j * theta_new))
            if corr is not None and abs(corr - z) < 4.0 * (abs(pred - z) + 1e-300):
                modulus = abs(eval_poly(p, corr))
                if abs(modulus - eps) / eps < TUBE_RTOL:
                    break
            dtheta *= 0.5
            if dtheta < 1e-14:
                raise TracingError("step size underflow while tracing a level curve", z)
        z = corr
        theta = theta_new
        chain.append(z)
        thetas.append(theta)
        if theta - theta0 > TWO_PI * (tract.poly.degree + 1):
            raise TracingError("runaway edge trace: argument advanced too far", z)
    raise TracingError("edge trace exceeded the step budget", z)


def _wrap_pm(x: float) -> float:
    return (x + math.pi) % TWO_PI - math.pi


def _finish_edge(tract, eps, vertices, v_end, z, chain, thetas, theta0):
    p, dp = tract.poly, tract.dp()
    target = vertices[v_end]
    # snap the final unwrapped argument to the target vertex argument
    theta_last = thetas[-1]
    k = round((theta_last - target.arg) / TWO_PI)
    theta_end = target.arg + TWO_PI * k
    if abs(theta_end - theta_last) > 0.3:
        raise TracingError("arrival argument does not match the target vertex", z)
    if theta_end <= theta0 + 1e-9:
        theta_end += TWO_PI * math.ceil((theta0 + 1e-9 - theta_end) / TWO_PI)

    # incoming ray: the last chain point approaches along one of the target's
    # argument-decreasing rays
    approach = cmath.phase(z - target.location) % TWO_PI
    best, best_gap = None, math.inf
    for i, (ray, outgoing) in enumerate(zip(target.rays, target.outgoing)):
        if outgoing:
            continue
        gap = abs(_wrap_pm(approach - ray))
        if gap < best_gap:
            best, best_gap = i, gap
    sector = math.pi / len(target.rays)
    if best is None or best_gap > 2.0 * sector:
        raise TracingError("could not match the arrival direction to a ray", z)

    chain = chain + [target.location]
    thetas = thetas + [theta_end]

    # interior distinguished points: strict multiples of 2*pi of the argument
    crossings = []
    j = math.floor(theta0 / TWO_PI) + 1
    while TWO_PI * j < theta_end - 1e-9:
        t = TWO_PI * j
        if t > theta0 + 1e-9:
            idx = next(i for i in range(len(thetas) - 1) if thetas[i + 1] >= t)
            seed = chain[min(idx + 1, len(chain) - 1)]
            pt = _correct(p, dp, seed, eps)
            if pt is None:
                raise TracingError("failed to refine a distinguished point", seed)
            crossings.append(pt)
        j += 1
    return v_end, best, chain, theta0, theta_end, crossings


# ---------------------------------------------------------------------------
# critical level curves
# ---------------------------------------------------------------------------


def critical_level_curves(tract: Tract):
    """All critical level curves of the tract, as embedded graphs.

    Critical points are grouped by value modulus; within a group, connected
    components become separate graphs, ordered by descending level.
    """
    groups = {}
    for w, k in tract.spectrum.points:
        value = eval_poly(tract.poly, w)
        if abs(value) < 1e-12:
            continue    # multiple zero: the "curve" is the point itself
        for eps in groups:
            if abs(abs(value) - eps) <= LEVEL_TIE_RTOL * max(eps, 1.0):
                groups[eps].append((w, k))
                break
        else:
            groups[abs(value)] = [(w, k)]

    out = []
    for eps in sorted(groups, reverse=True):
        out.extend(_trace_level_group(tract, eps, groups[eps]))
    return out


def _trace_level_group(tract, eps, crit_points):
    vertices = [_vertex_record(tract.poly, w, k) for w, k in crit_points]
    ds_max = tract.geometry_span() / 48.0

    edges_raw = []
    consumed = set()
    for vi, vertex in enumerate(vertices):
        for ri, outgoing in enumerate(vertex.outgoing):
            if not outgoing:
                continue
            v_end, r_end, chain, th0, th1, crossings = _march_edge(
                tract, eps, vertices, vi, ri, ds_max
            )
            if (v_end, r_end) in consumed:
                raise TracingError(
                    "two traced edges arrived at the same ray", vertices[v_end].location
                )
            consumed.add((v_end, r_end))
            edges_raw.append(
                TracedEdge((vi, ri), (v_end, r_end), chain, th0, th1, crossings)
            )
    expected = {
        (vi, ri)
        for vi, v in enumerate(vertices)
        for ri, f in enumerate(v.outgoing)
        if not f
    }
    if consumed != expected:
        raise TracingError("some incoming rays were never reached", None)

    # split into connected components
    parent = list(range(len(vertices)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in edges_raw:
        a, b = find(e.start[0]), find(e.end[0])
        if a != b:
            parent[a] = b
    comps = {}
    for vi in range(len(vertices)):
        comps.setdefault(find(vi), []).append(vi)

    graphs = []
    for comp in comps.values():
        graphs.append(_assemble_component(tract, eps, vertices, edges_raw, sorted(comp)))
    return graphs


def _assemble_component(tract, eps, vertices, edges_raw, comp):
    vmap = {vi: i for i, vi in enumerate(comp)}
    edges = [e for e in edges_raw if e.start[0] in vmap]

    # darts: 2e leaves along the outgoing ray, 2e+1 sits at the arrival ray
    dart_at = {}            # (local vertex, ray index) -> dart
    dart_rays = [0.0] * (2 * len(edges))
    for eid, e in enumerate(edges):
        sv, sr = e.start
        ev, er = e.end
        dart_at[(vmap[sv], sr)] = 2 * eid
        dart_at[(vmap[ev], er)] = 2 * eid + 1
        dart_rays[2 * eid] = vertices[sv].rays[sr]
        dart_rays[2 * eid + 1] = vertices[ev].rays[er]

    rotation = []
    for vi in comp:
        v = vertices[vi]
        order = sorted(range(len(v.rays)), key=lambda r: v.rays[r])
        rotation.append(tuple(dart_at[(vmap[vi], r)] for r in order))

    member0 = GraphMember(
        level=eps,
        rotation=tuple(rotation),
        vertex_args=tuple(vertices[vi].arg for vi in comp),
        edge_marks=tuple(len(e.crossings) for e in edges),
        face_z={},
        outer_anchor=1,
    )

    # identify faces geometrically: bounded orbits must consist of the
    # increasing darts (even ids) and have positive area
    graph = EmbeddedLevelGraph(
        level=eps,
        member=member0,
        vertex_locations=tuple(vertices[vi].location for vi in comp),
        vertices=[vertices[vi] for vi in comp],
        edges=edges,
        dart_rays=dart_rays,
    )
    face_z = {}
    outer_anchor = None
    for key, orbit in member0.faces().items():
        poly = graph.face_polygon(key)
        area = signed_area(poly)
        even = all(d % 2 == 0 for d in orbit)
        if area < 0:
            if outer_anchor is not None:
                raise TracingError("found two unbounded faces", None)
            if even:
                raise TracingError("unbounded face traverses increasing darts", None)
            outer_anchor = key
        else:
            if not even:
                raise TracingError("bounded face traverses decreasing darts", None)
            z = sum(m for w, m in tract.zeros if point_in_polygon(w, poly))
            face_z[key] = z
    if outer_anchor is None:
        raise TracingError("no unbounded face identified", None)

    member = GraphMember(
        level=eps,
        rotation=member0.rotation,
        vertex_args=member0.vertex_args,
        edge_marks=member0.edge_marks,
        face_z=face_z,
        outer_anchor=outer_anchor,
    )
    graph.member = member

    # cross-check: measured argument increase around each face matches the
    # enclosed zero count
    for key, orbit in member.bounded_faces().items():
        total = sum(edges[d >> 1].delta for d in orbit)
        if abs(total - TWO_PI * face_z[key]) > 1e-6:
            raise TracingError(
                f"argument increase around a face ({total / TWO_PI:.6f} turns) "
                f"does not match its zero count {face_z[key]}",
                None,
            )
    return graph


# ---------------------------------------------------------------------------
# plain level components and winding numbers
# ---------------------------------------------------------------------------


def find_level_seed(tract: Tract, eps: float, near: complex, direction: complex = 1.0):
    """A point with |p| = eps on the ray from ``near`` along ``direction``."""
    p = tract.poly
    direction = direction / abs(direction)
    t0, f0 = 0.0, abs(eval_poly(p, near)) - eps
    t = 1e-3
    while t < 1e3:
        f = abs(eval_poly(p, near + t * direction)) - eps
        if f0 * f <= 0:
            lo, hi = t0, t
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fm = abs(eval_poly(p, near + mid * direction)) - eps
                if f0 * fm <= 0:
                    hi = mid
                else:
                    lo = mid
            return near + 0.5 * (lo + hi) * direction
        t0, f0 = t, f
        t *= 1.25
    raise TracingError("no level crossing found along the ray", near)


def trace_level_component(tract: Tract, seed: complex, eps: float, max_steps=200_000):
    """Trace the closed non-critical level curve component through ``seed``.

    Returns (chain, winding) where the chain closes at the seed and the
    winding is the number of zeros enclosed.
    """
    p, dp = tract.poly, tract.dp()
    if abs(abs(eval_poly(p, seed)) - eps) > 1e-6 * eps:
        seed2 = _correct(p, dp, seed, eps * cmath.exp(1j * cmath.phase(eval_poly(p, seed))))
        if seed2 is None:
            raise TracingError("seed does not lie on the requested level", seed)
        seed = seed2

    crit = [w for w, _ in tract.spectrum.points]
    r_hits = [_vertex_record(p, w, k).r_hit if abs(eval_poly(p, w)) > 1e-12 else 0.0
              for w, k in tract.spectrum.points]
    features = tract.feature_points()
    ds_max = tract.geometry_span() / 48.0

    z = seed
    theta = cmath.phase(eval_poly(p, z))
    theta0 = theta
    chain = [z]
    thetas = [theta]
    steps = 0
    while steps < max_steps:
        steps += 1
        dpz = eval_poly(dp, z)
        if crit:
            dmin, idx = min(((abs(z - w), i) for i, w in enumerate(crit)), key=lambda t: t[0])
            if dmin < max(r_hits[idx], 1e-12):
                raise TracingError(
                    "level curve runs through a critical point; "
                    "use critical_level_curves instead",
                    z,
                )
        dfeat = min((abs(z - f) for f in features), default=ds_max)
        ds = min(ds_max, max(0.45 * dfeat, 1e-9))
        dtheta = min(MAX_DTHETA, ds * abs(dpz) / eps)
        while True:
            theta_new = theta + dtheta
            pred = z + 1j * eps * cmath.exp(1j * theta) / dpz * dtheta
            corr = _correct(p, dp, pred, eps * cmath.exp(1j * theta_new))
            if corr is not None:
                modulus = abs(eval_poly(p, corr))
                if abs(modulus - eps) / eps < TUBE_RTOL:
                    break
            dtheta *= 0.5
            if dtheta < 1e-14:
                raise TracingError("step size underflow on a level component", z)
        z = corr
        theta = theta_new
        chain.append(z)
        thetas.append(theta)
        if theta - theta0 > math.pi and abs(z - seed) < 2.0 * abs(chain[-1] - chain[-2]):
            turns = (theta - theta0) / TWO_PI
            n = round(turns)
            if abs(turns - n) < 0.1 and n >= 1:
                chain.append(seed)
                return chain, n
        if theta - theta0 > TWO_PI * (tract.poly.degree + 1):
            raise TracingError("level component did not close", z)
    raise TracingError("level component trace exceeded the step budget", z)


def winding_number(tract: Tract, chain) -> int:
    """Change of arg(p) around a closed chain, in full turns."""
    p = tract.poly
    values = [eval_poly(p, z) for z in chain]
    mods = [abs(v) for v in values]
    eps = sum(mods) / len(mods)
    if max(abs(m - eps) for m in mods) > 1e-3 * eps:
        raise TracingError("chain does not stay on a single level", None)
    total = 0.0
    for a, b in zip(values, values[1:] + values[:1]):
        total += cmath.phase(b / a)
    turns = total / TWO_PI
    n = round(turns)
    if abs(turns - n) >= 0.1:
        raise TracingError(f"winding residual too large ({turns - n:+.3f} turns)", None)
    return n


# ---------------------------------------------------------------------------
# gradient lines
# ---------------------------------------------------------------------------


@dataclass
class GradientLine:
    points: list
    end_kind: str           # "level" | "zero" | "critical"
    end_point: complex


def trace_gradient_line(
    tract: Tract,
    start: complex,
    outward: bool,
    target_modulus: float = None,
    max_steps=200_000,
) -> GradientLine:
    """Follow a line of constant arg(p) with monotone |p| from ``start``.

    Ascends to ``target_modulus`` (default 1.0, the tract boundary) when
    ``outward``; otherwise descends, terminating at the target level, at a
    zero, or at a critical point of p (a saddle connection).
    """
    p, dp = tract.poly, tract.dp()
    if target_modulus is None:
        target_modulus = 1.0 if outward else 0.0
    pz = eval_poly(p, start)
    if abs(pz) == 0:
        raise ValueError("gradient line cannot start at a zero")
    a0 = cmath.phase(pz)
    m = math.log(abs(pz))
    m_target = math.log(target_modulus) if target_modulus > 0 else -math.inf

    crit = [(w, _vertex_record(p, w, k).r_hit if abs(eval_poly(p, w)) > 1e-12 else 1e-9)
            for w, k in tract.spectrum.points]
    zero_floor = math.log(1e-9)
    ds_max = tract.geometry_span() / 48.0

    z = start
    chain = [z]
    steps = 0
    while steps < max_steps:
        steps += 1
        if outward and m >= m_target - 1e-13:
            return GradientLine(chain, "level", z)
        if not outward and m <= max(m_target, zero_floor) + 1e-13:
            if target_modulus > 0 and m_target > zero_floor:
                return GradientLine(chain, "level", z)
            zero = min((w for w, _ in tract.zeros), key=lambda w: abs(z - w))
            chain.append(zero)
            return GradientLine(chain, "zero", zero)
        for w, r_hit in crit:
            if abs(z - w) < r_hit:
                chain.append(w)
                return GradientLine(chain, "critical", w)
        dpz = eval_poly(dp, z)
        pz = eval_poly(p, z)
        logd = dpz / pz
        if abs(logd) < 1e-14:
            raise TracingError("gradient direction vanished", z)
        dmin = min((abs(z - w) for w, _ in crit), default=math.inf)
        ds = min(ds_max, max(0.5 * dmin, 1e-10))
        if not outward:
            # do not overshoot the zero: |p| decays like the distance power
            ds = min(ds, 0.45 * abs(pz) / max(abs(dpz), 1e-300) * tract.poly.degree)
        dm = ds * abs(logd)
        dm = min(dm, 0.2)
        step = dm if outward else -dm
        target_here = m + step
        if not outward and target_here < max(m_target, zero_floor):
            target_here = max(m_target, zero_floor)
        if outward and target_here > m_target:
            target_here = m_target
        # Newton toward log p = target_here + i*a0, staying on the branch;
        # the attainable residual degrades like |p'/p| near a zero, while the
        # position error stays at machine scale
        zn = z
        ok = False
        for _ in range(40):
            pzn = eval_poly(p, zn)
            if pzn == 0:
                break
            f = (math.log(abs(pzn)) - target_here) + 1j * _wrap_pm(cmath.phase(pzn) - a0)
            dzn = eval_poly(dp, zn) / pzn
            if abs(f) < 1e-12 + 1e-14 * abs(dzn) * (1.0 + abs(zn)):
                ok = True
                break
            if dzn == 0:
                break
            zn = zn - f / dzn
        if not ok:
            # landed in a stalled zone; check for a critical point
            for w, r_hit in crit:
                if abs(zn - w) < 10 * r_hit or abs(z - w) < 10 * r_hit:
                    chain.append(w)
                    return GradientLine(chain, "critical", w)
            raise TracingError("gradient correction failed to converge", z)
        z = zn
        m = target_here
        chain.append(z)
    raise TracingError("gradient line exceeded the step budget", start)
