"""Assembly of a tract's traced level curves into its configuration.

The configuration of a tract records, recursively, the nesting of the
critical level curves and zeros, together with levels, vertex arguments,
per-face zero counts, distinguished points, and the gradient correspondence
between each face boundary and the maximal curve or zero inside it.  Equal
configurations characterize conformally equivalent tracts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .configuration import Configuration, config_point
from .tracer import (
    EmbeddedLevelGraph,
    GradientLine,
    TracingError,
    Tract,
    critical_level_curves,
    point_in_polygon,
    signed_area,
    trace_gradient_line,
)

TWO_PI = 2.0 * math.pi


class ExtractionError(RuntimeError):
    pass


@dataclass
class _Item:
    """A graph or zero awaiting placement in the containment forest."""

    kind: str               # "graph" | "zero"
    graph: EmbeddedLevelGraph = None
    location: complex = 0j
    multiplicity: int = 0

    def representative(self) -> complex:
        return self.graph.representative_point() if self.kind == "graph" else self.location

    def total_zeros(self) -> int:
        return self.graph.member.Z() if self.kind == "graph" else self.multiplicity


def nesting_forest(graphs, zeros):
    """Attach every curve and zero to the innermost bounded face containing it.

    Returns (roots, children) where ``children`` maps (graph index, face key)
    to a list of item indices and ``roots`` lists the items contained in no
    face.  Zeros sitting inside some graph of value modulus zero are excluded
    beforehand by the caller.
    """
    items = [_Item("graph", graph=g) for g in graphs]
    items += [_Item("zero", location=w, multiplicity=m) for w, m in zeros]

    polygons = {}
    for gi, g in enumerate(graphs):
        for key in g.member.face_z:
            poly = g.face_polygon(key)
            polygons[(gi, key)] = (poly, abs(signed_area(poly)))

    roots = []
    children = {}
    for idx, item in enumerate(items):
        rep = item.representative()
        best = None
        for (gi, key), (poly, area) in polygons.items():
            if item.kind == "graph" and gi == idx:
                continue
            if point_in_polygon(rep, poly):
                if best is None or area < best[2]:
                    best = (gi, key, area)
        if best is None:
            roots.append(idx)
        else:
            children.setdefault((best[0], best[1]), []).append(idx)
    return items, roots, children


def _distinguished_positions(graph: EmbeddedLevelGraph, crossings):
    return [graph.crossing_position(c) for c in crossings]


def _corner_sector(graph: EmbeddedLevelGraph, dart: int, outer: bool):
    """Angular sector of the corner with departure dart ``dart``.

    Bounded-face corners span counterclockwise from the departing ray to the
    next ray; unbounded-face passages span from the previous ray to the
    departing ray.
    """
    m = graph.member
    ray_d = graph.dart_rays[dart]
    if outer:
        ray_a = graph.dart_rays[m.sigma_prev(dart)]
        lo, hi = ray_a, ray_d
    else:
        ray_b = graph.dart_rays[m.sigma_next(dart)]
        lo, hi = ray_d, ray_b
    width = (hi - lo) % TWO_PI
    if width == 0.0:
        width = TWO_PI
    return lo, width


def _sector_contains(lo: float, width: float, angle: float) -> bool:
    return (angle - lo) % TWO_PI <= width + 1e-12


def _sector_bisector(lo: float, width: float) -> float:
    return (lo + width / 2.0) % TWO_PI


def _launch_point(tract, graph, crossing):
    """Starting point just inside the face for a gradient descent."""
    kind = crossing[0]
    if kind == "e":
        return graph.crossing_position(crossing)
    dart = crossing[1]
    vm = graph.member._vm()
    v = vm[dart]
    w = graph.vertex_locations[v]
    lo, width = _corner_sector(graph, dart, outer=False)
    bis = _sector_bisector(lo, width)
    r = graph.vertices[v].r_hit
    return w + r * cmath.exp(1j * bis)


def _match_child_crossing(tract, child: EmbeddedLevelGraph, line: GradientLine, bag):
    """Identify which distinguished point of the child a gradient line hit.

    When the endpoint sits at a distinguished vertex, several passages of the
    outer boundary share that location; the angular sector the line arrived
    through picks the right one.
    """
    end = line.points[-1]
    positions = [child.crossing_position(c) for c in bag]
    if not positions:
        raise ExtractionError("child has no distinguished points")
    scale = 1.0 + max(abs(p) for p in positions)

    order = sorted(range(len(bag)), key=lambda i: abs(positions[i] - end))
    best = order[0]
    d0 = abs(positions[best] - end)
    if d0 > 1e-4 * scale:
        raise ExtractionError(
            f"gradient line ended {d0:.2e} away from every distinguished point"
        )
    contenders = [
        i for i in order if abs(positions[i] - end) < max(2.0 * d0, 1e-9 * scale)
    ]
    if len(contenders) == 1:
        return best

    # equidistant contenders must be passages of one distinguished vertex
    anchor = positions[contenders[0]]
    if any(abs(positions[i] - anchor) > 1e-9 * scale for i in contenders) or any(
        bag[i][0] != "v" for i in contenders
    ):
        raise ExtractionError("ambiguous gradient landing between distinct points")
    # approach direction, read from the first chain point clearly off the vertex
    approach = None
    for pt in reversed(line.points[:-1]):
        if abs(pt - anchor) > max(5.0 * d0, 1e-8 * scale):
            approach = pt
            break
    if approach is None:
        raise ExtractionError("gradient line too short to orient a vertex landing")
    angle = cmath.phase(approach - anchor) % TWO_PI
    matches = []
    for i in contenders:
        lo, width = _corner_sector(child, bag[i][1], outer=True)
        if _sector_contains(lo, width, angle):
            matches.append(i)
    if len(matches) != 1:
        raise ExtractionError(
            f"ambiguous vertex landing: {len(matches)} matching passages"
        )
    return matches[0]


def gradient_map_for_face(tract: Tract, graph: EmbeddedLevelGraph, face_key: int,
                          child: EmbeddedLevelGraph) -> int:
    """Gradient correspondence of a face boundary onto its child curve.

    Traces the inward gradient line from the first distinguished point of the
    face boundary and returns the index of the child's distinguished point it
    lands on; orientation preservation determines the images of the rest.
    """
    crossings = graph.member.face_crossings(face_key)
    if not crossings:
        raise ExtractionError("face boundary carries no distinguished points")
    bag = child.member.outer_crossings()
    last_error = None
    for start_index, crossing in enumerate(crossings):
        try:
            start = _launch_point(tract, graph, crossing)
            line = trace_gradient_line(
                tract, start, outward=False, target_modulus=child.level
            )
            landed = _match_child_crossing(tract, child, line, bag)
            return (landed - start_index) % len(crossings)
        except (ExtractionError, TracingError) as exc:
            last_error = exc
            continue
    raise ExtractionError(f"no usable gradient line found for the face: {last_error}")


def extract_configuration(tract: Tract) -> Configuration:
    """The configuration of a tract: its value under the level-curve map.

    Builds all critical level curves, nests curves and zeros by containment,
    extracts gradient correspondences, and returns the recursive record.  The
    output is validated and its critical values match the tract's spectrum.
    """
    graphs = critical_level_curves(tract)

    # zeros of multiplicity >= 2 at zero critical value are single points
    zero_items = list(tract.zeros)
    items, roots, children = nesting_forest(graphs, zero_items)

    def build(idx) -> Configuration:
        item = items[idx]
        if item.kind == "zero":
            return config_point(item.multiplicity)
        graph = item.graph
        gi = next(i for i, g in enumerate(graphs) if g is graph)
        node_children = {}
        node_offsets = {}
        for key in graph.member.face_z:
            kids = children.get((gi, key), [])
            if len(kids) != 1:
                raise ExtractionError(
                    f"face must contain exactly one maximal curve or zero; "
                    f"found {len(kids)}"
                )
            sub = build(kids[0])
            node_children[key] = sub
            if not sub.is_point():
                node_offsets[key] = gradient_map_for_face(
                    tract, graph, key, items[kids[0]].graph
                )
            zcount = graph.member.face_z[key]
            if sub.Z() != zcount:
                raise ExtractionError(
                    f"face zero count {zcount} does not match subtree total {sub.Z()}"
                )
        return Configuration(graph.member, node_children, node_offsets)

    if len(roots) != 1:
        raise ExtractionError(
            f"expected one maximal curve or zero in the tract, found {len(roots)}"
        )
    config = build(roots[0])

    from .configuration import validate

    problems = validate(config)
    if problems:
        raise ExtractionError("extracted configuration is invalid: " + "; ".join(problems))
    _check_value_consistency(tract, config)
    return config


def _check_value_consistency(tract: Tract, config: Configuration):
    from .configuration import critical_values_of
    from .polynomials import match_unordered

    got = critical_values_of(config)
    want = sorted(tract.spectrum.values, key=lambda w: (abs(w), w.real, w.imag))
    if len(got) != len(want):
        raise ExtractionError(
            f"configuration carries {len(got)} critical values, tract has {len(want)}"
        )
    if got and match_unordered(tuple(got), tuple(want)) > 1e-6:
        raise ExtractionError("configuration critical values do not match the tract")
