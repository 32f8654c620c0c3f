"""Deterministic SVG rendering of level-curve families of a tract.

Draws the requested level sets, the critical level curves, zeros, critical
points, distinguished points, and (optionally) the gradient lines realizing
the face correspondences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tracer import (
    Tract,
    TracingError,
    critical_level_curves,
    find_level_seed,
    trace_level_component,
)


def trace_level_set(tract: Tract, eps: float):
    """All components of {|p| = eps}, as closed chains.

    Seeds radiate from every zero and from far outside; components already
    traced absorb later seeds that land on them.
    """
    crit_mods = {abs(v) for v in tract.spectrum.values}
    for cm in crit_mods:
        if cm > 0 and abs(eps - cm) < 1e-7 * max(cm, 1.0):
            graphs = [g for g in critical_level_curves(tract)
                      if abs(g.level - eps) < 1e-6 * max(eps, 1.0)]
            return [e.points for g in graphs for e in g.edges]

    chains = []

    def absorbed(z):
        for chain in chains:
            step = max(abs(a - b) for a, b in zip(chain, chain[1:]))
            if min(abs(z - w) for w in chain) < 2.0 * step:
                return True
        return False

    seeds = []
    for w, _ in tract.zeros:
        for k in range(4):
            seeds.append((w, complex(math.cos(k * math.pi / 2 + 0.1),
                                     math.sin(k * math.pi / 2 + 0.1))))
    center = sum(w for w, _ in tract.zeros) / max(1, len(tract.zeros))
    seeds.append((center, 1.0 + 0.1j))

    for near, direction in seeds:
        try:
            seed = find_level_seed(tract, eps, near, direction)
        except TracingError:
            continue
        if absorbed(seed):
            continue
        try:
            chain, _ = trace_level_component(tract, seed, eps)
        except TracingError:
            continue
        chains.append(chain)
    return chains


@dataclass
class RenderOptions:
    width: int = 640
    show_gradients: bool = False
    show_distinguished: bool = True
    margin: float = 0.15


def render_svg(tract: Tract, levels, options: RenderOptions = None) -> str:
    """SVG drawing of the tract's level curves at the given levels."""
    options = options or RenderOptions()
    layers = []      # (points, css class, closed)
    markers = []     # (point, css class, radius)

    for eps in sorted(levels):
        if not 0.0 < eps <= 1.0:
            raise ValueError("levels must lie in (0, 1]")
        for chain in trace_level_set(tract, eps):
            layers.append((chain, "level", True))

    graphs = critical_level_curves(tract)
    for g in graphs:
        for e in g.edges:
            layers.append((e.points, "critical", False))
            if options.show_distinguished:
                for pt in e.crossings:
                    markers.append((pt, "distinguished", 3.0))
        for w in g.vertex_locations:
            markers.append((w, "vertex", 4.0))
    for w, _ in tract.zeros:
        markers.append((w, "zero", 4.0))

    if options.show_gradients:
        from .tracer import trace_gradient_line

        for g in graphs:
            for e in g.edges:
                for pt in e.crossings:
                    try:
                        line = trace_gradient_line(tract, pt, outward=False)
                        layers.append((line.points, "gradient", False))
                    except TracingError:
                        continue

    pts = [p for chain, _, _ in layers for p in chain] + [p for p, _, _ in markers]
    if not pts:
        pts = [0j, 1 + 1j]
    xs = [p.real for p in pts]
    ys = [p.imag for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = options.margin * span
    x0, x1 = x0 - pad, x1 + pad
    y0, y1 = y0 - pad, y1 + pad
    w = options.width
    h = int(w * (y1 - y0) / (x1 - x0))
    scale = w / (x1 - x0)

    def sx(p):
        return (p.real - x0) * scale

    def sy(p):
        return h - (p.imag - y0) * scale

    def path(chain, closed):
        coords = " L".join(f"{sx(p):.2f},{sy(p):.2f}" for p in chain)
        return f"M{coords}" + (" Z" if closed else "")

    css = (
        ".level{fill:none;stroke:#4a78b0;stroke-width:1}"
        ".critical{fill:none;stroke:#b03030;stroke-width:1.6}"
        ".gradient{fill:none;stroke:#808080;stroke-width:0.8;stroke-dasharray:4 3}"
        ".zero{fill:#202020}"
        ".vertex{fill:#b03030}"
        ".distinguished{fill:none;stroke:#207020;stroke-width:1.2}"
    )
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f"<style>{css}</style>",
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    for chain, cls, closed in layers:
        parts.append(f'<path class="{cls}" d="{path(chain, closed)}"/>')
    for p, cls, r in markers:
        parts.append(f'<circle class="{cls}" cx="{sx(p):.2f}" cy="{sy(p):.2f}" r="{r}"/>')
    parts.append("</svg>")
    return "\n".join(parts)
