"""Constructive realization of configurations by polynomials.

Every valid configuration is the configuration of some polynomial tract.
For a typical value vector (distinct nonzero moduli) the witnesses are found
by multistart Newton on the critical-point -> critical-value system, checking
candidates by extraction until the canonical codes match.  Degenerate vectors
are reached through a ladder of vertex scatterings: each rung is realized
recursively, then the solution is carried down by collapsing it onto the
coarser multiplicity structure and re-solving the reduced system.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .configuration import (
    Configuration,
    canonical_code,
    critical_values_of,
    equals,
    scatter_perturb,
    validate,
)
from .extraction import ExtractionError, extract_configuration
from .polynomials import (
    ComplexPoly,
    atypicality_degree,
    newton_theta,
    solve_theta_fiber,
)
from .tracer import Tract, TracingError


log = logging.getLogger(__name__)


class _Deadline:
    def __init__(self, seconds):
        self.expiry = time.monotonic() + seconds

    def exceeded(self):
        return time.monotonic() > self.expiry


class RealizationError(RuntimeError):
    """No polynomial matching the requested configuration was found."""

    def __init__(self, message, found_codes=()):
        super().__init__(message)
        self.found_codes = list(found_codes)


@dataclass
class RealizeResult:
    poly: ComplexPoly
    points: tuple          # distinct critical points
    mults: tuple           # multiplicity per point
    candidates_tried: int = 0


def _value_structure(config: Configuration):
    """Distinct critical points prescribed by a configuration.

    Returns a list of (value, multiplicity): one entry per graph vertex and
    one per multiple zero.
    """
    out = []
    for _, node in config.walk():
        if node.is_point():
            if node.member.Z >= 2:
                out.append((0j, node.member.Z - 1))
        else:
            g = node.member
            for v in range(g.n_vertices):
                a = g.vertex_args[v]
                val = g.level * complex(math.cos(a), math.sin(a))
                out.append((val, g.vertex_multiplicity(v)))
    return out


def _poly_from_structure(points, mults) -> ComplexPoly:
    prod = np.array([1.0 + 0j])
    for w, m in zip(points, mults):
        for _ in range(m):
            prod = np.convolve(prod, np.array([-w, 1.0 + 0j]))
    n = sum(mults) + 1
    integ = np.concatenate([[0j], prod / np.arange(1, len(prod) + 1)])
    return ComplexPoly(tuple(n * integ))


def _try_match(config, code, points, mults, found_codes):
    """Extract the candidate polynomial and compare configurations."""
    p = _poly_from_structure(points, mults)
    try:
        tract = Tract.from_poly(p)
        candidate = extract_configuration(tract)
    except (TracingError, ExtractionError, ValueError):
        return None
    ccode = canonical_code(candidate)
    found_codes.add(ccode.data)
    if ccode == code:
        return RealizeResult(poly=p, points=tuple(points), mults=tuple(mults))
    return None


def realize(
    config: Configuration,
    n_starts: int = 400,
    seed: int = 0,
    ladder_nu: float = None,
    tol: float = 1e-12,
    budget: float = 180.0,
    _deadline: _Deadline = None,
) -> RealizeResult:
    """A polynomial whose tract has the given configuration.

    ``budget`` bounds the total wall-clock search time in seconds.  Raises
    RealizationError (carrying the configurations that were found) when the
    budget is exhausted without a match; a mismatched polynomial is never
    returned.  Searches for heavily degenerate value vectors can stall at
    fiber multiplicities; such stalls are reported, not resolved.
    """
    problems = validate(config)
    if problems:
        raise ValueError("configuration is invalid: " + "; ".join(problems))
    if config.is_point() and config.member.Z == 1:
        raise ValueError("a single simple zero corresponds to degree 1; need degree >= 2")

    deadline = _deadline or _Deadline(budget)
    values = critical_values_of(config)
    code = canonical_code(config)
    found_codes = set()

    M = atypicality_degree(values)
    if M == 0:
        result = _realize_typical(
            config, code, values, n_starts, seed, tol, found_codes, deadline
        )
    else:
        result = _realize_atypical(
            config, code, values, n_starts, seed, ladder_nu, tol, found_codes, deadline
        )
    if result is None:
        reason = "budget exhausted" if deadline.exceeded() else "search space exhausted"
        raise RealizationError(
            f"no polynomial with the requested configuration found; {reason} "
            f"({len(found_codes)} distinct configurations encountered)",
            found_codes,
        )
    return result


def _realize_typical(config, code, values, n_starts, seed, tol, found_codes, deadline):
    fiber = solve_theta_fiber(values, n_starts=n_starts, tol=tol, seed=seed)
    tried = 0
    for u in fiber.solutions:
        if deadline.exceeded():
            return None
        tried += 1
        hit = _try_match(config, code, u, (1,) * len(u), found_codes)
        if hit is not None:
            hit.candidates_tried = tried
            return hit
    return None


def _collapse_starts(rung_points, rung_mults, rung_values, structure):
    """Warm starts for the reduced system of a coarser value structure.

    Expands both sides by multiplicity, matches by value distance, and
    averages the matched locations per target node.
    """
    expanded_pts = []
    expanded_vals = []
    for w, m, v in zip(rung_points, rung_mults, rung_values):
        expanded_pts.extend([w] * m)
        expanded_vals.extend([v] * m)
    target_nodes = []
    for i, (v, m) in enumerate(structure):
        target_nodes.extend([i] * m)
    cost = np.zeros((len(target_nodes), len(expanded_pts)))
    for r, node in enumerate(target_nodes):
        for c, val in enumerate(expanded_vals):
            cost[r, c] = abs(structure[node][0] - val)
    rows, cols = linear_sum_assignment(cost)
    sums = [0j] * len(structure)
    counts = [0] * len(structure)
    for r, c in zip(rows, cols):
        node = target_nodes[r]
        sums[node] += expanded_pts[c]
        counts[node] += 1
    return [sums[i] / counts[i] for i in range(len(structure))]


def _realize_atypical(
    config, code, values, n_starts, seed, ladder_nu, tol, found_codes, deadline
):
    structure = _value_structure(config)
    target_vals = [v for v, _ in structure]
    target_mults = [m for _, m in structure]

    from .configuration import _min_modulus_gap

    gap = _min_modulus_gap(values)
    headroom = 1.0 - abs(values[-1]) if values else 1.0
    nu = ladder_nu if ladder_nu is not None else 0.5 * min(gap, headroom, 0.2)

    attempt = 0
    while nu > 1e-8 and attempt < 8 and not deadline.exceeded():
        attempt += 1
        try:
            rung = scatter_perturb(config, nu)
        except ValueError:
            nu *= 0.5
            continue
        log.debug("ladder attempt %d: nu=%.3e, %d values", attempt, nu, len(values))
        try:
            rung_result = realize(
                rung,
                n_starts=n_starts,
                seed=seed + attempt,
                ladder_nu=nu / 2.0,
                tol=tol,
                _deadline=deadline,
            )
        except RealizationError as exc:
            log.debug("ladder attempt %d: rung realization failed (%s)", attempt, exc)
            found_codes.update(exc.found_codes)
            nu *= 0.5
            continue

        p_hat = rung_result.poly
        rung_values = [
            complex(p_hat(w)) for w in rung_result.points
        ]
        starts = _collapse_starts(
            rung_result.points, rung_result.mults, rung_values, structure
        )
        u = newton_theta(starts, target_vals, mults=target_mults, tol=tol, max_iter=300)
        if u is None:
            # walk part of the way before collapsing
            u = _path_then_collapse(
                rung_result, rung_values, structure, target_vals, target_mults, tol
            )
        if u is None:
            log.debug("ladder attempt %d: collapse did not converge", attempt)
        else:
            hit = _try_match(config, code, tuple(u), tuple(target_mults), found_codes)
            if hit is not None:
                return hit
            log.debug("ladder attempt %d: collapsed witness did not match", attempt)
        nu *= 0.5
    return None


def _path_then_collapse(rung_result, rung_values, structure, target_vals, target_mults, tol):
    """Continuation along the straight value path, collapsing at the end."""
    # each rung node walks toward the nearest target value (several rung
    # nodes may share a goal; they coalesce at the final collapse)
    goal = [
        min((tv for tv, _ in structure), key=lambda tv: abs(v - tv))
        for v in rung_values
    ]

    pts = list(rung_result.points)
    mults = list(rung_result.mults)
    t = 0.0
    step = 0.25
    while t < 0.999 and step > 1e-6:
        t_next = min(t + step, 0.999)
        targets = [
            (1 - t_next) * v + t_next * g for v, g in zip(rung_values, goal)
        ]
        sol = newton_theta(pts, targets, mults=mults, tol=tol)
        if sol is None:
            step *= 0.5
            continue
        pts = list(sol)
        t = t_next
        step = min(2 * step, 0.25)
    if t < 0.999:
        return None
    here_vals = [complex(_poly_from_structure(pts, mults)(w)) for w in pts]
    starts = _collapse_starts(pts, mults, here_vals, structure)
    return newton_theta(starts, target_vals, mults=target_mults, tol=tol, max_iter=300)


def equivalent(t1: Tract, t2: Tract) -> bool:
    """Decide conformal equivalence of two tracts by configuration equality."""
    return equals(extract_configuration(t1), extract_configuration(t2))


def fiber_configurations(values, n_starts=400, seed=0, tol=1e-12):
    """All distinct configurations realized over a typical value vector.

    Solves the critical-point system from many starts, extracts each distinct
    solution, and returns {canonical code bytes: (configuration, witness)}.
    """
    fiber = solve_theta_fiber(values, n_starts=n_starts, tol=tol, seed=seed)
    out = {}
    for u in fiber.solutions:
        p = _poly_from_structure(u, (1,) * len(u))
        try:
            cfg = extract_configuration(Tract.from_poly(p))
        except (TracingError, ExtractionError, ValueError):
            continue
        key = canonical_code(cfg).data
        if key not in out:
            out[key] = (cfg, p)
    return out
