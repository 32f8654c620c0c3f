"""Enumeration and counting of configurations with a generic value vector.

When all critical-value moduli are distinct and nonzero, every curve in a
configuration carries exactly one simple vertex, hence is a figure-eight.
The recursive assembly below generates all candidates (value subsets per
face, child configurations, gradient alignments) and deduplicates them by
canonical code; the count matches the closed form n^(n-3).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .configuration import (
    Configuration,
    canonical_code,
    config_point,
    figure_eight,
)
from .polynomials import atypicality_degree


def count_generic(n: int) -> int:
    """Number of distinct configurations with n-1 generic critical values."""
    if n < 2:
        raise ValueError("degree must be at least 2")
    if n == 2:
        return 1
    return n ** (n - 3)


def riordan_sum(m: int) -> Fraction:
    """Full-range symmetric sum equal to (m+2)^(m-1), in exact arithmetic.

    sum_{i=0}^{m} 1/2 C(m,i) (i+1)^(i-1) (m-i+1)^(m-i-1).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    total = Fraction(0)
    for i in range(m + 1):
        a = Fraction(i + 1) ** (i - 1)
        b = Fraction(m - i + 1) ** (m - i - 1)
        total += Fraction(math.comb(m, i), 2) * a * b
    return total


def _check_generic(v):
    mods = [abs(x) for x in v]
    if atypicality_degree(sorted(v, key=abs)) != 0:
        raise ValueError("value vector must have distinct nonzero moduli")
    return sorted(v, key=abs)


def _assemblies(values):
    """All raw configurations carrying exactly ``values`` (sorted ascending).

    Returns a list of Configuration; duplicates (under canonical equality)
    are produced and must be removed by the caller.
    """
    if not values:
        return [config_point(1)]
    top = values[-1]
    rest = values[:-1]
    level = abs(top)
    arg = cmath.phase(top) % (2 * math.pi)

    out = []
    m = len(rest)
    for mask in range(1 << m):
        left = [rest[i] for i in range(m) if mask & (1 << i)]
        right = [rest[i] for i in range(m) if not mask & (1 << i)]
        z1, z2 = len(left) + 1, len(right) + 1
        # distinguished-point counts per petal follow from the vertex argument
        from .configuration import quantize_arg

        dist_vertex = quantize_arg(arg) == 0
        n1 = z1 - 1 if dist_vertex else z1
        n2 = z2 - 1 if dist_vertex else z2
        member = figure_eight(level, arg, (n1, n2), z1, z2)
        for c1 in _assemblies(left):
            for c2 in _assemblies(right):
                off1 = range(z1) if not c1.is_point() else (None,)
                off2 = range(z2) if not c2.is_point() else (None,)
                for o1 in off1:
                    for o2 in off2:
                        offsets = {}
                        if o1 is not None:
                            offsets[0] = o1
                        if o2 is not None:
                            offsets[2] = o2
                        out.append(
                            Configuration(member, {0: c1, 2: c2}, offsets)
                        )
    return out


def enumerate_generic(v):
    """All distinct configurations whose critical values are exactly v.

    Requires a generic vector (distinct nonzero moduli).  Candidates are
    assembled recursively over figure-eight curves and deduplicated by
    canonical code.
    """
    values = _check_generic(list(v))
    seen = {}
    for cfg in _assemblies(values):
        code = canonical_code(cfg)
        if code not in seen:
            seen[code] = cfg
    return list(seen.values())
