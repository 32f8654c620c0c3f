"""Complex polynomial arithmetic, critical data, and the critical-point -> critical-value map.

A degree-n polynomial with all critical values inside the unit disk bounds a
connected sublevel region ("tract").  The map ``theta`` sends a prescribed
list of n-1 critical points u to the critical values of the normalized
polynomial p_u (monic, p_u(0) = 0, critical points exactly u).  Fibers of
theta are solved numerically by multistart damped Newton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-12
# relative tolerance for deciding that two critical-value moduli are tied
TIE_RTOL = 1e-9


class RootFindingError(RuntimeError):
    """Root finder failed to converge; carries the best iterate found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class FiberError(RuntimeError):
    """No point of the requested theta-fiber was found."""

    def __init__(self, message, n_starts=0, best_residual=math.inf):
        super().__init__(message)
        self.n_starts = n_starts
        self.best_residual = best_residual


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial over C stored as coefficients in ascending degree order."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(complex(c) for c in self.coeffs)
        if not cs:
            raise ValueError("polynomial needs at least one coefficient")
        # strip trailing zeros but keep at least the constant term
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex) -> complex:
        return eval_poly(self, z)

    def scaled(self, s: complex) -> "ComplexPoly":
        return ComplexPoly(tuple(c * s for c in self.coeffs))

    def to_json(self):
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "ComplexPoly":
        return cls(tuple(complex(re, im) for re, im in data))


def eval_poly(p: ComplexPoly, z: complex) -> complex:
    """Horner evaluation."""
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def derivative(p: ComplexPoly) -> ComplexPoly:
    if p.degree == 0:
        return ComplexPoly((0j,))
    return ComplexPoly(tuple(k * c for k, c in enumerate(p.coeffs) if k > 0))


def _aberth_polish(coeffs: np.ndarray, roots: np.ndarray, iters: int = 40) -> np.ndarray:
    """Simultaneous (Ehrlich-Aberth) correction sweeps on a full root set."""
    roots = roots.astype(complex)
    n = len(roots)
    der = np.polyder(coeffs)
    for _ in range(iters):
        pv = np.polyval(coeffs, roots)
        dv = np.polyval(der, roots)
        newton = np.zeros_like(roots)
        ok = dv != 0
        newton[ok] = pv[ok] / dv[ok]
        # pairwise repulsion term; coincident estimates contribute nothing
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, np.inf)
        diff[diff == 0] = np.inf
        rep = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * rep
        bad = ~np.isfinite(denom) | (np.abs(denom) < 1e-30)
        step = np.where(bad, newton, newton / np.where(bad, 1.0, denom))
        if n == 1:
            step = newton
        roots = roots - step
        if np.all(np.abs(step) < 1e-15 * (1.0 + np.abs(roots))):
            break
    return roots


def _polish_multiple(p: ComplexPoly, z: complex, m: int, scale: float) -> complex:
    """Newton-polish z as a root of multiplicity m (simple root of p^(m-1))."""
    dm = p
    for _ in range(m - 1):
        dm = derivative(dm)
    dd = derivative(dm)
    for _ in range(60):
        dv = eval_poly(dd, z)
        if dv == 0:
            break
        step = eval_poly(dm, z) / dv
        z -= step
        if abs(step) < 1e-16 * scale:
            break
    return z


def _is_multiple_root(p: ComplexPoly, z: complex, m: int, tol: float) -> bool:
    """Backward-error check that p really has an m-fold root at z."""
    d = p
    for _ in range(m):
        cond = sum(abs(c) * abs(z) ** k for k, c in enumerate(d.coeffs))
        if abs(eval_poly(d, z)) > 3e4 * tol * max(cond, 1.0):
            return False
        d = derivative(d)
    return True


def _cluster_roots(p: ComplexPoly, raw: np.ndarray, tol: float, scale: float):
    """Merge root estimates into (location, multiplicity) clusters.

    A multiplicity-m root is only resolvable to ~tol^(1/m), so candidate
    groups are linked at the radius of each multiplicity, largest first; a
    merge is accepted only when the polished center genuinely carries that
    multiplicity by the derivative-residual test.
    """
    clusters = [[z] for z in raw]

    def radius(m):
        return 10.0 * scale * tol ** (1.0 / max(1, m)) if m > 1 else 1e-8 * scale

    for m in range(len(raw), 1, -1):
        r = radius(m)
        merged = True
        while merged:
            merged = False
            n = len(clusters)
            parent = list(range(n))

            def find(a):
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                return a

            cents = [sum(c) / len(c) for c in clusters]
            for i in range(n):
                for j in range(i + 1, n):
                    if abs(cents[i] - cents[j]) < r:
                        ri, rj = find(i), find(j)
                        if ri != rj:
                            parent[ri] = rj
            groups = {}
            for i in range(n):
                groups.setdefault(find(i), []).append(i)
            for members in groups.values():
                size = sum(len(clusters[i]) for i in members)
                if len(members) <= 1 or size < m:
                    continue
                pool = []
                for i in members:
                    pool.extend(clusters[i])
                center = _polish_multiple(p, sum(pool) / len(pool), size, scale)
                if not _is_multiple_root(p, center, size, tol):
                    continue
                clusters = [c for i, c in enumerate(clusters) if i not in members]
                clusters.append(pool)
                merged = True
                break
    return [(sum(c) / len(c), len(c)) for c in clusters]


def roots(p: ComplexPoly, tol: float = DEFAULT_TOL):
    """All complex roots of p as (location, multiplicity) pairs.

    Companion-matrix estimates are polished by simultaneous iteration and
    clustered; a multiplicity-m cluster is re-polished as a simple root of
    the (m-1)-th derivative.  Raises RootFindingError when the residual
    check fails.
    """
    if p.degree < 1:
        raise ValueError("degree must be >= 1 to extract roots")
    coeffs_desc = np.array(list(reversed(p.coeffs)), dtype=complex)
    raw = np.roots(coeffs_desc)
    if len(raw):
        raw = _aberth_polish(coeffs_desc, raw)
    scale = 1.0 + max((abs(z) for z in raw), default=0.0)
    clustered = _cluster_roots(p, raw, tol, scale)

    result = [(_polish_multiple(p, z0, m, scale), m) for z0, m in clustered]

    for z, m in result:
        resid = abs(eval_poly(p, z))
        # backward-error scale: the evaluation condition number at z
        cond = sum(abs(c) * abs(z) ** k for k, c in enumerate(p.coeffs))
        if resid > 1e3 * tol * max(cond, 1.0):
            raise RootFindingError(
                f"root residual {resid:.3e} exceeds tolerance at {z}", best=result
            )
    total = sum(m for _, m in result)
    if total != p.degree:
        raise RootFindingError(
            f"found {total} roots for degree {p.degree}", best=result
        )
    result.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return result


@dataclass(frozen=True)
class CriticalSpectrum:
    """Critical points (with multiplicity) and modulus-sorted critical values."""

    points: tuple          # ((location, multiplicity), ...)
    values: tuple          # critical values sorted by ascending modulus
    n: int                 # degree of the source polynomial

    def __post_init__(self):
        if sum(m for _, m in self.points) != self.n - 1:
            raise ValueError("critical point multiplicities must sum to degree-1")
        mods = [abs(v) for v in self.values]
        if any(mods[i] > mods[i + 1] + 1e-12 for i in range(len(mods) - 1)):
            raise ValueError("critical values must be sorted by modulus")

    @property
    def max_modulus(self) -> float:
        return max((abs(v) for v in self.values), default=0.0)


def critical_spectrum(p: ComplexPoly, tol: float = DEFAULT_TOL) -> CriticalSpectrum:
    """Roots of p' with multiplicities, and the values of p there."""
    if p.degree < 2:
        raise ValueError("degree must be >= 2")
    crit = roots(derivative(p), tol)
    values = []
    for z, m in crit:
        values.extend([eval_poly(p, z)] * m)
    values.sort(key=abs)
    return CriticalSpectrum(points=tuple(crit), values=tuple(values), n=p.degree)


def from_critical_points(u: Sequence[complex]) -> ComplexPoly:
    """Monic degree-n polynomial vanishing at 0 with critical points exactly u.

    p_u(z) = n * integral_0^z prod_j (t - u_j) dt,  n = len(u) + 1.
    """
    u = [complex(x) for x in u]
    n = len(u) + 1
    if n < 2:
        raise ValueError("need at least one prescribed critical point")
    prod = np.array([1.0 + 0j])
    for uj in u:
        prod = np.convolve(prod, np.array([-uj, 1.0 + 0j]))
    # integrate: coefficient of t^k becomes coefficient of z^(k+1) / (k+1)
    integ = np.concatenate([[0j], prod / np.arange(1, len(prod) + 1)])
    return ComplexPoly(tuple(n * integ))


def theta(u: Sequence[complex]):
    """Critical values (p_u(u_1), ..., p_u(u_{n-1})) of the normalized polynomial."""
    p = from_critical_points(u)
    return tuple(eval_poly(p, uj) for uj in u)


def atypicality_degree(v: Sequence[complex], tie_rtol: float = TIE_RTOL) -> int:
    """Degeneracy degree of a modulus-sorted critical-value vector.

    0 when all moduli are distinct and nonzero; 1 when exactly the first is
    zero and the rest are distinct; k >= 2 when the last tied pair sits at
    positions (k-1, k) with strict separation above.
    """
    mods = [abs(x) for x in v]
    scale = max(mods) if mods else 0.0
    tie = tie_rtol * max(scale, 1e-300)
    for i in range(len(mods) - 1):
        if mods[i] > mods[i + 1] + tie:
            raise ValueError("vector is not sorted by ascending modulus")
    # largest index k (1-based) with |v^(k-1)| = |v^(k)|
    last_tie = 0
    for k in range(2, len(mods) + 1):
        if abs(mods[k - 1] - mods[k - 2]) <= tie:
            last_tie = k
    if last_tie:
        return last_tie
    if mods and mods[0] <= tie:
        return 1
    return 0


# ---------------------------------------------------------------------------
# theta fibers: multistart damped Newton on p_u(u_i) = v_i
# ---------------------------------------------------------------------------


def _poly_from_factors(factors):
    """Coefficient array (ascending) of prod (t - w)^m over (w, m) pairs."""
    prod = np.array([1.0 + 0j])
    for w, m in factors:
        lin = np.array([-w, 1.0 + 0j])
        for _ in range(m):
            prod = np.convolve(prod, lin)
    return prod


def _integrate_coeffs(coeffs):
    return np.concatenate([[0j], coeffs / np.arange(1, len(coeffs) + 1)])


def _theta_system(points, mults, n):
    """Residual map and Jacobian for p_u(w_i) = v_i with multiplicity structure.

    d p_u / d w_k (z) = -m_k * n * integral_0^z (t-w_k)^(m_k - 1) prod_{j != k} (t-w_j)^m_j dt;
    the diagonal chain-rule term vanishes because p_u'(w_i) = 0.
    """
    s = len(points)
    full = _poly_from_factors(list(zip(points, mults)))
    p_coeffs = n * _integrate_coeffs(full)

    def peval(z, coeffs):
        acc = 0j
        for c in reversed(coeffs):
            acc = acc * z + c
        return acc

    values = np.array([peval(w, p_coeffs) for w in points])

    jac = np.zeros((s, s), dtype=complex)
    for k in range(s):
        factors = [(points[j], mults[j] - (1 if j == k else 0)) for j in range(s)]
        part = _poly_from_factors([f for f in factors if f[1] > 0])
        dk = -mults[k] * n * _integrate_coeffs(part)
        for i in range(s):
            jac[i, k] = peval(points[i], dk)
    return values, jac


def newton_theta(start, targets, mults=None, tol=DEFAULT_TOL, max_iter=80):
    """Damped Newton for the critical-value system; returns None on failure.

    ``mults`` fixes the multiplicity of each unknown critical point; the
    plain fiber solve uses all ones.
    """
    pts = np.array([complex(z) for z in start])
    tgt = np.array([complex(v) for v in targets])
    if mults is None:
        mults = [1] * len(pts)
    n = sum(mults) + 1
    res, jac = _theta_system(pts, mults, n)
    fval = res - tgt
    fnorm = np.max(np.abs(fval))
    for _ in range(max_iter):
        if fnorm < tol:
            # two polishing sweeps push the residual to machine precision
            for _ in range(2):
                try:
                    step = np.linalg.solve(jac, fval)
                except np.linalg.LinAlgError:
                    break
                cand = pts - step
                res2, jac2 = _theta_system(cand, mults, n)
                f2 = res2 - tgt
                if np.max(np.abs(f2)) <= fnorm:
                    pts, fval, jac = cand, f2, jac2
                    fnorm = np.max(np.abs(fval))
            return pts
        try:
            step = np.linalg.solve(jac, fval)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(30):
            cand = pts - lam * step
            res2, jac2 = _theta_system(cand, mults, n)
            f2 = res2 - tgt
            f2norm = np.max(np.abs(f2))
            if f2norm < fnorm:
                pts, fval, jac, fnorm = cand, f2, jac2, f2norm
                break
            lam *= 0.5
        else:
            return None
    return pts if fnorm < tol else None


def match_unordered(a, b) -> float:
    """Max matched distance between two unordered complex tuples (assignment)."""
    from scipy.optimize import linear_sum_assignment

    if len(a) != len(b):
        return math.inf
    cost = np.abs(np.array(a)[:, None] - np.array(b)[None, :])
    ri, ci = linear_sum_assignment(cost)
    return float(cost[ri, ci].max())


@dataclass
class FiberResult:
    solutions: list = field(default_factory=list)   # list of u tuples
    n_starts: int = 0
    best_residual: float = math.inf


def solve_theta_fiber(
    v: Sequence[complex],
    n_starts: int = 200,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    warm_starts=(),
    dedup_radius: float = None,
) -> FiberResult:
    """Multistart Newton on theta(u) = v; returns deduplicated solutions.

    Solutions are unordered u-tuples; duplicates are removed by minimal-cost
    matching within ``dedup_radius`` (default 1e3 * tol).  An empty result
    carries diagnostics instead of fabricating a solution.
    """
    v = tuple(complex(x) for x in v)
    m = len(v)
    if dedup_radius is None:
        dedup_radius = 1e3 * tol
    rng = np.random.default_rng(seed)
    result = FiberResult()
    kept = []

    def try_start(u0):
        sol = newton_theta(u0, v, tol=tol)
        result.n_starts += 1
        if sol is None:
            res, _ = _theta_system(np.array(u0, dtype=complex), [1] * m, m + 1)
            result.best_residual = min(
                result.best_residual, float(np.max(np.abs(res - np.array(v))))
            )
            return
        result.best_residual = 0.0
        for prev in kept:
            if match_unordered(prev, tuple(sol)) < dedup_radius:
                return
        kept.append(tuple(sol))

    for w in warm_starts:
        try_start(tuple(w))
    scales = (0.6, 1.0, 1.6)
    for i in range(n_starts):
        s = scales[i % len(scales)]
        u0 = s * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
        try_start(tuple(u0))

    result.solutions = kept
    return result
