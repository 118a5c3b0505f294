"""Equilibrium search via the shooting map m(u0) = u'(1; u0).

The search space is one-dimensional: u'(0) = 0 is forced by the Neumann
condition, so equilibria are parametrized by u0 = u(0) alone.  The
search window is the computable bound |u(0)| <= scan_bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ZeroPolynomial
from .integrate import integrate_ivp, integrate_variational, shoot_endpoints_batch
from .problem import ProblemSpec
from .profiles import Profile

_MIN_GRID = 513          # >= 512 scan cells
_MAX_GRID = 8193


@dataclass
class EquilibriumRecord:
    u0: float
    profile: Profile
    is_constant: bool
    miss: float                      # u'(1) residual
    miss_slope: float                # v'(1)
    multiplicity: int = 1            # >1 only for repeated roots of f
    critical_points: list = field(default_factory=list)   # filled by levelsets
    spectrum: object = None                               # filled by spectrum
    flags: dict = field(default_factory=lambda: {"hyperbolic": "unknown", "exceptional": "unknown"})

    def variational(self, spec):
        return integrate_variational(spec, self.profile)


@dataclass
class ShootingScan:
    grid: np.ndarray
    misses: np.ndarray               # NaN marks excluded (blow-up) cells
    brackets: list                   # (u_lo, u_hi) sign-change intervals
    exact_roots: list                # grid points where m is exactly zero
    tangencies: list                 # (u_lo, u_hi, min|m|) dips without sign change
    excluded: list                   # u0 cells where integration blew up


def constant_equilibria(spec: ProblemSpec):
    """Real roots of f in [-scan_bound, scan_bound] with multiplicity."""
    if spec.f_is_zero:
        raise ZeroPolynomial("f is identically zero: continuum of equilibria")
    roots = P.polyroots(spec.f_coeffs)
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9 and abs(r.real) <= spec.scan_bound)
    out = []
    for r in real:
        if out and abs(r - out[-1][0]) < 1e-9:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((r, 1))
    return out


def shooting_miss(spec: ProblemSpec, u0: float):
    """(m, m_slope) = (u'(1; u0), v'(1; u0)) via dense integrations."""
    base = integrate_ivp(spec, u0)
    var = integrate_variational(spec, base)
    a1 = float(spec.a(1.0))
    return float(base.states[-1, 1]) / a1, float(var.states[-1, 1]) / a1


def _scan(spec: ProblemSpec, threads=1) -> ShootingScan:
    """Uniform scan of m(u0), doubled until the sign-change count stabilizes.

    threads is accepted for interface symmetry; cells are batched into
    stacked ODE systems, which outperforms thread-level parallelism here.
    """
    cache = {}
    a1 = float(spec.a(1.0))

    def fill(grid):
        todo = np.array([u for u in grid if u not in cache])
        if len(todo):
            for u, p1 in zip(todo, shoot_endpoints_batch(spec, todo)):
                cache[u] = p1 / a1
        return np.array([cache[u] for u in grid])

    def count_sign_changes(ms):
        n = 0
        prev = None
        for v in ms:
            if np.isnan(v):
                prev = None
                continue
            if prev is not None and v * prev < 0.0:
                n += 1
            if v != 0.0:
                prev = v
        return n

    n = _MIN_GRID
    history = []
    while True:
        grid = np.linspace(-spec.scan_bound, spec.scan_bound, n)
        ms = fill(grid)
        history.append(count_sign_changes(ms))
        if len(history) >= 2 and history[-1] == history[-2]:
            break
        if n >= _MAX_GRID:
            break
        n = 2 * n - 1  # nested refinement, cache reuse

    brackets, exact_roots, tangencies, excluded = [], [], [], []
    scale = np.nanmax(np.abs(ms)) if np.any(np.isfinite(ms)) else 1.0
    tang_tol = max(1e-8, 100.0 * spec.tol.root_tol) * max(1.0, scale)
    for i in range(len(grid)):
        if np.isnan(ms[i]):
            excluded.append(float(grid[i]))
        elif ms[i] == 0.0:
            exact_roots.append(float(grid[i]))
    for i in range(len(grid) - 1):
        mlo, mhi = ms[i], ms[i + 1]
        if np.isnan(mlo) or np.isnan(mhi) or mlo == 0.0 or mhi == 0.0:
            continue
        if mlo * mhi < 0.0:
            brackets.append((float(grid[i]), float(grid[i + 1])))
        elif min(abs(mlo), abs(mhi)) < tang_tol:
            # candidate tangency: keep only local minima of |m|
            if (i == 0 or np.isnan(ms[i - 1]) or abs(ms[i - 1]) >= abs(mlo)) and abs(mlo) <= abs(mhi):
                tangencies.append((float(grid[i]), float(grid[i + 1]), float(min(abs(mlo), abs(mhi)))))
    return ShootingScan(grid=grid, misses=ms, brackets=brackets, exact_roots=exact_roots,
                        tangencies=tangencies, excluded=excluded)


def _refine_root(spec: ProblemSpec, lo: float, hi: float):
    """Safeguarded Newton (slope from the variational solve) in a bracket."""
    root_tol = spec.tol.root_tol
    m_lo, _ = shooting_miss(spec, lo)
    if m_lo == 0.0:
        return lo
    m_hi, _ = shooting_miss(spec, hi)
    if m_hi == 0.0:
        return hi
    u = 0.5 * (lo + hi)
    best_u, best_m = lo, abs(m_lo)
    for _ in range(80):
        m, slope = shooting_miss(spec, u)
        if abs(m) < best_m:
            best_u, best_m = u, abs(m)
        if m == 0.0:
            return u
        if m_lo * m < 0.0:
            hi = u
        else:
            lo, m_lo = u, m
        converged_m = abs(m) <= 1e-2 * root_tol * max(1.0, abs(slope))
        if converged_m or hi - lo < root_tol:
            break
        u_new = u - m / slope if slope != 0.0 else 0.5 * (lo + hi)
        if not (lo < u_new < hi):
            u_new = 0.5 * (lo + hi)
        u = u_new
    return best_u


def _make_record(spec: ProblemSpec, u0: float, is_constant=False, multiplicity=1):
    profile = integrate_ivp(spec, u0)
    var = integrate_variational(spec, profile)
    a1 = float(spec.a(1.0))
    return EquilibriumRecord(
        u0=float(u0),
        profile=profile,
        is_constant=is_constant,
        miss=float(profile.states[-1, 1]) / a1,
        miss_slope=float(var.states[-1, 1]) / a1,
        multiplicity=multiplicity,
    )


def find_equilibria(spec: ProblemSpec, threads=1):
    """All equilibria with |u(0)| <= scan_bound: scan, refine, merge constants.

    Returns (records, scan).  Unresolved tangencies are reported on the
    scan object, not raised.
    """
    if spec.f_is_zero:
        raise ZeroPolynomial("f is identically zero")
    scan = _scan(spec, threads=threads)
    roots = [_refine_root(spec, lo, hi) for lo, hi in scan.brackets] + scan.exact_roots

    constants = constant_equilibria(spec)
    dedup_tol = 10.0 * spec.tol.root_tol
    records = [_make_record(spec, r, is_constant=True, multiplicity=mult) for r, mult in constants]
    for r in sorted(roots):
        rec = _make_record(spec, r)
        dup = None
        for existing in records:
            if abs(existing.u0 - rec.u0) < max(dedup_tol, 1e-7 * max(1.0, abs(rec.u0))):
                dup = existing
                break
        if dup is None:
            records.append(rec)
        elif abs(rec.miss) < abs(dup.miss) and not dup.is_constant:
            records[records.index(dup)] = rec
    records.sort(key=lambda rec: rec.u0)
    return records, scan
