"""Critical points, level-set preimages, and the sum identities.

Works on any object with the dense-profile interface (u, du, d2u,
segments, integrate): integrator output and synthetic analytic profiles
alike.  Near-critical levels are refused rather than regularized, since
1/|u'| diverges there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateCritical, DomainError, LevelTooCloseToCritical
from .problem import ProblemSpec

LEVEL_MARGIN_FACTOR = 1e-4   # margin = factor * value range


@dataclass
class CriticalPoint:
    x: float
    value: float
    second_deriv: float
    on_boundary: bool
    degenerate: bool


@dataclass
class CriticalPointSet:
    points: list
    all_critical: bool = False

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def values(self):
        return [cp.value for cp in self.points]


@dataclass
class LevelSetReport:
    q: float
    regular_points: list             # (x, u'(x))
    critical_points: list            # CriticalPoint at this level
    regular_sum: float = None
    signed_sum: float = None
    critical_sum: float = None

    @property
    def n_regular(self):
        return len(self.regular_points)

    @property
    def n_critical(self):
        return len(self.critical_points)


def critical_points(profile, spec: ProblemSpec = None, crit_tol: float = None) -> CriticalPointSet:
    """All zeros of u' on [0,1]: dense sampling at 4x node resolution plus
    bisection polish.  Boundary points are included whenever |u'| is below
    tolerance there (always, for solution profiles).
    """
    if crit_tol is None:
        crit_tol = spec.tol.crit_tol if spec is not None else 1e-8
    xs = profile.sample_grid(4)
    du = np.asarray(profile.du(xs), dtype=float)
    scale = max(float(np.max(np.abs(du))), 1e-300)
    if scale <= crit_tol:
        return CriticalPointSet(points=[], all_critical=True)

    locs = []
    if abs(du[0]) <= crit_tol * scale:
        locs.append(0.0)
    for i in range(len(xs) - 1):
        if du[i] == 0.0:
            if 0.0 < xs[i] < 1.0:
                locs.append(float(xs[i]))
            continue
        if du[i] * du[i + 1] < 0.0:
            r = brentq(lambda x: float(profile.du(x)), xs[i], xs[i + 1], xtol=1e-14)
            if 1e-9 < r < 1.0 - 1e-9:   # boundary hits are handled as boundaries
                locs.append(r)
    if abs(du[-1]) <= crit_tol * scale:
        locs.append(1.0)

    pts = []
    for x in locs:
        if pts and abs(x - pts[-1].x) < 1e-10:
            continue
        d2 = float(profile.d2u(x))
        pts.append(
            CriticalPoint(
                x=float(x),
                value=float(profile.u(x)),
                second_deriv=d2,
                on_boundary=(x <= 0.0 or x >= 1.0),
                degenerate=abs(d2) <= crit_tol,
            )
        )
    return CriticalPointSet(points=pts)


def _value_range(profile):
    vals = profile.u(profile.sample_grid(4))
    return float(np.min(vals)), float(np.max(vals))


def level_set_at(profile, q: float, spec: ProblemSpec = None, crit_pts: CriticalPointSet = None) -> LevelSetReport:
    """All preimages of the level q, classified regular/critical.

    Roots of u(x) = q are located by bisection on each monotone piece
    between consecutive critical points.
    """
    cps = crit_pts if crit_pts is not None else critical_points(profile, spec)
    if cps.all_critical:
        raise DomainError("constant profile: every point is critical")
    vmin, vmax = _value_range(profile)
    margin = LEVEL_MARGIN_FACTOR * max(vmax - vmin, 1e-300)

    crit_here = []
    for cp in cps.points:
        d = abs(q - cp.value)
        if d <= 0.01 * margin:
            crit_here.append(cp)
        elif d < margin:
            raise LevelTooCloseToCritical(
                f"q = {q:.6g} is within the ill-conditioned margin of critical value {cp.value:.6g}"
            )

    edges = sorted({0.0, 1.0} | {cp.x for cp in cps.points})
    regular = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        ulo, uhi = float(profile.u(lo)), float(profile.u(hi))
        if (ulo - q) * (uhi - q) < 0.0:
            x = brentq(lambda x: float(profile.u(x)) - q, lo, hi, xtol=1e-14)
            regular.append((float(x), float(profile.du(x))))
    # drop regular hits that duplicate critical points
    crit_xs = [cp.x for cp in crit_here]
    regular = [
        (x, d) for x, d in regular if all(abs(x - cx) > 1e-9 for cx in crit_xs)
    ]
    regular.sort()
    return LevelSetReport(q=q, regular_points=regular, critical_points=crit_here)


def regular_sum(profile, phi, q: float, spec: ProblemSpec = None, report: LevelSetReport = None) -> float:
    """Sum of phi(p)/|u'(p)| over the regular preimages of q in (0,1)."""
    rep = report if report is not None else level_set_at(profile, q, spec)
    if rep.critical_points:
        raise LevelTooCloseToCritical(f"q = {q:.6g} is a critical value")
    total = 0.0
    for x, du in rep.regular_points:
        if not (0.0 < x < 1.0):
            continue  # Neumann profiles have no regular boundary preimages
        total += float(phi(x)) / abs(du)
    return total


def signed_sum(profile, phi, q: float, spec: ProblemSpec = None, report: LevelSetReport = None) -> float:
    """Sum of phi(p) * sign(u'(p)) over the regular preimages (orbit test form)."""
    rep = report if report is not None else level_set_at(profile, q, spec)
    total = 0.0
    for x, du in rep.regular_points:
        if not (0.0 < x < 1.0):
            continue
        total += float(phi(x)) * np.sign(du)
    return total


def critical_sum(profile, phi, q: float, spec: ProblemSpec = None, report: LevelSetReport = None) -> float:
    """Sum of phi(p)/sqrt|u''(p)|: interior weight 1, boundary weight 1/2."""
    rep = report if report is not None else level_set_at(profile, q, spec)
    if not rep.critical_points:
        raise DomainError(f"q = {q:.6g} has no critical preimages")
    total = 0.0
    for cp in rep.critical_points:
        if cp.degenerate:
            raise DegenerateCritical(f"degenerate critical point at x = {cp.x:.6g}")
        w = 0.5 if cp.on_boundary else 1.0
        total += w * float(phi(cp.x)) / np.sqrt(abs(cp.second_deriv))
    return total


def level_report(profile, phi, q: float, spec: ProblemSpec = None) -> LevelSetReport:
    """Full report: preimages plus both sums (whichever are defined)."""
    rep = level_set_at(profile, q, spec)
    rep.signed_sum = signed_sum(profile, phi, q, report=rep)
    if rep.critical_points:
        rep.critical_sum = critical_sum(profile, phi, q, report=rep)
    else:
        rep.regular_sum = regular_sum(profile, phi, q, report=rep)
    return rep


def orthogonality_residuals(profile, phi, max_degree: int = 10):
    """Integrals of u(x)^k * phi(x) over [0,1] for k = 0..max_degree.

    The monomial basis is the computable proxy for "all continuous f".
    """
    out = []
    for k in range(max_degree + 1):
        out.append(profile.integrate(lambda x: profile.u(x) ** k * phi(x)))
    return out


def q_orbit_test(profile, Phi, tol: float = 1e-8, n_levels: int = 100, spec: ProblemSpec = None):
    """True iff Phi is constant on level sets of u away from critical values.

    This is the computable content of "Phi(x) = g(u(x)) at regular points".
    On failure, returns (False, (q, p_i, p_j)).
    """
    cps = critical_points(profile, spec)
    vmin, vmax = _value_range(profile)
    margin = 2.0 * LEVEL_MARGIN_FACTOR * (vmax - vmin)
    crit_vals = cps.values()
    scale = max(float(np.max(np.abs(Phi(profile.sample_grid(2))))), 1e-300)

    qs = np.linspace(vmin + margin, vmax - margin, n_levels)
    for q in qs:
        if any(abs(q - v) < margin for v in crit_vals):
            continue
        rep = level_set_at(profile, q, spec, crit_pts=cps)
        pts = [x for x, _ in rep.regular_points]
        vals = [float(Phi(x)) for x in pts]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(vals[i] - vals[j]) > tol * scale:
                    return False, (float(q), pts[i], pts[j])
    return True, None
