"""Exceptional-equilibrium classification and related identities.

A nonconstant equilibrium is exceptional when (1) it is not hyperbolic,
(2) every critical point has a same-value partner, and (3) the
linearized solution separates values at partners of both endpoints.
Conditions are evaluated in short-circuit order 1 -> 2 -> 3; a spectral
"undecided" never silently becomes a boolean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import CriticalPointLost, DegenerateCritical, DomainError
from .integrate import integrate_ivp, integrate_variational
from .levelsets import critical_points
from .problem import ProblemSpec
from .profiles import Profile


@dataclass
class ExceptionalVerdict:
    condition1: str                      # 'hyperbolic' | 'non_hyperbolic' | 'undecided'
    condition2: bool = None              # every critical point has a same-value partner
    condition3: bool = None              # lve solution separates endpoint partners
    overall: str = "nonexceptional"      # 'exceptional' | 'nonexceptional' | 'undecided'
    witnesses: list = field(default_factory=list)


def intzero_integral(spec: ProblemSpec, profile, p: float, pbar: float) -> float:
    """(1/2) * integral over [p, pbar] of a'(x) u'(x)^2 dx.

    Vanishes for equilibrium profiles whenever u(p) = u(pbar) and both
    points are critical.
    """
    if not (0.0 <= p < pbar <= 1.0):
        raise DomainError(f"need 0 <= p < pbar <= 1, got ({p}, {pbar})")
    return 0.5 * profile.integrate(lambda x: spec.da(x) * profile.du(x) ** 2, p, pbar)


def same_value_pairs(spec: ProblemSpec, profile, crit_pts=None):
    """All pairs of distinct critical points sharing a value (within tolerance)."""
    cps = crit_pts if crit_pts is not None else critical_points(profile, spec)
    vals = profile.u(profile.sample_grid(2))
    vrange = max(float(np.max(vals) - np.min(vals)), 1e-300)
    tol = spec.tol.sum_tol * vrange
    pts = cps.points
    pairs = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i].value - pts[j].value) <= tol:
                pairs.append((pts[i], pts[j]))
    return pairs


def classify_exceptional(spec: ProblemSpec, record, phi: Profile = None) -> ExceptionalVerdict:
    """Evaluate the three defining conditions on a nonconstant record.

    phi defaults to the variational solution v = du/du0, the computable
    representative of the linearized-solution ray.
    """
    if record.is_constant:
        raise DomainError("exceptionality is defined for nonconstant equilibria")
    if record.spectrum is None:
        raise DomainError("record needs a computed spectrum (run eigenvalues_sl first)")

    from .spectrum import classify_hyperbolic

    cond1 = classify_hyperbolic(record.spectrum, spec.tol)
    verdict = ExceptionalVerdict(condition1=cond1)
    if cond1 == "hyperbolic":
        verdict.overall = "nonexceptional"
        return verdict

    cps = critical_points(record.profile, spec)
    if any(cp.degenerate for cp in cps.points):
        raise DegenerateCritical("degenerate critical point: nondegeneracy assumption fails")
    pairs = same_value_pairs(spec, record.profile, cps)
    partnered = set()
    for a, b in pairs:
        partnered.add(a.x)
        partnered.add(b.x)
    cond2 = all(cp.x in partnered for cp in cps.points)
    verdict.condition2 = cond2
    if not cond2:
        verdict.overall = "nonexceptional"
        return verdict

    if phi is None:
        phi = integrate_variational(spec, record.profile)
    v_scale = max(float(np.max(np.abs(phi.u(phi.sample_grid(2))))), 1e-300)
    tol = spec.tol.sum_tol * v_scale

    def separated(endpoint):
        u_end = float(record.profile.u(endpoint))
        v_end = float(phi.u(endpoint))
        for cp in cps.points:
            if abs(cp.x - endpoint) < 1e-9:
                continue
            if abs(cp.value - u_end) <= spec.tol.sum_tol * max(1.0, abs(u_end)):
                if abs(float(phi.u(cp.x)) - v_end) > tol:
                    return True, (endpoint, cp.x)
        return False, None

    sep0, w0 = separated(0.0)
    sep1, w1 = separated(1.0)
    cond3 = sep0 and sep1
    verdict.condition3 = cond3
    verdict.witnesses = [w for w in (w0, w1) if w is not None]
    if not cond3:
        verdict.overall = "nonexceptional"
    elif cond1 == "undecided":
        verdict.overall = "undecided"
    else:
        verdict.overall = "exceptional"
    return verdict


def turning_point_sensitivity(spec: ProblemSpec, record, p: float, h: float = 1e-5):
    """Compare d/du0 [u(u0, p(u0))] (finite difference with critical-point
    relocation) against v(p) from the variational solve.

    Returns (lhs, rhs).  The u' (p) p'(u0) term drops because p is critical.
    """
    base = record.profile
    if abs(float(base.du(p))) > 1e-6 * base.du_scale() or not (0.0 < p < 1.0):
        raise DomainError(f"p = {p:.6g} is not an interior critical point")
    if abs(float(base.d2u(p))) <= spec.tol.crit_tol:
        raise DegenerateCritical(f"critical point at p = {p:.6g} is degenerate")

    def relocate(u0):
        prof = integrate_ivp(spec, u0)
        lo, hi = max(0.0, p - 0.1), min(1.0, p + 0.1)
        dlo, dhi = float(prof.du(lo)), float(prof.du(hi))
        if dlo * dhi > 0.0:
            raise CriticalPointLost(f"no bracketed critical point near p = {p:.6g} for u0 = {u0:.6g}")
        x = brentq(lambda x: float(prof.du(x)), lo, hi, xtol=1e-14)
        return float(prof.u(x))

    lhs = (relocate(record.u0 + h) - relocate(record.u0 - h)) / (2.0 * h)
    var = integrate_variational(spec, base)
    rhs = float(var.u(p))
    return lhs, rhs
