"""Genericity laboratory: perturbation scans and bifurcation sweeps.

Continuation is naive Newton from the previous root; folds are reported
through unresolved-tangency warnings, not traced.  Perturbation
directions are polynomials with zero constant term, preserving f(0) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibria import find_equilibria, shooting_miss
from .errors import ContinuationLost, DomainError, NumericalError
from .problem import ProblemSpec
from .spectrum import classify_hyperbolic, eigenvalues_sl


@dataclass
class SweepEntry:
    u0: float
    min_abs: float
    min_signed: float
    n_positive: int                  # Morse index of the linearization
    hyperbolic: str
    is_constant: bool = False


@dataclass
class SweepRow:
    parameter: float
    n_equilibria: int
    entries: list                    # SweepEntry per equilibrium
    warnings: list = field(default_factory=list)


@dataclass
class SweepResult:
    family: str
    rows: list
    crossings: list = field(default_factory=list)   # refined parameter values


def _perturbed(spec: ProblemSpec, g_coeffs, eps: float) -> ProblemSpec:
    g = tuple(float(c) for c in g_coeffs)
    if not g or g[0] != 0.0:
        raise DomainError("perturbation direction must have zero constant term (g(0) = 0)")
    n = max(len(spec.f_coeffs), len(g))
    f = np.zeros(n)
    f[: len(spec.f_coeffs)] += spec.f_coeffs
    f[: len(g)] += eps * np.array(g)
    return spec.with_f(f)


def _continue_constant(spec_eps: ProblemSpec, u0: float) -> float:
    """Newton on f_eps from a constant root of f."""
    u = u0
    for _ in range(100):
        fu = float(spec_eps.f(u))
        dfu = float(spec_eps.df(u))
        if dfu == 0.0:
            break
        step = -fu / dfu
        u += step
        if abs(step) < 1e-14 * max(1.0, abs(u)):
            return u
    if abs(float(spec_eps.f(u))) < 100 * spec_eps.tol.root_tol:
        return u
    raise ContinuationLost(f"constant root lost near u0 = {u0:g}")


def _continue_nonconstant(spec_eps: ProblemSpec, u0: float) -> float:
    u = u0
    for _ in range(50):
        m, slope = shooting_miss(spec_eps, u)
        if slope == 0.0:
            break
        step = -m / slope
        u += step
        if abs(step) < spec_eps.tol.root_tol:
            return u
    raise ContinuationLost(f"shooting root lost near u0 = {u0:g}")


def perturbation_scan(spec: ProblemSpec, record, g_coeffs, eps_list) -> SweepResult:
    """Track min |eigenvalue| of a (non-)hyperbolic record under f -> f + eps*g."""
    rows = []
    for eps in eps_list:
        spec_eps = _perturbed(spec, g_coeffs, float(eps))
        warnings = []
        try:
            if record.is_constant:
                u_eps = _continue_constant(spec_eps, record.u0)
                report = eigenvalues_sl(spec_eps, u_eps)
            else:
                u_eps = _continue_nonconstant(spec_eps, record.u0)
                from .integrate import integrate_ivp

                report = eigenvalues_sl(spec_eps, integrate_ivp(spec_eps, u_eps))
            entries = [_entry(u_eps, report, spec_eps)]
            n_eq = 1
        except ContinuationLost as exc:
            warnings.append(str(exc))
            entries, n_eq = [], 0
        rows.append(SweepRow(parameter=float(eps), n_equilibria=n_eq, entries=entries, warnings=warnings))
    return SweepResult(family=f"f + eps*g, g={list(map(float, g_coeffs))}", rows=rows)


def _scaled_family(spec: ProblemSpec, lam: float) -> ProblemSpec:
    return spec.with_f(tuple(lam * c for c in spec.f_coeffs))


def _entry(u0, report, spec, is_constant=False):
    return SweepEntry(
        u0=float(u0),
        min_abs=report.min_abs,
        min_signed=report.min_signed,
        n_positive=int(np.sum(report.eigenvalues > 0.0)),
        hyperbolic=classify_hyperbolic(report, spec.tol),
        is_constant=bool(is_constant),
    )


def _report_at(spec_lam: ProblemSpec, u0: float, constant: bool):
    if constant:
        return eigenvalues_sl(spec_lam, float(u0))
    from .integrate import integrate_ivp

    return eigenvalues_sl(spec_lam, integrate_ivp(spec_lam, _continue_nonconstant(spec_lam, u0)))


def bifurcation_sweep(spec: ProblemSpec, lambda_range, n_steps: int, threads=1) -> SweepResult:
    """Sweep f(u; lam) = lam * f_base(u): equilibrium counts and eigenvalue
    crossings, with crossing refinement by bisection to 1e-6 in lam.
    """
    lo, hi = float(lambda_range[0]), float(lambda_range[1])
    if n_steps < 2:
        raise DomainError("n_steps must be >= 2")
    lams = np.linspace(lo, hi, n_steps)
    rows = []
    for lam in lams:
        spec_lam = _scaled_family(spec, float(lam))
        warnings = []
        entries = []
        try:
            records, scan = find_equilibria(spec_lam, threads=threads)
            if scan.tangencies:
                warnings.append(f"{len(scan.tangencies)} unresolved tangencies")
            for rec in records:
                report = eigenvalues_sl(spec_lam, rec.u0 if rec.is_constant else rec.profile)
                entries.append(_entry(rec.u0, report, spec_lam, is_constant=rec.is_constant))
        except NumericalError as exc:
            warnings.append(str(exc))
        rows.append(
            SweepRow(parameter=float(lam), n_equilibria=len(entries), entries=entries, warnings=warnings)
        )

    # Branch matching: same constancy and nearest u0.  Constant branches
    # sit at the lam-independent roots of f_base, so their window is tight;
    # nonconstant branches drift with lam and get a looser one.
    def _match(e0, row):
        window = 1e-6 if e0.is_constant else 0.05 * max(1.0, spec.scan_bound)
        cands = [e for e in row.entries
                 if e.is_constant == e0.is_constant and abs(e.u0 - e0.u0) < window]
        return min(cands, key=lambda e: abs(e.u0 - e0.u0)) if cands else None

    crossings = []
    for r0, r1 in zip(rows[:-1], rows[1:]):
        for e0 in r0.entries:
            e1 = _match(e0, r1)
            if e1 is None or e1.n_positive == e0.n_positive:
                continue
            # the eigenvalue that crossed: first index past the smaller
            # positive block (eigenvalues are descending)
            idx = min(e0.n_positive, e1.n_positive)
            lam_c = _refine_crossing(spec, e0.u0, r0.parameter, r1.parameter, e0.is_constant, idx)
            if lam_c is not None:
                crossings.append(lam_c)
    crossings.sort()
    merged = [c for i, c in enumerate(crossings) if i == 0 or c - crossings[i - 1] > 1e-5]
    return SweepResult(family="lam * f_base", rows=rows, crossings=merged)


def _refine_crossing(spec, u0, lam_lo, lam_hi, constant, idx, tol=1e-6):
    """Bisection in lam on the sign of the idx-th (descending) eigenvalue.

    Returns None when that eigenvalue does not actually change sign over
    the interval (a Morse-index jump caused by branch mismatch, not a
    genuine crossing).
    """

    def s(lam):
        return float(_report_at(_scaled_family(spec, lam), u0, constant).eigenvalues[idx])

    s_lo = s(lam_lo)
    if s_lo * s(lam_hi) > 0.0:
        return None
    while lam_hi - lam_lo > tol:
        mid = 0.5 * (lam_lo + lam_hi)
        s_mid = s(mid)
        if s_lo * s_mid <= 0.0:
            lam_hi = mid
        else:
            lam_lo, s_lo = mid, s_mid
    return 0.5 * (lam_lo + lam_hi)
