"""Adaptive integration of the equilibrium IVP and its variational equation.

Everything is integrated in momentum form (u, p = a u'): the
divergence-form operator then needs only a, not a', and the Neumann
condition at x = 0 becomes p(0) = 0, which is machine-exact.

The variational equation is run as a separate pass over the stored base
profile (u evaluated via dense output), so the same machinery serves
linearization checks on arbitrary profiles.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BlowUp, DomainError, StepUnderflow
from .problem import ProblemSpec
from .profiles import Profile, fit_segment, _FIT_S

BLOWUP_CAP = 1e6       # numerical escape threshold, not a model constant
_MAX_STEP = 0.02       # keeps dense segments short enough for level-set queries


def _solution_rhs(spec: ProblemSpec):
    def rhs(x, y):
        u, p = y
        return (p / spec.a(x), -spec.f(u))
    return rhs


def _variational_rhs(spec: ProblemSpec, base: Profile):
    def rhs(x, y):
        v, q = y
        return (q / spec.a(x), -spec.df(base.u(x)) * v)
    return rhs


def _blowup_event(x, y):
    return abs(y[0]) - BLOWUP_CAP


_blowup_event.terminal = True


def _run(spec: ProblemSpec, rhs, y0, dense: bool):
    sol = solve_ivp(
        rhs,
        (0.0, 1.0),
        y0,
        method="DOP853",
        dense_output=dense,
        rtol=spec.tol.ode_rel,
        atol=spec.tol.ode_abs,
        max_step=_MAX_STEP if dense else np.inf,
        events=[_blowup_event],
    )
    if sol.status == 1:
        raise BlowUp(f"|u| exceeded {BLOWUP_CAP:g} at x = {sol.t[-1]:.6g}", x_escape=float(sol.t[-1]))
    if sol.status != 0:
        if len(sol.t) > 1 and sol.t[-1] - sol.t[-2] < 1e-14:
            raise StepUnderflow(f"step size collapsed near x = {sol.t[-1]:.6g}")
        raise StepUnderflow(f"integrator failed: {sol.message}")
    return sol


def _to_profile(sol, spec, kind, base=None):
    interp = sol.sol
    ts = np.asarray(interp.ts, dtype=float)
    n_steps = len(ts) - 1
    coeffs_u = np.empty((n_steps, 8))
    coeffs_p = np.empty((n_steps, 8))
    for i in range(n_steps):
        seg = interp.interpolants[i]
        h = ts[i + 1] - ts[i]
        ys = seg(ts[i] + _FIT_S * h)  # shape (2, 8)
        coeffs_u[i] = fit_segment(_FIT_S, ys[0])
        coeffs_p[i] = fit_segment(_FIT_S, ys[1])
    states = np.column_stack([sol.y[0], sol.y[1]])
    return Profile(
        kind=kind,
        nodes=ts,
        states=states,
        coeffs_u=coeffs_u,
        coeffs_p=coeffs_p,
        spec=spec,
        base=base,
    )


def integrate_ivp(spec: ProblemSpec, u0: float) -> Profile:
    """Solve (a u')' + f(u) = 0 with u(0) = u0, u'(0) = 0 on [0,1]."""
    if abs(u0) > 10.0 * spec.scan_bound:
        raise DomainError(f"|u0| = {abs(u0):g} exceeds 10 * scan_bound")
    sol = _run(spec, _solution_rhs(spec), np.array([u0, 0.0]), dense=True)
    return _to_profile(sol, spec, "solution")


def shoot_endpoint(spec: ProblemSpec, u0: float):
    """(u(1), p(1)) without dense output: fast path for scan cells."""
    if abs(u0) > 10.0 * spec.scan_bound:
        raise DomainError(f"|u0| = {abs(u0):g} exceeds 10 * scan_bound")
    sol = _run(spec, _solution_rhs(spec), np.array([u0, 0.0]), dense=False)
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def shoot_endpoints_batch(spec: ProblemSpec, u0s):
    """p(1) for a batch of initial values, NaN where the cell blew up.

    Cells are integrated as one stacked system (large speedup over
    per-cell calls); a chunk containing a blow-up falls back to per-cell
    integration so one runaway cannot poison its neighbours.
    """
    u0s = np.asarray(u0s, dtype=float)
    out = np.full(len(u0s), np.nan)
    # Cells crossing this soft threshold leave the batch and finish solo;
    # it keeps one runaway from throttling the step size of a whole chunk.
    u_soft = 10.0 * (1.0 + spec.scan_bound)
    chunk = 64
    suspects = []  # (index, x, u, p) cells that crossed u_soft
    for start in range(0, len(u0s), chunk):
        us = u0s[start : start + chunk]
        alive = np.arange(len(us))
        x0 = 0.0
        y = np.concatenate([us, np.zeros(len(us))])
        # On a crossing, peel off the offending cells and resume the
        # survivors from the event state -- never re-integrate from x = 0.
        while len(alive):
            n = len(alive)

            def rhs(x, y):
                u, p = y[:n], y[n:]
                return np.concatenate([p / spec.a(x), -spec.f(u)])

            def crossing(x, y):
                return u_soft - float(np.max(np.abs(y[:n])))

            crossing.terminal = True
            sol = solve_ivp(rhs, (x0, 1.0), y, method="DOP853",
                            rtol=spec.tol.ode_rel, atol=spec.tol.ode_abs, events=[crossing])
            if sol.status == 0:
                out[start + alive] = sol.y[n:, -1]
                break
            if sol.status != 1:
                raise StepUnderflow(f"batch integrator failed: {sol.message}")
            x0 = float(sol.t[-1])
            u_end, p_end = sol.y[:n, -1], sol.y[n:, -1]
            big = np.abs(u_end) >= (1.0 - 1e-9) * u_soft
            if not np.any(big):
                big[np.argmax(np.abs(u_end))] = True
            for j in np.nonzero(big)[0]:
                suspects.append((start + alive[j], x0, float(u_end[j]), float(p_end[j])))
            alive = alive[~big]
            y = np.concatenate([u_end[~big], p_end[~big]])
    # Escape certificate: if f pushes strictly outward on [|u|, cap]
    # (s f(v) <= -c v with c > 0) and the momentum is outward, comparison
    # with w'' = (c/A) w gives |u(x)| >= |u0| cosh(sqrt(c/A) (x - x0)),
    # so reaching the cap before x = 1 can be certified without integrating.
    a_upper = float(np.sum(np.abs(spec.a_coeffs)))  # a(x) <= sum |c_k| on [0,1]

    def _outward_rate(s):
        # min of -s f(v)/v over [u_soft, cap]: candidates are the endpoints
        # and the interior stationary points, roots of v f'(v) - f(v)
        fc = np.asarray(spec.f_coeffs)
        dfc = np.polynomial.polynomial.polyder(fc)
        g = np.polynomial.polynomial.polysub(
            np.polynomial.polynomial.polymul((0.0, 1.0), dfc), fc)
        cands = [u_soft, BLOWUP_CAP]
        for r in np.polynomial.polynomial.polyroots(g):
            if abs(r.imag) < 1e-9 and u_soft <= r.real <= BLOWUP_CAP:
                cands.append(float(r.real))
        return min(-s * float(spec.f(s * v)) / v for v in cands)

    rate = {1.0: _outward_rate(1.0), -1.0: _outward_rate(-1.0)}

    def _certified_blowup(x0, u, p):
        s = 1.0 if u > 0 else -1.0
        c = rate[s]
        if c <= 0.0 or s * p < 0.0 or abs(u) < u_soft * (1.0 - 1e-9):
            return False
        omega = np.sqrt(c / a_upper)
        dx = np.arccosh(BLOWUP_CAP / abs(u)) / omega
        return x0 + dx < 1.0

    # The climb to the cap only decides blown-up vs not, so it can run at
    # loose tolerance; cells that come back get a full-accuracy rerun.
    for idx, x0, u, p in suspects:
        if _certified_blowup(x0, u, p):
            continue  # leave NaN: provably reaches the cap before x = 1
        sol = solve_ivp(_solution_rhs(spec), (x0, 1.0), np.array([u, p]), method="DOP853",
                        rtol=1e-6, atol=1e-9, events=[_blowup_event])
        if sol.status == 0:
            sol = solve_ivp(_solution_rhs(spec), (x0, 1.0), np.array([u, p]), method="DOP853",
                            rtol=spec.tol.ode_rel, atol=spec.tol.ode_abs, events=[_blowup_event])
        if sol.status == 0:
            out[idx] = float(sol.y[1, -1])
        # status 1 (reached the cap): leave NaN, the cell blew up
    return out


def integrate_variational(spec: ProblemSpec, base: Profile) -> Profile:
    """Solve (a v')' + f'(u(x)) v = 0 with v(0) = 1, v'(0) = 0 along base.

    This is du/du0: the sensitivity of the shooting solution to its
    initial value.
    """
    if base.kind != "solution":
        raise DomainError("variational integration requires a solution profile")
    sol = _run(spec, _variational_rhs(spec, base), np.array([1.0, 0.0]), dense=True)
    return _to_profile(sol, spec, "variational", base=base)
