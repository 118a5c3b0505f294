"""Built-in verification suite: fast invariant checks on reference problems.

Each check returns (name, passed, detail).  The CLI 'verify' command runs
the suite, prints one line per check, and writes a deterministic JSON
report (no timings inside the report itself).
"""

from __future__ import annotations

import numpy as np

from .equilibria import find_equilibria, shooting_miss
from .integrate import integrate_ivp, integrate_variational
from .levelsets import critical_sum, orthogonality_residuals, regular_sum
from .problem import ProblemSpec
from .profiles import cos_profile
from .spectrum import eigenvalues_sl, prufer_eigenvalues, wronskian_constancy

REFERENCE_SPECS = {
    "laplace": ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 0.0), scan_bound=2.0),
    "linear": ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 1.0), scan_bound=2.0),
    "chafee1": ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 1.0, 0.0, -1.0), scan_bound=2.0),
    "chafee15": ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 15.0, 0.0, -15.0), scan_bound=2.0),
}


def _check_neumann_spectrum():
    report = eigenvalues_sl(REFERENCE_SPECS["laplace"], 0.0, k=5)
    exact = np.array([0.0] + [-(n * np.pi) ** 2 for n in range(1, 5)])
    err = np.abs(report.raw_eigenvalues[:5] - exact)
    rel = err / np.maximum(np.abs(exact), 1.0)
    ok = bool(np.all(rel < 1e-3))
    return ok, f"max rel err {float(np.max(rel)):.2e}"


def _check_prufer_agrees():
    oracle = prufer_eigenvalues(REFERENCE_SPECS["laplace"], 0.0, k=3)
    exact = np.array([0.0, -np.pi**2, -4 * np.pi**2])
    err = float(np.max(np.abs(oracle - exact) / np.maximum(np.abs(exact), 1.0)))
    return err < 1e-6, f"max rel err {err:.2e}"


def _check_shooting_linear():
    m, slope = shooting_miss(REFERENCE_SPECS["linear"], 1.0)
    err = max(abs(m + np.sin(1.0)), abs(slope + np.sin(1.0)))
    return err < 1e-8, f"err {err:.2e}"


def _check_energy():
    spec = REFERENCE_SPECS["chafee15"]
    records, _ = find_equilibria(spec)
    noncon = [r for r in records if not r.is_constant]
    if not noncon:
        return False, "no nonconstant equilibrium found"
    prof = noncon[0].profile
    xs = np.linspace(0.0, 1.0, 400)
    F = np.polynomial.polynomial.polyint(spec.f_coeffs)
    E = 0.5 * prof.du(xs) ** 2 + np.polynomial.polynomial.polyval(prof.u(xs), F)
    drift = float(np.max(np.abs(E - E[0])))
    bound = 100 * spec.tol.ode_rel * max(abs(E[0]), 1.0) + spec.tol.ode_abs
    return drift <= max(bound, 1e-7), f"drift {drift:.2e}"


def _check_sumzero():
    prof = cos_profile(2.0)
    rng = np.random.default_rng(7)
    h = rng.normal(size=4)
    phi = lambda x: prof.du(x) * np.polynomial.polynomial.polyval(prof.u(x), h)
    res = orthogonality_residuals(prof, phi, 8)
    worst_res = max(abs(r) for r in res)
    sums = [abs(regular_sum(prof, phi, q)) for q in np.linspace(-0.9, 0.9, 11)]
    return worst_res < 1e-9 and max(sums) < 1e-7, f"res {worst_res:.2e}, sum {max(sums):.2e}"


def _check_critical_sums():
    prof = cos_profile(2.0)
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    v1 = critical_sum(prof, one, 1.0)
    v2 = critical_sum(prof, one, -1.0)
    target = 1.0 / (2.0 * np.pi)
    err = max(abs(v1 - target), abs(v2 - target))
    return err < 1e-8, f"err {err:.2e}"


def _check_gradient():
    spec = REFERENCE_SPECS["chafee1"]
    worst = 0.0
    for u0 in np.linspace(-0.5, 0.5, 5):
        _, slope = shooting_miss(spec, u0)
        h = 1e-5
        fd = (shooting_miss(spec, u0 + h)[0] - shooting_miss(spec, u0 - h)[0]) / (2 * h)
        worst = max(worst, abs(fd - slope) / max(1.0, abs(slope)))
    return worst < 1e-5, f"max rel err {worst:.2e}"


def _check_wronskian():
    spec = REFERENCE_SPECS["chafee15"]
    records, _ = find_equilibria(spec)
    noncon = [r for r in records if not r.is_constant]
    if not noncon:
        return False, "no nonconstant equilibrium found"
    base = noncon[0].profile
    phi = integrate_variational(spec, base)
    trace = wronskian_constancy(base, phi, spec)
    return trace.max_rel_variation < 1e-6, f"variation {trace.max_rel_variation:.2e}"


CHECKS = [
    ("neumann_spectrum_analytic", _check_neumann_spectrum),
    ("prufer_oracle_agreement", _check_prufer_agrees),
    ("shooting_linear_analytic", _check_shooting_linear),
    ("energy_conservation", _check_energy),
    ("sumzero_identities", _check_sumzero),
    ("critical_sum_values", _check_critical_sums),
    ("variational_gradient", _check_gradient),
    ("wronskian_constancy", _check_wronskian),
]


def run_verification():
    """Run all checks; returns list of (name, passed, detail)."""
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
