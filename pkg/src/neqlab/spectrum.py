"""Spectrum of the linearization (a w')' + f'(u) w = lambda w, Neumann.

Primary solver: conservative finite differences on cell centers with
a(x) sampled at faces (flux form) and zero-flux boundaries; the matrix
is symmetric tridiagonal as assembled and its top eigenvalues come from
LAPACK's Sturm-sequence bisection.  Eigenvalues are Richardson
extrapolated from grids n, n/2, n/4; the reported discretization error
estimate is the disagreement of the two extrapolants.

Secondary, independent oracle: Pruefer phase shooting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import DegenerateCritical, GridTooCoarse, NotConstantA, ZeroPolynomial
from .problem import ProblemSpec, ToleranceSet, monotonicity_intervals
from .profiles import Profile


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray          # descending, Richardson extrapolated
    raw_eigenvalues: np.ndarray      # descending, finest grid, no extrapolation
    min_abs: float                   # min |lambda_i| over the computed window
    min_signed: float                # eigenvalue closest to zero, with sign
    disc_error: float                # error estimate for the extrapolated values
    grid_n: int
    method: str = "fd_tridiag"

    @property
    def window_valid(self):
        # meaningful only if the window reaches below zero
        return bool(self.eigenvalues[-1] < 0.0)

    def to_json_dict(self):
        return {
            "method": self.method,
            "grid_n": self.grid_n,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "raw_eigenvalues": [float(v) for v in self.raw_eigenvalues],
            "min_abs": float(self.min_abs),
            "min_signed": float(self.min_signed),
            "disc_error": float(self.disc_error),
        }


@dataclass
class WronskianTrace:
    xs: np.ndarray
    samples: np.ndarray
    max_rel_variation: float
    constant: float
    critical_checks: list            # (p, f(u(p)) * phi(p)) per critical point


def _potential_fn(spec: ProblemSpec, base):
    """f'(u(x)) as a function of x: base is a Profile or a constant u0."""
    if isinstance(base, Profile):
        return lambda x: spec.df(base.u(x))
    c = float(spec.df(float(base)))
    return lambda x: np.full_like(np.asarray(x, dtype=float), c)


def _top_eigs_fd(spec, potential, n, k):
    """Top k eigenvalues of the flux-form FD operator on n cells."""
    h = 1.0 / n
    centers = (np.arange(n) + 0.5) * h
    faces = np.arange(1, n) * h
    a_face = np.asarray(spec.a(faces), dtype=float)
    c = np.asarray(potential(centers), dtype=float)
    off = a_face / h**2
    diag = c.copy()
    diag[:-1] -= off
    diag[1:] -= off
    k = min(k, n)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(n - k, n - 1))
    return vals[::-1]


def eigenvalues_sl(spec: ProblemSpec, base, k: int = 8) -> SpectrumReport:
    """Top-k spectrum of w -> (a w')' + f'(u) w with Neumann conditions.

    The window is grown automatically until the smallest computed
    eigenvalue clears -(1 + max |f'(u)|), so a zero crossing cannot hide
    below it.
    """
    potential = _potential_fn(spec, base)
    n = max(spec.grid_n, 16)
    n = n - n % 4  # needs n, n/2, n/4

    if isinstance(base, Profile):
        umax = float(np.max(np.abs(base.u(base.sample_grid(2)))))
    else:
        umax = abs(float(base))
    us = np.linspace(-umax, umax, 101)
    df_bound = float(np.max(np.abs(spec.df(us))))
    floor = -(1.0 + df_bound)

    while True:
        lam_n = _top_eigs_fd(spec, potential, n, k)
        if lam_n[-1] < floor or k >= n:
            break
        k = min(2 * k, n)

    lam_h = _top_eigs_fd(spec, potential, n // 2, k)
    lam_q = _top_eigs_fd(spec, potential, n // 4, k)
    m = min(len(lam_n), len(lam_h), len(lam_q))  # coarse grids may truncate
    lam_n, lam_h, lam_q = lam_n[:m], lam_h[:m], lam_q[:m]
    r1 = (4.0 * lam_n - lam_h) / 3.0
    r2 = (4.0 * lam_h - lam_q) / 3.0
    est = np.abs(r1 - r2)  # per-eigenvalue extrapolation residual
    i_min = int(np.argmin(np.abs(r1)))
    disc_error = float(est[i_min])
    hyp_tol = spec.tol.hyp_tol
    if disc_error > hyp_tol / 10.0:
        raise GridTooCoarse(
            f"eigenvalue error estimate {disc_error:.3e} near the spectral gap exceeds "
            f"hyp_tol/10 = {hyp_tol / 10:.3e}; increase grid_n (currently {n})"
        )
    return SpectrumReport(
        eigenvalues=r1,
        raw_eigenvalues=lam_n,
        min_abs=float(np.abs(r1[i_min])),
        min_signed=float(r1[i_min]),
        disc_error=disc_error,
        grid_n=n,
    )


def classify_hyperbolic(report: SpectrumReport, tol: ToleranceSet) -> str:
    """'hyperbolic' | 'non_hyperbolic' | 'undecided' from the spectral gap."""
    band = tol.hyp_tol
    est = report.disc_error
    if report.min_abs > band + est:
        return "hyperbolic"
    if report.min_abs < band - est:
        return "non_hyperbolic"
    return "undecided"


def check_constant_hyperbolic(spec: ProblemSpec, u0: float) -> str:
    """Hyperbolicity of the constant equilibrium u = u0 via operator eigenvalues.

    u0 is non-hyperbolic iff f'(u0) + mu_n = 0 for some eigenvalue mu_n of
    phi -> (a phi')' (Neumann): f'(u0) shifts the whole diffusion spectrum.
    Equivalent to classify_hyperbolic of the full linearization.
    """
    if abs(float(spec.f(u0))) > 100 * spec.tol.root_tol * max(1.0, abs(u0)):
        raise ValueError(f"u0 = {u0:g} is not a root of f")
    zero_spec = spec.with_f((0.0, 0.0))
    diffusion = eigenvalues_sl(zero_spec, 0.0, k=8)
    shift = float(spec.df(float(u0)))
    # grow the window until the shifted spectrum reaches below zero
    k = len(diffusion.eigenvalues)
    while diffusion.eigenvalues[-1] + shift > 0.0 and k < zero_spec.grid_n:
        k *= 2
        diffusion = eigenvalues_sl(zero_spec, 0.0, k=k)
    shifted = diffusion.eigenvalues + shift
    i_min = int(np.argmin(np.abs(shifted)))
    report = SpectrumReport(
        eigenvalues=shifted,
        raw_eigenvalues=diffusion.raw_eigenvalues + shift,
        min_abs=float(np.abs(shifted[i_min])),
        min_signed=float(shifted[i_min]),
        disc_error=diffusion.disc_error,
        grid_n=diffusion.grid_n,
    )
    return classify_hyperbolic(report, spec.tol)


def prufer_eigenvalues(spec: ProblemSpec, base, k: int = 8, rtol=1e-11):
    """Independent oracle: top-k eigenvalues by Pruefer phase shooting.

    With w = r sin(theta), a w' = r cos(theta), the phase solves
    theta' = cos^2(theta)/a + (c(x) - lambda) sin^2(theta), theta(0) = pi/2,
    and lambda_m (descending) satisfies theta(1) = pi/2 + m*pi.
    """
    potential = _potential_fn(spec, base)

    def theta1(lam):
        def rhs(x, y):
            ct, st = np.cos(y[0]), np.sin(y[0])
            return (ct * ct / spec.a(x) + (potential(x) - lam) * st * st,)
        sol = solve_ivp(rhs, (0.0, 1.0), [np.pi / 2], method="DOP853", rtol=rtol, atol=1e-13)
        return float(sol.y[0, -1])

    centers = np.linspace(0.0, 1.0, 201)
    c_hi = float(np.max(potential(centers)))
    out = []
    hi = c_hi + 1.0
    for m in range(k):
        target = np.pi / 2 + m * np.pi
        g = lambda lam: theta1(lam) - target
        lo = hi - 20.0
        width = 20.0
        while g(lo) < 0.0:
            width *= 2.0
            lo -= width
        # g decreasing in lambda: g(lo) >= 0 >= g(hi_m)
        hi_m = hi
        while g(hi_m) > 0.0:
            hi_m += 10.0
        out.append(brentq(g, lo, hi_m, xtol=1e-10, rtol=8.9e-16))
    return np.array(out)


def wronskian_constancy(base: Profile, phi: Profile, spec: ProblemSpec, n_samples: int = 1000) -> WronskianTrace:
    """W(x) = a (u' phi' - u'' phi) for constant a; constant for true pairs.

    Also checks the critical-point identity: at each critical point p of u,
    f(u(p)) * phi(p) equals the same constant W (using u''(p) = -f(u(p))/a).
    """
    if spec.f_is_zero:
        raise ZeroPolynomial("f is identically zero")
    part = monotonicity_intervals(spec)
    if not part.constant_flag:
        raise NotConstantA("Wronskian identity requires constant a")
    a0 = float(spec.a(0.0))
    xs = np.linspace(0.0, 1.0, n_samples)
    du = base.du(xs)
    d2u = -spec.f(base.u(xs)) / a0
    w = a0 * (du * phi.du(xs) - d2u * phi.u(xs))
    mean = float(np.mean(w))
    if mean == 0.0:
        raise DegenerateCritical("Wronskian vanishes: pair is linearly dependent")
    max_rel = float(np.max(np.abs(w - mean)) / abs(mean))

    from .levelsets import critical_points  # local import, avoids a cycle

    checks = []
    for cp in critical_points(base, spec).points:
        fval = float(spec.f(base.u(cp.x)))
        if abs(fval) < spec.tol.root_tol * max(1.0, abs(mean)):
            raise DegenerateCritical(f"f(u(p)) = 0 at critical point p = {cp.x:.6g}")
        checks.append((cp.x, fval * float(phi.u(cp.x))))
    return WronskianTrace(
        xs=xs, samples=w, max_rel_variation=max_rel, constant=mean, critical_checks=checks
    )
