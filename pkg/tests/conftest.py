"""Shared fixtures and independent numerical oracles.

Oracles here deliberately avoid the package's own integration and
eigenvalue paths: fixed-step classical RK4 for IVPs, and dense uniform
scans for counting.  Expensive solves are session-scoped.
"""

import numpy as np
import pytest

from neqlab.equilibria import find_equilibria
from neqlab.problem import ProblemSpec


# ---------------------------------------------------------------------------
# reference problems


@pytest.fixture(scope="session")
def laplace_spec():
    return ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 0.0), scan_bound=2.0)


@pytest.fixture(scope="session")
def linear_spec():
    # f(u) = u: shooting solution is u0*cos(x)
    return ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 1.0), scan_bound=2.0)


@pytest.fixture(scope="session")
def chafee1_spec():
    return ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 1.0, 0.0, -1.0), scan_bound=2.0)


@pytest.fixture(scope="session")
def chafee15_spec():
    return ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 15.0, 0.0, -15.0), scan_bound=2.0)


@pytest.fixture(scope="session")
def chafee45_spec():
    # past the second bifurcation at 4 pi^2: two-lap equilibria exist
    return ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, 45.0, 0.0, -45.0), scan_bound=2.0)


@pytest.fixture(scope="session")
def chafee45_records(chafee45_spec):
    records, _ = find_equilibria(chafee45_spec)
    return records


@pytest.fixture(scope="session")
def chafee15_solution(chafee15_spec):
    records, scan = find_equilibria(chafee15_spec)
    return records, scan


@pytest.fixture(scope="session")
def chafee15_records(chafee15_solution):
    return chafee15_solution[0]


# ---------------------------------------------------------------------------
# independent oracles


def rk4_shoot(spec, u0, n_steps=4000):
    """Fixed-step classical RK4 for (u, p)' = (p/a, -f(u)); returns (u(1), p(1)).

    Independent of the package's adaptive integrator.
    """
    h = 1.0 / n_steps

    def rhs(x, y):
        return np.array([y[1] / float(spec.a(x)), -float(spec.f(y[0]))])

    y = np.array([float(u0), 0.0])
    x = 0.0
    for _ in range(n_steps):
        k1 = rhs(x, y)
        k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x += h
    return float(y[0]), float(y[1])


def dense_scan_sign_changes(spec, n=2001, cap=1e6):
    """(strict sign changes, exact zero hits) of the shooting miss on a
    uniform grid, via RK4.  Cells exceeding the cap are skipped (blow-up);
    a zero hit breaks the running sign so it is not also counted as a
    change.
    """
    grid = np.linspace(-spec.scan_bound, spec.scan_bound, n)
    changes = zeros = 0
    prev = None
    for u0 in grid:
        try:
            with np.errstate(over="raise", invalid="raise"):
                _, p1 = rk4_shoot(spec, u0, n_steps=800)
        except FloatingPointError:
            prev = None
            continue
        if not np.isfinite(p1) or abs(p1) > cap:
            prev = None
            continue
        if p1 == 0.0:
            zeros += 1
            prev = None
            continue
        if prev is not None and p1 * prev < 0.0:
            changes += 1
        prev = p1
    return changes, zeros
