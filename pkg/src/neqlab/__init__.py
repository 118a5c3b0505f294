"""Numerical lab for equilibria of (a(x) u_x)_x + f(u) = 0 with Neumann
boundary conditions: shooting, Sturm-Liouville spectra, level-set sum
identities, exceptionality classification, and perturbation experiments.
"""

__version__ = "0.1.0"

from .problem import MonotonicityPartition, ProblemSpec, ToleranceSet, parse_spec  # noqa: F401
from .profiles import AnalyticProfile, Profile, cos_profile  # noqa: F401
from .integrate import integrate_ivp, integrate_variational, shoot_endpoint  # noqa: F401
from .equilibria import EquilibriumRecord, constant_equilibria, find_equilibria, shooting_miss  # noqa: F401
from .spectrum import (  # noqa: F401
    SpectrumReport,
    check_constant_hyperbolic,
    classify_hyperbolic,
    eigenvalues_sl,
    prufer_eigenvalues,
    wronskian_constancy,
)
from .levelsets import (  # noqa: F401
    critical_points,
    critical_sum,
    level_report,
    level_set_at,
    orthogonality_residuals,
    q_orbit_test,
    regular_sum,
    signed_sum,
)
from .exceptional import classify_exceptional, intzero_integral, turning_point_sensitivity  # noqa: F401
from .perturb import SweepResult, bifurcation_sweep, perturbation_scan  # noqa: F401
