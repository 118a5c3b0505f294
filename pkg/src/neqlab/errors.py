"""Exception hierarchy for the equilibrium lab.

Two broad families: spec/input problems (exit code 2 at the CLI) and
numerical failures (exit code 3).
"""


class NeqlabError(Exception):
    """Base class for all package errors."""


class SpecError(NeqlabError):
    """Invalid problem specification or input document."""


class MissingKey(SpecError):
    pass


class UnknownKey(SpecError):
    pass


class MalformedNumber(SpecError):
    pass


class NonPositiveDiffusion(SpecError):
    """a(x) <= 0 somewhere on [0,1]."""


class NonzeroConstantTerm(SpecError):
    """f(0) != 0."""


class DomainError(SpecError):
    """Argument outside its admissible range."""


class ZeroPolynomial(SpecError):
    """f is identically zero: a continuum of equilibria, analysis refuses."""


class NumericalError(NeqlabError):
    """Numerical failure (integration, eigensolve, continuation)."""


class BlowUp(NumericalError):
    """Solution escaped the guard bound before x = 1."""

    def __init__(self, message, x_escape=None):
        super().__init__(message)
        self.x_escape = x_escape


class StepUnderflow(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    """Eigenvalue discretization error estimate too large for hyp_tol."""


class DegenerateSignChange(NumericalError):
    """a' has a root in (0,1) without a sign change."""


class DegenerateCritical(NumericalError):
    """Critical point with u'' ~ 0 (or f(u(p)) = 0): nondegeneracy fails."""


class NotConstantA(NumericalError):
    """Operation defined only for constant diffusion coefficient."""


class LevelTooCloseToCritical(NumericalError):
    """Level q inside the ill-conditioned margin around a critical value."""


class TangencyUnresolved(NumericalError):
    """|m(u0)| dips below tolerance without a sign change (near-fold)."""


class ContinuationLost(NumericalError):
    """Newton continuation failed for a perturbation step."""


class CriticalPointLost(NumericalError):
    """Critical-point relocation diverged under a parameter perturbation."""


class EmptyReport(NeqlabError):
    pass


class IoError(NeqlabError):
    pass
