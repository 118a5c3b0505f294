"""Problem data: diffusion coefficient a, nonlinearity f, tolerances.

Both a and f are polynomials given by ascending coefficient lists, so
derivatives are exact and root finding reduces to polynomial root
isolation.  Positivity of a on [0,1] is certified by dense sampling plus
refinement at the roots of a' (adequate at desk scale, not rigorous).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    DegenerateSignChange,
    DomainError,
    MalformedNumber,
    MissingKey,
    NonPositiveDiffusion,
    NonzeroConstantTerm,
    UnknownKey,
)

_POSITIVITY_SAMPLES = 10_000


@dataclass(frozen=True)
class ToleranceSet:
    """Numerical tolerances used throughout the pipeline.

    hyp_tol should stay at least ~10x above the eigensolver's estimated
    discretization error; the solver raises GridTooCoarse otherwise.
    """

    ode_rel: float = 1e-10
    ode_abs: float = 1e-12
    root_tol: float = 1e-10
    hyp_tol: float = 1e-6
    crit_tol: float = 1e-8
    sum_tol: float = 1e-6

    def __post_init__(self):
        for name in ("ode_rel", "ode_abs", "root_tol", "hyp_tol", "crit_tol", "sum_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"tolerance {name} must be strictly positive")


def _horner(coeffs, x):
    """polyval with pre-converted ascending coefficients (hot path)."""
    if len(coeffs) == 0:
        return 0.0 * x
    val = coeffs[-1] + 0.0 * x
    for c in coeffs[-2::-1]:
        val = val * x + c
    return val


@dataclass(frozen=True)
class ProblemSpec:
    """The pair (a, f) plus scan bounds and tolerances.

    Coefficients are ascending-degree.  Invariants: a > 0 on [0,1],
    f(0) = 0 exactly, scan_bound > 0, grid_n >= 16.
    """

    a_coeffs: tuple
    f_coeffs: tuple
    scan_bound: float = 10.0
    grid_n: int = 2000
    tol: ToleranceSet = field(default_factory=ToleranceSet)

    def __post_init__(self):
        object.__setattr__(self, "a_coeffs", tuple(float(c) for c in self.a_coeffs))
        object.__setattr__(self, "f_coeffs", tuple(float(c) for c in self.f_coeffs))
        if not self.a_coeffs:
            raise MissingKey("a_coeffs is empty")
        if not self.f_coeffs:
            raise MissingKey("f_coeffs is empty")
        if self.f_coeffs[0] != 0.0:
            raise NonzeroConstantTerm(f"f(0) = {self.f_coeffs[0]} != 0")
        if not self.scan_bound > 0:
            raise DomainError("scan_bound must be > 0")
        if self.grid_n < 16:
            raise DomainError("grid_n must be >= 16")
        _check_positive_a(self.a_coeffs)
        # cached ndarray coefficients: the ODE right-hand sides evaluate
        # these millions of times, so skip polyval's per-call conversion
        object.__setattr__(self, "_a_arr", np.asarray(self.a_coeffs))
        object.__setattr__(self, "_da_arr", P.polyder(self._a_arr))
        object.__setattr__(self, "_f_arr", np.asarray(self.f_coeffs))
        object.__setattr__(self, "_df_arr", P.polyder(self._f_arr))

    # -- polynomial views -------------------------------------------------

    def a(self, x):
        return _horner(self._a_arr, x)

    def da(self, x):
        return _horner(self._da_arr, x)

    def f(self, u):
        return _horner(self._f_arr, u)

    def df(self, u):
        return _horner(self._df_arr, u)

    @property
    def f_is_zero(self):
        return all(c == 0.0 for c in self.f_coeffs)

    def with_f(self, f_coeffs):
        return replace(self, f_coeffs=tuple(float(c) for c in f_coeffs))

    def content_hash(self) -> str:
        parts = [
            repr(self.a_coeffs),
            repr(self.f_coeffs),
            repr(self.scan_bound),
            repr(self.grid_n),
            repr(self.tol),
        ]
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class MonotonicityPartition:
    """Partition of [0,1] into maximal intervals of strict monotonicity of a."""

    breakpoints: tuple
    signs: tuple
    constant_flag: bool = False

    def __post_init__(self):
        bp = self.breakpoints
        if any(bp[i] >= bp[i + 1] for i in range(len(bp) - 1)):
            raise DomainError("breakpoints must be strictly increasing")

    @property
    def n_intervals(self):
        return len(self.signs)


def _check_positive_a(a_coeffs):
    xs = np.linspace(0.0, 1.0, _POSITIVITY_SAMPLES)
    vals = P.polyval(xs, a_coeffs)
    # refine at the stationary points of a for a tighter minimum
    da = P.polyder(a_coeffs)
    crit = []
    if len(da) > 1 or da[0] != 0.0:
        for r in P.polyroots(da):
            if abs(r.imag) < 1e-12 and 0.0 <= r.real <= 1.0:
                crit.append(r.real)
    if crit:
        vals = np.concatenate([vals, P.polyval(np.array(crit), a_coeffs)])
    m = float(vals.min())
    if m <= 0.0:
        x_bad = float(xs[int(np.argmin(P.polyval(xs, a_coeffs)))])
        raise NonPositiveDiffusion(f"a(x) <= 0 near x = {x_bad:.6g} (min {m:.6g})")


# ---------------------------------------------------------------------------
# spec file parsing

_TOL_KEYS = ("ode_rel", "ode_abs", "root_tol", "hyp_tol", "crit_tol", "sum_tol")
_KNOWN_KEYS = ("a_coeffs", "f_coeffs", "scan_bound", "grid_n") + _TOL_KEYS


def _parse_number(token, key):
    token = token.strip().replace("−", "-")  # allow unicode minus
    try:
        return float(token)
    except ValueError:
        raise MalformedNumber(f"cannot parse number {token!r} for key {key!r}") from None


def _parse_list(value, key):
    value = value.strip()
    if not (value.startswith("[") and value.endswith("]")):
        raise MalformedNumber(f"{key} must be a bracketed list, got {value!r}")
    inner = value[1:-1].strip()
    if not inner:
        raise MalformedNumber(f"{key} list is empty")
    return [_parse_number(t, key) for t in inner.split(",")]


def parse_spec(text: str) -> ProblemSpec:
    """Parse a line-oriented key=value document into a validated ProblemSpec.

    Entries may be separated by newlines or semicolons; '#' starts a comment.
    Unknown keys are an error.
    """
    entries = {}
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0]
        for chunk in line.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "=" not in chunk:
                raise MalformedNumber(f"expected key=value, got {chunk!r}")
            key, value = chunk.split("=", 1)
            key = key.strip()
            if key not in _KNOWN_KEYS:
                raise UnknownKey(f"unknown key {key!r}")
            entries[key] = value.strip()

    for required in ("a_coeffs", "f_coeffs"):
        if required not in entries:
            raise MissingKey(f"missing key {required!r}")

    a_coeffs = _parse_list(entries.pop("a_coeffs"), "a_coeffs")
    f_coeffs = _parse_list(entries.pop("f_coeffs"), "f_coeffs")
    scan_bound = _parse_number(entries.pop("scan_bound"), "scan_bound") if "scan_bound" in entries else 10.0
    grid_n = int(_parse_number(entries.pop("grid_n"), "grid_n")) if "grid_n" in entries else 2000
    tol_kwargs = {k: _parse_number(entries.pop(k), k) for k in list(entries)}
    return ProblemSpec(
        a_coeffs=tuple(a_coeffs),
        f_coeffs=tuple(f_coeffs),
        scan_bound=scan_bound,
        grid_n=grid_n,
        tol=ToleranceSet(**tol_kwargs),
    )


# ---------------------------------------------------------------------------
# structural analysis of a

def evaluate_a(spec: ProblemSpec, x):
    """(a, a', a'') at x in [0,1] by exact polynomial evaluation."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise DomainError(f"x = {x} outside [0,1]")
    c = spec.a_coeffs
    return (
        P.polyval(x, c),
        P.polyval(x, P.polyder(c)),
        P.polyval(x, P.polyder(c, 2)),
    )


def evaluate_f(spec: ProblemSpec, u):
    """(f, f', f'') at u by exact polynomial evaluation."""
    c = spec.f_coeffs
    return (
        P.polyval(u, c),
        P.polyval(u, P.polyder(c)),
        P.polyval(u, P.polyder(c, 2)),
    )


def monotonicity_intervals(spec: ProblemSpec) -> MonotonicityPartition:
    """Partition [0,1] at the sign-change roots of a' in (0,1).

    Raises DegenerateSignChange if a' vanishes in (0,1) without changing
    sign (even-multiplicity root): reported, never silently merged.
    """
    da = P.polyder(spec.a_coeffs)
    if len(da) == 1 and da[0] == 0.0:
        return MonotonicityPartition(breakpoints=(0.0, 1.0), signs=(), constant_flag=True)

    roots = sorted(
        r.real
        for r in P.polyroots(da)
        if abs(r.imag) < 1e-10 and 1e-12 < r.real < 1.0 - 1e-12
    )
    # collapse numerically coincident roots
    merged = []
    for r in roots:
        if merged and abs(r - merged[-1]) < 1e-10:
            continue
        merged.append(r)

    bp = [0.0] + merged + [1.0]
    signs = []
    for lo, hi in zip(bp[:-1], bp[1:]):
        mids = np.linspace(lo, hi, 9)[1:-1]
        vals = P.polyval(mids, da)
        s = np.sign(vals[np.argmax(np.abs(vals))])
        if s == 0:
            raise DegenerateSignChange(f"a' vanishes on [{lo:.6g}, {hi:.6g}]")
        signs.append(int(s))
    for i, r in enumerate(merged):
        if signs[i] == signs[i + 1]:
            raise DegenerateSignChange(f"a' has a root at x = {r:.6g} without a sign change")
    return MonotonicityPartition(breakpoints=tuple(bp), signs=tuple(signs), constant_flag=False)


def symmetry_check_a(spec: ProblemSpec, tol: float = 1e-10) -> bool:
    """True iff a is even about x = 1/2 up to tol * max|a| on a sample grid."""
    xs = np.linspace(0.0, 1.0, 2001)
    vals = spec.a(xs)
    mirror = spec.a(1.0 - xs)
    return float(np.max(np.abs(vals - mirror))) <= tol * float(np.max(np.abs(vals)))
