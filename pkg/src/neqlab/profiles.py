"""Dense, differentiable solution representations.

A Profile stores accepted integrator steps together with per-step
degree-7 power-basis interpolants for the momentum-form state
(u, p = a u').  Everything downstream (level sets, quadrature,
residual checks) interpolates; nothing re-integrates.

AnalyticProfile wraps closed-form u, u', u'' for synthetic tests
(e.g. u = cos 2*pi*x) behind the same evaluation interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError
from .problem import ProblemSpec

PROFILE_SCHEMA_VERSION = 1

# Gauss-Legendre rule used for all dense-output quadrature (7 points per step).
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(7)

# sample points in local step variable s in [0,1] used to convert an
# integrator dense segment (degree <= 7 polynomial) to power basis
_FIT_S = 0.5 * (1.0 - np.cos(np.pi * np.arange(8) / 7.0))  # Chebyshev points
_FIT_V = np.vander(_FIT_S, 8, increasing=True)
_FIT_VINV = np.linalg.inv(_FIT_V)


def fit_segment(ts, ys):
    """Power-basis coefficients (len 8) interpolating ys at local points _FIT_S."""
    return _FIT_VINV @ np.asarray(ys, dtype=float)


@dataclass
class Profile:
    """Piecewise-polynomial representation of (u, p) on [0,1].

    kind is 'solution' (state u, p = a u') or 'variational'
    (state v, q = a v'); variational profiles keep a reference to the
    base solution so second derivatives can use the frozen coefficients.
    """

    kind: str
    nodes: np.ndarray                 # accepted step endpoints, nodes[0]=0, nodes[-1]=1
    states: np.ndarray                # (len(nodes), 2) state at nodes
    coeffs_u: np.ndarray              # (n_steps, 8) local power basis for component 0
    coeffs_p: np.ndarray              # (n_steps, 8) local power basis for component 1
    spec: ProblemSpec
    base: "Profile | None" = None
    _du_scale: float = field(default=None, repr=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.nodes[0] != 0.0 or abs(self.nodes[-1] - 1.0) > 1e-12:
            raise DomainError("profile nodes must span [0,1]")
        if self.kind == "variational" and self.base is None:
            raise DomainError("variational profile requires a base solution")

    # -- evaluation -------------------------------------------------------

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        j = np.clip(np.searchsorted(self.nodes, x, side="right") - 1, 0, len(self.nodes) - 2)
        h = self.nodes[j + 1] - self.nodes[j]
        s = (x - self.nodes[j]) / h
        return j, s, h

    def _eval_component(self, coeffs, x, deriv=0):
        j, s, h = self._locate(x)
        c = coeffs[j]  # (..., 8)
        if deriv:
            k = np.arange(1, 8)
            c = c[..., 1:] * k
        # Horner in s, vectorized over points
        acc = np.zeros_like(np.asarray(s, dtype=float))
        for i in range(c.shape[-1] - 1, -1, -1):
            acc = acc * s + c[..., i]
        if deriv:
            acc = acc / h
        return acc

    def u(self, x):
        """Primary component: u for solution profiles, v for variational."""
        return self._eval_component(self.coeffs_u, x)

    def p(self, x):
        """Momentum component a(x) * u'(x)."""
        return self._eval_component(self.coeffs_p, x)

    def du(self, x):
        """u'(x) = p(x) / a(x)."""
        return self.p(x) / self.spec.a(x)

    def dp(self, x):
        """d/dx of the momentum interpolant (independent of the ODE rhs)."""
        return self._eval_component(self.coeffs_p, x, deriv=1)

    def d2u(self, x):
        """u''(x) from the frozen dynamics: (p' - a' u') / a with p' from the rhs."""
        a = self.spec.a(x)
        da = self.spec.da(x)
        dux = self.du(x)
        if self.kind == "solution":
            rhs_p = -self.spec.f(self.u(x))
        else:
            rhs_p = -self.spec.df(self.base.u(x)) * self.u(x)
        return (rhs_p - da * dux) / a

    def residual(self, x):
        """Strong-form residual (a u')' + f(u), via interpolant differentiation.

        Uses dp from the dense polynomial (not the rhs), so it is an
        honest consistency check rather than an identity.
        """
        if self.kind == "solution":
            return self.dp(x) + self.spec.f(self.u(x))
        return self.dp(x) + self.spec.df(self.base.u(x)) * self.u(x)

    def segments(self):
        return self.nodes

    def du_scale(self):
        """max |u'| over a dense sample (cached)."""
        if self._du_scale is None:
            xs = self.sample_grid(4)
            self._du_scale = float(np.max(np.abs(self.du(xs))))
        return self._du_scale

    def sample_grid(self, per_step=4):
        """Refined grid with per_step interior points in every step."""
        pieces = [np.array([0.0])]
        for lo, hi in zip(self.nodes[:-1], self.nodes[1:]):
            pieces.append(np.linspace(lo, hi, per_step + 2)[1:])
        return np.concatenate(pieces)

    # -- quadrature -------------------------------------------------------

    def integrate(self, fn, lo=0.0, hi=1.0):
        """Composite 7-point Gauss-Legendre of fn(x) over [lo, hi] per step."""
        if hi < lo:
            raise DomainError("integration bounds reversed")
        cuts = self.nodes[(self.nodes > lo) & (self.nodes < hi)]
        edges = np.concatenate([[lo], cuts, [hi]])
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            xs = mid + half * _GL_NODES
            total += half * float(np.dot(_GL_WEIGHTS, fn(xs)))
        return total

    # -- serialization ----------------------------------------------------

    def to_json_dict(self):
        return {
            "schema_version": PROFILE_SCHEMA_VERSION,
            "kind": self.kind,
            "interpolant": "power_basis_deg7",
            "spec_hash": self.spec.content_hash(),
            "nodes": self.nodes.tolist(),
            "states": self.states.tolist(),
            "coeffs_u": self.coeffs_u.tolist(),
            "coeffs_p": self.coeffs_p.tolist(),
        }

    @classmethod
    def from_json_dict(cls, doc, spec, base=None):
        if doc.get("schema_version") != PROFILE_SCHEMA_VERSION:
            raise DomainError(f"unsupported profile schema {doc.get('schema_version')!r}")
        return cls(
            kind=doc["kind"],
            nodes=np.array(doc["nodes"]),
            states=np.array(doc["states"]),
            coeffs_u=np.array(doc["coeffs_u"]),
            coeffs_p=np.array(doc["coeffs_p"]),
            spec=spec,
            base=base,
        )


class AnalyticProfile:
    """Closed-form profile for synthetic level-set and identity tests."""

    kind = "analytic"

    def __init__(self, u, du, d2u, n_segments=256):
        self._u, self._du, self._d2u = u, du, d2u
        self.nodes = np.linspace(0.0, 1.0, n_segments + 1)

    def u(self, x):
        return self._u(np.asarray(x, dtype=float))

    def du(self, x):
        return self._du(np.asarray(x, dtype=float))

    def d2u(self, x):
        return self._d2u(np.asarray(x, dtype=float))

    def segments(self):
        return self.nodes

    def du_scale(self):
        return float(np.max(np.abs(self.du(self.sample_grid(4)))))

    def sample_grid(self, per_step=4):
        n = (len(self.nodes) - 1) * (per_step + 1) + 1
        return np.linspace(0.0, 1.0, n)

    def integrate(self, fn, lo=0.0, hi=1.0):
        return Profile.integrate(self, fn, lo, hi)


def cos_profile(n_waves=2.0, n_segments=256):
    """u = cos(n_waves * pi * x) as an AnalyticProfile."""
    w = n_waves * np.pi
    return AnalyticProfile(
        u=lambda x: np.cos(w * x),
        du=lambda x: -w * np.sin(w * x),
        d2u=lambda x: -w * w * np.cos(w * x),
        n_segments=n_segments,
    )
