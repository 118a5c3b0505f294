"""Critical points, level-set preimages, and the sum identities."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neqlab.errors import DomainError, LevelTooCloseToCritical
from neqlab.integrate import integrate_ivp
from neqlab.levelsets import (
    critical_points,
    critical_sum,
    level_set_at,
    orthogonality_residuals,
    q_orbit_test,
    regular_sum,
    signed_sum,
)
from neqlab.profiles import cos_profile

POLY = np.polynomial.polynomial


class TestCriticalPoints:
    def test_cosine_profile(self):
        # u = cos(2 pi x): critical at 0, 1/2, 1 plus boundaries
        prof = cos_profile(2.0)
        cps = critical_points(prof)
        xs = sorted(cp.x for cp in cps)
        assert xs == pytest.approx([0.0, 0.5, 1.0], abs=1e-9)
        assert [cp.on_boundary for cp in cps] == [True, False, True]

    def test_second_derivatives(self):
        prof = cos_profile(2.0)
        cps = critical_points(prof)
        for cp in cps:
            # u'' = -(2 pi)^2 cos(2 pi x) at the critical points: -+(2 pi)^2
            assert abs(abs(cp.second_deriv) - (2 * np.pi) ** 2) < 1e-8
            assert not cp.degenerate

    def test_solution_profile_boundaries_always_critical(self, chafee15_spec, chafee15_records):
        rec = next(r for r in chafee15_records if not r.is_constant)
        cps = critical_points(rec.profile, chafee15_spec)
        assert any(cp.x == 0.0 for cp in cps)
        assert any(cp.x == 1.0 for cp in cps)

    def test_constant_profile_all_critical(self, chafee15_spec):
        prof = integrate_ivp(chafee15_spec, 1.0)  # constant equilibrium
        cps = critical_points(prof, chafee15_spec)
        assert cps.all_critical


class TestLevelSetAt:
    def test_regular_level_cosine(self):
        prof = cos_profile(2.0)
        rep = level_set_at(prof, 0.0)
        assert rep.n_regular == 2
        assert rep.n_critical == 0
        xs = sorted(x for x, _ in rep.regular_points)
        assert xs == pytest.approx([0.25, 0.75], abs=1e-9)

    def test_critical_level(self):
        prof = cos_profile(2.0)
        rep = level_set_at(prof, 1.0)
        assert rep.n_critical == 2                     # x = 0 and x = 1
        assert rep.n_regular == 0

    def test_near_critical_refused(self):
        # within the margin but outside the exact-match band
        prof = cos_profile(2.0)
        with pytest.raises(LevelTooCloseToCritical):
            level_set_at(prof, 1.0 - 1e-4)

    def test_constant_profile_refused(self, chafee15_spec):
        prof = integrate_ivp(chafee15_spec, 1.0)
        with pytest.raises(DomainError):
            level_set_at(prof, 1.0, chafee15_spec)


class TestSumIdentities:
    def test_forward_direction(self):
        # phi = u' h(u) makes the regular sum vanish at every regular level
        prof = cos_profile(2.0)
        rng = np.random.default_rng(11)
        for _ in range(5):
            h = rng.normal(size=5)
            phi = lambda x: prof.du(x) * POLY.polyval(prof.u(x), h)
            for q in (-0.7, -0.2, 0.4, 0.85):
                assert abs(regular_sum(prof, phi, q)) < 1e-7

    def test_orthogonality_residuals(self):
        prof = cos_profile(2.0)
        rng = np.random.default_rng(5)
        h = rng.normal(size=5)
        phi = lambda x: prof.du(x) * POLY.polyval(prof.u(x), h)
        res = orthogonality_residuals(prof, phi, 10)
        assert max(abs(r) for r in res) < 1e-9

    def test_converse_negative_control(self):
        # phi = u (not of the form u' h(u)): residuals and sums are nonzero
        prof = cos_profile(2.0)
        phi = lambda x: prof.u(x)
        res = orthogonality_residuals(prof, phi, 4)
        assert max(abs(r) for r in res) > 1e-3
        assert abs(regular_sum(prof, phi, 0.3)) > 1e-3

    @given(st.floats(-5, 5), st.floats(-0.8, 0.8))
    @settings(max_examples=25, deadline=None)
    def test_linearity_in_phi(self, c, q):
        prof = cos_profile(2.0)
        phi1 = lambda x: prof.du(x) * prof.u(x)
        phi2 = lambda x: np.cos(3.0 * np.asarray(x))
        combo = lambda x: phi1(x) + c * phi2(x)
        s = regular_sum(prof, combo, q)
        expected = regular_sum(prof, phi1, q) + c * regular_sum(prof, phi2, q)
        assert abs(s - expected) < 1e-8 * max(1.0, abs(expected))

    def test_signed_sum_orbit_form(self):
        # phi = g(u): sum of g(q) sign(u') over a level cancels in pairs
        # when up and down crossings balance
        prof = cos_profile(2.0)
        phi = lambda x: 1.0 + prof.u(x) ** 2
        for q in (-0.5, 0.1, 0.6):
            assert abs(signed_sum(prof, phi, q)) < 1e-10


class TestCriticalSum:
    def test_cosine_half_weights(self):
        # u = cos(2 pi x), phi = 1: q = 1 hits x = 0, 1 (both boundary,
        # weight 1/2), |u''| = (2 pi)^2 -> sum = 1/(2 pi)
        prof = cos_profile(2.0)
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))
        target = 1.0 / (2.0 * np.pi)
        assert abs(critical_sum(prof, one, 1.0) - target) < 1e-8
        assert abs(critical_sum(prof, one, -1.0) - target) < 1e-8

    def test_interior_weight_full(self):
        # q = -1 hits only x = 1/2 for one full wave u = cos(2 pi x)?  With
        # two boundary points at q = 1 covered above, check a 1-wave profile:
        # u = cos(pi x): q = -1 hits x = 1 only (boundary, weight 1/2)
        prof = cos_profile(1.0)
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))
        val = critical_sum(prof, one, -1.0)
        assert abs(val - 0.5 / np.pi) < 1e-8

    def test_no_critical_preimages_raises(self):
        prof = cos_profile(2.0)
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))
        with pytest.raises(DomainError):
            critical_sum(prof, one, 0.5)


class TestQOrbitTest:
    def test_member(self):
        prof = cos_profile(2.0)
        Phi = lambda x: 2.0 * prof.u(x) ** 3 - prof.u(x)    # g(u(x))
        ok, witness = q_orbit_test(prof, Phi)
        assert ok and witness is None

    def test_nonmember(self):
        prof = cos_profile(2.0)
        Phi = lambda x: np.asarray(x, dtype=float)          # x is not g(u(x))
        ok, witness = q_orbit_test(prof, Phi)
        assert not ok
        q, p_i, p_j = witness
        assert abs(float(prof.u(p_i)) - q) < 1e-9
        assert abs(float(prof.u(p_j)) - q) < 1e-9

    def test_sign_function_is_q_orbit_only(self):
        # u'/|u'| is constant on level sets minus critical values for a
        # single-lap equilibrium but has no continuous g: still accepted
        # by the q-orbit test (discontinuities live at critical values)
        prof = cos_profile(1.0)
        Phi = lambda x: np.sign(prof.du(x))
        ok, _ = q_orbit_test(prof, Phi)
        assert ok


class TestEquilibriumLevelSums:
    def test_forward_identity_two_lap(self, chafee45_spec, chafee45_records):
        # phi = u' h(u) on a two-lap equilibrium: each interior level has
        # one up and one down crossing, so the regular sum cancels exactly
        two_lap = [r for r in chafee45_records
                   if not r.is_constant
                   and len(critical_points(r.profile, chafee45_spec)) == 3]
        assert two_lap, "expected a two-lap equilibrium at lam = 45"
        prof = two_lap[0].profile
        phi = lambda x: prof.du(x) * (1.0 + prof.u(x) ** 2)
        cps = critical_points(prof, chafee45_spec)
        vals = sorted(cps.values())
        lo, hi = vals[0], vals[-1]
        mid = [v for v in vals if lo < v < hi]
        for q in np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 9):
            if any(abs(q - v) < 0.02 * (hi - lo) for v in mid):
                continue
            rep = level_set_at(prof, q, chafee45_spec)
            if rep.n_regular < 2:
                continue
            assert abs(regular_sum(prof, phi, q, chafee45_spec, report=rep)) < 1e-8
