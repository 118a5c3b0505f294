"""Perturbation scans (genericity) and bifurcation sweeps."""

import numpy as np
import pytest

from neqlab.equilibria import find_equilibria
from neqlab.errors import DomainError
from neqlab.perturb import (
    bifurcation_sweep,
    perturbation_scan,
)
from neqlab.problem import ProblemSpec
from neqlab.spectrum import eigenvalues_sl

PI2 = float(np.pi**2)


@pytest.fixture(scope="module")
def resonant_spec():
    # f(u) = pi^2 u: trivial branch has an exact zero eigenvalue
    return ProblemSpec(a_coeffs=(1.0,), f_coeffs=(0.0, PI2), scan_bound=2.0)


@pytest.fixture(scope="module")
def resonant_record(resonant_spec):
    records, _ = find_equilibria(resonant_spec)
    assert len(records) == 1 and records[0].is_constant
    rec = records[0]
    rec.spectrum = eigenvalues_sl(resonant_spec, rec.u0)
    return rec


class TestPerturbationScan:
    def test_linear_shift_law(self, resonant_spec, resonant_record):
        # g(u) = u shifts every eigenvalue by eps: min|eig| = eps
        eps_list = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
        sweep = perturbation_scan(resonant_spec, resonant_record, (0.0, 1.0), eps_list)
        for row, eps in zip(sweep.rows, eps_list):
            assert row.n_equilibria == 1
            entry = row.entries[0]
            err = abs(entry.min_abs - eps)
            assert err < max(1e-8, 10 * 1e-8), f"eps={eps}: min_abs={entry.min_abs}"

    def test_quadratic_negative_control(self, resonant_spec, resonant_record):
        # g(u) = u^2 has g'(0) = 0: the zero eigenvalue of the trivial
        # branch does not move at first order
        sweep = perturbation_scan(resonant_spec, resonant_record, (0.0, 0.0, 1.0),
                                  [1e-4, 1e-3, 1e-2])
        for row in sweep.rows:
            assert row.entries[0].min_abs < resonant_spec.tol.hyp_tol

    def test_requires_zero_constant_term(self, resonant_spec, resonant_record):
        with pytest.raises(DomainError):
            perturbation_scan(resonant_spec, resonant_record, (1.0, 1.0), [1e-3])

    def test_restores_hyperbolicity(self, resonant_spec, resonant_record):
        sweep = perturbation_scan(resonant_spec, resonant_record, (0.0, 1.0), [1e-2])
        assert sweep.rows[0].entries[0].hyperbolic == "hyperbolic"


class TestBifurcationSweep:
    def test_trivial_branch_crossings(self, chafee1_spec):
        # f = lam (u - u^3): the trivial branch destabilizes at pi^2, 4 pi^2
        sweep = bifurcation_sweep(chafee1_spec, (5.0, 45.0), 9)
        assert len(sweep.crossings) == 2
        assert abs(sweep.crossings[0] - PI2) < 1e-4
        assert abs(sweep.crossings[1] - 4 * PI2) < 4e-4

    def test_equilibrium_counts_monotone(self, chafee1_spec):
        # counts increase through the pitchforks: 5 between pi^2 and
        # 4 pi^2, 7 above 4 pi^2 (3 constants + 2 nonconstant per branch)
        sweep = bifurcation_sweep(chafee1_spec, (15.0, 45.0), 3)
        counts = [row.n_equilibria for row in sweep.rows]
        assert counts[0] == 5
        assert counts[-1] == 7

    def test_rows_carry_morse_data(self, chafee1_spec):
        sweep = bifurcation_sweep(chafee1_spec, (15.0, 25.0), 2)
        for row in sweep.rows:
            for e in row.entries:
                assert e.n_positive >= 0
                assert e.hyperbolic in ("hyperbolic", "non_hyperbolic", "undecided")

    def test_bad_step_count(self, chafee1_spec):
        with pytest.raises(DomainError):
            bifurcation_sweep(chafee1_spec, (1.0, 2.0), 1)
