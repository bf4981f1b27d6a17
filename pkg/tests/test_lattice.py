"""Lattice operators, exchange relation, commutativity, continuum limit."""

import math

import numpy as np
import pytest

from qnls import lattice as lat
from qnls.errors import CutoffTooSmall, RMatrixPole, SizeLimit
from qnls.transfer import theta

BOX_L = 2.0 * math.pi


class TestSiteOperators:
    def test_commutator_below_cutoff(self):
        d, step = 5, 0.3
        a = lat.annihilator(d, step)
        comm = a @ a.conj().T - a.conj().T @ a
        # canonical value 1/step on occupations <= d-2
        assert np.allclose(np.diag(comm)[: d - 1], 1.0 / step)

    def test_density_sqrt_diagonal(self):
        d, step, c = 4, 0.25, 1.5
        rho = lat.density_sqrt(d, step, c)
        for n in range(d):
            assert rho[n, n] == pytest.approx(math.sqrt(1 + c * step * n / 4))

    def test_naive_ordered_sqrt_differs_from_level_one(self):
        d, step, c = 4, 0.25, 1.5
        rho = lat.density_sqrt(d, step, c)
        naive = lat.density_sqrt_naive_ordered(d, step, c)
        assert naive[0, 0] == pytest.approx(1.0)
        assert abs(rho[1, 1] - naive[1, 1]) > 1e-6
        # the deviation is second order in (c step)
        assert abs(rho[1, 1] - naive[1, 1]) == pytest.approx(
            (c * step / 4) ** 2 / 8, rel=0.1)


class TestLOperator:
    def test_vacuum_only_cutoff_is_diagonal(self):
        spec = lat.LatticeSpec(1, 1, 0.4, 1.0)
        blocks = lat.site_l_blocks(spec, 0.9)
        assert blocks[0][0][0, 0] == pytest.approx(1 - 0.5j * 0.9 * 0.4)
        assert blocks[1][1][0, 0] == pytest.approx(1 + 0.5j * 0.9 * 0.4)
        assert np.all(blocks[0][1] == 0) and np.all(blocks[1][0] == 0)

    def test_diagonal_entry_on_occupation_states(self):
        spec = lat.LatticeSpec(1, 4, 0.3, 2.0)
        blocks = lat.site_l_blocks(spec, 0.7)
        for n in range(4):
            expected = 1 - 0.5j * 0.7 * 0.3 + 2.0 * 0.3 * n / 2
            assert blocks[0][0][n, n] == pytest.approx(expected)

    def test_continuum_linearization(self):
        # diagonal entries are exactly affine in the step; the off-diagonal
        # deviate from the unit-density model at order step^(3/2) in norm
        lam, c, d = 0.7, 1.5, 4
        norms = []
        steps = [0.2 / 2 ** k for k in range(5)]
        for step in steps:
            spec = lat.LatticeSpec(1, d, step, c)
            blocks = lat.site_l_blocks(spec, lam)
            num = lat.creator(d, step) @ lat.annihilator(d, step)
            affine = (1 - 0.5j * lam * step) * np.eye(d) \
                + 0.5 * c * step * step * num
            assert np.allclose(blocks[0][0], affine, atol=1e-14)
            b_lin = -1j * step * math.sqrt(c) * lat.creator(d, step)
            norms.append(np.linalg.norm(blocks[0][1] - b_lin, 2))
        fit = np.polyfit(np.log(steps), np.log(norms), 1)[0]
        assert fit == pytest.approx(1.5, abs=0.1)
        scale = [nv / s ** 1.5 for nv, s in zip(norms, steps)]
        assert max(scale) / min(scale) < 1.3  # stable fitted constant


class TestMonodromy:
    def test_single_site_is_l(self):
        spec = lat.LatticeSpec(1, 3, 0.3, 1.0)
        T = lat.monodromy(spec, 0.8)
        blocks = lat.site_l_blocks(spec, 0.8)
        for r in range(2):
            for s in range(2):
                assert np.allclose(T[r][s], blocks[r][s])

    def test_two_site_vacuum_transfer(self):
        spec = lat.LatticeSpec(2, 2, 0.4, 1.0)
        lam = 0.9
        tau = lat.transfer_operator(spec, lam)
        vac = tau[0, 0]
        expected = (1 - 0.5j * lam * 0.4) ** 2 + (1 + 0.5j * lam * 0.4) ** 2
        assert vac == pytest.approx(expected)

    def test_number_conservation(self):
        spec = lat.LatticeSpec(3, 3, 0.35, 1.2)
        for lam in (0.3, 0.7 - 0.2j, -1.1 + 0.4j):
            assert lat.number_conservation_defect(spec, lam) == 0.0

    def test_sector_contraction_matches_full_space(self):
        spec = lat.LatticeSpec(3, 4, 0.25, 1.0)
        lam = 0.6 - 0.2j
        tau = lat.transfer_operator(spec, lam)
        full = lat.sector_block(tau, spec, 2)
        fast = lat.tau_sector_matrix(spec, lam, lat.occupation_configs(spec, 2))
        assert np.max(np.abs(full - fast)) < 1e-13

    def test_adjoint_pairing_at_real_parameter(self):
        spec = lat.LatticeSpec(3, 4, 0.3, 1.0)
        assert lat.hermiticity_pairing_defect(spec, 1.3) < 1e-12

    def test_size_guard(self):
        with pytest.raises(SizeLimit):
            lat.monodromy(lat.LatticeSpec(10, 5, 0.1, 1.0), 0.5)


class TestExchangeRelation:
    def test_trivial_cutoff(self):
        res = lat.rtt_residual(0.4, 1.1, lat.LatticeSpec(2, 1, 0.3, 1.3))
        assert res["residual"] == 0.0

    def test_single_site_grid(self):
        spec = lat.LatticeSpec(1, 4, 0.3, 1.3)
        rng = np.random.default_rng(5)
        worst = 0.0
        orderings = set()
        for _ in range(25):
            lam, mu = rng.normal(size=2) + 1j * rng.normal(size=2)
            res = lat.rtt_residual(lam, mu, spec)
            worst = max(worst, res["residual"])
            orderings.add(res["ordering"])
        assert worst < 1e-12
        assert orderings == {"lam_mu"}

    def test_other_ordering_fails(self):
        res = lat.rtt_residual(0.37 + 0.11j, -0.9 + 0.55j,
                               lat.LatticeSpec(1, 4, 0.3, 1.3))
        assert res["residual_mu_lam"] > 1e-3
        assert res["residual_lam_mu"] < 1e-12

    def test_pole_guard(self):
        with pytest.raises(RMatrixPole):
            lat.rtt_residual(1.0, 1.0, lat.LatticeSpec(1, 3, 0.3, 1.0))


class TestCommutingFamily:
    def test_vacuum_sector_scalar(self):
        spec = lat.LatticeSpec(3, 3, 0.4, 1.0)
        assert lat.tau_commutator_norm(0.4, 1.2, spec, 0) == 0.0

    def test_protected_sectors(self):
        rng = np.random.default_rng(7)
        for M in (2, 3, 4):
            for n in (1, 2, 3):
                spec = lat.LatticeSpec(M, n + 2, 0.4, 1.1)
                for _ in range(3):
                    lam, mu = rng.normal(size=2) + 1j * rng.normal(size=2)
                    assert lat.tau_commutator_norm(lam, mu, spec, n) < 1e-12

    def test_cutoff_guard(self):
        with pytest.raises(CutoffTooSmall):
            lat.tau_commutator_norm(0.3, 1.1, lat.LatticeSpec(2, 3, 0.3, 1.0), 2)

    def test_truncation_leakage_at_cutoff_equal_sector(self):
        clean = lat.tau_commutator_norm(
            0.3 + 0.4j, -1.1 + 0.2j, lat.LatticeSpec(3, 5, 0.25, 1.0), 3)
        leaking = lat.tau_commutator_norm(
            0.3 + 0.4j, -1.1 + 0.2j, lat.LatticeSpec(3, 3, 0.25, 1.0), 3,
            enforce_cutoff=False)
        assert clean < 1e-12
        assert leaking > 1e-6

    def test_one_buffer_level_still_exact(self):
        value = lat.tau_commutator_norm(
            0.3 + 0.4j, -1.1 + 0.2j, lat.LatticeSpec(3, 3, 0.25, 1.0), 2,
            enforce_cutoff=False)
        assert value < 1e-12


class TestContinuumLimit:
    def test_vacuum_eigenvalue_formula(self):
        spec = lat.LatticeSpec(8, 3, BOX_L / 8, 1.0)
        lam = 0.9
        expected = (1 - 0.5j * lam * spec.step) ** 8 \
            + (1 + 0.5j * lam * spec.step) ** 8
        assert lat.vacuum_eigenvalue(spec, lam) == pytest.approx(expected)

    def test_zero_parameter_exact_at_every_step(self):
        for M in (4, 8, 16):
            spec = lat.LatticeSpec(M, 3, BOX_L / M, 1.0)
            assert lat.vacuum_eigenvalue(spec, 0.0) == pytest.approx(2.0)

    def test_one_particle_error_decreases(self):
        errs = []
        for M in (8, 16, 32, 64):
            spec = lat.LatticeSpec(M, 3, BOX_L / M, 1.0)
            val = lat.one_particle_eigenvalue(spec, 0.9, 1)
            target = theta(0.9, [2 * math.pi / BOX_L], 1.0, BOX_L)
            errs.append(abs(val - target))
        assert all(a > b for a, b in zip(errs, errs[1:]))

    def test_fitted_orders(self):
        rep = lat.continuum_limit_rate(1.0, BOX_L, 0.9)
        assert rep["order_vacuum_raw"] >= 0.8
        assert rep["order_one_particle_raw"] >= 0.8
        assert rep["order_vacuum_normalized"] == pytest.approx(2.0, abs=0.25)
        assert rep["order_one_particle_normalized"] == pytest.approx(2.0, abs=0.25)


class TestOrderingBreakdown:
    def test_single_site_entry_already_ordered(self):
        rep = lat.normal_ordering_breakdown(lat.LatticeSpec(2, 3, 0.2, 1.5), 0.7)
        assert rep["one_site_difference"] == 0.0

    def test_two_site_cross_term_differs(self):
        rep = lat.normal_ordering_breakdown(lat.LatticeSpec(2, 3, 0.2, 1.5), 0.7)
        assert rep["relative_difference"] > 0.0

    def test_quadratic_step_scaling(self):
        rep = lat.ordering_defect_rate(1.5, 3, [0.2 / 2 ** k for k in range(5)],
                                       0.7)
        assert rep["order"] == pytest.approx(2.0, abs=0.25)
