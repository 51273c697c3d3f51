import math

import numpy as np
import pytest

from coulombgas.droplet import (
    Phase,
    PhaseError,
    build_rational_map,
    critical_tau,
    postcritical_droplet,
    precritical_droplet,
)
from coulombgas.potentials import COORD_SQUARED, ModelParams
from coulombgas.variational import (
    PhaseMismatch,
    VerificationReport,
    mass_one_check,
    unit_mass_residues,
    verify_equality,
    verify_inequality,
)


class TestEquality:
    def test_postcritical_closed_forms(self):
        params = ModelParams(tau=1 / 6, c=1.0)
        region = postcritical_droplet(params)
        report = verify_equality(params, region, 20)
        assert report.phase is Phase.POST_CRITICAL
        assert report.interior_max_residual <= 1e-10
        assert report.constant_spread <= 1e-7

    def test_unit_disk_exact(self):
        params = ModelParams(tau=0.0, c=0.0)
        region = postcritical_droplet(params)
        report = verify_equality(params, region, 10)
        assert report.interior_max_residual <= 1e-14

    def test_precritical_residues(self):
        params = ModelParams(tau=0.5, c=1.0)
        region = precritical_droplet(params)
        report = verify_equality(params, region, 20)
        assert report.phase is Phase.PRE_CRITICAL
        assert report.interior_max_residual <= 1e-9
        assert report.constant_spread <= 1e-7

    def test_threaded_reduction_deterministic(self):
        params = ModelParams(tau=0.5, c=1.0)
        region = precritical_droplet(params)
        single = verify_equality(params, region, 12, threads=1)
        multi = verify_equality(params, region, 12, threads=4)
        assert single.interior_max_residual == multi.interior_max_residual
        ineq1 = verify_inequality(params, region, 12, threads=1)
        ineq4 = verify_inequality(params, region, 12, threads=4)
        assert ineq1.exterior_min_margin == ineq4.exterior_min_margin
        assert ineq1.min_exterior_gradient == ineq4.min_exterior_gradient

    def test_offcentre(self):
        params = ModelParams(tau=1 / 3, c=1 / 7, p=complex(3 / 5, 1 / 5))
        region = postcritical_droplet(params)
        report = verify_equality(params, region, 15)
        assert report.interior_max_residual <= 1e-10

    def test_phase_mismatch(self):
        post = ModelParams(tau=1 / 6, c=1.0)
        pre = ModelParams(tau=0.5, c=1.0)
        region = postcritical_droplet(post)
        with pytest.raises(PhaseMismatch):
            verify_equality(pre, region, 10)
        with pytest.raises(PhaseMismatch):
            verify_inequality(pre, region, 8)


class TestInequality:
    def test_postcritical(self):
        params = ModelParams(tau=1 / 6, c=1.0)
        region = postcritical_droplet(params)
        report = verify_inequality(params, region, 32)
        assert report.exterior_min_margin >= -1e-9
        assert report.monotone_beyond_layer
        assert report.min_exterior_gradient > 0

    def test_precritical(self):
        params = ModelParams(tau=0.5, c=1.0)
        region = precritical_droplet(params)
        report = verify_inequality(params, region, 32)
        assert report.exterior_min_margin >= -1e-9
        assert report.monotone_beyond_layer
        assert report.min_exterior_gradient > 0
        assert report.real_axis_margin > 0

    def test_hole_margin_matches_path_integral(self):
        """The closed-form margin inside the hole agrees with integrating
        dH radially inward from the hole boundary."""
        params = ModelParams(tau=0.2, c=1.0)
        t = params.tau
        rho = math.sqrt((1 - t * t) * params.c)

        def dH(z):
            # derivative of the effective potential inside the hole
            return np.conj(z) / (1 - t * t) - params.c / z

        nodes, weights = np.polynomial.legendre.leggauss(24)
        for r_end in (0.8 * rho, 0.4 * rho):
            z0, z1 = rho + 0j, r_end + 0j
            seg = z1 - z0
            integral = sum(
                w * (2.0 * (dH(z0 + 0.5 * (x + 1) * seg) * seg).real)
                for x, w in zip(nodes, weights)
            ) * 0.5
            closed = (2 * rho**2 * math.log(rho / r_end) + r_end**2 - rho**2) / (1 - t * t)
            assert integral == pytest.approx(closed, abs=1e-10)
            assert closed > 0


class TestMassOne:
    def test_frozen_case(self):
        params = ModelParams(tau=0.5, c=1.0)
        m = build_rational_map(params)
        assert mass_one_check(m) <= 1e-8
        res0, resa = unit_mass_residues(m)
        assert res0 == pytest.approx(1.5, abs=1e-10)
        assert resa == pytest.approx(-0.75, abs=1e-10)

    def test_sweep(self):
        for c in (0.5, 1.0, 3.0):
            tc = critical_tau(c)
            for tau in np.linspace(tc + 0.03, 0.9, 4):
                params = ModelParams(tau=float(tau), c=c)
                m = build_rational_map(params)
                assert mass_one_check(m) <= 1e-8
                res0, resa = unit_mass_residues(m)
                t = params.tau
                assert res0 == pytest.approx((1 + c) * (1 - t * t), abs=1e-10)
                assert resa == pytest.approx(-c * (1 - t * t), abs=1e-10)

    def test_critical_tie_rejected(self):
        params = ModelParams(tau=1 / 3, c=1.0)
        m = build_rational_map(params)
        with pytest.raises(PhaseError):
            mass_one_check(m)


class TestReport:
    def test_text_block(self):
        report = VerificationReport(phase=Phase.POST_CRITICAL, grid_size=10,
                                    interior_max_residual=1e-12)
        text = report.to_text()
        assert "phase post-critical" in text
        assert "interior_max_residual" in text
        assert "mass_residual" not in text
