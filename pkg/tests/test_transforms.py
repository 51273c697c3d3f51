import math

import numpy as np
import pytest

from coulombgas.droplet import PhaseError, build_rational_map, invert_map
from coulombgas.potentials import ModelParams, d_squared_potential
from coulombgas.transforms import (
    BoundaryAmbiguity,
    SourceRegion,
    disk_log_potential,
    ellipse_cauchy,
    ellipse_log_potential,
    ellipse_power_moment,
    equilibrium_moments,
    jensen_average,
    postcritical_cauchy,
    postcritical_moments_from_cauchy,
    precritical_cauchy,
)

from oracles import contour_cauchy, quad2d_ellipse, radial_cauchy, radial_log_potential, ray_to_ellipse


class TestEllipseCauchy:
    def test_disk_inside(self):
        cv = ellipse_cauchy(1.0, 1.0, 0.5)
        assert cv.region_tag is SourceRegion.INSIDE_SOURCE
        assert cv.value == pytest.approx(0.5, abs=1e-15)

    def test_disk_outside(self):
        cv = ellipse_cauchy(1.0, 1.0, 2.0)
        assert cv.region_tag is SourceRegion.OUTSIDE_SOURCE
        assert cv.value == pytest.approx(0.5, abs=1e-14)

    def test_exterior_quadrature_oracle(self):
        a, b, zeta = 1.5, 0.5, 2 + 1j
        oracle = quad2d_ellipse(lambda z: 1.0 / (zeta - z), a, b)
        assert abs(ellipse_cauchy(a, b, zeta).value - oracle) <= 1e-6

    def test_interior_radial_oracle(self):
        a, b = 1.3, 0.6
        for zeta in (0.2 + 0.1j, -0.5 - 0.2j, 0.9 + 0.05j):
            oracle = radial_cauchy(lambda phi: ray_to_ellipse(zeta, phi, a, b))
            assert abs(ellipse_cauchy(a, b, zeta).value - oracle) <= 1e-6

    def test_branch_continuity_on_boundary(self):
        a, b = 1.4, 0.7
        for t in np.linspace(0.0, 2 * np.pi, 17):
            z = a * math.cos(t) + 1j * b * math.sin(t)
            inside = np.conj(z) - (a - b) / (a + b) * z
            s = np.sqrt(z * z - a * a + b * b)
            if (z.real * s.real + z.imag * s.imag) < 0:
                s = -s
            outside = 2 * a * b / (z + s)
            assert abs(inside - outside) <= 1e-9

    def test_bad_axes(self):
        with pytest.raises(ValueError):
            ellipse_cauchy(0.0, 1.0, 1j)


class TestEllipseLogPotential:
    def test_disk_centre(self):
        for R in (1.0, 2.5):
            expected = 2 * R * R * math.log(R) - R * R
            assert ellipse_log_potential(R, R, 0.0) == pytest.approx(expected, abs=1e-10)

    def test_gradient_matches_cauchy(self):
        """d/dz of the log potential equals the interior Cauchy transform."""
        a, b = 1.6, 0.9
        h = 1e-5
        for zeta in (0.3 + 0.2j, -0.7 + 0.1j):
            fx = (ellipse_log_potential(a, b, zeta + h) - ellipse_log_potential(a, b, zeta - h)) / (2 * h)
            fy = (ellipse_log_potential(a, b, zeta + 1j * h) - ellipse_log_potential(a, b, zeta - 1j * h)) / (2 * h)
            fd = (fx - 1j * fy) / 2
            assert abs(fd - ellipse_cauchy(a, b, zeta).value) <= 1e-6

    def test_radial_quadrature_oracle(self):
        a, b = 1.5, 0.5
        for zeta in (0.0, 0.4 + 0.1j, -0.8 - 0.15j, 1.0 + 0.0j, 0.2j):
            oracle = radial_log_potential(lambda phi: ray_to_ellipse(zeta, phi, a, b))
            assert abs(ellipse_log_potential(a, b, zeta) - oracle) <= 1e-6

    def test_outside_rejected(self):
        with pytest.raises(ValueError):
            ellipse_log_potential(1.0, 0.5, 2.0)


class TestDiskLogPotential:
    def test_outside_value(self):
        assert disk_log_potential(1.0, 0.0, math.e) == pytest.approx(1.0, abs=1e-15)

    def test_centre_value(self):
        assert disk_log_potential(1.0, 0.0, 0.0) == pytest.approx(-0.5, abs=1e-15)

    def test_branch_continuity(self):
        R, p = 1.3, 0.4 + 0.2j
        for ang in (0.0, 1.1, 3.9):
            z = p + R * np.exp(1j * ang)
            outside = R * R * math.log(abs(z - p))
            inside = R * R * math.log(R) - R * R / 2 + abs(z - p) ** 2 / 2
            assert outside == pytest.approx(inside, abs=1e-12)


class TestJensen:
    def test_values(self):
        assert jensen_average(2.0, 1.0) == pytest.approx(math.log(2.0))
        assert jensen_average(1.0, 3.0) == pytest.approx(math.log(3.0))
        assert jensen_average(1.0, 1.0) == pytest.approx(0.0)

    def test_midpoint_oracle(self):
        n = 10**4
        theta = 2 * np.pi * (np.arange(n) + 0.5) / n
        for r, zeta in [(2.0, 0.7 + 0.3j), (0.5, 1.2 - 0.4j)]:
            oracle = float(np.mean(np.log(np.abs(zeta - r * np.exp(1j * theta)))))
            assert jensen_average(r, zeta) == pytest.approx(oracle, abs=1e-6)


class TestPowerMoments:
    def test_mass(self):
        assert ellipse_power_moment(1.5, 0.5, 0) == pytest.approx(0.75)

    def test_disk_higher_vanish(self):
        for k in (1, 2, 3):
            assert ellipse_power_moment(1.0, 1.0, k) == 0.0

    def test_frozen_value(self):
        assert ellipse_power_moment(1.5, 0.5, 1) == pytest.approx(0.375, abs=1e-14)

    def test_quadrature_oracle(self):
        a, b = 1.2, 0.8
        for k in (0, 1, 2, 3):
            oracle = quad2d_ellipse(lambda z: z ** (2 * k), a, b)
            assert ellipse_power_moment(a, b, k) == pytest.approx(
                float(oracle.real), abs=1e-9
            )
            odd = quad2d_ellipse(lambda z: z ** (2 * k + 1), a, b)
            assert abs(odd) <= 1e-9


class TestEquilibriumMoments:
    def test_second_moment_isotropic(self):
        assert equilibrium_moments(ModelParams(tau=0.0, c=1.0), 2) == pytest.approx(0.0)

    def test_second_moment_formula(self):
        m2 = equilibrium_moments(ModelParams(tau=0.2, c=1.0), 2)
        assert m2 == pytest.approx(0.2 * 4.0, abs=1e-14)

    def test_odd_moments_vanish_centred(self):
        p = ModelParams(tau=0.25, c=0.7)
        assert equilibrium_moments(p, 1) == 0
        assert equilibrium_moments(p, 3) == 0

    def test_offcentre_odd(self):
        p = ModelParams(tau=0.2, c=1.0, p=0.3 + 0j)
        assert equilibrium_moments(p, 1) == pytest.approx(-0.3, abs=1e-14)
        assert equilibrium_moments(p, 3) == pytest.approx(-0.027, abs=1e-14)

    def test_precritical_rejected(self):
        # the closed forms are a post-critical statement; tau=1/2, c=1 is
        # beyond the critical value 1/3
        with pytest.raises(PhaseError):
            equilibrium_moments(ModelParams(tau=0.5, c=1.0), 2)

    def test_mass(self):
        assert equilibrium_moments(ModelParams(tau=0.1, c=0.4), 0) == 1.0


class TestPostcriticalCauchy:
    def test_unit_disk(self):
        val = postcritical_cauchy(ModelParams(tau=0.0, c=0.0), 2.0)
        assert val == pytest.approx(0.5, abs=1e-14)

    def test_total_mass_at_infinity(self):
        p = ModelParams(tau=0.2, c=1.0, p=0.3 + 0j)
        z = 1e6 * np.exp(0.7j)
        assert z * postcritical_cauchy(p, z) == pytest.approx(1.0, abs=1e-5)

    def test_series_reproduces_moments(self):
        for charge in (0j, 0.3 + 0j):
            p = ModelParams(tau=0.2, c=1.0, p=charge)
            coeffs = postcritical_moments_from_cauchy(p, 4)
            for k in range(5):
                assert abs(coeffs[k] - equilibrium_moments(p, k)) <= 1e-6

    def test_inside_rejected(self):
        with pytest.raises(ValueError):
            postcritical_cauchy(ModelParams(tau=0.2, c=1.0), 0.1)


class TestPrecriticalCauchy:
    def setup_method(self):
        self.params = ModelParams(tau=0.5, c=1.0)
        self.map = build_rational_map(self.params)

    def test_interior_variational_identity(self):
        """C(z) equals the derivative of the squared-coordinate potential
        inside the droplet."""
        m = self.map
        for w in (1.2, 1.5 * np.exp(0.9j), 2.0 * np.exp(2.5j)):
            z = m(w)  # exterior image
            # pull an interior point: average of boundary is inside
            pass
        for z in (m.r2, m.r2 + 0.4j, m.r2 - 0.5 + 0.2j):
            val = precritical_cauchy(m, self.params, z)
            assert abs(val - d_squared_potential(self.params, z)) <= 1e-9

    def test_mass_at_infinity(self):
        z = 1e6 * np.exp(1.1j)
        val = precritical_cauchy(self.map, self.params, z)
        assert z * val == pytest.approx(1.0, abs=1e-5)

    def test_contour_oracle(self):
        """Residue evaluation against direct Green's-formula contour
        quadrature with 4096 nodes at exterior and interior points."""
        m = self.map
        rng = np.random.default_rng(3)
        tested = 0
        while tested < 10:
            w = (1.3 + rng.uniform(0, 1.5)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            z = m(w)
            val = precritical_cauchy(m, self.params, z)
            oracle = contour_cauchy(m, z, interior=False)
            assert abs(val - oracle) <= 1e-8
            tested += 1
        for z in (self.map.r2, self.map.r2 + 0.5j):
            val = precritical_cauchy(m, self.params, z)
            oracle = contour_cauchy(m, z, interior=True)
            assert abs(val - oracle) <= 1e-8

    def test_boundary_ambiguity(self):
        z = self.map(np.exp(0.3j))
        with pytest.raises(BoundaryAmbiguity):
            precritical_cauchy(self.map, self.params, z)

    def test_residue_bookkeeping(self):
        """Fixed residues of the Green's-formula integrand h_z(w):
        1/tau at the origin and 0 at the map pole.  The quadrature circles
        shrink below the distance to every other singularity (preimages of
        z, the double zero of the map, the reflected points)."""
        m = self.map
        z = m(1.7 * np.exp(0.4j))
        roots = invert_map(m, z)

        def h(w):
            ratio = m.conj_reflected(w) / m(w)
            phase = np.unwrap(np.angle(ratio))
            g = np.sqrt(np.abs(ratio)) * np.exp(0.5j * phase) * m.deriv(w)
            return g / (z - m(w))

        special = np.concatenate([roots, [m.a * m.tau, 1 / (m.a * m.tau), 0.0, m.a]])
        for center, expected in ((0.0, 1.0 / m.tau), (m.a, 0.0)):
            others = special[np.abs(special - center) > 1e-9]
            eps = 0.4 * float(np.min(np.abs(others - center)))
            theta = 2 * np.pi * np.arange(8192) / 8192
            w = center + eps * np.exp(1j * theta)
            res = np.mean(h(w) * (w - center))
            assert abs(res - expected) <= 1e-12 * max(1.0, abs(expected)) + 1e-12
