import json
import math

import numpy as np
import pytest

from coulombgas.droplet import postcritical_droplet, precritical_droplet, to_symmetric
from coulombgas.fekete import (
    empirical_diagnostics,
    energy,
    gradient,
    minimize,
    points_csv,
    save_csv,
    save_json,
)
from coulombgas.potentials import ModelParams, Symmetry


class TestEnergy:
    def test_two_point_analytic(self):
        """E(r) = -2 log(2r) + 4 r^2 for antipodal points at radius r in
        the isotropic chargeless field."""
        params = ModelParams(tau=0.0, c=0.0)
        for r in (0.3, 0.5, 0.9):
            pts = np.array([r, -r], dtype=complex)
            expected = -2.0 * math.log(2.0 * r) + 4.0 * r * r
            assert energy(pts, params) == pytest.approx(expected, abs=1e-12)

    def test_single_point(self):
        params = ModelParams(tau=0.3, c=0.0)
        pts = np.array([0.7 + 0.2j])
        from coulombgas.potentials import potential

        assert energy(pts, params) == pytest.approx(potential(params, pts[0]))

    def test_relabeling_invariance(self):
        params = ModelParams(tau=0.2, c=0.5)
        rng = np.random.default_rng(0)
        pts = rng.normal(size=12) + 1j * rng.normal(size=12)
        shuffled = pts[rng.permutation(12)]
        assert energy(pts, params) == pytest.approx(energy(shuffled, params), rel=1e-14)

    def test_coincident_rejected(self):
        params = ModelParams(tau=0.0, c=0.0)
        with pytest.raises(ValueError):
            energy(np.array([1.0 + 0j, 1.0 + 0j]), params)

    def test_symplectic_needs_real_p(self):
        params = ModelParams(tau=0.1, c=0.5, p=0.2 + 0.1j, symmetry=Symmetry.SYMPLECTIC)
        with pytest.raises(ValueError):
            energy(np.array([1j, 2j]), params)

    def test_symplectic_real_axis_rejected(self):
        params = ModelParams(tau=0.1, c=0.0, symmetry=Symmetry.SYMPLECTIC)
        with pytest.raises(ValueError):
            energy(np.array([1.0 + 0j, 2j]), params)


class TestGradient:
    @pytest.mark.parametrize(
        "params",
        [
            ModelParams(tau=0.3, c=0.8, p=0.2 + 0.1j),
            ModelParams(tau=0.0, c=0.0),
            ModelParams(tau=0.4, c=0.5, symmetry=Symmetry.SYMPLECTIC),
        ],
    )
    def test_finite_differences(self, params):
        rng = np.random.default_rng(5)
        pts = rng.normal(size=8) + 1j * (rng.normal(size=8) + 2.0)
        g = gradient(pts, params)
        h = 1e-6
        for j in (0, 3, 7):
            e = np.zeros(8, dtype=complex)
            e[j] = h
            fx = (energy(pts + e, params) - energy(pts - e, params)) / (2 * h)
            fy = (energy(pts + 1j * e, params) - energy(pts - 1j * e, params)) / (2 * h)
            fd = (fx + 1j * fy) / 2.0  # dE/dconj(z_j)
            assert abs(fd - g[j]) <= 1e-6 * max(1.0, abs(g[j]))

    def test_antisymmetric_for_symmetric_pair(self):
        params = ModelParams(tau=0.2, c=0.0)
        pts = np.array([0.4 + 0.3j, -0.4 - 0.3j])
        g = gradient(pts, params)
        assert g[0] == pytest.approx(-g[1], abs=1e-14)


class TestMinimize:
    def test_two_points_converge_to_analytic(self):
        params = ModelParams(tau=0.0, c=0.0)
        cfg = minimize(2, params, seed=3, max_iter=500, tol=1e-8)
        assert cfg.converged
        # converged minimum satisfies the gradient post-condition
        assert cfg.grad_norm <= 1e-8 * 2
        radii = np.abs(cfg.points)
        assert radii == pytest.approx([0.5, 0.5], abs=1e-6)
        assert cfg.points[0] == pytest.approx(-cfg.points[1], abs=1e-6)
        assert cfg.energy == pytest.approx(1.0, abs=1e-10)

    def test_single_point_at_minimum(self):
        params = ModelParams(tau=0.3, c=0.0)
        cfg = minimize(1, params, seed=1, max_iter=400, tol=1e-10)
        assert abs(cfg.points[0]) <= 1e-6

    def test_circular_law_radius(self):
        params = ModelParams(tau=0.0, c=0.0)
        cfg = minimize(64, params, seed=2, max_iter=2000)
        assert 0.9 <= np.max(np.abs(cfg.points)) <= 1.1

    def test_energy_history_non_increasing(self):
        params = ModelParams(tau=0.3, c=1.0)
        cfg = minimize(64, params, seed=4, max_iter=800)
        assert np.all(np.diff(cfg.energy_history) <= 0)

    def test_deterministic(self):
        params = ModelParams(tau=0.5, c=1.0)
        a = minimize(32, params, seed=11, max_iter=300)
        b = minimize(32, params, seed=11, max_iter=300)
        assert np.array_equal(a.points, b.points)
        assert a.energy == b.energy

    def test_sign_symmetric_init_keeps_odd_moments_zero(self):
        params = ModelParams(tau=0.3, c=1.0)
        cfg = minimize(64, params, seed=6, max_iter=600, symmetric_init=True)
        m1 = np.mean(cfg.points)
        m3 = np.mean(cfg.points**3)
        assert abs(m1) <= 1e-8
        assert abs(m3) <= 1e-7

    def test_symplectic_stays_off_axis(self):
        params = ModelParams(tau=0.2, c=0.3, symmetry=Symmetry.SYMPLECTIC)
        cfg = minimize(24, params, seed=9, max_iter=600)
        assert np.min(np.abs(cfg.points.imag)) > 1e-6

    def test_bad_count(self):
        with pytest.raises(ValueError):
            minimize(0, ModelParams(tau=0.0, c=0.0))


class TestClusterTransition:
    def test_cluster_counts_across_phases(self):
        post = ModelParams(tau=1 / 6, c=1.0)
        cfg = minimize(64, post, seed=7, max_iter=1500)
        region = postcritical_droplet(post)
        diag = empirical_diagnostics(cfg, region, post)
        assert diag.cluster_count == 1
        assert diag.hole_empty is True
        assert diag.inside_fraction >= 0.98

        pre = ModelParams(tau=0.5, c=1.0)
        cfg2 = minimize(64, pre, seed=7, max_iter=1500)
        region2 = to_symmetric(precritical_droplet(pre))
        diag2 = empirical_diagnostics(cfg2, region2, pre)
        assert diag2.cluster_count == 2
        assert diag2.inside_fraction >= 0.98

    def test_moment_accuracy_and_doubling(self):
        params = ModelParams(tau=1 / 6, c=1.0)
        region = postcritical_droplet(params)
        fractions = {}
        for n in (64, 128):
            cfg = minimize(n, params, seed=8, max_iter=2000)
            diag = empirical_diagnostics(cfg, region, params)
            fractions[n] = 1.0 - diag.inside_fraction
            if n == 128:
                m2_emp, m2_ref = diag.empirical_moments[1], diag.reference_moments[1]
                assert abs(m2_emp - m2_ref) <= 0.05 * (1 + abs(m2_ref))
                assert abs(diag.empirical_moments[0]) <= 0.05
        assert fractions[128] <= fractions[64] + 0.01


class TestSerialization:
    def test_csv(self, tmp_path):
        params = ModelParams(tau=0.0, c=0.0)
        cfg = minimize(4, params, seed=1, max_iter=100)
        path = tmp_path / "pts.csv"
        save_csv(cfg, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "re,im"
        assert len(lines) == 5
        z0 = complex(*map(float, lines[1].split(",")))
        assert z0 == cfg.points[0]

    def test_json(self, tmp_path):
        params = ModelParams(tau=0.2, c=0.5, p=0.1 + 0j)
        cfg = minimize(4, params, seed=2, max_iter=100)
        path = tmp_path / "pts.json"
        save_json(cfg, params, path)
        payload = json.loads(path.read_text())
        assert payload["n"] == 4
        assert payload["params"]["tau"] == 0.2
        assert payload["seed"] == 2
        assert "energy" in payload and "iterations" in payload
        assert len(payload["points"]) == 4

    def test_points_csv_round_trip_precision(self):
        params = ModelParams(tau=0.0, c=0.0)
        cfg = minimize(3, params, seed=5, max_iter=50)
        text = points_csv(cfg)
        for line, z in zip(text.strip().split("\n")[1:], cfg.points):
            re, im = map(float, line.split(","))
            assert complex(re, im) == z
