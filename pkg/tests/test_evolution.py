"""Spectral time evolution: free limits, decomposition, and continuity."""

import math

import numpy as np
import pytest

from mstwell import (
    PacketSpec,
    PotentialSpec,
    QuadratureSpec,
    density,
    evolve,
    free_gaussian_closed,
    norm_integral,
    psi_point,
    stationary_density,
)

FREE = PotentialSpec(0.0, 0.0)
PACKET = PacketSpec(100.0, 0.1, -10.0)


class TestFreeLimit:
    def test_initial_state_reproduced(self):
        # just after t0 the assembled integrals reproduce the Gaussian
        x = np.linspace(-12.0, -8.0, 9)
        t = 1e-9
        field = evolve(PACKET, FREE, x, [t])
        exact = free_gaussian_closed(PACKET, x, t)
        err = np.max(np.abs(field.psi_fwd[0] + field.psi_bwd[0] - exact))
        assert err < 1e-9

    def test_free_evolution_matches_closed_form(self):
        x = np.linspace(-12.0, 4.0, 33)  # spans all three formal regions
        times = [0.25, 0.6]
        field = evolve(PACKET, FREE, x, times)
        assert np.all(field.converged)
        for i, t in enumerate(times):
            exact = free_gaussian_closed(PACKET, x, t)
            num = field.psi_fwd[i] + field.psi_bwd[i]
            err = np.max(np.abs(num - exact)) / np.max(np.abs(exact))
            assert err < 1e-8

    def test_norm_integral_free(self):
        # broadband packet spreads fast: width ~ t / sigma = 4 at t = 0.4
        x = np.linspace(-34.0, 30.0, 6401)
        field = evolve(PACKET, FREE, x, [0.4])
        assert norm_integral(field, 0) == pytest.approx(1.0, abs=1e-6)


class TestDecomposition:
    def test_split_sums_to_total(self):
        x = np.linspace(-1.0, 2.0, 13)
        field = evolve(PACKET, PotentialSpec(10.0, 40.0), x, [0.3])
        split = density(field)
        np.testing.assert_allclose(
            split.total, split.fwd + split.bwd + split.interference, rtol=1e-12
        )
        np.testing.assert_allclose(split.total, field.density, rtol=1e-12)
        assert np.all(split.fwd >= 0)
        assert np.all(split.bwd >= 0)

    def test_backward_component_is_small_narrowband(self):
        packet = PacketSpec(100.0, 1 / 3, -10.0)
        x = np.linspace(0.0, 1.0, 5)
        field = evolve(packet, PotentialSpec(10.0, 40.0), x, [0.5])
        split = density(field)
        assert np.max(split.bwd) < 1e-10 * np.max(split.total)

    def test_rejects_times_before_t0(self):
        with pytest.raises(ValueError):
            evolve(PACKET, FREE, [0.0], [0.0])


class TestPsiPoint:
    POT = PotentialSpec(10.0, 40.0)

    def test_matches_evolve_samples(self):
        x = np.array([-0.4, 0.3, 1.2])
        field = evolve(PACKET, self.POT, x, [0.5])
        for j, xv in enumerate(x):
            region = "left" if xv < 0 else ("inside" if xv <= 1 else "right")
            psi, _ = psi_point(PACKET, self.POT, float(xv), 0.5, region)
            total = field.psi_fwd[0, j] + field.psi_bwd[0, j]
            assert psi == pytest.approx(total, rel=1e-7)

    def test_interface_continuity(self):
        for x0, pair in ((0.0, ("left", "inside")), (1.0, ("inside", "right"))):
            va = psi_point(PACKET, self.POT, x0, 0.5, pair[0])
            vb = psi_point(PACKET, self.POT, x0, 0.5, pair[1])
            scale = max(abs(va[0]), abs(vb[0]))
            dscale = max(abs(va[1]), abs(vb[1]))
            assert abs(va[0] - vb[0]) < 1e-8 * scale
            assert abs(va[1] - vb[1]) < 1e-8 * dscale

    def test_derivative_consistent_with_values(self):
        h = 1e-5
        x0 = 0.5
        psi_m, _ = psi_point(PACKET, self.POT, x0 - h, 0.5, "inside")
        psi_p, _ = psi_point(PACKET, self.POT, x0 + h, 0.5, "inside")
        _, dpsi = psi_point(PACKET, self.POT, x0, 0.5, "inside")
        fd = (psi_p - psi_m) / (2.0 * h)
        assert dpsi == pytest.approx(fd, rel=1e-4)


class TestStationaryDensity:
    POT = PotentialSpec(10.0, 40.0)

    def test_continuous_at_interfaces(self):
        for x0 in (0.0, 1.0):
            below = stationary_density(x0 - 1e-9, 100.0, self.POT, 0.1)
            above = stationary_density(x0 + 1e-9, 100.0, self.POT, 0.1)
            assert below == pytest.approx(above, rel=1e-6)

    def test_right_region_is_flat_transmission(self):
        # beyond the drop the forward density is constant (v/v_d) |t|^2
        vals = [stationary_density(x, 100.0, self.POT, 0.1) for x in (1.1, 1.7, 4.0)]
        assert max(vals) == pytest.approx(min(vals), rel=1e-12)
        from mstwell import closed_amplitudes

        s = closed_amplitudes(100.0, self.POT)
        norm = 1.0 / (math.sqrt(2.0 * math.pi) * 0.1)
        expected = norm * (10.0 / math.sqrt(60.0)) * abs(s.t) ** 2
        assert vals[0] == pytest.approx(expected, rel=1e-12)

    def test_matches_narrowband_time_average(self):
        # with a very narrow spectrum the in-well density at the moment the
        # packet covers the profile approaches the stationary profile
        packet = PacketSpec(100.0, 2.0, -60.0)
        x = np.array([0.25, 0.5, 0.75])
        t_cover = 60.0 / 20.0  # center reaches x ~ 0 at t = |x_i| / v
        field = evolve(packet, self.POT, x, [t_cover])
        env = abs(free_gaussian_closed(packet, np.array([0.0]), t_cover)[0]) ** 2
        env *= math.sqrt(2.0 * math.pi) * packet.sigma_tilde  # unit peak envelope
        for j, xv in enumerate(x):
            stat = stationary_density(float(xv), 100.0, self.POT, packet.sigma_tilde)
            # velocity dispersion across the spectrum, Delta u / u = 5%,
            # bounds the residual time dependence
            assert field.density[0, j] == pytest.approx(env * stat, rel=8e-2)
