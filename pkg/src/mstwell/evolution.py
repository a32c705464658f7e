"""Time evolution of the Gaussian packet against the two-step profile.

The wave function is assembled region by region from six spectral
integrals: forward and backward components in each of the three regions.
All six share the window machinery of the quadrature module; within one
(region, time, direction) triple the integrand factorizes into
x-independent amplitude arrays times two exponentials exp(i theta(u) x),
so the panel set is refined once against a worst-phase probe point and
then reused for every x as a weighted sum.  That keeps dense space-time
grids (needed for norm checks and the grid-solver comparison) tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import PotentialSpec, branch_sqrt, quartic_root
from .packet import PacketSpec, gaussian_weight
from .quadrature import QuadratureSpec, SpectralRule, spectral_window
from .scattering import amplitude_table

_X_CHUNK = 512


def packet_prefactor(packet: PacketSpec) -> complex:
    """Common prefactor of all six integrals, including the global phase."""
    return (
        math.sqrt(packet.sigma_tilde)
        / (math.sqrt(2.0) * (2.0 * math.pi) ** 0.75)
        * np.exp(1j * packet.u_perp * packet.x_i_tilde)
    )


@dataclass
class DensityDecomposition:
    total: np.ndarray
    fwd: np.ndarray
    bwd: np.ndarray
    interference: np.ndarray


@dataclass
class WaveField:
    """Sampled forward/backward wave-function components on a space-time grid."""

    x_grid: np.ndarray
    t_grid: np.ndarray
    psi_fwd: np.ndarray  # shape (nt, nx)
    psi_bwd: np.ndarray
    error_estimate: np.ndarray
    converged: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psi_fwd + self.psi_bwd) ** 2


def density(field: WaveField) -> DensityDecomposition:
    """Three-term split: |psi|^2 = fwd + bwd + interference, pointwise."""
    fwd = np.abs(field.psi_fwd) ** 2
    bwd = np.abs(field.psi_bwd) ** 2
    interference = 2.0 * np.real(field.psi_fwd * np.conj(field.psi_bwd))
    return DensityDecomposition(fwd + bwd + interference, fwd, bwd, interference)


def _region_masks(x):
    return {
        "left": x < 0.0,
        "inside": (x >= 0.0) & (x <= 1.0),
        "right": x > 1.0,
    }


def _region_coeffs(region, direction, u, tau, packet: PacketSpec, potential: PotentialSpec):
    """x-independent integrand pieces: (c1, theta1, c2, theta2, x_offset).

    The full integrand at position x is c1*e^{i theta1 (x - x_offset)}
    + c2*e^{i theta2 (x - x_offset)}, including the u-substitution Jacobian.
    The backward direction conjugates amplitudes and branch roots as the
    region formulas prescribe, leaving the time phase and weight untouched.
    """
    e = u * u
    weight = gaussian_weight(u, packet, direction)
    if direction == "forward":
        phase_i = np.exp(-1j * u * packet.x_i_tilde)
    else:
        phase_i = np.exp(1j * u * packet.x_i_tilde)
    base = 2.0 * np.exp(-1j * e * tau) * weight * phase_i  # 2u du / u = 2 du

    if region == "left":
        _, _, _, r, _ = amplitude_table(e, potential)
        if direction == "forward":
            return base, u.astype(complex), base * r, -u.astype(complex), 0.0
        return base, -u.astype(complex), base * np.conj(r), u.astype(complex), 0.0

    if region == "inside":
        ku = branch_sqrt(e - potential.u_tilde)
        _, tp, rp, _, _ = amplitude_table(e, potential)
        # sqrt(v / v_u) = sqrt(u) / sqrt(k_u), fourth root fixing the branch
        root = quartic_root(e - potential.u_tilde)
        if direction == "forward":
            c = base * np.sqrt(u) / root
            return c * tp, ku, c * rp, -ku, 0.0
        c = base * np.sqrt(u) / np.conj(root)
        return c * np.conj(tp), -np.conj(ku), c * np.conj(rp), np.conj(ku), 0.0

    if region == "right":
        kd = branch_sqrt(e - potential.delta_tilde)
        t, _, _, _, _ = amplitude_table(e, potential)
        root = quartic_root(e - potential.delta_tilde)
        zero = np.zeros_like(u, dtype=complex)
        if direction == "forward":
            return base * np.sqrt(u) / root * t, kd, zero, zero, 1.0
        return base * np.sqrt(u) / np.conj(root) * np.conj(t), -np.conj(kd), zero, zero, 1.0

    raise ValueError(f"unknown region {region!r}")


def _x_phase_span(region, x_abs_max, packet):
    """Bound on the x-driven phase rate, for panel sizing.

    The +2.5 covers the internal e^{2i k_u} oscillation of the amplitudes.
    """
    if region == "left":
        return x_abs_max + abs(packet.x_i_tilde) + 2.5
    if region == "inside":
        return 1.0 + abs(packet.x_i_tilde) + 2.5
    return (x_abs_max - 1.0) + abs(packet.x_i_tilde) + 2.5


def _probe_spec(spec, packet):
    """Quadrature spec for per-point probes with an absolute-scale floor.

    Pointwise values far from the packet are absolutely tiny; demanding a
    relative target there explodes the panel count for no gain.  The floor
    ties the absolute tolerance to the natural scale of the raw integral,
    so pointwise psi errors stay below rel_tol times the packet peak.
    """
    scale = (2.0 * math.pi * packet.sigma_tilde ** 2) ** -0.25 / abs(
        packet_prefactor(packet)
    )
    return replace(spec, abs_tol=max(spec.abs_tol, spec.rel_tol * scale))


def _component(region, direction, xs, tau, packet, potential, spec):
    """One spectral component for all x of a region at one time.

    Returns (psi values, error estimates, converged flag of the probe).
    """
    u_perp = packet.u_perp
    lo, hi = spectral_window(u_perp, packet.sigma_tilde, direction, spec.window_w)
    u_breaks = [math.sqrt(b) for b in potential.branch_energies() if lo < math.sqrt(b) < hi]
    x_span = _x_phase_span(region, float(np.max(np.abs(xs))), packet)

    rule = SpectralRule(lo, hi, u_breaks, tau, x_span, _probe_spec(spec, packet))

    x_probe = float(xs[np.argmax(np.abs(xs))])

    def probe_g(u):
        c1, th1, c2, th2, xoff = _region_coeffs(region, direction, u, tau, packet, potential)
        xi = x_probe - xoff
        return c1 * np.exp(1j * th1 * xi) + c2 * np.exp(1j * th2 * xi)

    probe = rule.refine_against(probe_g)

    c1, th1, c2, th2, xoff = _region_coeffs(region, direction, rule.u, tau, packet, potential)
    xi = xs - xoff
    psi = np.empty(xs.size, dtype=complex)
    err = np.empty(xs.size, dtype=float)
    # cap the temporary (x chunk) x (nodes) matrices at ~100 MB
    x_chunk = max(1, min(_X_CHUNK, int(6e6 // max(1, rule.u.size))))
    for start in range(0, xs.size, x_chunk):
        chunk = xi[start:start + x_chunk]
        fv = np.exp(1j * np.multiply.outer(chunk, th1)) * c1
        fv += np.exp(1j * np.multiply.outer(chunk, th2)) * c2
        vals, errs = rule.integrate_values(fv)
        psi[start:start + x_chunk] = vals
        err[start:start + x_chunk] = errs
    return psi, err, probe.converged


def evolve(
    packet: PacketSpec,
    potential: PotentialSpec,
    x_grid,
    t_grid,
    quad: QuadratureSpec | None = None,
) -> WaveField:
    """Evaluate the forward and backward wave function on a space-time grid.

    Non-convergent quadrature never aborts the run: the affected samples
    keep their best values with ``converged`` cleared and the achieved
    error estimate recorded.
    """
    if quad is None:
        quad = QuadratureSpec()
    x = np.asarray(x_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= packet.t0_tilde):
        raise ValueError("all t_grid values must exceed t0_tilde")

    pref = packet_prefactor(packet)
    psi_fwd = np.zeros((t.size, x.size), dtype=complex)
    psi_bwd = np.zeros_like(psi_fwd)
    err = np.zeros((t.size, x.size), dtype=float)
    conv = np.ones((t.size, x.size), dtype=bool)

    masks = _region_masks(x)
    for it, tv in enumerate(t):
        tau = tv - packet.t0_tilde
        for region, mask in masks.items():
            if not np.any(mask):
                continue
            xs = x[mask]
            for direction, target in (("forward", psi_fwd), ("backward", psi_bwd)):
                vals, errs, ok = _component(
                    region, direction, xs, tau, packet, potential, quad
                )
                target[it, mask] = pref * vals
                err[it, mask] += abs(pref) * errs
                if not ok:
                    conv[it, mask] = False

    return WaveField(x, t, psi_fwd, psi_bwd, err, conv)


def psi_point(packet, potential, x, t, region, quad=None):
    """Wave function and its x-derivative at one point, with a forced region.

    The derivative is taken under the integral (each exponential picks up a
    factor i*theta), which keeps its accuracy at quadrature level; finite
    differences of the assembled psi would cancel catastrophically.  Forcing
    the region lets interface continuity be checked from both sides.
    """
    if quad is None:
        quad = QuadratureSpec()
    tau = t - packet.t0_tilde
    pref = packet_prefactor(packet)
    psi = 0.0 + 0.0j
    dpsi = 0.0 + 0.0j
    for direction in ("forward", "backward"):
        lo, hi = spectral_window(packet.u_perp, packet.sigma_tilde, direction, quad.window_w)
        u_breaks = [
            math.sqrt(b) for b in potential.branch_energies() if lo < math.sqrt(b) < hi
        ]
        x_span = _x_phase_span(region, abs(x) + 1.0, packet)
        rule = SpectralRule(lo, hi, u_breaks, tau, x_span, _probe_spec(quad, packet))

        def g(u, deriv=False):
            c1, th1, c2, th2, xoff = _region_coeffs(
                region, direction, u, tau, packet, potential
            )
            xi = x - xoff
            e1 = np.exp(1j * th1 * xi)
            e2 = np.exp(1j * th2 * xi)
            if deriv:
                return c1 * 1j * th1 * e1 + c2 * 1j * th2 * e2
            return c1 * e1 + c2 * e2

        val = rule.refine_against(g)
        dval, _ = rule.integrate_values(g(rule.u, deriv=True))
        psi += pref * val.value
        dpsi += pref * dval
    return psi, dpsi


def stationary_density(x, e_perp_tilde, potential: PotentialSpec, sigma) -> float:
    """Narrowband limit of the forward density |psi_>(x)|^2, closed form.

    The spectral integral collapses onto E = E_perp; one complex-analytic
    expression per region covers propagating and evanescent channels alike.
    """
    e = float(e_perp_tilde)
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * sigma)
    u = math.sqrt(e)
    t, tp, rp, r, _ = (z[0] for z in amplitude_table([e], potential))

    region = "left" if x < 0 else ("inside" if x <= 1.0 else "right")
    if region == "left":
        return norm * abs(np.exp(1j * u * x) + r * np.exp(-1j * u * x)) ** 2
    if region == "inside":
        ku = branch_sqrt(e - potential.u_tilde)[()]
        phi = tp * np.exp(1j * ku * x) + rp * np.exp(-1j * ku * x)
        return norm * u / math.sqrt(abs(e - potential.u_tilde)) * abs(phi) ** 2
    kd = branch_sqrt(e - potential.delta_tilde)[()]
    amp = t * np.exp(1j * kd * (x - 1.0))
    return norm * u / math.sqrt(abs(e - potential.delta_tilde)) * abs(amp) ** 2


def norm_window(packet: PacketSpec, t_max, window_w=8.0):
    """Ballistic bound on the support of the density up to t_max."""
    u_max = packet.u_perp + window_w / packet.sigma_tilde
    half = abs(packet.x_i_tilde) + 10.0 * packet.sigma_tilde + 2.0 * u_max * t_max
    return -half, half


def norm_integral(field: WaveField, time_index: int) -> float:
    """Trapezoid integral of the density over x at one sampled time."""
    return float(np.trapezoid(field.density[time_index], field.x_grid))
