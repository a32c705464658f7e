"""Region-wise retarded Green functions and the spectral space-time kernel.

The energy Green function is piecewise closed-form in the three regions
(left of the profile, inside it, beyond it); the space-time kernel is its
discontinuity integrated over positive energies,

    K = (1/pi) * Int_0^inf dE e^{-i E tau} (velocity factors) Re[...],

which after u = sqrt(E) is an oscillatory integral with no damping.  It is
evaluated as: phase-capped adaptive panels up to a cutoff past every
stationary point, an exact complementary-error-function tail for the
constant-amplitude (free) pieces, and panels plus integration-by-parts
boundary corrections for the amplitude-modulated remainder.

Only sources left of the profile (x_src < 0) are exposed; that is the
scattering scenario this package models.  The mirrored source-beyond lines
exist for the reciprocity check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .model import PotentialSpec, branch_sqrt
from .quadrature import QuadratureError, QuadratureSpec, adaptive_panels, phase_capped_edges
from .scattering import amplitude_table


class UnsupportedRegionError(ValueError):
    """Green function requested for a (source, destination) pair not provided."""


def region_of(x) -> str:
    if x < 0.0:
        return "left"
    if x <= 1.0:
        return "inside"
    return "right"


def green_free(x, x_src, e_tilde, v_tilde):
    """Constant-potential Green function, 1/(2ik) e^{ik|x-x'|} in internal units."""
    e = float(e_tilde)
    k = branch_sqrt(e - float(v_tilde))[()]
    if k == 0:
        raise ZeroDivisionError("Green function singular at the channel branch point")
    return np.exp(1j * k * abs(x - x_src)) / (2j * k)


def green_region(x, x_src, e_tilde, potential: PotentialSpec):
    """Energy Green function of the two-step profile for the supported region pairs."""
    e = float(e_tilde)
    if e <= 0:
        raise ValueError("energy must be positive")
    k = branch_sqrt(e)[()]
    ku = branch_sqrt(e - potential.u_tilde)[()]
    kd = branch_sqrt(e - potential.delta_tilde)[()]
    t, tp, rp, r, _ = (z[0] for z in amplitude_table([e], potential))
    c = 1.0 / 2.0j

    src = region_of(x_src)
    dst = region_of(x)
    pair = (src, dst)
    if pair == ("left", "left"):
        return c / k * (
            np.exp(1j * k * abs(x - x_src)) + r * np.exp(-1j * k * (x + x_src))
        )
    if pair == ("left", "inside"):
        return c / np.sqrt(k * ku) * (
            tp * np.exp(1j * ku * x) + rp * np.exp(-1j * ku * x)
        ) * np.exp(-1j * k * x_src)
    if pair == ("inside", "left"):
        return c / np.sqrt(k * ku) * (
            tp * np.exp(1j * ku * x_src) + rp * np.exp(-1j * ku * x_src)
        ) * np.exp(-1j * k * x)
    if pair == ("left", "right"):
        return c / np.sqrt(k * kd) * t * np.exp(1j * kd * (x - 1.0)) * np.exp(
            -1j * k * x_src
        )
    if pair == ("right", "left"):
        return c / np.sqrt(k * kd) * t * np.exp(-1j * k * x) * np.exp(
            1j * kd * (x_src - 1.0)
        )
    raise UnsupportedRegionError(
        f"Green function not available for source region {src!r} "
        f"to destination region {dst!r}"
    )


@dataclass
class PropagatorSample:
    x: float
    t: float
    x_src: float
    t_src: float
    value: complex
    error_estimate: float = 0.0


@dataclass
class _TailTerm:
    """One exponential piece A(u) e^{-i tau u^2} of the kernel integrand.

    ``beta`` is the asymptotic linear phase rate of A (for stationary-point
    location); ``exact_const`` marks pieces whose amplitude is exactly
    const * e^{i beta u}, which admit a closed-form tail.
    """

    amp: callable
    beta: float
    exact_const: complex | None = None
    osc_extra: float = 2.5  # internal phase oscillation allowance for panel sizing


def _gauss_fresnel_tail(u_c, tau, beta):
    """Int_{u_c}^inf e^{-i tau u^2 + i beta u} du, closed form.

    Completing the square and rotating to the erfc of a complex argument;
    the cutoff is chosen beyond the stationary point so the argument stays
    in the decaying half-plane.
    """
    s = beta / (2.0 * tau)
    root = math.sqrt(tau) * np.exp(1j * math.pi / 4.0)
    return (
        np.exp(1j * beta * beta / (4.0 * tau))
        * math.sqrt(math.pi)
        / (2.0 * root)
        * erfc(root * (u_c - s))
    )


def _ibp_tail(amp, beta, u_c, tau, u_far, spec):
    """Tail of Int amp(u) e^{-i tau u^2} du beyond u_c.

    Panels carry the integral to u_far.  Beyond it the integrand is written
    as h(u) e^{i phi(u)} with the full stationary phase
    phi = -tau u^2 + beta u (so h = amp * e^{-i beta u} is slowly varying)
    and closed with two integration-by-parts boundary terms; the magnitude
    of the next term in the series is the error estimate.
    """
    def g(u):
        return amp(u) * np.exp(-1j * tau * u * u)

    edges = phase_capped_edges(
        u_c, u_far, [], tau, abs(beta) + 2.5, spec.phase_per_panel, spec.max_panels
    )
    res, _ = adaptive_panels(g, edges, spec)

    du = 1e-3
    u5 = u_far + du * np.arange(-2.0, 3.0)
    h5 = np.asarray(amp(u5)) * np.exp(-1j * beta * u5)
    dphi5 = -2.0 * tau * u5 + beta
    q1 = h5 / (1j * dphi5)
    q1p = (q1[2:] - q1[:-2]) / (2.0 * du)  # q1' at u_far - du, u_far, u_far + du
    q2 = q1p / (1j * dphi5[1:4])
    q2p = (q2[2] - q2[0]) / (2.0 * du)

    phi = -tau * u_far * u_far + beta * u_far
    pref = np.exp(1j * phi) / (1j * dphi5[2])
    boundary = pref * (-h5[2] + q1p[1])
    tail_err = abs(q2p / dphi5[2])
    return res.value + boundary, res.error_estimate + tail_err, res.converged


def _kernel_terms(x, x_src, potential):
    """Decompose the region kernel into tail-classified exponential pieces.

    Each returned term is one half of the Re[...] split (the piece and its
    conjugate partner appear separately), including the u-substitution
    Jacobian and velocity prefactors.
    """
    dst = region_of(x)
    u_t = potential.u_tilde
    d_t = potential.delta_tilde
    terms = []

    if dst == "left":
        jac = 0.5 / math.pi
        b1 = abs(x - x_src)
        b2 = -(x + x_src)
        terms.append(_TailTerm(
            amp=lambda u, b=b1: jac * np.exp(1j * b * u),
            beta=b1, exact_const=jac, osc_extra=0.0,
        ))
        terms.append(_TailTerm(
            amp=lambda u, b=b1: jac * np.exp(-1j * b * u),
            beta=-b1, exact_const=jac, osc_extra=0.0,
        ))

        def refl(u):
            _, _, _, r, _ = amplitude_table(u * u, potential)
            return jac * r * np.exp(1j * b2 * u)

        def refl_conj(u):
            _, _, _, r, _ = amplitude_table(u * u, potential)
            return jac * np.conj(r) * np.exp(-1j * b2 * u)

        terms.append(_TailTerm(amp=refl, beta=b2))
        terms.append(_TailTerm(amp=refl_conj, beta=-b2))
        return terms

    if dst == "inside":
        def bracket(u):
            ku = branch_sqrt(u * u - u_t)
            _, tp, rp, _, _ = amplitude_table(u * u, potential)
            pref = np.sqrt(2.0 * u) / np.sqrt(2.0 * ku) / (2.0 * math.pi)
            return pref * (tp * np.exp(1j * ku * x) + rp * np.exp(-1j * ku * x)) \
                * np.exp(-1j * u * x_src)

        def bracket_conj(u):
            return np.conj(bracket(u))

        beta = x - x_src
        terms.append(_TailTerm(amp=bracket, beta=beta))
        terms.append(_TailTerm(amp=bracket_conj, beta=-beta))
        return terms

    def trans(u):
        kd = branch_sqrt(u * u - d_t)
        t, _, _, _, _ = amplitude_table(u * u, potential)
        pref = np.sqrt(2.0 * u) / np.sqrt(2.0 * kd) / (2.0 * math.pi)
        return pref * t * np.exp(1j * kd * (x - 1.0)) * np.exp(-1j * u * x_src)

    def trans_conj(u):
        return np.conj(trans(u))

    beta = x - x_src
    terms.append(_TailTerm(amp=trans, beta=beta))
    terms.append(_TailTerm(amp=trans_conj, beta=-beta))
    return terms


def free_kernel_1d(x, t, x_src, t_src):
    """Closed-form free-particle kernel, sqrt(1/(4 pi i tau)) e^{i dx^2/(4 tau)}."""
    tau = t - t_src
    if tau <= 0:
        return 0.0 + 0.0j
    dx = x - x_src
    return np.sqrt(1.0 / (4.0j * math.pi * tau)) * np.exp(1j * dx * dx / (4.0 * tau))


def propagate_kernel(
    x, t, x_src, t_src, potential: PotentialSpec, quad: QuadratureSpec | None = None
) -> PropagatorSample:
    """Space-time kernel from a source left of the profile.

    Returns 0 for t <= t_src (retardation).  Raises QuadratureError with the
    achieved value and estimate when the error target cannot be met.
    """
    if quad is None:
        quad = QuadratureSpec()
    tau = t - t_src
    if tau <= 0:
        return PropagatorSample(x, t, x_src, t_src, 0.0 + 0.0j)
    if x_src >= 0:
        raise UnsupportedRegionError("kernel sources must lie at x_src < 0")

    terms = _kernel_terms(x, x_src, potential)

    u_branch = [math.sqrt(b) for b in potential.branch_energies()]
    beta_max = max([tm.beta for tm in terms] + [0.0])
    u_stat = beta_max / (2.0 * tau)
    u_c = max(
        30.0,
        u_stat + 10.0 / math.sqrt(min(tau, 1.0)),
        (1.5 * max(u_branch) + 5.0) if u_branch else 0.0,
    )
    u_far = max(2.0 * u_c, u_c + 100.0, 300.0)

    x_osc = max(abs(tm.beta) + tm.osc_extra for tm in terms)

    def head(u):
        total = terms[0].amp(u)
        for tm in terms[1:]:
            total = total + tm.amp(u)
        return total * np.exp(-1j * tau * u * u)

    edges = phase_capped_edges(
        0.0, u_c, u_branch, tau, x_osc, quad.phase_per_panel, quad.max_panels
    )
    head_res, _ = adaptive_panels(head, edges, quad)

    value = head_res.value
    err = head_res.error_estimate
    converged = head_res.converged
    for tm in terms:
        if tm.exact_const is not None:
            value += tm.exact_const * _gauss_fresnel_tail(u_c, tau, tm.beta)
        else:
            tval, terr, tconv = _ibp_tail(tm.amp, tm.beta, u_c, tau, u_far, quad)
            value += tval
            err += terr
            converged = converged and tconv

    tol = max(quad.rel_tol * abs(value), quad.abs_tol)
    if not converged or err > tol:
        raise QuadratureError(
            f"kernel quadrature reached error estimate {err:.3e} "
            f"(target {tol:.3e}) at (x={x}, t={t})",
            value=value,
            error_estimate=err,
        )
    return PropagatorSample(x, t, x_src, t_src, complex(value), err)
