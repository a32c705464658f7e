"""Named parameter sets behind the standard result surfaces.

Every preset is a flat dotted-key dictionary in the same shape as a config
file, so the CLI merges presets, config files, and --set overrides with
one mechanism.  All presets share E_perp = 100, x_i = -10, t0 = 0.

The density presets that sweep the drop Delta do so through the generic
``sweep.*`` keys (one output file per value) so each file keeps the fixed
column schema.  Sampling densities are defaults and can be overridden.
"""

from __future__ import annotations

_COMMON = {
    "packet.e_perp_tilde": "100",
    "packet.sigma_tilde": "0.1",
    "packet.x_i_tilde": "-10",
    "packet.t0_tilde": "0",
    "potential.u_tilde": "10",
    "potential.delta_tilde": "0",
}

_DENSITY_TIME = {
    "grid.t_min": "0.1",
    "grid.t_max": "1.5",
    "grid.t_count": "121",
}

PRESETS: dict[str, dict[str, str]] = {
    # density at the far edge of the profile vs (Delta, t), narrowband packet
    "figure1": {
        **_COMMON,
        **_DENSITY_TIME,
        "packet.sigma_tilde": str(1.0 / 3.0),
        "grid.x_min": "1",
        "grid.x_max": "1",
        "grid.x_count": "1",
        "sweep.key": "potential.delta_tilde",
        "sweep.values": "0,5,10,15,20,25,30,35,40,45,50",
    },
    # same surface for the spatially narrow (spectrally broad) packet
    "figure2": {
        **_COMMON,
        **_DENSITY_TIME,
        "grid.x_min": "1",
        "grid.x_max": "1",
        "grid.x_count": "1",
        "sweep.key": "potential.delta_tilde",
        "sweep.values": "0,5,10,15,20,25,30,35,40,45,50",
    },
    # density inside the symmetric well
    "figure3": {
        **_COMMON,
        **_DENSITY_TIME,
        "potential.u_tilde": "-100",
        "grid.x_min": "0",
        "grid.x_max": "1",
        "grid.x_count": "121",
    },
    # density inside the well with a drop beyond it
    "figure4": {
        **_COMMON,
        **_DENSITY_TIME,
        "potential.u_tilde": "-100",
        "potential.delta_tilde": "50",
        "grid.x_min": "0",
        "grid.x_max": "1",
        "grid.x_count": "121",
    },
    # asymptotic relative dwell vs inner level, symmetric exit
    "figure5": {
        **_COMMON,
        "dwell.u_min": "-2000",
        "dwell.u_max": "200",
        "dwell.u_count": "1201",
    },
    # same sweep with a large drop beyond the profile
    "figure6": {
        **_COMMON,
        "potential.delta_tilde": "90",
        "dwell.u_min": "-2000",
        "dwell.u_max": "200",
        "dwell.u_count": "1201",
    },
    # grid-solver cross check on the broadband barrier scenario
    "oracle": {
        **_COMMON,
        "potential.delta_tilde": "40",
        "oracle.times": "0.25,0.5,1.0",
        "oracle.threshold": "1e-3",
        "oracle.dx_refine": "1.6",
        "oracle.dt_refine": "1.0",
    },
    # exactly solvable control: free propagation, tighter threshold
    "free": {
        **_COMMON,
        "potential.u_tilde": "0",
        "potential.delta_tilde": "0",
        "oracle.times": "0.1,0.25",
        "oracle.threshold": "1e-4",
        "oracle.dx_refine": "1.6",
        "oracle.dt_refine": "2.0",
    },
}


def preset(name: str) -> dict[str, str]:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
