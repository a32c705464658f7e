"""Time-dependent density of a cut-off Gaussian packet at the profile.

Evolves the broadband packet (sigma = 0.1) released at x = -10 and records
the density at the far edge of the inner region, x = 1, as a function of
time.  Over the flat profile the packet passes once; with a deep outer drop
part of the packet rattles inside the inner region and the edge density
shows secondary maxima.  A second pass records the in-well density history
for the deep-well preset.

Run:  python3 demos/packet_density.py [outdir]
"""

import csv
import sys
from pathlib import Path

import numpy as np

from mstwell import PacketSpec, PotentialSpec, density, evolve

PACKET = PacketSpec(e_perp_tilde=100.0, sigma_tilde=0.1, x_i_tilde=-10.0)


def edge_density_history(delta, times):
    pot = PotentialSpec(u_tilde=10.0, delta_tilde=delta)
    field = evolve(PACKET, pot, np.array([1.0]), times)
    return field.density[:, 0]


def in_well_history(times, x_inner):
    pot = PotentialSpec(u_tilde=-100.0, delta_tilde=0.0)
    field = evolve(PACKET, pot, x_inner, times)
    # total probability currently inside the well
    return np.trapezoid(field.density, x_inner, axis=1)


def main(outdir="demo_out"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    times = np.linspace(0.05, 1.5, 120)
    histories = {d: edge_density_history(d, times) for d in (0.0, 40.0)}
    with open(out / "edge_density.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_tilde", "rho_delta0", "rho_delta40"])
        for i, tv in enumerate(times):
            writer.writerow([tv, histories[0.0][i], histories[40.0][i]])
    for d, rho in histories.items():
        interior = (rho[1:-1] > rho[:-2]) & (rho[1:-1] > rho[2:])
        n_peaks = int(np.count_nonzero(interior & (rho[1:-1] > 0.02 * rho.max())))
        print(f"delta={d:4.1f}  edge-density maxima: {n_peaks}  "
              f"peak at t={times[int(np.argmax(rho))]:.3f}")

    x_inner = np.linspace(0.0, 1.0, 41)
    t_well = np.linspace(0.1, 1.2, 45)
    inside = in_well_history(t_well, x_inner)
    with open(out / "in_well.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_tilde", "P_inside"])
        writer.writerows(zip(t_well, inside))
    print(f"deep well: in-well probability peaks at "
          f"t={t_well[int(np.argmax(inside))]:.3f}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available, skipping the figure")
        return

    fig, axes = plt.subplots(1, 2, figsize=(10.0, 3.6))
    for d, rho in histories.items():
        axes[0].plot(times, rho, label=f"$\\Delta={d:g}$")
    axes[0].set_xlabel("$t$")
    axes[0].set_ylabel("$|\\psi(1, t)|^2$")
    axes[0].legend()
    axes[1].plot(t_well, inside)
    axes[1].set_xlabel("$t$")
    axes[1].set_ylabel("in-well probability")
    fig.tight_layout()
    fig.savefig(out / "packet_density.png", dpi=150)
    print(f"wrote {out / 'edge_density.csv'}, {out / 'in_well.csv'} "
          f"and {out / 'packet_density.png'}")


if __name__ == "__main__":
    main(*sys.argv[1:])
