"""Transmission resonances of the two-step profile.

Sweeps the scattering amplitudes over energy for a fixed inner level and a
few values of the outer drop.  Over the flat profile the transmission hits
exactly one whenever the inner wave number fits an integer number of half
waves; switching on the drop detunes the resonances and caps |t|^2 below
one.  Writes resonances.csv and, when matplotlib is importable, a figure.

Run:  python3 demos/transmission_resonances.py [outdir]
"""

import csv
import math
import sys
from pathlib import Path

import numpy as np

from mstwell import PotentialSpec, amplitude_table, probabilities

U_TILDE = 10.0
DELTAS = (0.0, 40.0, 90.0)


def main(outdir="demo_out"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    e = np.linspace(91.0, 500.0, 2000)
    columns = {}
    for delta in DELTAS:
        pot = PotentialSpec(u_tilde=U_TILDE, delta_tilde=delta)
        t, _, _, r, _ = amplitude_table(e, pot)
        columns[delta] = np.abs(t) ** 2
        # sanity: flux conservation at every propagating energy
        worst = np.max(np.abs(np.abs(t) ** 2 + np.abs(r) ** 2 - 1.0))
        print(f"delta={delta:5.1f}  max unitarity residual {worst:.2e}")

    with open(out / "resonances.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["E_tilde"] + [f"T_delta{d:g}" for d in DELTAS])
        for i, ev in enumerate(e):
            writer.writerow([ev] + [columns[d][i] for d in DELTAS])

    print("\nresonant energies E = U + (pi n)^2 over the flat profile:")
    for n in range(4, 8):
        e_n = U_TILDE + (math.pi * n) ** 2
        row = {d: probabilities(e_n, PotentialSpec(U_TILDE, d))["T_prob"]
               for d in DELTAS}
        vals = "  ".join(f"T(delta={d:g})={row[d]:.6f}" for d in DELTAS)
        print(f"  n={n:2d}  E={e_n:8.3f}  {vals}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("\nmatplotlib not available, skipping the figure")
        return

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for delta in DELTAS:
        ax.plot(e, columns[delta], label=f"$\\Delta={delta:g}$")
    ax.set_xlabel("$E$")
    ax.set_ylabel("$|t|^2$")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "resonances.png", dpi=150)
    print(f"\nwrote {out / 'resonances.csv'} and {out / 'resonances.png'}")


if __name__ == "__main__":
    main(*sys.argv[1:])
