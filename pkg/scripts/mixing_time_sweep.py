"""Mixing time versus bandwidth-to-coverage ratio for a family of room volumes."""

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from roomchan import theory


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/mixing_time_sweep.csv")
    args = parser.parse_args()
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)

    volumes = (10.0, 30.0, 100.0, 300.0, 1000.0)
    ratios = np.logspace(8, 12, 81)  # bandwidth / coverage product, in Hz
    c = 3e8

    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("bandwidth_over_coverage_hz," +
                 ",".join(f"tau_mix_s_V{v:g}" for v in volumes) + "\n")
        for ratio in ratios:
            row = [np.sqrt(ratio * v / (4.0 * np.pi * c**3)) for v in volumes]
            fh.write(f"{ratio:.17g}," + ",".join(f"{t:.17g}" for t in row) + "\n")

    # spot value: 5 x 5 x 3 room, 2 GHz, isotropic antennas
    scene = theory.SceneSummary(
        volume=75.0, surface=110.0, diagonal=np.sqrt(59.0), reflectance=0.6,
        speed_of_light=c, wavelength=0.005, bandwidth=2e9,
        tx_fraction=1.0, rx_fraction=1.0,
    )
    print(f"reference mixing time: {theory.mixing_time(scene) * 1e9:.2f} ns")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
