"""Regime map over (E, eps_p) for a harmonic well.

    python3 scripts/phase_diagram.py --out phase.csv
"""

import argparse
import csv
import dataclasses
from collections import Counter

import numpy as np

from qchaos.borders import classify
from qchaos.spectrum import PotentialSpec, SystemParams, solve_bound_states


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--levels", type=int, default=10)
    ap.add_argument("--e-max", type=float, default=8.0)
    ap.add_argument("--n-e", type=int, default=200)
    ap.add_argument("--n-eps", type=int, default=60)
    ap.add_argument("--out", default="phase.csv")
    args = ap.parse_args()

    base = SystemParams()
    spec = solve_bound_states(PotentialSpec("harmonic", -10.0, 10.0), base, args.levels)
    energies = np.linspace(0.05, args.e_max, args.n_e)
    couplings = np.geomspace(0.02, 20.0, args.n_eps)

    tally = Counter()
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eps_p", "E", "delta_E", "window_mode", "regime"])
        for eps_p in couplings:
            p = dataclasses.replace(base, eps_p=float(eps_p))
            for E in energies:
                rep = classify(float(E), spec, p)
                tally[rep.regime] += 1
                w.writerow([f"{eps_p:.6g}", f"{E:.6g}", f"{rep.delta_E:.6g}",
                            rep.window_mode, rep.regime])

    print(f"levels: {np.round(spec.levels, 6).tolist()}")
    for regime, n in sorted(tally.items()):
        print(f"{regime:32s} {n:6d}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
