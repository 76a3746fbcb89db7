"""Time-averaged density from noise-driven jumps between realisations.

Builds the jump set of a harmonic well, runs histories of growing length and
reports how far the pooled occupancy frequencies sit from {alpha_i}, plus the
L1 distance between the time-averaged and the alpha-weighted density.  Jumps
shift the well by a constant, so the density distance stays near round-off;
the occupancy column is the one that converges.

    python3 scripts/ensemble_demo.py --n-p 4 --sigma 2
"""

import argparse

import numpy as np

from qchaos.ensemble import NoiseModel, pooled_estimate, run_repetitions
from qchaos.realisations import build_jump_realisations
from qchaos.spectrum import PotentialSpec, SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n-p", type=int, default=4)
    ap.add_argument("--omega-p", type=float, default=0.5)
    ap.add_argument("--sigma", type=float, default=2.0)
    ap.add_argument("--rate0", type=float, default=0.5)
    ap.add_argument("--reps", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    pot = PotentialSpec("harmonic", -8.0, 8.0, grid_n=1024)
    rs = build_jump_realisations(pot, SystemParams(omega_p=args.omega_p), args.n_p)
    noise = NoiseModel(args.sigma, args.rate0, "activated")
    print(f"N_R = {rs.n_r}, shifts = {rs.shifts()}")
    alphas = np.asarray(rs.alphas)
    print(f"{'t_max':>8} {'jumps/hist':>11} {'occ TV':>10} {'density L1':>11}")
    for t_max in (10, 100, 1000, 10_000):
        traces = run_repetitions(rs, noise, float(t_max), 1.0, args.seed, args.reps,
                                 workers=args.threads)
        est = pooled_estimate(traces)
        exact = traces[0].rho_ex_exact
        dx = traces[0].x[1] - traces[0].x[0]
        l1 = float(np.sum(np.abs(est - exact)) * dx)
        jumps = np.mean([tr.jump_count for tr in traces])
        occ = np.mean([tr.occupancy_freq for tr in traces], axis=0)
        tv = 0.5 * float(np.abs(occ - alphas).sum())
        print(f"{t_max:8d} {jumps:11.1f} {tv:10.3e} {l1:11.3e}")


if __name__ == "__main__":
    main()
