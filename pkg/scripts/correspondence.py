"""Standard-map diffusion against the K > K_c chaos criterion.

Scans K, prints D_est next to the quasilinear K^2/2 and the verdict from the
quantum side at lambda = 2 pi (K_c = 1).

    python3 scripts/correspondence.py --orbits 1000 --steps 10000
"""

import argparse
import math

from qchaos.classical import correspondence_check, energy_for_K, near_accelerator_mode
from qchaos.spectrum import Spectrum, SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--K", type=float, nargs="+",
                    default=[0.1, 0.3, 0.5, 0.8, 1.0, 1.2, 2.0, 4.0, 5.0, 10.0])
    ap.add_argument("--orbits", type=int, default=1000)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    params = SystemParams(lambda_anh=2 * math.pi)
    spec = Spectrum.from_levels([0.5, 1.5, 2.5], params)
    print(f"{'K':>6} {'D_est':>10} {'K^2/2':>10} {'motion':>9}  verdict")
    for K in args.K:
        v = correspondence_check(spec, params, energy_for_K(spec, params, K),
                                 args.orbits, args.steps, args.seed, workers=args.threads)
        note = "  (accelerator-mode window)" if near_accelerator_mode(K) else ""
        motion = "bounded" if v.bounded else "diffusive"
        print(f"{K:6.2f} {v.D_est:10.4g} {K * K / 2:10.4g} {motion:>9}  {v.verdict}{note}")


if __name__ == "__main__":
    main()
