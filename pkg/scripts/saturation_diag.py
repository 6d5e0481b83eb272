"""Averaged e_p(U^(n)) for the weak diagonal gate at 2x3 against the closed-form curve.

The default is the reduced preset (1e3 trials, 500 steps, eps = 0.05); --full runs
1e4 trials and 2000 steps for eps in {0.025, 0.05}.
"""
import argparse
import time
from pathlib import Path

import numpy as np

from gatelab.cli import main as cli
from gatelab.bipartite import Dims
from gatelab.thermalization import saturation_time


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--full", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="results/saturation")
    args = p.parse_args()
    eps_list, trials, steps = ((0.025, 0.05), 10000, 2000) if args.full else ((0.05,), 1000, 500)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for eps in eps_list:
        path = out / f"diag_eps{eps}.csv"
        t0 = time.perf_counter()
        rc = cli(["thermalize", "--gate", f"diag:eps={eps},dims=2x3", "--steps", str(steps),
                  "--trials", str(trials), "--seed", str(args.seed), "--threads", str(args.threads),
                  "--out", str(path)])
        if rc:
            raise SystemExit(rc)
        data = np.genfromtxt(path, delimiter=",", names=True)
        dev = np.max(np.abs(data["mean_ep"] - data["theory_ep"]))
        print(f"eps={eps}: n*={saturation_time(Dims(2, 3), eps):.1f}, final mean_ep={data['mean_ep'][-1]:.4f}"
              f" (Haar 16/21={16 / 21:.4f}), gate e_p={data['mean_ep'][0]:.5f}, max |MC-theory|={dev:.4f},"
              f" {time.perf_counter() - t0:.0f} s")


if __name__ == "__main__":
    main()
