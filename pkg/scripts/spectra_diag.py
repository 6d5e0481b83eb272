"""Spectra of the maximally entangling diagonal gate at N=50, steps 2..4."""
import argparse

from gatelab.cli import main as cli


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--steps", default="2,3,4")
    p.add_argument("--seed", type=int, default=6)
    p.add_argument("--out", default="results/spectra_diag")
    args = p.parse_args()
    raise SystemExit(cli(["spectra", "--gate", f"diag:eps=1,dims={args.n}x{args.n}",
                          "--steps", args.steps, "--seed", str(args.seed), "--out", args.out]))


if __name__ == "__main__":
    main()
