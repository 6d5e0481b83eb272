"""KS distance to the Marchenko-Pastur law along one controlled-unitary evolution (N=50)."""
import argparse
import json
from pathlib import Path

from gatelab.cli import main as cli


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--steps", default="1-14")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="results/spectra_ctrlu")
    args = p.parse_args()
    rc = cli(["spectra", "--gate", f"ctrlu:n={args.n}", "--steps", args.steps, "--seed", str(args.seed),
              "--no-eigenvalues", "--out", args.out])
    if rc:
        raise SystemExit(rc)
    summary = json.loads((Path(args.out) / "summary.json").read_text())
    for s in summary["samples"]:
        print(f"step {s['step']:>3} {s['which']:<18} KS_MP {s['ks_mp']:.4f}")


if __name__ == "__main__":
    main()
