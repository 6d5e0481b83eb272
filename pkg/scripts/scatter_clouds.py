"""Haar (e_p, g_t) clouds at 2x2 and 3x3 plus the two-qubit boundary curves."""
import argparse
from pathlib import Path

from gatelab.cli import main as cli


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="results/scatter")
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for dims in ("2x2", "3x3"):
        rc = cli(["scatter", "--dims", dims, "--samples", str(args.samples), "--seed", str(args.seed),
                  "--out", str(out / f"haar_{dims}.csv")])
        if rc:
            raise SystemExit(rc)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
