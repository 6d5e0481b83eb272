"""Gate-ensemble purities X_k, Y_k (k = 1, 2) for the diagonal and controlled-unitary models."""
import argparse

from gatelab.bipartite import make_rng
from gatelab.thermalization import (
    ctrlu_sampler, ctrlu_x2, ctrlu_y2, diag_sampler, diag_x1, diag_x2, diag_x2_alt, diag_y1,
    diag_y2, ensemble_purities,
)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, nargs="+", default=[4, 8])
    p.add_argument("--gates", type=int, default=200)
    p.add_argument("--locals", type=int, default=500)
    p.add_argument("--seed", type=int, default=8)
    args = p.parse_args()
    for n in args.n:
        d = ensemble_purities(diag_sampler(n), n, 2, args.gates, args.locals, make_rng(args.seed, n, 1))
        c = ensemble_purities(ctrlu_sampler(n), n, 2, args.gates, args.locals, make_rng(args.seed, n, 0))
        rows = [
            ("diag X1", d["X"][0], d["stderr_X"][0], diag_x1(n)),
            ("diag Y1", d["Y"][0], d["stderr_Y"][0], diag_y1(n)),
            ("diag X2", d["X"][1], d["stderr_X"][1], diag_x2(n)),
            ("diag X2 (6/(N^2+1))", d["X"][1], d["stderr_X"][1], diag_x2_alt(n)),
            ("diag Y2", d["Y"][1], d["stderr_Y"][1], diag_y2(n)),
            ("ctrlu X2", c["X"][1], c["stderr_X"][1], ctrlu_x2(n)),
            ("ctrlu Y2", c["Y"][1], c["stderr_Y"][1], ctrlu_y2(n)),
        ]
        print(f"N = {n}")
        for name, mean, err, exact in rows:
            print(f"  {name:<20} MC {mean:.6f} +- {err:.1e}   closed form {exact:.6f}")


if __name__ == "__main__":
    main()
