"""``gatelab`` command line: measure | scatter | thermalize | spectra | verify | replay.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 invalid input,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bipartite import Dims, NotUnitaryError, haar_unitary, make_rng
from .gates import GateSpecError, boundary_curves, build_gate, parse_gate_spec
from .io import MatrixFileError, RunManifest, dump_json, fmt, load_matrix, write_csv
from .measures import ep_from_purities, gate_measures, gt_from_purities, purities

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3, 4
SCATTER_BLOCK = 1000


class UsageError(Exception):
    """Bad command-line usage; exits with the parse code."""


def _emit_table(path, header, rows, form: str) -> None:
    rows = list(rows)
    if form == "json":
        recs = [dict(zip(header, r)) for r in rows]
        Path(path).write_text(dump_json(recs))
    else:
        write_csv(path, header, rows)


def _require_seed(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is required (no implicit entropy)")
    return args.seed


def _gate(text: str, seed):
    spec = parse_gate_spec(text)
    if spec.random and "seed" not in spec.params and seed is None:
        raise UsageError(f"gate {text!r} is random: give seed= in the spec or --seed")
    return spec, build_gate(spec, seed=seed)


# -- commands --------------------------------------------------------------------------

def cmd_measure(args) -> list[str]:
    if args.input:
        op = load_matrix(args.input)
    else:
        if not args.gate:
            raise UsageError("measure needs a gate spec or --input")
        _, op = _gate(args.gate, args.seed)
    op.require_unitary()
    res = gate_measures(op).as_dict()
    if args.format == "csv":
        text = "E,E_swapped,ep,gt,is_dual,is_two_unitary\n" + ",".join(
            [fmt(res[k]) for k in ("E", "E_swapped", "ep", "gt")]
            + [str(res["is_dual"]).lower(), str(res["is_two_unitary"]).lower()]) + "\n"
    else:
        text = dump_json(res)
    if args.out:
        Path(args.out).write_text(text)
        return [args.out]
    sys.stdout.write(text)
    return []


def scatter_points(dims: Dims, samples: int, seed: int, threads: int = 1) -> np.ndarray:
    """(ep, gt) of ``samples`` Haar gates; block b uses stream (seed, b)."""
    sizes = [min(SCATTER_BLOCK, samples - s) for s in range(0, samples, SCATTER_BLOCK)]

    def job(b):
        u = haar_unitary(dims.total, make_rng(seed, b), size=sizes[b])
        x, y = purities(u, dims.n, dims.m)
        return np.column_stack([ep_from_purities(x, y, dims.n, dims.m),
                                gt_from_purities(x, y, dims.n, dims.m)])

    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(job, range(len(sizes))))
    return np.vstack(parts) if parts else np.zeros((0, 2))


def cmd_scatter(args) -> list[str]:
    seed = _require_seed(args)
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    dims = Dims.parse(args.dims)
    pts = scatter_points(dims, args.samples, seed, args.threads)
    out = Path(args.out)
    _emit_table(out, ["ep", "gt"], ([float(a), float(b)] for a, b in pts), args.format)
    written = [str(out)]
    if dims == Dims(2, 2):
        comp = out.with_name(out.stem + "_boundary" + out.suffix)
        rows = [[name, float(e), float(g)] for name, c in boundary_curves().items() for e, g in c]
        _emit_table(comp, ["curve", "ep", "gt"], rows, args.format)
        written.append(str(comp))
    return written


def cmd_thermalize(args) -> list[str]:
    from .thermalization import TRAJECTORY_HEADER, EvolutionConfig, evolve_trajectory

    seed = _require_seed(args)
    spec = parse_gate_spec(args.gate)
    dims = Dims.parse(args.dims) if args.dims else spec.dims
    cfg = EvolutionConfig(spec, dims, args.steps, args.trials, seed, args.mode, args.threads)
    traj = evolve_trajectory(cfg)
    for d in traj.diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    _emit_table(args.out, TRAJECTORY_HEADER, traj.rows(), args.format)
    return [args.out]


def _parse_steps(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def cmd_spectra(args) -> list[str]:
    from .spectra import KINDS, spectral_run

    seed = _require_seed(args)
    _, op = _gate(args.gate, seed)
    if args.dims and Dims.parse(args.dims) != op.dims:
        raise UsageError(f"gate dims {op.dims} differ from --dims {args.dims}")
    try:
        steps = _parse_steps(args.steps)
    except ValueError:
        raise UsageError(f"bad step list {args.steps!r}") from None
    kinds = KINDS if args.which == "both" else (args.which,)
    samples = spectral_run(op, steps, kinds, seed, eigenvalues=not args.no_eigenvalues)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    eig_rows, sv_rows = [], []
    for s in samples:
        eig_rows += [[s.which, s.step, float(z.real), float(z.imag)] for z in s.eigenvalues]
        sv_rows += [[s.which, s.step, float(x)] for x in s.scaled_sq_singular]
    write_csv(out / "eigenvalues.csv", ["kind", "step", "re", "im"], eig_rows)
    write_csv(out / "singular.csv", ["kind", "step", "x"], sv_rows)
    summary = {"gate": args.gate, "bins_rule": "freedman-diaconis",
               "samples": [s.summary() for s in samples]}
    (out / "summary.json").write_text(dump_json(summary))
    return [str(out / f) for f in ("eigenvalues.csv", "singular.csv", "summary.json")]


def cmd_verify(args) -> list[str]:
    from .verify import run_checks

    for path in args.gate_file or []:
        load_matrix(path)  # raises MatrixFileError naming the file
    report = run_checks(quick=args.quick)
    text = dump_json(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not report["passed"]:
        raise _VerifyFailed(args.out)
    return [args.out] if args.out else []


class _VerifyFailed(Exception):
    def __init__(self, out):
        self.outputs = [out] if out else []


def cmd_replay(args) -> list[str]:
    man = RunManifest.read(args.manifest)
    code = main(man.params["argv"])
    if code != 0:
        raise RuntimeError(f"replayed command exited with {code}")
    bad = [o["path"] for o in man.outputs if _sha256(o["path"]) != o["sha256"]]
    if bad:
        print("outputs differ from the manifest: " + ", ".join(bad), file=sys.stderr)
        raise _VerifyFailed(None)
    print(f"replay reproduced {len(man.outputs)} output file(s)")
    return []


# -- plumbing --------------------------------------------------------------------------

def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gatelab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gatelab {__version__}")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, help="master seed for all randomness")
    shared.add_argument("--threads", type=int, default=1, help="worker threads")
    shared.add_argument("--format", choices=("csv", "json"), default=None)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[shared], help="invariants of one gate")
    m.add_argument("gate", nargs="?", help="gate spec, e.g. cnot or fswap:t=0.3")
    m.add_argument("--input", help="JSON matrix file (alternative to a spec)")
    m.add_argument("--out")
    m.set_defaults(func=cmd_measure, default_format="json")

    s = sub.add_parser("scatter", parents=[shared], help="(ep, gt) of Haar gates")
    s.add_argument("--dims", default="2x2")
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scatter, default_format="csv")

    t = sub.add_parser("thermalize", parents=[shared], help="averaged evolution trajectory")
    t.add_argument("--gate", required=True)
    t.add_argument("--dims")
    t.add_argument("--steps", type=int, default=100)
    t.add_argument("--trials", type=int, default=1000)
    t.add_argument("--mode", choices=("fresh-locals", "fixed-locals", "no-locals"),
                   default="fresh-locals")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_thermalize, default_format="csv")

    sp = sub.add_parser("spectra", parents=[shared], help="spectra along one realization")
    sp.add_argument("--gate", required=True)
    sp.add_argument("--dims")
    sp.add_argument("--steps", default="0", help="comma list or ranges, e.g. 2,3,4 or 1-6")
    sp.add_argument("--which", choices=("both", "reshuffled", "partial-transpose"), default="both")
    sp.add_argument("--no-eigenvalues", action="store_true",
                    help="skip the non-Hermitian eigensolve (singular values only)")
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_spectra, default_format="csv")

    v = sub.add_parser("verify", parents=[shared], help="run the invariant checks")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--gate-file", action="append", help="matrix file to validate first")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify, default_format="json")

    r = sub.add_parser("replay", help="re-run a manifest and compare output hashes")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_replay, default_format="json", seed=None, threads=1, format=None)
    return p


def _write_manifest(args, argv, outputs, duration) -> None:
    if not outputs or args.command == "replay":
        return
    params = {k: v for k, v in vars(args).items() if k not in ("func", "default_format")}
    params["argv"] = list(argv)
    man = RunManifest(
        command=args.command, params=params, seed=args.seed, version=__version__,
        outputs=[{"path": o, "sha256": _sha256(o)} for o in outputs], duration_s=duration,
    )
    first = Path(outputs[0])
    base = first.parent if args.command == "spectra" else first.with_suffix("")
    path = base / "manifest.json" if args.command == "spectra" else Path(str(base) + ".manifest.json")
    man.write(path)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = args.default_format
    t0 = time.perf_counter()
    try:
        outputs = args.func(args)
    except (GateSpecError, UsageError) as exc:
        print(f"gatelab: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MatrixFileError, NotUnitaryError) as exc:
        print(f"gatelab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _VerifyFailed as exc:
        _write_manifest(args, argv, exc.outputs, time.perf_counter() - t0)
        return EXIT_FAIL
    except (FloatingPointError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"gatelab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"gatelab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write_manifest(args, argv, outputs, time.perf_counter() - t0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
