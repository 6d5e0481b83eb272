"""Iterated gates interlaced with Haar-random local unitaries.

The evolution is U^(1) = U and U^(n) = U (u_A (x) u_B) U^(n-1).  Trials are
grouped in fixed-size blocks; block b draws from its own stream
``make_rng(seed, b)`` and the per-block moments are merged in block order, so
the output does not depend on how many worker threads run the blocks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bipartite import BipartiteOperator, Dims, apply_local, haar_unitary, make_rng
from .gates import GateSpec, build_gate
from .io import fmt
from .measures import (
    entangling_power,
    ep_from_purities,
    gate_typicality,
    gt_from_purities,
    haar_avg_ep,
    haar_avg_gt,
    purities,
    purity_pair,
)

MODES = ("fresh-locals", "fixed-locals", "no-locals")
BLOCK_TRIALS = 250
TRAJECTORY_HEADER = ["n", "mean_ep", "stderr_ep", "mean_gt", "stderr_gt", "X", "Y",
                     "theory_ep", "theory_gt"]

__all__ = ["EvolutionConfig", "Trajectory", "evolve_trajectory", "evolve_operator",
           "theory_ep", "theory_gt", "avg_ep_two_gate", "saturation_time", "purity_pair"]


# -- closed forms -----------------------------------------------------------------

def theory_ep(n: int, ep_u: float, dims) -> float:
    """Local average of e_p(U^(n)): mean_ep [1 - (1 - e_p(U)/mean_ep)^n]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    bar = haar_avg_ep(dims)
    return bar * (1.0 - (1.0 - ep_u / bar) ** n)


def theory_gt(n: int, gt_u: float, dims) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    bar = haar_avg_gt(dims)
    return bar * (1.0 - (1.0 - gt_u / bar) ** n)


def saturation_time(dims, eps: float) -> float:
    """n* = (N+1)(M^2-1) / (M(NM+1) eps^2) for the diagonal ensemble."""
    if not eps > 0:
        raise ValueError("eps must be > 0")
    d = dims if isinstance(dims, Dims) else Dims(*dims)
    n, m = d.n, d.m
    return (n + 1) * (m * m - 1) / (m * (n * m + 1) * eps**2)


def saturation_time_sinc(dims, eps: float) -> float:
    """Large-dimension estimate 3 mean_ep / (2 pi^2 eps^2)."""
    if not eps > 0:
        raise ValueError("eps must be > 0")
    return 3 * haar_avg_ep(dims) / (2 * np.pi**2 * eps**2)


def two_gate_closed_form(ep_u: float, ep_v: float, dims) -> float:
    return ep_u + ep_v - ep_u * ep_v / haar_avg_ep(dims)


def avg_ep_two_gate(u: BipartiteOperator, v: BipartiteOperator, trials: int,
                    rng: np.random.Generator) -> tuple[float, float, float]:
    """(MC mean, stderr, closed form) of e_p[U (u_A (x) u_B) V] over Haar locals."""
    if u.dims != v.dims:
        raise ValueError(f"dims mismatch: {u.dims} vs {v.dims}")
    u.require_unitary()
    v.require_unitary()
    n, m = u.n, u.m
    ua = haar_unitary(n, rng, size=trials)
    ub = haar_unitary(m, rng, size=trials)
    w = u.mat @ apply_local(np.broadcast_to(v.mat, (trials,) + v.mat.shape), ua, ub)
    x, y = purities(w, n, m)
    eps = ep_from_purities(x, y, n, m)
    closed = two_gate_closed_form(entangling_power(u), entangling_power(v), u.dims)
    return float(eps.mean()), float(eps.std(ddof=1) / np.sqrt(trials)), closed


# Ensemble purities at N = M for the diagonal (eps = 1) and controlled-unitary models.

def diag_x1(n: int) -> float:
    return (2 * n - 1) / n**2


def diag_y1(n: int) -> float:
    return 1 / n**2


def diag_x2_alt(n: int) -> float:
    """Alternative step-2 form 6/(N^2+1); it exceeds 1 at N = 2 and disagrees with MC."""
    return 6 / (n**2 + 1)


def diag_x2(n: int) -> float:
    """Exact step-2 ensemble mean of tr rho_R^2, confirmed by enumeration and MC."""
    return 6 / (n + 1) ** 2


def diag_y2(n: int) -> float:
    return 2 * (n**4 + n**2 + 1) / (n**4 * (n + 1) ** 2)


def ctrlu_x2(n: int) -> float:
    return (n**6 + 2 * n**4 - 6 * n**2 + 4) / (4 * n**2 * (n**2 - 1) ** 2)


def ctrlu_y2(n: int) -> float:
    return (5 * n**4 - 10 * n**2 + 6) / (4 * n**2 * (n**2 - 1) ** 2)


def haar_purity(n: int) -> float:
    """Haar mean of tr rho_R^2 (and of tr rho_T^2) at N = M."""
    return 2 / (n**2 + 1)


# -- evolution -----------------------------------------------------------------------

@dataclass(frozen=True)
class EvolutionConfig:
    gate: GateSpec
    dims: Dims
    steps: int
    trials: int
    seed: int
    mode: str = "fresh-locals"
    threads: int = 1

    def __post_init__(self):
        if self.steps < 1 or self.trials < 1:
            raise ValueError("steps and trials must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class Trajectory:
    mean_ep: np.ndarray
    stderr_ep: np.ndarray
    mean_gt: np.ndarray
    stderr_gt: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    theory_ep: np.ndarray
    theory_gt: np.ndarray
    gate_ep: float = 0.0
    gate_gt: float = 0.0
    diagnostics: list = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.mean_ep)

    def rows(self):
        for k in range(self.steps):
            yield [k + 1] + [fmt(getattr(self, c)[k]) for c in TRAJECTORY_HEADER[1:]]


class _Moments:
    """Per-step running mean and M2 for several quantities (Chan's merge)."""

    def __init__(self, steps: int, q: int):
        self.count = 0
        self.mean = np.zeros((q, steps))
        self.m2 = np.zeros((q, steps))

    def add_block(self, values: np.ndarray) -> None:  # values: (q, steps, b)
        b = values.shape[-1]
        mb = values.mean(axis=-1)
        m2b = ((values - mb[..., None]) ** 2).sum(axis=-1)
        n = self.count + b
        delta = mb - self.mean
        self.mean = self.mean + delta * (b / n)
        self.m2 = self.m2 + m2b + delta**2 * (self.count * b / n)
        self.count = n

    def stderr(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


def _run_block(u: np.ndarray, dims: Dims, steps: int, size: int, mode: str,
               rng: np.random.Generator) -> np.ndarray:
    """Returns (4, steps, size) array of X, Y, ep, gt per step and trial."""
    n, m = dims.n, dims.m
    out = np.empty((4, steps, size))
    w = np.broadcast_to(u, (size,) + u.shape).copy()
    if mode == "fixed-locals":
        ua = haar_unitary(n, rng, size=size)
        ub = haar_unitary(m, rng, size=size)
    for k in range(steps):
        if k > 0:
            if mode == "fresh-locals":
                ua = haar_unitary(n, rng, size=size)
                ub = haar_unitary(m, rng, size=size)
            if mode != "no-locals":
                w = apply_local(w, ua, ub)
            w = u @ w
        x, y = purities(w, n, m)
        out[0, k], out[1, k] = x, y
    out[2] = ep_from_purities(out[0], out[1], n, m)
    out[3] = gt_from_purities(out[0], out[1], n, m)
    return out


def evolve_operator(op: BipartiteOperator, steps: int, trials: int, seed: int,
                    mode: str = "fresh-locals", threads: int = 1) -> Trajectory:
    op.require_unitary()
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    dims = op.dims
    sizes = [min(BLOCK_TRIALS, trials - s) for s in range(0, trials, BLOCK_TRIALS)]

    def job(b):
        return _run_block(op.mat, dims, steps, sizes[b], mode, make_rng(seed, b))

    mom = _Moments(steps, 4)
    diagnostics = []
    with ThreadPoolExecutor(max_workers=threads) as ex:
        # map yields in submission order, so the merge order is fixed
        for b, vals in enumerate(ex.map(job, range(len(sizes)))):
            if not np.all(np.isfinite(vals)):
                diagnostics.append(f"block {b}: non-finite values dropped")
                vals = vals[..., np.all(np.isfinite(vals), axis=(0, 1))]
                if vals.shape[-1] == 0:
                    continue
            mom.add_block(vals)
    if mom.count == 0:
        raise FloatingPointError("every trial failed")
    err = mom.stderr()
    ep_u, gt_u = entangling_power(op), gate_typicality(op)
    # U^(1) = U carries no local randomness; store it exactly instead of a rounded mean
    x_u, y_u = purity_pair(op)
    mom.mean[:, 0] = (x_u, y_u, ep_u, gt_u)
    err[:, 0] = 0.0
    ns = range(1, steps + 1)
    return Trajectory(
        mean_ep=mom.mean[2], stderr_ep=err[2], mean_gt=mom.mean[3], stderr_gt=err[3],
        X=mom.mean[0], Y=mom.mean[1],
        theory_ep=np.array([theory_ep(k, ep_u, dims) for k in ns]),
        theory_gt=np.array([theory_gt(k, gt_u, dims) for k in ns]),
        gate_ep=ep_u, gate_gt=gt_u, diagnostics=diagnostics,
    )


def evolve_trajectory(cfg: EvolutionConfig) -> Trajectory:
    op = build_gate(cfg.gate, seed=cfg.seed)
    if op.dims != cfg.dims:
        raise ValueError(f"gate dims {op.dims} differ from configured dims {cfg.dims}")
    return evolve_operator(op, cfg.steps, cfg.trials, cfg.seed, cfg.mode, cfg.threads)


# -- gate-ensemble purity averages -------------------------------------------------------

def ensemble_purities(sample_gate, n: int, steps: int, gates: int, locals_per_gate: int,
                      rng: np.random.Generator) -> dict:
    """Means of X_k, Y_k (k = 1..steps) over gates x fresh local sequences.

    ``sample_gate(rng)`` returns a function applying one sampled gate of order
    n^2 to a stack of matrices.  Local draws sharing a gate are correlated, so
    the standard error is taken over per-gate means.
    """
    per_gate = np.empty((2, steps, gates))
    eye = np.eye(n * n, dtype=complex)[None]
    for g in range(gates):
        apply_u = sample_gate(rng)
        u = apply_u(eye)
        x, y = purities(u[0], n, n)
        per_gate[:, 0, g] = x, y
        w = np.broadcast_to(u, (locals_per_gate,) + u.shape[1:])
        for k in range(1, steps):
            w = apply_u(apply_local(w, haar_unitary(n, rng, size=locals_per_gate),
                                    haar_unitary(n, rng, size=locals_per_gate)))
            x, y = purities(w, n, n)
            per_gate[0, k, g], per_gate[1, k, g] = x.mean(), y.mean()
    mean = per_gate.mean(axis=-1)
    err = per_gate.std(axis=-1, ddof=1) / np.sqrt(gates)
    return {"X": mean[0], "Y": mean[1], "stderr_X": err[0], "stderr_Y": err[1]}


def diag_sampler(n: int, eps: float = 1.0):
    """Diagonal phases exp(2 pi i eps xi), applied as a row scaling."""
    def sample(rng):
        ph = np.exp(2j * np.pi * eps * rng.uniform(-0.5, 0.5, n * n))
        return lambda w: ph[:, None] * w
    return sample


def ctrlu_sampler(n: int, rank: int | None = None):
    """P_1 (x) 1 + P_2 (x) u_B with Haar u_B, applied blockwise on the control index."""
    r = n // 2 if rank is None else rank

    def sample(rng):
        ub = haar_unitary(n, rng)

        def apply(w):
            t = w.reshape(w.shape[:-2] + (n, n, w.shape[-1])).copy()
            t[..., r:, :, :] = np.einsum("bj,...ijk->...ibk", ub, t[..., r:, :, :])
            return t.reshape(w.shape)
        return apply
    return sample


def log2_slope(values: np.ndarray, floor: float = 0.0, first: int = 1) -> float:
    """Least-squares slope of log2(values - floor) against step number."""
    v = np.asarray(values, dtype=float) - floor
    if np.any(v <= 0):
        raise ValueError("values must exceed the floor")
    ns = np.arange(first, first + len(v))
    return float(np.polyfit(ns, np.log2(v), 1)[0])
