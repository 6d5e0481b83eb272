"""Spectral diagnostics of reshuffled and partially transposed evolution operators.

Eigenvalues of U^R and U^TA are reported unscaled.  For a Haar unitary of order
N^2 the entries have variance 1/N^2, so U^R looks like a Ginibre matrix with unit
spectral radius and the circular law applies directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .bipartite import BipartiteOperator, apply_local, haar_unitary, make_rng, partial_transpose_array, reshuffle_array

KINDS = ("reshuffled", "partial-transpose")


def mp_pdf(x):
    """Marchenko-Pastur density (2 pi)^-1 sqrt((4 - x)/x) on (0, 4], zero elsewhere."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x <= 4)
    xs = np.where(inside, x, 1.0)
    out = np.where(inside, np.sqrt((4 - xs) / xs) / (2 * np.pi), 0.0)
    return out if out.ndim else float(out)


def mp_cdf(x):
    """Closed-form integral of mp_pdf: (sqrt(x(4-x)) + 4 arcsin(sqrt(x)/2)) / (2 pi)."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 4.0)
    out = (np.sqrt(x * (4 - x)) + 4 * np.arcsin(np.sqrt(x) / 2)) / (2 * np.pi)
    return out if out.ndim else float(out)


def radial_cdf(r):
    """CDF of |z| for z uniform on the unit disk."""
    return np.clip(np.asarray(r, dtype=float), 0.0, 1.0) ** 2


def ks_mp(x) -> float:
    return float(stats.kstest(np.asarray(x, dtype=float), mp_cdf).statistic)


def radial_ks(eigenvalues) -> float:
    z = np.asarray(eigenvalues)
    if z.size == 0:
        raise ValueError("need at least one eigenvalue")
    return float(stats.kstest(np.abs(z), radial_cdf).statistic)


def circular_law_sample(count: int, rng: np.random.Generator) -> np.ndarray:
    """Points uniform on the unit disk (radial CDF r^2)."""
    r = np.sqrt(rng.uniform(0, 1, count))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, count))


def fd_bins(x) -> np.ndarray:
    """Freedman-Diaconis histogram edges.

    Degenerate samples (interquartile range ~ 0, e.g. a bare diagonal gate)
    would ask for an unbounded bin count; those fall back to Sturges.
    """
    x = np.asarray(x, dtype=float)
    if np.ptp(x) <= 1e-12 * max(1.0, abs(x).max()):
        return np.histogram_bin_edges(x, bins=1)
    q75, q25 = np.percentile(x, [75, 25])
    width = 2 * (q75 - q25) / max(len(x), 1) ** (1 / 3)
    if width <= 0 or np.ptp(x) > width * len(x):
        return np.histogram_bin_edges(x, bins="sturges")
    return np.histogram_bin_edges(x, bins="fd")


@dataclass
class SpectralSample:
    which: str
    step: int
    eigenvalues: np.ndarray
    scaled_sq_singular: np.ndarray
    ks_mp: float
    ks_radial: float
    bins: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def summary(self) -> dict:
        return {"which": self.which, "step": self.step, "ks_mp": self.ks_mp,
                "ks_radial": self.ks_radial, "bins": len(self.bins) - 1 if len(self.bins) else 0}


def _target(op: BipartiteOperator, which: str) -> np.ndarray:
    if which == "reshuffled":
        if not op.dims.square:
            raise ValueError("reshuffled spectra need n == m")
        return reshuffle_array(op.mat, op.n, op.m)
    if which == "partial-transpose":
        return partial_transpose_array(op.mat, op.n, op.m)
    raise ValueError(f"which must be one of {KINDS}, got {which!r}")


def spectral_sample(op: BipartiteOperator, which: str, step: int = 0,
                    eigenvalues: bool = True) -> SpectralSample:
    """Eigenvalues of the target and x_i = (nm) eig(rho) from eigvalsh(A A^dag).

    With ``eigenvalues=False`` the (costly) non-Hermitian eigensolve is skipped
    and ``ks_radial`` is NaN.
    """
    a = _target(op, which)
    x = np.linalg.eigvalsh(a @ a.conj().T)
    x = np.clip(x, 0.0, None)  # roundoff only; eigvalsh of a Gram matrix
    z = np.linalg.eigvals(a) if eigenvalues else np.zeros(0, dtype=complex)
    return SpectralSample(
        which=which, step=step, eigenvalues=z, scaled_sq_singular=x,
        ks_mp=ks_mp(x), ks_radial=radial_ks(z) if eigenvalues else float("nan"),
        bins=fd_bins(x),
    )


def evolve_steps(op: BipartiteOperator, steps, rng: np.random.Generator):
    """Yield (step, U^(step)) for sorted ``steps`` along one fresh-locals realization.

    Step 0 and step 1 both denote the bare gate.
    """
    op.require_unitary()
    wanted = sorted(set(int(s) for s in steps))
    if wanted and wanted[0] < 0:
        raise ValueError("steps must be >= 0")
    n, m = op.n, op.m
    u = op.mat
    diag = np.count_nonzero(u - np.diag(np.diagonal(u))) == 0
    w = u.copy()
    k = 1
    for s in wanted:
        while k < s:
            w = apply_local(w, haar_unitary(n, rng), haar_unitary(m, rng))
            w = np.diagonal(u)[:, None] * w if diag else u @ w
            k += 1
        yield s, BipartiteOperator(op.dims, w)


def spectral_run(op: BipartiteOperator, steps, kinds=KINDS, seed: int = 0,
                 eigenvalues: bool = True) -> list[SpectralSample]:
    rng = make_rng(seed, 1)
    out = []
    for s, w in evolve_steps(op, steps, rng):
        for which in kinds:
            out.append(spectral_sample(w, which, s, eigenvalues))
    return out


def cue_form_factor(n_dim: int, power: int, trials: int,
                    rng: np.random.Generator) -> tuple[float, float]:
    """MC mean and stderr of |tr u^power|^2 for u Haar on U(n_dim); exact min(power, n_dim)."""
    if trials < 100:
        raise ValueError("trials must be >= 100")
    if n_dim == 1:
        return 1.0, 0.0
    u = haar_unitary(n_dim, rng, size=trials)
    lam = np.linalg.eigvals(u)
    f = np.abs(np.sum(lam**power, axis=-1)) ** 2
    return float(f.mean()), float(f.std(ddof=1) / np.sqrt(trials))
