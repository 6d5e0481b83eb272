"""Local-unitary invariants of bipartite gates.

All quantities are functions of the two auxiliary purities

    X = tr rho_R^2,   Y = tr rho_T^2,

with rho_R = U^R U^R^dag / (nm) and rho_T = U^TA U^TA^dag / (nm).  Entangling
power and gate typicality are rescaled so that their maxima are 1 when n <= m.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bipartite import (
    UNITARY_TOL,
    BipartiteOperator,
    Dims,
    gram_purity,
    partial_transpose_array,
    reshuffle_array,
    swap_operator,
)


def _as_dims(dims) -> Dims:
    if isinstance(dims, Dims):
        return dims
    n, m = dims
    return Dims(int(n), int(m))


# -- purities and their closed-form combinations ------------------------------

def purities(mat: np.ndarray, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """(tr rho_R^2, tr rho_T^2) for a matrix or a stack of matrices."""
    d = n * m
    x = gram_purity(reshuffle_array(mat, n, m), d)
    y = gram_purity(partial_transpose_array(mat, n, m), d)
    return x, y


def ep_from_purities(x, y, n: int, m: int):
    nm = n * m
    return (nm * (nm + 1) - nm**2 * (x + y)) / (m * m * (n * n - 1))


def gt_from_purities(x, y, n: int, m: int):
    nm = n * m
    return (nm**2 - nm - nm**2 * x + nm**2 * y) / (2 * nm * (n + 1) * (m - 1))


def purity_pair(op: BipartiteOperator) -> tuple[float, float]:
    op.require_unitary()
    x, y = purities(op.mat, op.n, op.m)
    return float(x), float(y)


def linear_entanglement(op: BipartiteOperator) -> float:
    """E(U) = 1 - tr rho_R^2."""
    return 1.0 - purity_pair(op)[0]


def linear_entanglement_swapped(op: BipartiteOperator) -> float:
    """1 - tr rho_T^2; equals E(U S) when n == m."""
    return 1.0 - purity_pair(op)[1]


def entangling_power(op: BipartiteOperator) -> float:
    x, y = purity_pair(op)
    return float(ep_from_purities(x, y, op.n, op.m))


def gate_typicality(op: BipartiteOperator) -> float:
    x, y = purity_pair(op)
    return float(gt_from_purities(x, y, op.n, op.m))


def haar_avg_ep(dims) -> float:
    n, m = _as_dims(dims).n, _as_dims(dims).m
    return n * (m * m - 1) / (m * (n * m + 1))


def haar_avg_gt(dims) -> float:
    n, m = _as_dims(dims).n, _as_dims(dims).m
    return (n - 1) * (m + 1) / (2 * (n * m - 1))


def unscaled_ep_max(dims) -> float:
    """Maximum of the state-averaged linear entropy for n <= m; the rescaling factor of e_p."""
    n, m = _as_dims(dims).n, _as_dims(dims).m
    return m * (n - 1) / (n * (m + 1))


def scrambling_power(op: BipartiteOperator) -> float:
    """Average e_p of V^dag (u_A x u_B) V over Haar locals: e_p(V)(2 - e_p(V)/mean e_p)."""
    ep = entangling_power(op)
    return ep * (2.0 - ep / haar_avg_ep(op.dims))


# -- classification -------------------------------------------------------------

def _unitarity_dev(a: np.ndarray) -> float:
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[1]))))


def multiunitarity_conditions(op: BipartiteOperator) -> tuple[float, float, float]:
    """Max deviations from unitarity of U, U^R and U^TA (square dims only)."""
    if not op.dims.square:
        raise ValueError(f"multiunitarity is defined for square dims, got {op.dims}")
    n = op.n
    return (
        _unitarity_dev(op.mat),
        _unitarity_dev(reshuffle_array(op.mat, n, n)),
        _unitarity_dev(partial_transpose_array(op.mat, n, n)),
    )


def is_dual_unitary(op: BipartiteOperator, tol: float = UNITARY_TOL) -> bool:
    _, dr, _ = multiunitarity_conditions(op)
    return dr < tol


def is_two_unitary(op: BipartiteOperator, tol: float = UNITARY_TOL) -> bool:
    du, dr, dt = multiunitarity_conditions(op)
    return du < tol and dr < tol and dt < tol


@dataclass
class GateMeasures:
    E: float
    E_swapped: float
    ep: float
    gt: float
    is_dual: bool
    is_two_unitary: bool
    schmidt: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "E": self.E,
            "E_swapped": self.E_swapped,
            "ep": self.ep,
            "gt": self.gt,
            "is_dual": self.is_dual,
            "is_two_unitary": self.is_two_unitary,
            "schmidt": list(self.schmidt),
        }


def gate_measures(op: BipartiteOperator) -> GateMeasures:
    from .bipartite import schmidt_spectrum

    x, y = purity_pair(op)
    if op.dims.square:
        dual, two = is_dual_unitary(op), is_two_unitary(op)
    else:
        # non-square reshuffle cannot be unitary; 2-unitarity is not classified here
        dual = two = False
    return GateMeasures(
        E=1.0 - x,
        E_swapped=1.0 - y,
        ep=float(ep_from_purities(x, y, op.n, op.m)),
        gt=float(gt_from_purities(x, y, op.n, op.m)),
        is_dual=dual,
        is_two_unitary=two,
        schmidt=schmidt_spectrum(op).tolist(),
    )


# -- Monte-Carlo state-average oracle ------------------------------------------

def _random_states(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def product_state_entropies(op: BipartiteOperator, samples: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Linear entropies 1 - tr rho_A^2 of U|psi_A>|psi_B> for Haar-random product inputs."""
    n, m = op.n, op.m
    psi_a = _random_states(rng, samples, n)
    psi_b = _random_states(rng, samples, m)
    prod = (psi_a[:, :, None] * psi_b[:, None, :]).reshape(samples, n * m)
    out = (prod @ op.mat.T).reshape(samples, n, m)
    rho_a = out @ np.swapaxes(out, 1, 2).conj()
    return 1.0 - np.sum(np.abs(rho_a) ** 2, axis=(1, 2))


def mc_entangling_power_oracle(op: BipartiteOperator, samples: int,
                               rng: np.random.Generator) -> tuple[float, float]:
    """Monte-Carlo e_p from its definition as a product-state average.

    Returns (mean, stderr) already divided by the unscaled maximum so it
    targets the same number as :func:`entangling_power`.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    op.require_unitary()
    ent = product_state_entropies(op, samples, rng) / unscaled_ep_max(op.dims)
    return float(ent.mean()), float(ent.std(ddof=1) / np.sqrt(samples))


# -- stationarity of the fractional-SWAP parabola -------------------------------

def parabola_residual(op: BipartiteOperator) -> float:
    """f(u) = e_p(u) - 2 g_t(u)(1 - g_t(u)); zero on the fractional SWAP family."""
    x, y = purity_pair(op)
    ep = ep_from_purities(x, y, op.n, op.m)
    gt = gt_from_purities(x, y, op.n, op.m)
    return float(ep - 2.0 * gt * (1.0 - gt))


def traceless_swap_orthogonal_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian H with tr H = 0 and tr(HS) = 0, unit Frobenius norm."""
    d = n * n
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2
    s = swap_operator(n).mat
    e1 = np.eye(d) / np.sqrt(d)
    e2 = s - (np.trace(s).real / d) * np.eye(d)
    e2 = e2 / np.linalg.norm(e2)
    for e in (e1, e2):
        h = h - np.vdot(e, h) * e
    h = (h + h.conj().T) / 2
    return h / np.linalg.norm(h)


def _expi(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def perturbed_swap_power(t: float, eps: float, h: np.ndarray, n: int) -> BipartiteOperator:
    s = swap_operator(n).mat
    return BipartiteOperator(Dims(n, n), _expi(t * s + eps * h))


def parabola_perturbation_values(t: float, eps: float, trials: int,
                                 rng: np.random.Generator, n: int = 2) -> np.ndarray:
    """f(exp(i(tS + eps H))) for ``trials`` random admissible directions H."""
    hs = [traceless_swap_orthogonal_hermitian(n, rng) for _ in range(trials)]
    return np.array([parabola_residual(perturbed_swap_power(t, eps, h, n)) for h in hs])


def parabola_stationarity_check(t: float, eps: float, trials: int,
                                rng: np.random.Generator, n: int = 2) -> float:
    """Max |f| over random perturbations of exp(itS) of size eps."""
    return float(np.max(np.abs(parabola_perturbation_values(t, eps, trials, rng, n))))


def stationarity_slope(t: float, n: int, eps_values=(1e-2, 5e-3, 2.5e-3), trials: int = 100,
                       seed: int = 0) -> tuple[float, np.ndarray]:
    """Log-log slope of max|f| against eps; the same directions H are reused for every eps.

    A slope near 2 means the first variation of f vanishes on the parabola.
    """
    maxima = []
    for eps in eps_values:
        rng = np.random.default_rng(seed)
        maxima.append(parabola_stationarity_check(t, eps, trials, rng, n))
    maxima = np.array(maxima)
    slope = np.polyfit(np.log(eps_values), np.log(maxima), 1)[0]
    return float(slope), maxima
