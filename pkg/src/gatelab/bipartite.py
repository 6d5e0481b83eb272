"""Dense bipartite operators on H_A (dim n) x H_B (dim m).

Composite basis index is row-major: |i, alpha> -> i*m + alpha.  Every index
permutation below (reshuffle, partial transpose, swap) and the matrix file
format use this convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNITARY_TOL = 1e-10
CLIP_TOL = 1e-12


class NotUnitaryError(ValueError):
    """Input operator failed the unitarity gate."""


@dataclass(frozen=True)
class Dims:
    n: int
    m: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m:
            raise ValueError(f"dims must be integers, got {self.n}x{self.m}")
        if self.n < 2 or self.m < 2:
            raise ValueError(f"subsystem dims must be >= 2, got {self.n}x{self.m}")

    @property
    def total(self) -> int:
        return self.n * self.m

    @property
    def square(self) -> bool:
        return self.n == self.m

    def __str__(self):
        return f"{self.n}x{self.m}"

    @classmethod
    def parse(cls, text: str) -> "Dims":
        parts = text.lower().split("x")
        if len(parts) != 2:
            raise ValueError(f"dims must look like NxM, got {text!r}")
        return cls(int(parts[0]), int(parts[1]))


@dataclass(frozen=True, eq=False)
class BipartiteOperator:
    """Square complex matrix of order n*m with declared subsystem dims."""

    dims: Dims
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        d = self.dims.total
        if mat.shape != (d, d):
            raise ValueError(
                f"matrix shape {mat.shape} does not match dims {self.dims} (order {d})")
        object.__setattr__(self, "mat", mat)

    @classmethod
    def square(cls, mat, n: int | None = None) -> "BipartiteOperator":
        """Wrap a matrix of order n**2 with dims (n, n); n inferred if omitted."""
        mat = np.asarray(mat, dtype=complex)
        if n is None:
            n = int(round(np.sqrt(mat.shape[0])))
        return cls(Dims(n, n), mat)

    @property
    def n(self) -> int:
        return self.dims.n

    @property
    def m(self) -> int:
        return self.dims.m

    def unitarity_error(self) -> float:
        d = self.dims.total
        return float(np.max(np.abs(self.mat.conj().T @ self.mat - np.eye(d))))

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_error() < tol

    def require_unitary(self, tol: float = UNITARY_TOL) -> "BipartiteOperator":
        err = self.unitarity_error()
        if not err < tol:
            raise NotUnitaryError(f"operator is not unitary: max|U^dag U - 1| = {err:.3e}")
        return self

    def __matmul__(self, other):
        if isinstance(other, BipartiteOperator):
            if other.dims != self.dims:
                raise ValueError(f"dims mismatch: {self.dims} vs {other.dims}")
            return BipartiteOperator(self.dims, self.mat @ other.mat)
        return NotImplemented

    def dagger(self) -> "BipartiteOperator":
        return BipartiteOperator(self.dims, self.mat.conj().T)


# -- raw-array index permutations (support leading batch axes) ---------------

def reshuffle_array(a: np.ndarray, n: int, m: int) -> np.ndarray:
    """<i alpha|U|j beta>  ->  entry (i*n + j, alpha*m + beta)."""
    batch = a.shape[:-2]
    t = a.reshape(*batch, n, m, n, m)
    t = np.moveaxis(t, -3, -2)  # (i, alpha, j, beta) -> (i, j, alpha, beta)
    return t.reshape(*batch, n * n, m * m)


def partial_transpose_array(a: np.ndarray, n: int, m: int) -> np.ndarray:
    """Transpose on subsystem A: <j alpha|U^TA|i beta> = <i alpha|U|j beta>."""
    batch = a.shape[:-2]
    t = a.reshape(*batch, n, m, n, m)
    t = np.swapaxes(t, -4, -2)
    return t.reshape(*batch, n * m, n * m)


def gram_purity(a: np.ndarray, norm: float) -> np.ndarray:
    """tr[(A A^dag / norm)^2] along the last two axes, using the smaller Gram matrix."""
    if a.shape[-2] <= a.shape[-1]:
        g = a @ np.swapaxes(a, -1, -2).conj()
    else:
        g = np.swapaxes(a, -1, -2).conj() @ a
    return np.sum(np.abs(g) ** 2, axis=(-2, -1)) / norm**2


def apply_local(w: np.ndarray, ua: np.ndarray, ub: np.ndarray) -> np.ndarray:
    """(u_A (x) u_B) @ W without forming the Kronecker product; batched over leading axes."""
    n, m = ua.shape[-1], ub.shape[-1]
    batch = w.shape[:-2]
    cols = w.shape[-1]
    t = w.reshape(*batch, n, m, cols)
    t = np.einsum("...ai,...imk->...amk", ua, t)
    t = np.einsum("...bj,...ajk->...abk", ub, t)
    return t.reshape(*batch, n * m, cols)


# -- operations on BipartiteOperator -----------------------------------------

def reshuffle(op: BipartiteOperator) -> np.ndarray:
    """Realignment U^R, an n^2 x m^2 matrix."""
    return reshuffle_array(op.mat, op.n, op.m)


def partial_transpose(op: BipartiteOperator) -> BipartiteOperator:
    return BipartiteOperator(op.dims, partial_transpose_array(op.mat, op.n, op.m))


def swap_operator(n: int) -> BipartiteOperator:
    """SWAP on C^n (x) C^n as a permutation matrix."""
    if n < 2:
        raise ValueError("swap needs n >= 2")
    d = n * n
    perm = np.array([(a % n) * n + a // n for a in range(d)])
    s = np.zeros((d, d), dtype=complex)
    s[perm, np.arange(d)] = 1.0
    return BipartiteOperator(Dims(n, n), s)


def local_product(ua, ub) -> BipartiteOperator:
    ua, ub = np.asarray(ua, dtype=complex), np.asarray(ub, dtype=complex)
    return BipartiteOperator(Dims(ua.shape[0], ub.shape[0]), np.kron(ua, ub))


@dataclass(frozen=True)
class SchmidtSpectrum:
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def tolist(self):
        return self.values.tolist()


def schmidt_spectrum(op: BipartiteOperator) -> SchmidtSpectrum:
    """Squared singular values of U^R, descending, zero-padded to length n^2."""
    sv = np.linalg.svd(reshuffle(op), compute_uv=False)
    lam = sv**2
    out = np.zeros(op.n**2)
    out[: lam.size] = np.sort(lam)[::-1]
    return SchmidtSpectrum(out)


def density_R(op: BipartiteOperator) -> np.ndarray:
    """rho_R = U^R U^R^dag / (n m), order n^2."""
    r = reshuffle(op)
    return r @ r.conj().T / op.dims.total


def density_T(op: BipartiteOperator) -> np.ndarray:
    """rho_T = U^TA U^TA^dag / (n m), order n m."""
    t = partial_transpose_array(op.mat, op.n, op.m)
    return t @ t.conj().T / op.dims.total


# -- Haar sampling ------------------------------------------------------------

def haar_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitaries of order d via QR of a complex Ginibre matrix.

    The phases of diag(R) are absorbed into Q so the result is exactly Haar.
    With ``size`` given, returns a stack of shape (size, d, d).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    shape = (d, d) if size is None else (size, d, d)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    ph = diag / np.abs(diag)
    return q * ph[..., None, :]


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream keyed by (seed, *key); the key is a spawn path, not added entropy."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))
