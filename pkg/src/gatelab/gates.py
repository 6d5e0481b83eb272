"""Named gate families, two-qubit Cartan formulas and the gate-spec mini-language."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bipartite import BipartiteOperator, Dims, haar_unitary, make_rng, swap_operator

_X = np.array([[0, 1], [1, 0]], dtype=complex)


# -- two-qubit canonical form ----------------------------------------------------

@dataclass(frozen=True)
class CartanCoords:
    c1: float
    c2: float
    c3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=float)


def cartan_gate(c: CartanCoords) -> BipartiteOperator:
    """exp[-i(c1 XX + c2 YY + c3 ZZ)/2] written out in the computational basis."""
    cp, cm = math.cos((c.c1 + c.c2) / 2), math.cos((c.c1 - c.c2) / 2)
    sp, sm = math.sin((c.c1 + c.c2) / 2), math.sin((c.c1 - c.c2) / 2)
    a, b = np.exp(-0.5j * c.c3), np.exp(0.5j * c.c3)
    u = np.array([
        [a * cm, 0, 0, -1j * a * sm],
        [0, b * cp, -1j * b * sp, 0],
        [0, -1j * b * sp, b * cp, 0],
        [-1j * a * sm, 0, 0, a * cm],
    ], dtype=complex)
    return BipartiteOperator(Dims(2, 2), u)


def cartan_ep_gt(c: CartanCoords) -> tuple[float, float]:
    s2 = np.sin(c.as_array()) ** 2
    co2 = 1.0 - s2
    ep = (2 / 3) * (s2[0] * co2[1] + s2[1] * co2[2] + s2[2] * co2[0])
    gt = s2.sum() / 3
    return float(ep), float(gt)


def local_invariants_G(c: CartanCoords) -> tuple[complex, float]:
    x = c.as_array()
    g1 = (np.prod(np.cos(x) ** 2) - np.prod(np.sin(x) ** 2)
          + 0.25j * np.prod(np.sin(2 * x)))
    g2 = float(np.sum(np.cos(2 * x)))
    return complex(g1), g2


def entanglement_from_G(g1: complex, g2: float) -> tuple[float, float]:
    """(E(U), E(US)) of a two-qubit gate from its invariants G1, G2."""
    return 1 - (3 + 2 * abs(g1) + g2) / 8, 1 - (3 + 2 * abs(g1) - g2) / 8


# Half Weyl chamber: identity, CNOT, DCNOT and SWAP classes at its corners.
WEYL_VERTICES = {
    "I": (0.0, 0.0, 0.0),
    "CNOT": (math.pi / 2, 0.0, 0.0),
    "DCNOT": (math.pi / 2, math.pi / 2, 0.0),
    "SWAP": (math.pi / 2, math.pi / 2, math.pi / 2),
}


@dataclass(frozen=True)
class WeylEdge:
    name: str
    start: str
    end: str
    boundary: bool
    residual: Callable[[float, float], float]  # zero along the edge's image in (ep, gt)

    def point(self, s: float) -> CartanCoords:
        a = np.array(WEYL_VERTICES[self.start])
        b = np.array(WEYL_VERTICES[self.end])
        return CartanCoords(*(a + s * (b - a)))


WEYL_EDGES = (
    WeylEdge("bottom line", "I", "CNOT", True, lambda ep, gt: gt - ep / 2),
    WeylEdge("right line", "CNOT", "DCNOT", True, lambda ep, gt: ep - 2 / 3),
    WeylEdge("top line", "DCNOT", "SWAP", True, lambda ep, gt: ep + 2 * gt - 2),
    WeylEdge("parabola", "I", "SWAP", True, lambda ep, gt: ep - 2 * gt * (1 - gt)),
    WeylEdge("I-DCNOT diagonal", "I", "DCNOT", False,
             lambda ep, gt: ep - (2 * gt - 1.5 * gt**2)),
    WeylEdge("CNOT-SWAP diagonal", "CNOT", "SWAP", False,
             lambda ep, gt: ep - (2 / 3) * (1 - (3 * gt - 1) ** 2 / 4)),
)


def boundary_curves(points: int = 101) -> dict[str, np.ndarray]:
    """Sampled (ep, gt) of the four boundary pieces of the two-qubit region."""
    g = np.linspace(0, 1, points)
    return {
        "parabola": np.column_stack([2 * g * (1 - g), g]),
        "bottom line": np.column_stack([np.linspace(0, 2 / 3, points), np.linspace(0, 1 / 3, points)]),
        "right line": np.column_stack([np.full(points, 2 / 3), np.linspace(1 / 3, 2 / 3, points)]),
        "top line": np.column_stack([np.linspace(2 / 3, 0, points), np.linspace(2 / 3, 1, points)]),
    }


# -- named gates -------------------------------------------------------------------

def identity_gate(dims: Dims) -> BipartiteOperator:
    return BipartiteOperator(dims, np.eye(dims.total))


def cnot_gate() -> BipartiteOperator:
    return controlled_add(2)


def dcnot_gate() -> BipartiteOperator:
    return cnot_gate() @ swap_operator(2)


def sqrt_cnot_gate() -> BipartiteOperator:
    sx = ((1 + 1j) * np.eye(2) + (1 - 1j) * _X) / 2
    u = np.kron(np.diag([1, 0]), np.eye(2)) + np.kron(np.diag([0, 1]), sx)
    return BipartiteOperator(Dims(2, 2), u)


def sqrt_swap_gate(n: int = 2) -> BipartiteOperator:
    s = swap_operator(n).mat
    return BipartiteOperator(Dims(n, n), ((1 + 1j) * np.eye(n * n) + (1 - 1j) * s) / 2)


def fractional_swap(t: float, n: int = 2) -> BipartiteOperator:
    """exp(itS) = cos t + i sin t S, a fractional power of SWAP up to phase."""
    s = swap_operator(n).mat
    return BipartiteOperator(Dims(n, n), math.cos(t) * np.eye(n * n) + 1j * math.sin(t) * s)


def fractional_swap_ep_gt(t: float) -> tuple[float, float]:
    return 0.5 * math.sin(2 * t) ** 2, math.sin(t) ** 2


def cs_alpha(alpha: float) -> BipartiteOperator:
    """CNOT times SWAP**alpha; alpha=0 gives CNOT and alpha=1 gives DCNOT exactly."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    u = fractional_swap(math.pi * alpha / 2, 2).mat * np.exp(-0.5j * math.pi * alpha)
    return cnot_gate() @ BipartiteOperator(Dims(2, 2), u)


def cs_alpha_closed_form(alpha: float) -> tuple[float, float, float]:
    """(E, e_p, g_t) of CNOT * SWAP**alpha."""
    return (5 - math.cos(math.pi * alpha)) / 8, 2 / 3, 0.5 - math.cos(math.pi * alpha) / 6


def fourier_gate(n: int) -> BipartiteOperator:
    """DFT of order n**2 read as an n x n bipartite operator."""
    if n < 2:
        raise ValueError("fourier gate needs n >= 2")
    d = n * n
    k = np.arange(d)
    return BipartiteOperator(Dims(n, n), np.exp(2j * np.pi * np.outer(k, k) / d) / n)


def fourier_swapped_entanglement(n: int) -> float:
    """Closed-form E(F S) for the Fourier gate of order n**2."""
    k = np.arange(1, n)
    terms = k * np.sin(k * np.pi / n) ** 2 / np.sin(np.pi / n - k * np.pi / n**2) ** 2
    return 1 - (n**3 + 2 * terms.sum()) / n**4


def controlled_add(n: int) -> BipartiteOperator:
    """|i, j> -> |i, i + j mod n>."""
    d = n * n
    u = np.zeros((d, d), dtype=complex)
    for i in range(n):
        for j in range(n):
            u[i * n + (i + j) % n, i * n + j] = 1
    return BipartiteOperator(Dims(n, n), u)


def perm_p9() -> BipartiteOperator:
    """Two-qutrit permutation |i, j> -> |i + j, i + 2j> (mod 3)."""
    u = np.zeros((9, 9), dtype=complex)
    for i in range(3):
        for j in range(3):
            u[3 * ((i + j) % 3) + (i + 2 * j) % 3, 3 * i + j] = 1
    return BipartiteOperator(Dims(3, 3), u)


def controlled_unitary(n: int, rank: int, u_b) -> BipartiteOperator:
    """P_1 (x) 1 + P_2 (x) u_B with P_1 the projector on the first ``rank`` basis states."""
    if not 1 <= rank <= n - 1:
        raise ValueError(f"rank must lie in [1, {n - 1}], got {rank}")
    u_b = np.asarray(u_b, dtype=complex)
    if u_b.shape != (n, n):
        raise ValueError(f"u_B must be {n}x{n}, got {u_b.shape}")
    p1 = np.diag([1.0] * rank + [0.0] * (n - rank))
    return BipartiteOperator(Dims(n, n), np.kron(p1, np.eye(n)) + np.kron(np.eye(n) - p1, u_b))


def controlled_unitary_x1(n: int, rank: int, tr_ub: complex) -> float:
    """tr rho_R^2 of a controlled unitary; reduces to 1/2 + |tr u_B|^2/(2n^2) at rank n/2."""
    r = rank
    return (n * n * (r * r + (n - r) ** 2) + 2 * abs(tr_ub) ** 2 * r * (n - r)) / n**4


def diagonal_interaction(dims: Dims, eps: float, rng: np.random.Generator) -> BipartiteOperator:
    """Diagonal gate with phases exp(2 pi i eps xi), xi uniform on [-1/2, 1/2)."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    xi = rng.uniform(-0.5, 0.5, dims.total)
    return BipartiteOperator(dims, np.diag(np.exp(2j * np.pi * eps * xi)))


def diagonal_mean_ep(dims: Dims, eps: float) -> float:
    """Exact ensemble mean of e_p over diagonal gates of strength eps.

    Each off-diagonal block entry of the reshaped phase matrix has mean
    modulus-square M + M(M-1) sinc^4(pi eps), which fixes tr(U^R U^R^dag)^2.
    """
    n, m = dims.n, dims.m
    s4 = np.sinc(eps) ** 4
    return n * (m - 1) * (1 - s4) / (m * (n + 1))


def diagonal_ep_small_eps(dims: Dims, eps: float) -> float:
    """First-order estimate n eps^2 / (n + 1) built from (U^R U^R^dag)_jk ~ M(1 +- i eps)."""
    return dims.n * eps**2 / (dims.n + 1)


def diagonal_ep_sinc(eps: float) -> float:
    """Large-dimension estimate 2 pi^2 eps^2 / 3 from tr(AA^dag)^2 ~ N^2 M^2 sinc^4(pi eps)."""
    return 2 * np.pi**2 * eps**2 / 3


def perturbation_ensemble(base: BipartiteOperator, eps: float, trials: int,
                          rng: np.random.Generator) -> list[BipartiteOperator]:
    """Samples base @ W diag(exp(i eps xi)) W^dag with W Haar and xi uniform on [-pi, pi)."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    d = base.dims.total
    out = []
    for _ in range(trials):
        w = haar_unitary(d, rng)
        ph = np.exp(1j * eps * rng.uniform(-np.pi, np.pi, d))
        v = (w * ph) @ w.conj().T
        out.append(BipartiteOperator(base.dims, base.mat @ v))
    return out


def haar_gate(dims: Dims, rng: np.random.Generator) -> BipartiteOperator:
    return BipartiteOperator(dims, haar_unitary(dims.total, rng))


# -- gate-spec mini-language ----------------------------------------------------------

class GateSpecError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownFamilyError(GateSpecError):
    pass


class MalformedParameterError(GateSpecError):
    pass


class OutOfRangeError(GateSpecError):
    pass


# family -> ordered allowed keys; order is the canonical rendering order
FAMILY_KEYS: dict[str, tuple[str, ...]] = {
    "id": ("n", "dims"),
    "cnot": (),
    "dcnot": (),
    "swap": ("n",),
    "sqrtswap": ("n",),
    "fswap": ("t", "n"),
    "csalpha": ("alpha",),
    "fourier": ("n",),
    "cadd": ("n",),
    "diag": ("eps", "dims", "seed"),
    "ctrlu": ("n", "rank", "seed"),
    "cartan": ("c1", "c2", "c3"),
    "p9": (),
    "haar": ("n", "dims", "seed"),
    "file": ("path",),
}
REQUIRED_KEYS = {
    "fswap": ("t",),
    "csalpha": ("alpha",),
    "diag": ("eps",),
    "cartan": ("c1", "c2", "c3"),
    "file": ("path",),
}
# B-gate: withheld, since its tabulated g_t conflicts with its standard Cartan point.
WITHHELD = {"b"}


def _parse_int(v: str) -> int:
    return int(v)


def _parse_float(v: str) -> float:
    x = float(v)
    if not math.isfinite(x):
        raise ValueError("not finite")
    return x


def _parse_dims(v: str) -> Dims:
    parts = v.split("x")
    if len(parts) != 2:
        raise ValueError("expected NxM")
    return Dims(int(parts[0]), int(parts[1]))


KEY_PARSERS = {
    "n": _parse_int, "rank": _parse_int, "seed": _parse_int,
    "t": _parse_float, "alpha": _parse_float, "eps": _parse_float,
    "c1": _parse_float, "c2": _parse_float, "c3": _parse_float,
    "dims": _parse_dims, "path": str,
}


@dataclass(frozen=True)
class GateSpec:
    family: str
    params: dict = field(default_factory=dict)

    @property
    def dims(self) -> Dims:
        p = self.params
        if "dims" in p:
            return p["dims"]
        if self.family in ("cnot", "dcnot", "csalpha", "cartan"):
            return Dims(2, 2)
        if self.family == "p9":
            return Dims(3, 3)
        if self.family == "file":
            raise ValueError("dims of a file gate are only known after loading")
        n = p.get("n", 2)
        return Dims(n, n)

    @property
    def random(self) -> bool:
        return self.family in ("diag", "ctrlu", "haar")

    def with_seed(self, seed: int) -> "GateSpec":
        if not self.random or "seed" in self.params:
            return self
        return GateSpec(self.family, {**self.params, "seed": seed})


def _byte_offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


def _check_range(family: str, params: dict, offsets: dict, text: str) -> None:
    def bad(key, why):
        raise OutOfRangeError(f"{family}: {key}={params[key]!r} {why}",
                              _byte_offset(text, offsets[key]))

    if "n" in params and params["n"] < 2:
        bad("n", "must be >= 2")
    if "dims" in params and "n" in params:
        bad("dims", "conflicts with n")
    for key in ("eps", "alpha"):
        if key in params and not 0.0 <= params[key] <= 1.0:
            bad(key, "must lie in [0, 1]")
    if "seed" in params and params["seed"] < 0:
        bad("seed", "must be non-negative")
    if "rank" in params:
        n = params.get("n", 2)
        if not 1 <= params["rank"] <= n - 1:
            bad("rank", f"must lie in [1, {n - 1}]")
    if family == "diag" and "dims" not in params:
        params["dims"] = Dims(2, 2)


def parse_gate_spec(text: str) -> GateSpec:
    """Parse ``name`` or ``name:key=value(,key=value)*``.

    ``file:<path>`` is accepted as shorthand for ``file:path=<path>``.
    """
    name, sep, rest = text.partition(":")
    name = name.strip()
    if name in WITHHELD:
        raise UnknownFamilyError(f"gate family {name!r} is not available", 0)
    if name not in FAMILY_KEYS:
        raise UnknownFamilyError(
            f"unknown gate family {name!r}, expected one of {', '.join(FAMILY_KEYS)}", 0)
    allowed = FAMILY_KEYS[name]
    params: dict = {}
    offsets: dict = {}
    start = len(name) + 1
    if sep and not rest:
        raise MalformedParameterError("expected key=value after ':'", _byte_offset(text, start))
    if name == "file" and rest and "=" not in rest:
        rest = "path=" + rest
        start -= len("path=")
    pos = start
    for item in rest.split(",") if rest else []:
        key, eq, value = item.partition("=")
        if not eq or not key:
            raise MalformedParameterError(f"expected key=value, got {item!r}",
                                          _byte_offset(text, max(pos, 0)))
        if key not in allowed:
            exp = ", ".join(allowed) if allowed else "no parameters"
            raise MalformedParameterError(f"{name}: unexpected key {key!r}, expected {exp}",
                                          _byte_offset(text, max(pos, 0)))
        if key in params:
            raise MalformedParameterError(f"duplicate key {key!r}", _byte_offset(text, max(pos, 0)))
        vpos = pos + len(key) + 1
        try:
            params[key] = KEY_PARSERS[key](value)
        except ValueError as exc:
            raise MalformedParameterError(f"{name}: bad value for {key}: {value!r} ({exc})",
                                          _byte_offset(text, max(vpos, 0))) from None
        offsets[key] = max(vpos, 0)
        pos += len(item) + 1
    for key in REQUIRED_KEYS.get(name, ()):
        if key not in params:
            raise MalformedParameterError(f"{name}: missing required key {key!r}",
                                          _byte_offset(text, len(text)))
    _check_range(name, params, offsets, text)
    return GateSpec(name, params)


def _render_value(v) -> str:
    if isinstance(v, Dims):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_gate_spec(spec: GateSpec) -> str:
    keys = [k for k in FAMILY_KEYS[spec.family] if k in spec.params]
    if not keys:
        return spec.family
    return spec.family + ":" + ",".join(f"{k}={_render_value(spec.params[k])}" for k in keys)


GATE_SEED_KEY = 0x6A7E  # spawn key reserved for gate realizations drawn from a master seed


def build_gate(spec: GateSpec, seed: int | None = None) -> BipartiteOperator:
    """Materialize a spec; random families use their own seed, else ``seed``."""
    from .io import load_matrix

    p = spec.params
    f = spec.family
    if f == "file":
        return load_matrix(p["path"])
    if spec.random:
        s = p.get("seed", seed)
        if s is None:
            raise ValueError(f"gate family {f!r} needs a seed")
        rng = make_rng(int(s), GATE_SEED_KEY)
    dims = spec.dims
    if f == "id":
        return identity_gate(dims)
    if f == "cnot":
        return cnot_gate()
    if f == "dcnot":
        return dcnot_gate()
    if f == "swap":
        return swap_operator(dims.n)
    if f == "sqrtswap":
        return sqrt_swap_gate(dims.n)
    if f == "fswap":
        return fractional_swap(p["t"], dims.n)
    if f == "csalpha":
        return cs_alpha(p["alpha"])
    if f == "fourier":
        return fourier_gate(dims.n)
    if f == "cadd":
        return controlled_add(dims.n)
    if f == "p9":
        return perm_p9()
    if f == "cartan":
        return cartan_gate(CartanCoords(p["c1"], p["c2"], p["c3"]))
    if f == "diag":
        return diagonal_interaction(dims, p["eps"], rng)
    if f == "ctrlu":
        n = dims.n
        return controlled_unitary(n, p.get("rank", n // 2), haar_unitary(n, rng))
    if f == "haar":
        return haar_gate(dims, rng)
    raise AssertionError(f)
