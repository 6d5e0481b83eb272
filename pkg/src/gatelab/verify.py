"""Desk-scale invariant checks behind ``gatelab verify``."""
from __future__ import annotations

import time

import numpy as np
from scipy.integrate import quad

from .bipartite import Dims, haar_unitary, local_product, make_rng, schmidt_spectrum, swap_operator
from .gates import (
    CartanCoords,
    WEYL_EDGES,
    cartan_ep_gt,
    cartan_gate,
    cnot_gate,
    cs_alpha,
    cs_alpha_closed_form,
    dcnot_gate,
    fourier_gate,
    fractional_swap,
    fractional_swap_ep_gt,
    parse_gate_spec,
    perm_p9,
    render_gate_spec,
    sqrt_cnot_gate,
    sqrt_swap_gate,
)
from .measures import (
    entangling_power,
    gate_measures,
    gate_typicality,
    haar_avg_ep,
    is_dual_unitary,
    is_two_unitary,
    mc_entangling_power_oracle,
    multiunitarity_conditions,
    parabola_residual,
)
from .spectra import mp_cdf, mp_pdf
from .thermalization import avg_ep_two_gate, evolve_operator, theory_ep

TABLE_I = {
    "local": (0, 3 / 4, 0, 0),
    "sqrt-cnot": (1 / 4, 3 / 4, 1 / 3, 1 / 6),
    "cnot": (1 / 2, 3 / 4, 2 / 3, 1 / 3),
    "dcnot": (3 / 4, 1 / 2, 2 / 3, 2 / 3),
    "fourier-4": (3 / 4, 1 / 4, 1 / 3, 5 / 6),
    "sqrt-swap": (9 / 16, 9 / 16, 1 / 2, 1 / 2),
    "swap": (3 / 4, 0, 0, 1),
}


def table_gates(rng=None):
    rng = rng or make_rng(0, 0)
    return {
        "local": local_product(haar_unitary(2, rng), haar_unitary(2, rng)),
        "sqrt-cnot": sqrt_cnot_gate(),
        "cnot": cnot_gate(),
        "dcnot": dcnot_gate(),
        "fourier-4": fourier_gate(2),
        "sqrt-swap": sqrt_swap_gate(2),
        "swap": swap_operator(2),
    }


def _table():
    worst = 0.0
    for name, op in table_gates().items():
        m = gate_measures(op)
        got = (m.E, m.E_swapped, m.ep, m.gt)
        worst = max(worst, max(abs(a - b) for a, b in zip(got, TABLE_I[name])))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def _multiunitary():
    p9 = perm_p9()
    dev = max(multiunitarity_conditions(p9))
    ep, gt = entangling_power(p9), gate_typicality(p9)
    f9 = fourier_gate(3)
    ok = dev < 1e-12 and abs(ep - 1) < 1e-10 and abs(gt - 0.5) < 1e-10
    ok = ok and is_dual_unitary(f9) and not is_two_unitary(f9)
    return ok, f"P9 deviation {dev:.1e}, (ep, gt) = ({ep:.12g}, {gt:.12g})"


def _closed_forms():
    rng = make_rng(0, 2)
    worst = 0.0
    for _ in range(20):
        c = CartanCoords(*rng.uniform(0, np.pi, 3))
        op = cartan_gate(c)
        worst = max(worst, *np.abs(np.subtract(cartan_ep_gt(c), (entangling_power(op), gate_typicality(op)))))
        t = rng.uniform(0, np.pi)
        op = fractional_swap(t, 2)
        worst = max(worst, *np.abs(np.subtract(fractional_swap_ep_gt(t), (entangling_power(op), gate_typicality(op)))))
        a = rng.uniform(0, 1)
        m = gate_measures(cs_alpha(a))
        worst = max(worst, *np.abs(np.subtract(cs_alpha_closed_form(a), (m.E, m.ep, m.gt))))
    return worst < 1e-10, f"max deviation {worst:.2e}"


def _weyl_edges():
    worst = 0.0
    for edge in WEYL_EDGES:
        for s in np.linspace(0, 1, 21):
            op = cartan_gate(edge.point(s))
            worst = max(worst, abs(edge.residual(entangling_power(op), gate_typicality(op))))
    return worst < 1e-9, f"max residual {worst:.2e}"


def _parabola():
    worst = max(abs(parabola_residual(fractional_swap(t, n)))
                for n in (2, 3, 4, 5) for t in np.linspace(0, np.pi, 13))
    return worst < 1e-10, f"max |f| {worst:.2e}"


def _schmidt():
    op = haar_unitary(9, make_rng(0, 3))
    from .bipartite import BipartiteOperator
    spec = schmidt_spectrum(BipartiteOperator(Dims(3, 3), op))
    ok = abs(spec.total - 9) < 1e-9 and np.all(spec.values >= -1e-12)
    return ok, f"sum of Schmidt weights {spec.total:.12g}"


def _spec_roundtrip():
    texts = ["cnot", "fswap:t=0.7854,n=3", "diag:eps=0.05,dims=2x3,seed=7",
             "cartan:c1=0.1,c2=0.2,c3=0.3", "ctrlu:n=8,rank=4,seed=1"]
    ok = all(render_gate_spec(parse_gate_spec(t)) == t for t in texts)
    return ok, f"{len(texts)} specs"


def _mp():
    total = quad(mp_pdf, 0, 4, limit=200)[0]
    ok = abs(total - 1) < 1e-10 and abs(mp_cdf(4) - 1) < 1e-15 and mp_pdf(4) == 0
    return ok, f"integral {total:.12g}"


def _theory():
    d = Dims(2, 3)
    bar = haar_avg_ep(d)
    ok = all(abs(theory_ep(n, bar, d) - bar) < 1e-15 for n in (1, 5, 50))
    ok = ok and abs(theory_ep(2, 2 / 3, Dims(2, 2)) - 16 / 27) < 1e-15
    return ok, "fixed point and two-step value"


def _determinism():
    op = parse_and_build("diag:eps=0.3,dims=2x3,seed=1")
    a = evolve_operator(op, 20, 600, seed=5, threads=1)
    b = evolve_operator(op, 20, 600, seed=5, threads=3)
    ok = np.array_equal(a.mean_ep, b.mean_ep) and np.array_equal(a.stderr_gt, b.stderr_gt)
    ok = ok and a.mean_ep[0] == a.gate_ep
    return ok, "1 vs 3 threads bitwise"


def _haar_averages():
    from .cli import scatter_points
    pts = scatter_points(Dims(2, 2), 4000, seed=11)
    ep, gt = pts.mean(axis=0)
    ok = abs(ep - 0.6) < 0.02 and abs(gt - 0.5) < 0.02
    return ok, f"mean (ep, gt) = ({ep:.4f}, {gt:.4f})"


def _two_gate():
    rng = make_rng(0, 4)
    d = Dims(2, 3)
    from .bipartite import BipartiteOperator
    u = BipartiteOperator(d, haar_unitary(6, rng))
    v = BipartiteOperator(d, haar_unitary(6, rng))
    mean, err, closed = avg_ep_two_gate(u, v, 4000, rng)
    return abs(mean - closed) < 4 * err, f"MC {mean:.4f} +- {err:.4f} vs {closed:.4f}"


def _oracle():
    rng = make_rng(0, 5)
    op = cnot_gate()
    mean, err = mc_entangling_power_oracle(op, 20000, rng)
    return abs(mean - 2 / 3) < 4 * err, f"MC {mean:.4f} +- {err:.4f} vs 2/3"


def parse_and_build(text):
    from .gates import build_gate
    return build_gate(parse_gate_spec(text))


QUICK = [
    ("table-I", _table), ("multiunitarity", _multiunitary), ("closed-forms", _closed_forms),
    ("weyl-edges", _weyl_edges), ("swap-parabola", _parabola), ("schmidt-sum", _schmidt),
    ("spec-roundtrip", _spec_roundtrip), ("mp-law", _mp), ("theory-curve", _theory),
    ("thread-determinism", _determinism),
]
FULL = [("haar-averages", _haar_averages), ("two-gate-average", _two_gate),
        ("state-average-oracle", _oracle)]


def run_checks(quick: bool = False) -> dict:
    results = []
    for name, fn in QUICK + ([] if quick else FULL):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"check": name, "passed": bool(ok), "detail": detail,
                        "seconds": round(time.perf_counter() - t0, 3)})
    return {"passed": all(r["passed"] for r in results), "checks": results}
