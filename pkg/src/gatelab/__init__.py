"""Local-unitary invariants of bipartite gates and their thermalization under random locals."""
from .bipartite import (
    BipartiteOperator,
    Dims,
    NotUnitaryError,
    haar_unitary,
    make_rng,
    partial_transpose,
    reshuffle,
    schmidt_spectrum,
    swap_operator,
)
from .gates import GateSpec, build_gate, parse_gate_spec, render_gate_spec
from .measures import (
    entangling_power,
    gate_measures,
    gate_typicality,
    haar_avg_ep,
    haar_avg_gt,
    linear_entanglement,
    linear_entanglement_swapped,
    purity_pair,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteOperator", "Dims", "NotUnitaryError", "haar_unitary", "make_rng",
    "partial_transpose", "reshuffle", "schmidt_spectrum", "swap_operator",
    "GateSpec", "build_gate", "parse_gate_spec", "render_gate_spec",
    "entangling_power", "gate_measures", "gate_typicality", "haar_avg_ep", "haar_avg_gt",
    "linear_entanglement", "linear_entanglement_swapped", "purity_pair",
]
