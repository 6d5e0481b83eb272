"""Print (E, E_swapped, e_p, g_t) for the named two-qubit gates as exact fractions."""
from fractions import Fraction

from gatelab.measures import gate_measures
from gatelab.verify import table_gates


def main():
    print(f"{'gate':<10} {'E':>6} {'E(US)':>6} {'e_p':>6} {'g_t':>6}")
    for name, op in table_gates().items():
        m = gate_measures(op)
        vals = [Fraction(v).limit_denominator(64) for v in (m.E, m.E_swapped, m.ep, m.gt)]
        print(f"{name:<10} " + " ".join(f"{str(v):>6}" for v in vals))


if __name__ == "__main__":
    main()
