"""Circuit generators: the textbook two-latch example, random netlists, scalable families."""
from __future__ import annotations

import random
from typing import List, Optional

from .netlist import Gate, Latch, Network, parse_blif_lite

__all__ = ["TWO_LATCH_BLIF", "two_latch", "random_network", "shift_family", "random_cover"]

TWO_LATCH_BLIF = """\
# two latches, one input, one output; init (00)
.model two_latch
.inputs i
.outputs o
.latch n1 cs_1 0
.latch n2 cs_2 0
.names i cs_2 n1
11 1
.names i cs_1 n2
0- 1
-1 1
.names cs_1 cs_2 o
10 1
01 1
.end
"""


def two_latch() -> Network:
    return parse_blif_lite(TWO_LATCH_BLIF)


_TWO_INPUT = {
    "and": ("11",), "or": ("1-", "-1"), "xor": ("10", "01"),
    "nand": ("0-", "-0"), "nor": ("00",), "xnor": ("00", "11"),
    "andn": ("10",), "orn": ("1-", "-0"),
}


def random_cover(rng: random.Random, k: int) -> tuple:
    """Random nonconstant-ish single-phase cover over ``k`` inputs."""
    if k == 2 and rng.random() < 0.7:
        return _TWO_INPUT[rng.choice(sorted(_TWO_INPUT))]
    rows = set()
    for _ in range(rng.randint(1, max(1, k))):
        rows.add("".join(rng.choice("01-") for _ in range(k)))
    return tuple(sorted(rows))


def random_network(rng: random.Random, n_inputs: int, n_outputs: int, n_latches: int,
                   n_gates: Optional[int] = None, name: str = "rnd") -> Network:
    """Random sequential netlist with two-or-three-input gates over earlier signals."""
    if n_gates is None:
        n_gates = n_latches + n_outputs + rng.randint(1, 3)
    inputs = [f"i{k}" for k in range(n_inputs)]
    states = [f"l{k}" for k in range(n_latches)]
    signals = inputs + states
    gates: List[Gate] = []
    for g in range(n_gates):
        k = min(len(signals), rng.choice((1, 2, 2, 2, 3)))
        ins = tuple(rng.sample(signals, k))
        if k == 1:
            rows, phase = ("1",), rng.choice((0, 1))
        else:
            rows, phase = random_cover(rng, k), 1
        out = f"g{g}"
        gates.append(Gate(out, ins, rows, phase))
        signals.append(out)
    pool = [s for s in signals if s not in inputs] or signals
    latches = [Latch(rng.choice(pool[len(states):] or pool), s, rng.randint(0, 1)) for s in states]
    outputs = rng.sample(pool[len(states):] or pool, min(n_outputs, len(pool)))
    return Network(name, inputs, outputs, latches, gates).validate()


def shift_family(n: int, name: Optional[str] = None) -> Network:
    """Input-fed shift register of ``n`` latches with a parity-style output.

    Every latch valuation is reachable, so the specification has 2^n states,
    while the unknown (the last stage) only observes the previous stage.
    """
    if n < 2:
        raise ValueError("need at least two latches")
    lines = [f".model {name or f'shift{n}'}", ".inputs a", ".outputs o"]
    lines.append(".latch a r0 0")
    for k in range(1, n):
        lines.append(f".latch r{k - 1} r{k} 0")
    lines += [f".names r0 r{n - 1} o", "10 1", "01 1", ".end"]
    return parse_blif_lite("\n".join(lines) + "\n")
