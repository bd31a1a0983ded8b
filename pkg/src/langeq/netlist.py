"""Sequential networks: BLIF-lite parsing, symbolic elaboration, latch splitting."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .dd import Func, Manager
from .errors import FormatError, UsageError

__all__ = [
    "Gate", "Latch", "Network", "PartitionedMachine", "SplitResult",
    "parse_blif_lite", "elaborate", "latch_split", "parse_split_spec", "next_name",
]


@dataclass(frozen=True)
class Gate:
    """Single-output logic node given by a cover over its inputs.

    ``phase`` is 1 when the rows list the on-set, 0 when they list the off-set
    (the function is then the complement of the cover).
    """

    output: str
    inputs: Tuple[str, ...]
    rows: Tuple[str, ...]
    phase: int = 1

    def evaluate(self, values: Mapping[str, int]) -> int:
        bits = [values[s] for s in self.inputs]
        hit = 0
        for row in self.rows:
            if all(c == "-" or int(c) == b for c, b in zip(row, bits)):
                hit = 1
                break
        return hit if self.phase else 1 - hit


@dataclass(frozen=True)
class Latch:
    data_in: str
    state: str
    init: int = 0


@dataclass
class Network:
    name: str
    inputs: List[str]
    outputs: List[str]
    latches: List[Latch]
    gates: List[Gate]

    def __post_init__(self):
        self._order: Optional[List[Gate]] = None

    @property
    def latch_states(self) -> List[str]:
        return [l.state for l in self.latches]

    def drivers(self) -> Dict[str, object]:
        d: Dict[str, object] = {}
        for s in self.inputs:
            d[s] = "input"
        for l in self.latches:
            d[l.state] = l
        for g in self.gates:
            d[g.output] = g
        return d

    def validate(self, lines: Optional[Mapping[str, List[int]]] = None) -> "Network":
        """Check definitions and acyclicity; ``lines`` maps signals to their source lines."""
        lines = lines or {}

        def at(s, k=0):
            found = lines.get(s)
            return found[k] if found else None

        seen = set()
        for s in list(self.inputs) + [l.state for l in self.latches] + [g.output for g in self.gates]:
            if s in seen:
                raise FormatError(f"signal {s!r} defined more than once", at(s, -1))
            seen.add(s)
        for l in self.latches:
            if l.init not in (0, 1):
                raise FormatError(f"latch {l.state!r} has init {l.init!r}", at(l.state))
            if l.data_in not in seen:
                raise FormatError(f"latch input {l.data_in!r} is undefined", at(l.state))
        for g in self.gates:
            for s in g.inputs:
                if s not in seen:
                    raise FormatError(f"gate {g.output!r} reads undefined signal {s!r}", at(g.output))
        for s in self.outputs:
            if s not in seen:
                raise FormatError(f"output {s!r} is undefined", at("\0outputs"))
        self._order = None
        try:
            self.topological_gates()
        except FormatError as exc:
            raise FormatError(str(exc), at(getattr(exc, "signal", None))) from None
        return self

    def topological_gates(self) -> List[Gate]:
        """Gates in an order where every gate follows its gate fanins."""
        if self._order is not None:
            return self._order
        by_out = {g.output: g for g in self.gates}
        order: List[Gate] = []
        state: Dict[str, int] = {}  # 1 = on stack, 2 = done
        for root in by_out:
            if state.get(root):
                continue
            stack = [(root, 0)]
            while stack:
                s, k = stack.pop()
                g = by_out[s]
                if k == 0:
                    if state.get(s) == 2:
                        continue
                    state[s] = 1
                if k < len(g.inputs):
                    stack.append((s, k + 1))
                    t = g.inputs[k]
                    if t in by_out:
                        if state.get(t) == 1:
                            err = FormatError(f"combinational cycle through {t!r}")
                            err.signal = t
                            raise err
                        if not state.get(t):
                            stack.append((t, 0))
                else:
                    state[s] = 2
                    order.append(g)
        self._order = order
        return order

    def simulate(self, inputs: Mapping[str, int], state: Mapping[str, int]) -> Tuple[Dict[str, int], Dict[str, int]]:
        """One clock cycle; returns (output values, next latch values)."""
        values = dict(inputs)
        values.update(state)
        for g in self.topological_gates():
            values[g.output] = g.evaluate(values)
        return ({o: values[o] for o in self.outputs},
                {l.state: values[l.data_in] for l in self.latches})

    @property
    def initial_state(self) -> Dict[str, int]:
        return {l.state: l.init for l in self.latches}

    def to_blif(self) -> str:
        lines = [f".model {self.name}", ".inputs " + " ".join(self.inputs),
                 ".outputs " + " ".join(self.outputs)]
        for l in self.latches:
            lines.append(f".latch {l.data_in} {l.state} {l.init}")
        for g in self.gates:
            lines.append(".names " + " ".join(g.inputs + (g.output,)))
            for row in g.rows:
                lines.append(f"{row} {g.phase}" if g.inputs else str(g.phase))
        lines.append(".end")
        return "\n".join(lines) + "\n"


def _logical_lines(text: str):
    """Yield (line number, tokens) with comments stripped and continuations joined."""
    buf: List[str] = []
    start = None
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if start is None:
            start = k
        if line.endswith("\\"):
            buf.append(line[:-1])
            continue
        buf.append(line)
        tokens = " ".join(buf).split()
        buf = []
        if tokens:
            yield start, tokens
        start = None
    if buf and " ".join(buf).split():
        yield start, " ".join(buf).split()


def parse_blif_lite(text: str) -> Network:
    """Parse the BLIF subset: .model .inputs .outputs .latch .names .end."""
    name = "top"
    inputs: List[str] = []
    outputs: List[str] = []
    latches: List[Latch] = []
    gates: List[Gate] = []
    current = None  # [output, inputs, rows, phase, line]
    where: Dict[str, List[int]] = {}  # definition lines of each signal

    def close():
        nonlocal current
        if current is not None:
            out, ins, rows, phase, _ = current
            gates.append(Gate(out, tuple(ins), tuple(rows), 1 if phase is None else phase))
            current = None

    ended = False
    for lineno, tokens in _logical_lines(text):
        head = tokens[0]
        if ended:
            raise FormatError("content after .end", lineno)
        if head.startswith("."):
            close()
            if head == ".model":
                if len(tokens) != 2:
                    raise FormatError(".model takes one name", lineno)
                name = tokens[1]
            elif head == ".inputs":
                inputs.extend(tokens[1:])
                for t in tokens[1:]:
                    where.setdefault(t, []).append(lineno)
            elif head == ".outputs":
                outputs.extend(tokens[1:])
                where.setdefault("\0outputs", []).append(lineno)
            elif head == ".latch":
                if len(tokens) not in (3, 4):
                    raise FormatError(".latch expects <data_in> <state> [init]", lineno)
                init = 0
                if len(tokens) == 4:
                    if tokens[3] not in ("0", "1"):
                        raise FormatError(f"latch init must be 0 or 1, got {tokens[3]!r}", lineno)
                    init = int(tokens[3])
                latches.append(Latch(tokens[1], tokens[2], init))
                where.setdefault(tokens[2], []).append(lineno)
            elif head == ".names":
                if len(tokens) < 2:
                    raise FormatError(".names needs an output", lineno)
                current = [tokens[-1], tokens[1:-1], [], None, lineno]
                where.setdefault(tokens[-1], []).append(lineno)
            elif head == ".end":
                ended = True
            else:
                raise FormatError(f"unknown directive {head!r}", lineno)
            continue
        if current is None:
            raise FormatError(f"cover row outside .names: {' '.join(tokens)!r}", lineno)
        ins = current[1]
        if ins:
            if len(tokens) != 2:
                raise FormatError("cover row must be '<cube> <bit>'", lineno)
            cube, bit = tokens
        else:
            if len(tokens) != 1:
                raise FormatError("constant gate row must be a single bit", lineno)
            cube, bit = "", tokens[0]
        if len(cube) != len(ins) or any(c not in "01-" for c in cube):
            raise FormatError(f"malformed cube {cube!r} for {len(ins)} inputs", lineno)
        if bit not in ("0", "1"):
            raise FormatError(f"cover output must be 0 or 1, got {bit!r}", lineno)
        if current[3] is not None and current[3] != int(bit):
            raise FormatError("cover mixes on-set and off-set rows", lineno)
        current[3] = int(bit)
        current[2].append(cube)
    close()
    net = Network(name, inputs, outputs, latches, gates)
    return net.validate(where)


def next_name(state: str) -> str:
    """Key under which the next-state variable of a latch is looked up in a var map."""
    return state + "'"


@dataclass
class PartitionedMachine:
    """Symbolic machine kept as separate next-state and output functions."""

    manager: Manager
    inputs: List[Tuple[str, int]]
    outputs: List[Tuple[str, Optional[int], Func]]
    latches: List[Tuple[str, int, int, Func, int]]  # (state, cs var, ns var, T_k, init)
    internal_outputs: List[Tuple[str, Optional[int], Func]] = field(default_factory=list)

    @property
    def input_vars(self) -> List[int]:
        return [v for _, v in self.inputs]

    @property
    def cs_vars(self) -> List[int]:
        return [l[1] for l in self.latches]

    @property
    def ns_vars(self) -> List[int]:
        return [l[2] for l in self.latches]

    @property
    def next_state(self) -> List[Func]:
        return [l[3] for l in self.latches]

    @property
    def output_vars(self) -> List[int]:
        return [v for _, v, _ in self.outputs]

    @property
    def internal_vars(self) -> List[int]:
        return [v for _, v, _ in self.internal_outputs]

    @property
    def init(self) -> Dict[int, int]:
        return {l[1]: l[4] for l in self.latches}

    def init_func(self) -> Func:
        return self.manager.cube(self.init)

    def ns_to_cs(self) -> Dict[int, int]:
        return {l[2]: l[1] for l in self.latches}

    def cs_to_ns(self) -> Dict[int, int]:
        return {l[1]: l[2] for l in self.latches}


def _cover_func(m: Manager, gate: Gate, fanins: Sequence[Func]) -> Func:
    acc = m.false
    for row in gate.rows:
        term = m.true
        for c, f in zip(row, fanins):
            if c == "1":
                term = term & f
            elif c == "0":
                term = term & ~f
        acc = acc | term
    return acc if gate.phase else ~acc


def elaborate(n: Network, m: Manager, var_map: Mapping[str, int],
              internal: Iterable[str] = (),
              output_vars: Optional[Mapping[str, int]] = None) -> PartitionedMachine:
    """Build next-state and output functions of ``n`` over the variables in ``var_map``.

    ``var_map`` must name every primary input and latch state, plus
    ``next_name(state)`` for each latch. Outputs get the label variable found in
    ``output_vars`` (default: ``var_map``), which relations need; outputs listed
    in ``internal`` are filed as internal outputs.
    """
    missing = [s for s in n.inputs + n.latch_states if s not in var_map]
    missing += [next_name(s) for s in n.latch_states if next_name(s) not in var_map]
    if missing:
        raise UsageError(f"var_map lacks {', '.join(missing)}")
    funcs: Dict[str, Func] = {}
    for s in n.inputs + n.latch_states:
        funcs[s] = m.var(var_map[s])
    for g in n.topological_gates():
        funcs[g.output] = _cover_func(m, g, [funcs[s] for s in g.inputs])
    internal = set(internal)
    outs, ints = [], []
    for o in n.outputs:
        entry = (o, (var_map if output_vars is None else output_vars).get(o), funcs[o])
        (ints if o in internal else outs).append(entry)
    latches = [(l.state, var_map[l.state], var_map[next_name(l.state)], funcs[l.data_in], l.init)
               for l in n.latches]
    return PartitionedMachine(m, [(s, var_map[s]) for s in n.inputs], outs, latches, ints)


@dataclass
class SplitResult:
    """Fixed component F and particular solution X_p of a latch split."""

    fixed: Network
    unknown: Network
    u_signals: List[str]
    v_signals: List[str]
    u_sources: Dict[str, str]
    v_sources: Dict[str, str]


def _cone(n: Network, roots: Iterable[str]) -> List[str]:
    by_out = {g.output: g for g in n.gates}
    seen = set()
    stack = [r for r in roots if r in by_out]
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        stack.extend(t for t in by_out[s].inputs if t in by_out)
    return [g.output for g in n.gates if g.output in seen]


def _leaves(n: Network, gate_names: Iterable[str], extra: Iterable[str]) -> set:
    by_out = {g.output: g for g in n.gates}
    used = set(extra)
    for s in gate_names:
        used.update(by_out[s].inputs)
    return used


def latch_split(n: Network, x_latches: Iterable[str]) -> SplitResult:
    """Move the latches ``x_latches`` (and their fanin logic) into a separate network.

    The unknown component X_p reads only the ``u_*`` wires and exposes its
    latch states as ``v_*`` wires; F keeps the other latches, all primary
    inputs and outputs, and forwards whatever X_p needs (including primary
    inputs) through buffers. Gates needed by both sides are duplicated.
    """
    x = list(dict.fromkeys(x_latches))
    states = n.latch_states
    unknown_names = [s for s in x if s not in states]
    if unknown_names:
        raise UsageError(f"no such latch: {', '.join(unknown_names)}")
    if not x or len(x) == len(states):
        raise UsageError("split must select a nonempty proper subset of the latches")
    xset = set(x)
    x_l = [l for l in n.latches if l.state in xset]
    f_l = [l for l in n.latches if l.state not in xset]
    x_cone = _cone(n, [l.data_in for l in x_l])
    f_cone = _cone(n, [l.data_in for l in f_l] + list(n.outputs))
    f_sources = set(n.inputs) | {l.state for l in f_l}

    x_used = _leaves(n, x_cone, [l.data_in for l in x_l])
    f_used = _leaves(n, f_cone, [l.data_in for l in f_l] + list(n.outputs))
    u_src = [s for s in n.inputs + [l.state for l in f_l] if s in x_used]
    v_src = [l.state for l in x_l if l.state in f_used]

    taken = set(n.drivers()) | set(n.outputs)

    def wire(prefix, s):
        name, k = f"{prefix}_{s}", 0
        while name in taken:
            k += 1
            name = f"{prefix}{k}_{s}"
        taken.add(name)
        return name

    u_names = {s: wire("u", s) for s in u_src}
    v_names = {s: wire("v", s) for s in v_src}
    by_out = {g.output: g for g in n.gates}

    buf = lambda src, dst: Gate(dst, (src,), ("1",), 1)
    unknown = Network(
        f"{n.name}_xp",
        [u_names[s] for s in u_src],
        [v_names[s] for s in v_src],
        list(x_l),
        [buf(u_names[s], s) for s in u_src] + [by_out[s] for s in x_cone if s not in f_sources]
        + [buf(s, v_names[s]) for s in v_src],
    ).validate()
    fixed = Network(
        f"{n.name}_f",
        list(n.inputs) + [v_names[s] for s in v_src],
        list(n.outputs) + [u_names[s] for s in u_src],
        list(f_l),
        [buf(v_names[s], s) for s in v_src] + [by_out[s] for s in f_cone]
        + [buf(s, u_names[s]) for s in u_src],
    ).validate()
    return SplitResult(fixed, unknown, [u_names[s] for s in u_src], [v_names[s] for s in v_src],
                       {u_names[s]: s for s in u_src}, {v_names[s]: s for s in v_src})


def parse_split_spec(n: Network, spec: str) -> List[str]:
    """``k:N`` selects the first N latches; otherwise a comma-separated name list."""
    spec = spec.strip()
    if spec.startswith("k:"):
        try:
            k = int(spec[2:])
        except ValueError:
            raise FormatError(f"bad split spec {spec!r}") from None
        if not 0 < k < len(n.latches):
            raise UsageError(f"k:{k} is not a proper latch subset of {len(n.latches)} latches")
        return n.latch_states[:k]
    names = [s for s in spec.split(",") if s]
    missing = [s for s in names if s not in n.latch_states]
    if missing:
        raise UsageError(f"no such latch: {', '.join(missing)}")
    return names
