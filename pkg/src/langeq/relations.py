"""Image computation, reachability and relations over partitioned machines."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .dd import Func
from .errors import UsageError
from .netlist import PartitionedMachine

__all__ = [
    "Schedule", "make_schedule", "image", "reachable", "build_monolithic",
    "transition_parts", "output_parts", "conformance", "nonconformance",
    "undefined_labels",
]


@dataclass(frozen=True)
class Schedule:
    """Linear conjunction order with the variables to quantify after each step.

    ``steps[k] = (partition index, vars)``: conjoin that partition, then
    quantify ``vars``. Variables occurring in no partition are quantified at
    the first step.
    """

    steps: Tuple[Tuple[int, Tuple[int, ...]], ...]
    quantify: Tuple[int, ...]

    def is_valid(self, supports: Sequence[Iterable[int]]) -> bool:
        sup = [set(s) for s in supports]
        order = [k for k, _ in self.steps]
        if sorted(order) != list(range(len(sup))):
            return False
        done = set()
        for pos, (k, vs) in enumerate(self.steps):
            later = set().union(*[sup[j] for j, _ in self.steps[pos + 1:]]) if pos + 1 < len(self.steps) else set()
            if set(vs) & later or set(vs) & done:
                return False
            done |= set(vs)
        return done == set(self.quantify) or not self.steps


def make_schedule(parts: Sequence[Func], quantify: Iterable[int]) -> Schedule:
    """Greedy schedule: smallest support first, quantify as early as possible."""
    quantify = tuple(sorted(set(quantify)))
    supports = [set(p.support()) for p in parts]
    order = sorted(range(len(parts)), key=lambda k: (len(supports[k]), k))
    last = {}
    for pos, k in enumerate(order):
        for v in supports[k]:
            last[v] = pos
    buckets: List[List[int]] = [[] for _ in order]
    for v in quantify:
        if order:
            buckets[last.get(v, 0)].append(v)
    return Schedule(tuple((k, tuple(b)) for k, b in zip(order, buckets)), quantify)


def image(parts: Sequence[Func], zeta: Func, quantify: Iterable[int],
          sched: Optional[Schedule] = None) -> Func:
    """``exists(quantify, zeta & prod(parts))`` by scheduled relational products."""
    m = zeta.manager
    quantify = tuple(sorted(set(quantify)))
    if zeta.is_false:
        return m.false
    if not parts:
        return m.exists(zeta, quantify)
    if sched is None:
        sched = make_schedule(parts, quantify)
    acc = zeta
    for k, vs in sched.steps:
        acc = m.and_exists(acc, parts[k], vs)
        if acc.is_false:
            return acc
    return acc


def transition_parts(pm: PartitionedMachine) -> List[Func]:
    """The partition ``[ns_k == T_k(i, cs)]``."""
    m = pm.manager
    return [m.var(ns).iff(t) for _, _, ns, t, _ in pm.latches]


def output_parts(pm: PartitionedMachine, internal: bool = True) -> List[Func]:
    """``[o_j == O_j(i, cs)]`` (and ``[u_j == U_j]`` when ``internal``)."""
    m = pm.manager
    entries = list(pm.outputs) + (list(pm.internal_outputs) if internal else [])
    for name, v, _ in entries:
        if v is None:
            raise UsageError(f"output {name!r} has no label variable")
    return [m.var(v).iff(f) for _, v, f in entries]


def reachable(pm: PartitionedMachine, init: Optional[Func] = None) -> Func:
    """Least fixed point of the image from the initial state, over cs variables."""
    m = pm.manager
    parts = transition_parts(pm)
    quantify = list(pm.input_vars) + list(pm.cs_vars)
    sched = make_schedule(parts, quantify)
    back = pm.ns_to_cs()
    reached = pm.init_func() if init is None else init
    frontier = reached
    while not frontier.is_false:
        img = m.rename(image(parts, frontier, quantify, sched), back)
        frontier = img & ~reached
        reached = reached | frontier
    return reached


@dataclass
class MonolithicRelation:
    to: Func
    label_vars: Tuple[int, ...]
    cs_vars: Tuple[int, ...]
    ns_vars: Tuple[int, ...]


def build_monolithic(pm: PartitionedMachine) -> MonolithicRelation:
    """Conjoin every partition into the single relation TO(labels, cs, ns)."""
    m = pm.manager
    to = m.conjoin(transition_parts(pm) + output_parts(pm))
    labels = tuple(pm.input_vars) + tuple(pm.output_vars) + tuple(pm.internal_vars)
    return MonolithicRelation(to, labels, tuple(pm.cs_vars), tuple(pm.ns_vars))


def _paired_outputs(f: PartitionedMachine, s: PartitionedMachine):
    fo = {name: fn for name, _, fn in f.outputs}
    so = {name: fn for name, _, fn in s.outputs}
    if set(fo) != set(so):
        raise UsageError(f"output names differ: {sorted(fo)} vs {sorted(so)}")
    return [(name, fo[name], so[name]) for name, _, _ in s.outputs]


def nonconformance(f: PartitionedMachine, s: PartitionedMachine) -> List[Func]:
    """Per-output disagreement conditions ``O^F_j xor O^S_j``, in S's output order."""
    return [a ^ b for _, a, b in _paired_outputs(f, s)]


def conformance(f: PartitionedMachine, s: PartitionedMachine) -> Func:
    """C(i, v, cs1, cs2): every output of F agrees with the same-named output of S."""
    if f.manager is not s.manager:
        raise UsageError("machines live in different managers")
    m = f.manager
    return m.conjoin(a.iff(b) for _, a, b in _paired_outputs(f, s))


def undefined_labels(pm: PartitionedMachine, zeta: Func) -> Func:
    """Q(i, o): input/output combinations undefined in every state of ``zeta``."""
    parts = output_parts(pm, internal=False)
    img = image(parts, zeta, pm.cs_vars)
    return ~img
