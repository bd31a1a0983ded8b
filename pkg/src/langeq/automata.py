"""Automaton operations over symbolic (relation) and explicit (enumerated) forms.

A `SymbolicAutomaton` keeps one transition relation ``to(labels, cs, ns)``
over BDD variables. An `ExplicitAutomaton` enumerates its states and labels
every edge with a predicate over the label variables. Determinization maps
the first kind to the second; `encode` goes back by binary state encoding
with freshly appended variables.

Label variables must be ordered above every state variable in the manager.
"""
from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .dd import Func, Manager
from .errors import ResourceLimitError, SolverTimeout, UsageError
from .netlist import PartitionedMachine
from .relations import build_monolithic

__all__ = [
    "SymbolicAutomaton", "ExplicitAutomaton", "NORMAL", "DC", "DCN", "DCA",
    "from_machine", "complete", "complement_det", "product", "hide", "determinize",
    "determinize_explicit", "complete_explicit", "prefix_close", "progressive",
    "trim", "encode", "contains", "equivalent", "find_counterexample",
    "is_deterministic", "is_complete", "fresh_state_pair", "universal",
]

NORMAL, DC, DCN, DCA = "normal", "DC", "DCN", "DCA"


def _check_deadline(m: Manager) -> None:
    if m.deadline is not None and time.monotonic() > m.deadline:
        raise SolverTimeout("deadline exceeded")


def fresh_state_pair(m: Manager, stem: str) -> Tuple[int, int]:
    """Append an adjacent (cs, ns) variable pair at the bottom of the order."""
    cs = m.add_var(m.fresh_name(stem))
    ns = m.add_var(m.fresh_name(stem + "'"))
    return cs, ns


@dataclass
class SymbolicAutomaton:
    manager: Manager
    label_vars: Tuple[int, ...]
    cs_vars: Tuple[int, ...]
    ns_vars: Tuple[int, ...]
    to: Func
    init: Func
    accepting: Func
    complete_flag: bool = False
    dc: Optional[Func] = None  # code of the completion state, if any

    def ns_to_cs(self) -> Dict[int, int]:
        return dict(zip(self.ns_vars, self.cs_vars))

    def step(self, zeta: Func, letter: Dict[int, int]) -> Func:
        """Successor set of ``zeta`` under one full label valuation."""
        m = self.manager
        rel = m.restrict(self.to, letter)
        return m.rename(m.and_exists(rel, zeta, self.cs_vars), self.ns_to_cs())

    def accepts(self, word: Sequence[Dict[int, int]]) -> bool:
        zeta = self.init
        for letter in word:
            zeta = self.step(zeta, letter)
            if zeta.is_false:
                return False
        return not (zeta & self.accepting).is_false


@dataclass
class ExplicitAutomaton:
    """Enumerated automaton; ``edges[s]`` lists (label predicate, destination).

    ``initial is None`` denotes the empty automaton (no states).
    """

    manager: Manager
    label_vars: Tuple[int, ...]
    initial: Optional[int]
    accepting: List[bool]
    kinds: List[str]
    edges: List[List[Tuple[Func, int]]]
    subsets: Optional[List[Func]] = None
    input_vars: Tuple[int, ...] = ()

    @property
    def n_states(self) -> int:
        return len(self.accepting)

    @property
    def is_empty(self) -> bool:
        return self.initial is None

    def state_of_kind(self, kind: str) -> Optional[int]:
        for s, k in enumerate(self.kinds):
            if k == kind:
                return s
        return None

    def is_deterministic(self) -> bool:
        for out in self.edges:
            seen = self.manager.false
            for p, _ in out:
                if not (seen & p).is_false:
                    return False
                seen = seen | p
        return True

    def is_complete(self) -> bool:
        m = self.manager
        return all(m.disjoin(p for p, _ in out).is_true for out in self.edges)

    def successors(self, s: int, letter: Dict[int, int]) -> List[int]:
        m = self.manager
        return [d for p, d in self.edges[s] if m.eval(p, letter)]

    def accepts(self, word: Sequence[Dict[int, int]]) -> bool:
        if self.initial is None:
            return False
        cur = {self.initial}
        for letter in word:
            cur = {d for s in cur for d in self.successors(s, letter)}
            if not cur:
                return False
        return any(self.accepting[s] for s in cur)

    def edge_count(self) -> int:
        return sum(len(out) for out in self.edges)


def is_deterministic(a: Union[SymbolicAutomaton, ExplicitAutomaton]) -> bool:
    if isinstance(a, ExplicitAutomaton):
        return a.is_deterministic()
    m = a.manager
    for ns in a.ns_vars:
        hi = m.and_exists(a.to, m.var(ns), a.ns_vars)
        lo = m.and_exists(a.to, m.nvar(ns), a.ns_vars)
        if not (hi & lo).is_false:
            return False
    return True


def is_complete(a: Union[SymbolicAutomaton, ExplicitAutomaton]) -> bool:
    if isinstance(a, ExplicitAutomaton):
        return a.is_complete()
    return a.manager.exists(a.to, a.ns_vars).is_true


def _merge(out: Iterable[Tuple[Func, int]]) -> List[Tuple[Func, int]]:
    acc: Dict[int, Func] = {}
    for p, d in out:
        if p.is_false:
            continue
        acc[d] = acc[d] | p if d in acc else p
    return [(p, d) for d, p in acc.items()]


# ----------------------------------------------------------------------
# symbolic operations

def from_machine(pm: PartitionedMachine) -> SymbolicAutomaton:
    """Automaton of a network: labels are its inputs and outputs, all states accepting."""
    rel = build_monolithic(pm)
    m = pm.manager
    return SymbolicAutomaton(m, rel.label_vars, rel.cs_vars, rel.ns_vars, rel.to,
                             pm.init_func(), m.true)


def complete(a: SymbolicAutomaton) -> SymbolicAutomaton:
    """Route undefined (label, state) pairs to a fresh non-accepting DC state."""
    m = a.manager
    dc_cs, dc_ns = fresh_state_pair(m, "dc")
    ns_zero = m.cube({v: 0 for v in a.ns_vars})
    cs_zero = m.cube({v: 0 for v in a.cs_vars})
    dc_next = m.var(dc_ns) & ns_zero
    undefined = ~m.exists(a.to, a.ns_vars)
    live = ~m.var(dc_cs)
    to = (live & m.nvar(dc_ns) & a.to) | (live & undefined & dc_next) | (m.var(dc_cs) & dc_next)
    return SymbolicAutomaton(
        m, a.label_vars, a.cs_vars + (dc_cs,), a.ns_vars + (dc_ns,), to,
        a.init & live, a.accepting & live, True, m.var(dc_cs) & cs_zero)


def complement_det(a):
    """Swap accepting and non-accepting states of a complete deterministic automaton."""
    if not is_deterministic(a) or not is_complete(a):
        raise UsageError("complementation needs a complete deterministic automaton")
    if isinstance(a, ExplicitAutomaton):
        return replace(a, accepting=[not x for x in a.accepting])
    return replace(a, accepting=~a.accepting)


def product(a: SymbolicAutomaton, b: SymbolicAutomaton) -> SymbolicAutomaton:
    """Synchronous product over the union of the label sets."""
    if a.manager is not b.manager:
        raise UsageError("automata live in different managers")
    if set(a.cs_vars + a.ns_vars) & set(b.cs_vars + b.ns_vars):
        raise UsageError("product operands share state variables")
    labels = tuple(sorted(set(a.label_vars) | set(b.label_vars)))
    dc = None
    return SymbolicAutomaton(a.manager, labels, a.cs_vars + b.cs_vars, a.ns_vars + b.ns_vars,
                             a.to & b.to, a.init & b.init, a.accepting & b.accepting,
                             a.complete_flag and b.complete_flag, dc)


def hide(a: SymbolicAutomaton, keep: Iterable[int]) -> SymbolicAutomaton:
    """Existentially quantify every label variable outside ``keep``."""
    keep = set(keep)
    if not keep <= set(a.label_vars):
        raise UsageError("kept labels must be labels of the automaton")
    drop = [v for v in a.label_vars if v not in keep]
    to = a.manager.exists(a.to, drop) if drop else a.to
    return replace(a, label_vars=tuple(v for v in a.label_vars if v in keep), to=to)


def universal(m: Manager, label_vars: Iterable[int]) -> ExplicitAutomaton:
    """One accepting state with a universal self-loop."""
    return ExplicitAutomaton(m, tuple(label_vars), 0, [True], [NORMAL], [[(m.true, 0)]])


def determinize(a: SymbolicAutomaton, subset_limit: Optional[int] = None,
                seeds: Optional[Sequence[Func]] = None) -> ExplicitAutomaton:
    """Subset construction over the reachable subsets of ``a``.

    States are canonical characteristic functions over ``a.cs_vars``. With
    ``seeds`` given, exploration starts from each seed (the first is initial).
    """
    m = a.manager
    back = a.ns_to_cs()
    starts = [a.init] if seeds is None else list(seeds)
    index: Dict[Func, int] = {}
    subsets: List[Func] = []
    queue = deque()

    def intern(zeta: Func) -> int:
        k = index.get(zeta)
        if k is None:
            if subset_limit is not None and len(subsets) >= subset_limit:
                raise ResourceLimitError(f"subset limit of {subset_limit} exceeded")
            k = index[zeta] = len(subsets)
            subsets.append(zeta)
            queue.append(k)
        return k

    if starts[0].is_false:
        return ExplicitAutomaton(m, a.label_vars, None, [], [], [], [])
    for z in starts:
        if not z.is_false:
            intern(z)
    edges: Dict[int, List[Tuple[Func, int]]] = {}
    while queue:
        _check_deadline(m)
        k = queue.popleft()
        img = m.rename(m.and_exists(a.to, subsets[k], a.cs_vars), back)
        out = []
        for succ, pred in m.split_by_prefix(img, a.label_vars).items():
            if not succ.is_false:
                out.append((pred, intern(succ)))
        edges[k] = out
    kinds = [DC if a.dc is not None and z == a.dc else NORMAL for z in subsets]
    return ExplicitAutomaton(m, a.label_vars, 0, [not (z & a.accepting).is_false for z in subsets],
                             kinds, [edges[k] for k in range(len(subsets))], subsets)


def encode(e: ExplicitAutomaton, stem: str = "q") -> SymbolicAutomaton:
    """Binary-encode the states of ``e`` with fresh variables."""
    m = e.manager
    n = e.n_states
    bits = max(1, math.ceil(math.log2(max(n, 1))))
    pairs = [fresh_state_pair(m, f"{stem}{b}") for b in range(bits)]
    cs = tuple(p[0] for p in pairs)
    ns = tuple(p[1] for p in pairs)

    def code(vs, s):
        return m.cube({v: (s >> b) & 1 for b, v in enumerate(vs)})

    to = m.false
    for s in range(n):
        out = m.disjoin(p & code(ns, d) for p, d in e.edges[s])
        to = to | (code(cs, s) & out)
    acc = m.disjoin(code(cs, s) for s in range(n) if e.accepting[s])
    init = m.false if e.initial is None else code(cs, e.initial)
    dc_state = e.state_of_kind(DC)
    return SymbolicAutomaton(m, e.label_vars, cs, ns, to, init, acc, e.is_complete(),
                             None if dc_state is None else code(cs, dc_state))


# ----------------------------------------------------------------------
# explicit operations

def trim(e: ExplicitAutomaton) -> ExplicitAutomaton:
    """Keep states reachable from the initial one, renumbered breadth-first."""
    if e.initial is None:
        return e
    order = [e.initial]
    new = {e.initial: 0}
    k = 0
    while k < len(order):
        for _, d in e.edges[order[k]]:
            if d not in new:
                new[d] = len(order)
                order.append(d)
        k += 1
    return ExplicitAutomaton(
        e.manager, e.label_vars, 0,
        [e.accepting[s] for s in order], [e.kinds[s] for s in order],
        [[(p, new[d]) for p, d in e.edges[s]] for s in order],
        None if e.subsets is None else [e.subsets[s] for s in order], e.input_vars)


def _restrict_states(e: ExplicitAutomaton, keep: Iterable[int]) -> ExplicitAutomaton:
    keep = set(keep)
    if e.initial is None or e.initial not in keep:
        return ExplicitAutomaton(e.manager, e.label_vars, None, [], [], [], [], e.input_vars)
    edges = [[(p, d) for p, d in out if d in keep] if s in keep else [] for s, out in enumerate(e.edges)]
    return trim(replace(e, edges=edges))


def complete_explicit(e: ExplicitAutomaton, kind: str = DC, accepting: bool = False) -> ExplicitAutomaton:
    """Add one sink of the given kind and send every undefined label to it."""
    m = e.manager
    sink = e.n_states
    edges = []
    for out in e.edges:
        missing = ~m.disjoin(p for p, _ in out)
        edges.append(list(out) + ([(missing, sink)] if not missing.is_false else []))
    edges.append([(m.true, sink)])
    subsets = None if e.subsets is None else e.subsets + [None]
    return ExplicitAutomaton(m, e.label_vars, sink if e.initial is None else e.initial,
                             e.accepting + [accepting], e.kinds + [kind], edges, subsets, e.input_vars)


def prefix_close(e: ExplicitAutomaton) -> ExplicitAutomaton:
    """Delete non-accepting states (and edges touching them)."""
    return _restrict_states(e, [s for s in range(e.n_states) if e.accepting[s]])


def progressive(e: ExplicitAutomaton, u_vars: Iterable[int]) -> ExplicitAutomaton:
    """Greatest sub-automaton where every state has a move for every u valuation."""
    u_vars = tuple(u_vars)
    if not set(u_vars) <= set(e.label_vars):
        raise UsageError("progressive inputs must be labels of the automaton")
    m = e.manager
    others = [v for v in e.label_vars if v not in set(u_vars)]
    alive = set(range(e.n_states))
    changed = True
    while changed:
        changed = False
        for s in sorted(alive):
            allowed = m.disjoin(p for p, d in e.edges[s] if d in alive)
            if not m.exists(allowed, others).is_true:
                alive.discard(s)
                changed = True
    return replace(_restrict_states(e, alive), input_vars=u_vars)


def determinize_explicit(e: ExplicitAutomaton) -> ExplicitAutomaton:
    """Subset construction on an explicit (possibly nondeterministic) automaton."""
    m = e.manager
    if e.initial is None:
        return e
    index: Dict[frozenset, int] = {}
    members: List[frozenset] = []
    queue = deque()

    def intern(sub: frozenset) -> int:
        if sub not in index:
            index[sub] = len(members)
            members.append(sub)
            queue.append(index[sub])
        return index[sub]

    intern(frozenset([e.initial]))
    edges: Dict[int, List[Tuple[Func, int]]] = {}
    while queue:
        k = queue.popleft()
        regions: List[Tuple[Func, frozenset]] = [(m.true, frozenset())]
        for s in members[k]:
            for p, d in e.edges[s]:
                nxt = []
                for r, dsts in regions:
                    inside, outside = r & p, r & ~p
                    if not inside.is_false:
                        nxt.append((inside, dsts | {d}))
                    if not outside.is_false:
                        nxt.append((outside, dsts))
                regions = nxt
        grouped: Dict[frozenset, Func] = {}
        for r, dsts in regions:
            if dsts:
                grouped[dsts] = grouped[dsts] | r if dsts in grouped else r
        edges[k] = [(p, intern(d)) for d, p in grouped.items()]
    accepting = [any(e.accepting[s] for s in sub) for sub in members]
    kinds = [e.kinds[next(iter(sub))] if len(sub) == 1 else NORMAL for sub in members]
    return ExplicitAutomaton(m, e.label_vars, 0, accepting, kinds,
                             [edges[k] for k in range(len(members))], None, e.input_vars)


def _as_explicit(a, subset_limit=None) -> ExplicitAutomaton:
    return a if isinstance(a, ExplicitAutomaton) else determinize(a, subset_limit)


def _as_complete_dfa(b, subset_limit=None) -> ExplicitAutomaton:
    e = _as_explicit(b, subset_limit)
    if not e.is_deterministic():
        e = determinize_explicit(e)
    return complete_explicit(e, DC, False)


def find_counterexample(a, b, subset_limit: Optional[int] = None) -> Optional[List[Dict[int, int]]]:
    """A word accepted by ``a`` but not by ``b``, or None.

    Letters are full assignments to the label variables (free ones set to 0).
    """
    if set(a.label_vars) != set(b.label_vars):
        raise UsageError("containment needs identical label sets")
    if a.manager is not b.manager:
        raise UsageError("automata live in different managers")
    ea = _as_explicit(a, subset_limit)
    if ea.initial is None:
        return None
    eb = _as_complete_dfa(b, subset_limit)
    m = ea.manager
    start = (ea.initial, eb.initial)
    parent: Dict[Tuple[int, int], Optional[Tuple[Tuple[int, int], Func]]] = {start: None}
    queue = deque([start])
    while queue:
        _check_deadline(m)
        pa, pb = pair = queue.popleft()
        if ea.accepting[pa] and not eb.accepting[pb]:
            word = []
            while parent[pair] is not None:
                pair, label = parent[pair]
                word.append({**dict.fromkeys(ea.label_vars, 0), **m.pick(label)})
            return word[::-1]
        for p, da in ea.edges[pa]:
            for r, db in eb.edges[pb]:
                nxt = (da, db)
                if nxt in parent:
                    continue
                both = p & r
                if not both.is_false:
                    parent[nxt] = (pair, both)
                    queue.append(nxt)
    return None


def contains(a, b, subset_limit: Optional[int] = None) -> bool:
    """Language containment L(a) <= L(b)."""
    return find_counterexample(a, b, subset_limit) is None


def equivalent(a, b, subset_limit: Optional[int] = None) -> bool:
    return contains(a, b, subset_limit) and contains(b, a, subset_limit)
