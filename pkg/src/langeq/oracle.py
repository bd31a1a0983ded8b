"""Brute-force explicit-state reference: every letter and every state enumerated.

Nothing here touches decision diagrams or shares helpers with the symbolic
code, so agreement between the two is evidence rather than tautology. All
operations refuse automata whose state plus label bits exceed `SIZE_GUARD`.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import ResourceLimitError, UsageError
from .netlist import Network

__all__ = [
    "TableAutomaton", "SIZE_GUARD", "net_to_table", "table_complete", "table_complement",
    "table_product", "table_hide", "table_determinize", "table_prefix_close",
    "table_progressive", "table_trim", "table_solve", "table_contains", "table_equivalent",
    "table_accepts", "split_to_tables", "explicit_to_table",
]

SIZE_GUARD = 20
_DC = ("DC",)

Letter = Tuple[int, ...]


@dataclass
class TableAutomaton:
    """``trans[s][letter]`` is the set of successors; letters follow ``vars``."""

    vars: Tuple[str, ...]
    states: List[Hashable]
    initial: Optional[Hashable]
    accepting: Set[Hashable]
    trans: Dict[Hashable, Dict[Letter, Set[Hashable]]] = field(default_factory=dict)

    @property
    def alphabet(self) -> List[Letter]:
        return list(itertools.product((0, 1), repeat=len(self.vars)))

    def transitions(self):
        for s, row in self.trans.items():
            for a, ds in row.items():
                for d in ds:
                    yield s, a, d

    def is_deterministic(self) -> bool:
        return all(len(ds) <= 1 for row in self.trans.values() for ds in row.values())

    def is_complete(self) -> bool:
        n = 1 << len(self.vars)
        return all(sum(1 for ds in self.trans.get(s, {}).values() if ds) == n for s in self.states)


def _guard(a: TableAutomaton) -> TableAutomaton:
    bits = math.ceil(math.log2(max(len(a.states), 1))) + len(a.vars)
    if bits > SIZE_GUARD:
        raise ResourceLimitError(f"oracle size guard: {bits} > {SIZE_GUARD} state+label bits")
    return a


def _gate_value(rows, phase, bits) -> int:
    on = any(all(c == "-" or (c == "1") == bool(b) for c, b in zip(row, bits)) for row in rows)
    return int(on) if phase else int(not on)


def _step(n: Network, inputs: Dict[str, int], state: Dict[str, int]):
    values = dict(inputs)
    values.update(state)
    pending = list(n.gates)
    while pending:
        rest = []
        for g in pending:
            if all(s in values for s in g.inputs):
                values[g.output] = _gate_value(g.rows, g.phase, [values[s] for s in g.inputs])
            else:
                rest.append(g)
        if len(rest) == len(pending):
            raise UsageError("network has a combinational cycle")
        pending = rest
    return values


def _output_labels(n: Network) -> List[str]:
    return [o if o not in n.inputs else f"{o}@o" for o in n.outputs]


def net_to_table(n: Network, rename: Optional[Dict[str, str]] = None) -> TableAutomaton:
    """Automaton over (inputs, outputs) with every latch valuation as a state; all accepting."""
    rename = rename or {}
    labels = [rename.get(s, s) for s in n.inputs] + [rename.get(s, s) for s in _output_labels(n)]
    nl = len(n.latches)
    if math.ceil(math.log2(max(1 << nl, 1))) + len(labels) > SIZE_GUARD:
        raise ResourceLimitError("oracle size guard exceeded")
    states = list(itertools.product((0, 1), repeat=nl))
    trans: Dict = {}
    for st in states:
        row: Dict[Letter, Set] = {}
        state = {l.state: b for l, b in zip(n.latches, st)}
        for ins in itertools.product((0, 1), repeat=len(n.inputs)):
            values = _step(n, dict(zip(n.inputs, ins)), state)
            outs = tuple(values[o] for o in n.outputs)
            nxt = tuple(values[l.data_in] for l in n.latches)
            row.setdefault(ins + outs, set()).add(nxt)
        trans[st] = row
    init = tuple(l.init for l in n.latches)
    return TableAutomaton(tuple(labels), states, init, set(states), trans)


def table_complete(a: TableAutomaton, accepting: bool = False) -> TableAutomaton:
    dc = _DC
    while dc in a.states:
        dc = dc + ("'",)
    trans = {s: {k: set(v) for k, v in a.trans.get(s, {}).items()} for s in a.states}
    for s in a.states:
        row = trans[s]
        for letter in a.alphabet:
            if not row.get(letter):
                row[letter] = {dc}
    trans[dc] = {letter: {dc} for letter in a.alphabet}
    acc = set(a.accepting) | ({dc} if accepting else set())
    init = dc if a.initial is None else a.initial
    return _guard(TableAutomaton(a.vars, a.states + [dc], init, acc, trans))


def table_complement(a: TableAutomaton) -> TableAutomaton:
    if not a.is_deterministic() or not a.is_complete():
        raise UsageError("complement needs a complete deterministic table")
    return TableAutomaton(a.vars, list(a.states), a.initial,
                          {s for s in a.states if s not in a.accepting}, a.trans)


def table_product(a: TableAutomaton, b: TableAutomaton) -> TableAutomaton:
    """Synchronous product over the union of variables (a's variables first)."""
    vars_ = tuple(a.vars) + tuple(v for v in b.vars if v not in a.vars)
    pa = [vars_.index(v) for v in a.vars]
    pb = [vars_.index(v) for v in b.vars]
    extra = [vars_.index(v) for v in vars_ if v not in a.vars]
    if a.initial is None or b.initial is None:
        return TableAutomaton(vars_, [], None, set(), {})
    start = (a.initial, b.initial)
    states, trans, queue = [start], {}, deque([start])
    seen = {start}
    while queue:
        p, q = st = queue.popleft()
        row: Dict[Letter, Set] = {}
        for la, da in a.trans.get(p, {}).items():
            for tail in itertools.product((0, 1), repeat=len(extra)):
                full = [0] * len(vars_)
                for k, x in zip(pa, la):
                    full[k] = x
                for k, x in zip(extra, tail):
                    full[k] = x
                lb = tuple(full[k] for k in pb)
                db = b.trans.get(q, {}).get(lb)
                if not db or not da:
                    continue
                dst = {(x, y) for x in da for y in db}
                row.setdefault(tuple(full), set()).update(dst)
                for d in dst:
                    if d not in seen:
                        seen.add(d)
                        states.append(d)
                        queue.append(d)
        trans[st] = row
    acc = {s for s in states if s[0] in a.accepting and s[1] in b.accepting}
    return _guard(TableAutomaton(vars_, states, start, acc, trans))


def table_hide(a: TableAutomaton, keep: Sequence[str]) -> TableAutomaton:
    keep = tuple(keep)
    idx = [a.vars.index(v) for v in keep]
    trans = {}
    for s, row in a.trans.items():
        nrow: Dict[Letter, Set] = {}
        for letter, ds in row.items():
            nrow.setdefault(tuple(letter[k] for k in idx), set()).update(ds)
        trans[s] = nrow
    return TableAutomaton(keep, list(a.states), a.initial, set(a.accepting), trans)


def table_determinize(a: TableAutomaton) -> TableAutomaton:
    if a.initial is None:
        return TableAutomaton(a.vars, [], None, set(), {})
    start = frozenset([a.initial])
    states, trans, queue, seen = [start], {}, deque([start]), {start}
    while queue:
        sub = queue.popleft()
        row = {}
        for letter in a.alphabet:
            nxt = frozenset(d for s in sub for d in a.trans.get(s, {}).get(letter, ()))
            if not nxt:
                continue
            row[letter] = {nxt}
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
                queue.append(nxt)
        trans[sub] = row
    acc = {sub for sub in states if any(s in a.accepting for s in sub)}
    return _guard(TableAutomaton(a.vars, states, start, acc, trans))


def table_trim(a: TableAutomaton, keep: Optional[Iterable[Hashable]] = None) -> TableAutomaton:
    """Restrict to ``keep`` (default: all states) and then to reachable states."""
    keep = set(a.states if keep is None else keep)
    if a.initial is None or a.initial not in keep:
        return TableAutomaton(a.vars, [], None, set(), {})
    seen, queue, order = {a.initial}, deque([a.initial]), [a.initial]
    trans = {}
    while queue:
        s = queue.popleft()
        row = {}
        for letter, ds in a.trans.get(s, {}).items():
            ds = {d for d in ds if d in keep}
            if ds:
                row[letter] = ds
                for d in ds:
                    if d not in seen:
                        seen.add(d)
                        order.append(d)
                        queue.append(d)
        trans[s] = row
    return TableAutomaton(a.vars, order, a.initial, {s for s in order if s in a.accepting}, trans)


def table_prefix_close(a: TableAutomaton) -> TableAutomaton:
    return table_trim(a, [s for s in a.states if s in a.accepting])


def table_progressive(a: TableAutomaton, inputs: Sequence[str]) -> TableAutomaton:
    idx = [a.vars.index(v) for v in inputs]
    needed = set(itertools.product((0, 1), repeat=len(idx)))
    alive = set(a.states)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            covered = {tuple(letter[k] for k in idx)
                       for letter, ds in a.trans.get(s, {}).items() if ds & alive}
            if covered != needed:
                alive.discard(s)
                changed = True
    return table_trim(a, alive)


def table_accepts(a: TableAutomaton, word: Sequence[Letter]) -> bool:
    if a.initial is None:
        return False
    cur = {a.initial}
    for letter in word:
        cur = {d for s in cur for d in a.trans.get(s, {}).get(tuple(letter), ())}
    return any(s in a.accepting for s in cur)


def _reorder(a: TableAutomaton, vars_: Sequence[str]) -> TableAutomaton:
    if tuple(vars_) == a.vars:
        return a
    if set(vars_) != set(a.vars):
        raise UsageError("tables range over different variables")
    return table_hide(a, vars_)


def table_contains(a: TableAutomaton, b: TableAutomaton) -> bool:
    """L(a) <= L(b), by search in a x complete(det(b))."""
    b = _reorder(b, a.vars)
    if a.initial is None:
        return True
    db = table_determinize(b)
    db = table_complete(db) if db.initial is not None else table_complete(
        TableAutomaton(a.vars, [], None, set(), {}))
    start = (a.initial, db.initial)
    seen, queue = {start}, deque([start])
    while queue:
        p, q = queue.popleft()
        if p in a.accepting and q not in db.accepting:
            return False
        for letter, ds in a.trans.get(p, {}).items():
            (qn,) = db.trans[q][letter]
            for d in ds:
                if (d, qn) not in seen:
                    seen.add((d, qn))
                    queue.append((d, qn))
    return True


def table_equivalent(a: TableAutomaton, b: TableAutomaton) -> bool:
    return table_contains(a, b) and table_contains(b, a)


def split_to_tables(f_net: Network, s_net: Network):
    """Tables of F and S; F's outputs that S also has share S's label names."""
    return net_to_table(f_net), net_to_table(s_net)


def table_solve(f_net: Network, s_net: Network, u: Sequence[str], v: Sequence[str]) -> TableAutomaton:
    """Largest prefix-closed u-progressive solution, step by step on tables."""
    f_tab, s_tab = split_to_tables(f_net, s_net)
    x = table_complete(s_tab)
    x = table_determinize(x)
    x = table_complement(x)
    f_c = table_complete(f_tab)
    x = table_product(f_c, x)
    x = table_hide(x, tuple(u) + tuple(v))
    x = table_determinize(x)
    x = table_complete(x)
    x = table_complement(x)
    x = table_prefix_close(x)
    return table_progressive(x, u)


def explicit_to_table(e, var_names: Optional[Sequence[str]] = None) -> TableAutomaton:
    """Enumerate an `ExplicitAutomaton` letter by letter (for cross-checking only)."""
    m = e.manager
    names = tuple(var_names) if var_names is not None else tuple(m.name_of(v) for v in e.label_vars)
    idx = [m.index_of(n) for n in names]
    if set(idx) != set(e.label_vars):
        raise UsageError("variable names do not match the automaton's labels")
    if e.initial is None:
        return TableAutomaton(names, [], None, set(), {})
    trans = {}
    for s in range(e.n_states):
        row = {}
        for letter in itertools.product((0, 1), repeat=len(names)):
            ds = set(e.successors(s, dict(zip(idx, letter))))
            if ds:
                row[letter] = ds
        trans[s] = row
    acc = {s for s in range(e.n_states) if e.accepting[s]}
    return _guard(TableAutomaton(names, list(range(e.n_states)), e.initial, acc, trans))
