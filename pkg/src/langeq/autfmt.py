"""Text formats for explicit automata: AUT (read/write) and DOT (write)."""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .automata import DC, DCA, DCN, NORMAL, ExplicitAutomaton
from .dd import Func, Manager
from .errors import FormatError

__all__ = ["write_aut", "read_aut", "write_dot", "label_cubes"]

_KINDS = (DC, DCN, DCA)


def label_cubes(pred: Func, label_vars: Sequence[int]) -> List[str]:
    """Disjoint cube strings over ``label_vars`` covering ``pred``, sorted."""
    m = pred.manager
    out = []
    for cube in m.enumerate_cubes(pred):
        out.append("".join("-" if v not in cube else str(cube[v]) for v in label_vars))
    return sorted(out)


def _canonical_order(e: ExplicitAutomaton, cubes) -> List[int]:
    """BFS from the initial state, following edges in order of their cube lists."""
    order, seen = [], set()
    if e.initial is None:
        return order
    queue = [e.initial]
    seen.add(e.initial)
    while queue:
        s = queue.pop(0)
        order.append(s)
        for _, d in sorted((cubes[(s, d)], d) for _, d in e.edges[s] if (s, d) in cubes):
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return order


def write_aut(e: ExplicitAutomaton, name: str = "csf", input_vars: Sequence[int] = ()) -> str:
    """Canonical AUT text: BFS numbering with edges taken in cube order, rows sorted.

    Unreachable states are dropped.
    """
    m = e.manager
    labels = sorted(e.label_vars)
    merged: Dict[Tuple[int, int], Func] = {}
    for s, out in enumerate(e.edges):
        for p, d in out:
            merged[(s, d)] = merged[(s, d)] | p if (s, d) in merged else p
    cubes = {key: label_cubes(p, labels) for key, p in merged.items()}
    order = _canonical_order(e, cubes)
    num = {s: k for k, s in enumerate(order)}
    ilabels = sorted(input_vars or e.input_vars)
    lines = [f".aut {name}", ".labels " + " ".join(m.name_of(v) for v in labels)]
    if ilabels:
        lines.append(".ilabels " + " ".join(m.name_of(v) for v in ilabels))
    lines.append(f".states {len(order)}")
    if order:
        lines.append(".initial 0")
    acc = [str(num[s]) for s in order if e.accepting[s]]
    lines.append(".accepting" + ("" if not acc else " " + " ".join(acc)))
    for s in order:
        if e.kinds[s] in _KINDS:
            lines.append(f".kind {num[s]} {e.kinds[s]}")
    rows = []
    for (s, d), cs in cubes.items():
        if s in num:
            rows.extend((num[s], cube, num[d]) for cube in cs)
    for s, cube, d in sorted(set(rows)):
        lines.append(f".trans {s} {cube or '-'} {d}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def read_aut(text: str, manager: Optional[Manager] = None) -> ExplicitAutomaton:
    """Parse AUT text; labels are looked up in (or create) ``manager``."""
    labels: Optional[List[str]] = None
    ilabels: List[str] = []
    n_states = None
    initial = None
    accepting: List[int] = []
    kinds: Dict[int, str] = {}
    trans: List[Tuple[int, str, int, int]] = []
    ended = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if ended:
            raise FormatError("content after .end", lineno)
        head, args = tokens[0], tokens[1:]
        try:
            if head == ".aut":
                pass
            elif head == ".labels":
                labels = args
            elif head == ".ilabels":
                ilabels = args
            elif head == ".states":
                n_states = int(args[0])
            elif head == ".initial":
                initial = int(args[0])
            elif head == ".accepting":
                accepting = [int(a) for a in args]
            elif head == ".kind":
                if args[1] not in _KINDS:
                    raise FormatError(f"unknown state kind {args[1]!r}", lineno)
                kinds[int(args[0])] = args[1]
            elif head == ".trans":
                if len(args) != 3:
                    raise FormatError(".trans expects <src> <cube> <dst>", lineno)
                trans.append((int(args[0]), args[1], int(args[2]), lineno))
            elif head == ".end":
                ended = True
            else:
                raise FormatError(f"unknown directive {head!r}", lineno)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed {head} line", lineno) from None
    if labels is None or n_states is None:
        raise FormatError("missing .labels or .states")
    if manager is None:
        manager = Manager(labels if labels else ["_"])
    label_vars = tuple(manager.index_of(n) for n in labels)
    if sorted(label_vars) != list(label_vars):
        raise FormatError(".labels must follow the manager's variable order")
    for s in list(accepting) + list(kinds) + ([initial] if initial is not None else []):
        if not 0 <= s < n_states:
            raise FormatError(f"state {s} out of range")
    if n_states and initial is None:
        raise FormatError("missing .initial")
    edges: List[Dict[int, Func]] = [dict() for _ in range(n_states)]
    for src, cube, dst, lineno in trans:
        if not (0 <= src < n_states and 0 <= dst < n_states):
            raise FormatError("transition state out of range", lineno)
        if cube == "-" and len(labels) != 1:  # written for an empty label set
            cube = "-" * len(labels)
        if len(cube) != len(labels) or any(c not in "01-" for c in cube):
            raise FormatError(f"malformed cube {cube!r}", lineno)
        pred = manager.cube({v: int(c) for v, c in zip(label_vars, cube) if c != "-"})
        edges[src][dst] = edges[src][dst] | pred if dst in edges[src] else pred
    acc = set(accepting)
    return ExplicitAutomaton(
        manager, label_vars, initial,
        [s in acc for s in range(n_states)],
        [kinds.get(s, NORMAL) for s in range(n_states)],
        [[(p, d) for d, p in out.items()] for out in edges], None,
        tuple(manager.index_of(n) for n in ilabels))


def write_dot(e: ExplicitAutomaton, name: str = "automaton") -> str:
    """Graphviz rendering: doubled circles for accepting states, cube labels on edges."""
    m = e.manager
    labels = list(e.label_vars)
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    if e.initial is None:
        lines.append('  empty [shape=plaintext, label="empty"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    lines.append('  __start [shape=point];')
    for s in range(e.n_states):
        shape = "doublecircle" if e.accepting[s] else "circle"
        text = e.kinds[s] if e.kinds[s] != NORMAL else str(s)
        style = ", style=filled, fillcolor=lightgray" if e.kinds[s] != NORMAL else ""
        lines.append(f'  s{s} [shape={shape}, label="{text}"{style}];')
    lines.append(f"  __start -> s{e.initial};")
    header = " ".join(m.name_of(v) for v in labels)
    for s, out in enumerate(e.edges):
        for p, d in out:
            text = "\\n".join(label_cubes(p, labels)) or "-"
            lines.append(f'  s{s} -> s{d} [label="{text}"];')
    lines.append(f'  labelloc=t; label="labels: {header}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
