"""Complete sequential flexibility: monolithic and partitioned flows, and verification.

Both flows compute the largest prefix-closed, u-progressive solution X of
``F . X <= S`` where F and S are given as `PartitionedMachine` objects. The
monolithic flow runs the generic completion / determinization / product /
hiding pipeline on full transition relations; the partitioned flow folds all
steps into a single subset construction driven by image computations over the
per-latch and per-output functions.
"""
from __future__ import annotations

import time
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import automata as au
from .automata import DC, DCA, DCN, NORMAL, ExplicitAutomaton, SymbolicAutomaton
from .dd import DEFAULT_NODE_LIMIT, Func, Manager
from .errors import ResourceLimitError, UsageError
from .netlist import Network, PartitionedMachine, SplitResult, elaborate, latch_split, next_name
from .relations import image, make_schedule, nonconformance, transition_parts

__all__ = [
    "Problem", "Csf", "VerifyReport", "make_problem", "problem_from_networks",
    "solve_monolithic", "solve_partitioned", "trim_on_violation", "verify_solution",
    "machine_automaton", "network_automaton",
]


@dataclass
class Problem:
    """A language equation instance: fixed part F, specification S, and optionally X_p."""

    manager: Manager
    f: PartitionedMachine
    s: PartitionedMachine
    i_vars: Tuple[int, ...]
    o_vars: Tuple[int, ...]
    u_vars: Tuple[int, ...]
    v_vars: Tuple[int, ...]
    xp: Optional[PartitionedMachine] = None
    split: Optional[SplitResult] = None
    network: Optional[Network] = None

    @property
    def uv_vars(self) -> Tuple[int, ...]:
        return tuple(sorted(self.u_vars + self.v_vars))

    @property
    def io_vars(self) -> Tuple[int, ...]:
        return tuple(sorted(self.i_vars + self.o_vars))


@dataclass
class Csf:
    automaton: ExplicitAutomaton
    u_vars: Tuple[int, ...]
    v_vars: Tuple[int, ...]
    stats: Dict[str, object] = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return self.automaton.is_empty

    @property
    def n_states(self) -> int:
        return self.automaton.n_states


def _label_names(inputs, v, u, outputs):
    names, used = [], set()
    for group in (inputs, v, u):
        for s in group:
            names.append(s)
            used.add(s)
    o_names = []
    for s in outputs:
        n = s if s not in used else f"{s}@o"
        o_names.append(n)
        used.add(n)
    return names + o_names, o_names


def _build(f_net: Network, s_net: Network, xp_net: Optional[Network],
           u: Sequence[str], v: Sequence[str], state_order: Sequence[Tuple[str, str]],
           node_limit: Optional[int]) -> Problem:
    if list(f_net.outputs[:len(s_net.outputs)]) != list(s_net.outputs):
        raise UsageError("F must list S's outputs first, in the same order")
    if set(f_net.inputs) != set(s_net.inputs) | set(v):
        raise UsageError("F's inputs must be S's inputs plus the v wires")
    labels, o_names = _label_names(s_net.inputs, v, u, s_net.outputs)
    states = []
    for tag, latch in state_order:
        states += [f"{tag}.{latch}", f"{tag}.{latch}'"]
    m = Manager(labels + states, node_limit=node_limit)
    o_var = {o: m.index_of(n) for o, n in zip(s_net.outputs, o_names)}

    def vmap(tag, net, extra):
        d = dict(extra)
        for l in net.latches:
            d[l.state] = m.index_of(f"{tag}.{l.state}")
            d[next_name(l.state)] = m.index_of(f"{tag}.{l.state}'")
        return d

    ivars = {s: m.index_of(s) for s in s_net.inputs}
    uvars = {s: m.index_of(s) for s in u}
    vvars = {s: m.index_of(s) for s in v}
    f = elaborate(f_net, m, vmap("F", f_net, {**ivars, **vvars}), internal=u,
                  output_vars={**o_var, **uvars})
    s = elaborate(s_net, m, vmap("S", s_net, ivars), output_vars=o_var)
    xp = None
    if xp_net is not None:
        xp = elaborate(xp_net, m, vmap("X", xp_net, uvars), output_vars=vvars)
    return Problem(m, f, s, tuple(ivars.values()), tuple(o_var.values()),
                   tuple(uvars.values()), tuple(vvars.values()), xp)


def problem_from_networks(f_net: Network, s_net: Network, u: Sequence[str], v: Sequence[str],
                          xp_net: Optional[Network] = None,
                          node_limit: Optional[int] = DEFAULT_NODE_LIMIT) -> Problem:
    """Problem from separately given F and S networks (F's state bits before S's)."""
    order = [("F", l.state) for l in f_net.latches] + [("S", l.state) for l in s_net.latches]
    if xp_net is not None:
        order += [("X", l.state) for l in xp_net.latches]
    return _build(f_net, s_net, xp_net, u, v, order, node_limit)


def make_problem(network: Network, x_latches: Iterable[str],
                 node_limit: Optional[int] = DEFAULT_NODE_LIMIT) -> Problem:
    """Latch-split ``network`` and set up F, S = network, and X_p in one manager.

    State variables are grouped per original latch (F copy, S copy, X_p copy)
    so that the diagonal relations between copies stay small.
    """
    split = latch_split(network, x_latches)
    xset = {l.state for l in split.unknown.latches}
    order = []
    for l in network.latches:
        if l.state not in xset:
            order.append(("F", l.state))
        order.append(("S", l.state))
        if l.state in xset:
            order.append(("X", l.state))
    p = _build(split.fixed, network, split.unknown, split.u_signals, split.v_signals, order, node_limit)
    p.split = split
    p.network = network
    return p


@contextmanager
def _deadline(m: Manager, timeout_s: Optional[float]):
    old = m.deadline
    if timeout_s is not None:
        m.deadline = time.monotonic() + timeout_s
    try:
        yield
    finally:
        m.deadline = old


def _finish(e: ExplicitAutomaton, p: Problem) -> ExplicitAutomaton:
    e = au.prefix_close(e)
    return au.progressive(e, p.u_vars)


def solve_monolithic(p: Problem, subset_limit: Optional[int] = None,
                     timeout_s: Optional[float] = None) -> Csf:
    """The generic pipeline on monolithic relations."""
    m = p.manager
    t0 = time.perf_counter()
    with _deadline(m, timeout_s):
        x = au.complete(au.from_machine(p.s))
        x = au.determinize(x, subset_limit)
        x = au.complement_det(x)
        # expansion to (i, v, u, o) is free: the relation ignores labels it lacks
        f = au.complete(au.from_machine(p.f))
        prod = au.product(f, au.encode(x, "sbar"))
        hidden = au.hide(prod, p.uv_vars)
        d = au.determinize(hidden, subset_limit)
        explored = d.n_states
        d = au.complete_explicit(d, DC, False)
        d = au.complement_det(d)
        d.kinds = [DCA if k == DC else k for k in d.kinds]
        res = _finish(d, p)
    elapsed = time.perf_counter() - t0
    return Csf(res, p.u_vars, p.v_vars,
               {"flow": "monolithic", "explored": explored, "states": res.n_states, "seconds": elapsed})


@dataclass(frozen=True)
class Routing:
    """Label split at one subset state: ``dcn`` goes to DCN, ``explore`` spawns subsets."""

    dcn: Func
    explore: Func

    @property
    def total_violation(self) -> bool:
        return self.dcn.is_true


def trim_on_violation(zeta: Func, q: Func) -> Routing:
    """Labels in the non-conformance region ``q`` never spawn successor subsets."""
    return Routing(q, ~q)


class _PartitionedEngine:
    def __init__(self, p: Problem):
        self.p = p
        m = self.m = p.manager
        f, s = p.f, p.s
        self.u_parts = [m.var(v).iff(fn) for _, v, fn in f.internal_outputs]
        self.t_parts = transition_parts(f) + transition_parts(s)
        self.tf_parts = transition_parts(f)
        self.quantify = tuple(sorted(set(p.i_vars) | set(f.cs_vars) | set(s.cs_vars)))
        self.quantify_f = tuple(sorted(set(p.i_vars) | set(f.cs_vars)))
        self.p_parts = self.u_parts + self.t_parts
        self.p_sched = make_schedule(self.p_parts, self.quantify)
        self.q_parts = [self.u_parts + [nc] for nc in nonconformance(f, s)]
        self.q_scheds = [make_schedule(parts, self.quantify) for parts in self.q_parts]
        self.back = {**f.ns_to_cs(), **s.ns_to_cs()}
        self.back_f = f.ns_to_cs()
        self.labels = p.uv_vars
        self.init = f.init_func() & s.init_func()

    def violations(self, zeta: Func) -> Func:
        """Q_zeta(u, v), accumulated one output at a time."""
        q = self.m.false
        for parts, sched in zip(self.q_parts, self.q_scheds):
            q = q | image(parts, zeta, self.quantify, sched)
            if q.is_true:
                break
        return q

    def successors(self, zeta: Func) -> Func:
        """P_zeta(u, v, cs): subset reachable under each (u, v), inputs hidden."""
        return self.m.rename(image(self.p_parts, zeta, self.quantify, self.p_sched), self.back)

    def violating_f_states(self, zeta: Func) -> Func:
        """F successors (over cs1) of the non-conforming members of ``zeta``."""
        m = self.m
        bad = m.disjoin(parts[-1] for parts in self.q_parts)
        img = image(self.p_parts[:len(self.u_parts)] + self.tf_parts + [bad], zeta, self.quantify)
        return m.rename(img, self.back_f)

    def f_image(self, delta: Func) -> Func:
        img = image(self.u_parts + self.tf_parts, delta, self.quantify_f)
        return self.m.rename(img, self.back_f)


def solve_partitioned(p: Problem, trim: bool = True, subset_limit: Optional[int] = None,
                      timeout_s: Optional[float] = None) -> Csf:
    """Fused determinization on the partitioned representation.

    With ``trim`` off, subsets that already contain a non-conforming member are
    still expanded (tracked by the F states paired with the completion state of
    S), which yields the same language after prefix closure but explores more.
    """
    m = p.manager
    t0 = time.perf_counter()
    with _deadline(m, timeout_s):
        eng = _PartitionedEngine(p)
        e = _explore(eng, trim, subset_limit)
        explored = sum(1 for k in e.kinds if k == NORMAL)
        dcn = e.state_of_kind(DCN)
        dcn_edges = sum(1 for s, out in enumerate(e.edges) if s != dcn for _, d in out if d == dcn)
        res = _finish(e, p)
    elapsed = time.perf_counter() - t0
    return Csf(res, p.u_vars, p.v_vars,
               {"flow": "partitioned" if trim else "partitioned-untrimmed",
                "explored": explored, "dcn_edges": dcn_edges, "states": res.n_states,
                "seconds": elapsed})


_TO_DCN, _TO_DCA = -1, -2


def _explore(eng: _PartitionedEngine, trim: bool, subset_limit: Optional[int]) -> ExplicitAutomaton:
    m = eng.m
    index: Dict[Tuple[Func, Func], int] = {}
    keys: List[Tuple[Func, Func]] = []
    queue = deque()

    def intern(key):
        k = index.get(key)
        if k is None:
            if subset_limit is not None and len(keys) >= subset_limit:
                raise ResourceLimitError(f"subset limit of {subset_limit} exceeded")
            k = index[key] = len(keys)
            keys.append(key)
            queue.append(k)
        return k

    intern((eng.init, m.false))
    edges: Dict[int, List[Tuple[Func, int]]] = {}
    while queue:
        au._check_deadline(m)
        k = queue.popleft()
        zeta, delta = keys[k]
        q = eng.violations(zeta)
        out: List[Tuple[Func, int]] = []
        if trim:
            route = trim_on_violation(zeta, q)
            if not route.dcn.is_false:
                out.append((route.dcn, _TO_DCN))
            if route.total_violation:
                edges[k] = out
                continue
            succ = eng.successors(zeta) & route.explore
            parts = m.split_by_prefix(succ, eng.labels)
            stuck = parts.pop(m.false, m.false) & route.explore
            for nxt, pred in parts.items():
                out.append((pred, intern((nxt, m.false))))
        else:
            succ = eng.successors(zeta)
            dsucc = eng.f_image(delta) | eng.violating_f_states(zeta)
            zparts = m.split_by_prefix(succ, eng.labels)
            dparts = m.split_by_prefix(dsucc, eng.labels)
            stuck = m.false
            for z, zp in zparts.items():
                for d, dp in dparts.items():
                    both = zp & dp
                    if both.is_false:
                        continue
                    if z.is_false and d.is_false:
                        stuck = stuck | both
                    else:
                        out.append((both, intern((z, d))))
        if not stuck.is_false:
            out.append((stuck, _TO_DCA))
        edges[k] = out

    n = len(keys)
    dcn, dca = n, n + 1
    accepting = [d.is_false for _, d in keys] + [False, True]
    kinds = [NORMAL] * n + [DCN, DCA]
    fix = {_TO_DCN: dcn, _TO_DCA: dca}
    all_edges = [[(pr, fix.get(d, d)) for pr, d in edges[k]] for k in range(n)]
    all_edges += [[(m.true, dcn)], [(m.true, dca)]]
    subsets = [z for z, _ in keys] + [None, None]
    e = ExplicitAutomaton(m, eng.labels, 0, accepting, kinds, all_edges, subsets)
    return au.trim(e)


# ----------------------------------------------------------------------
# verification

@dataclass
class VerifyReport:
    xp_in_x: bool
    fx_in_s: bool
    s_equiv_fxp: bool

    @property
    def ok(self) -> bool:
        return self.xp_in_x and self.fx_in_s and self.s_equiv_fxp

    def lines(self) -> List[str]:
        mark = lambda b: "PASS" if b else "FAIL"
        return [f"{mark(self.xp_in_x)} (1) X_p <= X",
                f"{mark(self.fx_in_s)} (2) F.X <= S",
                f"{mark(self.s_equiv_fxp)} (3) S == F.X_p"]


def compose_with(p: Problem, x: ExplicitAutomaton) -> SymbolicAutomaton:
    """F composed with an explicit solution, internal wires hidden."""
    f = au.from_machine(p.f)
    return au.hide(au.product(f, au.encode(x, "x")), p.io_vars)


def verify_solution(p: Problem, x, xp: Optional[SymbolicAutomaton] = None,
                    s_lang: Optional[SymbolicAutomaton] = None,
                    timeout_s: Optional[float] = None) -> VerifyReport:
    """Check X_p <= X, F.X <= S, and S == F.X_p."""
    if isinstance(x, Csf):
        x = x.automaton
    m = p.manager
    with _deadline(m, timeout_s):
        if xp is None:
            if p.xp is None:
                raise UsageError("problem carries no particular solution")
            xp = au.from_machine(p.xp)
        if s_lang is None:
            s_lang = au.from_machine(p.s)
        xp_in_x = au.contains(xp, x)
        fx_in_s = au.contains(compose_with(p, x), s_lang)
        f = au.from_machine(p.f)
        fxp = au.hide(au.product(f, xp), p.io_vars)
        s_equiv = au.equivalent(s_lang, fxp)
    return VerifyReport(xp_in_x, fx_in_s, s_equiv)


def machine_automaton(pm: PartitionedMachine, all_states: bool = True) -> ExplicitAutomaton:
    """Explicit automaton of a network, over every latch valuation or the reachable ones."""
    a = au.from_machine(pm)
    m = pm.manager
    if not all_states:
        return au.determinize(a)
    seeds = [a.init] + [m.cube(c) for c in m.enumerate_cubes(m.true, a.cs_vars)]
    return au.determinize(a, seeds=seeds)


def network_automaton(n: Network, all_states: bool = True,
                      node_limit: Optional[int] = DEFAULT_NODE_LIMIT) -> ExplicitAutomaton:
    """Stand-alone explicit automaton of ``n`` over its inputs and outputs."""
    labels, o_names = _label_names(n.inputs, (), (), n.outputs)
    states = [x for l in n.latches for x in (l.state, next_name(l.state))]
    m = Manager(labels + states, node_limit=node_limit)
    var_map = {s: m.index_of(s) for s in n.inputs + states}
    pm = elaborate(n, m, var_map, output_vars={o: m.index_of(k) for o, k in zip(n.outputs, o_names)})
    return machine_automaton(pm, all_states)
