import itertools
import random

import pytest

from langeq.automata import NORMAL, ExplicitAutomaton
from langeq.dd import Manager
from langeq.generate import two_latch, random_network
from langeq.netlist import elaborate, next_name


_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(item.user_properties).get("detail", "")
        _CRITERIA.append((mark.args[0], mark.args[1], rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, detail in sorted(_CRITERIA):
        line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def two_latch_net():
    return two_latch()


def machine_of(net, m=None):
    """Elaborate ``net`` on its own manager: labels first, then cs/ns pairs."""
    names = list(net.inputs) + [o for o in net.outputs if o not in net.inputs]
    for l in net.latches:
        names += [l.state, next_name(l.state)]
    if m is None:
        m = Manager(names)
    var_map = {s: m.index_of(s) for s in names}
    return m, elaborate(net, m, var_map)


def random_nfa(rng, n_states, n_labels, m=None, prefix="a"):
    """Random (possibly nondeterministic, incomplete) automaton over ``n_labels`` bits."""
    if m is None:
        m = Manager([f"{prefix}{k}" for k in range(n_labels)])
    labels = tuple(m.index_of(f"{prefix}{k}") for k in range(n_labels))
    edges = []
    for _ in range(n_states):
        out = []
        for _ in range(rng.randint(0, 3)):
            cube = {v: rng.randint(0, 1) for v in labels if rng.random() < 0.6}
            out.append((m.cube(cube), rng.randrange(n_states)))
        edges.append(out)
    acc = [rng.random() < 0.5 for _ in range(n_states)]
    return ExplicitAutomaton(m, labels, 0, acc, [NORMAL] * n_states, edges)


def letters(label_vars):
    for bits in itertools.product((0, 1), repeat=len(label_vars)):
        yield dict(zip(label_vars, bits))


def words(label_vars, max_len):
    """All words of length <= max_len, as lists of assignments."""
    alphabet = list(letters(label_vars))
    for n in range(max_len + 1):
        for w in itertools.product(alphabet, repeat=n):
            yield list(w)


def random_case(seed, max_latches=8, max_inputs=3, max_outputs=2):
    """Seeded random circuit and a random proper latch split."""
    rng = random.Random(seed)
    nl = rng.randint(2, max_latches)
    net = random_network(rng, rng.randint(1, max_inputs), rng.randint(1, max_outputs), nl,
                         name=f"rnd{seed}")
    k = rng.randint(1, nl - 1)
    x = rng.sample([l.state for l in net.latches], k)
    return net, x


def enlargements(e):
    """Every single-edge enlargement of ``e`` at a non-DCA state.

    The new edge carries one missing label minterm to the accepting universal
    sink (the existing DCA state, or a fresh one).
    """
    from dataclasses import replace
    from langeq.automata import DCA
    m = e.manager
    sink = e.state_of_kind(DCA)
    base = e
    if sink is None:
        sink = e.n_states
        base = replace(e, accepting=e.accepting + [True], kinds=e.kinds + [DCA],
                       edges=e.edges + [[(m.true, sink)]],
                       subsets=None if e.subsets is None else e.subsets + [None])
    for s in range(e.n_states):
        if e.kinds[s] == DCA:
            continue
        covered = m.disjoin(p for p, _ in e.edges[s])
        for c in m.enumerate_cubes(~covered, e.label_vars):
            edges = [list(out) for out in base.edges]
            edges[s].append((m.cube(c), sink))
            yield (s, c), replace(base, edges=edges)
