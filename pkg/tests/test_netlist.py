import itertools
import random

import pytest

from langeq.dd import Manager
from langeq.errors import FormatError, UsageError
from langeq.generate import TWO_LATCH_BLIF, random_network, shift_family
from langeq.netlist import (elaborate, latch_split, parse_blif_lite,
                            parse_split_spec)

from conftest import machine_of

# three latches, two inputs: small enough to reason about by hand
THREE_LATCH = """\
.model tri
.inputs a b
.outputs z
.latch d0 l0 0
.latch d1 l1 1
.latch d2 l2 0
.names a l2 d0
11 1
.names l0 b d1
1- 1
-1 1
.names l1 d2
0 1
.names l0 l1 l2 z
1-1 1
.end
"""


def test_parse_two_latch(two_latch_net):
    assert two_latch_net.inputs == ["i"] and two_latch_net.outputs == ["o"]
    assert [l.state for l in two_latch_net.latches] == ["cs_1", "cs_2"]
    assert two_latch_net.initial_state == {"cs_1": 0, "cs_2": 0}


def test_latch_init_defaults_to_zero():
    n = parse_blif_lite(".inputs a\n.outputs q\n.latch a q\n.end\n")
    assert n.latches[0].init == 0


@pytest.mark.parametrize("text, line", [
    (".inputs a\n.outputs y\n.names y a y\n11 1\n", 3),          # reads its own output
    (".inputs a\n.outputs y\n.names a y\n1 1\n0 0\n", 5),        # mixed phase
    (".inputs a\n.outputs y\n.names a y\n12 1\n", 4),            # bad cube
    (".inputs a\n.outputs y\n.latch a y 2\n", 3),                 # bad init
    (".inputs a\n.outputs y\n.frobnicate\n", 3),
    (".inputs a\n.outputs y\n.names a y\n1 1\n.end\n.names a w\n", 6),
    (".inputs a\n.outputs y\n.names a y\n1 1\n.names a y\n0 1\n", 5),  # redefinition
    (".inputs a\n.outputs y\n.names q y\n1 1\n", 3),              # undefined fanin
])
def test_parse_errors_carry_lines(text, line):
    with pytest.raises(FormatError) as info:
        parse_blif_lite(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_continuation_and_comments():
    text = ".model c # comment\n.inputs a \\\n  b\n.outputs y\n.names a b y\n11 1\n.end\n"
    n = parse_blif_lite(text)
    assert n.inputs == ["a", "b"]


def test_constant_gates():
    n = parse_blif_lite(".inputs a\n.outputs y z\n.names y\n.names z\n1\n.end\n")
    m, pm = machine_of(n)
    outs = {name: f for name, _, f in pm.outputs}
    assert outs["y"].is_false
    assert outs["z"].is_true


def test_elaborate_two_latch(two_latch_net):
    m, pm = machine_of(two_latch_net)
    i, c1, c2 = m.var("i"), m.var("cs_1"), m.var("cs_2")
    t1, t2 = pm.next_state
    assert t1 == i & c2
    assert t2 == ~i | c1
    (_, o_var, o_fn), = pm.outputs
    assert o_fn == c1 ^ c2
    assert o_var == m.index_of("o")


def test_elaborate_needs_all_vars(two_latch_net):
    m = Manager(["i", "cs_1", "cs_1'"])
    with pytest.raises(UsageError):
        elaborate(two_latch_net, m, {"i": 0, "cs_1": 1, "cs_1'": 2})


@pytest.mark.parametrize("seed", range(5))
def test_elaborate_matches_simulation(seed):
    rng = random.Random(seed)
    n = random_network(rng, 2, 2, 4)
    m, pm = machine_of(n)
    for bits in itertools.product((0, 1), repeat=len(n.inputs) + len(n.latches)):
        ins = dict(zip(n.inputs, bits))
        st = dict(zip(n.latch_states, bits[len(n.inputs):]))
        outs, nxt = n.simulate(ins, st)
        a = {m.index_of(s): b for s, b in {**ins, **st}.items()}
        for (state, _, _, t, _), l in zip(pm.latches, n.latches):
            assert m.eval(t, a) == nxt[l.state]
        for name, _, f in pm.outputs:
            assert m.eval(f, a) == outs[name]


def test_blif_round_trip():
    rng = random.Random(7)
    n = random_network(rng, 2, 2, 5)
    back = parse_blif_lite(n.to_blif())
    for bits in itertools.product((0, 1), repeat=2 + 5):
        ins = dict(zip(n.inputs, bits))
        st = dict(zip(n.latch_states, bits[2:]))
        assert back.simulate(ins, st) == n.simulate(ins, st)


def composed_step(split, ins, f_state, x_state):
    """One cycle of F and X_p wired together through the u/v buffers."""
    v = {w: x_state[src] for w, src in split.v_sources.items()}
    f_out, f_next = split.fixed.simulate({**ins, **v}, f_state)
    u = {w: f_out[w] for w in split.u_signals}
    _, x_next = split.unknown.simulate(u, x_state)
    return f_out, f_next, x_next


@pytest.mark.parametrize("x", [["cs_2"], ["cs_1"]])
def test_split_composes_back(two_latch_net, x):
    sp = latch_split(two_latch_net, x)
    assert [l.state for l in sp.unknown.latches] == x
    for st in itertools.product((0, 1), repeat=2):
        state = dict(zip(two_latch_net.latch_states, st))
        for i in (0, 1):
            want_out, want_next = two_latch_net.simulate({"i": i}, state)
            fs = {k: state[k] for k in sp.fixed.latch_states}
            xs = {k: state[k] for k in sp.unknown.latch_states}
            out, f_next, x_next = composed_step(sp, {"i": i}, fs, xs)
            assert {o: out[o] for o in two_latch_net.outputs} == want_out
            assert {**f_next, **x_next} == want_next


@pytest.mark.parametrize("seed", range(8))
def test_random_split_composes_back(seed):
    rng = random.Random(100 + seed)
    n = random_network(rng, 2, 2, rng.randint(2, 5))
    x = rng.sample(n.latch_states, rng.randint(1, len(n.latches) - 1))
    sp = latch_split(n, x)
    for bits in itertools.product((0, 1), repeat=len(n.latches) + len(n.inputs)):
        state = dict(zip(n.latch_states, bits))
        ins = dict(zip(n.inputs, bits[len(n.latches):]))
        want_out, want_next = n.simulate(ins, state)
        fs = {k: state[k] for k in sp.fixed.latch_states}
        xs = {k: state[k] for k in sp.unknown.latch_states}
        out, f_next, x_next = composed_step(sp, ins, fs, xs)
        assert {o: out[o] for o in n.outputs} == want_out
        assert {**f_next, **x_next} == want_next


def test_three_latch_split_counts():
    n = parse_blif_lite(THREE_LATCH)
    sp = latch_split(n, ["l1"])
    assert len(sp.fixed.latches) == 2 and len(sp.unknown.latches) == 1
    assert sp.u_signals and sp.v_signals
    assert set(sp.u_sources.values()) == {"l0", "b"}
    assert set(sp.v_sources.values()) == {"l1"}


@pytest.mark.parametrize("bad", [[], ["cs_1", "cs_2"], ["nope"]])
def test_split_requires_proper_subset(two_latch_net, bad):
    with pytest.raises(UsageError):
        latch_split(two_latch_net, bad)


def test_split_spec():
    n = shift_family(5)
    assert parse_split_spec(n, "k:2") == ["r0", "r1"]
    assert parse_split_spec(n, "r3,r4") == ["r3", "r4"]
    with pytest.raises(UsageError):
        parse_split_spec(n, "k:5")
    with pytest.raises(UsageError):
        parse_split_spec(n, "r9")
    with pytest.raises(FormatError):
        parse_split_spec(n, "k:x")


def test_wire_names_avoid_collisions():
    text = TWO_LATCH_BLIF.replace(".outputs o", ".outputs o u_i").replace(
        ".end", ".names i u_i\n1 1\n.end")
    n = parse_blif_lite(text)
    sp = latch_split(n, ["cs_2"])
    assert "u_i" not in sp.u_signals
    assert set(sp.u_sources.values()) == {"i", "cs_1"}
