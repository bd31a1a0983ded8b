import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from langeq.dd import Manager
from langeq.errors import FormatError, ResourceLimitError, UsageError

NV = 5


def test_manager_basics():
    m = Manager(["i", "cs1", "cs2", "ns1", "ns2", "o"])
    assert m.var_count == 6
    assert m.var_names == ["i", "cs1", "cs2", "ns1", "ns2", "o"]
    with pytest.raises(FormatError):
        Manager([])
    with pytest.raises(FormatError):
        Manager(["a", "a"])


def test_64_vars():
    m = Manager([f"x{k}" for k in range(64)])
    f = m.var(63)
    assert m.eval(f, {63: 1}) == 1 and m.support(f) == (63,)


def test_constants_and_vars():
    m = Manager(["x", "y"])
    assert m.constant(1).is_true and m.constant(0).is_false
    x, y = m.var("x"), m.var("y")
    assert x(({0: 1})) == 1
    assert x != y
    assert m.var(0) == x  # hash-consed
    with pytest.raises(TypeError):
        bool(x)


def test_apply_examples():
    m = Manager(["i", "cs1", "cs2", "ns1", "ns2"])
    x = m.var("i")
    assert m.apply("and", x, m.negate(x)).is_false
    t1 = m.apply("iff", m.var("ns1"), m.apply("and", m.var("i"), m.var("cs2")))
    assert m.eval(t1, {m.index_of("ns1"): 1, 0: 1, m.index_of("cs2"): 1, 1: 0, 4: 0}) == 1
    c, t = m.var("cs1"), m.var("cs2")
    assert m.ite(c, t, t) == t
    with pytest.raises(UsageError):
        m.apply("nand", x, x)


def test_eval_missing_var():
    m = Manager(["a", "b"])
    with pytest.raises(UsageError):
        m.eval(m.var("a") & m.var("b"), {0: 1})


def test_exists_examples():
    m = Manager(["x", "y", "z"])
    x, y, z = (m.var(k) for k in range(3))
    assert m.exists(x & y, [0]) == y
    f = (x ^ y) | z
    assert m.exists(f, []) == f
    assert m.exists(f, m.support(f)).is_true
    assert m.forall(x | y, [0]) == y


def two_latch_parts(m):
    i, cs1, cs2, ns1, ns2 = (m.var(n) for n in ("i", "cs1", "cs2", "ns1", "ns2"))
    return ns1.iff(i & cs2), ns2.iff(~i | cs1)


def test_and_exists_two_latch():
    m = Manager(["i", "cs1", "cs2", "ns1", "ns2"])
    t1, t2 = two_latch_parts(m)
    zeta = m.cube({1: 0, 2: 0})
    img = m.and_exists(t1 & t2, zeta, [0, 1, 2])
    ns = [m.index_of("ns1"), m.index_of("ns2")]
    got = {tuple(c[v] for v in ns) for c in m.enumerate_cubes(img, ns)}
    assert got == {(0, 0), (0, 1)}
    assert m.and_exists(t1, m.true, []) == t1


def test_sat_count_examples():
    m = Manager(["i", "cs1", "cs2", "ns1", "ns2"])
    assert m.sat_count(m.true, [0, 1]) == 4
    t1, _ = two_latch_parts(m)
    assert m.sat_count(t1, [0, 1, 2, 3]) == 8
    with pytest.raises(UsageError):
        m.sat_count(t1, [0])


def test_rename_transports_support():
    m = Manager(["cs1", "cs2", "ns1", "ns2"])
    f = m.var("ns1") ^ m.var("ns2")
    g = m.rename(f, {2: 0, 3: 1})
    assert set(m.support(g)) <= {0, 1}
    assert g == m.var(0) ^ m.var(1)
    # non-monotone relabelling takes the slow path
    h = m.rename(m.var(0) & ~m.var(2), {0: 3, 2: 1})
    assert h == m.var(3) & ~m.var(1)


def test_node_limit():
    m = Manager([f"x{k}" for k in range(12)], node_limit=10)
    with pytest.raises(ResourceLimitError):
        m.conjoin(m.var(k) ^ m.var(k + 1) for k in range(11))


def test_gc_keeps_live_handles():
    m = Manager(["a", "b", "c", "d"])
    keep = (m.var(0) ^ m.var(1)) & m.var(2)
    for _ in range(50):
        _ = (m.var(0) | m.var(3)) ^ m.var(1)
    del _
    m.collect_garbage()
    assert m.check_reduced()
    assert m.sat_count(keep, range(4)) == 4


def test_split_by_prefix():
    m = Manager(["u", "v", "c0", "c1"])
    u, v, c0, c1 = (m.var(k) for k in range(4))
    f = (u & c0) | (~u & v & c1) | (~u & ~v & c0 & c1)
    parts = m.split_by_prefix(f, [0, 1])
    assert parts[c0] == u
    assert parts[c1] == ~u & v
    assert parts[c0 & c1] == ~u & ~v
    assert m.disjoin(parts.values()).is_true


# ---- random expressions against truth tables --------------------------

OPS = ("and", "or", "xor", "iff", "implies")


def exprs():
    leaf = st.integers(0, NV - 1).map(lambda v: ("var", v)) | st.booleans().map(lambda b: ("const", b))
    return st.recursive(
        leaf,
        lambda kids: st.tuples(st.sampled_from(OPS), kids, kids) | kids.map(lambda e: ("not", e)),
        max_leaves=12)


def build(m, e):
    tag = e[0]
    if tag == "var":
        return m.var(e[1])
    if tag == "const":
        return m.constant(e[1])
    if tag == "not":
        return ~build(m, e[1])
    return m.apply(tag, build(m, e[1]), build(m, e[2]))


def value(e, a):
    tag = e[0]
    if tag == "var":
        return a[e[1]]
    if tag == "const":
        return int(e[1])
    if tag == "not":
        return 1 - value(e[1], a)
    x, y = value(e[1], a), value(e[2], a)
    return {"and": x & y, "or": x | y, "xor": x ^ y, "iff": int(x == y), "implies": int(not x or y)}[tag]


def table(m, f):
    return [m.eval(f, dict(enumerate(bits))) for bits in itertools.product((0, 1), repeat=NV)]


@settings(max_examples=150, deadline=None)
@given(exprs())
def test_apply_matches_truth_table(e):
    m = Manager([f"x{k}" for k in range(NV)])
    f = build(m, e)
    for bits in itertools.product((0, 1), repeat=NV):
        assert m.eval(f, dict(enumerate(bits))) == value(e, bits)
    assert m.sat_count(f, range(NV)) == sum(table(m, f))
    assert m.check_reduced()


@settings(max_examples=100, deadline=None)
@given(exprs(), exprs(), st.sets(st.integers(0, NV - 1)))
def test_and_exists_is_two_step(e1, e2, vs):
    m = Manager([f"x{k}" for k in range(NV)])
    f, g = build(m, e1), build(m, e2)
    assert m.and_exists(f, g, vs) == m.exists(f & g, vs)
    # and the quantifier itself against brute force
    ex = m.exists(f, vs)
    for bits in itertools.product((0, 1), repeat=NV):
        a = dict(enumerate(bits))
        want = any(m.eval(f, {**a, **dict(zip(sorted(vs), alt))})
                   for alt in itertools.product((0, 1), repeat=len(vs)))
        assert m.eval(ex, a) == int(want)
    assert m.forall(f, vs) == ~m.exists(~f, vs)


@settings(max_examples=100, deadline=None)
@given(exprs())
def test_cubes_partition_onset(e):
    m = Manager([f"x{k}" for k in range(NV)])
    f = build(m, e)
    cubes = list(m.enumerate_cubes(f))
    assert m.disjoin(m.cube(c) for c in cubes) == f
    for a, b in itertools.combinations(cubes, 2):
        assert (m.cube(a) & m.cube(b)).is_false
    full = list(m.enumerate_cubes(f, range(NV)))
    assert len(full) == m.sat_count(f, range(NV))


@settings(max_examples=60, deadline=None)
@given(exprs(), st.permutations(list(range(NV))))
def test_rename_any_permutation(e, perm):
    m = Manager([f"x{k}" for k in range(NV)])
    f = build(m, e)
    g = m.rename(f, dict(enumerate(perm)))
    for bits in itertools.product((0, 1), repeat=NV):
        moved = {perm[k]: bits[k] for k in range(NV)}
        assert m.eval(g, moved) == m.eval(f, dict(enumerate(bits)))


def test_restrict_and_pick():
    rng = random.Random(4)
    m = Manager([f"x{k}" for k in range(6)])
    f = m.disjoin(m.cube({v: rng.randint(0, 1) for v in rng.sample(range(6), 3)}) for _ in range(5))
    a = m.pick(f)
    assert m.eval(f, {**{v: 0 for v in range(6)}, **a}) == 1
    r = m.restrict(f, {0: 1})
    assert 0 not in m.support(r)
    assert m.pick(m.false) is None
