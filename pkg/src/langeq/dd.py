"""Reduced ordered binary decision diagrams.

A small, self-contained ROBDD package: hash-consed unique table, memoized
apply/ite, existential and universal quantification, the relational product
``and_exists``, variable renaming and model counting.

Nodes are plain integers indexing parallel arrays owned by a `Manager`;
``0`` and ``1`` are the terminals. The level of a variable equals its index:
the order is the order of creation and is never changed afterwards (new
variables may only be appended at the bottom). User code holds `Func`
handles, which keep their root alive; unreferenced nodes are reclaimed by
mark-and-sweep between top-level operations.
"""
from __future__ import annotations

import time
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import FormatError, ResourceLimitError, SolverTimeout, UsageError

__all__ = ["Manager", "Func", "DEFAULT_NODE_LIMIT"]

DEFAULT_NODE_LIMIT = 1 << 22
_TERMINAL_LEVEL = 1 << 30

# op codes for the binary apply cache
_AND, _OR, _XOR = 0, 1, 2
_NOT, _EXISTS, _FORALL, _AND_EXISTS, _ITE, _RENAME = 3, 4, 5, 6, 7, 8


class Manager:
    """Owner of the node table and all functions built over its variables.

    A manager (and every `Func` it hands out) must be used from one thread at
    a time.
    """

    def __init__(self, var_names: Sequence[str], node_limit: Optional[int] = DEFAULT_NODE_LIMIT):
        var_names = list(var_names)
        if not var_names:
            raise FormatError("a manager needs at least one variable")
        self._names: List[str] = []
        self._index: Dict[str, int] = {}
        for name in var_names:
            self._declare(name)
        self.node_limit = node_limit
        self.deadline: Optional[float] = None
        # node arrays; entries 0 and 1 are the terminals
        self._var: List[int] = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._lo: List[int] = [0, 1]
        self._hi: List[int] = [0, 1]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self._free: List[int] = []
        self._cache: Dict[tuple, int] = {}
        self._refs: Dict[int, int] = {}
        self._gc_threshold = 1 << 16
        self._allocs = 0
        self.false = Func(self, 0)
        self.true = Func(self, 1)

    # ------------------------------------------------------------------
    # variables

    def _declare(self, name: str) -> int:
        if not isinstance(name, str) or not name:
            raise FormatError(f"invalid variable name {name!r}")
        if name in self._index:
            raise FormatError(f"duplicate variable name {name!r}")
        self._index[name] = len(self._names)
        self._names.append(name)
        return self._index[name]

    def add_var(self, name: str) -> int:
        """Append a new variable at the bottom of the order."""
        return self._declare(name)

    def fresh_name(self, stem: str) -> str:
        name, k = stem, 0
        while name in self._index:
            k += 1
            name = f"{stem}#{k}"
        return name

    @property
    def var_count(self) -> int:
        return len(self._names)

    @property
    def var_names(self) -> List[str]:
        return list(self._names)

    def name_of(self, v: int) -> str:
        self._check_var(v)
        return self._names[v]

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown variable {name!r}") from None

    def has_var(self, name: str) -> bool:
        return name in self._index

    def _check_var(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < len(self._names):
            raise UsageError(f"invalid variable index {v!r}")

    def var(self, v) -> "Func":
        """Positive literal of variable ``v`` (index or name)."""
        if isinstance(v, str):
            v = self.index_of(v)
        self._check_var(v)
        return self._wrap(self._mk(v, 0, 1))

    def nvar(self, v) -> "Func":
        return ~self.var(v)

    def constant(self, b) -> "Func":
        return self.true if b else self.false

    def cube(self, assignment: Mapping[int, int]) -> "Func":
        """Conjunction of literals, one per entry of ``assignment``."""
        r = 1
        for v in sorted(assignment, reverse=True):
            self._check_var(v)
            r = self._mk(v, r, 0) if not assignment[v] else self._mk(v, 0, r)
        return self._wrap(r)

    # ------------------------------------------------------------------
    # bookkeeping

    def __len__(self) -> int:
        """Number of live internal nodes (terminals excluded)."""
        return len(self._unique)

    def _wrap(self, root: int) -> "Func":
        return Func(self, root)

    def _mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        r = self._unique.get(key)
        if r is not None:
            return r
        if self.node_limit is not None and len(self._unique) >= self.node_limit:
            raise ResourceLimitError(f"node limit of {self.node_limit} exceeded")
        self._allocs += 1
        if self.deadline is not None and not self._allocs & 1023:
            if time.monotonic() > self.deadline:
                raise SolverTimeout("deadline exceeded during BDD operation")
        if self._free:
            r = self._free.pop()
            self._var[r] = v
            self._lo[r] = lo
            self._hi[r] = hi
        else:
            r = len(self._var)
            self._var.append(v)
            self._lo.append(lo)
            self._hi.append(hi)
        self._unique[key] = r
        return r

    def _incref(self, root: int) -> None:
        self._refs[root] = self._refs.get(root, 0) + 1

    def _decref(self, root: int) -> None:
        c = self._refs.get(root, 0) - 1
        if c <= 0:
            self._refs.pop(root, None)
        else:
            self._refs[root] = c

    def _enter(self) -> None:
        """Safe point at the start of each public operation."""
        n = len(self._unique)
        if n > self._gc_threshold or (self.node_limit is not None and n > 0.8 * self.node_limit):
            self.collect_garbage()
        if len(self._cache) > 4 * self._gc_threshold:
            self._cache.clear()

    def collect_garbage(self) -> int:
        """Reclaim nodes unreachable from any live `Func`; returns the count freed."""
        marked = bytearray(len(self._var))
        marked[0] = marked[1] = 1
        stack = list(self._refs)
        lo, hi = self._lo, self._hi
        while stack:
            n = stack.pop()
            if marked[n]:
                continue
            marked[n] = 1
            stack.append(lo[n])
            stack.append(hi[n])
        freed = 0
        for key, n in list(self._unique.items()):
            if not marked[n]:
                del self._unique[key]
                self._free.append(n)
                freed += 1
        self._cache.clear()
        self._gc_threshold = max(1 << 16, 2 * len(self._unique))
        return freed

    def clear_cache(self) -> None:
        self._cache.clear()

    def check_reduced(self) -> bool:
        """Structural audit: no redundant node, no duplicate triple."""
        seen = set()
        for (v, lo, hi), n in self._unique.items():
            if lo == hi or (v, lo, hi) in seen:
                return False
            if self._var[n] != v or self._lo[n] != lo or self._hi[n] != hi:
                return False
            if v >= self._var[lo] or v >= self._var[hi]:
                return False
            seen.add((v, lo, hi))
        return True

    # ------------------------------------------------------------------
    # recursive kernels over raw node ids

    def _not(self, f: int) -> int:
        if f <= 1:
            return 1 - f
        key = (_NOT, f)
        r = self._cache.get(key)
        if r is None:
            r = self._mk(self._var[f], self._not(self._lo[f]), self._not(self._hi[f]))
            self._cache[key] = r
        return r

    def _apply(self, op: int, f: int, g: int) -> int:
        if op == _AND:
            if f == 0 or g == 0:
                return 0
            if f == 1 or f == g:
                return g
            if g == 1:
                return f
        elif op == _OR:
            if f == 1 or g == 1:
                return 1
            if f == 0 or f == g:
                return g
            if g == 0:
                return f
        else:
            if f == g:
                return 0
            if f == 0:
                return g
            if g == 0:
                return f
            if f == 1:
                return self._not(g)
            if g == 1:
                return self._not(f)
        if f > g:
            f, g = g, f
        key = (op, f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        vf, vg = self._var[f], self._var[g]
        if vf == vg:
            v = vf
            r = self._mk(v, self._apply(op, self._lo[f], self._lo[g]),
                         self._apply(op, self._hi[f], self._hi[g]))
        elif vf < vg:
            r = self._mk(vf, self._apply(op, self._lo[f], g), self._apply(op, self._hi[f], g))
        else:
            r = self._mk(vg, self._apply(op, f, self._lo[g]), self._apply(op, f, self._hi[g]))
        self._cache[key] = r
        return r

    def _ite(self, c: int, t: int, e: int) -> int:
        if c == 1:
            return t
        if c == 0:
            return e
        if t == e:
            return t
        if t == 1 and e == 0:
            return c
        if t == 0 and e == 1:
            return self._not(c)
        if t == 1:
            return self._apply(_OR, c, e)
        if e == 0:
            return self._apply(_AND, c, t)
        key = (_ITE, c, t, e)
        r = self._cache.get(key)
        if r is not None:
            return r
        v = min(self._var[c], self._var[t], self._var[e])
        c0, c1 = self._cof(c, v)
        t0, t1 = self._cof(t, v)
        e0, e1 = self._cof(e, v)
        r = self._mk(v, self._ite(c0, t0, e0), self._ite(c1, t1, e1))
        self._cache[key] = r
        return r

    def _cof(self, f: int, v: int) -> Tuple[int, int]:
        if self._var[f] == v:
            return self._lo[f], self._hi[f]
        return f, f

    def _cube_of(self, vs: Iterable[int]) -> int:
        r = 1
        for v in sorted(set(vs), reverse=True):
            self._check_var(v)
            r = self._mk(v, 0, r)
        return r

    def _exists(self, f: int, c: int, op: int = _EXISTS) -> int:
        if f <= 1 or c == 1:
            return f
        var = self._var
        vf = var[f]
        while c != 1 and var[c] < vf:
            c = self._hi[c]
        if c == 1:
            return f
        key = (op, f, c)
        r = self._cache.get(key)
        if r is not None:
            return r
        if var[c] == vf:
            cn = self._hi[c]
            lo = self._exists(self._lo[f], cn, op)
            if op == _EXISTS:
                r = 1 if lo == 1 else self._apply(_OR, lo, self._exists(self._hi[f], cn, op))
            else:
                r = 0 if lo == 0 else self._apply(_AND, lo, self._exists(self._hi[f], cn, op))
        else:
            r = self._mk(vf, self._exists(self._lo[f], c, op), self._exists(self._hi[f], c, op))
        self._cache[key] = r
        return r

    def _and_exists(self, f: int, g: int, c: int) -> int:
        if f == 0 or g == 0:
            return 0
        if c == 1:
            return self._apply(_AND, f, g)
        if f == 1 or f == g:
            return self._exists(g, c)
        if g == 1:
            return self._exists(f, c)
        if f > g:
            f, g = g, f
        var = self._var
        top = min(var[f], var[g])
        while c != 1 and var[c] < top:
            c = self._hi[c]
        if c == 1:
            return self._apply(_AND, f, g)
        key = (_AND_EXISTS, f, g, c)
        r = self._cache.get(key)
        if r is not None:
            return r
        f0, f1 = self._cof(f, top)
        g0, g1 = self._cof(g, top)
        if var[c] == top:
            cn = self._hi[c]
            r0 = self._and_exists(f0, g0, cn)
            if r0 == 1:
                r = 1
            else:
                r = self._apply(_OR, r0, self._and_exists(f1, g1, cn))
        else:
            r = self._mk(top, self._and_exists(f0, g0, c), self._and_exists(f1, g1, c))
        self._cache[key] = r
        return r

    def _support(self, f: int) -> set:
        seen = set()
        out = set()
        stack = [f]
        while stack:
            n = stack.pop()
            if n <= 1 or n in seen:
                continue
            seen.add(n)
            out.add(self._var[n])
            stack.append(self._lo[n])
            stack.append(self._hi[n])
        return out

    def _relabel(self, f: int, table: Dict[int, int], memo: Dict[int, int]) -> int:
        if f <= 1:
            return f
        r = memo.get(f)
        if r is None:
            v = self._var[f]
            r = self._mk(table.get(v, v), self._relabel(self._lo[f], table, memo),
                         self._relabel(self._hi[f], table, memo))
            memo[f] = r
        return r

    def _compose_vars(self, f: int, table: Dict[int, int], memo: Dict[int, int]) -> int:
        if f <= 1:
            return f
        r = memo.get(f)
        if r is None:
            v = self._var[f]
            lit = self._mk(table.get(v, v), 0, 1)
            r = self._ite(lit, self._compose_vars(self._hi[f], table, memo),
                          self._compose_vars(self._lo[f], table, memo))
            memo[f] = r
        return r

    def _restrict(self, f: int, values: Dict[int, int], memo: Dict[int, int]) -> int:
        if f <= 1:
            return f
        r = memo.get(f)
        if r is None:
            v = self._var[f]
            if v in values:
                r = self._restrict(self._hi[f] if values[v] else self._lo[f], values, memo)
            else:
                r = self._mk(v, self._restrict(self._lo[f], values, memo),
                             self._restrict(self._hi[f], values, memo))
            memo[f] = r
        return r

    # ------------------------------------------------------------------
    # public operations on Funcs

    def _own(self, *fs: "Func") -> None:
        for f in fs:
            if not isinstance(f, Func) or f.manager is not self:
                raise UsageError("function belongs to a different manager")

    def apply(self, op: str, f: "Func", g: "Func") -> "Func":
        self._own(f, g)
        self._enter()
        if op == "and":
            r = self._apply(_AND, f.root, g.root)
        elif op == "or":
            r = self._apply(_OR, f.root, g.root)
        elif op == "xor":
            r = self._apply(_XOR, f.root, g.root)
        elif op == "iff":
            r = self._not(self._apply(_XOR, f.root, g.root))
        elif op == "implies":
            r = self._apply(_OR, self._not(f.root), g.root)
        else:
            raise UsageError(f"unknown operator {op!r}")
        return self._wrap(r)

    def negate(self, f: "Func") -> "Func":
        self._own(f)
        self._enter()
        return self._wrap(self._not(f.root))

    def ite(self, c: "Func", t: "Func", e: "Func") -> "Func":
        self._own(c, t, e)
        self._enter()
        return self._wrap(self._ite(c.root, t.root, e.root))

    def conjoin(self, fs: Iterable["Func"]) -> "Func":
        r = self.true
        for f in fs:
            r = r & f
        return r

    def disjoin(self, fs: Iterable["Func"]) -> "Func":
        r = self.false
        for f in fs:
            r = r | f
        return r

    def exists(self, f: "Func", vs: Iterable[int]) -> "Func":
        self._own(f)
        self._enter()
        c = self._wrap(self._cube_of(vs))
        return self._wrap(self._exists(f.root, c.root))

    def forall(self, f: "Func", vs: Iterable[int]) -> "Func":
        self._own(f)
        self._enter()
        c = self._wrap(self._cube_of(vs))
        return self._wrap(self._exists(f.root, c.root, _FORALL))

    def and_exists(self, f: "Func", g: "Func", vs: Iterable[int]) -> "Func":
        """``exists(f & g, vs)`` without building the conjunction."""
        self._own(f, g)
        self._enter()
        c = self._wrap(self._cube_of(vs))
        return self._wrap(self._and_exists(f.root, g.root, c.root))

    def support(self, f: "Func") -> Tuple[int, ...]:
        self._own(f)
        return tuple(sorted(self._support(f.root)))

    def eval(self, f: "Func", assignment: Mapping[int, int]) -> int:
        self._own(f)
        n = f.root
        while n > 1:
            v = self._var[n]
            if v not in assignment:
                raise UsageError(f"assignment misses support variable {self._names[v]!r}")
            n = self._hi[n] if assignment[v] else self._lo[n]
        return n

    def restrict(self, f: "Func", assignment: Mapping[int, int]) -> "Func":
        """Cofactor of ``f`` w.r.t. a partial assignment."""
        self._own(f)
        self._enter()
        return self._wrap(self._restrict(f.root, dict(assignment), {}))

    def rename(self, f: "Func", mapping: Mapping[int, int]) -> "Func":
        """Simultaneous variable-for-variable substitution.

        Order-preserving maps (the usual ns -> cs transport) relabel nodes in
        place; anything else falls back to an ite-based rebuild.
        """
        self._own(f)
        self._enter()
        table = {}
        for a, b in mapping.items():
            self._check_var(a)
            self._check_var(b)
            if a != b:
                table[a] = b
        if len(set(table.values())) != len(table):
            raise UsageError("rename map must be injective")
        if not table:
            return f
        supp = sorted(self._support(f.root))
        image = [table.get(v, v) for v in supp]
        if all(a < b for a, b in zip(image, image[1:])):
            return self._wrap(self._relabel(f.root, table, {}))
        return self._wrap(self._compose_vars(f.root, table, {}))

    def sat_count(self, f: "Func", over: Iterable[int]) -> int:
        """Number of satisfying assignments over exactly the variables ``over``."""
        self._own(f)
        over = sorted(set(over))
        pos = {v: k for k, v in enumerate(over)}
        for v in self._support(f.root):
            if v not in pos:
                raise UsageError(f"support variable {self._names[v]!r} not counted")
        n = len(over)
        memo: Dict[int, int] = {}

        def level(node):
            return n if node <= 1 else pos[self._var[node]]

        def count(node):
            # models over variables from level(node) to the end
            if node <= 1:
                return node
            r = memo.get(node)
            if r is None:
                k = level(node)
                lo, hi = self._lo[node], self._hi[node]
                r = (count(lo) << (level(lo) - k - 1)) + (count(hi) << (level(hi) - k - 1))
                memo[node] = r
            return r

        return count(f.root) << level(f.root)

    def enumerate_cubes(self, f: "Func", over: Optional[Iterable[int]] = None) -> Iterator[Dict[int, int]]:
        """Disjoint cubes (BDD paths) covering ``f``; absent keys are don't-cares.

        With ``over`` given, every cube is expanded into full minterms over
        those variables.
        """
        self._own(f)
        path: Dict[int, int] = {}

        def walk(node):
            if node == 0:
                return
            if node == 1:
                yield dict(path)
                return
            v = self._var[node]
            path[v] = 0
            yield from walk(self._lo[node])
            path[v] = 1
            yield from walk(self._hi[node])
            del path[v]

        if over is None:
            yield from walk(f.root)
            return
        over = sorted(set(over))
        supp = self._support(f.root)
        if not supp <= set(over):
            raise UsageError("cube enumeration domain misses support variables")
        for cube in walk(f.root):
            free = [v for v in over if v not in cube]
            for bits in range(1 << len(free)):
                full = dict(cube)
                for k, v in enumerate(free):
                    full[v] = (bits >> k) & 1
                yield full

    def pick(self, f: "Func") -> Optional[Dict[int, int]]:
        """One satisfying cube of ``f`` or None if unsatisfiable."""
        for cube in self.enumerate_cubes(f):
            return cube
        return None

    def split_by_prefix(self, f: "Func", prefix_vars: Iterable[int]) -> Dict["Func", "Func"]:
        """Partition ``f`` by the valuations of variables ordered above the rest.

        Every ``prefix_vars`` variable must precede, in the order, every other
        variable in the support of ``f``. Returns a map from each distinct
        cofactor ``g`` (a function of the remaining variables) to the predicate
        over ``prefix_vars`` selecting it. The predicates partition the whole
        prefix space; the constant-false cofactor is included when reached.
        """
        self._own(f)
        self._enter()
        prefix = set(prefix_vars)
        rest = self._support(f.root) - prefix
        if prefix and rest and max(prefix & self._support(f.root) or {-1}) > min(rest):
            raise UsageError("prefix variables must precede all other support variables")
        memo: Dict[int, Dict[int, int]] = {}

        def split(node):
            if node <= 1 or self._var[node] not in prefix:
                return {node: 1}
            r = memo.get(node)
            if r is not None:
                return r
            v = self._var[node]
            lo, hi = split(self._lo[node]), split(self._hi[node])
            r = {}
            for child in set(lo) | set(hi):
                r[child] = self._mk(v, lo.get(child, 0), hi.get(child, 0))
            memo[node] = r
            return r

        parts = split(f.root)
        return {self._wrap(c): self._wrap(p) for c, p in parts.items()}

    def node_count(self, f: "Func") -> int:
        """Nodes in the DAG of ``f`` including terminals reached."""
        seen = set()
        stack = [f.root]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if n > 1:
                stack.append(self._lo[n])
                stack.append(self._hi[n])
        return len(seen)

    def to_expr(self, f: "Func") -> str:
        """Sum-of-cubes rendering, for debugging."""
        if f.root <= 1:
            return str(f.root)
        terms = []
        for cube in self.enumerate_cubes(f):
            lits = [("" if b else "!") + self._names[v] for v, b in sorted(cube.items())]
            terms.append(" & ".join(lits) or "1")
        return " | ".join(terms)


class Func:
    """Handle to a canonical Boolean function in a `Manager`.

    Two handles from the same manager compare equal iff they denote the same
    function.
    """

    __slots__ = ("manager", "root")

    def __init__(self, manager: Manager, root: int):
        self.manager = manager
        self.root = root
        manager._incref(root)

    def __del__(self):
        try:
            self.manager._decref(self.root)
        except Exception:  # interpreter shutdown
            pass

    def __eq__(self, other):
        return isinstance(other, Func) and other.manager is self.manager and other.root == self.root

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((id(self.manager), self.root))

    def __repr__(self):
        if self.root <= 1:
            return f"Func({bool(self.root)})"
        return f"Func(#{self.root} @ {self.manager._names[self.manager._var[self.root]]})"

    def __bool__(self):
        raise TypeError("use .is_true / .is_false to test a Func")

    @property
    def is_true(self) -> bool:
        return self.root == 1

    @property
    def is_false(self) -> bool:
        return self.root == 0

    def __and__(self, other):
        return self.manager.apply("and", self, other)

    def __or__(self, other):
        return self.manager.apply("or", self, other)

    def __xor__(self, other):
        return self.manager.apply("xor", self, other)

    def __invert__(self):
        return self.manager.negate(self)

    def iff(self, other):
        return self.manager.apply("iff", self, other)

    def implies(self, other):
        return self.manager.apply("implies", self, other)

    def exists(self, vs):
        return self.manager.exists(self, vs)

    def forall(self, vs):
        return self.manager.forall(self, vs)

    def support(self):
        return self.manager.support(self)

    def __call__(self, assignment):
        return self.manager.eval(self, assignment)

    def le(self, other) -> bool:
        """Implication check ``self <= other``."""
        return (self & ~other).is_false
