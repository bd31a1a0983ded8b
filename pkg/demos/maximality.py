"""Show that the computed flexibility cannot be enlarged.

Any extra behaviour for the unknown component, here a single new edge into
the accept-everything sink, lets the composed system produce an output
sequence the specification forbids.  We print the first such enlargement and
the offending trace.
"""
import argparse
from dataclasses import replace

from langeq import automata as au
from langeq.generate import two_latch, shift_family
from langeq.solver import compose_with, make_problem, solve_partitioned, verify_solution

CASES = {
    "two_latch": (two_latch, ["cs_2"]),
    "shift4": (lambda: shift_family(4), ["r3"]),
}


def first_enlargement(e):
    m = e.manager
    sink = e.state_of_kind(au.DCA)
    if sink is None:
        sink = e.n_states
        e = replace(e, accepting=e.accepting + [True], kinds=e.kinds + [au.DCA],
                    edges=e.edges + [[(m.true, sink)]], subsets=None)
    for s in range(e.n_states):
        if e.kinds[s] == au.DCA:
            continue
        missing = ~m.disjoin(g for g, _ in e.edges[s])
        if not missing.is_false:
            cube = m.pick(missing)
            edges = [list(out) for out in e.edges]
            edges[s].append((m.cube(cube), sink))
            return s, cube, replace(e, edges=edges)
    return None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("case", choices=sorted(CASES), nargs="?", default="two_latch")
    args = ap.parse_args(argv)

    build, x = CASES[args.case]
    p = make_problem(build(), x)
    csf = solve_partitioned(p)
    m = p.manager
    print(f"Csf has {csf.n_states} states; checks: {', '.join(verify_solution(p, csf).lines())}")
    found = first_enlargement(csf.automaton)
    if found is None:
        print("the Csf is already universal; nothing to enlarge")
        return
    s, cube, bigger = found
    print(f"add edge from state {s} on {{{', '.join(f'{m.name_of(v)}={b}' for v, b in cube.items())}}}")
    report = verify_solution(p, bigger)
    print("checks:", ", ".join(report.lines()))
    trace = au.find_counterexample(compose_with(p, bigger), au.from_machine(p.s))
    if trace:
        io = p.io_vars
        print("forbidden trace:", " ".join("".join(str(l[v]) for v in io) for l in trace),
              f"(bits {', '.join(m.name_of(v) for v in io)})")


if __name__ == "__main__":
    main()
