"""Time the partitioned and monolithic flows on growing shift registers.

The last register of an n-stage chain is the unknown.  The monolithic flow
builds one transition relation over all latches and its cost grows quickly;
the partitioned flow keeps one conjunct per latch and stays flat.
"""
import argparse

from langeq.errors import ResourceLimitError
from langeq.generate import shift_family
from langeq.solver import make_problem, solve_monolithic, solve_partitioned


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="4,6,8,10,12", help="comma-separated chain lengths")
    ap.add_argument("--timeout-s", type=float, default=10.0)
    args = ap.parse_args(argv)

    print(f"{'n':>3} {'states':>6} {'part_s':>8} {'mono_s':>8}")
    mono_gave_up = False
    for n in (int(s) for s in args.sizes.split(",")):
        p = make_problem(shift_family(n), [f"r{n - 1}"])
        part = solve_partitioned(p, timeout_s=args.timeout_s)
        mono_s = "CNC"
        if not mono_gave_up:  # once it times out, larger sizes will too
            try:
                mono_s = f"{solve_monolithic(p, timeout_s=args.timeout_s).stats['seconds']:.3f}"
            except ResourceLimitError:
                mono_gave_up = True
        print(f"{n:>3} {part.n_states:>6} {part.stats['seconds']:>8.3f} {mono_s:>8}")


if __name__ == "__main__":
    main()
