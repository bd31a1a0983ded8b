"""Command-line front end: ``langeq solve|verify|bench|export``.

Exit codes: 0 success, 1 malformed input or usage, 2 no solution (empty
Csf), 3 resource limit or timeout, 4 verification failed.
"""
from __future__ import annotations

import argparse
import csv
import logging
import multiprocessing
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

from .automata import complete_explicit
from .autfmt import read_aut, write_aut, write_dot
from .dd import DEFAULT_NODE_LIMIT
from .errors import FormatError, ResourceLimitError, UsageError
from .netlist import Network, parse_blif_lite, parse_split_spec
from .solver import (make_problem, network_automaton, solve_monolithic, solve_partitioned,
                     verify_solution)

log = logging.getLogger("langeq")

EXIT_OK, EXIT_FORMAT, EXIT_EMPTY, EXIT_RESOURCE, EXIT_VERIFY = 0, 1, 2, 3, 4
BENCH_HEADER = ["name", "i", "o", "cs", "f_cs", "x_cs", "csf_states", "part_s", "mono_s", "ratio"]
FLOWS = {"partitioned": solve_partitioned, "monolithic": solve_monolithic}


def _read_network(path) -> Network:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_blif_lite(text)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _problem(args):
    net = _read_network(args.circuit)
    x = parse_split_spec(net, args.split)
    return make_problem(net, x, node_limit=args.node_limit)


def _flow_paths(out: Path, flows: Sequence[str], suffix: str) -> List[Path]:
    if len(flows) == 1:
        return [out]
    stem = out.with_suffix("") if out.suffix == suffix else out
    return [stem.with_name(f"{stem.name}.{f}{suffix}") for f in flows]


def cmd_solve(args) -> int:
    p = _problem(args)
    flows = list(FLOWS) if args.flow == "both" else [args.flow]
    aut_paths = _flow_paths(Path(args.out), flows, ".aut")
    dot_paths = _flow_paths(Path(args.dot), flows, ".dot") if args.dot else [None] * len(flows)
    empty = False
    for flow, aut_path, dot_path in zip(flows, aut_paths, dot_paths):
        csf = FLOWS[flow](p, subset_limit=args.subset_limit, timeout_s=args.timeout_s)
        st = csf.stats
        tag = f" flow={flow}" if len(flows) > 1 else ""
        print(f"states={csf.n_states} explored={st['explored']} time_s={st['seconds']:.3f}{tag}")
        aut_path.write_text(write_aut(csf.automaton, Path(args.circuit).stem, p.u_vars))
        if dot_path is not None:
            dot_path.write_text(write_dot(csf.automaton, f"{flow} csf"))
        empty = empty or csf.is_empty
    if empty:
        print("no solution: the Csf is empty", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def _directive(text: str, head: str, default=None):
    for ln in text.splitlines():
        tok = ln.split("#", 1)[0].split()
        if tok and tok[0] == head:
            return tok[1:] or default
    return default


def cmd_verify(args) -> int:
    p = _problem(args)
    text = Path(args.csf).read_text()
    m = p.manager
    header = _directive(text, ".labels")
    expected = sorted(m.name_of(v) for v in p.uv_vars)
    if header is not None and sorted(header) != expected:
        raise FormatError(f"Csf labels {header} do not match the split's wires {expected}")
    x = read_aut(text, manager=m)
    report = verify_solution(p, x, timeout_s=args.timeout_s)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_VERIFY


def _fmt_time(t: float) -> str:
    return f"{max(t, 1e-4):.4f}"


def bench_row(name: str, blif: str, split: str, timeout_s: Optional[float],
              node_limit: Optional[int] = DEFAULT_NODE_LIMIT) -> List[str]:
    """One CSV row; failures become "CNC" (resources) or "ERR" (bad input)."""
    try:
        net = _read_network(blif)
        p = make_problem(net, parse_split_spec(net, split), node_limit=node_limit)
    except (FormatError, UsageError) as exc:
        log.warning("%s: %s", name, exc)
        return [name] + ["-"] * 6 + ["ERR", "ERR", "-"]
    times, states = {}, "-"
    for flow in ("partitioned", "monolithic"):
        try:
            csf = FLOWS[flow](p, timeout_s=timeout_s)
        except ResourceLimitError as exc:
            log.info("%s %s: %s", name, flow, exc)
            times[flow] = "CNC"
            continue
        times[flow] = _fmt_time(csf.stats["seconds"])
        if states == "-":
            states = str(csf.n_states)
    part, mono = times["partitioned"], times["monolithic"]
    ratio = "-" if "CNC" in (part, mono) else f"{float(mono) / float(part):.1f}"
    x_cs = len(p.split.unknown.latches)
    return [name, str(len(net.inputs)), str(len(net.outputs)), str(len(net.latches)),
            str(len(net.latches) - x_cs), str(x_cs), states, part, mono, ratio]


def read_manifest(path) -> List[tuple]:
    base = Path(path).parent
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FormatError("expected '<name> <blif path> <split spec>'", lineno)
        name, blif, split = parts
        rows.append((name, str(base / blif) if not os.path.isabs(blif) else blif, split))
    return rows


def cmd_bench(args) -> int:
    entries = read_manifest(args.manifest)
    jobs = [(n, b, s, args.timeout_s, args.node_limit) for n, b, s in entries]
    if args.jobs > 1:
        # spawn: forking a process that has started threads can deadlock
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=args.jobs, mp_context=ctx) as pool:
            rows = list(pool.map(_bench_star, jobs))
    else:
        rows = [_bench_star(j) for j in jobs]
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BENCH_HEADER)
        w.writerows(rows)
    for r in rows:
        print(",".join(r))
    return EXIT_OK


def _bench_star(job):
    return bench_row(*job)


def cmd_export(args) -> int:
    if bool(args.inp) == bool(args.circuit):
        raise UsageError("give exactly one of --in and --circuit")
    if args.inp:
        text = Path(args.inp).read_text()
        e = read_aut(text)
        name = _directive(text, ".aut", [Path(args.inp).stem])[0]
    else:
        e = network_automaton(_read_network(args.circuit))
        name = Path(args.circuit).stem
    if args.completed:
        e = complete_explicit(e)
    if not args.dot and not args.out:
        raise UsageError("nothing to write: give --dot and/or --out")
    if args.dot:
        Path(args.dot).write_text(write_dot(e, name))
    if args.out:
        Path(args.out).write_text(write_aut(e, name))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # argparse's own exit status 2 would read as "no solution"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FORMAT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="langeq", description="Solve F . X <= S for a latch split of a circuit.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, split=True):
        sp.add_argument("--circuit", required=split, help="BLIF-lite netlist")
        if split:
            sp.add_argument("--split", required=True,
                            help="latches of the unknown: comma-separated names or k:N")
        sp.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
        sp.add_argument("--timeout-s", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0, help="accepted for reproducible scripts")

    sp = sub.add_parser("solve", help="compute the complete sequential flexibility")
    common(sp)
    sp.add_argument("--flow", choices=["partitioned", "monolithic", "both"], default="partitioned")
    sp.add_argument("--out", required=True, help="AUT output (a stem when --flow both)")
    sp.add_argument("--dot")
    sp.add_argument("--subset-limit", type=int, default=None)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="check a Csf against the circuit")
    common(sp)
    sp.add_argument("--csf", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="time both flows over a manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--csv", required=True)
    sp.add_argument("--timeout-s", type=float, default=60.0)
    sp.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("export", help="render an automaton as DOT (or canonical AUT)")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--circuit")
    sp.add_argument("--dot")
    sp.add_argument("--out")
    sp.add_argument("--completed", action="store_true", help="add the DC sink first")
    sp.set_defaults(func=cmd_export)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (FormatError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
