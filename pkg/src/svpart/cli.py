"""Command-line front end: partition, run, stats, and bench subcommands.

Exit codes: 0 ok, 2 parse/usage error, 3 partition or configuration error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import circuits, executor, plan as plan_mod, qasm
from .graph import build_graph
from .partitioner import PartitionError, make_hierarchy, partition, tree_to_json

VERIFY_TOL = 1e-10

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PARTITION = 3
EXIT_VERIFY = 4


class ConfigError(Exception):
    pass


def _parse_hierarchy(text: str) -> list[int]:
    try:
        budgets = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad hierarchy {text!r}; expected e.g. 25,15,5")
    if not budgets:
        raise ConfigError("empty hierarchy")
    return budgets


def _resolve_hierarchy(args, d: int) -> list[int]:
    budgets = _parse_hierarchy(args.hierarchy) if args.hierarchy else None
    if args.ranks is not None:
        if args.ranks < 1 or args.ranks & (args.ranks - 1):
            raise ConfigError(f"--ranks {args.ranks} is not a power of two")
        g = args.ranks.bit_length() - 1
        if g >= d:
            raise ConfigError(f"--ranks {args.ranks} leaves no local qubits at d={d}")
        if budgets is None:
            budgets = [d - g]
        elif budgets[0] != d - g:
            raise ConfigError(
                f"--ranks {args.ranks} implies L0={d - g} but hierarchy says {budgets[0]}"
            )
    if budgets is None:
        budgets = [d]
    return budgets


def _read_circuit(path: str) -> qasm.Circuit:
    with open(path) as fh:
        return qasm.parse(fh.read())


def _emit(doc, args) -> None:
    if args.format == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = _as_text(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _as_text(doc) -> str:
    lines = []

    def walk(prefix: str, value) -> None:
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}{k}.", value[k])
        elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
            for i, v in enumerate(value):
                walk(f"{prefix}{i}.", v)
        else:
            lines.append(f"{prefix[:-1]}: {value}")

    walk("", doc)
    return "\n".join(lines) + "\n"


def _pipeline(args):
    circuit = _read_circuit(args.input)
    budgets = _resolve_hierarchy(args, circuit.num_qubits)
    graph = build_graph(circuit)
    t0 = time.perf_counter()
    tree = partition(graph, make_hierarchy(budgets))
    partition_seconds = time.perf_counter() - t0
    execution_plan = plan_mod.lower(tree)
    return circuit, budgets, tree, execution_plan, partition_seconds


def cmd_partition(args) -> int:
    circuit, budgets, tree, execution_plan, seconds = _pipeline(args)
    exchanges = sum(1 for t in execution_plan.tasks if t.kind == "Exchange")
    doc = {
        "d": circuit.num_qubits,
        "hierarchy": budgets,
        "level0_partitions": len(tree.root.children),
        "leaves": len(tree.leaves()),
        "exchanges": exchanges,
        "seconds": seconds,
        "tree": json.loads(tree_to_json(tree)),
    }
    _emit(doc, args)
    if args.format == "text":
        sys.stderr.write(f"partitioned in {seconds:.4f}s\n")
    return EXIT_OK


def cmd_run(args) -> int:
    circuit, budgets, tree, execution_plan, _ = _pipeline(args)
    d = circuit.num_qubits
    if (args.verify or args.dump_state) and d > 14:
        raise ConfigError("--verify/--dump-state need d <= 14 for the dense oracle")
    if args.dump_plan:
        with open(args.dump_plan, "w") as fh:
            fh.write(plan_mod.to_json(execution_plan))
    if args.dump_tree:
        with open(args.dump_tree, "w") as fh:
            fh.write(tree_to_json(tree))
    result = executor.run_plan(execution_plan, shots=args.shots, seed=args.seed)
    doc = {
        "input": args.input,
        "d": d,
        "g": execution_plan.g,
        "ranks": execution_plan.num_ranks,
        "hierarchy": budgets,
        "tasks": result.stats.task_counts,
        "amps_moved": result.stats.amps_moved,
        "bytes_moved": result.stats.bytes_moved,
    }
    if result.histogram is not None:
        doc["histogram"] = result.histogram
    if args.dump_state:
        dense = executor.gather(result.state)
        doc["state"] = [[float(a.real), float(a.imag)] for a in dense]
    exit_code = EXIT_OK
    if args.verify:
        deviation = executor.compare(
            executor.gather(result.state), executor.oracle_simulate(circuit)
        )
        ok = deviation <= VERIFY_TOL
        doc["verify"] = {"deviation": deviation, "ok": ok}
        if not ok:
            exit_code = EXIT_VERIFY
    _emit(doc, args)
    if args.format == "text" and args.verify:
        status = "OK" if doc["verify"]["ok"] else "FAILED"
        sys.stderr.write(f"verify {status}: max deviation {doc['verify']['deviation']:.3e}\n")
    return exit_code


def cmd_stats(args) -> int:
    circuit, budgets, tree, execution_plan, partition_seconds = _pipeline(args)
    result = executor.run_plan(execution_plan)
    stats = result.stats
    doc = {
        "input": args.input,
        "d": circuit.num_qubits,
        "ranks": execution_plan.num_ranks,
        "hierarchy": budgets,
        "partition_seconds": partition_seconds,
        "compute_seconds": stats.compute_seconds,
        "exchange_seconds": stats.exchange_seconds,
        "tasks": stats.task_counts,
        "amps_moved": stats.amps_moved,
        "bytes_moved": stats.bytes_moved,
        "exchanges": stats.exchanges,
    }
    _emit(doc, args)
    return EXIT_OK


def _parse_qubit_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _default_bench_hierarchy(d: int) -> list[int]:
    return [max(2, d - 5), max(2, d - 10), max(2, d - 15)]


def cmd_bench(args) -> int:
    if args.family not in circuits.FAMILIES:
        sys.stderr.write(
            f"unknown family {args.family!r}; choose from {sorted(circuits.FAMILIES)}\n"
        )
        return EXIT_PARSE
    rows = []
    for d in _parse_qubit_range(args.qubits):
        source = circuits.generate(args.family, d, seed=args.seed or 0)
        circuit = qasm.parse(source)
        budgets = (
            _parse_hierarchy(args.hierarchy) if args.hierarchy else _default_bench_hierarchy(d)
        )
        graph = build_graph(circuit)
        t0 = time.perf_counter()
        tree = partition(graph, make_hierarchy(budgets))
        seconds = time.perf_counter() - t0
        execution_plan = plan_mod.lower(tree)
        row = {
            "family": args.family,
            "d": d,
            "gates": len(circuit.ops),
            "hierarchy": budgets,
            "partition_seconds": round(seconds, 6),
            "leaves": len(tree.leaves()),
            "exchanges": sum(1 for t in execution_plan.tasks if t.kind == "Exchange"),
        }
        if args.verify and d <= 14:
            result = executor.run_plan(execution_plan)
            deviation = executor.compare(
                executor.gather(result.state), executor.oracle_simulate(circuit)
            )
            row["deviation"] = deviation
            row["ok"] = deviation <= VERIFY_TOL
        rows.append(row)
    if args.format == "json":
        _emit(rows, args)
    else:
        cols = ["family", "d", "gates", "partition_seconds", "leaves", "exchanges"]
        if args.verify:
            cols += ["deviation", "ok"]
        widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in cols}
        header = "  ".join(c.ljust(widths[c]) for c in cols)
        body = [
            "  ".join(str(r.get(c, "")).ljust(widths[c]) for c in cols) for r in rows
        ]
        text = "\n".join([header] + body) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if args.verify and any(not r.get("ok", True) for r in rows):
        return EXIT_VERIFY
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svpart",
        description="Partition quantum circuits by closeness centrality and "
        "execute them over simulated distributed ranks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="QASM file")
        p.add_argument("--hierarchy", help="local qubits per level, outermost first, e.g. 25,15,5")
        p.add_argument("--ranks", type=int, help="rank count (power of two); implies L0 = d - log2(ranks)")
        p.add_argument("--format", choices=["json", "text"], default="text")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--seed", type=int, default=None)

    p_partition = sub.add_parser("partition", help="partition a circuit and dump the tree")
    common(p_partition)
    p_partition.set_defaults(func=cmd_partition)

    p_run = sub.add_parser("run", help="partition, lower, and execute a circuit")
    common(p_run)
    p_run.add_argument("--shots", type=int, default=None)
    p_run.add_argument("--verify", action="store_true", help="compare against the dense oracle")
    p_run.add_argument("--dump-plan", help="write the plan JSON to this file")
    p_run.add_argument("--dump-tree", help="write the tree JSON to this file")
    p_run.add_argument("--dump-state", action="store_true", help="include the final dense state")
    p_run.set_defaults(func=cmd_run)

    p_stats = sub.add_parser("stats", help="run and report compute/exchange breakdown")
    common(p_stats)
    p_stats.set_defaults(func=cmd_stats)

    p_bench = sub.add_parser("bench", help="sweep a circuit family over qubit counts")
    common(p_bench, with_input=False)
    p_bench.add_argument("--family", required=True, help="|".join(sorted(circuits.FAMILIES)))
    p_bench.add_argument("--qubits", required=True, help="e.g. 30..37 or 4,6,8")
    p_bench.add_argument("--verify", action="store_true")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except qasm.QasmError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except FileNotFoundError as exc:
        sys.stderr.write(f"cannot read input: {exc}\n")
        return EXIT_PARSE
    except (ConfigError, PartitionError, executor.TooLarge, plan_mod.PlanError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARTITION


if __name__ == "__main__":
    sys.exit(main())
